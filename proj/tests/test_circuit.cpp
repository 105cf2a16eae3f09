#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numbers>
#include <set>

#include "qhmft/circuit.hpp"
#include "qhmft/full_space.hpp"
#include "qhmft/rng.hpp"

using namespace qhmft;

namespace {
constexpr double pi = std::numbers::pi;

ParamVector random_params(int n, std::uint64_t seed) {
    auto rng = make_stream(seed, "circuit-test");
    std::uniform_real_distribution<double> dist(-pi, pi);
    ParamVector x(n);
    for (int k = 0; k < n; ++k) x[k] = dist(rng);
    return x;
}
}  // namespace

TEST_CASE("parameter and depth counting") {
    // n = (5 L^2 - 4 L) m, depth 5m for L=2 and 9m beyond
    struct Row {
        int L, m;
        bool tied;
        int n_params, depth;
    };
    for (const Row& r : {Row{2, 1, false, 12, 5}, Row{2, 2, false, 24, 10},
                         Row{2, 2, true, 12, 10}, Row{4, 1, false, 64, 9},
                         Row{4, 2, false, 128, 18}, Row{6, 1, false, 156, 9},
                         Row{4, 4, false, 256, 36}}) {
        CircuitSpec spec = build_circuit(r.L, r.m, r.tied);
        CHECK(spec.n_params == r.n_params);
        CHECK(spec.depth == r.depth);
    }
}

TEST_CASE("invalid circuit requests") {
    CHECK_THROWS_AS(build_circuit(3, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_circuit(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_circuit(4, 1, true), std::invalid_argument);  // tying is L=2 only
}

TEST_CASE("each layer acts on disjoint qubits") {
    for (int L : {2, 4}) {
        CircuitSpec spec = build_circuit(L, 2, false);
        std::map<int, std::set<int>> touched;  // layer -> sites
        for (const GateSlot& g : spec.slots) {
            auto& sites = touched[g.layer_index];
            CHECK(sites.insert(g.site_a).second);
            if (g.site_b >= 0) CHECK(sites.insert(g.site_b).second);
        }
    }
}

TEST_CASE("every intra NN bond gets exactly one xy and one zz gate per macro-layer") {
    for (int L : {2, 4, 6}) {
        ClusterGeometry geo = build_cluster(L);
        CircuitSpec spec = build_circuit(L, 2, false);
        for (int macro = 0; macro < 2; ++macro) {
            std::map<std::pair<int, int>, int> xy_count, zz_count;
            for (const GateSlot& g : spec.slots) {
                if (g.macro_layer != macro || g.site_b < 0) continue;
                auto key = std::minmax(g.site_a, g.site_b);
                (g.family == GateFamily::xy ? xy_count : zz_count)[key]++;
            }
            int nn_bonds = 0;
            for (const Bond& b : geo.intra_bonds) {
                if (b.range != BondRange::nn) continue;
                ++nn_bonds;
                CHECK(xy_count[{b.i, b.j}] == 1);
                CHECK(zz_count[{b.i, b.j}] == 1);
            }
            CHECK(static_cast<int>(xy_count.size()) == nn_bonds);
            CHECK(static_cast<int>(zz_count.size()) == nn_bonds);
        }
    }
}

TEST_CASE("sublayer order within a macro-layer is xy block, zz block, z layer") {
    CircuitSpec spec = build_circuit(4, 1, false);
    int last_family_rank = 0;
    for (const GateSlot& g : spec.slots) {
        int rank = g.family == GateFamily::xy ? 0 : g.family == GateFamily::zz ? 1 : 2;
        CHECK(rank >= last_family_rank);
        last_family_rank = rank;
    }
    // final layer is Z on every site
    std::set<int> z_sites;
    for (const GateSlot& g : spec.slots) {
        if (g.family == GateFamily::z) {
            CHECK(g.layer_index == spec.depth - 1);
            z_sites.insert(g.site_a);
        }
    }
    CHECK(z_sites.size() == 16);
}

TEST_CASE("tied mode shares one parameter per family per macro-layer") {
    CircuitSpec spec = build_circuit(2, 2, true);
    std::map<std::pair<int, int>, std::set<int>> classes;  // (macro, family rank) -> slots
    for (const GateSlot& g : spec.slots) {
        int rank = g.family == GateFamily::xy ? 0 : g.family == GateFamily::zz ? 1 : 2;
        classes[{g.macro_layer, rank}].insert(g.param_slot);
    }
    for (int macro = 0; macro < 2; ++macro) {
        CHECK(classes[{macro, 0}].size() == 1);  // all xy tied
        CHECK(classes[{macro, 1}].size() == 1);  // all zz tied
        CHECK(classes[{macro, 2}].size() == 4);  // z stay independent
    }
}

TEST_CASE("apply followed by apply_inverse is the identity") {
    for (bool tied : {false, true}) {
        ClusterGeometry geo = build_cluster(2);
        CircuitSpec spec = build_circuit(2, 2, tied);
        ParamVector x = random_params(spec.n_params, tied ? 5 : 6);
        SectorState s = init_neel(geo);
        StateVector before = s.amplitudes;
        apply_circuit(spec, x, s);
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
        apply_inverse(spec, x, s);
        CHECK((s.amplitudes - before).norm() < 1e-12);
    }
}

TEST_CASE("circuit action matches the gate-by-gate full-space product") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec spec = build_circuit(2, 2, false);
    ParamVector x = random_params(spec.n_params, 9);

    SectorState s = init_neel(geo);
    StateVector full = full_space_reference(s);
    apply_circuit(spec, x, s);
    for (const GateSlot& g : spec.slots) {
        double theta = x[g.param_slot];
        switch (g.family) {
            case GateFamily::xy: full_space::apply_xy(full, g.site_a, g.site_b, theta); break;
            case GateFamily::zz: full_space::apply_zz(full, g.site_a, g.site_b, theta); break;
            case GateFamily::z: full_space::apply_z(full, g.site_a, theta); break;
        }
    }
    CHECK((full_space_reference(s) - full).norm() < 1e-12);
}

TEST_CASE("wrong parameter count is rejected") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec spec = build_circuit(2, 1, false);
    SectorState s = init_neel(geo);
    CHECK_THROWS_AS(apply_circuit(spec, ParamVector::Zero(3), s), std::invalid_argument);
}

TEST_CASE("json dump carries the layout") {
    std::string js = circuit_to_json(build_circuit(2, 1, true));
    for (const char* key : {"n_params", "depth", "slots", "tied"}) {
        CHECK(js.find(key) != std::string::npos);
    }
}
