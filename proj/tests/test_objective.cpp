#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "qhmft/objective.hpp"
#include "qhmft/rng.hpp"

using namespace qhmft;

namespace {
constexpr double pi = std::numbers::pi;

ParamVector random_params(int n, std::uint64_t seed, double amp = pi) {
    auto rng = make_stream(seed, "objective-test");
    std::uniform_real_distribution<double> dist(-amp, amp);
    ParamVector x(n);
    for (int k = 0; k < n; ++k) x[k] = dist(rng);
    return x;
}
}  // namespace

TEST_CASE("checkerboard product state energies") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec spec = build_circuit(2, 1, false);

    // theta = 0 leaves the classical checkerboard state: every NN pair
    // contributes -1/4 (intra and boundary alike), every NNN pair +1/4.
    EnergyObjective at_zero(geo, ModelParams{1.0, 0.0}, spec);
    CHECK(at_zero.energy(ParamVector::Zero(spec.n_params)) == doctest::Approx(-0.5));

    EnergyObjective at_one(geo, ModelParams{1.0, 1.0}, spec);
    CHECK(at_one.energy(ParamVector::Zero(spec.n_params)) == doctest::Approx(0.0));

    SectorState s = at_zero.prepare(ParamVector::Zero(spec.n_params));
    CHECK(at_zero.dE_dJ2(s) == doctest::Approx(0.5));

    EnergyReport rep = at_zero.report(s);
    CHECK(rep.e_intra == doctest::Approx(-0.25));
    CHECK(rep.e_mf == doctest::Approx(-0.25));
    CHECK(rep.e_total == doctest::Approx(rep.e_intra + rep.e_mf));
    CHECK(rep.mean_fields.size() == 4);
    CHECK(rep.mean_fields[0] == doctest::Approx(0.5));
    CHECK(rep.mean_fields[1] == doctest::Approx(-0.5));
}

TEST_CASE("order parameters of the checkerboard state") {
    ClusterGeometry geo = build_cluster(4);
    SectorState s = init_neel(geo);
    OrderParameters op = compute_order_parameters(geo, s);
    CHECK(op.m_neel == doctest::Approx(0.5));
    CHECK(op.m_caf_x == doctest::Approx(0.0));
    CHECK(op.m_caf_y == doctest::Approx(0.0));
    // every NN pair is antiparallel (-1/4); staggered signs +,-,+ leave one
    // net bond per row, so (1/L) * L rows * (-1/4) = -1/4
    CHECK(op.d_x == doctest::Approx(-0.25));
    CHECK(op.d_y == doctest::Approx(-0.25));
}

TEST_CASE("dimer observable rejects bad axes") {
    ClusterGeometry geo = build_cluster(2);
    SectorState s = init_neel(geo);
    CHECK_THROWS_AS(dimer(geo, s, 2), std::invalid_argument);
}

TEST_CASE("energy is linear in J2 with the Hellmann-Feynman slope") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec spec = build_circuit(2, 2, false);
    ParamVector x = random_params(spec.n_params, 3);
    EnergyObjective lo(geo, ModelParams{1.0, 0.3}, spec);
    EnergyObjective hi(geo, ModelParams{1.0, 0.7}, spec);
    double slope = (hi.energy(x) - lo.energy(x)) / 0.4;
    CHECK(lo.dE_dJ2(x) == doctest::Approx(slope).epsilon(1e-10));
    CHECK(hi.dE_dJ2(x) == doctest::Approx(slope).epsilon(1e-10));
}

TEST_CASE("adjoint gradient matches central finite differences") {
    for (auto [L, m] : {std::pair{2, 1}, {2, 2}}) {
        ClusterGeometry geo = build_cluster(L);
        CircuitSpec spec = build_circuit(L, m, false);
        EnergyObjective obj(geo, ModelParams{1.0, 0.55}, spec);
        for (int trial = 0; trial < 4; ++trial) {
            ParamVector x = random_params(spec.n_params, 100 + trial);
            ParamVector ga = obj.gradient_adjoint(x);
            ParamVector gf = obj.gradient_fd(x, FdScheme::central, 1e-6);
            double rel = (ga - gf).norm() / std::max(1e-12, gf.norm());
            CHECK(rel < 1e-5);
        }
    }
}

TEST_CASE("value_and_gradient matches the separate entry points") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec spec = build_circuit(2, 2, false);
    EnergyObjective obj(geo, ModelParams{1.0, 0.4}, spec);
    ParamVector x = random_params(spec.n_params, 17);
    ParamVector g;
    double v = obj.value_and_gradient_adjoint(x, g);
    CHECK(v == doctest::Approx(obj.energy(x)).epsilon(1e-14));
    CHECK((g - obj.gradient_adjoint(x)).norm() == doctest::Approx(0.0));
}

TEST_CASE("tied gradients accumulate their class members") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec tied = build_circuit(2, 2, true);
    CircuitSpec full = build_circuit(2, 2, false);
    EnergyObjective obj_tied(geo, ModelParams{1.0, 0.35}, tied);
    EnergyObjective obj_full(geo, ModelParams{1.0, 0.35}, full);

    ParamVector xt = random_params(tied.n_params, 23);
    // expand tied parameters onto the untied slots (same slot ordering)
    ParamVector xf(full.n_params);
    for (std::size_t k = 0; k < full.slots.size(); ++k) {
        xf[full.slots[k].param_slot] = xt[tied.slots[k].param_slot];
    }
    CHECK(obj_tied.energy(xt) == doctest::Approx(obj_full.energy(xf)).epsilon(1e-14));

    ParamVector gt = obj_tied.gradient_adjoint(xt);
    ParamVector gf = obj_full.gradient_adjoint(xf);
    ParamVector accumulated = ParamVector::Zero(tied.n_params);
    for (std::size_t k = 0; k < full.slots.size(); ++k) {
        accumulated[tied.slots[k].param_slot] += gf[full.slots[k].param_slot];
    }
    CHECK((gt - accumulated).norm() < 1e-12);
}

TEST_CASE("forward finite differences with tiny step track the adjoint gradient") {
    ClusterGeometry geo = build_cluster(2);
    CircuitSpec spec = build_circuit(2, 1, false);
    EnergyObjective obj(geo, ModelParams{1.0, 0.5}, spec);
    ParamVector x = random_params(spec.n_params, 31, 0.5);
    ParamVector ga = obj.gradient_adjoint(x);
    ParamVector gf = obj.gradient_fd(x, FdScheme::forward, 1e-7);
    CHECK((ga - gf).lpNorm<Eigen::Infinity>() < 1e-5);
    CHECK_THROWS_AS(obj.gradient_fd(x, FdScheme::forward, 0.0), std::invalid_argument);
}

TEST_CASE("objective rejects inconsistent construction") {
    ClusterGeometry geo = build_cluster(2);
    CHECK_THROWS_AS(EnergyObjective(geo, ModelParams{0.0, 0.1}, build_circuit(2, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(EnergyObjective(geo, ModelParams{1.0, 0.1}, build_circuit(4, 1)),
                    std::invalid_argument);
}
