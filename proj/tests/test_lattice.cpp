#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "qhmft/lattice.hpp"

using namespace qhmft;

namespace {

double boundary_weight_sum(const ClusterGeometry& geo, BondRange range) {
    double acc = 0.0;
    for (const Bond& b : geo.boundary_bonds) {
        if (b.range == range) acc += b.weight;
    }
    return acc;
}

const Bond* find_boundary(const ClusterGeometry& geo, int i, int j, BondRange range) {
    for (const Bond& b : geo.boundary_bonds) {
        if (b.range == range && b.i == std::min(i, j) && b.j == std::max(i, j)) return &b;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("site indexing is row-major from the bottom-left corner") {
    ClusterGeometry geo = build_cluster(4);
    CHECK(geo.n_sites == 16);
    CHECK(geo.site(0).x == 0);
    CHECK(geo.site(0).y == 0);
    CHECK(geo.site(5).x == 1);
    CHECK(geo.site(5).y == 1);
    CHECK(geo.site(14).x == 2);
    CHECK(geo.site(14).y == 3);
    CHECK(geo.site_id(2, 3) == 14);
    for (const SiteIndex& s : geo.sites) CHECK(geo.site_id(s.x, s.y) == s.id);
}

TEST_CASE("odd or too-small cluster sizes are rejected") {
    CHECK_THROWS_AS(build_cluster(3), std::invalid_argument);
    CHECK_THROWS_AS(build_cluster(1), std::invalid_argument);
    CHECK_THROWS_AS(build_cluster(0), std::invalid_argument);
    CHECK_THROWS_AS(build_cluster(-2), std::invalid_argument);
}

TEST_CASE("2x2 intra bonds") {
    ClusterGeometry geo = build_cluster(2);
    std::vector<std::pair<int, int>> nn, nnn;
    for (const Bond& b : geo.intra_bonds) {
        CHECK(b.weight == 1.0);
        (b.range == BondRange::nn ? nn : nnn).emplace_back(b.i, b.j);
    }
    CHECK(nn == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    CHECK(nnn == std::vector<std::pair<int, int>>{{0, 3}, {1, 2}});
}

TEST_CASE("2x2 boundary bonds carry the folded multiplicities") {
    ClusterGeometry geo = build_cluster(2);
    // each NN pair is reachable by two inter-cluster links -> weight 2/2 = 1
    for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 3}, {2, 3}}) {
        const Bond* b = find_boundary(geo, i, j, BondRange::nn);
        REQUIRE(b != nullptr);
        CHECK(b->weight == doctest::Approx(1.0));
    }
    // diagonal pairs fold six inter-cluster links each -> weight 3
    for (auto [i, j] : {std::pair{0, 3}, {1, 2}}) {
        const Bond* b = find_boundary(geo, i, j, BondRange::nnn);
        REQUIRE(b != nullptr);
        CHECK(b->weight == doctest::Approx(3.0));
    }
    CHECK(boundary_weight_sum(geo, BondRange::nn) == doctest::Approx(4.0));
    CHECK(boundary_weight_sum(geo, BondRange::nnn) == doctest::Approx(6.0));
}

TEST_CASE("4x4 boundary bond counts") {
    ClusterGeometry geo = build_cluster(4);
    int nn = 0, nnn = 0;
    for (const Bond& b : geo.boundary_bonds) (b.range == BondRange::nn ? nn : nnn)++;
    CHECK(nn == 8);
    CHECK(nnn == 14);
}

TEST_CASE("boundary weight totals close the infinite-lattice coordination") {
    // every site has 4 NN and 4 NNN on the square lattice; intra + boundary
    // weights (boundary counted once per unordered pair, times 1/2 per link
    // already folded in) must reproduce 2N bonds of each range in total.
    for (int L : {2, 4, 6}) {
        ClusterGeometry geo = build_cluster(L);
        int N = L * L;
        double intra_nn = 0, intra_nnn = 0;
        for (const Bond& b : geo.intra_bonds) {
            (b.range == BondRange::nn ? intra_nn : intra_nnn) += b.weight;
        }
        CHECK(intra_nn == doctest::Approx(2.0 * L * (L - 1)));
        CHECK(intra_nnn == doctest::Approx(2.0 * (L - 1) * (L - 1)));
        CHECK(intra_nn + boundary_weight_sum(geo, BondRange::nn) == doctest::Approx(2.0 * N));
        CHECK(intra_nnn + boundary_weight_sum(geo, BondRange::nnn) == doctest::Approx(2.0 * N));
    }
}

TEST_CASE("checkerboard sign pattern") {
    ClusterGeometry geo = build_cluster(4);
    for (const SiteIndex& s : geo.sites) {
        CHECK(geo.neel_sign[static_cast<std::size_t>(s.id)] == ((s.x + s.y) % 2 == 0 ? 1 : -1));
    }
}

TEST_CASE("external coordinates fold modulo L") {
    ClusterGeometry geo = build_cluster(4);
    CHECK(fold_external_site(geo, 4, 3).id == geo.site_id(0, 3));
    CHECK(fold_external_site(geo, -1, 0).id == geo.site_id(3, 0));
    CHECK(fold_external_site(geo, -1, -1).id == geo.site_id(3, 3));
    CHECK(fold_external_site(geo, 7, 9).id == geo.site_id(3, 1));
    CHECK(fold_external_site(geo, 2, 2).id == geo.site_id(2, 2));
}

TEST_CASE("geometry json dump names every section") {
    ClusterGeometry geo = build_cluster(2);
    std::string js = geometry_to_json(geo);
    for (const char* key : {"sites", "intra_bonds", "boundary_bonds", "\"L\""}) {
        CHECK(js.find(key) != std::string::npos);
    }
}
