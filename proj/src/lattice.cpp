#include "qhmft/lattice.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qhmft {

namespace {

// Positive modulo.
int wrap(int v, int L) {
    int r = v % L;
    return r < 0 ? r + L : r;
}

constexpr int kNNOffsets[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
constexpr int kNNNOffsets[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

bool inside(int x, int y, int L) { return x >= 0 && x < L && y >= 0 && y < L; }

void sort_bonds(std::vector<Bond>& bonds) {
    std::sort(bonds.begin(), bonds.end(), [](const Bond& a, const Bond& b) {
        auto key = [](const Bond& bd) {
            return std::tuple(static_cast<int>(bd.kind), static_cast<int>(bd.range),
                              std::min(bd.i, bd.j), std::max(bd.i, bd.j));
        };
        return key(a) < key(b);
    });
}

}  // namespace

ClusterGeometry build_cluster(int L) {
    if (L < 2 || L % 2 != 0) {
        throw std::invalid_argument("build_cluster: L must be a positive even integer, got " +
                                    std::to_string(L));
    }
    ClusterGeometry geo;
    geo.L = L;
    geo.n_sites = L * L;
    geo.sites.reserve(static_cast<std::size_t>(geo.n_sites));
    geo.neel_sign.resize(static_cast<std::size_t>(geo.n_sites));
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            int id = y * L + x;
            geo.sites.push_back(SiteIndex{id, x, y});
            geo.neel_sign[static_cast<std::size_t>(id)] = ((x + y) % 2 == 0) ? 1 : -1;
        }
    }

    // key: (range, min id, max id) -> directed multiplicity of folded pairs
    std::map<std::tuple<int, int, int>, int> boundary_count;

    auto visit = [&](const SiteIndex& s, const int (*offsets)[2], BondRange range) {
        for (int d = 0; d < 4; ++d) {
            int nx = s.x + offsets[d][0];
            int ny = s.y + offsets[d][1];
            if (inside(nx, ny, L)) {
                int nid = ny * L + nx;
                if (nid > s.id) {
                    geo.intra_bonds.push_back(Bond{s.id, nid, BondKind::intra, range, 1.0});
                }
            } else {
                int nid = wrap(ny, L) * L + wrap(nx, L);
                auto key = std::tuple(static_cast<int>(range), std::min(s.id, nid),
                                      std::max(s.id, nid));
                boundary_count[key] += 1;
            }
        }
    };

    for (const SiteIndex& s : geo.sites) {
        visit(s, kNNOffsets, BondRange::nn);
        visit(s, kNNNOffsets, BondRange::nnn);
    }

    for (const auto& [key, count] : boundary_count) {
        auto [range, i, j] = key;
        geo.boundary_bonds.push_back(Bond{i, j, BondKind::boundary,
                                          static_cast<BondRange>(range), 0.5 * count});
    }

    sort_bonds(geo.intra_bonds);
    sort_bonds(geo.boundary_bonds);
    return geo;
}

SiteIndex fold_external_site(const ClusterGeometry& geo, int x, int y) {
    if (geo.L <= 0) throw std::invalid_argument("fold_external_site: invalid geometry");
    int id = wrap(y, geo.L) * geo.L + wrap(x, geo.L);
    return geo.site(id);
}

std::string geometry_to_json(const ClusterGeometry& geo) {
    nlohmann::json j;
    j["L"] = geo.L;
    j["n_sites"] = geo.n_sites;
    j["sites"] = nlohmann::json::array();
    for (const auto& s : geo.sites) {
        j["sites"].push_back({{"id", s.id}, {"x", s.x}, {"y", s.y}});
    }
    auto bond_json = [](const Bond& b) {
        return nlohmann::json{{"i", b.i},
                              {"j", b.j},
                              {"kind", b.kind == BondKind::intra ? "intra" : "boundary"},
                              {"range", b.range == BondRange::nn ? "nn" : "nnn"},
                              {"weight", b.weight}};
    };
    j["intra_bonds"] = nlohmann::json::array();
    for (const auto& b : geo.intra_bonds) j["intra_bonds"].push_back(bond_json(b));
    j["boundary_bonds"] = nlohmann::json::array();
    for (const auto& b : geo.boundary_bonds) j["boundary_bonds"].push_back(bond_json(b));
    return j.dump(2);
}

}  // namespace qhmft
