#pragma once

#include <string>
#include <vector>

namespace qhmft {

/// Position of one qubit inside the L×L cluster. Ids are row-major from the
/// bottom-left corner: id = y*L + x.
struct SiteIndex {
    int id = 0;
    int x = 0;
    int y = 0;
};

enum class BondKind { intra, boundary };
enum class BondRange { nn, nnn };

/// A two-site coupling term. Intra bonds carry weight 1. A boundary bond
/// (i, j) stands for all inter-cluster pairs that fold onto the ordered pair
/// (min, max); its weight is that multiplicity times 1/2, so the double
/// counting of the embedding energy is absorbed at build time.
struct Bond {
    int i = 0;
    int j = 0;
    BondKind kind = BondKind::intra;
    BondRange range = BondRange::nn;
    double weight = 1.0;
};

struct ClusterGeometry {
    int L = 0;
    int n_sites = 0;
    std::vector<SiteIndex> sites;
    std::vector<Bond> intra_bonds;
    std::vector<Bond> boundary_bonds;
    std::vector<int> neel_sign;  // (-1)^(x+y) per site

    const SiteIndex& site(int id) const { return sites[static_cast<std::size_t>(id)]; }
    int site_id(int x, int y) const { return y * L + x; }
};

ClusterGeometry build_cluster(int L);

/// Maps a coordinate outside the cluster back to its image site, coordinates
/// taken modulo L. Throws if the coordinate is not reachable by a superlattice
/// translation of a cluster site (always reachable on the square superlattice,
/// so this only rejects degenerate inputs when L <= 0).
SiteIndex fold_external_site(const ClusterGeometry& geo, int x, int y);

/// JSON dump of sites, bonds and weights, for fixture diffing.
std::string geometry_to_json(const ClusterGeometry& geo);

}  // namespace qhmft
