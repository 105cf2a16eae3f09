#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qhmft/lattice.hpp"
#include "qhmft/sector.hpp"

namespace qhmft {

struct ModelParams {
    double j1 = 1.0;
    double j2 = 0.0;

    double coupling(BondRange r) const { return r == BondRange::nn ? j1 : j2; }
};

/// Matrix-free action of the open-boundary cluster Hamiltonian
///   H = sum_intra J_b S_i.S_j + sum_j field_j Sz_j
/// in a fixed-weight sector. Real symmetric in the computational basis; the
/// action is templated on the scalar so the same kernel serves the real
/// eigensolver and the complex adjoint sweep.
class SectorHamiltonian {
  public:
    SectorHamiltonian(std::shared_ptr<const SectorBasis> basis, const ClusterGeometry& geo,
                      const ModelParams& model, const Eigen::VectorXd& site_field)
        : basis_(std::move(basis)) {
        if (model.j1 <= 0) throw std::invalid_argument("ModelParams: J1 must be positive");
        if (site_field.size() != geo.n_sites) {
            throw std::invalid_argument("SectorHamiltonian: field length != n_sites");
        }
        if (!site_field.allFinite()) {
            throw std::invalid_argument("SectorHamiltonian: non-finite field");
        }
        const auto dim = static_cast<Eigen::Index>(basis_->dim());
        diag_ = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index idx = 0; idx < dim; ++idx) {
            auto bits = basis_->state(static_cast<std::size_t>(idx));
            double d = 0.0;
            for (const Bond& b : geo.intra_bonds) {
                double si = (bits >> b.i) & 1 ? -0.5 : 0.5;
                double sj = (bits >> b.j) & 1 ? -0.5 : 0.5;
                d += model.coupling(b.range) * si * sj;
            }
            for (int site = 0; site < geo.n_sites; ++site) {
                d += site_field[site] * (((bits >> site) & 1) ? -0.5 : 0.5);
            }
            diag_[idx] = d;
        }
        for (const Bond& b : geo.intra_bonds) {
            off_.push_back({&basis_->pair_table(b.i, b.j), 0.5 * model.coupling(b.range)});
        }
    }

    Eigen::Index dim() const { return diag_.size(); }
    const SectorBasis& basis() const { return *basis_; }
    std::shared_ptr<const SectorBasis> basis_ptr() const { return basis_; }

    template <typename Derived, typename OtherDerived>
    void apply(const Eigen::MatrixBase<Derived>& x, Eigen::MatrixBase<OtherDerived>& y) const {
        y = diag_.cwiseProduct(x.derived());
        for (const OffBond& ob : off_) {
            for (const auto& [a01, a10] : ob.table->pairs) {
                y[a01] += ob.half_j * x[a10];
                y[a10] += ob.half_j * x[a01];
            }
        }
    }

    template <typename Vec>
    Vec apply(const Vec& x) const {
        Vec y(x.size());
        apply(x, y);
        return y;
    }

  private:
    struct OffBond {
        const SectorBasis::PairTable* table;
        double half_j;
    };
    std::shared_ptr<const SectorBasis> basis_;
    Eigen::VectorXd diag_;
    std::vector<OffBond> off_;
};

/// Effective boundary field from frozen mean fields: for every folded
/// boundary bond (i, j) with weight w, site i feels w*J*m_j and vice versa.
inline Eigen::VectorXd effective_boundary_field(const ClusterGeometry& geo,
                                                const ModelParams& model,
                                                const Eigen::VectorXd& mean_fields) {
    Eigen::VectorXd field = Eigen::VectorXd::Zero(geo.n_sites);
    for (const Bond& b : geo.boundary_bonds) {
        double wj = b.weight * model.coupling(b.range);
        field[b.i] += wj * mean_fields[b.j];
        field[b.j] += wj * mean_fields[b.i];
    }
    return field;
}

}  // namespace qhmft
