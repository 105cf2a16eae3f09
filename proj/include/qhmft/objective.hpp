#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qhmft/circuit.hpp"
#include "qhmft/hamiltonian.hpp"
#include "qhmft/lattice.hpp"
#include "qhmft/sector.hpp"

namespace qhmft {

struct EnergyReport {
    double e_intra = 0.0;  // per spin, intra-cluster bonds
    double e_mf = 0.0;     // per spin, boundary mean-field products
    double e_total = 0.0;
    Eigen::VectorXd mean_fields;  // <Sz_j> per site
};

struct OrderParameters {
    double m_neel = 0.0;   // |Mz(pi,pi)|
    double m_caf_x = 0.0;  // |Mz(pi,0)|
    double m_caf_y = 0.0;  // |Mz(0,pi)|
    double d_x = 0.0;
    double d_y = 0.0;

    double m_caf() const { return std::max(m_caf_x, m_caf_y); }
};

/// Mz(k) = (1/N) sum_j exp(-i r_j.k) <Sz_j>.
std::complex<double> magnetization(const ClusterGeometry& geo, const SectorState& state,
                                   double kx, double ky);

/// Dimer observable along axis (0=x, 1=y): (1/L) sum over intra NN bonds
/// along that axis of (-1)^(r_i) <S_i.S_j>, r the axis coordinate of the
/// bond's lower site.
double dimer(const ClusterGeometry& geo, const SectorState& state, int axis);

OrderParameters compute_order_parameters(const ClusterGeometry& geo, const SectorState& state);

/// Energy per spin of the embedded cluster: intra-cluster exchange plus the
/// weighted boundary products of z mean fields.
EnergyReport embedded_energy(const ClusterGeometry& geo, const ModelParams& model,
                             const SectorState& state);

/// Hellmann-Feynman dE/dJ2 of the embedded energy at the given state.
double embedded_dE_dJ2(const ClusterGeometry& geo, const SectorState& state);

enum class FdScheme { forward, central };

/// Mean-field-embedded energy per spin of the circuit state, with exact
/// adjoint gradients. Pure function of the parameters; safe to evaluate
/// concurrently from different threads (each call uses its own state buffer).
class EnergyObjective {
  public:
    EnergyObjective(ClusterGeometry geo, ModelParams model, CircuitSpec spec);

    const ClusterGeometry& geometry() const { return geo_; }
    const ModelParams& model() const { return model_; }
    const CircuitSpec& circuit() const { return spec_; }
    int n_params() const { return spec_.n_params; }

    SectorState prepare(const ParamVector& params) const;
    EnergyReport report(const SectorState& state) const;
    EnergyReport report(const ParamVector& params) const { return report(prepare(params)); }
    double energy(const ParamVector& params) const { return report(params).e_total; }

    /// Exact dE/dtheta via one forward pass, one application of the frozen
    /// effective Hamiltonian, and one reverse sweep. Tie classes accumulate
    /// the sum of their slots' gradients.
    ParamVector gradient_adjoint(const ParamVector& params) const;

    /// Energy and adjoint gradient from one shared forward pass.
    double value_and_gradient_adjoint(const ParamVector& params, ParamVector& grad) const;

    ParamVector gradient_fd(const ParamVector& params, FdScheme scheme, double delta) const;

    /// Hellmann-Feynman dE/dJ2 at the given state.
    double dE_dJ2(const SectorState& state) const;
    double dE_dJ2(const ParamVector& params) const { return dE_dJ2(prepare(params)); }

  private:
    ClusterGeometry geo_;
    ModelParams model_;
    CircuitSpec spec_;
    std::shared_ptr<const SectorBasis> basis_;
};

}  // namespace qhmft
