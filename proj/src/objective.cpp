#include "qhmft/objective.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qhmft {

namespace {

Eigen::VectorXd site_mean_fields(const ClusterGeometry& geo, const SectorState& state) {
    Eigen::VectorXd m(geo.n_sites);
    for (int j = 0; j < geo.n_sites; ++j) m[j] = expect_sz(state, j);
    return m;
}

}  // namespace

std::complex<double> magnetization(const ClusterGeometry& geo, const SectorState& state,
                                   double kx, double ky) {
    std::complex<double> acc = 0.0;
    for (const SiteIndex& s : geo.sites) {
        double phase = -(s.x * kx + s.y * ky);
        acc += std::polar(expect_sz(state, s.id), phase);
    }
    return acc / static_cast<double>(geo.n_sites);
}

double dimer(const ClusterGeometry& geo, const SectorState& state, int axis) {
    if (axis != 0 && axis != 1) throw std::invalid_argument("dimer: axis must be 0 (x) or 1 (y)");
    double acc = 0.0;
    for (const Bond& b : geo.intra_bonds) {
        if (b.range != BondRange::nn) continue;
        const SiteIndex& lo = geo.site(b.i);
        const SiteIndex& hi = geo.site(b.j);
        bool along_x = (hi.y == lo.y);
        if ((axis == 0) != along_x) continue;
        int r = (axis == 0) ? lo.x : lo.y;
        double sign = (r % 2 == 0) ? 1.0 : -1.0;
        acc += sign * expect_heisenberg(state, b.i, b.j);
    }
    return acc / geo.L;
}

OrderParameters compute_order_parameters(const ClusterGeometry& geo, const SectorState& state) {
    constexpr double pi = std::numbers::pi;
    OrderParameters op;
    op.m_neel = std::abs(magnetization(geo, state, pi, pi));
    op.m_caf_x = std::abs(magnetization(geo, state, pi, 0.0));
    op.m_caf_y = std::abs(magnetization(geo, state, 0.0, pi));
    op.d_x = dimer(geo, state, 0);
    op.d_y = dimer(geo, state, 1);
    return op;
}

EnergyObjective::EnergyObjective(ClusterGeometry geo, ModelParams model, CircuitSpec spec)
    : geo_(std::move(geo)), model_(model), spec_(std::move(spec)) {
    if (model_.j1 <= 0) throw std::invalid_argument("EnergyObjective: J1 must be positive");
    if (spec_.L != geo_.L) throw std::invalid_argument("EnergyObjective: circuit/geometry L mismatch");
    basis_ = std::make_shared<SectorBasis>(geo_.n_sites, geo_.n_sites / 2);
}

SectorState EnergyObjective::prepare(const ParamVector& params) const {
    std::uint64_t bits = 0;
    for (const auto& s : geo_.sites) {
        if ((s.x + s.y) % 2 == 1) bits |= std::uint64_t{1} << s.id;
    }
    SectorState state{basis_, StateVector::Zero(static_cast<Eigen::Index>(basis_->dim()))};
    state.amplitudes[static_cast<Eigen::Index>(basis_->index_of(bits))] = 1.0;
    apply_circuit(spec_, params, state);
    return state;
}

EnergyReport embedded_energy(const ClusterGeometry& geo, const ModelParams& model,
                             const SectorState& state) {
    EnergyReport rep;
    rep.mean_fields = site_mean_fields(geo, state);
    for (const Bond& b : geo.intra_bonds) {
        rep.e_intra += model.coupling(b.range) * expect_heisenberg(state, b.i, b.j);
    }
    for (const Bond& b : geo.boundary_bonds) {
        rep.e_mf += b.weight * model.coupling(b.range) * rep.mean_fields[b.i] * rep.mean_fields[b.j];
    }
    rep.e_intra /= geo.n_sites;
    rep.e_mf /= geo.n_sites;
    rep.e_total = rep.e_intra + rep.e_mf;
    return rep;
}

double embedded_dE_dJ2(const ClusterGeometry& geo, const SectorState& state) {
    Eigen::VectorXd m = site_mean_fields(geo, state);
    double acc = 0.0;
    for (const Bond& b : geo.intra_bonds) {
        if (b.range == BondRange::nnn) acc += expect_heisenberg(state, b.i, b.j);
    }
    for (const Bond& b : geo.boundary_bonds) {
        if (b.range == BondRange::nnn) acc += b.weight * m[b.i] * m[b.j];
    }
    return acc / geo.n_sites;
}

EnergyReport EnergyObjective::report(const SectorState& state) const {
    return embedded_energy(geo_, model_, state);
}

ParamVector EnergyObjective::gradient_adjoint(const ParamVector& params) const {
    ParamVector grad;
    value_and_gradient_adjoint(params, grad);
    return grad;
}

double EnergyObjective::value_and_gradient_adjoint(const ParamVector& params,
                                                   ParamVector& out_grad) const {
    SectorState phi = prepare(params);
    const double value = embedded_energy(geo_, model_, phi).e_total;
    Eigen::VectorXd fields = site_mean_fields(geo_, phi);
    SectorHamiltonian heff(basis_, geo_, model_, effective_boundary_field(geo_, model_, fields));

    SectorState bra{basis_, StateVector(phi.amplitudes.size())};
    heff.apply(phi.amplitudes, bra.amplitudes);

    const double scale = 1.0 / geo_.n_sites;
    ParamVector grad = ParamVector::Zero(spec_.n_params);

    // reverse sweep: peel one gate at a time off both the ket and the bra,
    // then take the overlap with the gate generator
    for (auto it = spec_.slots.rbegin(); it != spec_.slots.rend(); ++it) {
        const GateSlot& g = *it;
        double theta = params[g.param_slot];
        double contrib = 0.0;
        switch (g.family) {
            case GateFamily::xy: {
                apply_xy(phi, g.site_a, g.site_b, -theta);
                apply_xy(bra, g.site_a, g.site_b, -theta);
                double sgn = g.site_a < g.site_b ? 1.0 : -1.0;
                const auto& table = basis_->pair_table(g.site_a, g.site_b);
                for (const auto& [a01, a10] : table.pairs) {
                    contrib += sgn * (std::conj(bra.amplitudes[a01]) * phi.amplitudes[a10] -
                                      std::conj(bra.amplitudes[a10]) * phi.amplitudes[a01])
                                         .real();
                }
                break;
            }
            case GateFamily::zz: {
                apply_zz(phi, g.site_a, g.site_b, -theta);
                apply_zz(bra, g.site_a, g.site_b, -theta);
                const std::uint64_t mask = (std::uint64_t{1} << g.site_a) |
                                           (std::uint64_t{1} << g.site_b);
                for (std::size_t idx = 0; idx < basis_->dim(); ++idx) {
                    double parity = std::popcount(basis_->state(idx) & mask) == 1 ? -1.0 : 1.0;
                    auto i = static_cast<Eigen::Index>(idx);
                    // generator -i Z_a Z_b
                    contrib += 2.0 * parity *
                               (std::conj(bra.amplitudes[i]) * phi.amplitudes[i]).imag();
                }
                break;
            }
            case GateFamily::z: {
                apply_z(phi, g.site_a, -theta);
                apply_z(bra, g.site_a, -theta);
                const std::uint64_t bj = std::uint64_t{1} << g.site_a;
                for (std::size_t idx = 0; idx < basis_->dim(); ++idx) {
                    double zval = (basis_->state(idx) & bj) ? -1.0 : 1.0;
                    auto i = static_cast<Eigen::Index>(idx);
                    contrib += 2.0 * zval *
                               (std::conj(bra.amplitudes[i]) * phi.amplitudes[i]).imag();
                }
                break;
            }
        }
        grad[g.param_slot] += scale * contrib;
    }
    out_grad = std::move(grad);
    return value;
}

ParamVector EnergyObjective::gradient_fd(const ParamVector& params, FdScheme scheme,
                                         double delta) const {
    if (delta <= 0) throw std::invalid_argument("gradient_fd: delta must be positive");
    ParamVector grad(spec_.n_params);
    ParamVector x = params;
    const double e0 = (scheme == FdScheme::forward) ? energy(params) : 0.0;
    for (int k = 0; k < spec_.n_params; ++k) {
        double saved = x[k];
        if (scheme == FdScheme::forward) {
            x[k] = saved + delta;
            grad[k] = (energy(x) - e0) / delta;
        } else {
            x[k] = saved + delta;
            double ep = energy(x);
            x[k] = saved - delta;
            double em = energy(x);
            grad[k] = (ep - em) / (2.0 * delta);
        }
        x[k] = saved;
    }
    return grad;
}

double EnergyObjective::dE_dJ2(const SectorState& state) const {
    return embedded_dE_dJ2(geo_, state);
}

}  // namespace qhmft
