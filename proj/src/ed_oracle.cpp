#include "qhmft/ed_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qhmft/rng.hpp"

namespace qhmft {

namespace {

SectorState state_from_vector(std::shared_ptr<const SectorBasis> basis,
                              const Eigen::VectorXd& v) {
    SectorState s{std::move(basis), v.cast<Complex>()};
    return s;
}

Eigen::VectorXd fields_of(const ClusterGeometry& geo, const SectorState& state) {
    Eigen::VectorXd m(geo.n_sites);
    for (int j = 0; j < geo.n_sites; ++j) m[j] = expect_sz(state, j);
    return m;
}

}  // namespace

EigenPair lowest_eigenpair_dense(const SectorHamiltonian& H) {
    const Eigen::Index n = H.dim();
    Eigen::MatrixXd dense(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd col(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        H.apply(e, col);
        dense.col(j) = col;
        e[j] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    EigenPair pair;
    pair.value = solver.eigenvalues()[0];
    pair.vector = solver.eigenvectors().col(0);
    pair.residual = (dense * pair.vector - pair.value * pair.vector).norm();
    pair.converged = true;
    return pair;
}

EigenPair lowest_eigenpair_lanczos(const SectorHamiltonian& H, const Eigen::VectorXd& guess,
                                   double tol, int max_iter) {
    const Eigen::Index n = H.dim();
    max_iter = std::min<int>(max_iter, static_cast<int>(n));

    Eigen::VectorXd v;
    if (guess.size() == n && guess.norm() > 1e-12) {
        v = guess.normalized();
    } else {
        auto rng = make_stream(12345, "lanczos-start");
        std::normal_distribution<double> dist;
        v.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
        v.normalize();
    }

    Eigen::MatrixXd V(n, max_iter);
    std::vector<double> alpha, beta;
    Eigen::VectorXd w(n);
    V.col(0) = v;

    EigenPair pair;
    double prev_eval = std::numeric_limits<double>::infinity();
    int k = 0;
    for (; k < max_iter; ++k) {
        H.apply(V.col(k), w);
        double a = V.col(k).dot(w);
        alpha.push_back(a);
        w -= a * V.col(k);
        if (k > 0) w -= beta[static_cast<std::size_t>(k - 1)] * V.col(k - 1);
        // full reorthogonalization, twice
        auto Vk = V.leftCols(k + 1);
        w -= Vk * (Vk.transpose() * w);
        w -= Vk * (Vk.transpose() * w);
        double b = w.norm();

        bool invariant = b < 1e-13;
        bool check = invariant || k == max_iter - 1 || (k >= 8 && k % 4 == 0);
        if (check) {
            Eigen::Index dim = k + 1;
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
                T(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < dim) {
                    T(i, i + 1) = beta[static_cast<std::size_t>(i)];
                    T(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(T);
            double eval = solver.eigenvalues()[0];
            Eigen::VectorXd u = solver.eigenvectors().col(0);
            double resid_est = invariant ? 0.0 : std::abs(b * u[dim - 1]);
            if (invariant || resid_est <= tol ||
                (std::abs(eval - prev_eval) <= tol && resid_est <= std::sqrt(tol))) {
                pair.value = eval;
                pair.vector = V.leftCols(dim) * u;
                pair.vector.normalize();
                pair.iterations = k + 1;
                Eigen::VectorXd hv(n);
                H.apply(pair.vector, hv);
                pair.residual = (hv - eval * pair.vector).norm();
                pair.converged = pair.residual <= std::max(tol * 100, 1e-9);
                if (invariant || pair.residual <= std::max(tol, 1e-11)) return pair;
            }
            prev_eval = eval;
        }
        if (invariant) break;
        beta.push_back(b);
        if (k + 1 < max_iter) V.col(k + 1) = w / b;
    }
    if (pair.vector.size() == 0) {
        throw std::runtime_error("lanczos: no Ritz pair produced");
    }
    return pair;
}

EigenPair lowest_eigenpair(const SectorHamiltonian& H, const Eigen::VectorXd& guess) {
    if (H.dim() <= 512) return lowest_eigenpair_dense(H);
    return lowest_eigenpair_lanczos(H, guess);
}

Eigen::VectorXd initial_fields(const ClusterGeometry& geo, FieldPattern pattern,
                               std::uint64_t seed) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(geo.n_sites);
    switch (pattern) {
        case FieldPattern::neel:
            for (const auto& s : geo.sites) m[s.id] = ((s.x + s.y) % 2 == 0) ? 0.5 : -0.5;
            break;
        case FieldPattern::caf:
            for (const auto& s : geo.sites) m[s.id] = (s.x % 2 == 0) ? 0.5 : -0.5;
            break;
        case FieldPattern::zero: break;
        case FieldPattern::random: {
            auto rng = make_stream(seed, "scf-fields");
            std::uniform_real_distribution<double> dist(-0.5, 0.5);
            for (int j = 0; j < geo.n_sites; ++j) m[j] = dist(rng);
            break;
        }
    }
    return m;
}

HmftResult self_consistent_hmft(const ClusterGeometry& geo, const ModelParams& model,
                                const ScfConfig& config,
                                const std::optional<Eigen::VectorXd>& init) {
    if (config.field_tolerance <= 0) throw std::invalid_argument("ScfConfig: tolerance must be > 0");
    if (config.damping <= 0 || config.damping > 1) {
        throw std::invalid_argument("ScfConfig: damping must be in (0, 1]");
    }
    if (geo.n_sites > 36) throw std::invalid_argument("self_consistent_hmft: N > 36 unsupported");

    auto basis = std::make_shared<SectorBasis>(geo.n_sites, geo.n_sites / 2);
    Eigen::VectorXd m =
        init ? *init : initial_fields(geo, config.initial_field_pattern, config.seed);

    HmftResult result;
    Eigen::VectorXd warm;
    for (int outer = 1; outer <= config.max_outer_iterations; ++outer) {
        SectorHamiltonian H(basis, geo, model, effective_boundary_field(geo, model, m));
        EigenPair pair = lowest_eigenpair(H, warm);
        warm = pair.vector;

        SectorState state = state_from_vector(basis, pair.vector);
        Eigen::VectorXd m_new = fields_of(geo, state);
        double resid = (m_new - m).lpNorm<Eigen::Infinity>();

        result.outer_iterations = outer;
        result.field_residual = resid;
        if (resid <= config.field_tolerance) {
            result.converged = true;
            result.fields = m_new;
            result.state = std::move(state);
            break;
        }
        m = (1.0 - config.damping) * m + config.damping * m_new;
        if (outer == config.max_outer_iterations) {
            // no fixed point at this damping; report best effort
            result.fields = m_new;
            result.state = std::move(state);
        }
    }

    EnergyReport rep = embedded_energy(geo, model, result.state);
    result.energy = rep.e_total;
    result.order = compute_order_parameters(geo, result.state);
    result.dE_dJ2 = embedded_dE_dJ2(geo, result.state);
    return result;
}

HmftResult best_hmft(const ClusterGeometry& geo, const ModelParams& model,
                     const ScfConfig& config, const std::vector<Eigen::VectorXd>& extra_seeds) {
    std::vector<Eigen::VectorXd> seeds;
    for (FieldPattern p : {FieldPattern::neel, FieldPattern::caf, FieldPattern::zero}) {
        seeds.push_back(initial_fields(geo, p, config.seed));
    }
    seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

    HmftResult best;
    bool have = false;
    for (const auto& seed : seeds) {
        HmftResult r = self_consistent_hmft(geo, model, config, seed);
        bool better = !have || r.energy < best.energy ||
                      (r.converged && !best.converged && r.energy < best.energy + 1e-12);
        if (better) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

std::vector<HmftPoint> hmft_sweep(const ClusterGeometry& geo, const std::vector<double>& j2_grid,
                                  const ScfConfig& config, double j1) {
    std::vector<HmftPoint> points(j2_grid.size());

    auto run_chain = [&](bool ascending) {
        std::vector<std::size_t> order(j2_grid.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (!ascending) std::reverse(order.begin(), order.end());

        std::optional<Eigen::VectorXd> warm;
        for (std::size_t idx : order) {
            ModelParams model{j1, j2_grid[idx]};
            std::vector<Eigen::VectorXd> extra;
            if (warm) extra.push_back(*warm);
            HmftResult r = best_hmft(geo, model, config, extra);
            if (r.converged) warm = r.fields;
            HmftPoint& slot = points[idx];
            if (slot.result.state.amplitudes.size() == 0 || r.energy < slot.result.energy) {
                slot.j2 = j2_grid[idx];
                slot.result = std::move(r);
            }
        }
    };
    run_chain(true);
    run_chain(false);
    return points;
}

void write_oracle_csv(std::ostream& os, const std::vector<HmftPoint>& points) {
    os << "j2,energy,dE_dJ2,dE_dJ2_grid,m_neel,m_caf_x,m_caf_y,d_x,d_y,iterations,status,"
          "direction,seed\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        double grid_deriv = 0.0;
        if (points.size() >= 2) {
            std::size_t a = (i == 0) ? 0 : i - 1;
            std::size_t b = (i + 1 == points.size()) ? i : i + 1;
            grid_deriv = (points[b].result.energy - points[a].result.energy) /
                         (points[b].j2 - points[a].j2);
        }
        os << p.j2 << ',' << p.result.energy << ',' << p.result.dE_dJ2 << ',' << grid_deriv << ','
           << p.result.order.m_neel << ',' << p.result.order.m_caf_x << ','
           << p.result.order.m_caf_y << ',' << p.result.order.d_x << ',' << p.result.order.d_y
           << ',' << p.result.outer_iterations << ','
           << (p.result.converged ? "converged" : "max_iterations") << ",both,0\n";
    }
}

}  // namespace qhmft
