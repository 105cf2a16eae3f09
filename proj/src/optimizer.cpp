#include "qhmft/optimizer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "qhmft/rng.hpp"

namespace qhmft {

namespace {

using Eigen::VectorXd;

struct LineSearchResult {
    double step = 0.0;
    double value = 0.0;
    VectorXd x;
    VectorXd grad;
    bool ok = false;
};

// Strong Wolfe line search (bracket + zoom, cubic/bisection interpolation).
LineSearchResult line_search(const ObjectiveFn& f, const VectorXd& x0, double f0,
                             const VectorXd& g0, const VectorXd& d, const OptimizerConfig& cfg,
                             int& n_evals) {
    LineSearchResult res;
    const double dg0 = g0.dot(d);
    if (dg0 >= 0) return res;  // not a descent direction

    auto eval = [&](double a, double& fa, VectorXd& xa, VectorXd& ga) {
        xa = x0 + a * d;
        fa = f(xa, &ga);
        ++n_evals;
    };

    const double c1 = cfg.wolfe_c1, c2 = cfg.wolfe_c2;
    double a_prev = 0.0, f_prev = f0, dg_prev = dg0;
    double a = 1.0;
    VectorXd xa, ga;
    double fa;

    double lo = 0.0, hi = 0.0, f_lo = f0, dg_lo = dg0;
    bool bracketed = false;

    for (int iter = 0; iter < 25 && !bracketed; ++iter) {
        eval(a, fa, xa, ga);
        if (!std::isfinite(fa)) {
            a *= 0.3;
            continue;
        }
        double dga = ga.dot(d);
        if (fa > f0 + c1 * a * dg0 || (iter > 0 && fa >= f_prev)) {
            lo = a_prev; f_lo = f_prev; dg_lo = dg_prev;
            hi = a;
            bracketed = true;
            break;
        }
        if (std::abs(dga) <= -c2 * dg0) {
            res = {a, fa, std::move(xa), std::move(ga), true};
            return res;
        }
        if (dga >= 0) {
            lo = a; f_lo = fa; dg_lo = dga;
            hi = a_prev;
            bracketed = true;
            break;
        }
        a_prev = a; f_prev = fa; dg_prev = dga;
        a *= 2.0;
    }
    if (!bracketed) return res;

    for (int iter = 0; iter < 40; ++iter) {
        // bisection with a mild cubic-style bias toward lo
        double at = 0.5 * (lo + hi);
        eval(at, fa, xa, ga);
        double dga = ga.dot(d);
        if (!std::isfinite(fa) || fa > f0 + c1 * at * dg0 || fa >= f_lo) {
            hi = at;
        } else {
            if (std::abs(dga) <= -c2 * dg0) {
                res = {at, fa, std::move(xa), std::move(ga), true};
                return res;
            }
            if (dga * (hi - lo) >= 0) hi = lo;
            lo = at; f_lo = fa; dg_lo = dga;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    // accept the best sufficient-decrease point even if curvature was not met
    if (f_lo < f0 && lo > 0) {
        eval(lo, fa, xa, ga);
        res = {lo, fa, std::move(xa), std::move(ga), true};
    }
    return res;
}

}  // namespace

MinimizeResult minimize(const ObjectiveFn& f, const VectorXd& x0, const OptimizerConfig& config,
                        const IterationObserver& observer) {
    if (!x0.allFinite()) throw std::invalid_argument("minimize: non-finite starting point");
    const auto t_start = std::chrono::steady_clock::now();

    MinimizeResult result;
    OptimizationTrace& trace = result.trace;

    VectorXd x = x0;
    VectorXd g(x.size());
    double fx = f(x, &g);
    ++trace.n_evaluations;
    if (!std::isfinite(fx)) {
        trace.status = OptStatus::non_finite;
        result.x = x;
        result.value = fx;
        return result;
    }

    std::deque<std::pair<VectorXd, VectorXd>> history;  // (s, y)
    bool sd_restart_used = false;

    auto record = [&](int iteration) {
        TraceRecord rec;
        rec.iteration = iteration;
        rec.energy = fx;
        rec.grad_norm = g.lpNorm<Eigen::Infinity>();
        if (observer) observer(rec, x);
        trace.records.push_back(std::move(rec));
    };
    record(0);

    trace.status = OptStatus::max_iterations;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance) {
            trace.status = OptStatus::converged;
            break;
        }

        // two-loop recursion
        VectorXd d = -g;
        std::vector<double> alpha(history.size());
        for (std::size_t i = history.size(); i-- > 0;) {
            const auto& [s, y] = history[i];
            double rho = 1.0 / y.dot(s);
            alpha[i] = rho * s.dot(d);
            d -= alpha[i] * y;
        }
        if (!history.empty()) {
            const auto& [s, y] = history.back();
            d *= s.dot(y) / y.dot(y);
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const auto& [s, y] = history[i];
            double rho = 1.0 / y.dot(s);
            double beta = rho * y.dot(d);
            d += (alpha[i] - beta) * s;
        }

        LineSearchResult ls = line_search(f, x, fx, g, d, config, trace.n_evaluations);
        if (!ls.ok && !sd_restart_used) {
            // retry once along steepest descent
            sd_restart_used = true;
            history.clear();
            d = -g;
            ls = line_search(f, x, fx, g, d, config, trace.n_evaluations);
        }
        if (!ls.ok) {
            trace.status = OptStatus::line_search_failure;
            break;
        }
        if (!std::isfinite(ls.value)) {
            trace.status = OptStatus::non_finite;
            break;
        }

        VectorXd s = ls.x - x;
        VectorXd y = ls.grad - g;
        double prev = fx;
        x = std::move(ls.x);
        g = std::move(ls.grad);
        fx = ls.value;
        if (y.dot(s) > 1e-12 * y.norm() * s.norm()) {
            history.emplace_back(std::move(s), std::move(y));
            if (static_cast<int>(history.size()) > config.history_size) history.pop_front();
        }
        record(iter);

        if (g.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance) {
            trace.status = OptStatus::converged;
            break;
        }
        double denom = std::max(1.0, std::abs(prev));
        if (prev - fx >= 0 && (prev - fx) / denom < config.energy_tolerance) {
            trace.status = OptStatus::converged;
            break;
        }
    }

    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    result.x = std::move(x);
    result.value = fx;
    return result;
}

MultiStartResult multi_start(const ObjectiveFn& f, int dim, int n_starts, std::uint64_t seed,
                             const OptimizerConfig& config, int threads,
                             const IterationObserver& observer) {
    if (n_starts < 1) throw std::invalid_argument("multi_start: n_starts must be >= 1");
    MultiStartResult out;
    out.all.resize(static_cast<std::size_t>(n_starts));

    auto run_one = [&](int idx) {
        auto rng = make_stream(seed, "multistart", static_cast<std::uint64_t>(idx));
        std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
        VectorXd x0(dim);
        for (int k = 0; k < dim; ++k) x0[k] = dist(rng);
        MinimizeResult r = minimize(f, x0, config, observer);
        r.trace.seed = derive_stream_seed(seed, "multistart", static_cast<std::uint64_t>(idx));
        out.all[static_cast<std::size_t>(idx)] = std::move(r);
    };

    threads = std::max(1, std::min(threads, n_starts));
    if (threads == 1) {
        for (int i = 0; i < n_starts; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n_starts; i = next.fetch_add(1)) run_one(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < out.all.size(); ++i) {
        if (out.all[i].value < out.all[best].value) best = i;
    }
    out.best = out.all[best];
    return out;
}

std::vector<MinimizeResult> warm_start_chain(
    const std::function<ObjectiveFn(std::size_t)>& family, std::size_t n_points,
    const VectorXd& x_init, const OptimizerConfig& config, const IterationObserver& observer) {
    std::vector<MinimizeResult> results;
    results.reserve(n_points);
    VectorXd x = x_init;
    for (std::size_t p = 0; p < n_points; ++p) {
        MinimizeResult r = minimize(family(p), x, config, observer);
        if (r.x.allFinite() && std::isfinite(r.value)) {
            x = r.x;  // warm start for the next point
        }
        results.push_back(std::move(r));
    }
    return results;
}

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
    os << "iteration,energy,grad_norm,m_neel,m_caf,d_x,d_y\n";
    for (const TraceRecord& r : trace.records) {
        os << r.iteration << ',' << r.energy << ',' << r.grad_norm << ',' << r.order.m_neel << ','
           << r.order.m_caf() << ',' << r.order.d_x << ',' << r.order.d_y << '\n';
    }
}

const char* to_string(OptStatus status) {
    switch (status) {
        case OptStatus::converged: return "converged";
        case OptStatus::max_iterations: return "max_iterations";
        case OptStatus::line_search_failure: return "line_search_failure";
        case OptStatus::non_finite: return "non_finite";
    }
    return "unknown";
}

}  // namespace qhmft
