#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "qhmft/objective.hpp"

namespace qhmft {

enum class GradientMode { adjoint, fd_forward, fd_central };

struct OptimizerConfig {
    int max_iterations = 2000;
    double gradient_tolerance = 1e-7;  // infinity norm
    double energy_tolerance = 1e-12;   // relative objective decrease
    int history_size = 10;
    double wolfe_c1 = 1e-4;  // sufficient decrease
    double wolfe_c2 = 0.9;   // curvature
    GradientMode gradient_mode = GradientMode::adjoint;
    double fd_delta = 1e-10;  // used by the fd modes
};

enum class OptStatus { converged, max_iterations, line_search_failure, non_finite };

struct TraceRecord {
    int iteration = 0;
    double energy = 0.0;
    double grad_norm = 0.0;  // infinity norm
    OrderParameters order;
};

struct OptimizationTrace {
    std::vector<TraceRecord> records;
    OptStatus status = OptStatus::max_iterations;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    int n_evaluations = 0;
};

/// Objective callback: returns f(x), fills *grad when non-null.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// Optional per-iteration hook to enrich trace records (order parameters).
using IterationObserver = std::function<void(TraceRecord&, const Eigen::VectorXd&)>;

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    OptimizationTrace trace;
};

/// Unconstrained limited-memory quasi-Newton minimization with a strong
/// Wolfe line search. Accepted energies are non-increasing. A failed line
/// search restarts once along steepest descent before giving up.
MinimizeResult minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                        const OptimizerConfig& config, const IterationObserver& observer = {});

/// n_starts runs from uniform (-pi, pi] initial points on deterministic
/// per-start RNG streams; returns the best result, all traces retained.
struct MultiStartResult {
    MinimizeResult best;
    std::vector<MinimizeResult> all;
};
MultiStartResult multi_start(const ObjectiveFn& f, int dim, int n_starts, std::uint64_t seed,
                             const OptimizerConfig& config, int threads = 1,
                             const IterationObserver& observer = {});

/// Chained minimization over a family of objectives (e.g. a J2 grid): each
/// point starts from the previous optimum; a failed point keeps the chain
/// going from the last good optimum.
std::vector<MinimizeResult> warm_start_chain(
    const std::function<ObjectiveFn(std::size_t)>& family, std::size_t n_points,
    const Eigen::VectorXd& x_init, const OptimizerConfig& config,
    const IterationObserver& observer = {});

/// CSV export: iteration, energy, grad_norm, m_neel, m_caf, d_x, d_y.
void write_trace_csv(std::ostream& os, const OptimizationTrace& trace);

const char* to_string(OptStatus status);

}  // namespace qhmft
