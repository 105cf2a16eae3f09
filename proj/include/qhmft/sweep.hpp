#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhmft/optimizer.hpp"

namespace qhmft {

enum class SweepDirection { up, down, both };

struct SweepConfig {
    double j2_min = 0.0;
    double j2_max = 1.0;
    double step = 0.01;
    SweepDirection directions = SweepDirection::both;
    int extreme_restarts = 10;
    /// Iteration cap for the scouting restarts at the extremes (0 = same as
    /// the main optimizer budget). The winning start is refined with the full
    /// budget when the chain visits the extreme grid point.
    int restart_max_iterations = 0;
    std::uint64_t seed = 0;
    int L = 2;
    int m = 2;
    bool tied = false;
    double j1 = 1.0;
    int threads = 1;
    OptimizerConfig optimizer;

    /// Optional resume hook: a stored record for (direction, grid index)
    /// short-circuits the optimization at that point.
    std::function<std::optional<struct SweepRecord>(const std::string&, std::size_t)> resume;

    std::vector<double> grid() const;
};

/// One phase-diagram point.
struct SweepRecord {
    double j2 = 0.0;
    double energy = 0.0;
    double dE_dJ2 = 0.0;       // Hellmann-Feynman
    double dE_dJ2_grid = 0.0;  // finite difference along the chain
    double m_neel = 0.0;
    double m_caf_x = 0.0;
    double m_caf_y = 0.0;
    double d_x = 0.0;
    double d_y = 0.0;
    int iterations = 0;
    std::string status;
    std::string direction;
    std::uint64_t seed = 0;
    Eigen::VectorXd params;  // optimized circuit parameters (checkpoint payload)

    double m_caf() const { return std::max(m_caf_x, m_caf_y); }
};

enum class TransitionKind { first_order, continuous };

struct Transition {
    double location = 0.0;
    TransitionKind kind = TransitionKind::continuous;
    std::string signal;              // which observable triggered the detection
    double hysteresis_window = 0.0;  // first-order only; |up - down| location gap
};

struct TransitionReport {
    std::vector<Transition> transitions;
};

enum class Phase { neel, caf, plaquette_vbs, undetermined };

/// Warm-start chains over the J2 grid in the requested directions, seeded by
/// multi-start optimizations at the extremes. Records are emitted in grid
/// order, one block per direction.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

/// Per-J2 lowest-energy record across directions.
std::vector<SweepRecord> merge_best(const std::vector<SweepRecord>& records);

/// Jump/vanishing analysis of the merged record series (>= 3 grid points).
TransitionReport detect_transitions(const std::vector<SweepRecord>& records);

Phase classify_phase(const SweepRecord& record);
const char* to_string(Phase phase);

struct VariancePoint {
    int L = 0;
    double j2 = 0.0;
    double variance = 0.0;  // sample variance of the first-slot gradient
    int n_samples = 0;
};

/// Var[dE/dtheta^1_1] over random circuit initializations, E the cluster
/// energy (N times the energy per spin). The 2x2 circuit is taken in its
/// shared-parameter form, matching how that cluster size is used everywhere
/// else; larger clusters keep independent parameters.
std::vector<VariancePoint> variance_study(int L, int m, const std::vector<double>& j2_list,
                                          int n_samples, std::uint64_t seed, int threads = 1);

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_transitions_json(std::ostream& os, const TransitionReport& report);
void write_variance_csv(std::ostream& os, const std::vector<VariancePoint>& points);
std::string record_to_json(const SweepRecord& record);
SweepRecord record_from_json(const std::string& text);
std::string sweep_metadata_json(const SweepConfig& config);

/// ObjectiveFn adapter for an EnergyObjective under the configured gradient
/// mode (adjoint by default; forward fd with delta 1e-10 reproduces the
/// reference optimization setup).
ObjectiveFn make_objective_fn(std::shared_ptr<const EnergyObjective> objective,
                              const OptimizerConfig& config);

}  // namespace qhmft
