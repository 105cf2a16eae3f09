#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qhmft/hamiltonian.hpp"
#include "qhmft/objective.hpp"

namespace qhmft {

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    int iterations = 0;
    double residual = 0.0;  // ||Hv - Ev||
    bool converged = false;
};

/// Dense path; intended for small sectors (builds the full matrix).
EigenPair lowest_eigenpair_dense(const SectorHamiltonian& H);

/// Lanczos with full reorthogonalization; warm-startable.
EigenPair lowest_eigenpair_lanczos(const SectorHamiltonian& H,
                                   const Eigen::VectorXd& guess = Eigen::VectorXd(),
                                   double tol = 1e-12, int max_iter = 600);

/// Dense below dim 512, Lanczos above.
EigenPair lowest_eigenpair(const SectorHamiltonian& H,
                           const Eigen::VectorXd& guess = Eigen::VectorXd());

enum class FieldPattern { neel, caf, zero, random };

struct ScfConfig {
    double field_tolerance = 1e-10;
    int max_outer_iterations = 500;
    double damping = 0.7;  // m <- (1-g) m + g m_new
    FieldPattern initial_field_pattern = FieldPattern::neel;
    std::uint64_t seed = 0;
};

Eigen::VectorXd initial_fields(const ClusterGeometry& geo, FieldPattern pattern,
                               std::uint64_t seed = 0);

struct HmftResult {
    double energy = 0.0;  // per spin, assembled from the embedded energy
    Eigen::VectorXd fields;
    OrderParameters order;
    double dE_dJ2 = 0.0;
    SectorState state;
    int outer_iterations = 0;
    double field_residual = 0.0;
    bool converged = false;
};

/// Fixed-point iteration of exact diagonalization with boundary mean fields
/// (the classical HMFT reference). An explicit initial field vector
/// overrides the config's pattern.
HmftResult self_consistent_hmft(const ClusterGeometry& geo, const ModelParams& model,
                                const ScfConfig& config,
                                const std::optional<Eigen::VectorXd>& init = std::nullopt);

/// Runs the SCF from several seeds and keeps the lowest embedded energy.
/// First-order regions have competing fixed points, so one seed is not enough.
HmftResult best_hmft(const ClusterGeometry& geo, const ModelParams& model,
                     const ScfConfig& config,
                     const std::vector<Eigen::VectorXd>& extra_seeds = {});

struct HmftPoint {
    double j2 = 0.0;
    HmftResult result;
};

/// Warm-started SCF chain over a J2 grid, both directions, lowest energy per
/// point kept.
std::vector<HmftPoint> hmft_sweep(const ClusterGeometry& geo, const std::vector<double>& j2_grid,
                                  const ScfConfig& config, double j1 = 1.0);

/// Reference table with the same CSV schema as the sweep records.
void write_oracle_csv(std::ostream& os, const std::vector<HmftPoint>& points);

}  // namespace qhmft
