#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qhmft/lattice.hpp"
#include "qhmft/sector.hpp"

namespace qhmft {

enum class GateFamily { xy, zz, z };

/// One parameterized gate in application order.
struct GateSlot {
    GateFamily family = GateFamily::xy;
    int site_a = 0;
    int site_b = -1;  // -1 for single-qubit gates
    int param_slot = 0;
    int layer_index = 0;
    int macro_layer = 0;
};

/// The macro-layer ansatz: per macro-layer, four columnar XY sublayers, four
/// columnar ZZ sublayers (two each for L=2, where the translated sublayers
/// are empty), then one layer of Z rotations on every site. Every NN bond
/// receives exactly one XY and one ZZ gate per macro-layer.
struct CircuitSpec {
    int L = 0;
    int m = 0;
    bool tied = false;
    std::vector<GateSlot> slots;
    int n_params = 0;  // number of distinct parameter slots (tie classes when tied)
    int depth = 0;     // 5m for L=2, 9m otherwise
};

using ParamVector = Eigen::VectorXd;

/// Tied mode (L=2 only) collapses the four XY slots and the four ZZ slots of
/// each macro-layer to one shared parameter each; Z slots stay independent.
CircuitSpec build_circuit(int L, int m, bool tied = false);

void apply_circuit(const CircuitSpec& spec, const ParamVector& params, SectorState& state);
void apply_inverse(const CircuitSpec& spec, const ParamVector& params, SectorState& state);

std::string circuit_to_json(const CircuitSpec& spec);

}  // namespace qhmft
