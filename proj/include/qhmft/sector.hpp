#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "qhmft/lattice.hpp"

namespace qhmft {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

/// Computational basis of the fixed-magnetization (fixed Hamming weight)
/// sector of N qubits. Bitstrings are enumerated in increasing integer value;
/// bit j of the integer is site id j, bit value 1 means |1> = |down>.
///
/// Pair tables for two-qubit gates are precomputed for every site pair at
/// construction; the basis is immutable afterwards and safe to share.
class SectorBasis {
  public:
    SectorBasis(int n_qubits, int hamming_weight);

    int n_qubits() const { return n_; }
    int hamming_weight() const { return k_; }
    std::size_t dim() const { return states_.size(); }
    std::uint64_t state(std::size_t index) const { return states_[index]; }

    /// Dense index of a weight-k bitstring (combinatorial rank).
    std::size_t index_of(std::uint64_t bits) const;

    /// Index pairs (a, b) with bit_i(a)=0, bit_j(a)=1 and b = a ^ mask(i,j),
    /// for the unordered pair; orientation handled by the gate kernels.
    struct PairTable {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (idx01, idx10) for i<j
    };
    const PairTable& pair_table(int i, int j) const;

  private:
    int n_;
    int k_;
    std::vector<std::uint64_t> states_;
    std::vector<PairTable> tables_;  // indexed by min*n + max
    std::vector<std::vector<std::uint64_t>> binom_;
};

/// Cluster wave function in a fixed-weight sector.
struct SectorState {
    std::shared_ptr<const SectorBasis> basis;
    StateVector amplitudes;

    double norm() const { return amplitudes.norm(); }
};

/// Checkerboard product state |b_j = (x_j + y_j) mod 2> in the Sz=0 sector.
SectorState init_neel(const ClusterGeometry& geo);

// Gate kernels, in place. Conventions follow the real-XY / ZZ / Z rotations:
//   XY(i,j,t):  a01' =  cos(t/2) a01 + sin(t/2) a10
//               a10' = -sin(t/2) a01 + cos(t/2) a10      (|00>,|11> untouched)
//   ZZ(i,j,t):  phase exp(-i t) on equal bits, exp(+i t) on opposite bits
//   Z(j,t):     phase exp(-i t) on bit 0, exp(+i t) on bit 1
void apply_xy(SectorState& state, int i, int j, double theta);
void apply_zz(SectorState& state, int i, int j, double theta);
void apply_z(SectorState& state, int j, double theta);

double expect_sz(const SectorState& state, int j);
/// <S_i . S_j> (full Heisenberg exchange).
double expect_heisenberg(const SectorState& state, int i, int j);

/// Embedding of the sector vector into the full 2^N space (N <= 16 only;
/// validation oracle).
StateVector full_space_reference(const SectorState& state);

/// Binary amplitude dump: "QHSV" magic, uint32 N, uint32 k, uint64 length,
/// then length interleaved (re, im) little-endian 64-bit floats.
void dump_amplitudes(const SectorState& state, std::ostream& os);
SectorState load_amplitudes(std::istream& is);

}  // namespace qhmft
