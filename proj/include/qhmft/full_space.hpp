#pragma once

// Full 2^N-space reference path. Slow by construction; used by the built-in
// validation suite and the tests to cross-check the sector-restricted kernels
// on N <= 16.

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>

#include "qhmft/hamiltonian.hpp"
#include "qhmft/lattice.hpp"
#include "qhmft/sector.hpp"

namespace qhmft::full_space {

inline void apply_xy(StateVector& psi, int i, int j, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    const std::uint64_t bi = std::uint64_t{1} << i;
    const std::uint64_t bj = std::uint64_t{1} << j;
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(psi.size()); ++a) {
        if (!(a & bi) && (a & bj)) {  // a is the |0_i 1_j> member of the pair
            std::uint64_t b = a ^ bi ^ bj;
            Complex v01 = psi[static_cast<Eigen::Index>(a)];
            Complex v10 = psi[static_cast<Eigen::Index>(b)];
            psi[static_cast<Eigen::Index>(a)] = c * v01 + s * v10;
            psi[static_cast<Eigen::Index>(b)] = -s * v01 + c * v10;
        }
    }
}

inline void apply_zz(StateVector& psi, int i, int j, double theta) {
    const Complex even = std::exp(Complex(0, -theta));
    const Complex odd = std::exp(Complex(0, theta));
    const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(psi.size()); ++a) {
        psi[static_cast<Eigen::Index>(a)] *= (std::popcount(a & mask) == 1) ? odd : even;
    }
}

inline void apply_z(StateVector& psi, int j, double theta) {
    const Complex up = std::exp(Complex(0, -theta));
    const Complex down = std::exp(Complex(0, theta));
    const std::uint64_t bj = std::uint64_t{1} << j;
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(psi.size()); ++a) {
        psi[static_cast<Eigen::Index>(a)] *= (a & bj) ? down : up;
    }
}

inline double expect_sz(const StateVector& psi, int j) {
    const std::uint64_t bj = std::uint64_t{1} << j;
    double acc = 0.0;
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(psi.size()); ++a) {
        double p = std::norm(psi[static_cast<Eigen::Index>(a)]);
        acc += (a & bj) ? -0.5 * p : 0.5 * p;
    }
    return acc;
}

inline double expect_heisenberg(const StateVector& psi, int i, int j) {
    const std::uint64_t bi = std::uint64_t{1} << i;
    const std::uint64_t bj = std::uint64_t{1} << j;
    double acc = 0.0;
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(psi.size()); ++a) {
        double si = (a & bi) ? -0.5 : 0.5;
        double sj = (a & bj) ? -0.5 : 0.5;
        acc += si * sj * std::norm(psi[static_cast<Eigen::Index>(a)]);
        if (!(a & bi) && (a & bj)) {
            std::uint64_t b = a ^ bi ^ bj;
            acc += 2.0 * 0.5 *
                   (std::conj(psi[static_cast<Eigen::Index>(a)]) * psi[static_cast<Eigen::Index>(b)])
                       .real();
        }
    }
    return acc;
}

/// Dense 2^N cluster Hamiltonian with per-site Sz field terms.
inline Eigen::MatrixXd dense_hamiltonian(const ClusterGeometry& geo, const ModelParams& model,
                                         const Eigen::VectorXd& site_field) {
    const Eigen::Index dim = Eigen::Index{1} << geo.n_sites;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dim); ++a) {
        double diag = 0.0;
        for (const Bond& b : geo.intra_bonds) {
            double si = (a >> b.i) & 1 ? -0.5 : 0.5;
            double sj = (a >> b.j) & 1 ? -0.5 : 0.5;
            diag += model.coupling(b.range) * si * sj;
            bool bit_i = (a >> b.i) & 1;
            bool bit_j = (a >> b.j) & 1;
            if (bit_i != bit_j) {
                std::uint64_t flipped = a ^ (std::uint64_t{1} << b.i) ^ (std::uint64_t{1} << b.j);
                H(static_cast<Eigen::Index>(flipped), static_cast<Eigen::Index>(a)) +=
                    0.5 * model.coupling(b.range);
            }
        }
        for (int s = 0; s < geo.n_sites; ++s) {
            diag += site_field[s] * (((a >> s) & 1) ? -0.5 : 0.5);
        }
        H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += diag;
    }
    return H;
}

/// Total 2Sz (number of up minus down spins) of a basis state; used to pick
/// the Sz=0 block out of a full-space spectrum.
inline int twice_total_sz(std::uint64_t bits, int n) { return n - 2 * std::popcount(bits); }

}  // namespace qhmft::full_space
