#include "qhmft/sector.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace qhmft {

namespace {

void check_site(int s, int n) {
    if (s < 0 || s >= n) {
        throw std::out_of_range("site id " + std::to_string(s) + " out of range [0, " +
                                std::to_string(n) + ")");
    }
}

}  // namespace

SectorBasis::SectorBasis(int n_qubits, int hamming_weight) : n_(n_qubits), k_(hamming_weight) {
    if (n_ < 1 || n_ > 36) throw std::invalid_argument("SectorBasis: N must be in [1, 36]");
    if (k_ < 0 || k_ > n_) throw std::invalid_argument("SectorBasis: invalid Hamming weight");

    binom_.assign(static_cast<std::size_t>(n_ + 1),
                  std::vector<std::uint64_t>(static_cast<std::size_t>(n_ + 1), 0));
    for (int i = 0; i <= n_; ++i) {
        binom_[i][0] = 1;
        for (int j = 1; j <= i; ++j) {
            binom_[i][j] = binom_[i - 1][j - 1] + (j <= i - 1 ? binom_[i - 1][j] : 0);
        }
    }

    states_.reserve(binom_[n_][k_]);
    if (k_ == 0) {
        states_.push_back(0);
    } else {
        // lowest weight-k string, then Gosper's hack for the successor
        std::uint64_t v = (std::uint64_t{1} << k_) - 1;
        const std::uint64_t limit = std::uint64_t{1} << n_;
        while (v < limit) {
            states_.push_back(v);
            std::uint64_t c = v & (~v + 1);
            std::uint64_t r = v + c;
            v = (((r ^ v) >> 2) / c) | r;
        }
    }

    // pair tables for all site pairs (skipped for large N where two-qubit
    // simulation is out of scope anyway)
    if (n_ <= 20) {
        tables_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            for (int j = i + 1; j < n_; ++j) {
                PairTable& t = tables_[static_cast<std::size_t>(i) * n_ + j];
                const std::uint64_t bi = std::uint64_t{1} << i;
                const std::uint64_t bj = std::uint64_t{1} << j;
                for (std::size_t idx = 0; idx < states_.size(); ++idx) {
                    std::uint64_t s = states_[idx];
                    if (!(s & bi) && (s & bj)) {
                        std::size_t partner = index_of(s ^ bi ^ bj);
                        t.pairs.emplace_back(static_cast<std::uint32_t>(idx),
                                             static_cast<std::uint32_t>(partner));
                    }
                }
            }
        }
    }
}

std::size_t SectorBasis::index_of(std::uint64_t bits) const {
    // combinatorial rank among weight-k strings in increasing integer order
    std::uint64_t rank = 0;
    int remaining = k_;
    for (int b = n_ - 1; b >= 0 && remaining > 0; --b) {
        if (bits & (std::uint64_t{1} << b)) {
            // strings identical above bit b but with 0 here come first
            if (remaining <= b) rank += binom_[b][remaining];
            --remaining;
        }
    }
    return static_cast<std::size_t>(rank);
}

const SectorBasis::PairTable& SectorBasis::pair_table(int i, int j) const {
    check_site(i, n_);
    check_site(j, n_);
    if (i == j) throw std::invalid_argument("pair_table: i == j");
    if (tables_.empty()) throw std::logic_error("pair tables not built for N > 20");
    int lo = std::min(i, j), hi = std::max(i, j);
    return tables_[static_cast<std::size_t>(lo) * n_ + hi];
}

SectorState init_neel(const ClusterGeometry& geo) {
    const int n = geo.n_sites;
    auto basis = std::make_shared<SectorBasis>(n, n / 2);
    std::uint64_t bits = 0;
    for (const auto& s : geo.sites) {
        if ((s.x + s.y) % 2 == 1) bits |= std::uint64_t{1} << s.id;
    }
    SectorState state{basis, StateVector::Zero(static_cast<Eigen::Index>(basis->dim()))};
    state.amplitudes[static_cast<Eigen::Index>(basis->index_of(bits))] = 1.0;
    return state;
}

void apply_xy(SectorState& state, int i, int j, double theta) {
    const auto& basis = *state.basis;
    check_site(i, basis.n_qubits());
    check_site(j, basis.n_qubits());
    // table is stored for (lo, hi); swapping the qubit roles flips sin's sign
    const double c = std::cos(theta / 2);
    const double s = (i < j ? 1.0 : -1.0) * std::sin(theta / 2);
    for (const auto& [a01, a10] : basis.pair_table(i, j).pairs) {
        Complex v01 = state.amplitudes[a01];
        Complex v10 = state.amplitudes[a10];
        state.amplitudes[a01] = c * v01 + s * v10;
        state.amplitudes[a10] = -s * v01 + c * v10;
    }
}

void apply_zz(SectorState& state, int i, int j, double theta) {
    const auto& basis = *state.basis;
    check_site(i, basis.n_qubits());
    check_site(j, basis.n_qubits());
    if (i == j) throw std::invalid_argument("apply_zz: i == j");
    const Complex even = std::exp(Complex(0, -theta));
    const Complex odd = std::exp(Complex(0, theta));
    const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
        int pop = std::popcount(basis.state(idx) & mask);
        state.amplitudes[static_cast<Eigen::Index>(idx)] *= (pop == 1) ? odd : even;
    }
}

void apply_z(SectorState& state, int j, double theta) {
    const auto& basis = *state.basis;
    check_site(j, basis.n_qubits());
    const Complex up = std::exp(Complex(0, -theta));
    const Complex down = std::exp(Complex(0, theta));
    const std::uint64_t bj = std::uint64_t{1} << j;
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
        state.amplitudes[static_cast<Eigen::Index>(idx)] *= (basis.state(idx) & bj) ? down : up;
    }
}

double expect_sz(const SectorState& state, int j) {
    const auto& basis = *state.basis;
    check_site(j, basis.n_qubits());
    const std::uint64_t bj = std::uint64_t{1} << j;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
        double p = std::norm(state.amplitudes[static_cast<Eigen::Index>(idx)]);
        acc += (basis.state(idx) & bj) ? -0.5 * p : 0.5 * p;
    }
    return acc;
}

double expect_heisenberg(const SectorState& state, int i, int j) {
    const auto& basis = *state.basis;
    check_site(i, basis.n_qubits());
    check_site(j, basis.n_qubits());
    if (i == j) throw std::invalid_argument("expect_heisenberg: i == j");
    const std::uint64_t bi = std::uint64_t{1} << i;
    const std::uint64_t bj = std::uint64_t{1} << j;
    double zz = 0.0;
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
        double p = std::norm(state.amplitudes[static_cast<Eigen::Index>(idx)]);
        double si = (basis.state(idx) & bi) ? -0.5 : 0.5;
        double sj = (basis.state(idx) & bj) ? -0.5 : 0.5;
        zz += p * si * sj;
    }
    // SxSx + SySy flips the 01/10 pair with amplitude 1/2
    double flip = 0.0;
    for (const auto& [a01, a10] : basis.pair_table(i, j).pairs) {
        flip += (std::conj(state.amplitudes[a01]) * state.amplitudes[a10]).real();
    }
    return zz + flip;
}

StateVector full_space_reference(const SectorState& state) {
    const auto& basis = *state.basis;
    if (basis.n_qubits() > 16) {
        throw std::invalid_argument("full_space_reference: N > 16");
    }
    StateVector full = StateVector::Zero(Eigen::Index{1} << basis.n_qubits());
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
        full[static_cast<Eigen::Index>(basis.state(idx))] =
            state.amplitudes[static_cast<Eigen::Index>(idx)];
    }
    return full;
}

void dump_amplitudes(const SectorState& state, std::ostream& os) {
    const auto& basis = *state.basis;
    os.write("QHSV", 4);
    std::uint32_t n = static_cast<std::uint32_t>(basis.n_qubits());
    std::uint32_t k = static_cast<std::uint32_t>(basis.hamming_weight());
    std::uint64_t len = basis.dim();
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&k), sizeof k);
    os.write(reinterpret_cast<const char*>(&len), sizeof len);
    for (std::uint64_t idx = 0; idx < len; ++idx) {
        double re = state.amplitudes[static_cast<Eigen::Index>(idx)].real();
        double im = state.amplitudes[static_cast<Eigen::Index>(idx)].imag();
        os.write(reinterpret_cast<const char*>(&re), sizeof re);
        os.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

SectorState load_amplitudes(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string_view(magic, 4) != "QHSV") {
        throw std::runtime_error("load_amplitudes: bad magic");
    }
    std::uint32_t n = 0, k = 0;
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&k), sizeof k);
    is.read(reinterpret_cast<char*>(&len), sizeof len);
    auto basis = std::make_shared<SectorBasis>(static_cast<int>(n), static_cast<int>(k));
    if (basis->dim() != len) throw std::runtime_error("load_amplitudes: length mismatch");
    SectorState state{basis, StateVector::Zero(static_cast<Eigen::Index>(len))};
    for (std::uint64_t idx = 0; idx < len; ++idx) {
        double re = 0, im = 0;
        is.read(reinterpret_cast<char*>(&re), sizeof re);
        is.read(reinterpret_cast<char*>(&im), sizeof im);
        state.amplitudes[static_cast<Eigen::Index>(idx)] = Complex(re, im);
    }
    if (!is) throw std::runtime_error("load_amplitudes: truncated stream");
    return state;
}

}  // namespace qhmft
