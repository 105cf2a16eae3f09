#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qhmft {

// All randomness in the code base flows from one master seed. Independent
// streams are derived by hashing (seed, purpose, index), so parallel workers
// get reproducible streams regardless of scheduling order.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view purpose,
                                        std::uint64_t index = 0) {
    // FNV-1a over the purpose string, then splitmix64 finalization.
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : purpose) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (h ^ (index + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::string_view purpose,
                                   std::uint64_t index = 0) {
    return std::mt19937_64(derive_stream_seed(master, purpose, index));
}

}  // namespace qhmft
