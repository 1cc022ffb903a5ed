#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace rso2stat {

/// Counter-free splittable random stream.
///
/// A stream is identified by a 64-bit key derived from (master_seed, path),
/// where the path is built by chained child() calls such as
/// rng.child("perm", g).child("impute", m). Identical (seed, path) pairs
/// produce bit-identical draw sequences, and distinct paths give streams
/// that are independent for statistical purposes. This is what makes every
/// randomized result in the library reproducible regardless of scheduling:
/// workers never share stream state, they derive their own.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed);

    /// Derive the sub-stream for (label, index). Does not consume draws
    /// from *this; the child is a pure function of (key, label, index).
    [[nodiscard]] RngStream child(std::string_view label, std::uint64_t index = 0) const;

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform01();

    /// Uniform on the open interval (lo, hi).
    double uniform(double lo, double hi);

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller (two uniforms per call).
    double normal();

    /// Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<std::uint32_t> permutation(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    [[nodiscard]] std::uint64_t key() const { return key_; }

private:
    RngStream(std::uint64_t key, int);  // from raw key

    std::uint64_t key_;
    std::array<std::uint64_t, 4> state_;  // xoshiro256++
};

}  // namespace rso2stat
