#include "rso2stat/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rso2stat {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t x) {
    std::uint64_t s = x;
    return splitmix64(s);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed) : RngStream(mix(master_seed ^ kGolden), 0) {}

RngStream::RngStream(std::uint64_t key, int) : key_(key) {
    std::uint64_t s = key;
    for (auto& word : state_) word = splitmix64(s);
}

RngStream RngStream::child(std::string_view label, std::uint64_t index) const {
    std::uint64_t k = mix(key_ ^ fnv1a(label));
    k = mix(k ^ (index * kGolden + 1));
    return RngStream(k, 0);
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++ step
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    // 52-bit mantissa shifted to the open interval: never 0.0, never 1.0
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t RngStream::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RngStream::below: bound must be > 0");
    // rejection sampling over the largest multiple of bound
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

double RngStream::normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::uint32_t> RngStream::permutation(std::size_t n) {
    std::vector<std::uint32_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
    shuffle(p);
    return p;
}

}  // namespace rso2stat
