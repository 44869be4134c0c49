#include "qmediate/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmediate {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
        word = splitmix64_next(sm);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("uniform_below: bound must be positive");
    }
    // Lemire's multiply-shift with rejection of the biased residue range.
    while (true) {
        const std::uint64_t x = next_u64();
        const __uint128_t product = static_cast<__uint128_t>(x) * bound;
        const std::uint64_t low = static_cast<std::uint64_t>(product);
        if (low >= bound || low >= static_cast<std::uint64_t>(-bound) % bound) {
            return static_cast<std::uint64_t>(product >> 64);
        }
    }
}

double Rng::normal(double mean, double sd) {
    // Box-Muller; u1 shifted away from zero so the log stays finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, RngStream stream, std::uint64_t index) {
    std::uint64_t state = master;
    std::uint64_t mixed = splitmix64_next(state);
    state = mixed ^ (static_cast<std::uint64_t>(stream) * 0xBF58476D1CE4E5B9ULL);
    mixed = splitmix64_next(state);
    state = mixed ^ (index * 0x94D049BB133111EBULL);
    return splitmix64_next(state);
}

Rng make_stream(std::uint64_t master, RngStream stream, std::uint64_t index) {
    return Rng(derive_seed(master, stream, index));
}

} // namespace qmediate
