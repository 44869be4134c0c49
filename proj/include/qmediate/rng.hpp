#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace qmediate {

/// Named sub-streams derived from one master seed. Every consumer of
/// randomness names its own slot; streams are never shared between stages,
/// so adding a consumer cannot perturb existing draws.
enum class RngStream : std::uint64_t {
    ParamInit = 1,
    Shuffle = 2,
    TestSplit = 3,
    ValidationSplit = 4,
    Bootstrap = 5,
    Synthetic = 6,
    ArmBase = 16, // arm t uses ArmBase + t as the stream id
};

std::uint64_t splitmix64_next(std::uint64_t& state);

/// xoshiro256** generator, seeded through splitmix64. Deterministic across
/// platforms; all distributions below are hand-rolled so outputs do not
/// depend on the standard library implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound);

    /// Box-Muller normal draw; consumes two uniforms per call.
    double normal(double mean = 0.0, double sd = 1.0);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::array<std::uint64_t, 4> state_{};
};

/// Child seed for (master, stream, index). Index distinguishes replicates
/// (bootstrap draws, arms) inside one stream.
std::uint64_t derive_seed(std::uint64_t master, RngStream stream, std::uint64_t index = 0);

Rng make_stream(std::uint64_t master, RngStream stream, std::uint64_t index = 0);

} // namespace qmediate
