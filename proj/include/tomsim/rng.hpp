#ifndef TOMSIM_RNG_HPP
#define TOMSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace tomsim {

// Deterministic random stream. The engine is mt19937_64 (its raw output is
// pinned by the standard), but all distributions are implemented here because
// the standard library's are not bit-portable across implementations.
//
// Consumers that must not disturb each other draw from separate streams derived
// from one master seed, so toggling one noise knob never shifts another
// consumer's draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Stream `stream_id` of a master seed; distinct ids give unrelated streams.
    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id);

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer on [0, n), unbiased via rejection. n must be positive.
    std::uint64_t below(std::uint64_t n);

    // Standard normal deviate, Box-Muller, second value cached.
    double gauss();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 step; used to decorrelate stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace tomsim

#endif
