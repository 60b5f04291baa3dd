#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace distbrush {

// Seeded generator with platform-independent draws. The standard
// distributions are implementation-defined, so the derived draws are done here
// on top of the raw 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, bound) via rejection to avoid modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= limit) {
                return r % bound;
            }
        }
    }

    // Box-Muller, one draw per call.
    double normal(double mean = 0.0, double sigma = 1.0) {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // First `count` entries of a Fisher-Yates shuffle of 0..n-1.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            idx[i] = i;
        }
        for (std::size_t i = 0; i < count && i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(std::min(count, n));
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace distbrush
