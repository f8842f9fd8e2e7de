#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bose {

// Deterministic random layer. mt19937_64 is bit-exact across platforms, but
// the std:: distributions are not, so uniforms and gaussians are produced by
// hand. Every consumer derives its stream from an explicit 64-bit seed; sweep
// points and parallel workers use seed + index so the schedule cannot change
// the output bytes.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (polar-free, deterministic).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Index drawn from the (unnormalised) weight table by CDF inversion.
    template <class Weights>
    int pick(const Weights& w) {
        double total = 0.0;
        for (const double x : w) total += x;
        const double u = uniform() * total;
        double acc = 0.0;
        const int n = static_cast<int>(w.size());
        for (int k = 0; k + 1 < n; ++k) {
            acc += w[k];
            if (u < acc) return k;
        }
        return n - 1;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace bose
