#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fbl {

/// Counter-derived substream generator. The stream is a pure function of
/// (master, tag, idx1, idx2), so any parallel schedule that assigns work
/// items by index reproduces the serial draws exactly.
class Rng {
 public:
    Rng(std::uint64_t master, std::uint64_t tag, std::uint64_t idx1 = 0,
        std::uint64_t idx2 = 0) {
        // splitmix-style mixing of the coordinates into one 64-bit state
        state_ = mix(master + 0x9e3779b97f4a7c15ull * (tag + 1));
        state_ = mix(state_ ^ mix(idx1 + 0xbf58476d1ce4e5b9ull));
        state_ = mix(state_ ^ mix(idx2 + 0x94d049bb133111ebull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (explicit, for cross-platform
    /// reproducibility; std::normal_distribution is not pinned down).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(6.283185307179586477 * u2);
        has_spare_ = true;
        return r * std::cos(6.283185307179586477 * u2);
    }

    /// Circularly-symmetric complex normal with total variance var.
    std::complex<double> cnormal(double var) {
        double s = std::sqrt(0.5 * var);
        return {s * normal(), s * normal()};
    }

 private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags: one per independent purpose so streams never collide.
enum : std::uint64_t {
    kTagChannel = 1,
    kTagChannelError = 2,
    kTagSignal = 3,
    kTagMu = 4,
    kTagTrial = 5,
    kTagOracle = 6,
    kTagPlacement = 7,
};

}  // namespace fbl
