// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <cstdint>

#include "evmsinr/common.hpp"

namespace evmsinr {

// Splittable counter-style random stream (splitmix64 core).
//
// Every work unit (grid point, trial, block, user role, ...) derives its own
// child stream with sub(); children never touch the parent state, so a
// parallel schedule draws exactly the same values as a sequential one.
class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(uint64_t seed) : state_(mix(seed ^ kSalt)) {}

    // Child stream addressed by one or more indices. Does not advance *this.
    RngStream sub(uint64_t a) const {
        RngStream r;
        r.state_ = mix(state_ ^ mix(a + kSalt));
        return r;
    }
    RngStream sub(uint64_t a, uint64_t b) const { return sub(a).sub(b); }
    RngStream sub(uint64_t a, uint64_t b, uint64_t c) const { return sub(a).sub(b).sub(c); }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Circular complex Gaussian with E|z|^2 = variance (Box-Muller,
    // exactly two uniforms per sample).
    cxd cgaussian(double variance = 1.0) {
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-variance * std::log(u1));
        return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
    }

    // Real N(0, 1).
    double normal() { return cgaussian(2.0).real(); }

  private:
    static constexpr uint64_t kSalt = 0x9e3779b97f4a7c15ULL;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    uint64_t state_ = 0;
};

} // namespace evmsinr
