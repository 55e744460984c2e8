// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <cmath>
#include <vector>

#include "evmsinr/rng.hpp"

namespace evmsinr {

// Complex channel gains indexed [time_block][carrier][tx][rx], unit average
// path gain per entry.
struct ChannelResponse {
    int blocks = 0;
    int carriers = 0;
    int ntx = 0;
    int nrx = 0;
    double carrier_spacing_hz = 0.0;
    double block_period_s = 0.0;
    std::vector<cxd> gains;

    ChannelResponse() = default;
    ChannelResponse(int n_blocks, int n_carriers, int n_tx, int n_rx)
        : blocks(n_blocks), carriers(n_carriers), ntx(n_tx), nrx(n_rx),
          gains(static_cast<size_t>(n_blocks) * n_carriers * n_tx * n_rx) {}

    size_t index(int t, int c, int tx, int rx) const {
        return ((static_cast<size_t>(t) * carriers + c) * ntx + tx) * nrx + rx;
    }
    cxd& at(int t, int c, int tx, int rx) { return gains[index(t, c, tx, rx)]; }
    const cxd& at(int t, int c, int tx, int rx) const { return gains[index(t, c, tx, rx)]; }
};

struct MobilityProfile {
    double doppler_hz = 8.89;
    double block_period_s = 0.03656;

    void validate() const {
        if (doppler_hz < 0.0) throw std::invalid_argument("MobilityProfile: doppler_hz < 0");
        if (block_period_s <= 0.0) throw std::invalid_argument("MobilityProfile: block_period_s <= 0");
        // alias-free second-order statistics: sampling above twice the Doppler
        if (doppler_hz > 0.0 && 1.0 / block_period_s <= 2.0 * doppler_hz)
            throw std::invalid_argument("MobilityProfile: sampling rate must exceed 2x doppler");
    }
};

// Clarke lag-1 autocorrelation, J0(2 pi fD T).
inline double clarke_rho(const MobilityProfile& m) {
    m.validate();
    return std::cyl_bessel_j(0.0, 2.0 * 3.141592653589793238462643383279 * m.doppler_hz *
                                      m.block_period_s);
}

struct DelayProfile {
    std::vector<double> tap_delays_s;
    std::vector<double> tap_powers; // linear, sums to 1

    void validate() const {
        if (tap_delays_s.empty() || tap_delays_s.size() != tap_powers.size())
            throw std::invalid_argument("DelayProfile: empty or mismatched taps");
        double sum = 0.0, prev = -1.0;
        for (size_t k = 0; k < tap_delays_s.size(); ++k) {
            if (tap_powers[k] < 0.0) throw std::invalid_argument("DelayProfile: negative power");
            if (tap_delays_s[k] < 0.0 || tap_delays_s[k] <= prev)
                throw std::invalid_argument("DelayProfile: delays must be nonnegative, increasing");
            prev = tap_delays_s[k];
            sum += tap_powers[k];
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("DelayProfile: powers must sum to 1");
    }

    double rms_delay_spread_s() const {
        double m1 = 0.0, m2 = 0.0;
        for (size_t k = 0; k < tap_delays_s.size(); ++k) {
            m1 += tap_powers[k] * tap_delays_s[k];
            m2 += tap_powers[k] * tap_delays_s[k] * tap_delays_s[k];
        }
        return std::sqrt(m2 - m1 * m1);
    }

    // |R(df)| of the frequency autocorrelation implied by the taps.
    double freq_correlation(double df_hz) const {
        cxd acc{0.0, 0.0};
        for (size_t k = 0; k < tap_delays_s.size(); ++k)
            acc += tap_powers[k] *
                   std::polar(1.0, -2.0 * 3.141592653589793 * df_hz * tap_delays_s[k]);
        return std::abs(acc);
    }

    // Uniformly spaced taps with exponentially decaying power, the decay
    // solved by bisection so the RMS delay spread hits the target.
    static DelayProfile exponential(int n_taps, double spacing_s, double rms_target_s) {
        if (n_taps < 1 || spacing_s <= 0.0 || rms_target_s <= 0.0)
            throw std::invalid_argument("DelayProfile::exponential: bad parameters");
        DelayProfile p;
        p.tap_delays_s.resize(n_taps);
        p.tap_powers.resize(n_taps);
        for (int k = 0; k < n_taps; ++k) p.tap_delays_s[k] = k * spacing_s;
        if (n_taps == 1) {
            p.tap_powers[0] = 1.0;
            return p;
        }
        auto fill = [&](double tau0) {
            double sum = 0.0;
            for (int k = 0; k < n_taps; ++k) {
                p.tap_powers[k] = std::exp(-p.tap_delays_s[k] / tau0);
                sum += p.tap_powers[k];
            }
            for (auto& w : p.tap_powers) w /= sum;
        };
        // max attainable spread (flat powers) bounds the target
        fill(1e9);
        if (p.rms_delay_spread_s() <= rms_target_s)
            throw std::invalid_argument(
                "DelayProfile::exponential: rms target unreachable with this tap span");
        double lo = spacing_s * 1e-6, hi = spacing_s * 1e6;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            fill(mid);
            (p.rms_delay_spread_s() < rms_target_s ? lo : hi) = mid;
        }
        fill(0.5 * (lo + hi));
        // exact unit sum after normalization
        return p;
    }
};

// Single-block, single-carrier i.i.d. Rayleigh matrix.
inline ChannelResponse flat_rayleigh(int n_tx, int n_rx, RngStream& rng) {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("flat_rayleigh: n_tx, n_rx >= 1");
    ChannelResponse h(1, 1, n_tx, n_rx);
    for (auto& g : h.gains) g = rng.cgaussian(1.0);
    return h;
}

// Tapped-delay-line taps for one link set: taps[k][tx][rx], entry variance
// tap_powers[k]. The draw order matches flat_rayleigh, so a single zero-delay
// tap reproduces it exactly from the same stream. Evolves block to block by
// per-coefficient AR-1.
struct TdlTaps {
    DelayProfile profile;
    int ntx = 0;
    int nrx = 0;
    std::vector<cxd> taps; // [tap][tx][rx]

    size_t tap_index(size_t k, int tx, int rx) const {
        return (k * ntx + tx) * nrx + rx;
    }

    static TdlTaps draw(const DelayProfile& profile, int n_tx, int n_rx, RngStream& rng) {
        profile.validate();
        TdlTaps t;
        t.profile = profile;
        t.ntx = n_tx;
        t.nrx = n_rx;
        t.taps.resize(profile.tap_delays_s.size() * static_cast<size_t>(n_tx) * n_rx);
        size_t i = 0;
        for (size_t k = 0; k < profile.tap_delays_s.size(); ++k)
            for (int x = 0; x < n_tx; ++x)
                for (int r = 0; r < n_rx; ++r)
                    t.taps[i++] = rng.cgaussian(profile.tap_powers[k]);
        return t;
    }

    // h <- rho h + sqrt(1 - rho^2) w, marginal tap distribution preserved.
    void ar1_step(double rho, RngStream& rng) {
        const double inn = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        size_t i = 0;
        for (size_t k = 0; k < profile.tap_delays_s.size(); ++k)
            for (int x = 0; x < ntx; ++x)
                for (int r = 0; r < nrx; ++r, ++i)
                    taps[i] = rho * taps[i] + inn * rng.cgaussian(profile.tap_powers[k]);
    }

    // H(f_c) = sum_k a_k exp(-j 2 pi f_c tau_k); out[(c*ntx + tx)*nrx + rx].
    void response(const std::vector<double>& freqs_hz, std::vector<cxd>& out) const {
        const size_t n_taps = profile.tap_delays_s.size();
        const size_t per_c = static_cast<size_t>(ntx) * nrx;
        out.assign(freqs_hz.size() * per_c, cxd{0.0, 0.0});
        for (size_t c = 0; c < freqs_hz.size(); ++c) {
            for (size_t k = 0; k < n_taps; ++k) {
                const cxd ph =
                    std::polar(1.0, -2.0 * 3.141592653589793 * freqs_hz[c] *
                                        profile.tap_delays_s[k]);
                const cxd* tap = &taps[k * per_c];
                cxd* dst = &out[c * per_c];
                for (size_t j = 0; j < per_c; ++j) dst[j] += ph * tap[j];
            }
        }
    }
};

// Per-carrier frequency response over one block.
inline ChannelResponse tdl_response(const DelayProfile& profile, double band_hz,
                                    double carrier_spacing_hz, int n_tx, int n_rx,
                                    RngStream& rng) {
    const double ratio = band_hz / carrier_spacing_hz;
    const int n_car = static_cast<int>(std::round(ratio));
    if (n_car < 1 || std::abs(ratio - n_car) > 1e-6)
        throw std::invalid_argument("tdl_response: band must be an integer number of carriers");
    auto taps = TdlTaps::draw(profile, n_tx, n_rx, rng);
    std::vector<double> freqs(n_car);
    for (int c = 0; c < n_car; ++c) freqs[c] = c * carrier_spacing_hz;
    std::vector<cxd> resp;
    taps.response(freqs, resp);
    ChannelResponse h(1, n_car, n_tx, n_rx);
    h.carrier_spacing_hz = carrier_spacing_hz;
    for (int c = 0; c < n_car; ++c)
        for (int x = 0; x < n_tx; ++x)
            for (int r = 0; r < n_rx; ++r)
                h.at(0, c, x, r) = resp[(static_cast<size_t>(c) * n_tx + x) * n_rx + r];
    return h;
}

// Gauss-Markov evolution of every coefficient of the initial block:
// h[t+1] = rho h[t] + sqrt(1 - rho^2) w[t], rho from the Clarke model.
// Innovations are unit-variance, matching the unit average path gain the
// channel generators produce.
inline ChannelResponse evolve(const ChannelResponse& initial, const MobilityProfile& mobility,
                              int n_blocks, RngStream& rng) {
    if (n_blocks < 1) throw std::invalid_argument("evolve: n_blocks >= 1");
    const double rho = clarke_rho(mobility);
    const double inn = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    ChannelResponse out(n_blocks, initial.carriers, initial.ntx, initial.nrx);
    out.carrier_spacing_hz = initial.carrier_spacing_hz;
    out.block_period_s = mobility.block_period_s;
    const size_t per_block = out.gains.size() / n_blocks;
    for (size_t i = 0; i < per_block; ++i) out.gains[i] = initial.gains[i];
    for (int t = 1; t < n_blocks; ++t)
        for (size_t i = 0; i < per_block; ++i) {
            const cxd prev = out.gains[(t - 1) * per_block + i];
            out.gains[t * per_block + i] =
                rho * prev + (inn > 0.0 ? inn * rng.cgaussian(1.0) : cxd{0.0, 0.0});
        }
    return out;
}

} // namespace evmsinr
