// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <vector>

#include "evmsinr/constellation.hpp"
#include "evmsinr/rng.hpp"

namespace evmsinr {

// Frequency-domain OFDM payload: one constellation symbol per carrier per
// frame, with the transmitted bit stream kept alongside for data-aided
// metrics. Bits map to symbols carrier-major (all frames of carrier 0 first),
// MSB first within a symbol.
struct SymbolGrid {
    CxMatrix symbols;
    std::vector<uint8_t> bits;

    int carriers() const { return symbols.carriers; }
    int frames() const { return symbols.frames; }
};

inline SymbolGrid modulate(const std::vector<uint8_t>& bits, const Constellation& c,
                           int carriers, int frames) {
    const size_t n_sym = static_cast<size_t>(carriers) * frames;
    if (bits.size() != n_sym * c.bits_per_symbol)
        throw std::invalid_argument("modulate: bit count " + std::to_string(bits.size()) +
                                    " != carriers*frames*log2(order) = " +
                                    std::to_string(n_sym * c.bits_per_symbol));
    SymbolGrid g;
    g.symbols = CxMatrix(carriers, frames);
    g.bits = bits;
    size_t pos = 0;
    for (size_t i = 0; i < n_sym; ++i) {
        uint32_t label = 0;
        for (int b = 0; b < c.bits_per_symbol; ++b) label = (label << 1) | bits[pos++];
        g.symbols.data[i] = c.point_for_label(label);
    }
    return g;
}

inline std::vector<uint8_t> demodulate_hard(const CxMatrix& received, const Constellation& c) {
    std::vector<uint8_t> bits;
    bits.reserve(received.size() * c.bits_per_symbol);
    for (const auto& r : received.data) {
        const uint32_t label = c.labels[c.nearest_index(r)];
        for (int b = c.bits_per_symbol - 1; b >= 0; --b)
            bits.push_back(static_cast<uint8_t>((label >> b) & 1u));
    }
    return bits;
}

inline SymbolGrid random_payload(const Constellation& c, int carriers, int frames,
                                 RngStream rng) {
    const size_t n_bits = static_cast<size_t>(carriers) * frames * c.bits_per_symbol;
    std::vector<uint8_t> bits(n_bits);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() >> 63);
    return modulate(bits, c, carriers, frames);
}

// Interference-plus-noise mixing at an exactly controlled operating point.
struct MixSpec {
    double sinr_target_db = 20.0;
    double snr_db = 20.0; // receiver noise alone, against unit signal power
    int n_interferers = 1;
};

struct MixResult {
    CxMatrix received;
    double noise_var = 0.0;        // sigma^2 actually applied
    double interferer_scale = 0.0; // common amplitude applied to each interferer
    double wanted_power = 0.0;     // realized sample powers
    double interference_power = 0.0;
    double noise_power = 0.0;

    double realized_sinr_db() const {
        return lin_to_db(wanted_power / (interference_power + noise_power));
    }
};

// received = wanted + g * sum(interferers) + CN(0, sigma^2), with sigma^2 from
// spec.snr_db and g solved so interference-plus-noise hits the SINR target in
// expectation. Each of the k interferers carries (total interference)/k.
inline MixResult mix(const SymbolGrid& wanted, const std::vector<SymbolGrid>& interferers,
                     const MixSpec& spec, RngStream& rng) {
    if (static_cast<int>(interferers.size()) != spec.n_interferers)
        throw std::invalid_argument("mix: interferer list length != spec.n_interferers");
    for (const auto& i : interferers)
        if (i.carriers() != wanted.carriers() || i.frames() != wanted.frames())
            throw std::invalid_argument("mix: interferer grid dimensions differ from wanted");

    const double sigma2 = db_to_lin(-spec.snr_db);
    const double target_in = db_to_lin(-spec.sinr_target_db); // interference + noise power
    double p_int = target_in - sigma2;
    if (p_int < 0.0) {
        if (p_int > -1e-12 * target_in)
            p_int = 0.0; // sinr == snr within rounding
        else if (spec.n_interferers >= 1)
            throw infeasible_spec("mix: sinr_target above snr is unreachable with interferers");
        else
            throw infeasible_spec("mix: zero interferers require sinr_target == snr");
    }
    if (spec.n_interferers == 0 && p_int > 1e-12 * target_in)
        throw infeasible_spec("mix: zero interferers require sinr_target == snr");

    const double g =
        spec.n_interferers > 0 ? std::sqrt(p_int / spec.n_interferers) : 0.0;

    MixResult out;
    out.noise_var = sigma2;
    out.interferer_scale = g;
    out.received = CxMatrix(wanted.carriers(), wanted.frames());

    double pw = 0.0, pi = 0.0, pn = 0.0;
    for (size_t i = 0; i < out.received.size(); ++i) {
        const cxd w = wanted.symbols.data[i];
        cxd in{0.0, 0.0};
        for (const auto& grid : interferers) in += g * grid.symbols.data[i];
        const cxd n = rng.cgaussian(sigma2);
        out.received.data[i] = w + in + n;
        pw += std::norm(w);
        pi += std::norm(in);
        pn += std::norm(n);
    }
    const double n_sym = static_cast<double>(out.received.size());
    out.wanted_power = pw / n_sym;
    out.interference_power = pi / n_sym;
    out.noise_power = pn / n_sym;
    return out;
}

} // namespace evmsinr
