// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <limits>
#include <vector>

#include "evmsinr/waveform.hpp"

namespace evmsinr {

enum class EvmMode { DataAided, DecisionDirected };

struct EvmEstimate {
    double rms_percent = 0.0;
    EvmMode mode = EvmMode::DataAided;
    int carriers = 0;
    int frames = 0;
};

// EVM% = 100 * sqrt(sum |r - ref|^2 / sum |ref|^2).
// Data-aided: ref is the transmitted symbol. Decision-directed: ref is the
// nearest constellation point to each received symbol.
inline EvmEstimate rms_evm(const CxMatrix& received, const CxMatrix& reference,
                           const Constellation& c, EvmMode mode) {
    if (received.carriers != reference.carriers || received.frames != reference.frames)
        throw std::invalid_argument("rms_evm: received/reference dimensions differ");
    double err = 0.0, ref_pow = 0.0;
    for (size_t i = 0; i < received.size(); ++i) {
        const cxd r = received.data[i];
        const cxd ref = mode == EvmMode::DataAided ? reference.data[i]
                                                   : c.points[c.nearest_index(r)];
        err += std::norm(r - ref);
        ref_pow += std::norm(ref);
    }
    if (ref_pow <= 0.0) throw degenerate_input("rms_evm: zero reference power");
    return {100.0 * std::sqrt(err / ref_pow), mode, received.carriers, received.frames};
}

inline EvmEstimate rms_evm(const CxMatrix& received, const SymbolGrid& reference,
                           const Constellation& c, EvmMode mode) {
    return rms_evm(received, reference.symbols, c, mode);
}

inline double ber(const CxMatrix& received, const std::vector<uint8_t>& reference_bits,
                  const Constellation& c) {
    if (reference_bits.size() != received.size() * c.bits_per_symbol)
        throw std::invalid_argument("ber: reference bit count inconsistent with grid");
    const auto decided = demodulate_hard(received, c);
    size_t errors = 0;
    for (size_t i = 0; i < decided.size(); ++i) errors += decided[i] != reference_bits[i];
    return static_cast<double>(errors) / static_cast<double>(decided.size());
}

// Signalled SINR: per carrier take the sample variance of each component
// across frames, average the variances over carriers, then form
// wanted / (sum of interference + noise_var). Components are the separately
// observable simulation-side signals; noise_var is the configured sigma^2.
inline double sinr_signalled_db(const CxMatrix& wanted,
                                const std::vector<CxMatrix>& interferers,
                                double noise_var) {
    auto mean_variance = [](const CxMatrix& m) {
        double acc = 0.0;
        for (int c = 0; c < m.carriers; ++c) acc += row_sample_variance(m, c);
        return acc / static_cast<double>(m.carriers);
    };
    double denom = noise_var;
    for (const auto& i : interferers) {
        if (i.carriers != wanted.carriers)
            throw std::invalid_argument("sinr_signalled: carrier count mismatch");
        denom += mean_variance(i);
    }
    if (denom <= 0.0) throw degenerate_input("sinr_signalled: zero interference and noise");
    return lin_to_db(mean_variance(wanted) / denom);
}

// Gradient of the log-linear EVM(%) = A / sqrt(SINR) law.
struct GradientModel {
    double a_value = 100.0;
    int qam_order = 64;
    int n_interferers = 1;
};

struct SinrPrediction {
    double sinr_db = 0.0;
    bool finite = true; // false when EVM was zero (prediction unbounded)
};

// SINR_P(dB) = 20 log10(A / EVM%).
inline SinrPrediction sinr_predict(const EvmEstimate& evm, const GradientModel& model) {
    if (evm.rms_percent <= 0.0)
        return {std::numeric_limits<double>::infinity(), false};
    return {20.0 * std::log10(model.a_value / evm.rms_percent), true};
}

} // namespace evmsinr
