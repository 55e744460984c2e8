// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evmsinr {

using cxd = std::complex<double>;

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Thrown when a requested operating point cannot be realized
/// (e.g. SINR target above the SNR with interferers present).
struct infeasible_spec : std::domain_error {
    using std::domain_error::domain_error;
};

/// Thrown by zero_forcing when the channel matrix is numerically rank
/// deficient (condition number above the documented threshold).
struct ill_conditioned_channel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an input is structurally valid but degenerate for the
/// requested computation (zero reference power, zero denominator).
struct degenerate_input : std::domain_error {
    using std::domain_error::domain_error;
};

// Dense carriers x frames complex matrix, row-major by carrier.
struct CxMatrix {
    int carriers = 0;
    int frames = 0;
    std::vector<cxd> data;

    CxMatrix() = default;
    CxMatrix(int n_carriers, int n_frames)
        : carriers(n_carriers), frames(n_frames),
          data(static_cast<size_t>(n_carriers) * n_frames) {}

    cxd& at(int c, int f) { return data[static_cast<size_t>(c) * frames + f]; }
    const cxd& at(int c, int f) const { return data[static_cast<size_t>(c) * frames + f]; }

    size_t size() const { return data.size(); }

    double mean_power() const {
        if (data.empty()) return 0.0;
        double acc = 0.0;
        for (const auto& v : data) acc += std::norm(v);
        return acc / static_cast<double>(data.size());
    }
};

// Unbiased sample variance of one carrier row across frames (mean removed).
inline double row_sample_variance(const CxMatrix& m, int carrier) {
    const int f = m.frames;
    if (f < 2) throw std::invalid_argument("row_sample_variance: needs >= 2 frames");
    cxd mean{0.0, 0.0};
    for (int j = 0; j < f; ++j) mean += m.at(carrier, j);
    mean /= static_cast<double>(f);
    double acc = 0.0;
    for (int j = 0; j < f; ++j) acc += std::norm(m.at(carrier, j) - mean);
    return acc / static_cast<double>(f - 1);
}

} // namespace evmsinr
