// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "evmsinr/channel.hpp"

namespace evmsinr {

using CMat = Eigen::MatrixXcd;

// Zero-forcing weights, one column per user, unit column norm.
struct PrecoderMatrix {
    int ntx = 0;
    int nusers = 0;
    std::vector<cxd> weights;          // [tx][user]
    std::vector<double> normalization; // per-user scale applied to reach unit norm

    cxd& at(int tx, int user) { return weights[static_cast<size_t>(tx) * nusers + user]; }
    const cxd& at(int tx, int user) const {
        return weights[static_cast<size_t>(tx) * nusers + user];
    }
};

inline constexpr double kZfConditionLimit = 1e8;

// W = H^H (H H^H)^-1 with unit-norm columns; H is users x antennas.
// The ZF direction is scale-free, so any positive scaling of H gives the
// same normalized W.
inline PrecoderMatrix zero_forcing(const CMat& h) {
    const int nu = static_cast<int>(h.rows());
    const int nt = static_cast<int>(h.cols());
    if (nt < nu) throw std::invalid_argument("zero_forcing: needs n_tx >= n_users");

    const CMat gram = h * h.adjoint(); // nu x nu, Hermitian PSD
    Eigen::SelfAdjointEigenSolver<CMat> eig(gram);
    const auto& ev = eig.eigenvalues();
    const double lmin = ev(0), lmax = ev(nu - 1);
    // cond(H) = sqrt(lmax/lmin); guard fires only on numerical rank loss
    if (lmin <= 0.0 || std::sqrt(lmax / lmin) > kZfConditionLimit)
        throw ill_conditioned_channel("zero_forcing: channel condition number above 1e8");

    CMat w = h.adjoint() * gram.inverse(); // nt x nu
    PrecoderMatrix out;
    out.ntx = nt;
    out.nusers = nu;
    out.weights.resize(static_cast<size_t>(nt) * nu);
    out.normalization.resize(nu);
    for (int u = 0; u < nu; ++u) {
        const double nrm = w.col(u).norm();
        out.normalization[u] = 1.0 / nrm;
        for (int t = 0; t < nt; ++t) out.at(t, u) = w(t, u) / nrm;
    }
    return out;
}

// Precoded gains at one carrier: gain(u, v) = row_u(H) . col_v(W).
// Column u is the wanted gain of user u; off-column entries are leakage.
inline CMat effective_gains(const CMat& h, const PrecoderMatrix& w) {
    CMat wm(w.ntx, w.nusers);
    for (int t = 0; t < w.ntx; ++t)
        for (int u = 0; u < w.nusers; ++u) wm(t, u) = w.at(t, u);
    return h * wm;
}

// Per-user wanted and leakage gains per carrier for one apply block, with the
// precoder taken from the CSI block. At apply_block == csi_block the leakage
// vanishes up to the ZF numeric floor.
struct EffectiveChannel {
    int carriers = 0;
    int nusers = 0;
    int csi_block = 0;
    int apply_block = 0;
    std::vector<cxd> gains; // [carrier][rx_user][stream]

    cxd& at(int c, int user, int stream) {
        return gains[(static_cast<size_t>(c) * nusers + user) * nusers + stream];
    }
    const cxd& at(int c, int user, int stream) const {
        return gains[(static_cast<size_t>(c) * nusers + user) * nusers + stream];
    }
};

inline EffectiveChannel effective_channel(const ChannelResponse& h,
                                          const std::vector<PrecoderMatrix>& w_per_carrier,
                                          int csi_block, int apply_block) {
    if (csi_block < 0 || csi_block >= h.blocks || apply_block < 0 || apply_block >= h.blocks)
        throw std::invalid_argument("effective_channel: block index out of range");
    if (static_cast<int>(w_per_carrier.size()) != h.carriers)
        throw std::invalid_argument("effective_channel: one precoder per carrier required");

    EffectiveChannel eff;
    eff.carriers = h.carriers;
    eff.nusers = h.nrx;
    eff.csi_block = csi_block;
    eff.apply_block = apply_block;
    eff.gains.resize(static_cast<size_t>(h.carriers) * h.nrx * h.nrx);
    CMat hm(h.nrx, h.ntx);
    for (int c = 0; c < h.carriers; ++c) {
        for (int r = 0; r < h.nrx; ++r)
            for (int t = 0; t < h.ntx; ++t) hm(r, t) = h.at(apply_block, c, t, r);
        const CMat g = effective_gains(hm, w_per_carrier[c]);
        for (int u = 0; u < h.nrx; ++u)
            for (int v = 0; v < h.nrx; ++v) eff.at(c, u, v) = g(u, v);
    }
    return eff;
}

} // namespace evmsinr
