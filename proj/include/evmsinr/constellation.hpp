// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <cstdint>
#include <vector>

#include "evmsinr/common.hpp"

namespace evmsinr {

// Gray-labelled QAM constellation, normalized to unit average power.
//
// Labeling convention (fixed): square orders (4, 16, 64, 256) and the 4x2
// rectangular 8-QAM use independent Gray coding per axis, I-axis bits first,
// most significant bit first; level index 0 is the most negative level.
// Cross orders (32, 128, 512) use the conventional cross grid (square with
// the corner blocks removed) and carry the Gray code of their scan index as
// label -- a fixed, documented lookup rather than a per-axis code.
struct Constellation {
    int order = 0;
    int bits_per_symbol = 0;
    std::vector<cxd> points;          // unit average power
    std::vector<uint32_t> labels;     // labels[i] = bit label of points[i]
    std::vector<uint32_t> index_of_label;

    const cxd& point_for_label(uint32_t label) const { return points[index_of_label[label]]; }

    // Nearest constellation point by Euclidean distance; ties break toward
    // the smallest point index.
    int nearest_index(cxd r) const {
        int best = 0;
        double best_d = std::norm(r - points[0]);
        for (int i = 1; i < order; ++i) {
            const double d = std::norm(r - points[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }
};

namespace detail {

inline uint32_t gray_encode(uint32_t n) { return n ^ (n >> 1); }

inline int int_log2(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

inline std::vector<double> axis_levels(int count) {
    std::vector<double> lv(count);
    for (int i = 0; i < count; ++i) lv[i] = static_cast<double>(2 * i - (count - 1));
    return lv;
}

inline void normalize_unit_power(std::vector<cxd>& pts) {
    double p = 0.0;
    for (const auto& v : pts) p += std::norm(v);
    p /= static_cast<double>(pts.size());
    const double s = 1.0 / std::sqrt(p);
    for (auto& v : pts) v *= s;
}

// Rectangular grid with per-axis Gray labels, I bits first, MSB first.
inline Constellation rect_gray(int n_i, int n_q) {
    Constellation c;
    c.order = n_i * n_q;
    c.bits_per_symbol = int_log2(c.order);
    const int kq = int_log2(n_q);
    const auto li = axis_levels(n_i);
    const auto lq = axis_levels(n_q);
    for (int a = 0; a < n_i; ++a)
        for (int b = 0; b < n_q; ++b) {
            c.points.emplace_back(li[a], lq[b]);
            const uint32_t label = (gray_encode(static_cast<uint32_t>(a)) << kq) |
                                   gray_encode(static_cast<uint32_t>(b));
            c.labels.push_back(label);
        }
    normalize_unit_power(c.points);
    return c;
}

// Square grid of side w with the four c x c corner blocks removed.
inline Constellation cross_gray(int w, int corner) {
    Constellation c;
    const auto lv = axis_levels(w);
    const double keep = static_cast<double>(w - 1 - 2 * corner);
    uint32_t scan = 0;
    for (int a = 0; a < w; ++a)
        for (int b = 0; b < w; ++b) {
            if (std::abs(lv[a]) > keep && std::abs(lv[b]) > keep) continue;
            c.points.emplace_back(lv[a], lv[b]);
            c.labels.push_back(gray_encode(scan++));
        }
    c.order = static_cast<int>(c.points.size());
    c.bits_per_symbol = int_log2(c.order);
    normalize_unit_power(c.points);
    return c;
}

} // namespace detail

inline Constellation build_constellation(int order) {
    Constellation c;
    switch (order) {
    case 4: c = detail::rect_gray(2, 2); break;
    case 8: c = detail::rect_gray(4, 2); break;
    case 16: c = detail::rect_gray(4, 4); break;
    case 32: c = detail::cross_gray(6, 1); break;
    case 64: c = detail::rect_gray(8, 8); break;
    case 128: c = detail::cross_gray(12, 2); break;
    case 256: c = detail::rect_gray(16, 16); break;
    case 512: c = detail::cross_gray(24, 4); break;
    default:
        throw std::invalid_argument("build_constellation: unsupported order " +
                                    std::to_string(order));
    }
    c.index_of_label.assign(c.order, 0);
    for (int i = 0; i < c.order; ++i) c.index_of_label[c.labels[i]] = static_cast<uint32_t>(i);
    return c;
}

} // namespace evmsinr
