// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "evmsinr/channel.hpp"

namespace evmsinr {

// Round-trip exact formatting for all numeric CSV fields.
inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Accumulates a CSV in memory; files are only written once a computation has
// fully succeeded, so failures never leave partial outputs behind.
class CsvBuilder {
  public:
    explicit CsvBuilder(const std::string& header) { out_ << header << '\n'; }

    CsvBuilder& field(double v) {
        sep();
        out_ << fmt_g17(v);
        return *this;
    }
    CsvBuilder& field(long v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvBuilder& field(int v) { return field(static_cast<long>(v)); }
    CsvBuilder& field(const std::string& v) {
        sep();
        out_ << v;
        return *this;
    }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

    std::string str() const { return out_.str(); }

  private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }
    std::ostringstream out_;
    bool first_ = true;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

// Flat channel-tensor exchange format so externally measured responses can be
// substituted for the synthetic ones.
inline std::string channel_to_csv(const ChannelResponse& h) {
    CsvBuilder csv("time_block,carrier,tx,rx,re,im");
    for (int t = 0; t < h.blocks; ++t)
        for (int c = 0; c < h.carriers; ++c)
            for (int x = 0; x < h.ntx; ++x)
                for (int r = 0; r < h.nrx; ++r) {
                    const cxd g = h.at(t, c, x, r);
                    csv.field(t).field(c).field(x).field(r).field(g.real()).field(g.imag());
                    csv.end_row();
                }
    return csv.str();
}

inline ChannelResponse channel_from_csv(std::istream& in, double carrier_spacing_hz = 0.0,
                                        double block_period_s = 0.0) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("time_block", 0) != 0)
        throw std::invalid_argument("channel csv: missing header row");
    struct Entry {
        int t, c, x, r;
        cxd g;
    };
    std::vector<Entry> entries;
    int max_t = -1, max_c = -1, max_x = -1, max_r = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Entry e;
        double re, im;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%lf,%lf", &e.t, &e.c, &e.x, &e.r, &re,
                        &im) != 6)
            throw std::invalid_argument("channel csv: malformed row: " + line);
        e.g = {re, im};
        entries.push_back(e);
        max_t = std::max(max_t, e.t);
        max_c = std::max(max_c, e.c);
        max_x = std::max(max_x, e.x);
        max_r = std::max(max_r, e.r);
    }
    if (entries.empty()) throw std::invalid_argument("channel csv: no data rows");
    ChannelResponse h(max_t + 1, max_c + 1, max_x + 1, max_r + 1);
    h.carrier_spacing_hz = carrier_spacing_hz;
    h.block_period_s = block_period_s;
    for (const auto& e : entries) h.at(e.t, e.c, e.x, e.r) = e.g;
    return h;
}

} // namespace evmsinr
