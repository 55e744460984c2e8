// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <algorithm>
#include <optional>

#include "evmsinr/metrics.hpp"
#include "evmsinr/parallel.hpp"
#include "evmsinr/precoding.hpp"

namespace evmsinr {

inline std::vector<double> default_sinr_grid_db() {
    std::vector<double> g;
    for (int v = -5; v <= 20; ++v) g.push_back(static_cast<double>(v));
    return g;
}

// ---------------------------------------------------------------------------
// Gradient fitting (EVM% = A / sqrt(SINR))
// ---------------------------------------------------------------------------

// Intercept-only least squares in log domain with the slope pinned at -1/2:
// log10 A = mean(log10 EVM_i + 0.5 log10 sinr_i).
inline double fit_intercept(const std::vector<double>& sinr_grid_db,
                            const std::vector<double>& evm_percent) {
    if (sinr_grid_db.size() != evm_percent.size() || sinr_grid_db.size() < 2)
        throw std::invalid_argument("fit_intercept: need >= 2 grid points");
    double acc = 0.0;
    for (size_t i = 0; i < sinr_grid_db.size(); ++i)
        acc += std::log10(evm_percent[i]) + 0.05 * sinr_grid_db[i];
    return std::pow(10.0, acc / static_cast<double>(sinr_grid_db.size()));
}

struct FitConfig {
    int qam_order = 64;
    int n_interferers = 1;
    std::vector<double> sinr_grid_db = default_sinr_grid_db();
    int frames = 20;
    int carriers = 1200;
    int seeds = 4;
    double snr_db = 20.0; // noise floor; interference fills the gap below it
    EvmMode evm_mode = EvmMode::DataAided;
    bool collect_ber = true; // hard-decision BER alongside the EVM curve
    int threads = 1;
};

struct FitResult {
    std::optional<GradientModel> model; // empty: order not modelable (4-QAM)
    double residual_rms_db = 0.0;       // log-domain residual of the fit
    std::vector<double> sinr_grid_db;
    std::vector<double> evm_curve_percent;
    std::vector<double> ber_curve;

    bool modelable() const { return model.has_value(); }
};

inline FitResult fit_gradient(const FitConfig& cfg, RngStream rng) {
    if (cfg.qam_order == 4) {
        // a single interferer shifts the quadrature phase consistently at this
        // order; no log-linear model exists, so refuse rather than fit
        FitResult out;
        out.sinr_grid_db = cfg.sinr_grid_db;
        return out;
    }
    if (cfg.sinr_grid_db.size() < 2)
        throw std::invalid_argument("fit_gradient: degenerate SINR grid");
    if (cfg.frames < 2) throw std::invalid_argument("fit_gradient: frames >= 2");

    const auto c = build_constellation(cfg.qam_order);
    const size_t n_pts = cfg.sinr_grid_db.size();
    std::vector<double> evm_sum(n_pts, 0.0), ber_sum(n_pts, 0.0);
    const size_t jobs = n_pts * cfg.seeds;
    std::vector<double> evm_js(jobs), ber_js(jobs);

    parallel_for(jobs, cfg.threads, [&](size_t j) {
        const size_t i = j / cfg.seeds;
        const size_t seed = j % cfg.seeds;
        RngStream stream = rng.sub(i, seed);
        const auto wanted = random_payload(c, cfg.carriers, cfg.frames, stream.sub(0));
        std::vector<SymbolGrid> ints;
        for (int k = 0; k < cfg.n_interferers; ++k)
            ints.push_back(random_payload(c, cfg.carriers, cfg.frames, stream.sub(1 + k)));
        // pure noise when the grid point sweeps without interferers
        const double snr = cfg.n_interferers == 0 ? cfg.sinr_grid_db[i] : cfg.snr_db;
        MixSpec ms{cfg.sinr_grid_db[i], snr, cfg.n_interferers};
        RngStream noise = stream.sub(100);
        const auto mixed = mix(wanted, ints, ms, noise);
        evm_js[j] = rms_evm(mixed.received, wanted, c, cfg.evm_mode).rms_percent;
        ber_js[j] = cfg.collect_ber ? ber(mixed.received, wanted.bits, c) : 0.0;
    });
    for (size_t j = 0; j < jobs; ++j) {
        evm_sum[j / cfg.seeds] += evm_js[j];
        ber_sum[j / cfg.seeds] += ber_js[j];
    }

    FitResult out;
    out.sinr_grid_db = cfg.sinr_grid_db;
    out.evm_curve_percent.resize(n_pts);
    out.ber_curve.resize(n_pts);
    for (size_t i = 0; i < n_pts; ++i) {
        out.evm_curve_percent[i] = evm_sum[i] / cfg.seeds;
        out.ber_curve[i] = ber_sum[i] / cfg.seeds;
    }
    const double a = fit_intercept(out.sinr_grid_db, out.evm_curve_percent);
    double res2 = 0.0;
    for (size_t i = 0; i < n_pts; ++i) {
        const double pred_db = 20.0 * std::log10(a / out.evm_curve_percent[i]);
        const double r = pred_db - out.sinr_grid_db[i];
        res2 += r * r;
    }
    out.residual_rms_db = std::sqrt(res2 / static_cast<double>(n_pts));
    out.model = GradientModel{a, cfg.qam_order, cfg.n_interferers};
    return out;
}

// ---------------------------------------------------------------------------
// Sweep results (iteration counts, bandwidths, QAM orders)
// ---------------------------------------------------------------------------

struct SweepRow {
    double parameter = 0.0; // frame count, sub-band width in Hz, or QAM order
    double mean_error_db = 0.0;
    double std_error_db = 0.0;
    double max_abs_error_db = 0.0;
    double frac_within_half_db = 0.0;
    long n_records = 0;
    double aux = 0.0; // per-study extra (carrier count for bandwidth sweeps)
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

struct IterationConfig {
    std::vector<int> frames_list{2, 5, 10, 20, 50};
    std::vector<double> sinr_grid_db = default_sinr_grid_db();
    int qam_order = 64;
    int n_interferers = 1;
    int carriers = 120; // sub-band granularity; the regime where frame count matters
    int trials = 200;
    double snr_db = 20.0;
    EvmMode evm_mode = EvmMode::DataAided;
    int threads = 1;
};

// Distribution of SINR_P - target SINR per frame count on the flat channel.
inline SweepResult iteration_study(const IterationConfig& cfg, const GradientModel& model,
                                   RngStream rng) {
    if (cfg.frames_list.empty())
        throw std::invalid_argument("iteration_study: empty frames list");
    const auto c = build_constellation(cfg.qam_order);
    SweepResult out;
    for (size_t fi = 0; fi < cfg.frames_list.size(); ++fi) {
        const int frames = cfg.frames_list[fi];
        const size_t jobs = cfg.sinr_grid_db.size() * cfg.trials;
        std::vector<double> err(jobs);
        parallel_for(jobs, cfg.threads, [&](size_t j) {
            const size_t i = j / cfg.trials;
            const size_t t = j % cfg.trials;
            RngStream stream = rng.sub(fi, i, t);
            const auto wanted = random_payload(c, cfg.carriers, frames, stream.sub(0));
            std::vector<SymbolGrid> ints;
            for (int k = 0; k < cfg.n_interferers; ++k)
                ints.push_back(random_payload(c, cfg.carriers, frames, stream.sub(1 + k)));
            MixSpec ms{cfg.sinr_grid_db[i], cfg.snr_db, cfg.n_interferers};
            RngStream noise = stream.sub(100);
            const auto mixed = mix(wanted, ints, ms, noise);
            const auto evm = rms_evm(mixed.received, wanted, c, cfg.evm_mode);
            err[j] = sinr_predict(evm, model).sinr_db - cfg.sinr_grid_db[i];
        });
        SweepRow row;
        row.parameter = frames;
        row.n_records = static_cast<long>(jobs);
        double sum = 0.0, sum2 = 0.0, maxabs = 0.0;
        long within = 0;
        for (double e : err) {
            sum += e;
            sum2 += e * e;
            maxabs = std::max(maxabs, std::abs(e));
            within += std::abs(e) <= 0.5;
        }
        row.mean_error_db = sum / jobs;
        row.std_error_db = std::sqrt(std::max(0.0, sum2 / jobs - row.mean_error_db * row.mean_error_db));
        row.max_abs_error_db = maxabs;
        row.frac_within_half_db = static_cast<double>(within) / jobs;
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multi-user massive-MIMO runs
// ---------------------------------------------------------------------------

enum class Scenario { Stationary, Moving };

struct SinrRecord {
    int user = 0;
    int time_block = 0;
    int sub_band_index = 0;
    double center_freq_hz = 0.0;
    double sinr_signalled_db = 0.0;
    double sinr_predicted_db = 0.0;
    double prediction_error_db = 0.0; // predicted - signalled, by definition
};

struct MmimoConfig {
    Scenario scenario = Scenario::Stationary;
    int n_tx = 32;
    int n_users = 3;
    double band_hz = 120e6;
    double sub_band_hz = 2e6;
    int carriers_per_sub_band = 120; // fixes the carrier spacing at 16.667 kHz
    int frames = 20;
    int blocks = 100;
    int csi_block = 0;
    int qam_order = 64;
    double snr_db = 20.0;
    EvmMode evm_mode = EvmMode::DataAided;
    GradientModel model{};
    MobilityProfile mobility{}; // used when moving
    // stationary co-location emulation: fraction of a common channel component
    // mixed into every user's taps (0 disables; high values shrink the
    // beam-space the precoder can create)
    double colocation_kappa = 0.999;
    // synthetic frequency selectivity
    int n_taps = 8;
    double tap_spacing_s = 2.5e-9;
    double rms_delay_spread_s = 5e-9;
    bool flat_channel = false; // single-tap control
    int threads = 1;

    double carrier_spacing_hz() const { return sub_band_hz / carriers_per_sub_band; }
    int total_carriers() const {
        return static_cast<int>(std::round(band_hz / carrier_spacing_hz()));
    }
    int n_sub_bands() const { return static_cast<int>(std::round(band_hz / sub_band_hz)); }

    void validate() const {
        if (n_users > n_tx)
            throw std::invalid_argument("mmimo: users > antennas is infeasible geometry");
        if (n_users < 1 || n_tx < 1 || frames < 2 || blocks < 1)
            throw std::invalid_argument("mmimo: bad counts");
        const double subs = band_hz / sub_band_hz;
        if (std::abs(subs - std::round(subs)) > 1e-9 || subs < 1.0)
            throw std::invalid_argument("mmimo: band must be divisible by sub-band");
        if (csi_block < 0 || csi_block >= blocks)
            throw std::invalid_argument("mmimo: csi_block out of range");
        if (colocation_kappa < 0.0 || colocation_kappa > 1.0)
            throw std::invalid_argument("mmimo: colocation_kappa in [0,1]");
        if (scenario == Scenario::Moving) mobility.validate();
    }

    DelayProfile delay_profile() const {
        if (flat_channel) return DelayProfile::exponential(1, 1e-9, 1e-9);
        return DelayProfile::exponential(n_taps, tap_spacing_s, rms_delay_spread_s);
    }
};

namespace detail {

// Per-user TDL taps with an optional common component shared by all users.
inline TdlTaps draw_user_taps(const DelayProfile& profile, int n_tx, int n_users,
                              double kappa, RngStream& rng) {
    TdlTaps t = TdlTaps::draw(profile, n_tx, n_users, rng);
    if (kappa > 0.0) {
        TdlTaps common = TdlTaps::draw(profile, n_tx, 1, rng);
        const double a = std::sqrt(kappa), b = std::sqrt(1.0 - kappa);
        const size_t n_taps = profile.tap_delays_s.size();
        for (size_t k = 0; k < n_taps; ++k)
            for (int x = 0; x < n_tx; ++x)
                for (int u = 0; u < n_users; ++u) {
                    const size_t i = t.tap_index(k, x, u);
                    t.taps[i] = a * common.taps[common.tap_index(k, x, 0)] + b * t.taps[i];
                }
    }
    return t;
}

} // namespace detail

// One full downlink run: per-carrier ZF from the CSI block, independent OFDM
// payloads per user per block, one SinrRecord per (user, block, sub-band).
// The receiver equalizes each carrier by its effective wanted gain before the
// EVM is taken, so carriers in a deep fade contribute heavily, while SINR_S is
// formed from the separately tracked signal components.
inline std::vector<SinrRecord> mmimo_run(const MmimoConfig& cfg, RngStream rng) {
    cfg.validate();
    const auto c = build_constellation(cfg.qam_order);
    const auto profile = cfg.delay_profile();
    const int n_car = cfg.total_carriers();
    const int n_sub = cfg.n_sub_bands();
    const int cps = n_car / n_sub;
    const int nu = cfg.n_users;
    const double sigma2 = db_to_lin(-cfg.snr_db);
    const double rho =
        cfg.scenario == Scenario::Moving ? clarke_rho(cfg.mobility) : 1.0;
    const double kappa =
        cfg.scenario == Scenario::Stationary ? cfg.colocation_kappa : 0.0;

    std::vector<double> freqs(n_car);
    for (int i = 0; i < n_car; ++i) freqs[i] = i * cfg.carrier_spacing_hz();

    // channel trajectory: AR-1 in the tap domain keeps the frequency
    // correlation structure intact across blocks
    RngStream ch_rng = rng.sub(0);
    std::vector<TdlTaps> taps_per_block;
    taps_per_block.reserve(cfg.blocks);
    taps_per_block.push_back(
        detail::draw_user_taps(profile, cfg.n_tx, nu, kappa, ch_rng));
    for (int b = 1; b < cfg.blocks; ++b) {
        TdlTaps t = taps_per_block.back();
        if (rho < 1.0) {
            RngStream step = ch_rng.sub(b);
            t.ar1_step(rho, step);
        }
        taps_per_block.push_back(std::move(t));
    }

    // per-carrier ZF at the CSI block
    std::vector<cxd> resp_csi;
    taps_per_block[cfg.csi_block].response(freqs, resp_csi);
    std::vector<PrecoderMatrix> w(n_car);
    parallel_for(static_cast<size_t>(n_car), cfg.threads, [&](size_t ci) {
        CMat h(nu, cfg.n_tx);
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < cfg.n_tx; ++x)
                h(u, x) = resp_csi[(ci * cfg.n_tx + x) * nu + u];
        w[ci] = zero_forcing(h);
    });

    std::vector<std::vector<SinrRecord>> per_block(cfg.blocks);
    parallel_for(static_cast<size_t>(cfg.blocks), cfg.threads, [&](size_t b) {
        std::vector<cxd> resp;
        taps_per_block[b].response(freqs, resp);
        // eff[(c*nu + u)*nu + v] = gain of stream v at user u on carrier c
        std::vector<cxd> eff(static_cast<size_t>(n_car) * nu * nu);
        for (int ci = 0; ci < n_car; ++ci)
            for (int u = 0; u < nu; ++u)
                for (int v = 0; v < nu; ++v) {
                    cxd acc{0.0, 0.0};
                    for (int x = 0; x < cfg.n_tx; ++x)
                        acc += resp[(static_cast<size_t>(ci) * cfg.n_tx + x) * nu + u] *
                               w[ci].at(x, v);
                    eff[(static_cast<size_t>(ci) * nu + u) * nu + v] = acc;
                }

        RngStream block_rng = rng.sub(1, b);
        std::vector<SymbolGrid> payload(nu);
        for (int v = 0; v < nu; ++v)
            payload[v] = random_payload(c, n_car, cfg.frames, block_rng.sub(v));

        for (int u = 0; u < nu; ++u) {
            RngStream noise_rng = block_rng.sub(100 + u);
            CxMatrix noise(n_car, cfg.frames);
            for (auto& z : noise.data) z = noise_rng.cgaussian(sigma2);

            for (int sb = 0; sb < n_sub; ++sb) {
                const int c0 = sb * cps;
                CxMatrix wanted_comp(cps, cfg.frames);
                std::vector<CxMatrix> leak;
                CxMatrix equalized(cps, cfg.frames);
                CxMatrix reference(cps, cfg.frames);
                for (int v = 0; v < nu; ++v)
                    if (v != u) leak.emplace_back(cps, cfg.frames);
                for (int k = 0; k < cps; ++k) {
                    const int ci = c0 + k;
                    const cxd g = eff[(static_cast<size_t>(ci) * nu + u) * nu + u];
                    for (int f = 0; f < cfg.frames; ++f) {
                        cxd r{0.0, 0.0};
                        int li = 0;
                        for (int v = 0; v < nu; ++v) {
                            const cxd comp =
                                eff[(static_cast<size_t>(ci) * nu + u) * nu + v] *
                                payload[v].symbols.at(ci, f);
                            r += comp;
                            if (v == u)
                                wanted_comp.at(k, f) = comp;
                            else
                                leak[li++].at(k, f) = comp;
                        }
                        r += noise.at(ci, f);
                        equalized.at(k, f) = r / g;
                        reference.at(k, f) = payload[u].symbols.at(ci, f);
                    }
                }
                SinrRecord rec;
                rec.user = u;
                rec.time_block = static_cast<int>(b);
                rec.sub_band_index = sb;
                rec.center_freq_hz = (c0 + 0.5 * (cps - 1)) * cfg.carrier_spacing_hz();
                rec.sinr_signalled_db = sinr_signalled_db(wanted_comp, leak, sigma2);
                const auto evm = rms_evm(equalized, reference, c, cfg.evm_mode);
                rec.sinr_predicted_db = sinr_predict(evm, cfg.model).sinr_db;
                rec.prediction_error_db = rec.sinr_predicted_db - rec.sinr_signalled_db;
                per_block[b].push_back(rec);
            }
        }
    });

    std::vector<SinrRecord> records;
    records.reserve(static_cast<size_t>(cfg.blocks) * nu * n_sub);
    for (auto& blk : per_block)
        for (auto& r : blk) records.push_back(r);
    return records;
}

// ---------------------------------------------------------------------------
// Signalling repeatability
// ---------------------------------------------------------------------------

struct RepeatabilityConfig {
    int blocks = 500;
    int frames = 20;
    int carriers = 120;
    int qam_order = 64;
    double sinr_target_db = 0.0; // interference-dominated regime
    double snr_db = 20.0;
    bool reuse_payload = false; // same bits every block (control case)
    int threads = 1;
};

struct RepeatabilityResult {
    double mean_wanted_variance = 0.0;
    double spread_pct = 0.0;    // +-1.96 sigma of the wanted variance, percent
    double sinr_spread_db = 0.0; // +-1.96 sigma of per-block SINR_S
    double mean_sinr_db = 0.0;
    std::vector<double> wanted_variance; // per block
    std::vector<double> sinr_db;         // per block
};

// Repeated independent payload blocks through a fixed channel; the spread of
// E[var(s)]_f and of the implied SINR_S is the signalling repeatability.
inline RepeatabilityResult signalling_repeatability(const RepeatabilityConfig& cfg,
                                                    RngStream rng) {
    if (cfg.blocks < 2) throw std::invalid_argument("repeatability: blocks >= 2");
    const auto c = build_constellation(cfg.qam_order);
    const double sigma2 = db_to_lin(-cfg.snr_db);
    const double p_int = db_to_lin(-cfg.sinr_target_db) - sigma2;
    if (p_int <= 0.0)
        throw infeasible_spec("repeatability: needs sinr_target below snr");
    const double g = std::sqrt(p_int / 2.0); // two interfering streams

    RepeatabilityResult out;
    out.wanted_variance.resize(cfg.blocks);
    out.sinr_db.resize(cfg.blocks);
    parallel_for(static_cast<size_t>(cfg.blocks), cfg.threads, [&](size_t b) {
        RngStream stream = cfg.reuse_payload ? rng.sub(0) : rng.sub(b);
        auto mean_var = [&](const SymbolGrid& grid, double scale) {
            double acc = 0.0;
            for (int k = 0; k < grid.carriers(); ++k)
                acc += row_sample_variance(grid.symbols, k);
            return scale * scale * acc / grid.carriers();
        };
        const auto xw = random_payload(c, cfg.carriers, cfg.frames, stream.sub(0));
        const auto x1 = random_payload(c, cfg.carriers, cfg.frames, stream.sub(1));
        const auto x2 = random_payload(c, cfg.carriers, cfg.frames, stream.sub(2));
        const double vw = mean_var(xw, 1.0);
        const double vi = mean_var(x1, g) + mean_var(x2, g);
        out.wanted_variance[b] = vw;
        out.sinr_db[b] = lin_to_db(vw / (vi + sigma2));
    });

    auto mean_std = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        return std::pair<double, double>{m, std::sqrt(s2 / v.size())};
    };
    const auto [mv, sv] = mean_std(out.wanted_variance);
    const auto [ms, ss] = mean_std(out.sinr_db);
    out.mean_wanted_variance = mv;
    out.spread_pct = 100.0 * 1.96 * sv / mv;
    out.sinr_spread_db = 1.96 * ss;
    out.mean_sinr_db = ms;
    return out;
}

// ---------------------------------------------------------------------------
// Bandwidth sweep
// ---------------------------------------------------------------------------

struct BandwidthSweepConfig {
    std::vector<double> sub_band_list_hz{1e6, 2e6, 5e6, 10e6, 20e6};
    MmimoConfig base{}; // carrier spacing fixed by base; carriers scale with width
    // records below this SINR_S are outage for CQI purposes and excluded from
    // the error statistics (the tail otherwise dominates the std)
    double analysis_floor_db = -10.0;
};

inline SweepResult bandwidth_sweep(const BandwidthSweepConfig& cfg, RngStream rng) {
    if (cfg.sub_band_list_hz.empty())
        throw std::invalid_argument("bandwidth_sweep: empty sub-band list");
    const double spacing = cfg.base.carrier_spacing_hz();
    SweepResult out;
    for (size_t wi = 0; wi < cfg.sub_band_list_hz.size(); ++wi) {
        const double sub = cfg.sub_band_list_hz[wi];
        MmimoConfig run_cfg = cfg.base;
        run_cfg.sub_band_hz = sub;
        const double cps = sub / spacing;
        if (std::abs(cps - std::round(cps)) > 1e-9)
            throw std::invalid_argument("bandwidth_sweep: sub-band not a carrier multiple");
        run_cfg.carriers_per_sub_band = static_cast<int>(std::round(cps));
        const auto records = mmimo_run(run_cfg, rng.sub(wi));
        SweepRow row;
        row.parameter = sub;
        row.aux = run_cfg.carriers_per_sub_band;
        double sum = 0.0, sum2 = 0.0, maxabs = 0.0;
        long n = 0, within = 0;
        for (const auto& r : records) {
            if (r.sinr_signalled_db < cfg.analysis_floor_db) continue;
            const double e = r.prediction_error_db;
            sum += e;
            sum2 += e * e;
            maxabs = std::max(maxabs, std::abs(e));
            within += std::abs(e) <= 0.5;
            ++n;
        }
        if (n > 0) {
            row.mean_error_db = sum / n;
            row.std_error_db =
                std::sqrt(std::max(0.0, sum2 / n - row.mean_error_db * row.mean_error_db));
            row.frac_within_half_db = static_cast<double>(within) / n;
        }
        row.max_abs_error_db = maxabs;
        row.n_records = n;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace evmsinr
