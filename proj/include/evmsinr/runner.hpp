// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks

#pragma once

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "evmsinr/calibration.hpp"
#include "evmsinr/csv.hpp"

namespace evmsinr {

enum class Study { FitA, QamCompare, IterationStudy, Mmimo, Repeatability, BandwidthSweep };

inline const char* study_name(Study s) {
    switch (s) {
    case Study::FitA: return "fit-a";
    case Study::QamCompare: return "qam-compare";
    case Study::IterationStudy: return "iteration-study";
    case Study::Mmimo: return "mmimo";
    case Study::Repeatability: return "repeatability";
    case Study::BandwidthSweep: return "bandwidth-sweep";
    }
    return "?";
}

inline Study study_from_name(const std::string& name) {
    for (Study s : {Study::FitA, Study::QamCompare, Study::IterationStudy, Study::Mmimo,
                    Study::Repeatability, Study::BandwidthSweep})
        if (name == study_name(s)) return s;
    throw std::invalid_argument("unknown study: " + name);
}

// Fully resolved run configuration. Defaults follow the reference campaign:
// 1200 carriers x 20 frames on the flat channel, SINR grid -5..20 dB,
// 32 antennas serving 3 users over 120 MHz in 2 MHz / 120-carrier sub-bands,
// 8.89 Hz Doppler at 36.56 ms block period.
struct RunConfig {
    Study study = Study::FitA;
    uint64_t seed = 1;
    std::string out_dir = ".";
    int threads = 0; // 0: hardware concurrency

    int qam_order = 64;
    std::vector<int> qam_orders{8, 16, 32, 64, 128, 256, 512}; // qam-compare
    int n_interferers = 1;
    int carriers = 0;       // 0: study default (fit 1200, iteration 120)
    int frames = 20;
    int seeds = 4;          // channel/payload averages per grid point
    double snr_db = 20.0;
    double grid_min_db = -5.0;
    double grid_max_db = 20.0;
    double grid_step_db = 1.0;
    std::string evm_mode = "data-aided"; // or "decision-directed"

    // "stationary" | "moving"; empty picks the study default (moving for the
    // bandwidth sweep, where CSI aging supplies the wide-band selectivity,
    // stationary otherwise)
    std::string scenario;
    int n_tx = 32;
    int n_users = 3;
    double band_hz = 120e6;
    double sub_band_hz = 2e6;
    int carriers_per_sub_band = 120;
    int blocks = 0; // 0: study default (mmimo 100, repeatability 500)
    int csi_block = 0;
    double doppler_hz = 8.89;
    double block_period_s = 0.03656;
    double colocation_kappa = 0.999;
    int n_taps = 8;
    double tap_spacing_s = 2.5e-9;
    double rms_delay_spread_s = 5e-9;
    bool flat_channel = false;
    double a_value = 100.0;

    std::vector<int> frames_list{2, 5, 10, 20, 50}; // iteration study
    int trials = 200;

    std::vector<double> sub_band_list_hz{1e6, 2e6, 5e6, 10e6, 20e6}; // sweep
    double analysis_floor_db = -10.0;
    double repeat_sinr_db = 0.0;

    int resolved_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }
    int resolved_carriers() const {
        if (carriers > 0) return carriers;
        return study == Study::IterationStudy ? 120 : 1200;
    }
    int resolved_blocks() const {
        if (blocks > 0) return blocks;
        return study == Study::Repeatability ? 500 : 100;
    }
    std::vector<double> sinr_grid() const {
        std::vector<double> g;
        for (double v = grid_min_db; v <= grid_max_db + 1e-9; v += grid_step_db)
            g.push_back(v);
        return g;
    }
    EvmMode resolved_evm_mode() const {
        if (evm_mode == "data-aided") return EvmMode::DataAided;
        if (evm_mode == "decision-directed") return EvmMode::DecisionDirected;
        throw std::invalid_argument("config error: evm_mode must be data-aided or "
                                    "decision-directed");
    }
    Scenario resolved_scenario() const {
        if (scenario.empty())
            return study == Study::BandwidthSweep ? Scenario::Moving : Scenario::Stationary;
        if (scenario == "stationary") return Scenario::Stationary;
        if (scenario == "moving") return Scenario::Moving;
        throw std::invalid_argument("config error: scenario must be stationary or moving");
    }

    MmimoConfig mmimo_config() const {
        MmimoConfig m;
        m.scenario = resolved_scenario();
        m.n_tx = n_tx;
        m.n_users = n_users;
        m.band_hz = band_hz;
        m.sub_band_hz = sub_band_hz;
        m.carriers_per_sub_band = carriers_per_sub_band;
        m.frames = frames;
        m.blocks = resolved_blocks();
        m.csi_block = csi_block;
        m.qam_order = qam_order;
        m.snr_db = snr_db;
        m.evm_mode = resolved_evm_mode();
        m.model = GradientModel{a_value, qam_order, n_interferers};
        m.mobility = MobilityProfile{doppler_hz, block_period_s};
        m.colocation_kappa = colocation_kappa;
        m.n_taps = n_taps;
        m.tap_spacing_s = tap_spacing_s;
        m.rms_delay_spread_s = rms_delay_spread_s;
        m.flat_channel = flat_channel;
        m.threads = resolved_threads();
        return m;
    }

    // Every parameter checked against the owning module's preconditions
    // before any computation starts.
    void validate() const {
        static const std::set<int> orders{4, 8, 16, 32, 64, 128, 256, 512};
        if (!orders.count(qam_order))
            throw std::invalid_argument("config error: qam_order must be one of "
                                        "{4,8,16,32,64,128,256,512}");
        for (int o : qam_orders)
            if (!orders.count(o))
                throw std::invalid_argument("config error: qam_orders entry " +
                                            std::to_string(o) + " unsupported");
        if (n_interferers < 0 || n_interferers > 3)
            throw std::invalid_argument("config error: n_interferers in 0..3");
        if (frames < 2) throw std::invalid_argument("config error: frames >= 2");
        if (seeds < 1) throw std::invalid_argument("config error: seeds >= 1");
        if (grid_step_db <= 0.0 || grid_max_db < grid_min_db)
            throw std::invalid_argument("config error: bad sinr grid");
        (void)resolved_evm_mode();
        (void)resolved_scenario();
        if (a_value <= 0.0) throw std::invalid_argument("config error: a_value must be > 0");
        if (trials < 1) throw std::invalid_argument("config error: trials >= 1");
        if (study == Study::Mmimo || study == Study::BandwidthSweep) mmimo_config().validate();
        if (study == Study::Repeatability && resolved_blocks() < 2)
            throw std::invalid_argument("config error: blocks >= 2 for repeatability");
        if (!flat_channel)
            DelayProfile::exponential(n_taps, tap_spacing_s, rms_delay_spread_s).validate();
    }
};

namespace detail {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("config error: bad value type for key '") +
                                    key + "'");
    }
}

} // namespace detail

// Applies a JSON object (file contents or flag overrides) onto a RunConfig.
// Unknown keys are rejected by name.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
    static const std::set<std::string> known{
        "study",          "seed",           "out_dir",          "threads",
        "qam_order",      "qam_orders",     "n_interferers",    "carriers",
        "frames",         "seeds",          "snr_db",           "grid_min_db",
        "grid_max_db",    "grid_step_db",   "evm_mode",         "scenario",
        "n_tx",           "n_users",        "band_hz",          "sub_band_hz",
        "carriers_per_sub_band",            "blocks",           "csi_block",
        "doppler_hz",     "block_period_s", "colocation_kappa", "n_taps",
        "tap_spacing_s",  "rms_delay_spread_s",                 "flat_channel",
        "a_value",        "frames_list",    "trials",           "sub_band_list_hz",
        "analysis_floor_db",                "repeat_sinr_db"};
    if (!j.is_object()) throw std::invalid_argument("config error: root must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw std::invalid_argument("config error: unknown key '" + key + "'");
    }
    if (j.contains("study")) cfg.study = study_from_name(j.at("study").get<std::string>());
    detail::read_key(j, "seed", cfg.seed);
    detail::read_key(j, "out_dir", cfg.out_dir);
    detail::read_key(j, "threads", cfg.threads);
    detail::read_key(j, "qam_order", cfg.qam_order);
    detail::read_key(j, "qam_orders", cfg.qam_orders);
    detail::read_key(j, "n_interferers", cfg.n_interferers);
    detail::read_key(j, "carriers", cfg.carriers);
    detail::read_key(j, "frames", cfg.frames);
    detail::read_key(j, "seeds", cfg.seeds);
    detail::read_key(j, "snr_db", cfg.snr_db);
    detail::read_key(j, "grid_min_db", cfg.grid_min_db);
    detail::read_key(j, "grid_max_db", cfg.grid_max_db);
    detail::read_key(j, "grid_step_db", cfg.grid_step_db);
    detail::read_key(j, "evm_mode", cfg.evm_mode);
    detail::read_key(j, "scenario", cfg.scenario);
    detail::read_key(j, "n_tx", cfg.n_tx);
    detail::read_key(j, "n_users", cfg.n_users);
    detail::read_key(j, "band_hz", cfg.band_hz);
    detail::read_key(j, "sub_band_hz", cfg.sub_band_hz);
    detail::read_key(j, "carriers_per_sub_band", cfg.carriers_per_sub_band);
    detail::read_key(j, "blocks", cfg.blocks);
    detail::read_key(j, "csi_block", cfg.csi_block);
    detail::read_key(j, "doppler_hz", cfg.doppler_hz);
    detail::read_key(j, "block_period_s", cfg.block_period_s);
    detail::read_key(j, "colocation_kappa", cfg.colocation_kappa);
    detail::read_key(j, "n_taps", cfg.n_taps);
    detail::read_key(j, "tap_spacing_s", cfg.tap_spacing_s);
    detail::read_key(j, "rms_delay_spread_s", cfg.rms_delay_spread_s);
    detail::read_key(j, "flat_channel", cfg.flat_channel);
    detail::read_key(j, "a_value", cfg.a_value);
    detail::read_key(j, "frames_list", cfg.frames_list);
    detail::read_key(j, "trials", cfg.trials);
    detail::read_key(j, "sub_band_list_hz", cfg.sub_band_list_hz);
    detail::read_key(j, "analysis_floor_db", cfg.analysis_floor_db);
    detail::read_key(j, "repeat_sinr_db", cfg.repeat_sinr_db);
}

// File values first, then flag overrides; flags win. The default output
// directory may also come from EVMSINR_OUT.
inline RunConfig parse_config(const std::string& config_path, const nlohmann::json& overrides) {
    RunConfig cfg;
    if (const char* env_out = std::getenv("EVMSINR_OUT")) cfg.out_dir = env_out;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::invalid_argument("config error: cannot read " + config_path);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config error: " + std::string(e.what()));
        }
        apply_json(cfg, j);
    }
    apply_json(cfg, overrides);
    cfg.validate();
    return cfg;
}

// Serialized experiment parameters. Execution knobs (threads, out_dir) stay
// out so outputs are byte-identical across parallelism levels and machines.
inline nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{
        {"study", study_name(c.study)},
        {"seed", c.seed},
        {"qam_order", c.qam_order},
        {"qam_orders", c.qam_orders},
        {"n_interferers", c.n_interferers},
        {"carriers", c.resolved_carriers()},
        {"frames", c.frames},
        {"seeds", c.seeds},
        {"snr_db", c.snr_db},
        {"grid_min_db", c.grid_min_db},
        {"grid_max_db", c.grid_max_db},
        {"grid_step_db", c.grid_step_db},
        {"evm_mode", c.evm_mode},
        {"scenario", c.resolved_scenario() == Scenario::Stationary ? "stationary" : "moving"},
        {"n_tx", c.n_tx},
        {"n_users", c.n_users},
        {"band_hz", c.band_hz},
        {"sub_band_hz", c.sub_band_hz},
        {"carriers_per_sub_band", c.carriers_per_sub_band},
        {"blocks", c.resolved_blocks()},
        {"csi_block", c.csi_block},
        {"doppler_hz", c.doppler_hz},
        {"block_period_s", c.block_period_s},
        {"colocation_kappa", c.colocation_kappa},
        {"n_taps", c.n_taps},
        {"tap_spacing_s", c.tap_spacing_s},
        {"rms_delay_spread_s", c.rms_delay_spread_s},
        {"flat_channel", c.flat_channel},
        {"a_value", c.a_value},
        {"frames_list", c.frames_list},
        {"trials", c.trials},
        {"sub_band_list_hz", c.sub_band_list_hz},
        {"analysis_floor_db", c.analysis_floor_db},
        {"repeat_sinr_db", c.repeat_sinr_db}};
}

struct StudyOutput {
    std::vector<std::pair<std::string, std::string>> files; // name -> content
    nlohmann::json summary;
};

namespace detail {

inline FitConfig fit_config(const RunConfig& c) {
    FitConfig f;
    f.qam_order = c.qam_order;
    f.n_interferers = c.n_interferers;
    f.sinr_grid_db = c.sinr_grid();
    f.frames = c.frames;
    f.carriers = c.resolved_carriers();
    f.seeds = c.seeds;
    f.snr_db = c.snr_db;
    f.evm_mode = c.resolved_evm_mode();
    f.threads = c.resolved_threads();
    return f;
}

inline StudyOutput run_fit_a(const RunConfig& cfg) {
    const auto fit = fit_gradient(fit_config(cfg), RngStream(cfg.seed));
    StudyOutput out;
    CsvBuilder csv("sinr_db,ber,evm_percent,evm_model_percent");
    for (size_t i = 0; i < fit.sinr_grid_db.size(); ++i) {
        const double model = fit.modelable()
                                 ? fit.model->a_value /
                                       std::sqrt(db_to_lin(fit.sinr_grid_db[i]))
                                 : std::numeric_limits<double>::quiet_NaN();
        csv.field(fit.sinr_grid_db[i])
            .field(fit.modelable() ? fit.ber_curve[i] : std::numeric_limits<double>::quiet_NaN())
            .field(fit.modelable() ? fit.evm_curve_percent[i]
                                   : std::numeric_limits<double>::quiet_NaN())
            .field(model);
        csv.end_row();
    }
    out.files.emplace_back("fig3.csv", csv.str());
    out.summary["results"] = {
        {"modelable", fit.modelable()},
        {"a_value", fit.modelable() ? nlohmann::json(fit.model->a_value) : nlohmann::json()},
        {"residual_rms_db", fit.residual_rms_db}};
    if (fit.modelable() && cfg.qam_order == 64 && cfg.n_interferers == 1)
        out.summary["acceptance"]["a_64qam_within_band"] =
            fit.model->a_value >= 107.0 * 0.85 && fit.model->a_value <= 107.0 * 1.15;
    if (fit.modelable() && cfg.qam_order == 256)
        out.summary["acceptance"]["a_256qam_within_band"] =
            fit.model->a_value >= 129.0 * 0.85 && fit.model->a_value <= 129.0 * 1.15;
    return out;
}

inline StudyOutput run_qam_compare(const RunConfig& cfg) {
    StudyOutput out;
    CsvBuilder table("qam_order,n_interferers,a_value,residual_rms_db,modelable");
    CsvBuilder curves("qam_order,sinr_db,evm_percent,evm_model_percent");
    std::vector<double> a_one_int;
    std::map<int, std::map<int, double>> a_by_order_int;
    for (int order : cfg.qam_orders) {
        for (int ints = 1; ints <= 3; ++ints) {
            FitConfig f = fit_config(cfg);
            f.qam_order = order;
            f.n_interferers = ints;
            f.collect_ber = false; // only the gradient and EVM curves are tabulated
            const auto fit = fit_gradient(f, RngStream(cfg.seed).sub(order, ints));
            table.field(order).field(ints);
            if (fit.modelable()) {
                table.field(fit.model->a_value).field(fit.residual_rms_db).field(1);
                a_by_order_int[order][ints] = fit.model->a_value;
                if (ints == 1) {
                    a_one_int.push_back(fit.model->a_value);
                    for (size_t i = 0; i < fit.sinr_grid_db.size(); ++i) {
                        curves.field(order)
                            .field(fit.sinr_grid_db[i])
                            .field(fit.evm_curve_percent[i])
                            .field(fit.model->a_value /
                                   std::sqrt(db_to_lin(fit.sinr_grid_db[i])));
                        curves.end_row();
                    }
                }
            } else {
                table.field(std::numeric_limits<double>::quiet_NaN())
                    .field(std::numeric_limits<double>::quiet_NaN())
                    .field(0);
            }
            table.end_row();
        }
    }
    out.files.emplace_back("table-i.csv", table.str());
    out.files.emplace_back("fig4.csv", curves.str());

    bool monotone = true;
    for (size_t i = 1; i < a_one_int.size(); ++i)
        if (a_one_int[i] < a_one_int[i - 1] * 0.99) monotone = false;
    bool invariant = true;
    for (const auto& [order, by_int] : a_by_order_int) {
        if (order < 64 || by_int.size() < 2) continue;
        double lo = by_int.begin()->second, hi = lo;
        for (const auto& [ints, a] : by_int) {
            (void)ints;
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        if ((hi - lo) / lo > 0.05) invariant = false;
    }
    out.summary["results"]["a_values_one_interferer"] = a_one_int;
    out.summary["acceptance"]["a_monotone_in_order"] = monotone;
    out.summary["acceptance"]["a_invariant_to_interferers_order_ge_64"] = invariant;
    return out;
}

inline StudyOutput run_iteration_study(const RunConfig& cfg) {
    IterationConfig ic;
    ic.frames_list = cfg.frames_list;
    ic.sinr_grid_db = cfg.sinr_grid();
    ic.qam_order = cfg.qam_order;
    ic.n_interferers = cfg.n_interferers;
    ic.carriers = cfg.resolved_carriers();
    ic.trials = cfg.trials;
    ic.snr_db = cfg.snr_db;
    ic.evm_mode = cfg.resolved_evm_mode();
    ic.threads = cfg.resolved_threads();
    const GradientModel model{cfg.a_value, cfg.qam_order, cfg.n_interferers};
    const auto sweep = iteration_study(ic, model, RngStream(cfg.seed));

    StudyOutput out;
    CsvBuilder csv("frames,mean_error_db,std_error_db,max_abs_error_db,"
                   "frac_within_half_db,n_trials");
    for (const auto& r : sweep.rows) {
        csv.field(r.parameter)
            .field(r.mean_error_db)
            .field(r.std_error_db)
            .field(r.max_abs_error_db)
            .field(r.frac_within_half_db)
            .field(r.n_records);
        csv.end_row();
    }
    out.files.emplace_back("fig5.csv", csv.str());

    bool ge10_ok = true;
    double rate_2 = -1.0, min_rate_ge10 = 2.0;
    for (const auto& r : sweep.rows) {
        if (r.parameter >= 10 && r.frac_within_half_db < 0.95) ge10_ok = false;
        if (r.parameter >= 10) min_rate_ge10 = std::min(min_rate_ge10, r.frac_within_half_db);
        if (r.parameter == 2) rate_2 = r.frac_within_half_db;
    }
    out.summary["results"]["rate_within_half_db_at_2_frames"] = rate_2;
    out.summary["acceptance"]["rate_ge_95pct_for_10plus_frames"] = ge10_ok;
    if (rate_2 >= 0.0 && min_rate_ge10 <= 1.0)
        out.summary["acceptance"]["rate_at_2_frames_strictly_lower"] = rate_2 < min_rate_ge10;
    return out;
}

inline StudyOutput run_mmimo(const RunConfig& cfg) {
    const auto records = mmimo_run(cfg.mmimo_config(), RngStream(cfg.seed));
    StudyOutput out;
    CsvBuilder csv("user,time_block,sub_band_index,center_freq_hz,sinr_s_db,sinr_p_db,"
                   "error_db");
    long within = 0;
    for (const auto& r : records) {
        csv.field(r.user)
            .field(r.time_block)
            .field(r.sub_band_index)
            .field(r.center_freq_hz)
            .field(r.sinr_signalled_db)
            .field(r.sinr_predicted_db)
            .field(r.prediction_error_db);
        csv.end_row();
        within += std::abs(r.prediction_error_db) <= 2.0;
    }
    const std::string mesh_name =
        cfg.resolved_scenario() == Scenario::Stationary ? "fig8-mesh.csv" : "fig9-mesh.csv";
    out.files.emplace_back(mesh_name, csv.str());
    const double frac = records.empty() ? 0.0 : static_cast<double>(within) / records.size();
    out.summary["results"]["n_records"] = records.size();
    out.summary["results"]["frac_within_2db"] = frac;
    out.summary["acceptance"]["frac_within_2db_ge_95pct"] = frac >= 0.95;
    return out;
}

inline StudyOutput run_repeatability(const RunConfig& cfg) {
    RepeatabilityConfig rc;
    rc.blocks = cfg.resolved_blocks();
    rc.frames = cfg.frames;
    rc.carriers = cfg.carriers > 0 ? cfg.carriers : 120;
    rc.qam_order = cfg.qam_order;
    rc.sinr_target_db = cfg.repeat_sinr_db;
    rc.snr_db = cfg.snr_db;
    rc.threads = cfg.resolved_threads();
    const auto rep = signalling_repeatability(rc, RngStream(cfg.seed));

    StudyOutput out;
    CsvBuilder csv("block,wanted_variance,sinr_s_db");
    for (size_t b = 0; b < rep.wanted_variance.size(); ++b) {
        csv.field(static_cast<long>(b)).field(rep.wanted_variance[b]).field(rep.sinr_db[b]);
        csv.end_row();
    }
    out.files.emplace_back("repeatability.csv", csv.str());
    out.summary["results"] = {{"spread_pct", rep.spread_pct},
                              {"sinr_spread_db", rep.sinr_spread_db},
                              {"mean_sinr_db", rep.mean_sinr_db}};
    out.summary["acceptance"]["spread_pct_in_1_to_4"] =
        rep.spread_pct >= 1.0 && rep.spread_pct <= 4.0;
    out.summary["acceptance"]["sinr_spread_db_in_0p1_to_0p4"] =
        rep.sinr_spread_db >= 0.1 && rep.sinr_spread_db <= 0.4;
    return out;
}

inline StudyOutput run_bandwidth_sweep(const RunConfig& cfg) {
    BandwidthSweepConfig bc;
    bc.sub_band_list_hz = cfg.sub_band_list_hz;
    bc.base = cfg.mmimo_config();
    bc.analysis_floor_db = cfg.analysis_floor_db;
    const auto sweep = bandwidth_sweep(bc, RngStream(cfg.seed));

    StudyOutput out;
    CsvBuilder csv("sub_band_hz,carriers,mean_error_db,std_error_db,n_records");
    std::map<double, double> std_by_width;
    for (const auto& r : sweep.rows) {
        csv.field(r.parameter)
            .field(static_cast<long>(r.aux))
            .field(r.mean_error_db)
            .field(r.std_error_db)
            .field(r.n_records);
        csv.end_row();
        std_by_width[r.parameter] = r.std_error_db;
    }
    out.files.emplace_back("fig10.csv", csv.str());
    if (std_by_width.count(1e6) && std_by_width.count(2e6))
        out.summary["acceptance"]["std_1mhz_above_2mhz"] =
            std_by_width[1e6] > std_by_width[2e6];
    bool wide_above = false, have_wide = false;
    for (const auto& [w, s] : std_by_width)
        if (w >= 20e6 && std_by_width.count(2e6)) {
            have_wide = true;
            if (s > std_by_width[2e6]) wide_above = true;
        }
    if (have_wide) out.summary["acceptance"]["std_20mhz_above_2mhz"] = wide_above;
    return out;
}

} // namespace detail

// Runs a study and writes its CSVs plus a JSON summary (resolved config,
// headline statistics, pass/fail verdicts where the study has declared
// thresholds). All writes happen after the computation completes.
inline int run_study(const RunConfig& cfg) {
    cfg.validate();
    StudyOutput out;
    switch (cfg.study) {
    case Study::FitA: out = detail::run_fit_a(cfg); break;
    case Study::QamCompare: out = detail::run_qam_compare(cfg); break;
    case Study::IterationStudy: out = detail::run_iteration_study(cfg); break;
    case Study::Mmimo: out = detail::run_mmimo(cfg); break;
    case Study::Repeatability: out = detail::run_repeatability(cfg); break;
    case Study::BandwidthSweep: out = detail::run_bandwidth_sweep(cfg); break;
    }

    nlohmann::json summary = out.summary;
    summary["study"] = study_name(cfg.study);
    summary["seed"] = cfg.seed;
    summary["config"] = config_to_json(cfg);

    std::filesystem::create_directories(cfg.out_dir);
    const auto dir = std::filesystem::path(cfg.out_dir);
    for (const auto& [name, content] : out.files) write_file((dir / name).string(), content);
    write_file((dir / (std::string(study_name(cfg.study)) + "-summary.json")).string(),
               summary.dump(2) + "\n");
    write_file((dir / (std::string(study_name(cfg.study)) + "-config.json")).string(),
               config_to_json(cfg).dump(2) + "\n");
    return 0;
}

} // namespace evmsinr
