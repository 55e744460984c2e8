// SPDX-License-Identifier: Apache-2.0
//
// evmsinr: link-level simulation and EVM-based SINR prediction for
// massive-MIMO OFDM downlinks
//
// Batch front end: one subcommand per study, flags override config-file
// values, outputs one CSV per study plus a JSON summary.

#include <CLI11.hpp>
#include <iostream>

#include "evmsinr/runner.hpp"

namespace {

struct Flags {
    std::string config_path;
    nlohmann::json overrides = nlohmann::json::object();
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
    auto opt = [&f, cmd](const char* flag, const char* key, const char* help) {
        cmd->add_option_function<std::string>(
            flag,
            [&f, key](const std::string& v) {
                // numbers stay numbers so type checks still apply
                try {
                    f.overrides[key] = nlohmann::json::parse(v);
                } catch (const nlohmann::json::exception&) {
                    f.overrides[key] = v;
                }
            },
            help);
    };
    opt("--seed", "seed", "master seed (64-bit)");
    opt("--out", "out_dir", "output directory (default: EVMSINR_OUT or cwd)");
    opt("--threads", "threads", "worker threads (0 = hardware)");
    opt("--qam-order", "qam_order", "QAM order");
    opt("--interferers", "n_interferers", "number of interferers (0..3)");
    opt("--carriers", "carriers", "carriers per EVM estimate");
    opt("--frames", "frames", "frames per block");
    opt("--seeds", "seeds", "averaging seeds per grid point");
    opt("--snr-db", "snr_db", "receiver SNR in dB");
    opt("--evm-mode", "evm_mode", "data-aided | decision-directed");
    opt("--scenario", "scenario", "stationary | moving");
    opt("--blocks", "blocks", "time blocks");
    opt("--n-tx", "n_tx", "transmit antennas");
    opt("--n-users", "n_users", "users");
    opt("--band-hz", "band_hz", "evaluated band in Hz");
    opt("--sub-band-hz", "sub_band_hz", "sub-band width in Hz");
    opt("--rms-delay-spread-s", "rms_delay_spread_s", "channel RMS delay spread in s");
    opt("--kappa", "colocation_kappa", "stationary co-location mixing fraction");
    opt("--a-value", "a_value", "gradient A used for prediction");
    opt("--trials", "trials", "trials per grid point (iteration study)");
    opt("--flat-channel", "flat_channel", "true for the single-tap control channel");
    opt("--doppler-hz", "doppler_hz", "Doppler frequency for the moving scenario");
    opt("--floor-db", "analysis_floor_db", "SINR_S analysis floor for sweep statistics");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evmsinr: OFDM link simulation and EVM-based SINR prediction studies"};
    app.require_subcommand(1);

    const std::map<std::string, std::string> descriptions{
        {"fit-a", "fit the gradient A of EVM% = A/sqrt(SINR) on the flat channel"},
        {"qam-compare", "gradient table across QAM orders and interferer counts"},
        {"iteration-study", "prediction error vs frames per EVM estimate"},
        {"mmimo", "multi-user ZF downlink: signalled vs predicted SINR mesh"},
        {"repeatability", "signalling variance spread over repeated blocks"},
        {"bandwidth-sweep", "prediction error statistics vs sub-band width"}};

    std::map<std::string, Flags> flags;
    for (const auto& [name, desc] : descriptions) {
        auto* cmd = app.add_subcommand(name, desc);
        add_common_flags(cmd, flags[name]);
    }

    CLI11_PARSE(app, argc, argv);

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        Flags& f = flags[name];
        f.overrides["study"] = name;
        evmsinr::RunConfig cfg = evmsinr::parse_config(f.config_path, f.overrides);
        return evmsinr::run_study(cfg);
    } catch (const std::exception& e) {
        std::cerr << "evmsinr " << name << ": " << e.what() << "\n";
        return 1;
    }
}
