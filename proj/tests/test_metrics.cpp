// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "evmsinr/metrics.hpp"

using namespace evmsinr;

namespace {

// Q(x) through the complementary error function, the closed-form oracle for
// Gray-coded QPSK bit errors over AWGN.
double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

} // namespace

TEST_CASE("EVM is zero when received equals the reference") {
    const auto c = build_constellation(16);
    RngStream rng(1);
    const auto grid = random_payload(c, 100, 10, rng);
    for (auto mode : {EvmMode::DataAided, EvmMode::DecisionDirected})
        CHECK(rms_evm(grid.symbols, grid, c, mode).rms_percent == 0.0);
}

TEST_CASE("data-aided EVM over AWGN matches 100/sqrt(SNR)") {
    const auto c = build_constellation(64);
    RngStream rng(2);
    for (double snr_db : {0.0, 10.0, 20.0}) {
        RngStream r = rng.sub(static_cast<uint64_t>(snr_db));
        const auto grid = random_payload(c, 1200, 20, r.sub(0));
        CxMatrix rx = grid.symbols;
        const double s2 = db_to_lin(-snr_db);
        RngStream noise = r.sub(1);
        for (auto& v : rx.data) v += noise.cgaussian(s2);
        const double expected = 100.0 / std::sqrt(db_to_lin(snr_db));
        const auto evm = rms_evm(rx, grid, c, EvmMode::DataAided);
        CHECK_THAT(evm.rms_percent / expected, Catch::Matchers::WithinAbs(1.0, 0.02));
    }
}

TEST_CASE("decision-directed EVM never exceeds data-aided") {
    const auto c = build_constellation(64);
    RngStream rng(3);
    for (double sinr_db : {-5.0, 3.0, 10.0, 25.0}) {
        RngStream r = rng.sub(static_cast<uint64_t>(sinr_db + 10));
        const auto grid = random_payload(c, 300, 20, r.sub(0));
        CxMatrix rx = grid.symbols;
        RngStream noise = r.sub(1);
        for (auto& v : rx.data) v += noise.cgaussian(db_to_lin(-sinr_db));
        const double da = rms_evm(rx, grid, c, EvmMode::DataAided).rms_percent;
        const double dd = rms_evm(rx, grid, c, EvmMode::DecisionDirected).rms_percent;
        CHECK(dd <= da + 1e-12);
        if (sinr_db >= 25.0) CHECK_THAT(dd, Catch::Matchers::WithinRel(da, 1e-9));
    }
}

TEST_CASE("EVM rejects a zero-power reference") {
    const auto c = build_constellation(4);
    CxMatrix rx(2, 2);
    CxMatrix ref(2, 2); // all zeros
    CHECK_THROWS_AS(rms_evm(rx, ref, c, EvmMode::DataAided), degenerate_input);
}

TEST_CASE("BER: noiseless is zero, QPSK AWGN matches the Q-function oracle") {
    const auto c = build_constellation(4);
    RngStream rng(4);
    const auto grid = random_payload(c, 1200, 20, rng.sub(0));
    CHECK(ber(grid.symbols, grid.bits, c) == 0.0);

    // per-symbol SNR 10 dB; expected BER = Q(sqrt(10)) for Gray QPSK
    CxMatrix rx = grid.symbols;
    RngStream noise = rng.sub(1);
    for (auto& v : rx.data) v += noise.cgaussian(0.1);
    const double expected = q_func(std::sqrt(10.0));
    const double measured = ber(rx, grid.bits, c);
    const double n_bits = 2.0 * 24000.0;
    const double se = std::sqrt(expected * (1.0 - expected) / n_bits);
    CHECK_THAT(measured, Catch::Matchers::WithinAbs(expected, 3.0 * se));
}

TEST_CASE("BER approaches one half for unrelated symbols") {
    const auto c = build_constellation(64);
    RngStream rng(5);
    const auto grid = random_payload(c, 1200, 20, rng.sub(0));
    const auto other = random_payload(c, 1200, 20, rng.sub(1));
    CHECK_THAT(ber(other.symbols, grid.bits, c), Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("BER is invariant under a common phase rotation") {
    const auto c = build_constellation(16);
    RngStream rng(6);
    const auto grid = random_payload(c, 200, 10, rng.sub(0));
    CxMatrix rx = grid.symbols;
    RngStream noise = rng.sub(1);
    for (auto& v : rx.data) v += noise.cgaussian(0.15);
    const double base = ber(rx, grid.bits, c);

    const cxd rot = std::polar(1.0, 0.7);
    Constellation c_rot = c;
    for (auto& p : c_rot.points) p *= rot;
    CxMatrix rx_rot = rx;
    for (auto& v : rx_rot.data) v *= rot;
    CHECK(ber(rx_rot, grid.bits, c_rot) == base);
}

namespace {

// rows alternating +a, -a have sample mean 0 and sample variance a^2 F/(F-1);
// with F=2 the variance is exactly 2 a^2.
CxMatrix alternating_rows(const std::vector<double>& amplitudes) {
    CxMatrix m(static_cast<int>(amplitudes.size()), 2);
    for (size_t k = 0; k < amplitudes.size(); ++k) {
        m.at(static_cast<int>(k), 0) = {amplitudes[k], 0.0};
        m.at(static_cast<int>(k), 1) = {-amplitudes[k], 0.0};
    }
    return m;
}

} // namespace

TEST_CASE("signalled SINR follows the variance-then-average order") {
    // wanted variance 1 per carrier, two interferers at variance 1, sigma^2=1
    const double a1 = std::sqrt(0.5); // sample variance 2 a^2 = 1
    const auto w = alternating_rows({a1, a1});
    const auto i1 = alternating_rows({a1, a1});
    const auto i2 = alternating_rows({a1, a1});
    CHECK_THAT(sinr_signalled_db(w, {i1, i2}, 1.0),
               Catch::Matchers::WithinAbs(lin_to_db(1.0 / 3.0), 1e-12));

    // no interference, sigma^2 = 0.01
    CHECK_THAT(sinr_signalled_db(w, {}, 0.01), Catch::Matchers::WithinAbs(20.0, 1e-12));

    // carriers averaged before the ratio: {0.5, 1.5} over {0.1, 0.3} -> 6.99 dB
    const auto w2 = alternating_rows({std::sqrt(0.25), std::sqrt(0.75)});
    const auto i3 = alternating_rows({std::sqrt(0.05), std::sqrt(0.15)});
    CHECK_THAT(sinr_signalled_db(w2, {i3}, 0.0),
               Catch::Matchers::WithinAbs(lin_to_db(5.0), 1e-12));
}

TEST_CASE("signalled SINR degenerate and scaling behaviour") {
    const auto w = alternating_rows({1.0});
    CHECK_THROWS_AS(sinr_signalled_db(w, {}, 0.0), degenerate_input);

    const auto i1 = alternating_rows({0.4});
    const double base = sinr_signalled_db(w, {i1}, 0.3);
    auto w4 = w, i4 = i1;
    for (auto& v : w4.data) v *= 2.0;
    for (auto& v : i4.data) v *= 2.0;
    CHECK_THAT(sinr_signalled_db(w4, {i4}, 4.0 * 0.3),
               Catch::Matchers::WithinAbs(base, 1e-12));
}

TEST_CASE("seed-averaged EVM decreases strictly in SINR across the grid") {
    const auto c = build_constellation(64);
    RngStream rng(9);
    const int seeds = 50, carriers = 150, frames = 20;
    double prev = 1e300;
    for (int sinr_db = -5; sinr_db <= 20; ++sinr_db) {
        double acc = 0.0;
        for (int s = 0; s < seeds; ++s) {
            RngStream r = rng.sub(static_cast<uint64_t>(sinr_db + 5), s);
            const auto grid = random_payload(c, carriers, frames, r.sub(0));
            const auto intf = random_payload(c, carriers, frames, r.sub(1));
            MixSpec ms{static_cast<double>(sinr_db), 20.0, 1};
            RngStream noise = r.sub(2);
            const auto rx = mix(grid, {intf}, ms, noise);
            acc += rms_evm(rx.received, grid, c, EvmMode::DataAided).rms_percent;
        }
        const double mean_evm = acc / seeds;
        CHECK(mean_evm < prev);
        prev = mean_evm;
    }
}

TEST_CASE("prediction inverts the gradient law") {
    GradientModel m{107.0, 64, 1};
    CHECK_THAT(sinr_predict({107.0, EvmMode::DataAided, 0, 0}, m).sinr_db,
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(sinr_predict({10.7, EvmMode::DataAided, 0, 0}, m).sinr_db,
               Catch::Matchers::WithinAbs(20.0, 1e-12));

    RngStream rng(7);
    for (int i = 0; i < 200; ++i) {
        const double a = 50.0 + 100.0 * rng.uniform01();
        const double s = db_to_lin(-10.0 + 40.0 * rng.uniform01());
        const double evm = a / std::sqrt(s);
        const auto p = sinr_predict({evm, EvmMode::DataAided, 0, 0}, GradientModel{a, 64, 1});
        REQUIRE(p.finite);
        CHECK_THAT(p.sinr_db, Catch::Matchers::WithinAbs(lin_to_db(s), 1e-9));
    }

    const auto unbounded = sinr_predict({0.0, EvmMode::DataAided, 0, 0}, m);
    CHECK_FALSE(unbounded.finite);
    CHECK(std::isinf(unbounded.sinr_db));
}
