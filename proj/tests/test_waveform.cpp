// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "evmsinr/waveform.hpp"

using namespace evmsinr;

namespace {

double payload_correlation(const SymbolGrid& a, const SymbolGrid& b) {
    cxd acc{0.0, 0.0};
    double pa = 0.0, pb = 0.0;
    for (size_t i = 0; i < a.symbols.size(); ++i) {
        acc += a.symbols.data[i] * std::conj(b.symbols.data[i]);
        pa += std::norm(a.symbols.data[i]);
        pb += std::norm(b.symbols.data[i]);
    }
    return std::abs(acc) / std::sqrt(pa * pb);
}

} // namespace

TEST_CASE("mix hits the SINR target within 0.05 dB at 24000 symbols") {
    const auto c = build_constellation(64);
    RngStream rng(11);
    for (double target : {0.0, 9.586, 15.0}) {
        RngStream r = rng.sub(static_cast<uint64_t>(target * 10));
        const auto wanted = random_payload(c, 1200, 20, r.sub(0));
        std::vector<SymbolGrid> ints{random_payload(c, 1200, 20, r.sub(1))};
        MixSpec spec{target, 20.0, 1};
        RngStream noise = r.sub(2);
        const auto out = mix(wanted, ints, spec, noise);
        CHECK_THAT(out.realized_sinr_db(), Catch::Matchers::WithinAbs(target, 0.05));
    }
}

TEST_CASE("mix power budget matches the documented example") {
    // interferer at power 0.1 plus sigma^2 = 0.01 against unit signal: 9.59 dB
    const double target_db = lin_to_db(1.0 / 0.11);
    const auto c = build_constellation(64);
    RngStream rng(3);
    const auto wanted = random_payload(c, 600, 20, rng.sub(0));
    std::vector<SymbolGrid> ints{random_payload(c, 600, 20, rng.sub(1))};
    MixSpec spec{target_db, 20.0, 1};
    RngStream noise = rng.sub(2);
    const auto out = mix(wanted, ints, spec, noise);
    CHECK_THAT(out.interferer_scale * out.interferer_scale,
               Catch::Matchers::WithinAbs(0.1, 1e-12));
    CHECK_THAT(out.noise_var, Catch::Matchers::WithinAbs(0.01, 1e-15));
    CHECK_THAT(target_db, Catch::Matchers::WithinAbs(9.5861, 1e-3));
}

TEST_CASE("zero interferers at snr == sinr is pure AWGN") {
    const auto c = build_constellation(4);
    RngStream rng(4);
    const auto wanted = random_payload(c, 500, 20, rng.sub(0));
    MixSpec spec{20.0, 20.0, 0};
    RngStream noise = rng.sub(1);
    const auto out = mix(wanted, {}, spec, noise);
    CHECK(out.interference_power == 0.0);
    CHECK_THAT(out.noise_power, Catch::Matchers::WithinAbs(0.01, 0.001));
}

TEST_CASE("infeasible mixes are rejected") {
    const auto c = build_constellation(4);
    RngStream rng(5);
    const auto wanted = random_payload(c, 10, 4, rng.sub(0));
    std::vector<SymbolGrid> one{random_payload(c, 10, 4, rng.sub(1))};

    MixSpec above{25.0, 20.0, 1}; // interference power would be negative
    CHECK_THROWS_AS(mix(wanted, one, above, rng), infeasible_spec);

    MixSpec no_int{10.0, 20.0, 0}; // cannot reach 10 dB with noise alone
    CHECK_THROWS_AS(mix(wanted, {}, no_int, rng), infeasible_spec);

    MixSpec spec{10.0, 20.0, 2};
    CHECK_THROWS_AS(mix(wanted, one, spec, rng), std::invalid_argument);

    std::vector<SymbolGrid> wrong{random_payload(c, 9, 4, rng.sub(2))};
    MixSpec spec1{10.0, 20.0, 1};
    CHECK_THROWS_AS(mix(wanted, wrong, spec1, rng), std::invalid_argument);
}

TEST_CASE("independent payload streams decorrelate below 2% at 24000 symbols") {
    const auto c = build_constellation(64);
    RngStream rng(21);
    const auto wanted = random_payload(c, 1200, 20, rng.sub(0));
    const auto intf = random_payload(c, 1200, 20, rng.sub(1));
    CHECK(payload_correlation(wanted, intf) < 0.02);

    // distinct substreams stay uncorrelated with each other as well
    const auto intf2 = random_payload(c, 1200, 20, rng.sub(2));
    CHECK(payload_correlation(intf, intf2) < 0.02);
}

TEST_CASE("realized power split between interferers is even") {
    const auto c = build_constellation(16);
    RngStream rng(31);
    const auto wanted = random_payload(c, 1200, 20, rng.sub(0));
    std::vector<SymbolGrid> ints;
    for (int k = 0; k < 3; ++k) ints.push_back(random_payload(c, 1200, 20, rng.sub(1 + k)));
    MixSpec spec{0.0, 20.0, 3};
    RngStream noise = rng.sub(9);
    const auto out = mix(wanted, ints, spec, noise);
    const double per_int = out.interferer_scale * out.interferer_scale;
    CHECK_THAT(per_int, Catch::Matchers::WithinAbs((1.0 - 0.01) / 3.0, 1e-12));
    CHECK_THAT(out.realized_sinr_db(), Catch::Matchers::WithinAbs(0.0, 0.08));
}
