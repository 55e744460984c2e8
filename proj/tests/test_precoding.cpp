// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "evmsinr/precoding.hpp"

using namespace evmsinr;

namespace {

CMat random_channel(int users, int tx, RngStream& rng) {
    CMat h(users, tx);
    for (int u = 0; u < users; ++u)
        for (int x = 0; x < tx; ++x) h(u, x) = rng.cgaussian(1.0);
    return h;
}

double leakage_db(const CMat& hw) {
    double max_off = 0.0, min_diag = 1e300;
    for (int u = 0; u < hw.rows(); ++u)
        for (int v = 0; v < hw.cols(); ++v) {
            const double m = std::abs(hw(u, v));
            if (u == v)
                min_diag = std::min(min_diag, m);
            else
                max_off = std::max(max_off, m);
        }
    return 20.0 * std::log10(max_off / min_diag);
}

} // namespace

TEST_CASE("single user ZF is the matched direction") {
    RngStream rng(1);
    const CMat h = random_channel(1, 8, rng);
    const auto w = zero_forcing(h);
    const Eigen::VectorXcd mrt = h.row(0).adjoint() / h.row(0).norm();
    for (int x = 0; x < 8; ++x)
        CHECK_THAT(std::abs(w.at(x, 0) - mrt(x)), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("identity channel gives the identity precoder") {
    const auto w = zero_forcing(CMat::Identity(3, 3));
    for (int x = 0; x < 3; ++x)
        for (int u = 0; u < 3; ++u)
            CHECK_THAT(std::abs(w.at(x, u) - (x == u ? 1.0 : 0.0)),
                       Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("ZF nulls inter-user gains on random 32x3 channels") {
    RngStream rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        RngStream r = rng.sub(trial);
        const CMat h = random_channel(3, 32, r);
        const auto w = zero_forcing(h);
        for (int u = 0; u < 3; ++u) {
            double nrm = 0.0;
            for (int x = 0; x < 32; ++x) nrm += std::norm(w.at(x, u));
            CHECK_THAT(nrm, Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
        CHECK(leakage_db(effective_gains(h, w)) < -200.0);
    }
}

TEST_CASE("ZF direction is scale free") {
    RngStream rng(3);
    const CMat h = random_channel(3, 16, rng);
    const auto w1 = zero_forcing(h);
    const auto w2 = zero_forcing(CMat(2.5 * h));
    for (size_t i = 0; i < w1.weights.size(); ++i)
        CHECK_THAT(std::abs(w1.weights[i] - w2.weights[i]),
                   Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("rank-deficient channels are refused") {
    RngStream rng(4);
    CMat h = random_channel(3, 16, rng);
    h.row(2) = h.row(1); // two co-located users, exactly
    CHECK_THROWS_AS(zero_forcing(h), ill_conditioned_channel);
    CHECK_THROWS_AS(zero_forcing(random_channel(4, 3, rng)), std::invalid_argument);
}

namespace {

// ZF per carrier from the CSI block of an evolved flat response.
std::vector<PrecoderMatrix> precoders_at(const ChannelResponse& h, int csi_block) {
    std::vector<PrecoderMatrix> w(h.carriers);
    for (int c = 0; c < h.carriers; ++c) {
        CMat hm(h.nrx, h.ntx);
        for (int u = 0; u < h.nrx; ++u)
            for (int x = 0; x < h.ntx; ++x) hm(u, x) = h.at(csi_block, c, x, u);
        w[c] = zero_forcing(hm);
    }
    return w;
}

double mean_leakage_power(const EffectiveChannel& eff) {
    double leak = 0.0;
    int n = 0;
    for (int c = 0; c < eff.carriers; ++c)
        for (int u = 0; u < eff.nusers; ++u)
            for (int v = 0; v < eff.nusers; ++v)
                if (u != v) {
                    leak += std::norm(eff.at(c, u, v));
                    ++n;
                }
    return leak / n;
}

} // namespace

TEST_CASE("effective channel: exact nulls at the CSI block, frozen when static") {
    RngStream rng(5);
    const auto h0 = flat_rayleigh(32, 3, rng);
    const auto still = evolve(h0, {0.0, 0.03656}, 4, rng);
    const auto w = precoders_at(still, 0);
    const auto at0 = effective_channel(still, w, 0, 0);
    const auto at3 = effective_channel(still, w, 0, 3);
    for (int u = 0; u < 3; ++u) {
        const double wanted = std::norm(at0.at(0, u, u));
        for (int v = 0; v < 3; ++v)
            if (v != u) {
                CHECK(10.0 * std::log10(std::norm(at0.at(0, u, v)) / wanted) < -100.0);
                CHECK(at3.at(0, u, v) == at0.at(0, u, v));
            }
    }
    CHECK_THROWS_AS(effective_channel(still, w, 0, 7), std::invalid_argument);
}

TEST_CASE("leakage grows with CSI age under Doppler") {
    RngStream rng(6);
    // slow fading so the AR-1 decay steps are well separated from MC noise
    const MobilityProfile mob{2.0, 0.03656};
    const int lags[] = {1, 2, 4};
    double mean_leak[3] = {0.0, 0.0, 0.0};
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        RngStream r = rng.sub(t);
        const auto h0 = flat_rayleigh(32, 3, r);
        RngStream er = r.sub(999);
        const auto trace = evolve(h0, mob, 5, er);
        const auto w = precoders_at(trace, 0);
        for (int li = 0; li < 3; ++li)
            mean_leak[li] += mean_leakage_power(effective_channel(trace, w, 0, lags[li]));
    }
    CHECK(mean_leak[0] < mean_leak[1]);
    CHECK(mean_leak[1] < mean_leak[2]);
}
