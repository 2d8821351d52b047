#include <doctest.h>

#include "memsim/stdp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace memsim;

namespace {

SpikeWaveform negated(const SpikeWaveform& w) {
    SpikeWaveform out = w;
    for (auto& [t, v] : out.breakpoints) v = -v;
    out.v_rest_V = -w.v_rest_V;
    return out;
}

// Reference drift integral computed directly from the device law at a step
// 100x finer than the probe uses, without going through the update routine.
double xi_reference(const SpikeWaveform& pre, const SpikeWaveform& post, double delta_t,
                    const MemristorParams& p, double g0, double h) {
    double w0 = std::min(0.0, delta_t);
    double w1 = std::max(pre.duration_s(), delta_t + post.duration_s());
    auto n = static_cast<long long>(std::ceil((w1 - w0) / h));
    double dt = (w1 - w0) / static_cast<double>(n);
    double g = g0;
    for (long long k = 0; k < n; ++k) {
        double t = w0 + (static_cast<double>(k) + 0.5) * dt;
        double v = post.value(t - delta_t) - pre.value(t);
        if (v > p.v_set_V)
            g += p.k_set_SpVs * (v - p.v_set_V) * dt;
        else if (v < p.v_reset_V)
            g += p.k_reset_SpVs * (v - p.v_reset_V) * dt;
        g = std::clamp(g, p.g_min_S, p.g_max_S);
    }
    return g - g0;
}

} // namespace

TEST_CASE("pair voltage is the lagged difference of the two templates") {
    auto w = SpikeWaveform::default_biphasic();
    CHECK(pair_voltage(w, w, 0.0, 0.5e-6) == 0.0);
    CHECK(pair_voltage(w, w, 0.0, 5e-6) == 0.0);
    double dT = 2e-6;
    double t = 2e-6;
    CHECK(pair_voltage(w, w, dT, t) == w.value(t - dT) - w.value(t));
    CHECK(pair_voltage(w, w, dT, t) == doctest::Approx(1.752));
    // Both templates at rest: zero.
    CHECK(pair_voltage(w, w, 0.0, 5e-3) == 0.0);
}

TEST_CASE("coincident identical spikes cancel and move nothing") {
    MemristorParams p;
    auto w = SpikeWaveform::default_biphasic();
    auto r = weight_update(MemristorState{p.g_mid_S()}, p, w, w, 0.0, 5e-9);
    CHECK(r.delta_g_S == 0.0);
    CHECK(r.state.g_S == p.g_mid_S());
}

TEST_CASE("a lone template stays below threshold, so distant pairs move nothing") {
    MemristorParams p;
    auto w = SpikeWaveform::default_biphasic();
    REQUIRE(w.max_abs_V() < p.v_set_V);
    for (double dT : {12e-6, 15e-6, 25e-6, -12e-6, -20e-6}) {
        auto r = weight_update(MemristorState{p.g_mid_S()}, p, w, w, dT, 5e-9);
        CHECK(r.delta_g_S == 0.0);
    }
}

TEST_CASE("causal order potentiates, anticausal order depresses") {
    MemristorParams p;
    auto w = SpikeWaveform::default_biphasic();
    auto pot = weight_update(MemristorState{p.g_mid_S()}, p, w, w, 2e-6, 5e-9);
    CHECK(pot.delta_g_S > 0.0);
    auto dep = weight_update(MemristorState{p.g_mid_S()}, p, w, w, -2e-6, 5e-9);
    CHECK(dep.delta_g_S < 0.0);
    CHECK(pot.state.g_S == p.g_mid_S() + pot.delta_g_S);
}

TEST_CASE("updates respect the conductance bounds") {
    MemristorParams p;
    auto w = SpikeWaveform::default_biphasic();
    auto from_top = weight_update(MemristorState{p.g_max_S}, p, w, w, 2e-6, 5e-9);
    CHECK(from_top.delta_g_S == 0.0);  // potentiation clamps at the ceiling
    auto from_bottom = weight_update(MemristorState{p.g_min_S}, p, w, w, -2e-6, 5e-9);
    CHECK(from_bottom.delta_g_S == 0.0);
    auto down_from_top = weight_update(MemristorState{p.g_max_S}, p, w, w, -2e-6, 5e-9);
    CHECK(down_from_top.delta_g_S < 0.0);
    CHECK(down_from_top.state.g_S >= p.g_min_S);
}

TEST_CASE("probe validation and grid construction") {
    auto probe = StdpProbe::defaults();
    CHECK_NOTHROW(probe.validate());
    REQUIRE(probe.delta_t_grid_s.size() == 101);
    CHECK(probe.delta_t_grid_s.front() == -50.0 * 0.5e-6);  // k * step, k = -50
    CHECK(probe.delta_t_grid_s.back() == 50.0 * 0.5e-6);
    CHECK(probe.delta_t_grid_s[50] == 0.0);

    auto bad = probe;
    bad.dt_int_s = 3e-8;  // more than a tenth of the 0.2 us downstroke
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = probe;
    bad.delta_t_grid_s.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(StdpProbe::make_grid(1e-6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StdpProbe::make_grid(-1e-6, 1e-7), std::invalid_argument);
    auto lone = StdpProbe::make_grid(0.0, 1e-6);
    REQUIRE(lone.size() == 1);
    CHECK(lone[0] == 0.0);
}

TEST_CASE("curve is biphasic with a single sign change and quiet wings") {
    MemristorParams p;
    auto probe = StdpProbe::defaults();
    auto curve = stdp_curve(probe, p, p.g_mid_S());
    REQUIRE(curve.size() == 101);
    CHECK(curve.front().xi_S == 0.0);
    CHECK(curve.back().xi_S == 0.0);
    double xi_max = 0.0, xi_min = 0.0;
    int sign_changes = 0;
    int prev_sign = 0;
    for (const auto& pt : curve) {
        xi_max = std::max(xi_max, pt.xi_S);
        xi_min = std::min(xi_min, pt.xi_S);
        int sign = pt.xi_S > 0.0 ? 1 : (pt.xi_S < 0.0 ? -1 : 0);
        if (sign != 0) {
            if (prev_sign != 0 && sign != prev_sign) ++sign_changes;
            prev_sign = sign;
        }
    }
    CHECK(xi_max > 0.0);
    CHECK(xi_min < 0.0);
    CHECK(sign_changes == 1);
    // Depression lives at negative lags, potentiation at positive lags.
    CHECK(curve[46].xi_S < 0.0);  // -2 us
    CHECK(curve[54].xi_S > 0.0);  // +2 us
    CHECK_THROWS_AS(stdp_curve(probe, p, 0.5 * p.g_min_S), std::invalid_argument);
}

TEST_CASE("swapping and negating the templates mirrors the curve in the lag") {
    MemristorParams p;
    auto probe = StdpProbe::defaults();
    auto mirrored = probe;
    mirrored.pre_wave = negated(probe.post_wave);
    mirrored.post_wave = negated(probe.pre_wave);
    CHECK_NOTHROW(mirrored.validate());
    auto base = stdp_curve(probe, p, p.g_mid_S());
    auto mirr = stdp_curve(mirrored, p, p.g_mid_S());
    REQUIRE(base.size() == mirr.size());
    double scale = 0.0;
    for (const auto& pt : base) scale = std::max(scale, std::abs(pt.xi_S));
    REQUIRE(scale > 0.0);
    const std::size_t n = base.size();
    for (std::size_t k = 0; k < n; ++k) {
        // mirr at lag dT must match base at lag -dT
        CHECK(mirr[k].delta_t_s == -base[n - 1 - k].delta_t_s);
        CHECK(std::abs(mirr[k].xi_S - base[n - 1 - k].xi_S) <= 1e-9 * scale);
    }
}

TEST_CASE("update matches a hundredfold finer independent integration") {
    MemristorParams p;
    auto w = SpikeWaveform::default_biphasic();
    double g0 = p.g_mid_S();
    for (double dT : {-6e-6, -2e-6, 2e-6, 6e-6}) {
        auto got = weight_update(MemristorState{g0}, p, w, w, dT, 5e-9);
        double want = xi_reference(w, w, dT, p, g0, 5e-11);
        CHECK(std::abs(got.delta_g_S - want) <= 0.01 * std::abs(want));
    }
}
