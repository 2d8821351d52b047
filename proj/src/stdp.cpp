#include "memsim/stdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memsim {

void StdpProbe::validate() const {
    pre_wave.validate();
    post_wave.validate();
    double shortest = std::min(pre_wave.min_segment_s(), post_wave.min_segment_s());
    if (!(dt_int_s > 0.0) || dt_int_s > shortest / 10.0)
        throw std::invalid_argument(
            "stdp: dt_int_s must be > 0 and at most a tenth of the shortest waveform segment");
    if (delta_t_grid_s.empty()) throw std::invalid_argument("stdp: empty delta_t grid");
}

std::vector<double> StdpProbe::make_grid(double half_span_s, double step_s) {
    if (!(step_s > 0.0) || !(half_span_s >= 0.0))
        throw std::invalid_argument("stdp: bad grid spec");
    std::vector<double> g;
    auto n = static_cast<long long>(std::llround(half_span_s / step_s));
    for (long long k = -n; k <= n; ++k) g.push_back(static_cast<double>(k) * step_s);
    return g;
}

StdpProbe StdpProbe::defaults() {
    StdpProbe p;
    p.pre_wave = SpikeWaveform::default_biphasic();
    p.post_wave = SpikeWaveform::default_biphasic();
    p.dt_int_s = 5e-9;
    p.delta_t_grid_s = make_grid(25e-6, 0.5e-6);
    return p;
}

double pair_voltage(const SpikeWaveform& pre, const SpikeWaveform& post, double delta_t_s,
                    double t_s) {
    return post.value(t_s - delta_t_s) - pre.value(t_s);
}

WeightUpdateResult weight_update(const MemristorState& s, const MemristorParams& p,
                                 const SpikeWaveform& pre, const SpikeWaveform& post,
                                 double delta_t_s, double dt_int_s) {
    if (!(dt_int_s > 0.0)) throw std::invalid_argument("weight_update: dt_int must be > 0");
    double w0 = std::min(0.0, delta_t_s);
    double w1 = std::max(pre.duration_s(), delta_t_s + post.duration_s());
    auto n = static_cast<long long>(std::ceil((w1 - w0) / dt_int_s));
    double dt = (w1 - w0) / static_cast<double>(n);
    MemristorState st = s;
    for (long long k = 0; k < n; ++k) {
        double t = w0 + (static_cast<double>(k) + 0.5) * dt;
        st = step(st, p, pair_voltage(pre, post, delta_t_s, t), dt);
    }
    return WeightUpdateResult{st, st.g_S - s.g_S};
}

std::vector<XiPoint> stdp_curve(const StdpProbe& probe, const MemristorParams& p,
                                double g_init_S) {
    probe.validate();
    if (!(g_init_S >= p.g_min_S && g_init_S <= p.g_max_S))
        throw std::invalid_argument("stdp_curve: g_init outside device bounds");
    std::vector<XiPoint> curve;
    curve.reserve(probe.delta_t_grid_s.size());
    for (double dT : probe.delta_t_grid_s) {
        auto r = weight_update(MemristorState{g_init_S}, p, probe.pre_wave, probe.post_wave, dT,
                               probe.dt_int_s);
        curve.push_back(XiPoint{dT, r.delta_g_S});
    }
    return curve;
}

} // namespace memsim
