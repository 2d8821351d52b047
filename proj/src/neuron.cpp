#include "memsim/neuron.hpp"

#include "memsim/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace memsim {

void IfNeuronParams::validate() const {
    if (!(c_mem_F > 0.0)) throw std::invalid_argument("neuron: c_mem_F must be > 0");
    if (!(t_refr_s > 0.0)) throw std::invalid_argument("neuron: t_refr_s must be > 0");
    if (!(v_thresh_V > v_reset_V))
        throw std::invalid_argument("neuron: need v_thresh_V > v_reset_V");
    if (adapt_increment_A < 0.0)
        throw std::invalid_argument("neuron: adapt_increment_A must be >= 0");
    if (!(tau_adapt_s > 0.0)) throw std::invalid_argument("neuron: tau_adapt_s must be > 0");
}

IfNeuronParams IfNeuronParams::from_config(const Config& cfg, const std::string& section) {
    IfNeuronParams p;
    cfg.require_known_keys(section, {"c_mem_F", "i_leak_A", "v_thresh_V", "v_reset_V", "t_refr_s",
                                     "adapt_increment_A", "tau_adapt_s"});
    p.c_mem_F = cfg.get_double(section, "c_mem_F", p.c_mem_F);
    p.i_leak_A = cfg.get_double(section, "i_leak_A", p.i_leak_A);
    p.v_thresh_V = cfg.get_double(section, "v_thresh_V", p.v_thresh_V);
    p.v_reset_V = cfg.get_double(section, "v_reset_V", p.v_reset_V);
    p.t_refr_s = cfg.get_double(section, "t_refr_s", p.t_refr_s);
    p.adapt_increment_A = cfg.get_double(section, "adapt_increment_A", p.adapt_increment_A);
    p.tau_adapt_s = cfg.get_double(section, "tau_adapt_s", p.tau_adapt_s);
    p.validate();
    return p;
}

MembraneResult membrane_step(const IfNeuronState& s, const IfNeuronParams& p, double i_in_A,
                             double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("membrane_step: dt must be > 0");
    MembraneResult out;
    out.state = s;
    out.state.i_adapt_A = s.i_adapt_A * std::exp(-dt_s / p.tau_adapt_s);
    if (s.refr_left_s > 0.0) {
        out.state.refr_left_s = std::max(0.0, s.refr_left_s - dt_s);
        out.state.v_V = p.v_reset_V;
        return out;
    }
    double v = s.v_V + dt_s * (i_in_A - p.i_leak_A - s.i_adapt_A) / p.c_mem_F;
    if (v >= p.v_thresh_V) {
        out.spiked = true;
        out.state.v_V = p.v_reset_V;
        out.state.refr_left_s = p.t_refr_s;
        out.state.i_adapt_A += p.adapt_increment_A;
    } else {
        out.state.v_V = v;
    }
    return out;
}

void SpikeWaveform::validate() const {
    if (breakpoints.empty()) throw std::invalid_argument("waveform: needs breakpoints");
    if (breakpoints.front().first != 0.0)
        throw std::invalid_argument("waveform: first breakpoint must be at offset 0");
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        if (!(breakpoints[k].first > breakpoints[k - 1].first))
            throw std::invalid_argument("waveform: offsets must be strictly increasing");
    if (breakpoints.back().second != v_rest_V)
        throw std::invalid_argument("waveform: must return to v_rest_V at the final breakpoint");
}

double SpikeWaveform::value(double t_since_spike_s) const {
    double t = t_since_spike_s;
    if (t < 0.0 || t > breakpoints.back().first) return v_rest_V;
    // find the segment [k, k+1] with t inside it
    std::size_t lo = 0, hi = breakpoints.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (breakpoints[mid].first <= t)
            lo = mid;
        else
            hi = mid;
    }
    auto [t0, v0] = breakpoints[lo];
    if (t == t0 || breakpoints.size() == 1) return v0;
    auto [t1, v1] = breakpoints[lo + 1];
    if (t == t1) return v1;
    return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
}

double SpikeWaveform::max_abs_V() const {
    double m = std::abs(v_rest_V);
    for (const auto& [t, v] : breakpoints) m = std::max(m, std::abs(v));
    return m;
}

double SpikeWaveform::min_segment_s() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < breakpoints.size(); ++k)
        m = std::min(m, breakpoints[k].first - breakpoints[k - 1].first);
    return m;
}

SpikeWaveform SpikeWaveform::default_biphasic() {
    SpikeWaveform w;
    w.breakpoints = {{0.0, 1.2}, {1.0e-6, 1.2}, {1.2e-6, -0.6}, {1.12e-5, 0.0}};
    w.v_rest_V = 0.0;
    return w;
}

SpikeWaveform SpikeWaveform::from_config(const Config& cfg, const std::string& section) {
    if (!cfg.has_section(section)) return default_biphasic();
    cfg.require_known_keys(section, {"breakpoints", "v_rest_V"});
    SpikeWaveform w = default_biphasic();
    w.v_rest_V = cfg.get_double(section, "v_rest_V", 0.0);
    std::string bp = cfg.get_string(section, "breakpoints", "");
    if (!bp.empty()) {
        w.breakpoints.clear();
        for (const std::string& pair : split_list(bp, ',')) {
            auto colon = pair.find(':');
            if (colon == std::string::npos)
                throw ConfigError("key 'breakpoints' in [" + section +
                                  "]: expected 't_offset_s:v_V' pairs, got '" + pair + "'");
            double t, v;
            if (!parse_double(pair.substr(0, colon), t) || !parse_double(pair.substr(colon + 1), v))
                throw ConfigError("key 'breakpoints' in [" + section + "]: bad number in '" + pair +
                                  "'");
            w.breakpoints.emplace_back(t, v);
        }
    }
    w.validate();
    return w;
}

double waveform_voltage(const SpikeWaveform& w, double t_since_spike_s) {
    return w.value(t_since_spike_s);
}

} // namespace memsim
