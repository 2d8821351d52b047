#include "memsim/dpi.hpp"

#include "memsim/kernels/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace memsim {

void DpiParams::validate() const {
    if (!(C_F > 0.0) || !(U_T_V > 0.0) || !(t_pulse_s > 0.0))
        throw std::invalid_argument("dpi: C_F, U_T_V, t_pulse_s must be > 0");
    if (!(kappa > 0.0) || kappa > 1.0)
        throw std::invalid_argument("dpi: kappa must be in (0, 1]");
    if (!(I_tau_A > 0.0) || !(I_th_A > 0.0) || !(I_w_A > 0.0))
        throw std::invalid_argument("dpi: bias currents must be > 0");
}

DpiParams DpiParams::from_config(const Config& cfg, const std::string& section) {
    DpiParams p;
    cfg.require_known_keys(section,
                           {"C_F", "U_T_V", "kappa", "I_tau_A", "I_th_A", "I_w_A", "t_pulse_s"});
    p.C_F = cfg.get_double(section, "C_F", p.C_F);
    p.U_T_V = cfg.get_double(section, "U_T_V", p.U_T_V);
    p.kappa = cfg.get_double(section, "kappa", p.kappa);
    p.I_tau_A = cfg.get_double(section, "I_tau_A", p.I_tau_A);
    p.I_th_A = cfg.get_double(section, "I_th_A", p.I_th_A);
    p.I_w_A = cfg.get_double(section, "I_w_A", p.I_w_A);
    p.t_pulse_s = cfg.get_double(section, "t_pulse_s", p.t_pulse_s);
    p.validate();
    return p;
}

double time_constant(const DpiParams& p) { return p.tau_s(); }

DpiState decay(const DpiState& s, const DpiParams& p, double dt_s) {
    if (dt_s < 0.0) throw std::invalid_argument("decay: dt must be >= 0");
    if (dt_s == 0.0) return s;
    return DpiState{s.i_syn_A * std::exp(-dt_s / p.tau_s()), s.t_s + dt_s};
}

DpiState on_spike(const DpiState& s, const DpiParams& p, double g_scale) {
    if (!(g_scale >= 0.0 && g_scale <= 1.0))
        throw std::invalid_argument("on_spike: g_scale must be in [0, 1]");
    double i_ss = p.i_steady_A(g_scale);
    double i = i_ss + (s.i_syn_A - i_ss) * std::exp(-p.t_pulse_s / p.tau_s());
    return DpiState{i, s.t_s + p.t_pulse_s};
}

std::vector<TracePoint> epsc_trace(const DpiParams& p, const std::vector<double>& spike_times_s,
                                   double horizon_s, double sample_dt_s, double g_scale) {
    if (!(horizon_s > 0.0)) throw std::invalid_argument("epsc_trace: horizon must be > 0");
    if (!(sample_dt_s > 0.0)) throw std::invalid_argument("epsc_trace: sample_dt must be > 0");
    DpiEventTrace trace(p);
    for (std::size_t k = 0; k < spike_times_s.size(); ++k) {
        double t = spike_times_s[k];
        if (k > 0 && t < spike_times_s[k - 1])
            throw std::invalid_argument("epsc_trace: spike times must be sorted");
        if (t < 0.0 || t > horizon_s)
            throw std::invalid_argument("epsc_trace: spike time outside [0, horizon]");
        trace.add_spike(t, g_scale);
    }
    auto n = static_cast<std::size_t>(std::floor(horizon_s / sample_dt_s)) + 1;
    return trace.sample_points(0.0, sample_dt_s, n);
}

DpiEventTrace::DpiEventTrace(const DpiParams& p, double i0_A, double t0_s)
    : p_(p), tau_(p.tau_s()), drive_end_(t0_s), last_input_(t0_s) {
    p_.validate();
    if (i0_A < 0.0) throw std::invalid_argument("DpiEventTrace: initial current must be >= 0");
    segs_.push_back(Segment{t0_s, i0_A, 0.0});
}

void DpiEventTrace::push_segment(double t0, double i0, double target) {
    segs_.push_back(Segment{t0, i0, target});
}

void DpiEventTrace::add_spike(double t_s, double g_scale) {
    if (!(g_scale >= 0.0 && g_scale <= 1.0))
        throw std::invalid_argument("add_spike: g_scale must be in [0, 1]");
    if (t_s < last_input_)
        throw std::invalid_argument("add_spike: spikes must arrive in time order");
    double i_t;
    if (t_s < drive_end_ && segs_.size() >= 2) {
        // Spike lands inside the open drive window: drop the pending closing
        // segment and restart the window from the value reached so far.
        segs_.pop_back();
        const Segment& sg = segs_.back();
        i_t = sg.target + (sg.i0 - sg.target) * std::exp(-(t_s - sg.t0) / tau_);
    } else {
        i_t = value_at(t_s);
    }
    double i_ss = p_.i_steady_A(g_scale);
    push_segment(t_s, i_t, i_ss);
    double i_end = i_ss + (i_t - i_ss) * std::exp(-p_.t_pulse_s / tau_);
    push_segment(t_s + p_.t_pulse_s, i_end, 0.0);
    drive_end_ = t_s + p_.t_pulse_s;
    last_input_ = t_s;
}

std::size_t DpiEventTrace::segment_for(double t_s) const {
    if (t_s < segs_.front().t0)
        throw std::invalid_argument("DpiEventTrace: time precedes trace start");
    std::size_t lo = 0, hi = segs_.size();
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (segs_[mid].t0 <= t_s)
            lo = mid;
        else
            hi = mid;
    }
    // Equal start times can occur when a window restarts in place; the later
    // segment supersedes, and the search above already lands on it.
    return lo;
}

double DpiEventTrace::value_at(double t_s) const {
    const Segment& sg = segs_[segment_for(t_s)];
    return sg.target + (sg.i0 - sg.target) * std::exp(-(t_s - sg.t0) / tau_);
}

void DpiEventTrace::sample(double t_begin_s, double dt_s, std::size_t n, double* out) const {
    if (n == 0) return;
    if (!(dt_s > 0.0)) throw std::invalid_argument("sample: dt must be > 0");
    const auto& K = kernels::active();
    double r = std::exp(-dt_s / tau_);
    std::size_t si = segment_for(t_begin_s);
    std::size_t k = 0;
    while (k < n) {
        double t_k = t_begin_s + static_cast<double>(k) * dt_s;
        while (si + 1 < segs_.size() && segs_[si + 1].t0 <= t_k) ++si;
        const Segment& sg = segs_[si];
        std::size_t hi = n;
        if (si + 1 < segs_.size()) {
            double next_t0 = segs_[si + 1].t0;
            double est = std::ceil((next_t0 - t_begin_s) / dt_s);
            hi = est <= static_cast<double>(k) ? k + 1
                                               : std::min<double>(est, static_cast<double>(n));
            while (hi > k + 1 && t_begin_s + static_cast<double>(hi - 1) * dt_s >= next_t0) --hi;
            while (hi < n && t_begin_s + static_cast<double>(hi) * dt_s < next_t0) ++hi;
        }
        double d_k = (sg.i0 - sg.target) * std::exp(-(t_k - sg.t0) / tau_);
        out[k] = sg.target + d_k;
        if (hi > k + 1) K.exp_approach(out + k + 1, hi - k - 1, sg.target, d_k, r);
        k = hi;
    }
}

std::vector<TracePoint> DpiEventTrace::sample_points(double t_begin_s, double dt_s,
                                                     std::size_t n) const {
    std::vector<double> vals(n);
    sample(t_begin_s, dt_s, n, vals.data());
    std::vector<TracePoint> pts;
    pts.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        pts.push_back(TracePoint{t_begin_s + static_cast<double>(k) * dt_s, vals[k]});
    return pts;
}

} // namespace memsim
