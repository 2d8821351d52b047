#pragma once

#include "memsim/config.hpp"

#include <string>
#include <vector>

namespace memsim {

// First-order log-domain integrator: tau * dI/dt + I = drive, with
// tau = C*U_T/(kappa*I_tau) and drive I_w*I_th/I_tau while an input pulse
// is on. Everything here is integrated in closed form, so results are
// independent of any step size.
struct DpiParams {
    double C_F = 1e-12;
    double U_T_V = 0.025;
    double kappa = 0.5;
    double I_tau_A = 5e-12;
    double I_th_A = 2e-12;
    double I_w_A = 1e-8;
    double t_pulse_s = 1e-5;

    double tau_s() const { return C_F * U_T_V / (kappa * I_tau_A); }
    double i_steady_A(double g_scale) const { return g_scale * I_w_A * I_th_A / I_tau_A; }
    void validate() const;
    static DpiParams from_config(const Config& cfg, const std::string& section);
};

struct DpiState {
    double i_syn_A = 0.0;
    double t_s = 0.0;
};

double time_constant(const DpiParams& p);

DpiState decay(const DpiState& s, const DpiParams& p, double dt_s);

// One input pulse of width t_pulse with the drive scaled by g_scale in [0,1];
// advances the state clock by t_pulse.
DpiState on_spike(const DpiState& s, const DpiParams& p, double g_scale);

struct TracePoint {
    double t_s;
    double i_syn_A;
};

std::vector<TracePoint> epsc_trace(const DpiParams& p, const std::vector<double>& spike_times_s,
                                   double horizon_s, double sample_dt_s, double g_scale = 1.0);

// Piecewise-exponential view of the synapse current given a spike sequence.
// Each spike opens a drive window of width t_pulse; a spike landing inside
// an open window restarts it (and retargets the drive to its own g_scale).
// Supports exact point evaluation and fast uniform-grid sampling, which is
// what both the trace front end and the event engine use.
class DpiEventTrace {
public:
    explicit DpiEventTrace(const DpiParams& p, double i0_A = 0.0, double t0_s = 0.0);

    // t must not precede the last recorded event
    void add_spike(double t_s, double g_scale = 1.0);

    double value_at(double t_s) const;
    void sample(double t_begin_s, double dt_s, std::size_t n, double* out) const;
    std::vector<TracePoint> sample_points(double t_begin_s, double dt_s, std::size_t n) const;

    double last_input_time_s() const { return last_input_; }
    double start_time_s() const { return segs_.front().t0; }
    const DpiParams& params() const { return p_; }

private:
    struct Segment {
        double t0;      // segment start time
        double i0;      // current at t0
        double target;  // asymptote while this segment is active
    };

    std::size_t segment_for(double t_s) const;
    void push_segment(double t0, double i0, double target);

    DpiParams p_;
    double tau_;
    std::vector<Segment> segs_;
    double drive_end_ = 0.0;  // end of the most recent drive window
    double last_input_ = 0.0;
};

} // namespace memsim
