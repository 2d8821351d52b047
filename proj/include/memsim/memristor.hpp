#pragma once

#include "memsim/config.hpp"
#include "memsim/rng.hpp"

#include <string>
#include <utility>
#include <vector>

namespace memsim {

enum class MemristorMode { analog, bistable };

// Voltage-controlled bipolar device with threshold drift. Below the
// thresholds the state is inert; above them the conductance drifts at a
// rate proportional to the overdrive, clamped to [g_min, g_max]. The
// bistable mode replaces drift with a memoryless two-state switch.
struct MemristorParams {
    double g_min_S = 1.0 / 7000.0;
    double g_max_S = 1e-3;
    double v_set_V = 1.5;
    double v_reset_V = -1.5;
    double k_set_SpVs = 20.0;
    double k_reset_SpVs = 20.0;
    MemristorMode mode = MemristorMode::analog;
    double p_rate_set = 1e6;
    double p_rate_reset = 1e6;

    double g_mid_S() const { return 0.5 * (g_min_S + g_max_S); }
    void validate() const;
    static MemristorParams from_config(const Config& cfg, const std::string& section);
};

struct MemristorState {
    double g_S = 0.0;
};

double conduct(const MemristorState& s, double v_V);

MemristorState step(const MemristorState& s, const MemristorParams& p, double v_V, double dt_s);

MemristorState stochastic_step(const MemristorState& s, const MemristorParams& p, double v_V,
                               double dt_s, SeedStream& rng);

struct PulseTrainResult {
    std::vector<double> r_ohm;  // resistance reading after each pulse
    MemristorState final_state;
};

PulseTrainResult apply_pulse_train(MemristorState s, const MemristorParams& p, double amp_V,
                                   double width_s, int n, double v_read_V);

struct IvPoint {
    double t_s;
    double v_V;
    double i_A;
    double g_S;
};

struct IvSweepResult {
    std::vector<IvPoint> trace;
    MemristorState final_state;
};

// Steps the device through a sampled drive, recording the instantaneous
// current at each sample before advancing the state to the next one.
IvSweepResult iv_sweep(MemristorState s, const MemristorParams& p,
                       const std::vector<std::pair<double, double>>& drive_t_v);

// Drive generators for the sweep front end.
std::vector<std::pair<double, double>> make_triangle_drive(double amp_V, double period_s,
                                                           int cycles, int samples_per_cycle);
std::vector<std::pair<double, double>> make_sine_drive(double amp_V, double period_s,
                                                       int cycles, int samples_per_cycle);

} // namespace memsim
