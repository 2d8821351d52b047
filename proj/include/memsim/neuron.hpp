#pragma once

#include "memsim/config.hpp"

#include <string>
#include <utility>
#include <vector>

namespace memsim {

// Leaky integrate-and-fire with optional spike-triggered adaptation.
struct IfNeuronParams {
    double c_mem_F = 1e-12;
    double i_leak_A = 5e-13;
    double v_thresh_V = 0.3;
    double v_reset_V = 0.0;
    double t_refr_s = 2e-3;
    double adapt_increment_A = 0.0;
    double tau_adapt_s = 0.1;

    void validate() const;
    static IfNeuronParams from_config(const Config& cfg, const std::string& section);
};

struct IfNeuronState {
    double v_V = 0.0;
    double i_adapt_A = 0.0;
    double refr_left_s = 0.0;
};

struct MembraneResult {
    IfNeuronState state;
    bool spiked = false;
};

MembraneResult membrane_step(const IfNeuronState& s, const IfNeuronParams& p, double i_in_A,
                             double dt_s);

// Voltage template a neuron forces at its terminals during a spike. Linear
// interpolation between breakpoints; the resting level everywhere else.
struct SpikeWaveform {
    std::vector<std::pair<double, double>> breakpoints;  // (t_offset_s, v_V), first at 0
    double v_rest_V = 0.0;

    double duration_s() const { return breakpoints.back().first; }
    double value(double t_since_spike_s) const;
    double max_abs_V() const;
    double min_segment_s() const;
    void validate() const;

    // Brief positive pulse followed by a longer negative tail returning
    // linearly to rest. Kept below the default device thresholds so a lone
    // spike never programs anything.
    static SpikeWaveform default_biphasic();
    static SpikeWaveform from_config(const Config& cfg, const std::string& section);
};

double waveform_voltage(const SpikeWaveform& w, double t_since_spike_s);

} // namespace memsim
