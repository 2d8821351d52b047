#pragma once

#include "memsim/config.hpp"
#include "memsim/memristor.hpp"
#include "memsim/neuron.hpp"

#include <vector>

namespace memsim {

// Plasticity from waveform superposition: a memristor bridging a pre and a
// post neuron sees v_post(t - delta_t) - v_pre(t) and drifts only where the
// superposition crosses a device threshold. delta_t is post minus pre.
struct StdpProbe {
    SpikeWaveform pre_wave;
    SpikeWaveform post_wave;
    double dt_int_s = 5e-9;
    std::vector<double> delta_t_grid_s;

    void validate() const;
    static StdpProbe defaults();
    static std::vector<double> make_grid(double half_span_s, double step_s);
};

double pair_voltage(const SpikeWaveform& pre, const SpikeWaveform& post, double delta_t_s,
                    double t_s);

struct WeightUpdateResult {
    MemristorState state;
    double delta_g_S = 0.0;
};

// Fixed-step drift integration across the union of both waveform supports,
// sampling the pair voltage at interval midpoints.
WeightUpdateResult weight_update(const MemristorState& s, const MemristorParams& p,
                                 const SpikeWaveform& pre, const SpikeWaveform& post,
                                 double delta_t_s, double dt_int_s);

struct XiPoint {
    double delta_t_s;
    double xi_S;
};

std::vector<XiPoint> stdp_curve(const StdpProbe& probe, const MemristorParams& p, double g_init_S);

} // namespace memsim
