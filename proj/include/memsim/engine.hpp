#pragma once

#include "memsim/aer_mesh.hpp"
#include "memsim/config.hpp"
#include "memsim/crossbar.hpp"
#include "memsim/dpi.hpp"
#include "memsim/memristor.hpp"
#include "memsim/neuron.hpp"
#include "memsim/stdp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace memsim {

enum class MismatchDist { normal, lognormal };

struct MismatchSpec {
    std::string parameter = "I_w_A";
    MismatchDist dist = MismatchDist::lognormal;
    double cv = 0.0;
    long long n = 1;

    void validate() const;
};

// Per-instance parameter draws around a shared base card. The lognormal is
// parameterized to keep the requested mean and coefficient of variation.
std::vector<DpiParams> draw_population(const DpiParams& base, const MismatchSpec& spec,
                                       std::uint64_t seed);

struct PopulationEpsp {
    std::vector<double> t_s;
    std::vector<double> mean_A;
    std::vector<double> std_A;
};

// Single-spike response of every member, reduced to pointwise mean and
// (population) standard deviation traces.
PopulationEpsp population_epsp(const std::vector<DpiParams>& population,
                               const std::vector<double>& spike_times_s, double horizon_s,
                               double sample_dt_s);

struct Connection {
    int src = 0;
    int dst = 0;
    int branch = 0;
};

struct StimulusTrain {
    int neuron = 0;
    int branch = 0;
    std::vector<double> times_s;
    // rate_hz > 0 adds a Poisson train on top of times_s, drawn from the
    // experiment seed (stream forked per stimulus index).
    double rate_hz = 0.0;
};

// One self-contained experiment: a population of IF neurons, each fed by a
// hybrid synapse bank, wired by axonal connections that may ride the AER
// mesh, with optional waveform plasticity on the bank branches.
struct Experiment {
    double duration_s = 0.1;
    std::uint64_t seed = 1;
    double engine_dt_s = 1e-4;

    MemristorParams device;
    DpiParams dpi;
    IfNeuronParams neuron;
    SpikeWaveform pre_wave = SpikeWaveform::default_biphasic();
    SpikeWaveform post_wave = SpikeWaveform::default_biphasic();

    int n_neurons = 1;
    int branches_per_neuron = 1;
    double g_init_S = 0.0;  // 0 picks the device midpoint

    std::vector<Connection> connections;

    bool stdp_enabled = false;
    double stdp_dt_int_s = 5e-9;
    double stdp_window_s = 1e-3;

    bool mesh_enabled = false;
    BoardSpec board;

    std::vector<StimulusTrain> stimulus;

    std::vector<int> record_i_syn;
    std::vector<int> record_v_mem;
    double sample_dt_s = 1e-4;

    void validate() const;
    static Experiment from_config(const Config& cfg);
};

struct SpikeRecord {
    double t_s = 0.0;
    int neuron = 0;
};

struct VmPoint {
    double t_s;
    double v_V;
};

struct RunResults {
    std::vector<SpikeRecord> spikes;
    std::vector<std::vector<TracePoint>> i_syn_traces;
    std::vector<std::vector<VmPoint>> v_mem_traces;
    std::vector<std::vector<double>> final_g_S;
    MeshStats mesh;
    bool has_mesh = false;
};

// Deterministic event loop: a global (time, sequence) queue carries synaptic
// arrivals while membranes advance on a fixed tick; synapse currents are
// evaluated from their closed-form traces, so tick size only quantizes the
// membrane, never the synapse.
RunResults run(const Experiment& ex);

} // namespace memsim
