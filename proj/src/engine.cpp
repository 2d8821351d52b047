#include "memsim/engine.hpp"

#include "memsim/kernels/kernels.hpp"
#include "memsim/numfmt.hpp"
#include "memsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>

namespace memsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
} // namespace

void MismatchSpec::validate() const {
    if (cv < 0.0) throw std::invalid_argument("mismatch: cv must be >= 0");
    if (n < 1) throw std::invalid_argument("mismatch: population size must be >= 1");
}

namespace {

double* dpi_field(DpiParams& p, const std::string& name) {
    if (name == "C_F") return &p.C_F;
    if (name == "U_T_V") return &p.U_T_V;
    if (name == "kappa") return &p.kappa;
    if (name == "I_tau_A") return &p.I_tau_A;
    if (name == "I_th_A") return &p.I_th_A;
    if (name == "I_w_A") return &p.I_w_A;
    if (name == "t_pulse_s") return &p.t_pulse_s;
    return nullptr;
}

} // namespace

std::vector<DpiParams> draw_population(const DpiParams& base, const MismatchSpec& spec,
                                       std::uint64_t seed) {
    spec.validate();
    base.validate();
    DpiParams probe = base;
    double* probe_field = dpi_field(probe, spec.parameter);
    if (!probe_field)
        throw std::invalid_argument("mismatch: unknown parameter '" + spec.parameter + "'");
    double base_val = *probe_field;
    double sigma2 = std::log1p(spec.cv * spec.cv);
    double mu = std::log(base_val) - 0.5 * sigma2;
    double sigma = std::sqrt(sigma2);
    SeedStream rng(seed);
    std::vector<DpiParams> pop;
    pop.reserve(static_cast<std::size_t>(spec.n));
    for (long long i = 0; i < spec.n; ++i) {
        DpiParams p = base;
        double value = base_val;
        if (spec.cv > 0.0) {
            double z = rng.normal();
            value = spec.dist == MismatchDist::lognormal ? std::exp(mu + sigma * z)
                                                         : base_val * (1.0 + spec.cv * z);
        }
        *dpi_field(p, spec.parameter) = value;
        p.validate();
        pop.push_back(p);
    }
    return pop;
}

PopulationEpsp population_epsp(const std::vector<DpiParams>& population,
                               const std::vector<double>& spike_times_s, double horizon_s,
                               double sample_dt_s) {
    if (population.empty()) throw std::invalid_argument("population_epsp: empty population");
    const auto& K = kernels::active();
    std::vector<std::vector<double>> member_vals;
    member_vals.reserve(population.size());
    PopulationEpsp out;
    for (const DpiParams& p : population) {
        auto trace = epsc_trace(p, spike_times_s, horizon_s, sample_dt_s);
        if (out.t_s.empty()) {
            out.t_s.reserve(trace.size());
            for (const auto& pt : trace) out.t_s.push_back(pt.t_s);
        }
        std::vector<double> vals;
        vals.reserve(trace.size());
        for (const auto& pt : trace) vals.push_back(pt.i_syn_A);
        member_vals.push_back(std::move(vals));
    }
    std::size_t n = out.t_s.size();
    double m = static_cast<double>(population.size());
    // Mean accumulated as deviations from member 0, so identical members give
    // a residual of exactly zero and the std trace below vanishes bit for bit.
    const std::vector<double>& ref = member_vals.front();
    std::vector<double> acc(n, 0.0);
    for (const auto& vals : member_vals) K.vec_accumulate_diff(acc.data(), vals.data(), ref.data(), n);
    out.mean_A.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.mean_A[i] = ref[i] + acc[i] / m;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& vals : member_vals)
        K.vec_accumulate_sqdiff(acc.data(), vals.data(), out.mean_A.data(), n);
    out.std_A.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.std_A[i] = std::sqrt(acc[i] / m);
    return out;
}

void Experiment::validate() const {
    if (!(duration_s > 0.0)) throw std::invalid_argument("experiment: duration_s must be > 0");
    if (!(engine_dt_s > 0.0) || engine_dt_s > duration_s)
        throw std::invalid_argument("experiment: engine_dt_s must be in (0, duration_s]");
    if (!(sample_dt_s > 0.0)) throw std::invalid_argument("experiment: sample_dt_s must be > 0");
    if (n_neurons < 1 || branches_per_neuron < 1)
        throw std::invalid_argument("experiment: need n_neurons >= 1 and branches_per_neuron >= 1");
    device.validate();
    dpi.validate();
    neuron.validate();
    pre_wave.validate();
    post_wave.validate();
    if (g_init_S != 0.0 && (g_init_S < device.g_min_S || g_init_S > device.g_max_S))
        throw std::invalid_argument("experiment: g_init_S outside device bounds");
    for (const Connection& c : connections) {
        if (c.src < 0 || c.src >= n_neurons || c.dst < 0 || c.dst >= n_neurons)
            throw std::invalid_argument("experiment: connection references a missing neuron");
        if (c.branch < 0 || c.branch >= branches_per_neuron)
            throw std::invalid_argument("experiment: connection references a missing branch");
    }
    for (const StimulusTrain& st : stimulus) {
        if (st.neuron < 0 || st.neuron >= n_neurons || st.branch < 0 ||
            st.branch >= branches_per_neuron)
            throw std::invalid_argument("experiment: stimulus references a missing target");
        for (std::size_t k = 0; k < st.times_s.size(); ++k) {
            if (st.times_s[k] < 0.0 || st.times_s[k] > duration_s)
                throw std::invalid_argument("experiment: stimulus time outside [0, duration]");
            if (k > 0 && st.times_s[k] < st.times_s[k - 1])
                throw std::invalid_argument("experiment: stimulus times must be sorted");
        }
        if (st.rate_hz < 0.0)
            throw std::invalid_argument("experiment: stimulus rate must be >= 0");
    }
    if (stdp_enabled) {
        if (!(stdp_window_s > 0.0))
            throw std::invalid_argument("experiment: stdp_window_s must be > 0");
        StdpProbe probe;
        probe.pre_wave = pre_wave;
        probe.post_wave = post_wave;
        probe.dt_int_s = stdp_dt_int_s;
        probe.delta_t_grid_s = {0.0};
        probe.validate();
    }
    if (mesh_enabled) board.validate();
    for (int id : record_i_syn)
        if (id < 0 || id >= n_neurons)
            throw std::invalid_argument("experiment: record list references a missing neuron");
    for (int id : record_v_mem)
        if (id < 0 || id >= n_neurons)
            throw std::invalid_argument("experiment: record list references a missing neuron");
}

namespace {

bool get_bool(const Config& cfg, const std::string& sec, const std::string& key, bool fallback) {
    std::string v = cfg.get_string(sec, key, fallback ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "' in [" + sec + "]: expected true/false");
}

std::vector<int> parse_id_list(const std::string& text) {
    std::vector<int> ids;
    for (const std::string& tok : split_list(text, ',')) {
        long long v;
        if (!parse_int(tok, v)) throw ConfigError("bad id '" + tok + "' in record list");
        ids.push_back(static_cast<int>(v));
    }
    return ids;
}

} // namespace

Experiment Experiment::from_config(const Config& cfg) {
    Experiment ex;
    cfg.require_known_keys("experiment", {"duration_s", "seed", "engine_dt_s"});
    ex.duration_s = cfg.get_double("experiment", "duration_s", ex.duration_s);
    ex.seed = static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 1));
    ex.engine_dt_s = cfg.get_double("experiment", "engine_dt_s", ex.engine_dt_s);

    ex.device = MemristorParams::from_config(cfg, "memristor");
    ex.dpi = DpiParams::from_config(cfg, "dpi");
    ex.neuron = IfNeuronParams::from_config(cfg, "neuron");
    ex.pre_wave = SpikeWaveform::from_config(cfg, "waveform.pre");
    ex.post_wave = SpikeWaveform::from_config(cfg, "waveform.post");

    cfg.require_known_keys("network", {"n_neurons", "branches_per_neuron", "g_init_S"});
    ex.n_neurons = static_cast<int>(cfg.get_int("network", "n_neurons", ex.n_neurons));
    ex.branches_per_neuron =
        static_cast<int>(cfg.get_int("network", "branches_per_neuron", ex.branches_per_neuron));
    ex.g_init_S = cfg.get_double("network", "g_init_S", ex.g_init_S);

    if (const Config::Section* sec = cfg.find_section("connections")) {
        for (const auto& [key, value] : *sec) {
            auto parts = split_list(value, ':');
            long long a, b, c;
            if (parts.size() != 3 || !parse_int(parts[0], a) || !parse_int(parts[1], b) ||
                !parse_int(parts[2], c))
                throw ConfigError("key '" + key +
                                  "' in [connections]: expected 'src:dst:branch', got '" + value +
                                  "'");
            ex.connections.push_back(
                Connection{static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)});
        }
    }

    cfg.require_known_keys("stdp", {"enabled", "dt_int_s", "window_s"});
    ex.stdp_enabled = get_bool(cfg, "stdp", "enabled", ex.stdp_enabled);
    ex.stdp_dt_int_s = cfg.get_double("stdp", "dt_int_s", ex.stdp_dt_int_s);
    ex.stdp_window_s = cfg.get_double("stdp", "window_s", ex.stdp_window_s);

    cfg.require_known_keys("mesh", {"enabled", "rows", "cols", "e_pp_eps"});
    ex.mesh_enabled = get_bool(cfg, "mesh", "enabled", ex.mesh_enabled);
    if (ex.mesh_enabled) {
        BoardSpec b;
        b.mesh_rows = static_cast<int>(cfg.get_int("mesh", "rows", 2));
        b.mesh_cols = static_cast<int>(cfg.get_int("mesh", "cols", 2));
        b.n_ch = static_cast<long long>(b.mesh_rows) * b.mesh_cols;
        b.e_pp_eps = cfg.get_double("mesh", "e_pp_eps", b.e_pp_eps);
        ex.board = b;
    }

    if (const Config::Section* sec = cfg.find_section("stimulus")) {
        for (const auto& [key, value] : *sec) {
            bool poisson = key.rfind("poisson", 0) == 0;
            bool timed = key.rfind("spike", 0) == 0;
            if (!poisson && !timed)
                throw ConfigError("unknown stimulus entry '" + key +
                                  "' (keys start with 'spike' or 'poisson')");
            auto head = value.find(':');
            auto mid = head == std::string::npos ? std::string::npos : value.find(':', head + 1);
            long long neuron, branch;
            if (mid == std::string::npos || !parse_int(value.substr(0, head), neuron) ||
                !parse_int(value.substr(head + 1, mid - head - 1), branch))
                throw ConfigError("key '" + key +
                                  "' in [stimulus]: expected 'neuron:branch:...', got '" + value +
                                  "'");
            StimulusTrain st;
            st.neuron = static_cast<int>(neuron);
            st.branch = static_cast<int>(branch);
            std::string rest = value.substr(mid + 1);
            if (poisson) {
                if (!parse_double(rest, st.rate_hz))
                    throw ConfigError("key '" + key + "' in [stimulus]: bad rate '" + rest + "'");
            } else {
                for (const std::string& tok : split_list(rest, ',')) {
                    double t;
                    if (!parse_double(tok, t))
                        throw ConfigError("key '" + key + "' in [stimulus]: bad time '" + tok +
                                          "'");
                    st.times_s.push_back(t);
                }
            }
            ex.stimulus.push_back(std::move(st));
        }
    }

    cfg.require_known_keys("record", {"i_syn", "v_mem", "sample_dt_s"});
    ex.record_i_syn = parse_id_list(cfg.get_string("record", "i_syn", ""));
    ex.record_v_mem = parse_id_list(cfg.get_string("record", "v_mem", ""));
    ex.sample_dt_s = cfg.get_double("record", "sample_dt_s", ex.sample_dt_s);

    ex.validate();
    return ex;
}

namespace {

struct EngineEvent {
    double t;
    std::uint64_t seq;
    int neuron;
    int branch;
};

struct EventAfter {
    bool operator()(const EngineEvent& a, const EngineEvent& b) const {
        return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    }
};

} // namespace

RunResults run(const Experiment& ex) {
    ex.validate();
    int n = ex.n_neurons;
    int nb = ex.branches_per_neuron;
    double g0 = ex.g_init_S > 0.0 ? ex.g_init_S : ex.device.g_mid_S();

    std::vector<std::vector<MemristorState>> g(
        static_cast<std::size_t>(n), std::vector<MemristorState>(static_cast<std::size_t>(nb),
                                                                 MemristorState{g0}));
    std::vector<DpiEventTrace> traces;
    traces.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) traces.emplace_back(ex.dpi);
    std::vector<IfNeuronState> neurons(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> last_pre(
        static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(nb), kNegInf));
    std::vector<double> last_post(static_cast<std::size_t>(n), kNegInf);

    std::vector<std::vector<int>> out_conns(static_cast<std::size_t>(n));
    for (std::size_t ci = 0; ci < ex.connections.size(); ++ci)
        out_conns[static_cast<std::size_t>(ex.connections[ci].src)].push_back(
            static_cast<int>(ci));

    std::optional<MeshFabric> fabric;
    int npc = 1;  // neurons per chip, for placement
    if (ex.mesh_enabled) {
        fabric.emplace(ex.board);
        npc = static_cast<int>((static_cast<long long>(n) + ex.board.n_ch - 1) / ex.board.n_ch);
    }
    auto chip_r = [&](int neuron) { return (neuron / npc) / ex.board.mesh_cols; };
    auto chip_c = [&](int neuron) { return (neuron / npc) % ex.board.mesh_cols; };

    std::priority_queue<EngineEvent, std::vector<EngineEvent>, EventAfter> pq;
    std::uint64_t seq = 0;
    SeedStream root(ex.seed);
    for (std::size_t si = 0; si < ex.stimulus.size(); ++si) {
        const StimulusTrain& st = ex.stimulus[si];
        if (st.rate_hz > 0.0) {
            SeedStream s = root.fork(si);
            double t = 0.0;
            for (;;) {
                t += -std::log1p(-s.uniform01()) / st.rate_hz;
                if (t >= ex.duration_s) break;
                pq.push(EngineEvent{t, seq++, st.neuron, st.branch});
            }
        }
        for (double t : st.times_s) pq.push(EngineEvent{t, seq++, st.neuron, st.branch});
    }

    RunResults res;
    std::vector<std::vector<VmPoint>> v_mem(ex.record_v_mem.size());
    for (std::size_t k = 0; k < ex.record_v_mem.size(); ++k)
        v_mem[k].push_back(VmPoint{0.0, neurons[static_cast<std::size_t>(
                                            ex.record_v_mem[k])].v_V});

    auto deliver = [&](double t, int neuron, int branch) {
        auto& dev = g[static_cast<std::size_t>(neuron)][static_cast<std::size_t>(branch)];
        double scale = std::clamp(dev.g_S / ex.device.g_max_S, 0.0, 1.0);
        traces[static_cast<std::size_t>(neuron)].add_spike(t, scale);
        if (ex.stdp_enabled) {
            last_pre[static_cast<std::size_t>(neuron)][static_cast<std::size_t>(branch)] = t;
            double tp = last_post[static_cast<std::size_t>(neuron)];
            if (t - tp <= ex.stdp_window_s) {
                auto r = weight_update(dev, ex.device, ex.pre_wave, ex.post_wave, tp - t,
                                       ex.stdp_dt_int_s);
                dev = r.state;
            }
        }
    };

    double t_tick = 0.0;
    while (t_tick < ex.duration_s) {
        double t_next = std::min(t_tick + ex.engine_dt_s, ex.duration_s);
        if (!(t_next > t_tick))
            throw std::runtime_error("run: engine_dt_s vanishes at this time scale");
        // synaptic arrivals first, oldest first; mesh deliveries win ties
        for (;;) {
            double t_pq = pq.empty() ? kInf : pq.top().t;
            double t_mesh = fabric ? fabric->next_time_s() : kInf;
            if (t_mesh <= std::min(t_pq, t_next)) {
                for (const Delivery& d : fabric->advance(t_mesh)) {
                    const Connection& c = ex.connections[static_cast<std::size_t>(d.ev.dst_n)];
                    deliver(d.t_deliver_s, c.dst, c.branch);
                }
                continue;
            }
            if (t_pq <= t_next) {
                EngineEvent e = pq.top();
                pq.pop();
                deliver(e.t, e.neuron, e.branch);
                continue;
            }
            break;
        }
        double dt = t_next - t_tick;
        for (int i = 0; i < n; ++i) {
            double i_in = traces[static_cast<std::size_t>(i)].value_at(t_tick);
            MembraneResult r = membrane_step(neurons[static_cast<std::size_t>(i)], ex.neuron,
                                             i_in, dt);
            neurons[static_cast<std::size_t>(i)] = r.state;
            if (!r.spiked) continue;
            res.spikes.push_back(SpikeRecord{t_next, i});
            if (ex.stdp_enabled) {
                last_post[static_cast<std::size_t>(i)] = t_next;
                for (int b = 0; b < nb; ++b) {
                    double tp = last_pre[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)];
                    if (t_next - tp <= ex.stdp_window_s) {
                        auto& dev = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)];
                        auto ur = weight_update(dev, ex.device, ex.pre_wave, ex.post_wave,
                                                t_next - tp, ex.stdp_dt_int_s);
                        dev = ur.state;
                    }
                }
            }
            for (int ci : out_conns[static_cast<std::size_t>(i)]) {
                const Connection& c = ex.connections[static_cast<std::size_t>(ci)];
                if (fabric) {
                    AddressEvent ev;
                    ev.t_s = t_next;
                    ev.src_r = chip_r(i);
                    ev.src_c = chip_c(i);
                    ev.src_n = i;
                    ev.dst_r = chip_r(c.dst);
                    ev.dst_c = chip_c(c.dst);
                    ev.dst_n = ci;  // connection id, so the delivery knows its branch
                    fabric->inject(ev);
                } else {
                    pq.push(EngineEvent{t_next, seq++, c.dst, c.branch});
                }
            }
        }
        for (std::size_t k = 0; k < ex.record_v_mem.size(); ++k)
            v_mem[k].push_back(VmPoint{t_next, neurons[static_cast<std::size_t>(
                                                   ex.record_v_mem[k])].v_V});
        t_tick = t_next;
    }

    auto n_samples = static_cast<std::size_t>(std::floor(ex.duration_s / ex.sample_dt_s)) + 1;
    for (int id : ex.record_i_syn)
        res.i_syn_traces.push_back(
            traces[static_cast<std::size_t>(id)].sample_points(0.0, ex.sample_dt_s, n_samples));
    res.v_mem_traces = std::move(v_mem);
    res.final_g_S.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& row = res.final_g_S[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(nb));
        for (int b = 0; b < nb; ++b)
            row.push_back(g[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)].g_S);
    }
    if (fabric) {
        res.mesh = fabric->stats();
        res.has_mesh = true;
    }
    return res;
}

} // namespace memsim
