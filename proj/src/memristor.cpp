#include "memsim/memristor.hpp"

#include <cmath>
#include <stdexcept>

namespace memsim {

void MemristorParams::validate() const {
    if (!(g_min_S > 0.0) || !(g_max_S > g_min_S))
        throw std::invalid_argument("memristor: need 0 < g_min_S < g_max_S");
    if (!(v_set_V > 0.0) || !(v_reset_V < 0.0))
        throw std::invalid_argument("memristor: need v_set_V > 0 > v_reset_V");
    if (k_set_SpVs < 0.0 || k_reset_SpVs < 0.0)
        throw std::invalid_argument("memristor: drift rates must be >= 0");
    if (p_rate_set < 0.0 || p_rate_reset < 0.0)
        throw std::invalid_argument("memristor: switching hazard rates must be >= 0");
}

MemristorParams MemristorParams::from_config(const Config& cfg, const std::string& section) {
    MemristorParams p;
    cfg.require_known_keys(section, {"g_min_S", "g_max_S", "v_set_V", "v_reset_V", "k_set_SpVs",
                                     "k_reset_SpVs", "mode", "p_rate_set", "p_rate_reset"});
    p.g_min_S = cfg.get_double(section, "g_min_S", p.g_min_S);
    p.g_max_S = cfg.get_double(section, "g_max_S", p.g_max_S);
    p.v_set_V = cfg.get_double(section, "v_set_V", p.v_set_V);
    p.v_reset_V = cfg.get_double(section, "v_reset_V", p.v_reset_V);
    p.k_set_SpVs = cfg.get_double(section, "k_set_SpVs", p.k_set_SpVs);
    p.k_reset_SpVs = cfg.get_double(section, "k_reset_SpVs", p.k_reset_SpVs);
    std::string mode = cfg.get_string(section, "mode", "analog");
    if (mode == "analog")
        p.mode = MemristorMode::analog;
    else if (mode == "bistable")
        p.mode = MemristorMode::bistable;
    else
        throw ConfigError("key 'mode' in [" + section + "]: expected 'analog' or 'bistable', got '" + mode + "'");
    p.p_rate_set = cfg.get_double(section, "p_rate_set", p.p_rate_set);
    p.p_rate_reset = cfg.get_double(section, "p_rate_reset", p.p_rate_reset);
    p.validate();
    return p;
}

double conduct(const MemristorState& s, double v_V) {
    if (!std::isfinite(v_V)) throw std::invalid_argument("conduct: voltage must be finite");
    return s.g_S * v_V;
}

MemristorState step(const MemristorState& s, const MemristorParams& p, double v_V, double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    if (p.mode != MemristorMode::analog)
        throw std::invalid_argument("step: device is not in analog mode");
    double g = s.g_S;
    if (v_V > p.v_set_V)
        g += p.k_set_SpVs * (v_V - p.v_set_V) * dt_s;
    else if (v_V < p.v_reset_V)
        g += p.k_reset_SpVs * (v_V - p.v_reset_V) * dt_s;
    if (g < p.g_min_S) g = p.g_min_S;
    if (g > p.g_max_S) g = p.g_max_S;
    return MemristorState{g};
}

MemristorState stochastic_step(const MemristorState& s, const MemristorParams& p, double v_V,
                               double dt_s, SeedStream& rng) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("stochastic_step: dt must be > 0");
    if (p.mode != MemristorMode::bistable)
        throw std::invalid_argument("stochastic_step: device is not in bistable mode");
    if (s.g_S != p.g_min_S && s.g_S != p.g_max_S)
        throw std::invalid_argument("stochastic_step: state is not at a bistable endpoint");
    // The stream is consumed only when a transition is armed, so subthreshold
    // steps leave the stream untouched.
    if (v_V > p.v_set_V && s.g_S == p.g_min_S) {
        double hazard = p.p_rate_set * (v_V - p.v_set_V) * dt_s;
        if (rng.uniform01() < -std::expm1(-hazard)) return MemristorState{p.g_max_S};
    } else if (v_V < p.v_reset_V && s.g_S == p.g_max_S) {
        double hazard = p.p_rate_reset * (p.v_reset_V - v_V) * dt_s;
        if (rng.uniform01() < -std::expm1(-hazard)) return MemristorState{p.g_min_S};
    }
    return s;
}

PulseTrainResult apply_pulse_train(MemristorState s, const MemristorParams& p, double amp_V,
                                   double width_s, int n, double v_read_V) {
    if (n < 1) throw std::invalid_argument("apply_pulse_train: need n >= 1");
    if (!(width_s > 0.0)) throw std::invalid_argument("apply_pulse_train: width must be > 0");
    if (!(v_read_V < p.v_set_V && v_read_V > p.v_reset_V))
        throw std::invalid_argument("apply_pulse_train: read voltage would disturb the state");
    PulseTrainResult out;
    out.r_ohm.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        s = step(s, p, amp_V, width_s);
        out.r_ohm.push_back(1.0 / s.g_S);
    }
    out.final_state = s;
    return out;
}

IvSweepResult iv_sweep(MemristorState s, const MemristorParams& p,
                       const std::vector<std::pair<double, double>>& drive_t_v) {
    if (drive_t_v.empty()) throw std::invalid_argument("iv_sweep: empty drive");
    IvSweepResult out;
    out.trace.reserve(drive_t_v.size());
    for (std::size_t k = 0; k < drive_t_v.size(); ++k) {
        auto [t, v] = drive_t_v[k];
        out.trace.push_back(IvPoint{t, v, conduct(s, v), s.g_S});
        if (k + 1 < drive_t_v.size()) {
            double dt = drive_t_v[k + 1].first - t;
            if (!(dt > 0.0)) throw std::invalid_argument("iv_sweep: sample spacing must be > 0");
            s = step(s, p, v, dt);
        }
    }
    out.final_state = s;
    return out;
}

namespace {

std::vector<std::pair<double, double>> make_drive(double amp_V, double period_s, int cycles,
                                                  int samples_per_cycle, bool sine) {
    if (!(period_s > 0.0)) throw std::invalid_argument("drive: period must be > 0");
    if (cycles < 1 || samples_per_cycle < 4)
        throw std::invalid_argument("drive: need cycles >= 1 and samples_per_cycle >= 4");
    std::vector<std::pair<double, double>> d;
    long long total = static_cast<long long>(cycles) * samples_per_cycle;
    d.reserve(static_cast<std::size_t>(total) + 1);
    for (long long j = 0; j <= total; ++j) {
        double t = static_cast<double>(j) * period_s / samples_per_cycle;
        double u = static_cast<double>(j % samples_per_cycle) / samples_per_cycle;
        double v;
        if (sine) {
            v = amp_V * std::sin(2.0 * M_PI * u);
        } else {
            if (u < 0.25)
                v = amp_V * 4.0 * u;
            else if (u < 0.75)
                v = amp_V * (2.0 - 4.0 * u);
            else
                v = amp_V * (4.0 * u - 4.0);
        }
        d.emplace_back(t, v);
    }
    return d;
}

} // namespace

std::vector<std::pair<double, double>> make_triangle_drive(double amp_V, double period_s,
                                                           int cycles, int samples_per_cycle) {
    return make_drive(amp_V, period_s, cycles, samples_per_cycle, false);
}

std::vector<std::pair<double, double>> make_sine_drive(double amp_V, double period_s,
                                                       int cycles, int samples_per_cycle) {
    return make_drive(amp_V, period_s, cycles, samples_per_cycle, true);
}

} // namespace memsim
