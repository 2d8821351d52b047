// Command-line front end. Every subcommand maps onto one library operation
// and emits plot-ready CSV or JSON with locale-independent formatting, so a
// repeated invocation with the same seed produces identical bytes.

#include "memsim/aer_mesh.hpp"
#include "memsim/config.hpp"
#include "memsim/crossbar.hpp"
#include "memsim/dpi.hpp"
#include "memsim/engine.hpp"
#include "memsim/memristor.hpp"
#include "memsim/neuron.hpp"
#include "memsim/numfmt.hpp"
#include "memsim/rng.hpp"
#include "memsim/stdp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using memsim::Config;
using memsim::ConfigError;
using memsim::fmt_double;
using memsim::fmt_int;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& c, bool config_required = false) {
    auto* copt = sub->add_option("-c,--config", c.config_path,
                                 "Config file (sectioned key=value format)");
    if (config_required) copt->required();
    sub->add_option("-o,--out-dir", c.out_dir, "Output directory")->capture_default_str();
    c.seed_opt = sub->add_option("--seed", c.seed, "Seed (overrides config and MEMSIM_SEED)");
    sub->add_option("--set", c.overrides, "Config override, section.key=value (repeatable)");
}

// Precedence: --seed flag, then the config file, then MEMSIM_SEED, then 1.
// The winner is written back into [experiment] seed so every consumer reads
// one place.
Config load_config(const CommonOpts& c) {
    Config cfg =
        c.config_path.empty() ? Config{} : Config::parse_file(c.config_path);
    for (const std::string& ov : c.overrides) {
        auto eq = ov.find('=');
        auto dot = ov.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ConfigError("--set expects section.key=value, got '" + ov + "'");
        cfg.set(ov.substr(0, dot), ov.substr(dot + 1, eq - dot - 1), ov.substr(eq + 1));
    }
    if (c.seed_opt && c.seed_opt->count() > 0) {
        cfg.set("experiment", "seed", fmt_int(static_cast<long long>(c.seed)));
    } else if (!cfg.has_key("experiment", "seed")) {
        if (const char* env = std::getenv("MEMSIM_SEED")) {
            long long v;
            if (!memsim::parse_int(env, v))
                throw ConfigError("MEMSIM_SEED: bad integer '" + std::string(env) + "'");
            cfg.set("experiment", "seed", fmt_int(v));
        }
    }
    return cfg;
}

std::uint64_t resolved_seed(const Config& cfg) {
    return static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 1));
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + path.string() + "'");
    f << content;
    if (!f) throw std::runtime_error("write failed on '" + path.string() + "'");
    std::cout << "wrote " << path.string() << "\n";
}

std::string stats_json(const memsim::MeshStats& st) {
    nlohmann::json j;
    j["delivered"] = st.delivered;
    j["max_link_util"] = st.max_link_util;
    j["mean_latency_s"] = st.mean_latency_s;
    j["max_queue"] = st.max_queue;
    return j.dump(2) + "\n";
}

const char* kEventHeader = "t_s,src_r,src_c,src_n,dst_r,dst_c,dst_n";

std::string events_csv(const std::vector<memsim::Delivery>& deliveries) {
    std::string out(kEventHeader);
    out += '\n';
    for (const memsim::Delivery& d : deliveries) {
        out += fmt_double(d.t_deliver_s);
        out += ',';
        out += fmt_int(d.ev.src_r);
        out += ',';
        out += fmt_int(d.ev.src_c);
        out += ',';
        out += fmt_int(d.ev.src_n);
        out += ',';
        out += fmt_int(d.ev.dst_r);
        out += ',';
        out += fmt_int(d.ev.dst_c);
        out += ',';
        out += fmt_int(d.ev.dst_n);
        out += '\n';
    }
    return out;
}

std::vector<memsim::AddressEvent> read_events_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open event file '" + path + "'");
    std::string line;
    if (!std::getline(f, line) || line != kEventHeader)
        throw std::runtime_error("event file '" + path + "': expected header '" +
                                 std::string(kEventHeader) + "'");
    std::vector<memsim::AddressEvent> evs;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cols = memsim::split_list(line, ',');
        long long iv[6];
        double t;
        if (cols.size() != 7 || !memsim::parse_double(cols[0], t) ||
            !memsim::parse_int(cols[1], iv[0]) || !memsim::parse_int(cols[2], iv[1]) ||
            !memsim::parse_int(cols[3], iv[2]) || !memsim::parse_int(cols[4], iv[3]) ||
            !memsim::parse_int(cols[5], iv[4]) || !memsim::parse_int(cols[6], iv[5]))
            throw std::runtime_error("event file '" + path + "' line " +
                                     std::to_string(lineno) + ": malformed row");
        memsim::AddressEvent ev;
        ev.t_s = t;
        ev.src_r = static_cast<int>(iv[0]);
        ev.src_c = static_cast<int>(iv[1]);
        ev.src_n = iv[2];
        ev.dst_r = static_cast<int>(iv[3]);
        ev.dst_c = static_cast<int>(iv[4]);
        ev.dst_n = iv[5];
        evs.push_back(ev);
    }
    return evs;
}

std::vector<memsim::AddressEvent> synth_uniform_events(const memsim::BoardSpec& b,
                                                       long long n_events, double load,
                                                       std::uint64_t seed) {
    if (b.n_ch < 2) throw std::runtime_error("mesh-sim: uniform traffic needs at least 2 chips");
    if (!(load > 0.0)) throw std::runtime_error("mesh-sim: load must be > 0");
    double rate = load * memsim::board_traffic(static_cast<double>(b.n_ch), b.e_pp_eps);
    memsim::SeedStream rng(seed);
    auto pick_chip = [&]() {
        auto k = static_cast<long long>(rng.uniform01() * static_cast<double>(b.n_ch));
        return std::min(k, b.n_ch - 1);
    };
    std::vector<memsim::AddressEvent> evs;
    evs.reserve(static_cast<std::size_t>(n_events));
    double t = 0.0;
    for (long long k = 0; k < n_events; ++k) {
        t += -std::log1p(-rng.uniform01()) / rate;
        long long src = pick_chip();
        long long dst = src;
        while (dst == src) dst = pick_chip();
        memsim::AddressEvent ev;
        ev.t_s = t;
        ev.src_r = static_cast<int>(src / b.mesh_cols);
        ev.src_c = static_cast<int>(src % b.mesh_cols);
        ev.src_n = k;
        ev.dst_r = static_cast<int>(dst / b.mesh_cols);
        ev.dst_c = static_cast<int>(dst % b.mesh_cols);
        ev.dst_n = k;
        evs.push_back(ev);
    }
    return evs;
}

std::string trace_csv(const std::vector<memsim::TracePoint>& trace, const char* header) {
    std::string out(header);
    out += '\n';
    for (const memsim::TracePoint& pt : trace) {
        out += fmt_double(pt.t_s);
        out += ',';
        out += fmt_double(pt.i_syn_A);
        out += '\n';
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memsim: behavioral simulator for hybrid memristor-CMOS neuromorphic hardware"};
    app.require_subcommand(1);

    // iv-sweep
    auto* sc_iv = app.add_subcommand("iv-sweep", "Drive a device with a periodic voltage sweep");
    CommonOpts iv_c;
    add_common(sc_iv, iv_c);
    double iv_amp = 2.0, iv_period = 4e-3, iv_g0 = 0.0;
    int iv_cycles = 2, iv_samples = 2000;
    std::string iv_shape = "triangle";
    sc_iv->add_option("--amp", iv_amp, "Peak drive voltage (V)")->capture_default_str();
    sc_iv->add_option("--period", iv_period, "Sweep period (s)")->capture_default_str()->check(CLI::PositiveNumber);
    sc_iv->add_option("--cycles", iv_cycles, "Number of cycles")->capture_default_str()->check(CLI::PositiveNumber);
    sc_iv->add_option("--samples", iv_samples, "Samples per cycle")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_iv->add_option("--shape", iv_shape, "Drive shape")->capture_default_str()
        ->check(CLI::IsMember({"triangle", "sine"}));
    sc_iv->add_option("--g0", iv_g0, "Initial conductance (S), 0 = device midpoint")->capture_default_str();
    sc_iv->callback([&] {
        Config cfg = load_config(iv_c);
        auto p = memsim::MemristorParams::from_config(cfg, "memristor");
        memsim::MemristorState s{iv_g0 > 0.0 ? iv_g0 : p.g_mid_S()};
        auto drive = iv_shape == "sine"
                         ? memsim::make_sine_drive(iv_amp, iv_period, iv_cycles, iv_samples)
                         : memsim::make_triangle_drive(iv_amp, iv_period, iv_cycles, iv_samples);
        auto res = memsim::iv_sweep(s, p, drive);
        std::string csv = "t_s,v_V,i_A,g_S\n";
        for (const auto& pt : res.trace) {
            csv += fmt_double(pt.t_s);
            csv += ',';
            csv += fmt_double(pt.v_V);
            csv += ',';
            csv += fmt_double(pt.i_A);
            csv += ',';
            csv += fmt_double(pt.g_S);
            csv += '\n';
        }
        write_file(iv_c.out_dir, "iv_sweep.csv", csv);
    });

    // pulse-program
    auto* sc_pp = app.add_subcommand("pulse-program",
                                     "Apply identical programming pulses, read resistance");
    CommonOpts pp_c;
    add_common(sc_pp, pp_c);
    double pp_amp = -3.0, pp_width = 1e-6, pp_read = 0.9, pp_g0 = 0.0;
    int pp_n = 8;
    sc_pp->add_option("--amp", pp_amp, "Pulse amplitude (V)")->capture_default_str();
    sc_pp->add_option("--width", pp_width, "Pulse width (s)")->capture_default_str()->check(CLI::PositiveNumber);
    sc_pp->add_option("--n", pp_n, "Number of pulses")->capture_default_str()->check(CLI::PositiveNumber);
    sc_pp->add_option("--read", pp_read, "Read voltage (V)")->capture_default_str();
    sc_pp->add_option("--g0", pp_g0, "Initial conductance (S), 0 = device midpoint")->capture_default_str();
    sc_pp->callback([&] {
        Config cfg = load_config(pp_c);
        auto p = memsim::MemristorParams::from_config(cfg, "memristor");
        memsim::MemristorState s{pp_g0 > 0.0 ? pp_g0 : p.g_mid_S()};
        auto res = memsim::apply_pulse_train(s, p, pp_amp, pp_width, pp_n, pp_read);
        std::string csv = "pulse,r_ohm\n";
        for (std::size_t k = 0; k < res.r_ohm.size(); ++k) {
            csv += fmt_int(static_cast<long long>(k) + 1);
            csv += ',';
            csv += fmt_double(res.r_ohm[k]);
            csv += '\n';
        }
        write_file(pp_c.out_dir, "pulse_program.csv", csv);
    });

    // epsc
    auto* sc_ep = app.add_subcommand("epsc", "Synapse current response to a spike train");
    CommonOpts ep_c;
    add_common(sc_ep, ep_c);
    std::string ep_spikes = "0";
    double ep_horizon = 5e-2, ep_dt = 1e-4, ep_gscale = 1.0;
    sc_ep->add_option("--spikes", ep_spikes, "Comma-separated spike times (s)")->capture_default_str();
    sc_ep->add_option("--horizon", ep_horizon, "Trace horizon (s)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_ep->add_option("--dt", ep_dt, "Sample interval (s)")->capture_default_str()->check(CLI::PositiveNumber);
    sc_ep->add_option("--g-scale", ep_gscale, "Drive scale in [0,1]")->capture_default_str();
    sc_ep->callback([&] {
        Config cfg = load_config(ep_c);
        auto p = memsim::DpiParams::from_config(cfg, "dpi");
        std::vector<double> times;
        for (const std::string& tok : memsim::split_list(ep_spikes, ',')) {
            double t;
            if (!memsim::parse_double(tok, t))
                throw ConfigError("--spikes: bad time '" + tok + "'");
            times.push_back(t);
        }
        auto trace = memsim::epsc_trace(p, times, ep_horizon, ep_dt, ep_gscale);
        write_file(ep_c.out_dir, "epsc.csv", trace_csv(trace, "t_s,i_syn_A"));
    });

    // stdp-curve
    auto* sc_st = app.add_subcommand("stdp-curve",
                                     "Weight change vs. post-pre spike lag from waveform overlap");
    CommonOpts st_c;
    add_common(sc_st, st_c);
    double st_span = 25e-6, st_step = 0.5e-6, st_dtint = 5e-9, st_g0 = 0.0;
    sc_st->add_option("--half-span", st_span, "Half extent of the lag grid (s)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_st->add_option("--step", st_step, "Lag grid step (s)")->capture_default_str()->check(CLI::PositiveNumber);
    sc_st->add_option("--dt-int", st_dtint, "Drift integration step (s)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_st->add_option("--g-init", st_g0, "Initial conductance (S), 0 = device midpoint")->capture_default_str();
    sc_st->callback([&] {
        Config cfg = load_config(st_c);
        auto p = memsim::MemristorParams::from_config(cfg, "memristor");
        memsim::StdpProbe probe;
        probe.pre_wave = memsim::SpikeWaveform::from_config(cfg, "waveform.pre");
        probe.post_wave = memsim::SpikeWaveform::from_config(cfg, "waveform.post");
        probe.dt_int_s = st_dtint;
        probe.delta_t_grid_s = memsim::StdpProbe::make_grid(st_span, st_step);
        auto curve = memsim::stdp_curve(probe, p, st_g0 > 0.0 ? st_g0 : p.g_mid_S());
        std::string csv = "delta_t_s,xi_S\n";
        for (const auto& pt : curve) {
            csv += fmt_double(pt.delta_t_s);
            csv += ',';
            csv += fmt_double(pt.xi_S);
            csv += '\n';
        }
        write_file(st_c.out_dir, "stdp_curve.csv", csv);
    });

    // crossbar-read
    auto* sc_cr = app.add_subcommand("crossbar-read",
                                     "Single-spike current peak vs. branch resistance");
    CommonOpts cr_c;
    add_common(sc_cr, cr_c);
    double cr_rmin = 1000.0, cr_rmax = 7000.0;
    int cr_points = 13;
    sc_cr->add_option("--r-min", cr_rmin, "Lowest resistance (ohm)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_cr->add_option("--r-max", cr_rmax, "Highest resistance (ohm)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_cr->add_option("--points", cr_points, "Sweep points")->capture_default_str()->check(CLI::PositiveNumber);
    sc_cr->callback([&] {
        Config cfg = load_config(cr_c);
        auto dev = memsim::MemristorParams::from_config(cfg, "memristor");
        auto dpi = memsim::DpiParams::from_config(cfg, "dpi");
        auto bank = memsim::HybridSynapseBank::make(1, dev, dpi);
        std::vector<double> r;
        for (int k = 0; k < cr_points; ++k) {
            double f = cr_points == 1 ? 0.0
                                      : static_cast<double>(k) / (cr_points - 1);
            r.push_back(cr_rmin + f * (cr_rmax - cr_rmin));
        }
        auto sweep = memsim::epsc_vs_resistance(bank, r);
        std::string csv = "r_ohm,i_peak_A\n";
        for (const auto& [r_ohm, i_peak] : sweep) {
            csv += fmt_double(r_ohm);
            csv += ',';
            csv += fmt_double(i_peak);
            csv += '\n';
        }
        write_file(cr_c.out_dir, "crossbar_read.csv", csv);
    });

    // write-offset
    auto* sc_wo = app.add_subcommand("write-offset",
                                     "Effective write voltage across a crossbar array");
    CommonOpts wo_c;
    add_common(sc_wo, wo_c);
    double wo_v = 1.8;
    sc_wo->add_option("--v", wo_v, "Applied write voltage (V)")->capture_default_str();
    sc_wo->callback([&] {
        Config cfg = load_config(wo_c);
        auto xb = memsim::CrossbarConfig::from_config(cfg, "crossbar");
        auto map = memsim::write_offset_map(xb, wo_v);
        std::string csv = "row,col,v_eff_V\n";
        for (std::size_t i = 0; i < xb.rows; ++i)
            for (std::size_t j = 0; j < xb.cols; ++j) {
                csv += fmt_int(static_cast<long long>(i));
                csv += ',';
                csv += fmt_int(static_cast<long long>(j));
                csv += ',';
                csv += fmt_double(map[i * xb.cols + j]);
                csv += '\n';
            }
        write_file(wo_c.out_dir, "write_offset.csv", csv);
    });

    // mesh-traffic
    auto* sc_mt = app.add_subcommand("mesh-traffic",
                                     "Closed-form board traffic capacity and link power");
    CommonOpts mt_c;
    add_common(sc_mt, mt_c);
    long long mt_nch = 100;
    double mt_epp = 1e8, mt_rate = 1.0, mt_npc = 1e6;
    auto* mt_nch_opt = sc_mt->add_option("--n-ch", mt_nch, "Chip count")->capture_default_str()
                           ->check(CLI::PositiveNumber);
    auto* mt_epp_opt = sc_mt->add_option("--e-pp", mt_epp, "Per-link bandwidth (events/s)")->capture_default_str()
                           ->check(CLI::PositiveNumber);
    auto* mt_rate_opt = sc_mt->add_option("--rate", mt_rate, "Average firing rate (Hz/neuron)")->capture_default_str();
    auto* mt_npc_opt = sc_mt->add_option("--neurons-per-chip", mt_npc, "Neurons per chip")->capture_default_str()
                           ->check(CLI::PositiveNumber);
    sc_mt->callback([&] {
        Config cfg = load_config(mt_c);
        auto b = memsim::BoardSpec::from_config(cfg, "mesh");
        if (mt_nch_opt->count() > 0) {
            b.n_ch = mt_nch;
            // refit the grid: largest factor pair closest to square
            int r = static_cast<int>(std::sqrt(static_cast<double>(b.n_ch)));
            while (r > 1 && b.n_ch % r != 0) --r;
            b.mesh_rows = r;
            b.mesh_cols = static_cast<int>(b.n_ch / r);
        }
        if (mt_epp_opt->count() > 0) b.e_pp_eps = mt_epp;
        if (mt_npc_opt->count() > 0) b.neurons_per_chip = mt_npc;
        b.validate();
        double rate = mt_rate_opt->count() > 0 ? mt_rate : 1.0;
        double e_v = memsim::board_traffic(static_cast<double>(b.n_ch), b.e_pp_eps);
        auto pw = memsim::comm_power(b, rate);
        nlohmann::json j;
        j["e_v"] = e_v;
        j["per_neuron_eps"] = e_v / (static_cast<double>(b.n_ch) * b.neurons_per_chip);
        j["per_chip_rate_eps"] = pw.per_chip_rate_eps;
        j["chip_current_A"] = pw.chip_current_A;
        j["chip_power_min_W"] = pw.chip_power_min_W;
        j["chip_power_max_W"] = pw.chip_power_max_W;
        j["board_power_min_W"] = pw.board_power_min_W;
        j["board_power_max_W"] = pw.board_power_max_W;
        write_file(mt_c.out_dir, "mesh_traffic.json", j.dump(2) + "\n");
    });

    // mesh-sim
    auto* sc_ms = app.add_subcommand("mesh-sim",
                                     "Route events through the 2D mesh, report queue stats");
    CommonOpts ms_c;
    add_common(sc_ms, ms_c);
    long long ms_events = 100000;
    double ms_load = 0.05, ms_epp = 1e8;
    int ms_rows = 10, ms_cols = 10;
    std::string ms_in;
    bool ms_record = false;
    sc_ms->add_option("--events", ms_events, "Synthetic event count")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_ms->add_option("--load", ms_load, "Injection rate as a fraction of total capacity")->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto* ms_rows_opt = sc_ms->add_option("--rows", ms_rows, "Mesh rows")->capture_default_str()
                            ->check(CLI::PositiveNumber);
    auto* ms_cols_opt = sc_ms->add_option("--cols", ms_cols, "Mesh cols")->capture_default_str()
                            ->check(CLI::PositiveNumber);
    auto* ms_epp_opt = sc_ms->add_option("--e-pp", ms_epp, "Per-link bandwidth (events/s)")->capture_default_str()
                           ->check(CLI::PositiveNumber);
    sc_ms->add_option("--in", ms_in, "Route this event CSV instead of synthetic traffic");
    sc_ms->add_flag("--record-events", ms_record, "Also write delivered events as CSV");
    sc_ms->callback([&] {
        Config cfg = load_config(ms_c);
        auto b = memsim::BoardSpec::from_config(cfg, "mesh");
        if (ms_rows_opt->count() > 0) b.mesh_rows = ms_rows;
        if (ms_cols_opt->count() > 0) b.mesh_cols = ms_cols;
        if (ms_rows_opt->count() > 0 || ms_cols_opt->count() > 0)
            b.n_ch = static_cast<long long>(b.mesh_rows) * b.mesh_cols;
        if (ms_epp_opt->count() > 0) b.e_pp_eps = ms_epp;
        b.validate();
        std::vector<memsim::AddressEvent> evs =
            ms_in.empty() ? synth_uniform_events(b, ms_events, ms_load, resolved_seed(cfg))
                          : read_events_csv(ms_in);
        memsim::MeshFabric fabric(b);
        for (const auto& ev : evs) fabric.inject(ev);
        auto deliveries = fabric.drain();
        write_file(ms_c.out_dir, "mesh_stats.json", stats_json(fabric.stats()));
        if (ms_record) write_file(ms_c.out_dir, "mesh_events.csv", events_csv(deliveries));
    });

    // mismatch-epsp
    auto* sc_mm = app.add_subcommand("mismatch-epsp",
                                     "Population mean and spread of the single-spike response");
    CommonOpts mm_c;
    add_common(sc_mm, mm_c);
    long long mm_n = 124;
    double mm_cv = 0.2, mm_horizon = 5e-2, mm_dt = 1e-4;
    std::string mm_param = "I_w_A", mm_dist = "lognormal", mm_spikes = "0";
    sc_mm->add_option("--n", mm_n, "Population size")->capture_default_str()->check(CLI::PositiveNumber);
    sc_mm->add_option("--cv", mm_cv, "Coefficient of variation")->capture_default_str();
    sc_mm->add_option("--param", mm_param, "Varied parameter name")->capture_default_str();
    sc_mm->add_option("--dist", mm_dist, "Draw distribution")->capture_default_str()
        ->check(CLI::IsMember({"lognormal", "normal"}));
    sc_mm->add_option("--spikes", mm_spikes, "Comma-separated spike times (s)")->capture_default_str();
    sc_mm->add_option("--horizon", mm_horizon, "Trace horizon (s)")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc_mm->add_option("--dt", mm_dt, "Sample interval (s)")->capture_default_str()->check(CLI::PositiveNumber);
    sc_mm->callback([&] {
        Config cfg = load_config(mm_c);
        auto base = memsim::DpiParams::from_config(cfg, "dpi");
        memsim::MismatchSpec spec;
        spec.parameter = mm_param;
        spec.dist = mm_dist == "normal" ? memsim::MismatchDist::normal
                                        : memsim::MismatchDist::lognormal;
        spec.cv = mm_cv;
        spec.n = mm_n;
        auto pop = memsim::draw_population(base, spec, resolved_seed(cfg));
        std::vector<double> times;
        for (const std::string& tok : memsim::split_list(mm_spikes, ',')) {
            double t;
            if (!memsim::parse_double(tok, t))
                throw ConfigError("--spikes: bad time '" + tok + "'");
            times.push_back(t);
        }
        auto traces = memsim::population_epsp(pop, times, mm_horizon, mm_dt);
        std::string csv = "t_s,mean_A,std_A\n";
        for (std::size_t k = 0; k < traces.t_s.size(); ++k) {
            csv += fmt_double(traces.t_s[k]);
            csv += ',';
            csv += fmt_double(traces.mean_A[k]);
            csv += ',';
            csv += fmt_double(traces.std_A[k]);
            csv += '\n';
        }
        write_file(mm_c.out_dir, "mismatch_epsp.csv", csv);
    });

    // run
    auto* sc_run = app.add_subcommand("run", "Config-driven network experiment");
    CommonOpts run_c;
    add_common(sc_run, run_c, /*config_required=*/true);
    sc_run->callback([&] {
        Config cfg = load_config(run_c);
        auto ex = memsim::Experiment::from_config(cfg);
        auto res = memsim::run(ex);

        std::string spikes = "t_s,neuron\n";
        for (const auto& sp : res.spikes) {
            spikes += fmt_double(sp.t_s);
            spikes += ',';
            spikes += fmt_int(sp.neuron);
            spikes += '\n';
        }
        write_file(run_c.out_dir, "spikes.csv", spikes);

        for (std::size_t k = 0; k < ex.record_i_syn.size(); ++k)
            write_file(run_c.out_dir, "i_syn_" + fmt_int(ex.record_i_syn[k]) + ".csv",
                       trace_csv(res.i_syn_traces[k], "t_s,i_syn_A"));
        for (std::size_t k = 0; k < ex.record_v_mem.size(); ++k) {
            std::string csv = "t_s,v_V\n";
            for (const auto& pt : res.v_mem_traces[k]) {
                csv += fmt_double(pt.t_s);
                csv += ',';
                csv += fmt_double(pt.v_V);
                csv += '\n';
            }
            write_file(run_c.out_dir, "v_mem_" + fmt_int(ex.record_v_mem[k]) + ".csv", csv);
        }

        std::string gcsv = "neuron,branch,g_S\n";
        for (std::size_t i = 0; i < res.final_g_S.size(); ++i)
            for (std::size_t bnum = 0; bnum < res.final_g_S[i].size(); ++bnum) {
                gcsv += fmt_int(static_cast<long long>(i));
                gcsv += ',';
                gcsv += fmt_int(static_cast<long long>(bnum));
                gcsv += ',';
                gcsv += fmt_double(res.final_g_S[i][bnum]);
                gcsv += '\n';
            }
        write_file(run_c.out_dir, "final_g.csv", gcsv);

        nlohmann::json j;
        j["n_spikes"] = static_cast<long long>(res.spikes.size());
        j["n_neurons"] = ex.n_neurons;
        j["duration_s"] = ex.duration_s;
        j["seed"] = ex.seed;
        if (res.has_mesh) {
            nlohmann::json m;
            m["delivered"] = res.mesh.delivered;
            m["max_link_util"] = res.mesh.max_link_util;
            m["mean_latency_s"] = res.mesh.mean_latency_s;
            m["max_queue"] = res.mesh.max_queue;
            j["mesh"] = m;
        }
        write_file(run_c.out_dir, "summary.json", j.dump(2) + "\n");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "usage: memsim <subcommand> [options]; see memsim --help\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
