// Black-box checks of the command-line front end: exit codes, output files,
// byte-level reproducibility, and the seed/override precedence rules.
// argv[1] is the binary under test, argv[2] a writable scratch directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

int failures = 0;
std::string g_bin;
fs::path g_scratch;

void check(bool ok, const std::string& what, int line) {
    if (!ok) {
        ++failures;
        std::cerr << "FAIL (line " << line << "): " << what << "\n";
    }
}

#define CHECK(cond) check((cond), #cond, __LINE__)
#define CHECK_MSG(cond, msg) check((cond), (msg), __LINE__)

// Runs through the shell so environment prefixes work; stdout and stderr are
// captured into files inside the scratch directory.
int run_cmd(const std::string& args, const std::string& tag, const std::string& env = "") {
    fs::path out = g_scratch / (tag + ".out");
    fs::path err = g_scratch / (tag + ".err");
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += "\"" + g_bin + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::string xa = slurp(a), xb = slurp(b);
    return !xa.empty() && xa == xb;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream f(p);
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cols.push_back(cur);
        rows.push_back(std::move(cols));
    }
    return rows;
}

double to_d(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

fs::path dir(const std::string& name) { return g_scratch / name; }

std::string outflag(const std::string& name) { return " -o \"" + dir(name).string() + "\""; }

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

void exit_codes() {
    CHECK(run_cmd("--help", "help") == 0);
    CHECK(run_cmd("", "nosub") == 2);
    CHECK(run_cmd("frobnicate", "badsub") == 2);
    CHECK(run_cmd("epsc --bogus-flag", "badflag") == 2);
    CHECK(run_cmd("run", "runnocfg") == 2);  // --config is required here

    fs::path bad = g_scratch / "bad_device.ini";
    write_text(bad, "[memristor]\ng_min_S = 0\n");
    CHECK(run_cmd("iv-sweep -c \"" + bad.string() + "\"" + outflag("badrun"), "badcfg") == 1);
    std::string err = slurp(g_scratch / "badcfg.err");
    CHECK_MSG(err.find("error:") != std::string::npos, "stderr is prefixed with error:");
    CHECK_MSG(err.find("g_min_S") != std::string::npos, "stderr names the offending key");

    fs::path unk = g_scratch / "unknown_key.ini";
    write_text(unk, "[memristor]\nbogus = 1\n");
    CHECK(run_cmd("iv-sweep -c \"" + unk.string() + "\"" + outflag("unkrun"), "unkcfg") == 1);
    CHECK_MSG(slurp(g_scratch / "unkcfg.err").find("bogus") != std::string::npos,
              "unknown config key is named on stderr");

    CHECK(run_cmd("mesh-sim --rows 3 --cols 3 --events 10 --load 0", "badload") == 2);
}

void wrote_lines_and_headers() {
    CHECK(run_cmd("epsc" + outflag("ep1"), "ep1") == 0);
    std::string out = slurp(g_scratch / "ep1.out");
    CHECK_MSG(out.find("wrote ") != std::string::npos, "stdout reports the written file");
    auto rows = read_csv(dir("ep1") / "epsc.csv");
    CHECK(rows.size() == 502);  // header + 501 samples of the default horizon
    CHECK(rows[0].size() == 2 && rows[0][0] == "t_s" && rows[0][1] == "i_syn_A");
    CHECK(to_d(rows[1][1]) == 0.0);       // nothing has arrived at t = 0
    CHECK(to_d(rows[3][1]) > 0.0);        // and the pulse has by 2e-4
}

void stdp_curve_shape() {
    CHECK(run_cmd("stdp-curve" + outflag("st1"), "st1") == 0);
    CHECK(run_cmd("stdp-curve" + outflag("st2"), "st2") == 0);
    CHECK(same_bytes(dir("st1") / "stdp_curve.csv", dir("st2") / "stdp_curve.csv"));
    auto rows = read_csv(dir("st1") / "stdp_curve.csv");
    CHECK(rows.size() == 102);  // header + 101 lag points
    CHECK(rows[0][0] == "delta_t_s" && rows[0][1] == "xi_S");
    CHECK(to_d(rows[1][0]) == -50.0 * 0.5e-6);  // grid points are k * step
    CHECK(to_d(rows.back()[0]) == 50.0 * 0.5e-6);
    CHECK(to_d(rows[1][1]) == 0.0);       // far outside the waveform overlap
    CHECK(to_d(rows.back()[1]) == 0.0);
    bool has_pos = false, has_neg = false;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double xi = to_d(rows[k][1]);
        if (xi > 0.0) has_pos = true;
        if (xi < 0.0) has_neg = true;
    }
    CHECK(has_pos);
    CHECK(has_neg);
}

void pulse_program_monotone() {
    CHECK(run_cmd("pulse-program" + outflag("pp1"), "pp1") == 0);
    auto rows = read_csv(dir("pp1") / "pulse_program.csv");
    CHECK(rows.size() == 9);  // header + 8 pulses
    CHECK(rows[0][0] == "pulse" && rows[0][1] == "r_ohm");
    for (std::size_t k = 2; k < rows.size(); ++k)
        CHECK_MSG(to_d(rows[k][1]) > to_d(rows[k - 1][1]),
                  "negative pulses push resistance strictly upward");
}

void crossbar_read_decreasing() {
    CHECK(run_cmd("crossbar-read" + outflag("cb1"), "cb1") == 0);
    auto rows = read_csv(dir("cb1") / "crossbar_read.csv");
    CHECK(rows.size() == 14);  // header + 13 resistance points
    for (std::size_t k = 2; k < rows.size(); ++k) {
        CHECK(to_d(rows[k][0]) > to_d(rows[k - 1][0]));
        CHECK_MSG(to_d(rows[k][1]) < to_d(rows[k - 1][1]),
                  "peak current falls as branch resistance rises");
    }
}

void mesh_traffic_numbers() {
    CHECK(run_cmd("mesh-traffic" + outflag("mt1"), "mt1") == 0);
    std::string j = slurp(dir("mt1") / "mesh_traffic.json");
    CHECK_MSG(j.find("40000000000.0") != std::string::npos, "default board capacity is 4e10 ev/s");
    CHECK_MSG(j.find("\"per_neuron_eps\": 400.0") != std::string::npos,
              "capacity splits to 400 events per neuron");
    CHECK_MSG(j.find("\"chip_current_A\": 0.004") != std::string::npos, "chip current at 1 Hz");
    CHECK_MSG(j.find("\"board_power_min_W\": 0.4") != std::string::npos, "board power lower rail");
    CHECK_MSG(j.find("\"board_power_max_W\": 0.8") != std::string::npos, "board power upper rail");
}

void mesh_sim_determinism() {
    std::string base = "mesh-sim --events 2000 --rows 4 --cols 4 --e-pp 1e7 --record-events";
    CHECK(run_cmd(base + " --seed 5" + outflag("ms1"), "ms1") == 0);
    CHECK(run_cmd(base + " --seed 5" + outflag("ms2"), "ms2") == 0);
    CHECK(same_bytes(dir("ms1") / "mesh_stats.json", dir("ms2") / "mesh_stats.json"));
    CHECK(same_bytes(dir("ms1") / "mesh_events.csv", dir("ms2") / "mesh_events.csv"));
    CHECK(run_cmd(base + " --seed 6" + outflag("ms3"), "ms3") == 0);
    CHECK_MSG(!same_bytes(dir("ms1") / "mesh_events.csv", dir("ms3") / "mesh_events.csv"),
              "a different seed reroutes the synthetic traffic");
    // Routing a recorded event file reproduces the source run's statistics.
    CHECK(run_cmd("mesh-sim --rows 4 --cols 4 --e-pp 1e7 --in \"" +
                      (dir("ms1") / "mesh_events.csv").string() + "\"" + outflag("ms4"),
                  "ms4") == 0);
    auto rows1 = read_csv(dir("ms1") / "mesh_events.csv");
    CHECK(rows1.size() == 2001);
    CHECK_MSG(slurp(dir("ms4") / "mesh_stats.json").find("\"delivered\": 2000") !=
                  std::string::npos,
              "replayed traffic delivers every event");
}

void seed_precedence() {
    std::string mm = "mismatch-epsp --n 16";
    CHECK(run_cmd(mm + " --seed 7" + outflag("sa"), "sa") == 0);

    fs::path cfg = g_scratch / "seed3.ini";
    write_text(cfg, "[experiment]\nseed = 3\n");
    CHECK(run_cmd(mm + " -c \"" + cfg.string() + "\" --seed 7" + outflag("sb"), "sb") == 0);
    CHECK_MSG(same_bytes(dir("sa") / "mismatch_epsp.csv", dir("sb") / "mismatch_epsp.csv"),
              "--seed outranks the config file");

    CHECK(run_cmd(mm + outflag("sc"), "sc", "MEMSIM_SEED=7") == 0);
    CHECK_MSG(same_bytes(dir("sa") / "mismatch_epsp.csv", dir("sc") / "mismatch_epsp.csv"),
              "MEMSIM_SEED fills in when nothing else sets the seed");

    CHECK(run_cmd(mm + " -c \"" + cfg.string() + "\"" + outflag("sd"), "sd", "MEMSIM_SEED=7") == 0);
    CHECK(run_cmd(mm + " --seed 3" + outflag("se"), "se") == 0);
    CHECK_MSG(same_bytes(dir("sd") / "mismatch_epsp.csv", dir("se") / "mismatch_epsp.csv"),
              "a config seed outranks MEMSIM_SEED");
    CHECK_MSG(!same_bytes(dir("sa") / "mismatch_epsp.csv", dir("sd") / "mismatch_epsp.csv"),
              "seed 3 and seed 7 populations differ");

    CHECK(run_cmd(mm + " --set experiment.seed=7" + outflag("sf"), "sf") == 0);
    CHECK_MSG(same_bytes(dir("sa") / "mismatch_epsp.csv", dir("sf") / "mismatch_epsp.csv"),
              "--set experiment.seed behaves like a config seed");
}

void set_overrides() {
    fs::path cfg = g_scratch / "dpi1.ini";
    write_text(cfg, "[dpi]\nI_w_A = 1e-9\n");
    CHECK(run_cmd("epsc -c \"" + cfg.string() + "\"" + outflag("ov_file"), "ovf") == 0);
    CHECK(run_cmd("epsc --set dpi.I_w_A=2e-9" + outflag("ov_set"), "ovs") == 0);
    CHECK(run_cmd("epsc -c \"" + cfg.string() + "\" --set dpi.I_w_A=2e-9" + outflag("ov_both"),
                  "ovb") == 0);
    CHECK_MSG(same_bytes(dir("ov_set") / "epsc.csv", dir("ov_both") / "epsc.csv"),
              "--set outranks the file value");
    CHECK_MSG(!same_bytes(dir("ov_file") / "epsc.csv", dir("ov_both") / "epsc.csv"),
              "the override actually changes the trace");
    CHECK(run_cmd("epsc --set noequals" + outflag("ov_bad"), "ovbad") == 1);
}

void run_subcommand() {
    fs::path cfg = g_scratch / "net.ini";
    write_text(cfg,
               "[experiment]\n"
               "duration_s = 0.02\n"
               "[stimulus]\n"
               "poisson_a = 0:0:2000\n"
               "[record]\n"
               "i_syn = 0\n"
               "v_mem = 0\n");
    std::string base = "run -c \"" + cfg.string() + "\"";
    CHECK(run_cmd(base + outflag("r1"), "r1") == 0);
    CHECK(fs::exists(dir("r1") / "spikes.csv"));
    CHECK(fs::exists(dir("r1") / "i_syn_0.csv"));
    CHECK(fs::exists(dir("r1") / "v_mem_0.csv"));
    CHECK(fs::exists(dir("r1") / "final_g.csv"));
    std::string j = slurp(dir("r1") / "summary.json");
    CHECK(j.find("\"n_spikes\"") != std::string::npos);
    CHECK(j.find("\"seed\": 1") != std::string::npos);
    auto g_rows = read_csv(dir("r1") / "final_g.csv");
    CHECK(g_rows.size() == 2 && g_rows[0][0] == "neuron");

    CHECK(run_cmd(base + outflag("r2"), "r2") == 0);
    CHECK_MSG(same_bytes(dir("r1") / "i_syn_0.csv", dir("r2") / "i_syn_0.csv"),
              "an identical experiment reproduces its trace byte for byte");
    CHECK(run_cmd(base + " --seed 9" + outflag("r3"), "r3") == 0);
    CHECK_MSG(!same_bytes(dir("r1") / "i_syn_0.csv", dir("r3") / "i_syn_0.csv"),
              "a different seed redraws the stimulus");
}

void kernel_backend_env() {
    std::string cmd = "write-offset --set crossbar.rows=16 --set crossbar.cols=16";
    CHECK(run_cmd(cmd + outflag("kb_s"), "kbs", "MEMSIM_KERNELS=scalar") == 0);
    int rc = run_cmd(cmd + outflag("kb_a"), "kba", "MEMSIM_KERNELS=avx2");
    if (rc == 0) {
        CHECK_MSG(same_bytes(dir("kb_s") / "write_offset.csv", dir("kb_a") / "write_offset.csv"),
                  "scalar and avx2 backends emit identical bytes here");
    } else {
        CHECK_MSG(rc == 1, "hosts without avx2 report a clean error");
    }
    CHECK(run_cmd(cmd + outflag("kb_x"), "kbx", "MEMSIM_KERNELS=bogus") == 1);
    CHECK_MSG(slurp(g_scratch / "kbx.err").find("MEMSIM_KERNELS") != std::string::npos,
              "the backend override is named in the error");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: test_cli <memsim-binary> <scratch-dir>\n";
        return 2;
    }
    g_bin = argv[1];
    g_scratch = argv[2];
    fs::remove_all(g_scratch);
    fs::create_directories(g_scratch);

    exit_codes();
    wrote_lines_and_headers();
    stdp_curve_shape();
    pulse_program_monotone();
    crossbar_read_decreasing();
    mesh_traffic_numbers();
    mesh_sim_determinism();
    seed_precedence();
    set_overrides();
    run_subcommand();
    kernel_backend_env();

    if (failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        return 0;
    }
    std::cerr << "test_cli: " << failures << " check(s) failed\n";
    return 1;
}
