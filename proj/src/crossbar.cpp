#include "memsim/crossbar.hpp"

#include "memsim/kernels/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace memsim {

double HybridSynapseBank::g_scale(std::size_t branch) const {
    if (branch >= branches.size())
        throw std::invalid_argument("bank: branch index out of range");
    return std::clamp(branches[branch].g_S / g_ref_S, 0.0, 1.0);
}

HybridSynapseBank HybridSynapseBank::make(std::size_t n_branches, const MemristorParams& device,
                                          const DpiParams& dpi_params, double g_init_S,
                                          double g_ref_S) {
    if (n_branches < 1) throw std::invalid_argument("bank: need at least one branch");
    device.validate();
    dpi_params.validate();
    HybridSynapseBank b;
    b.device = device;
    b.dpi_params = dpi_params;
    b.g_ref_S = g_ref_S > 0.0 ? g_ref_S : device.g_max_S;
    double g0 = g_init_S > 0.0 ? g_init_S : device.g_mid_S();
    if (g0 < device.g_min_S || g0 > device.g_max_S)
        throw std::invalid_argument("bank: initial conductance outside device bounds");
    b.branches.assign(n_branches, MemristorState{g0});
    return b;
}

HybridSynapseBank on_pre_spike(HybridSynapseBank bank, std::size_t branch_index) {
    double scale = bank.g_scale(branch_index);
    bank.dpi = on_spike(bank.dpi, bank.dpi_params, scale);
    return bank;
}

std::vector<std::pair<double, double>> epsc_vs_resistance(const HybridSynapseBank& bank_template,
                                                          const std::vector<double>& r_ohm) {
    std::vector<std::pair<double, double>> out;
    out.reserve(r_ohm.size());
    for (double r : r_ohm) {
        if (!(r > 0.0)) throw std::invalid_argument("epsc_vs_resistance: resistance must be > 0");
        HybridSynapseBank bank = bank_template;
        bank.branches[0].g_S = 1.0 / r;
        bank.dpi = DpiState{0.0, 0.0};
        bank = on_pre_spike(std::move(bank), 0);
        // the current rises monotonically from rest while the pulse is on,
        // so the end-of-pulse value is the trace peak
        out.emplace_back(r, bank.dpi.i_syn_A);
    }
    return out;
}

void CrossbarConfig::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("crossbar: rows and cols must be >= 1");
    if (r_wire_ohm < 0.0) throw std::invalid_argument("crossbar: r_wire_ohm must be >= 0");
    if (!(r_device_nominal_ohm > 0.0))
        throw std::invalid_argument("crossbar: r_device_nominal_ohm must be > 0");
}

CrossbarConfig CrossbarConfig::from_config(const Config& cfg, const std::string& section) {
    CrossbarConfig c;
    cfg.require_known_keys(section, {"rows", "cols", "r_wire_ohm", "r_device_nominal_ohm"});
    c.rows = static_cast<std::size_t>(cfg.get_int(section, "rows", static_cast<long long>(c.rows)));
    c.cols = static_cast<std::size_t>(cfg.get_int(section, "cols", static_cast<long long>(c.cols)));
    c.r_wire_ohm = cfg.get_double(section, "r_wire_ohm", c.r_wire_ohm);
    c.r_device_nominal_ohm = cfg.get_double(section, "r_device_nominal_ohm", c.r_device_nominal_ohm);
    c.validate();
    return c;
}

double effective_write_voltage(const CrossbarConfig& cfg, std::size_t i, std::size_t j,
                               double v_applied_V) {
    if (i >= cfg.rows || j >= cfg.cols)
        throw std::invalid_argument("effective_write_voltage: cell outside the array");
    // same grouping as the row kernel so pointwise and full-map results match
    double r_dev = cfg.r_device_nominal_ohm;
    double r_base = static_cast<double>(i + 2) * cfg.r_wire_ohm;
    double num = v_applied_V * r_dev;
    double base = r_dev + r_base;
    return num / (base + static_cast<double>(j) * cfg.r_wire_ohm);
}

std::vector<double> write_offset_map(const CrossbarConfig& cfg, double v_applied_V) {
    std::vector<double> map(cfg.rows * cfg.cols);
    const auto& K = kernels::active();
    for (std::size_t i = 0; i < cfg.rows; ++i) {
        double r_base = static_cast<double>(i + 2) * cfg.r_wire_ohm;
        K.divider_row(map.data() + i * cfg.cols, cfg.cols, v_applied_V, cfg.r_device_nominal_ohm,
                      r_base, cfg.r_wire_ohm);
    }
    return map;
}

void array_write_step(const CrossbarConfig& cfg, const MemristorParams& device,
                      std::vector<double>& g_S, double v_applied_V, double dt_s) {
    if (g_S.size() != cfg.rows * cfg.cols)
        throw std::invalid_argument("array_write_step: conductance map does not match the array shape");
    if (!(dt_s > 0.0)) throw std::invalid_argument("array_write_step: dt must be > 0");
    if (device.mode != MemristorMode::analog)
        throw std::invalid_argument("array_write_step: devices are not in analog mode");
    std::vector<double> v_eff = write_offset_map(cfg, v_applied_V);
    kernels::DriftParams dp;
    dp.v_set = device.v_set_V;
    dp.v_reset = device.v_reset_V;
    dp.k_set = device.k_set_SpVs;
    dp.k_reset = device.k_reset_SpVs;
    dp.g_min = device.g_min_S;
    dp.g_max = device.g_max_S;
    dp.dt = dt_s;
    kernels::active().drift_step(g_S.data(), v_eff.data(), g_S.size(), dp);
}

} // namespace memsim
