#pragma once

#include "memsim/config.hpp"
#include "memsim/dpi.hpp"
#include "memsim/memristor.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace memsim {

// N memristive branches feeding one shared DPI integrator. A pre-synaptic
// spike on branch k drives the DPI with the branch conductance normalized
// by g_ref; the temporal dynamics are common to all branches.
struct HybridSynapseBank {
    std::vector<MemristorState> branches;
    MemristorParams device;
    DpiParams dpi_params;
    DpiState dpi;
    double g_ref_S = 0.0;

    double g_scale(std::size_t branch) const;
    static HybridSynapseBank make(std::size_t n_branches, const MemristorParams& device,
                                  const DpiParams& dpi_params, double g_init_S = 0.0,
                                  double g_ref_S = 0.0);
};

HybridSynapseBank on_pre_spike(HybridSynapseBank bank, std::size_t branch_index);

// Per-resistance single-spike peak: one branch is pinned to 1/r, one spike
// is fired from rest, and the end-of-pulse current is recorded.
std::vector<std::pair<double, double>> epsc_vs_resistance(const HybridSynapseBank& bank_template,
                                                          const std::vector<double>& r_ohm);

struct CrossbarConfig {
    std::size_t rows = 256;
    std::size_t cols = 256;
    double r_wire_ohm = 5.0;
    double r_device_nominal_ohm = 5000.0;

    void validate() const;
    static CrossbarConfig from_config(const Config& cfg, const std::string& section);
};

// Series lumped divider along the selected row and column: the write
// amplitude a cell actually sees shrinks with its electrode path length.
double effective_write_voltage(const CrossbarConfig& cfg, std::size_t i, std::size_t j,
                               double v_applied_V);

// Row-major rows x cols map of effective_write_voltage over the whole array.
std::vector<double> write_offset_map(const CrossbarConfig& cfg, double v_applied_V);

// One programming step applied to every cell in parallel: each conductance
// drifts under the effective write voltage at its own array position, with
// the same threshold rule and clamping as a single-device step.
void array_write_step(const CrossbarConfig& cfg, const MemristorParams& device,
                      std::vector<double>& g_S, double v_applied_V, double dt_s);

} // namespace memsim
