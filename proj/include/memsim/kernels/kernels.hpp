#pragma once

#include <cstddef>

namespace memsim::kernels {

struct DriftParams {
    double v_set;
    double v_reset;
    double k_set;
    double k_reset;
    double g_min;
    double g_max;
    double dt;
};

// Batched arithmetic used by the hot paths. Every entry has a scalar
// reference implementation and, on x86-64, an AVX2 one. The elementwise
// kernels are bit-identical across backends (the build disables FP
// contraction and the vector code uses no FMA); exp_approach reorders the
// recurrence across lanes and is only equal to ~1e-9 relative.
struct KernelTable {
    // out[k] = target + delta0 * ratio^(k+1), k = 0..n-1
    void (*exp_approach)(double* out, std::size_t n, double target, double delta0, double ratio);
    // acc[i] += x[i] - ref[i]. Summing against a reference member keeps the
    // residual exactly zero when all members are identical, so a population
    // mean reconstructed as ref + acc/m reproduces the member bit for bit.
    void (*vec_accumulate_diff)(double* acc, const double* x, const double* ref, std::size_t n);
    // acc[i] += (x[i] - ref[i])^2
    void (*vec_accumulate_sqdiff)(double* acc, const double* x, const double* ref, std::size_t n);
    // out[j] = (v * r_dev) / ((r_dev + r_base) + j * r_step)
    void (*divider_row)(double* out, std::size_t n, double v, double r_dev, double r_base, double r_step);
    // one threshold-drift step per element, result clamped to [g_min, g_max]
    void (*drift_step)(double* g, const double* v, std::size_t n, const DriftParams& p);
};

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);

// Throws std::runtime_error when the requested backend cannot run here.
const KernelTable& table(Backend b);

// Best available backend, overridable with MEMSIM_KERNELS=scalar|avx2.
Backend active_backend();
const KernelTable& active();

// Defined in the per-backend translation units.
const KernelTable& scalar_table();
const KernelTable& avx2_table();

} // namespace memsim::kernels
