#include "memsim/kernels/kernels.hpp"

namespace memsim::kernels {

namespace {

void exp_approach_scalar(double* out, std::size_t n, double target, double delta0, double ratio) {
    double d = delta0;
    for (std::size_t k = 0; k < n; ++k) {
        d *= ratio;
        out[k] = target + d;
    }
}

void vec_accumulate_diff_scalar(double* acc, const double* x, const double* ref, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] - ref[i];
}

void vec_accumulate_sqdiff_scalar(double* acc, const double* x, const double* ref, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - ref[i];
        acc[i] += d * d;
    }
}

void divider_row_scalar(double* out, std::size_t n, double v, double r_dev, double r_base, double r_step) {
    double num = v * r_dev;
    double base = r_dev + r_base;
    for (std::size_t j = 0; j < n; ++j)
        out[j] = num / (base + static_cast<double>(j) * r_step);
}

void drift_step_scalar(double* g, const double* v, std::size_t n, const DriftParams& p) {
    for (std::size_t i = 0; i < n; ++i) {
        double vi = v[i];
        double gi = g[i];
        if (vi > p.v_set)
            gi += p.k_set * (vi - p.v_set) * p.dt;
        else if (vi < p.v_reset)
            gi += p.k_reset * (vi - p.v_reset) * p.dt;
        if (gi < p.g_min) gi = p.g_min;
        if (gi > p.g_max) gi = p.g_max;
        g[i] = gi;
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {
        exp_approach_scalar,
        vec_accumulate_diff_scalar,
        vec_accumulate_sqdiff_scalar,
        divider_row_scalar,
        drift_step_scalar,
    };
    return t;
}

} // namespace memsim::kernels
