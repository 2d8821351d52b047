#if defined(__AVX2__)

#include "memsim/kernels/kernels.hpp"

#include <immintrin.h>

namespace memsim::kernels {

namespace {

// Lane k runs the recurrence with stride-4 jumps: start at delta0*r^(k+1),
// multiply by r^4 per iteration. Rounding differs from the scalar chain.
void exp_approach_avx2(double* out, std::size_t n, double target, double delta0, double ratio) {
    std::size_t k = 0;
    double d_tail = delta0;
    if (n >= 4) {
        double d0 = delta0 * ratio;
        double d1 = d0 * ratio;
        double d2 = d1 * ratio;
        double d3 = d2 * ratio;
        double r2 = ratio * ratio;
        double r4 = r2 * r2;
        __m256d vd = _mm256_setr_pd(d0, d1, d2, d3);
        __m256d vt = _mm256_set1_pd(target);
        __m256d vr4 = _mm256_set1_pd(r4);
        double last3 = d3;  // scalar shadow of lane 3 at the latest store
        for (; k + 4 <= n; k += 4) {
            _mm256_storeu_pd(out + k, _mm256_add_pd(vt, vd));
            last3 = d3;
            d3 *= r4;
            vd = _mm256_mul_pd(vd, vr4);
        }
        d_tail = last3;
    }
    for (; k < n; ++k) {
        d_tail *= ratio;
        out[k] = target + d_tail;
    }
}

void vec_accumulate_diff_avx2(double* acc, const double* x, const double* ref, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(ref + i));
        __m256d a = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(a, d));
    }
    for (; i < n; ++i) acc[i] += x[i] - ref[i];
}

void vec_accumulate_sqdiff_avx2(double* acc, const double* x, const double* ref, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(ref + i));
        __m256d a = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_mul_pd(d, d)));
    }
    for (; i < n; ++i) {
        double d = x[i] - ref[i];
        acc[i] += d * d;
    }
}

void divider_row_avx2(double* out, std::size_t n, double v, double r_dev, double r_base, double r_step) {
    double num = v * r_dev;
    double base = r_dev + r_base;
    __m256d vnum = _mm256_set1_pd(num);
    __m256d vbase = _mm256_set1_pd(base);
    __m256d vstep = _mm256_set1_pd(r_step);
    __m256d vj = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    __m256d vinc = _mm256_set1_pd(4.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d den = _mm256_add_pd(vbase, _mm256_mul_pd(vj, vstep));
        _mm256_storeu_pd(out + j, _mm256_div_pd(vnum, den));
        vj = _mm256_add_pd(vj, vinc);
    }
    for (; j < n; ++j)
        out[j] = num / (base + static_cast<double>(j) * r_step);
}

void drift_step_avx2(double* g, const double* v, std::size_t n, const DriftParams& p) {
    __m256d vset = _mm256_set1_pd(p.v_set);
    __m256d vreset = _mm256_set1_pd(p.v_reset);
    __m256d kset = _mm256_set1_pd(p.k_set);
    __m256d kreset = _mm256_set1_pd(p.k_reset);
    __m256d gmin = _mm256_set1_pd(p.g_min);
    __m256d gmax = _mm256_set1_pd(p.g_max);
    __m256d dt = _mm256_set1_pd(p.dt);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vi = _mm256_loadu_pd(v + i);
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d m_set = _mm256_cmp_pd(vi, vset, _CMP_GT_OQ);
        __m256d m_reset = _mm256_andnot_pd(m_set, _mm256_cmp_pd(vi, vreset, _CMP_LT_OQ));
        __m256d a_set = _mm256_mul_pd(_mm256_mul_pd(kset, _mm256_sub_pd(vi, vset)), dt);
        __m256d a_reset = _mm256_mul_pd(_mm256_mul_pd(kreset, _mm256_sub_pd(vi, vreset)), dt);
        __m256d adj = _mm256_or_pd(_mm256_and_pd(m_set, a_set), _mm256_and_pd(m_reset, a_reset));
        gi = _mm256_add_pd(gi, adj);
        gi = _mm256_max_pd(gi, gmin);
        gi = _mm256_min_pd(gi, gmax);
        _mm256_storeu_pd(g + i, gi);
    }
    for (; i < n; ++i) {
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

const KernelTable& avx2_table() {
    static const KernelTable t = {
        exp_approach_avx2,
        vec_accumulate_diff_avx2,
        vec_accumulate_sqdiff_avx2,
        divider_row_avx2,
        drift_step_avx2,
    };
    return t;
}

} // namespace memsim::kernels

#endif // __AVX2__
