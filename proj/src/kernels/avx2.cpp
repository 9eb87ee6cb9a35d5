// Compiled with -mavx2; only entered after a runtime CPU check.

#include "oe/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace oe::kernels::avx2 {

void backup(std::span<const double> dist_t, std::span<const double> expected_reward,
            std::span<const double> values, double gamma, std::span<double> q) {
    const std::size_t rows = q.size();
    const std::size_t cols = values.size();
    const double* d = dist_t.data();
    const __m256d g = _mm256_set1_pd(gamma);

    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < cols; ++j) {
            const __m256d v = _mm256_set1_pd(values[j]);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(d + j * rows + r), v));
        }
        const __m256d er = _mm256_loadu_pd(expected_reward.data() + r);
        _mm256_storeu_pd(q.data() + r, _mm256_add_pd(er, _mm256_mul_pd(g, acc)));
    }
    // tail
    for (; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += d[j * rows + r] * values[j];
        }
        q[r] = expected_reward[r] + gamma * acc;
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    __m256d unordered = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        const __m256d absd = _mm256_andnot_pd(sign, diff);
        unordered = _mm256_or_pd(unordered, _mm256_cmp_pd(absd, absd, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, absd);
    }
    bool nan = _mm256_movemask_pd(unordered) != 0;
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double best = 0.0;
    for (double x : lanes) {
        if (x > best) best = x;
    }
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        nan |= std::isnan(d);
        if (d > best) best = d;
    }
    return nan ? std::numeric_limits<double>::quiet_NaN() : best;
}

}  // namespace oe::kernels::avx2
