#include "oe/kernels.hpp"

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace oe::kernels::neon {

void backup(std::span<const double> dist_t, std::span<const double> expected_reward,
            std::span<const double> values, double gamma, std::span<double> q) {
    const std::size_t rows = q.size();
    const std::size_t cols = values.size();
    const double* d = dist_t.data();
    const float64x2_t g = vdupq_n_f64(gamma);

    std::size_t r = 0;
    for (; r + 2 <= rows; r += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < cols; ++j) {
            // separate mul/add: vfmaq would round differently from the scalar path
            acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(d + j * rows + r), vdupq_n_f64(values[j])));
        }
        const float64x2_t er = vld1q_f64(expected_reward.data() + r);
        vst1q_f64(q.data() + r, vaddq_f64(er, vmulq_f64(g, acc)));
    }
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
    float64x2_t m = vdupq_n_f64(0.0);
    bool nan = false;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t absd = vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
        const uint64x2_t ord = vceqq_f64(absd, absd);
        nan |= (vgetq_lane_u64(ord, 0) & vgetq_lane_u64(ord, 1)) != ~uint64_t{0};
        m = vmaxnmq_f64(m, absd);
    }
    double best = vmaxvq_f64(m);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        nan |= std::isnan(d);
        if (d > best) best = d;
    }
    return nan ? std::numeric_limits<double>::quiet_NaN() : best;
}

}  // namespace oe::kernels::neon
