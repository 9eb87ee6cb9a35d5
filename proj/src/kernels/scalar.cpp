#include "oe/kernels.hpp"

#include <cmath>
#include <limits>

namespace oe::kernels::scalar {

void backup(std::span<const double> dist_t, std::span<const double> expected_reward,
            std::span<const double> values, double gamma, std::span<double> q) {
    const std::size_t rows = q.size();
    const std::size_t cols = values.size();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += dist_t[j * rows + r] * values[j];
        }
        q[r] = expected_reward[r] + gamma * acc;
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    bool nan = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a[i] - b[i]);
        nan |= std::isnan(d);
        if (d > m) m = d;
    }
    return nan ? std::numeric_limits<double>::quiet_NaN() : m;
}

}  // namespace oe::kernels::scalar
