#pragma once

// Dense inner loops of the value-iteration planner.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, a SIMD variant. Variants vectorize across rows and keep the
// per-row accumulation order of the scalar code, so every variant produces
// bit-identical results. The tests enforce that.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace oe::kernels {

/// q[r] = expected_reward[r] + gamma * sum_j dist_t[j * rows + r] * values[j]
///
/// `dist_t` is the transition matrix stored successor-major (transposed), so
/// row r's successor weights are strided by `rows`. The sum over j runs in
/// ascending order.
using BackupFn = void (*)(std::span<const double> dist_t, std::span<const double> expected_reward,
                          std::span<const double> values, double gamma, std::span<double> q);

/// max_i |a[i] - b[i]|. NaN in either input propagates to the result.
using MaxAbsDiffFn = double (*)(std::span<const double> a, std::span<const double> b);

struct KernelSet {
    std::string_view name;
    BackupFn backup;
    MaxAbsDiffFn max_abs_diff;
};

namespace scalar {
void backup(std::span<const double> dist_t, std::span<const double> expected_reward,
            std::span<const double> values, double gamma, std::span<double> q);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

/// The scalar reference set. Always available.
const KernelSet& scalar_kernels();

/// Every kernel set compiled into this build and supported by the running CPU,
/// scalar first.
std::vector<const KernelSet*> available_kernels();

/// The kernel set used by default: the widest supported variant, unless the
/// OE_KERNEL environment variable names another available set ("scalar",
/// "avx2", "neon"). Resolved once per process.
const KernelSet& active_kernels();

/// Looks up an available set by name; nullptr when absent or unsupported.
const KernelSet* find_kernels(std::string_view name);

}  // namespace oe::kernels
