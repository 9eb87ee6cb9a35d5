#include "oe/kernels.hpp"

#include <cstdlib>

namespace oe::kernels {

#if defined(OE_HAVE_AVX2_KERNELS)
namespace avx2 {
void backup(std::span<const double>, std::span<const double>, std::span<const double>, double,
            std::span<double>);
double max_abs_diff(std::span<const double>, std::span<const double>);
}  // namespace avx2
#endif

#if defined(OE_HAVE_NEON_KERNELS)
namespace neon {
void backup(std::span<const double>, std::span<const double>, std::span<const double>, double,
            std::span<double>);
double max_abs_diff(std::span<const double>, std::span<const double>);
}  // namespace neon
#endif

namespace {

const KernelSet kScalar{"scalar", &scalar::backup, &scalar::max_abs_diff};
#if defined(OE_HAVE_AVX2_KERNELS)
const KernelSet kAvx2{"avx2", &avx2::backup, &avx2::max_abs_diff};
#endif
#if defined(OE_HAVE_NEON_KERNELS)
const KernelSet kNeon{"neon", &neon::backup, &neon::max_abs_diff};
#endif

const KernelSet& resolve() {
    if (const char* forced = std::getenv("OE_KERNEL")) {
        if (const KernelSet* k = find_kernels(forced)) return *k;
    }
    return *available_kernels().back();
}

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

std::vector<const KernelSet*> available_kernels() {
    std::vector<const KernelSet*> out{&kScalar};
#if defined(OE_HAVE_AVX2_KERNELS)
    if (__builtin_cpu_supports("avx2")) out.push_back(&kAvx2);
#endif
#if defined(OE_HAVE_NEON_KERNELS)
    out.push_back(&kNeon);
#endif
    return out;
}

const KernelSet* find_kernels(std::string_view name) {
    for (const KernelSet* k : available_kernels()) {
        if (k->name == name) return k;
    }
    return nullptr;
}

const KernelSet& active_kernels() {
    static const KernelSet& chosen = resolve();
    return chosen;
}

}  // namespace oe::kernels
