#include "nehari_lab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "nehari_lab/errors.hpp"

namespace nehari_lab::kernels {

namespace {

const KernelTable kScalar{Backend::scalar, &scalar::power_sums, &scalar::moment_derivative};
#if defined(NEHARI_LAB_HAVE_AVX2)
const KernelTable kAvx2{Backend::avx2, &avx2::power_sums, &avx2::moment_derivative};
#endif

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> s{nullptr};
  return s;
}

}  // namespace

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(NEHARI_LAB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Backend best_available() { return supported(Backend::avx2) ? Backend::avx2 : Backend::scalar; }

const char* name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const KernelTable& table(Backend b) {
  if (!supported(b)) throw ConfigError(std::string("kernel backend not supported on this machine: ") + name(b));
#if defined(NEHARI_LAB_HAVE_AVX2)
  if (b == Backend::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active() {
  const KernelTable* t = slot().load(std::memory_order_acquire);
  if (t) return *t;
  Backend b = best_available();
  if (const char* env = std::getenv("NEHARI_LAB_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") b = Backend::scalar;
    else if (v == "avx2") b = Backend::avx2;
    else if (v != "auto" && !v.empty()) throw ConfigError("NEHARI_LAB_KERNELS must be scalar, avx2 or auto");
  }
  const KernelTable* chosen = &table(b);
  slot().store(chosen, std::memory_order_release);
  return *chosen;
}

void select(Backend b) { slot().store(&table(b), std::memory_order_release); }

}  // namespace nehari_lab::kernels
