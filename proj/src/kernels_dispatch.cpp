#include <cstdlib>
#include <string_view>

#include "nlsrep/kernels.hpp"

namespace nlsrep::kernels {

#if defined(NLSREP_BUILD_AVX2)
namespace detail {
const KernelTable& avx2_table_unchecked() noexcept;
}
#endif

const KernelTable* avx2_table() noexcept {
#if defined(NLSREP_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  if (supported) return &detail::avx2_table_unchecked();
#endif
  return nullptr;
}

const KernelTable& active() noexcept {
  static const KernelTable& table = [&]() -> const KernelTable& {
    const char* env = std::getenv("NLSREP_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

}  // namespace nlsrep::kernels
