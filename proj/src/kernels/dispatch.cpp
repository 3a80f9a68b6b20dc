#include <cstdlib>
#include <cstring>

#include "treeflow/kernels.hpp"

namespace treeflow::kernels {

#ifdef TREEFLOW_HAVE_AVX2
namespace detail {
const Table& avx2_table();
}
#endif

const Table* avx2() {
#ifdef TREEFLOW_HAVE_AVX2
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &detail::avx2_table();
#endif
  return nullptr;
}

const Table& active() {
  static const Table* chosen = [] {
    const char* force = std::getenv("TREEFLOW_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0) return &scalar();
    const Table* t = avx2();
    return t != nullptr ? t : &scalar();
  }();
  return *chosen;
}

}  // namespace treeflow::kernels
