#include "memsim/kernels/cpu_features.hpp"

namespace memsim::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

} // namespace memsim::kernels
