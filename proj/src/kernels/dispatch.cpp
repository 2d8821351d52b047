#include "memsim/kernels/kernels.hpp"
#include "memsim/kernels/cpu_features.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace memsim::kernels {

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#ifdef MEMSIM_WITH_AVX2
            return cpu_has_avx2();
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Backend b) {
    if (b == Backend::avx2) {
#ifdef MEMSIM_WITH_AVX2
        if (cpu_has_avx2()) return avx2_table();
#endif
        throw std::runtime_error("avx2 kernel backend unavailable on this host");
    }
    return scalar_table();
}

Backend active_backend() {
    static Backend chosen = [] {
        const char* env = std::getenv("MEMSIM_KERNELS");
        if (env && *env) {
            std::string want(env);
            if (want == "scalar") return Backend::scalar;
            if (want == "avx2") {
                if (!backend_available(Backend::avx2))
                    throw std::runtime_error("MEMSIM_KERNELS=avx2 but avx2 is unavailable here");
                return Backend::avx2;
            }
            throw std::runtime_error("MEMSIM_KERNELS must be 'scalar' or 'avx2', got '" + want + "'");
        }
        return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
    }();
    return chosen;
}

const KernelTable& active() { return table(active_backend()); }

} // namespace memsim::kernels
