#pragma once

namespace memsim::kernels {

bool cpu_has_avx2();

} // namespace memsim::kernels
