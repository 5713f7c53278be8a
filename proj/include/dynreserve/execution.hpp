#pragma once

namespace dynreserve {

// Kernels that loop over independent scenarios or intervals accept this tag.
// `serial` is the reference path; `parallel` uses OpenMP and must produce
// bit-identical results.
enum class Execution { serial, parallel };

}  // namespace dynreserve
