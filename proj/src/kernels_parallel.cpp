#include <vector>

#include "radar/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#define RADAR_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define RADAR_PARALLEL_FOR
#endif

namespace radar::kernels {

namespace parallel {
#include "kernels_body.inc"
}

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace radar::kernels

#undef RADAR_PARALLEL_FOR
