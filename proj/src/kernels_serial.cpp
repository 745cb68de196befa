#include <vector>

#include "radar/kernels.hpp"

namespace radar::kernels::serial {

#define RADAR_PARALLEL_FOR
#include "kernels_body.inc"
#undef RADAR_PARALLEL_FOR

} // namespace radar::kernels::serial
