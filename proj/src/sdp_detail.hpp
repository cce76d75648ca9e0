#pragma once

#include "sisstab/sdp.hpp"

namespace sisstab::sdp::detail {

// Callers validate the problem first.
SdpSolution solve_splitting(const SdpProblem& p, const SdpOptions& opts);
SdpSolution solve_interior(const SdpProblem& p, const SdpOptions& opts);

}  // namespace sisstab::sdp::detail
