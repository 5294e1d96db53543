#pragma once

// Umbrella header: truncated subproduct systems, covariant representations,
// Poisson kernels, invariant/wandering-subspace factorizations, curvature.

#include "subfock/curvature.hpp"
#include "subfock/errors.hpp"
#include "subfock/invariant.hpp"
#include "subfock/linalg.hpp"
#include "subfock/representation.hpp"
#include "subfock/subproduct.hpp"
