#pragma once

// Rescaling certificates for total vector families: tail towers, adapted
// orthonormal systems, tail-supported approximants, the contraction
// perturbation operator and its dual family, and weighted lower frame
// inequalities with explicit coefficients.

#include "tailframe/adapted_basis.hpp"
#include "tailframe/approximants.hpp"
#include "tailframe/errors.hpp"
#include "tailframe/frame_weights.hpp"
#include "tailframe/instance.hpp"
#include "tailframe/numeric.hpp"
#include "tailframe/oracles.hpp"
#include "tailframe/pipeline.hpp"
#include "tailframe/random.hpp"
#include "tailframe/report.hpp"
#include "tailframe/resolution.hpp"
#include "tailframe/tail_tower.hpp"
#include "tailframe/version.hpp"
