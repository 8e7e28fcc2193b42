#pragma once

// Umbrella header for the semicircular-mixture toolkit.

#include "scmix/clt.hpp"
#include "scmix/config.hpp"
#include "scmix/csv.hpp"
#include "scmix/moments.hpp"
#include "scmix/montecarlo.hpp"
#include "scmix/pairings.hpp"
#include "scmix/parallel.hpp"
#include "scmix/rmt.hpp"
#include "scmix/rng.hpp"
#include "scmix/sampler.hpp"
#include "scmix/solver.hpp"
#include "scmix/spectral.hpp"
#include "scmix/types.hpp"
