#pragma once

// Best-subset sparse regression by binary optimization: the penalized
// least-squares objective is compiled into a quartic polynomial over
// selection bits, reduced to a QUBO, minimized by exhaustive enumeration or
// simulated annealing, and the chosen subset is refit exactly.

#include "dataset.hpp"
#include "linalg.hpp"
#include "pbf.hpp"
#include "pipeline.hpp"
#include "qubo.hpp"
#include "regress.hpp"
#include "rng.hpp"
#include "samplers.hpp"
#include "util.hpp"
