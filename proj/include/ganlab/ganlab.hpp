#pragma once

// Convenience umbrella: the whole library in one include.

#include "ganlab/checkpoint.hpp"
#include "ganlab/config.hpp"
#include "ganlab/dataset.hpp"
#include "ganlab/distributions.hpp"
#include "ganlab/gan.hpp"
#include "ganlab/grid_density.hpp"
#include "ganlab/io.hpp"
#include "ganlab/matrix.hpp"
#include "ganlab/mlp.hpp"
#include "ganlab/numeric.hpp"
#include "ganlab/parzen.hpp"
#include "ganlab/rng.hpp"
