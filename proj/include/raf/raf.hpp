#pragma once

#include "raf/baselines.hpp"
#include "raf/cover.hpp"
#include "raf/diffusion.hpp"
#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/harness.hpp"
#include "raf/parallel.hpp"
#include "raf/pmax.hpp"
#include "raf/realization.hpp"
#include "raf/rng.hpp"
#include "raf/solver.hpp"
