#pragma once

#include "normkc/ball_intersection.hpp"
#include "normkc/errors.hpp"
#include "normkc/io.hpp"
#include "normkc/metrics.hpp"
#include "normkc/norms.hpp"
#include "normkc/oracle.hpp"
#include "normkc/rng.hpp"
#include "normkc/scatter.hpp"
#include "normkc/solver.hpp"
