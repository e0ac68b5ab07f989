#pragma once

// Umbrella header.

#include "relent/continuity.hpp"
#include "relent/convex_sets.hpp"
#include "relent/core.hpp"
#include "relent/entropy.hpp"
#include "relent/hermitian.hpp"
#include "relent/report_io.hpp"
#include "relent/solver.hpp"
#include "relent/state_io.hpp"
#include "relent/states.hpp"
