#pragma once

#include "traptail/asympt.hpp"
#include "traptail/complex_gamma.hpp"
#include "traptail/errors.hpp"
#include "traptail/exact.hpp"
#include "traptail/grid.hpp"
#include "traptail/json_out.hpp"
#include "traptail/model.hpp"
#include "traptail/numeric.hpp"
#include "traptail/rng.hpp"
#include "traptail/serialize.hpp"
#include "traptail/sim.hpp"
#include "traptail/stats.hpp"
#include "traptail/svg.hpp"
#include "traptail/tail_table.hpp"
#include "traptail/verify.hpp"
