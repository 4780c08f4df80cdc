#pragma once

#include "colorgrid/astar.hpp"
#include "colorgrid/config.hpp"
#include "colorgrid/env.hpp"
#include "colorgrid/harness.hpp"
#include "colorgrid/observation.hpp"
#include "colorgrid/policies.hpp"
#include "colorgrid/render.hpp"
#include "colorgrid/reward_shaping.hpp"
#include "colorgrid/rng.hpp"
#include "colorgrid/state.hpp"
#include "colorgrid/trajectory.hpp"
#include "colorgrid/types.hpp"
