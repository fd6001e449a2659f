#pragma once

#include "oracles/core.hpp"
#include "oracles/dominance.hpp"
#include "oracles/games.hpp"
#include "oracles/partition_algebra.hpp"
#include "oracles/rational.hpp"
#include "oracles/signaling.hpp"
#include "oracles/simplex.hpp"
#include "oracles/witness_games.hpp"
