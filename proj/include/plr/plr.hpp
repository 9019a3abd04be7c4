#pragma once

#include "plr/config.hpp"
#include "plr/core.hpp"
#include "plr/experiment.hpp"
#include "plr/io.hpp"
#include "plr/membership.hpp"
#include "plr/metrics.hpp"
#include "plr/objectives.hpp"
#include "plr/projections.hpp"
#include "plr/random.hpp"
#include "plr/sensing.hpp"
#include "plr/solvers.hpp"
#include "plr/svd.hpp"
#include "plr/synthdata.hpp"
