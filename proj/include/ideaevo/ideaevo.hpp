#pragma once

#include "ideaevo/engine.hpp"
#include "ideaevo/error.hpp"
#include "ideaevo/harness.hpp"
#include "ideaevo/landscape.hpp"
#include "ideaevo/metrics.hpp"
#include "ideaevo/network.hpp"
#include "ideaevo/population.hpp"
#include "ideaevo/random.hpp"
#include "ideaevo/stats.hpp"
#include "ideaevo/version.hpp"
