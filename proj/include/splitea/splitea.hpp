#pragma once

#include "splitea/datasets.hpp"
#include "splitea/forecast.hpp"
#include "splitea/harness.hpp"
#include "splitea/legacy_cases.hpp"
#include "splitea/model.hpp"
#include "splitea/objective.hpp"
#include "splitea/rng.hpp"
#include "splitea/solvers.hpp"
#include "splitea/stats.hpp"
