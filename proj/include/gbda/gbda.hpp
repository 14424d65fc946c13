#pragma once

#include "gbda/assignment.hpp"
#include "gbda/bench.hpp"
#include "gbda/branch.hpp"
#include "gbda/combinatorics.hpp"
#include "gbda/error.hpp"
#include "gbda/exact_ged.hpp"
#include "gbda/graph.hpp"
#include "gbda/metrics.hpp"
#include "gbda/model.hpp"
#include "gbda/monte_carlo.hpp"
#include "gbda/priors.hpp"
#include "gbda/search.hpp"
#include "gbda/syngen.hpp"
