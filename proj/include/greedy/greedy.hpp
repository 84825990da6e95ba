#pragma once

#include "greedy/algorithms.hpp"
#include "greedy/analysis.hpp"
#include "greedy/config.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/error.hpp"
#include "greedy/expansion.hpp"
#include "greedy/objective.hpp"
#include "greedy/reference.hpp"
#include "greedy/search.hpp"
#include "greedy/trace.hpp"
#include "greedy/vector.hpp"
