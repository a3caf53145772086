#pragma once

#include "pembihs/domain.hpp"
#include "pembihs/heuristics.hpp"
#include "pembihs/outcome.hpp"

namespace pembihs {

struct AidaConfig {
    int workers = 1;
    double max_seconds = 0.0;  // raises TimeoutError
    // BFS runs until its frontier exceeds this many states per worker, and
    // that frontier is handed out round-robin.
    int frontier_per_worker = 8;
};

// Asynchronous parallel IDA*: breadth-first search to a fixed depth, then
// threshold-bounded depth-first searches over the distributed frontier.
// There is no duplicate detection beyond parent avoidance, which makes it
// unsuitable for cycle-heavy spaces like the towers. The per-iteration
// thresholds land in *thresholds when given.
SearchOutcome aida_star(const Domain& domain, const DomainState& start, const DomainState& goal,
                        const Evaluator& h, const AidaConfig& config,
                        std::vector<int>* thresholds = nullptr);

}  // namespace pembihs
