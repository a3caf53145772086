#pragma once

#include <unordered_map>

#include "pembihs/domain.hpp"
#include "pembihs/heuristics.hpp"
#include "pembihs/outcome.hpp"

namespace pembihs {

// Resource guards for the in-memory algorithms. Exceeding max_states raises
// CapacityError (the PEM variants exist for that); exceeding max_seconds
// raises TimeoutError.
struct InMemoryLimits {
    std::uint64_t max_states = 60'000'000;
    double max_seconds = 0.0;  // 0: no limit
};

// Exhaustive uniform-cost breadth-first search: the correctness oracle.
SearchOutcome bfs_oracle(const Domain& domain, const DomainState& start, const DomainState& goal,
                         const InMemoryLimits& limits = {});

// Distances from root to every reachable state, keyed by packed value.
std::unordered_map<std::uint64_t, int> bfs_distance_map(const Domain& domain,
                                                        const DomainState& root,
                                                        const InMemoryLimits& limits = {});

// A* with full hash-based duplicate detection and higher-g tie-breaking.
SearchOutcome astar(const Domain& domain, const DomainState& start, const DomainState& goal,
                    const Evaluator& h, const InMemoryLimits& limits = {});

// BAE*: alternating directions, b-value ordering, b-bound halting.
SearchOutcome bae_star(const Domain& domain, const DomainState& start, const DomainState& goal,
                       const HeuristicPair& h, const InMemoryLimits& limits = {});

// Standard iterative-deepening A* with parent-state avoidance.
SearchOutcome ida_star(const Domain& domain, const DomainState& start, const DomainState& goal,
                       const Evaluator& h, const InMemoryLimits& limits = {});

}  // namespace pembihs
