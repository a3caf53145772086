#pragma once

#include <filesystem>

#include "pembihs/bucket_store.hpp"
#include "pembihs/dedup.hpp"
#include "pembihs/heuristics.hpp"
#include "pembihs/outcome.hpp"
#include "pembihs/policy.hpp"

namespace pembihs {

struct EngineConfig {
    int workers = 1;
    // Covers the loaded bucket's table, all successor-cache arrays, and the
    // streaming segment buffer.
    std::uint64_t memory_budget_bytes = 512ull << 20;
    std::filesystem::path bucket_dir;
    std::size_t cache_capacity = 4096;  // records per (worker, target bucket) array
    bool in_cache_dedup = false;
    // Restrict same-direction closed scans to levels x-2, x-1, x on unit-cost
    // undirected domains; off scans every h-compatible closed bucket.
    bool g_level_rule = true;
    bool collect_closed_sets = false;  // for duplicate-detection differentials
    double max_seconds = 0.0;          // 0: no limit; raises TimeoutError
    int manifest_every = 32;           // cycles between manifest rewrites
};

struct EngineResult {
    SearchOutcome outcome;
    // Distinct states written to each direction's closed list, sorted;
    // filled only when collect_closed_sets is set.
    std::array<std::vector<PackedState>, 2> closed_sets;
};

// The disk-backed search driver. One cycle per loaded bucket: choose
// direction, choose bucket, parallel read with in-bucket duplicate
// elimination, duplicate detection against the closed list, solution
// detection, parallel expansion into per-worker caches, write the expanded
// bucket to the closed list, recompute the lower bound. Halts when the
// incumbent cost is proven optimal or an open list empties.
EngineResult run_search(const Domain& domain, const DomainState& start, const DomainState& goal,
                        const HeuristicPair& h, const SearchPolicy& policy,
                        const EngineConfig& config);

}  // namespace pembihs
