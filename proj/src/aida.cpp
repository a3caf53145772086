#include "pembihs/aida.hpp"

#include <atomic>
#include <chrono>
#include <cstring>
#include <thread>
#include <unordered_set>

namespace pembihs {

namespace {

using Clock = std::chrono::steady_clock;

struct PackedHash {
    std::size_t operator()(const PackedState& p) const { return hash_packed(p); }
};

struct WorkerTally {
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    std::vector<std::uint64_t> by_depth;

    void bump(int g) {
        if (static_cast<std::size_t>(g) >= by_depth.size()) by_depth.resize(g + 1, 0);
        ++by_depth[g];
        ++expanded;
    }
};

struct Shared {
    const Domain& domain;
    const Evaluator& h;
    DomainState goal;
    int bound = 0;
    std::atomic<int> next_bound{kInfCost};
    std::atomic<int> found_cost{kInfCost};
    std::atomic<bool> found{false};
    Clock::time_point t0{};
    double max_seconds = 0.0;

    void record_exceeded(int f) {
        int cur = next_bound.load(std::memory_order_relaxed);
        while (f < cur && !next_bound.compare_exchange_weak(cur, f)) {
        }
    }
};

// Bounded DFS with parent avoidance; polls the shared found flag between
// expansions so workers drain quickly once any solution appears.
bool dfs(Shared& sh, WorkerTally& tally, const DomainState& s, const DomainState& parent, int g,
         std::uint64_t& ticks) {
    if (s == sh.goal) {
        int cur = sh.found_cost.load(std::memory_order_relaxed);
        while (g < cur && !sh.found_cost.compare_exchange_weak(cur, g)) {
        }
        sh.found.store(true, std::memory_order_relaxed);
        return true;
    }
    if (sh.found.load(std::memory_order_relaxed)) return false;
    if (sh.max_seconds > 0 && (++ticks & 0xffff) == 0 &&
        std::chrono::duration<double>(Clock::now() - sh.t0).count() > sh.max_seconds)
        throw TimeoutError("aida* timed out");
    DomainState succ[Domain::kMaxSuccessors];
    const int cnt = sh.domain.successors(s, succ);
    tally.bump(g);
    tally.generated += static_cast<std::uint64_t>(cnt);
    for (int i = 0; i < cnt; ++i) {
        if (succ[i] == parent) continue;
        const int hv = sh.h.value(succ[i]);
        if (hv >= kInfCost) continue;
        const int f = g + 1 + hv;
        if (f > sh.bound) {
            sh.record_exceeded(f);
            continue;
        }
        if (dfs(sh, tally, succ[i], s, g + 1, ticks)) return true;
    }
    return false;
}

}  // namespace

SearchOutcome aida_star(const Domain& domain, const DomainState& start, const DomainState& goal,
                        const Evaluator& h, const AidaConfig& config,
                        std::vector<int>* thresholds) {
    if (!domain.is_legal(start) || !domain.is_legal(goal))
        throw InputError("aida* got an illegal start or goal state");
    if (config.workers < 1) throw InputError("aida* needs at least one worker");
    const Clock::time_point t0 = Clock::now();
    SearchOutcome out;
    if (thresholds) thresholds->clear();

    // Breadth-first prefix, duplicate-free, until the frontier is wide enough
    // to keep every worker busy.
    std::unordered_set<PackedState, PackedHash> seen{domain.pack(start)};
    std::vector<DomainState> frontier{start}, next;
    int prefix_depth = 0;
    if (start == goal) {
        out.cost = 0;
        out.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (thresholds) thresholds->push_back(0);
        return out;
    }
    const std::size_t want =
        static_cast<std::size_t>(config.workers) * static_cast<std::size_t>(config.frontier_per_worker);
    DomainState succ[Domain::kMaxSuccessors];
    while (!frontier.empty() && frontier.size() <= want) {
        next.clear();
        for (const DomainState& s : frontier) {
            const int cnt = domain.successors(s, succ);
            ++out.expanded;
            out.histogram(Direction::Forward)[prefix_depth] += 1;
            out.generated += static_cast<std::uint64_t>(cnt);
            for (int i = 0; i < cnt; ++i) {
                if (!seen.insert(domain.pack(succ[i])).second) continue;
                if (succ[i] == goal) {
                    out.cost = prefix_depth + 1;
                    out.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
                    if (thresholds) thresholds->push_back(out.cost);
                    return out;
                }
                next.push_back(succ[i]);
            }
        }
        frontier.swap(next);
        ++prefix_depth;
    }
    if (frontier.empty()) {  // space exhausted inside the prefix, no solution
        out.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return out;
    }

    Shared sh{domain, h, goal};
    sh.t0 = t0;
    sh.max_seconds = config.max_seconds;
    sh.bound = h.value(start);

    while (true) {
        if (thresholds) thresholds->push_back(sh.bound);
        sh.next_bound.store(kInfCost);
        sh.found.store(false);
        std::vector<WorkerTally> tallies(static_cast<std::size_t>(config.workers));
        std::exception_ptr error;
        std::mutex error_lock;
        auto work = [&](int w) {
            try {
                WorkerTally& tally = tallies[static_cast<std::size_t>(w)];
                std::uint64_t ticks = 0;
                // Static round-robin split of the frontier.
                for (std::size_t i = static_cast<std::size_t>(w); i < frontier.size();
                     i += static_cast<std::size_t>(config.workers)) {
                    if (sh.found.load(std::memory_order_relaxed)) break;
                    const DomainState& s = frontier[i];
                    const int f = prefix_depth + sh.h.value(s);
                    if (f > sh.bound) {
                        sh.record_exceeded(f);
                        continue;
                    }
                    if (dfs(sh, tally, s, s, prefix_depth, ticks)) break;
                }
            } catch (...) {
                std::lock_guard lock(error_lock);
                if (!error) error = std::current_exception();
            }
        };
        if (config.workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(static_cast<std::size_t>(config.workers));
            for (int w = 0; w < config.workers; ++w) threads.emplace_back(work, w);
            for (auto& t : threads) t.join();
        }
        if (error) std::rethrow_exception(error);
        for (const WorkerTally& tally : tallies) {
            out.expanded += tally.expanded;
            out.generated += tally.generated;
            for (std::size_t g = 0; g < tally.by_depth.size(); ++g)
                if (tally.by_depth[g])
                    out.histogram(Direction::Forward)[static_cast<int>(g)] += tally.by_depth[g];
        }
        if (sh.found.load()) {
            out.cost = sh.found_cost.load();
            break;
        }
        const int nb = sh.next_bound.load();
        if (nb >= kInfCost) break;  // nothing exceeded the bound: unsolvable
        sh.bound = nb;
    }
    out.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
}

}  // namespace pembihs
