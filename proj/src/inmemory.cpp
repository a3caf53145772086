#include "pembihs/inmemory.hpp"

#include <chrono>
#include <cstring>
#include <queue>

namespace pembihs {

double fraction_before_midpoint(const SearchOutcome& outcome, int c_star) {
    if (c_star == 0) return 1.0;
    std::uint64_t total = 0, before = 0;
    for (const auto& hist : outcome.depth_histogram)
        for (const auto& [g, count] : hist) {
            total += count;
            if (2 * g < c_star) before += count;
        }
    return total == 0 ? 0.0 : static_cast<double>(before) / static_cast<double>(total);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Stopwatch {
    Clock::time_point t0 = Clock::now();
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }
};

void require_u64_packable(const Domain& domain) {
    if (domain.record_width() > 8)
        throw CapacityError("state space of " + domain.name() +
                            " is too large for the in-memory algorithms; use a PEM variant");
}

void check_limits(const InMemoryLimits& limits, std::uint64_t states, const Stopwatch& watch,
                  std::uint64_t& next_check) {
    if (states > limits.max_states)
        throw CapacityError("in-memory search exceeded " + std::to_string(limits.max_states) +
                            " stored states; use a PEM variant");
    if (limits.max_seconds > 0 && states >= next_check) {
        next_check = states + 65536;
        if (watch.seconds() > limits.max_seconds) throw TimeoutError("in-memory search timed out");
    }
}

// (f asc, g desc, key asc): pops are deterministic.
struct HeapEntry {
    int f;
    int g;
    std::uint64_t key;
    friend bool operator>(const HeapEntry& a, const HeapEntry& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.key > b.key;
    }
};
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

}  // namespace

std::unordered_map<std::uint64_t, int> bfs_distance_map(const Domain& domain,
                                                        const DomainState& root,
                                                        const InMemoryLimits& limits) {
    require_u64_packable(domain);
    if (!domain.is_legal(root)) throw InputError("bfs root state is illegal");
    Stopwatch watch;
    std::uint64_t next_check = 0;
    std::unordered_map<std::uint64_t, int> dist;
    std::vector<std::uint64_t> frontier{packed_to_u64(domain.pack(root))}, next;
    dist.emplace(frontier[0], 0);
    DomainState succ[Domain::kMaxSuccessors];
    int depth = 0;
    while (!frontier.empty()) {
        ++depth;
        next.clear();
        for (const std::uint64_t key : frontier) {
            PackedState p;
            std::memcpy(p.bytes.data(), &key, 8);
            const DomainState s = domain.unpack(p);
            const int cnt = domain.successors(s, succ);
            for (int i = 0; i < cnt; ++i) {
                const std::uint64_t k = packed_to_u64(domain.pack(succ[i]));
                if (dist.emplace(k, depth).second) next.push_back(k);
            }
        }
        check_limits(limits, dist.size(), watch, next_check);
        frontier.swap(next);
    }
    return dist;
}

SearchOutcome bfs_oracle(const Domain& domain, const DomainState& start, const DomainState& goal,
                         const InMemoryLimits& limits) {
    require_u64_packable(domain);
    if (!domain.is_legal(start) || !domain.is_legal(goal))
        throw InputError("bfs oracle got an illegal start or goal state");
    Stopwatch watch;
    std::uint64_t next_check = 0;
    SearchOutcome out;
    const std::uint64_t goal_key = packed_to_u64(domain.pack(goal));
    std::unordered_map<std::uint64_t, int> dist;
    std::vector<std::uint64_t> frontier{packed_to_u64(domain.pack(start))}, next;
    dist.emplace(frontier[0], 0);
    if (frontier[0] == goal_key) {
        out.cost = 0;
        out.elapsed_seconds = watch.seconds();
        return out;
    }
    DomainState succ[Domain::kMaxSuccessors];
    int depth = 0;
    while (!frontier.empty()) {
        ++depth;
        next.clear();
        for (const std::uint64_t key : frontier) {
            PackedState p;
            std::memcpy(p.bytes.data(), &key, 8);
            const DomainState s = domain.unpack(p);
            ++out.expanded;
            out.histogram(Direction::Forward)[depth - 1] += 1;
            const int cnt = domain.successors(s, succ);
            out.generated += static_cast<std::uint64_t>(cnt);
            for (int i = 0; i < cnt; ++i) {
                const std::uint64_t k = packed_to_u64(domain.pack(succ[i]));
                if (!dist.emplace(k, depth).second) continue;
                if (k == goal_key) {
                    out.cost = depth;
                    out.elapsed_seconds = watch.seconds();
                    return out;
                }
                next.push_back(k);
            }
        }
        check_limits(limits, dist.size(), watch, next_check);
        frontier.swap(next);
    }
    out.elapsed_seconds = watch.seconds();
    return out;  // goal unreachable
}

SearchOutcome astar(const Domain& domain, const DomainState& start, const DomainState& goal,
                    const Evaluator& h, const InMemoryLimits& limits) {
    require_u64_packable(domain);
    if (!domain.is_legal(start) || !domain.is_legal(goal))
        throw InputError("a* got an illegal start or goal state");
    Stopwatch watch;
    std::uint64_t next_check = 0;
    SearchOutcome out;
    const std::uint64_t goal_key = packed_to_u64(domain.pack(goal));
    std::unordered_map<std::uint64_t, int> best_g;
    MinHeap open;
    const std::uint64_t start_key = packed_to_u64(domain.pack(start));
    best_g.emplace(start_key, 0);
    open.push({h.value(start), 0, start_key});
    DomainState succ[Domain::kMaxSuccessors];
    while (!open.empty()) {
        const HeapEntry top = open.top();
        open.pop();
        auto it = best_g.find(top.key);
        if (it->second != top.g) continue;  // superseded entry
        if (top.key == goal_key) {
            out.cost = top.g;
            break;
        }
        PackedState p;
        std::memcpy(p.bytes.data(), &top.key, 8);
        const DomainState s = domain.unpack(p);
        it->second = -it->second - 1;  // mark closed; g recoverable but never reopened
        ++out.expanded;
        out.histogram(Direction::Forward)[top.g] += 1;
        const int cnt = domain.successors(s, succ);
        out.generated += static_cast<std::uint64_t>(cnt);
        const int ng = top.g + 1;
        for (int i = 0; i < cnt; ++i) {
            const int hv = h.value(succ[i]);
            if (hv >= kInfCost) continue;
            const std::uint64_t k = packed_to_u64(domain.pack(succ[i]));
            auto [sit, fresh] = best_g.emplace(k, ng);
            if (!fresh) {
                if (sit->second < 0 || sit->second <= ng) continue;
                sit->second = ng;
            }
            open.push({ng + hv, ng, k});
        }
        check_limits(limits, best_g.size(), watch, next_check);
    }
    out.elapsed_seconds = watch.seconds();
    return out;
}

namespace {

struct BaeSide {
    MinHeap open;  // entries carry b as the ordering value
    std::unordered_map<std::uint64_t, int> best_g;
    std::unordered_map<std::uint64_t, char> closed;

    // Drops superseded and closed entries; returns false when empty.
    bool clean_top() {
        while (!open.empty()) {
            const HeapEntry& top = open.top();
            if (closed.count(top.key) || best_g.at(top.key) != top.g)
                open.pop();
            else
                return true;
        }
        return false;
    }
};

}  // namespace

SearchOutcome bae_star(const Domain& domain, const DomainState& start, const DomainState& goal,
                       const HeuristicPair& h, const InMemoryLimits& limits) {
    require_u64_packable(domain);
    if (!domain.is_legal(start) || !domain.is_legal(goal))
        throw InputError("bae* got an illegal start or goal state");
    if (!h.forward || !h.backward) throw InputError("bae* needs both heuristic directions");
    Stopwatch watch;
    std::uint64_t next_check = 0;
    SearchOutcome out;
    if (start == goal) {
        out.cost = 0;
        out.lb_trace.push_back(0);
        return out;
    }

    const auto annotate = [&](const DomainState& s, int g) {
        NodeAnnotation a;
        a.g = g;
        a.hf = h.forward->value(s);
        a.hb = h.backward->value(s);
        return a;
    };

    BaeSide sides[2];
    const std::uint64_t keys[2] = {packed_to_u64(domain.pack(start)),
                                   packed_to_u64(domain.pack(goal))};
    const DomainState roots[2] = {start, goal};
    for (int d = 0; d < 2; ++d) {
        const NodeAnnotation a = annotate(roots[d], 0);
        sides[d].best_g.emplace(keys[d], 0);
        sides[d].open.push({a.b(static_cast<Direction>(d)), 0, keys[d]});
    }

    int upper = kInfCost;
    DomainState succ[Domain::kMaxSuccessors];
    Direction dir = Direction::Backward;  // first expansion is forward
    while (true) {
        if (!sides[0].clean_top() || !sides[1].clean_top()) break;
        const int bmin_f = sides[0].open.top().f;
        const int bmin_b = sides[1].open.top().f;
        const int lb = (bmin_f + bmin_b) / 2;
        out.lb_trace.push_back(std::min(lb, upper));
        if (upper <= lb) break;

        dir = opposite(dir);
        BaeSide& mine = sides[static_cast<int>(dir)];
        BaeSide& other = sides[static_cast<int>(opposite(dir))];
        const HeapEntry top = mine.open.top();
        mine.open.pop();
        mine.closed.emplace(top.key, 1);
        PackedState p;
        std::memcpy(p.bytes.data(), &top.key, 8);
        const DomainState s = domain.unpack(p);
        ++out.expanded;
        out.histogram(dir)[top.g] += 1;
        const int cnt = domain.successors(s, succ);
        out.generated += static_cast<std::uint64_t>(cnt);
        const int ng = top.g + 1;
        for (int i = 0; i < cnt; ++i) {
            const std::uint64_t k = packed_to_u64(domain.pack(succ[i]));
            if (mine.closed.count(k)) continue;
            auto [sit, fresh] = mine.best_g.emplace(k, ng);
            if (!fresh && sit->second <= ng) continue;
            sit->second = ng;
            const NodeAnnotation a = annotate(succ[i], ng);
            if (a.h(dir) >= kInfCost) continue;
            mine.open.push({a.b(dir), ng, k});
            const auto oit = other.best_g.find(k);
            if (oit != other.best_g.end()) upper = std::min(upper, ng + oit->second);
        }
        check_limits(limits, sides[0].best_g.size() + sides[1].best_g.size(), watch, next_check);
    }
    out.cost = upper;
    out.elapsed_seconds = watch.seconds();
    return out;
}

namespace {

struct IdaContext {
    const Domain& domain;
    const Evaluator& h;
    DomainState goal;
    int bound = 0;
    int next_bound = kInfCost;
    SearchOutcome* out;
    const InMemoryLimits* limits;
    const Stopwatch* watch;
    std::uint64_t ticks = 0;

    // Returns the solution depth, or -1 to keep searching.
    int dfs(const DomainState& s, const DomainState& parent, int g) {
        if (s == goal) return g;
        if (limits->max_seconds > 0 && (++ticks & 0xffff) == 0 &&
            watch->seconds() > limits->max_seconds)
            throw TimeoutError("ida* timed out");
        DomainState succ[Domain::kMaxSuccessors];
        const int cnt = domain.successors(s, succ);
        ++out->expanded;
        out->histogram(Direction::Forward)[g] += 1;
        out->generated += static_cast<std::uint64_t>(cnt);
        for (int i = 0; i < cnt; ++i) {
            if (succ[i] == parent) continue;
            const int hv = h.value(succ[i]);
            if (hv >= kInfCost) continue;
            const int f = g + 1 + hv;
            if (f > bound) {
                next_bound = std::min(next_bound, f);
                continue;
            }
            const int found = dfs(succ[i], s, g + 1);
            if (found >= 0) return found;
        }
        return -1;
    }
};

}  // namespace

SearchOutcome ida_star(const Domain& domain, const DomainState& start, const DomainState& goal,
                       const Evaluator& h, const InMemoryLimits& limits) {
    if (!domain.is_legal(start) || !domain.is_legal(goal))
        throw InputError("ida* got an illegal start or goal state");
    Stopwatch watch;
    SearchOutcome out;
    IdaContext ctx{domain, h, goal, h.value(start), kInfCost, &out, &limits, &watch};
    if (ctx.bound >= kInfCost) {
        out.elapsed_seconds = watch.seconds();
        return out;
    }
    while (true) {
        ctx.next_bound = kInfCost;
        const int found = ctx.dfs(start, start, 0);
        if (found >= 0) {
            out.cost = found;
            break;
        }
        if (ctx.next_bound >= kInfCost) break;  // space exhausted below any bound
        ctx.bound = ctx.next_bound;
    }
    out.elapsed_seconds = watch.seconds();
    return out;
}

}  // namespace pembihs
