#include "pembihs/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

#include "pembihs/thread_pool.hpp"

namespace pembihs {

namespace {

using Clock = std::chrono::steady_clock;

void atomic_min(std::atomic<int>& target, int value) {
    int cur = target.load(std::memory_order_relaxed);
    while (value < cur && !target.compare_exchange_weak(cur, value)) {
    }
}

struct Engine {
    const Domain& domain;
    const HeuristicPair& h;
    const SearchPolicy& policy;
    const EngineConfig& cfg;
    const DomainProperties props;
    const int width;

    BucketStore store;
    ThreadPool pool;
    MemoryBudget budget;
    std::vector<std::byte> scratch;
    Frontier open[2] = {{Direction::Forward, BucketStatus::Open},
                        {Direction::Backward, BucketStatus::Open}};
    Frontier closed[2] = {{Direction::Forward, BucketStatus::Closed},
                          {Direction::Backward, BucketStatus::Closed}};
    PackedState roots[2];
    std::atomic<int> upper{kInfCost};
    SearchOutcome out;
    Clock::time_point t0 = Clock::now();
    int cycles = 0;

    Engine(const Domain& d, const HeuristicPair& heur, const SearchPolicy& pol,
           const EngineConfig& config)
        : domain(d),
          h(heur),
          policy(pol),
          cfg(config),
          props(d.properties()),
          width(props.record_width),
          store(config.bucket_dir, scheme_component_names(pol.scheme)),
          pool(config.workers),
          budget(config.memory_budget_bytes) {
        const std::uint64_t segment = std::max<std::uint64_t>(
            cfg.memory_budget_bytes / 8,
            static_cast<std::uint64_t>(cfg.workers) * static_cast<std::uint64_t>(width) * 64);
        budget.reserve(segment, "streaming segment buffer");
        scratch.resize(segment);
    }

    NodeAnnotation annotate(const DomainState& s, int g) const {
        NodeAnnotation a;
        a.g = g;
        a.hf = h.forward ? h.forward->value(s) : 0;
        a.hb = h.backward ? h.backward->value(s) : 0;
        return a;
    }

    Frontier& open_of(Direction d) { return open[static_cast<int>(d)]; }
    Frontier& closed_of(Direction d) { return closed[static_cast<int>(d)]; }

    void push_root(Direction dir, const DomainState& s) {
        const NodeAnnotation a = annotate(s, 0);
        const BucketKey key = make_bucket_key(policy.scheme, dir, a);
        roots[static_cast<int>(dir)] = domain.pack(s);
        store.append(open_of(dir).get_or_create(key, store),
                     roots[static_cast<int>(dir)].bytes.data(), static_cast<std::size_t>(width),
                     width);
    }

    void emit_lb(int lb) {
        out.lb_trace.push_back(std::min(lb, upper.load()));
    }

    void write_manifest() {
        store.write_manifest({&open[0], &open[1], &closed[0], &closed[1]});
    }

    // Read stage: the file is split evenly among the workers, each decoding
    // its share into the shared table (in-bucket duplicate detection).
    std::unique_ptr<InMemoryBucket> read_bucket(const BucketRecord& rec) {
        const std::uint64_t size = store.file_size(rec);
        if (size % static_cast<std::uint64_t>(width) != 0)
            throw CorruptionError("bucket file " + rec.file.string() +
                                  " is misaligned with the record width");
        const std::uint64_t records = size / static_cast<std::uint64_t>(width);
        if (records != rec.node_count)
            throw CorruptionError("bucket " + store.bucket_name(rec.id) + " holds " +
                                  std::to_string(records) + " records but its record says " +
                                  std::to_string(rec.node_count));
        auto bucket_ptr = std::make_unique<InMemoryBucket>(width, records, budget);
        InMemoryBucket& bucket = *bucket_ptr;
        const std::size_t slice = scratch.size() / static_cast<std::size_t>(cfg.workers);
        const std::size_t chunk_records =
            std::max<std::size_t>(1, slice / static_cast<std::size_t>(width));
        pool.parallel_for(records, [&](int w, std::size_t begin, std::size_t end) {
            std::byte* buf = scratch.data() + static_cast<std::size_t>(w) * slice;
            for (std::size_t at = begin; at < end; at += chunk_records) {
                const std::size_t n = std::min(chunk_records, end - at);
                store.read_range(rec, static_cast<std::uint64_t>(at) * width, buf,
                                 n * static_cast<std::size_t>(width));
                for (std::size_t i = 0; i < n; ++i) bucket.insert(buf + i * width);
            }
        });
        return bucket_ptr;
    }

    void expand_bucket(const InMemoryBucket& bucket, Direction dir, int g) {
        const Direction opp = opposite(dir);
        const bool need_hf = scheme_needs_forward_h(policy.scheme, dir);
        const bool need_hb = scheme_needs_backward_h(policy.scheme, dir);
        const bool isd = policy.solution_detection == SolutionDetection::Immediate;
        std::vector<std::unique_ptr<SuccessorCache>> caches;
        caches.reserve(static_cast<std::size_t>(cfg.workers));
        for (int w = 0; w < cfg.workers; ++w)
            caches.push_back(std::make_unique<SuccessorCache>(width, cfg.cache_capacity,
                                                              cfg.in_cache_dedup, budget));
        std::atomic<std::uint64_t> generated{0};
        pool.parallel_for(bucket.slot_count(), [&](int w, std::size_t begin, std::size_t end) {
            SuccessorCache& cache = *caches[w];
            DomainState succ[Domain::kMaxSuccessors];
            std::uint64_t gen = 0;
            NodeAnnotation a;
            a.g = g + 1;
            for (std::size_t i = begin; i < end; ++i) {
                if (!bucket.slot_live(i)) continue;
                const DomainState s = domain.decode(bucket.slot_data(i));
                const int cnt = domain.successors(s, succ);
                gen += static_cast<std::uint64_t>(cnt);
                for (int j = 0; j < cnt; ++j) {
                    a.hf = need_hf ? h.forward->value(succ[j]) : 0;
                    if (a.hf >= kInfCost) continue;
                    a.hb = need_hb ? h.backward->value(succ[j]) : 0;
                    if (a.hb >= kInfCost) continue;
                    const PackedState sp = domain.pack(succ[j]);
                    if (isd && sp == roots[static_cast<int>(opp)]) atomic_min(upper, a.g);
                    cache.add(make_bucket_key(policy.scheme, dir, a), sp.bytes.data(),
                              open_of(dir), store);
                }
            }
            generated.fetch_add(gen, std::memory_order_relaxed);
        });
        for (auto& cache : caches) cache->flush_all(open_of(dir), store);
        out.generated += generated.load();
    }

    // Survivors become a fresh duplicate-free closed bucket. A closed record
    // with the same identifier (a reopening) gets a merged replacement file.
    void write_to_closed(const InMemoryBucket& bucket, const BucketKey& key, Direction dir) {
        std::vector<std::byte> buf;
        buf.reserve(static_cast<std::size_t>(bucket.live_count()) *
                    static_cast<std::size_t>(width));
        for (std::size_t i = 0; i < bucket.slot_count(); ++i)
            if (bucket.slot_live(i))
                buf.insert(buf.end(), bucket.slot_data(i), bucket.slot_data(i) + width);
        BucketRecord* existing = closed_of(dir).find(key);
        if (existing) {
            store.merge_into(*existing, buf.data(), buf.size(), width);
        } else {
            store.append(closed_of(dir).get_or_create(key, store), buf.data(), buf.size(), width);
        }
    }

    void run() {
        int lb = kInfCost;
        {
            const FrontierStats sf = frontier_stats(policy.scheme, open[0]);
            const FrontierStats sb = frontier_stats(policy.scheme, open[1]);
            lb = compute_lower_bound(policy, sf, sb);
            emit_lb(lb);
        }
        Direction last = Direction::Backward;  // alternation starts forward
        while (!open[0].empty() && !open[1].empty() && upper.load() > lb) {
            if (cfg.max_seconds > 0 &&
                std::chrono::duration<double>(Clock::now() - t0).count() > cfg.max_seconds)
                throw TimeoutError("search exceeded " + std::to_string(cfg.max_seconds) + " s");

            const FrontierStats sf = frontier_stats(policy.scheme, open[0]);
            const FrontierStats sb = frontier_stats(policy.scheme, open[1]);
            const Direction dir = choose_direction(policy, sf, sb, last);
            last = dir;

            BucketRecord* chosen = choose_next_bucket(policy.scheme, policy.tie_break, open_of(dir));
            auto rec = open_of(dir).extract(chosen->id.key);
            const BucketKey key = rec->id.key;
            const int g = key.g();

            {
                auto bucket_ptr = read_bucket(*rec);
                InMemoryBucket& bucket = *bucket_ptr;
                remove_duplicates_vs_closed(
                    bucket, closed_of(dir),
                    [&](const BucketKey& cand) {
                        return closed_scan_compatible(policy.scheme, key, cand, cfg.g_level_rule,
                                                      props);
                    },
                    store, scratch.data(), scratch.size(), pool);

                if (policy.solution_detection == SolutionDetection::Delayed &&
                    bucket.live_count() > 0) {
                    const int found = check_for_solution_delayed(
                        bucket, g, closed_of(opposite(dir)),
                        [&](const BucketKey& cand) {
                            return dsd_scan_compatible(policy.scheme, key, cand);
                        },
                        roots[static_cast<int>(opposite(dir))], upper.load(), store,
                        scratch.data(), scratch.size(), pool);
                    atomic_min(upper, found);
                }

                const std::uint64_t survivors = bucket.live_count();
                if (survivors > 0) {
                    out.expanded += survivors;
                    out.histogram(dir)[g] += survivors;
                    expand_bucket(bucket, dir, g);
                    write_to_closed(bucket, key, dir);
                }
            }
            store.remove_file(*rec);

            ++cycles;
            if (cfg.manifest_every > 0 && cycles % cfg.manifest_every == 0) write_manifest();

            const FrontierStats nf = frontier_stats(policy.scheme, open[0]);
            const FrontierStats nb = frontier_stats(policy.scheme, open[1]);
            lb = compute_lower_bound(policy, nf, nb);
            emit_lb(lb);
        }
    }

    void collect_closed(EngineResult& result) {
        for (int d = 0; d < 2; ++d) {
            auto& sink = result.closed_sets[d];
            closed[d].for_each([&](const BucketRecord& rec) {
                const std::uint64_t size = store.file_size(rec);
                const std::uint64_t records = size / static_cast<std::uint64_t>(width);
                std::vector<std::byte> buf(static_cast<std::size_t>(size));
                if (size > 0) store.read_range(rec, 0, buf.data(), buf.size());
                for (std::uint64_t i = 0; i < records; ++i) {
                    PackedState p;
                    std::memcpy(p.bytes.data(), buf.data() + i * width,
                                static_cast<std::size_t>(width));
                    sink.push_back(p);
                }
            });
            std::sort(sink.begin(), sink.end());
        }
    }
};

void validate_heuristics(const SearchPolicy& policy, const HeuristicPair& h) {
    const bool fwd = policy.direction_rule != DirectionRule::AlwaysBackward;
    const bool bwd = policy.direction_rule != DirectionRule::AlwaysForward;
    bool need_f = false, need_b = false;
    if (fwd) {
        need_f |= scheme_needs_forward_h(policy.scheme, Direction::Forward);
        need_b |= scheme_needs_backward_h(policy.scheme, Direction::Forward);
    }
    if (bwd) {
        need_f |= scheme_needs_forward_h(policy.scheme, Direction::Backward);
        need_b |= scheme_needs_backward_h(policy.scheme, Direction::Backward);
    }
    if (need_f && !h.forward) throw InputError("policy requires a forward heuristic");
    if (need_b && !h.backward) throw InputError("policy requires a backward heuristic");
}

}  // namespace

EngineResult run_search(const Domain& domain, const DomainState& start, const DomainState& goal,
                        const HeuristicPair& h, const SearchPolicy& policy,
                        const EngineConfig& config) {
    if (!domain.is_legal(start)) throw InputError("start state is illegal");
    if (!domain.is_legal(goal)) throw InputError("goal state is illegal");
    if (config.bucket_dir.empty()) throw InputError("engine needs a bucket directory");
    validate_heuristics(policy, h);

    EngineResult result;
    if (start == goal) {
        result.outcome.cost = 0;
        result.outcome.lb_trace.push_back(0);
        return result;
    }

    Engine engine(domain, h, policy, config);
    engine.push_root(Direction::Forward, start);
    engine.push_root(Direction::Backward, goal);
    engine.run();
    engine.out.cost = engine.upper.load();
    engine.out.elapsed_seconds =
        std::chrono::duration<double>(Clock::now() - engine.t0).count();
    engine.out.peak_disk_bytes = engine.store.peak_bytes();
    engine.write_manifest();
    if (config.collect_closed_sets) engine.collect_closed(result);
    result.outcome = std::move(engine.out);
    return result;
}

}  // namespace pembihs
