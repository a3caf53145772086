#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "pembihs/algorithms.hpp"

using namespace pembihs;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* tag)
        : path(std::filesystem::temp_directory_path() / (std::string("pembihs-") + tag)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

DomainState random_tiles(const TilePuzzle& d, std::mt19937_64& rng) {
    DomainState s = d.canonical_goal();
    std::shuffle(s.v.begin(), s.v.begin() + d.cells(), rng);
    return s;
}

std::pair<DomainState, DomainState> random_pair(const TilePuzzle& d, std::mt19937_64& rng) {
    DomainState start = random_tiles(d, rng);
    DomainState goal = random_tiles(d, rng);
    if (!d.mutually_reachable(start, goal)) {
        int a = 0;
        while (start.v[a] == 0) ++a;
        int b = a + 1;
        while (start.v[b] == 0) ++b;
        std::swap(start.v[a], start.v[b]);
    }
    return {start, goal};
}

DomainState random_hanoi(const HanoiPuzzle& d, std::mt19937_64& rng) {
    DomainState s;
    std::uniform_int_distribution<int> peg(0, 3);
    for (int i = 0; i < d.disks(); ++i) s.v[i] = static_cast<std::uint8_t>(peg(rng));
    return s;
}

EngineConfig engine_config(const TempDir& dir, int workers = 1) {
    EngineConfig cfg;
    cfg.workers = workers;
    cfg.memory_budget_bytes = 64ull << 20;
    cfg.bucket_dir = dir.path / "run";
    return cfg;
}

HeuristicPair md_pair(const TilePuzzle& d, const DomainState& start, const DomainState& goal) {
    return {std::make_shared<ManhattanDistance>(d, goal),
            std::make_shared<ManhattanDistance>(d, start)};
}

// Test-side mirror of the external-memory A*: whole (g,h) layers expanded at
// once with full hash duplicate detection and immediate solution detection.
// Independent of the engine's disk path; used to pin its expansion totals.
struct MirrorCounts {
    int cost = kInfCost;
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
};

MirrorCounts layered_astar(const Domain& d, const DomainState& start, const DomainState& goal,
                           const Evaluator& h) {
    MirrorCounts out;
    if (start == goal) {
        out.cost = 0;
        return out;
    }
    const std::uint64_t goal_key = packed_to_u64(d.pack(goal));
    std::map<std::pair<int, int>, std::set<std::uint64_t>> open;  // (g, h) -> states
    std::set<std::uint64_t> closed;
    int upper = kInfCost;
    open[{0, h.value(start)}].insert(packed_to_u64(d.pack(start)));
    DomainState succ[Domain::kMaxSuccessors];
    while (!open.empty()) {
        // Minimal f, then lower g.
        auto best = open.begin();
        for (auto it = open.begin(); it != open.end(); ++it) {
            const int fb = best->first.first + best->first.second;
            const int fi = it->first.first + it->first.second;
            if (fi < fb || (fi == fb && it->first.first < best->first.first)) best = it;
        }
        const int f = best->first.first + best->first.second;
        if (upper <= f) break;
        const int g = best->first.first;
        std::set<std::uint64_t> states = std::move(best->second);
        open.erase(best);
        for (auto it = states.begin(); it != states.end();)
            it = closed.count(*it) ? states.erase(it) : std::next(it);
        out.expanded += states.size();
        for (const std::uint64_t key : states) {
            closed.insert(key);
            PackedState p;
            std::memcpy(p.bytes.data(), &key, 8);
            const DomainState s = d.unpack(p);
            const int cnt = d.successors(s, succ);
            out.generated += static_cast<std::uint64_t>(cnt);
            for (int i = 0; i < cnt; ++i) {
                const int hv = h.value(succ[i]);
                if (hv >= kInfCost) continue;
                const std::uint64_t k = packed_to_u64(d.pack(succ[i]));
                if (k == goal_key) upper = std::min(upper, g + 1);
                open[{g + 1, hv}].insert(k);
            }
        }
    }
    out.cost = upper;
    return out;
}

}  // namespace

TEST_CASE("pem-a* matches the layered mirror exactly") {
    TilePuzzle d(3);
    std::mt19937_64 rng(71);
    for (int i = 0; i < 8; ++i) {
        const auto [start, goal] = random_pair(d, rng);
        TempDir dir("engine-mirror");
        SolveOptions opts;
        opts.engine = engine_config(dir);
        const auto got = solve(AlgorithmId::PemAStar, d, start, goal, md_pair(d, start, goal), opts);
        const auto want = layered_astar(d, start, goal, ManhattanDistance(d, goal));
        CHECK(got.cost == want.cost);
        CHECK(got.expanded == want.expanded);
        CHECK(got.generated == want.generated);
    }
}

TEST_CASE("every pem algorithm is optimal on 3x3") {
    TilePuzzle d(3);
    std::mt19937_64 rng(72);
    for (int i = 0; i < 5; ++i) {
        const auto [start, goal] = random_pair(d, rng);
        const int oracle = bfs_oracle(d, start, goal).cost;
        for (const AlgorithmId id :
             {AlgorithmId::PemAStar, AlgorithmId::PemRAStar, AlgorithmId::Pemm,
              AlgorithmId::PemBaeStar}) {
            TempDir dir("engine-optimal");
            SolveOptions opts;
            opts.engine = engine_config(dir);
            const auto got = solve(id, d, start, goal, md_pair(d, start, goal), opts);
            CHECK_MESSAGE(got.cost == oracle, algorithm_name(id));

            std::uint64_t hist_sum = 0;
            for (const auto& hist : got.depth_histogram)
                for (const auto& [g, cnt] : hist) hist_sum += cnt;
            CHECK(hist_sum == got.expanded);
            CHECK(got.peak_disk_bytes > 0);

            // Emitted bounds never exceed the optimum and never decrease
            // under lower-g-first with these consistent heuristics.
            for (std::size_t j = 0; j < got.lb_trace.size(); ++j) {
                CHECK(got.lb_trace[j] <= oracle);
                if (j > 0) CHECK(got.lb_trace[j] >= got.lb_trace[j - 1]);
            }
        }
    }
}

TEST_CASE("pem algorithms are optimal on hanoi") {
    HanoiPuzzle d(7);
    std::mt19937_64 rng(73);
    for (int i = 0; i < 4; ++i) {
        const DomainState start = random_hanoi(d, rng);
        const DomainState goal = random_hanoi(d, rng);
        const int oracle = bfs_oracle(d, start, goal).cost;
        HeuristicPair h{make_evaluator(d, "pdb:5+2", goal, {}),
                        make_evaluator(d, "pdb:5+2", start, {})};
        for (const AlgorithmId id :
             {AlgorithmId::PemAStar, AlgorithmId::Pemm, AlgorithmId::PemBaeStar}) {
            TempDir dir("engine-hanoi");
            SolveOptions opts;
            opts.engine = engine_config(dir);
            CHECK_MESSAGE(solve(id, d, start, goal, h, opts).cost == oracle, algorithm_name(id));
        }
    }
}

TEST_CASE("identity instance short-circuits") {
    TilePuzzle d(4);
    TempDir dir("engine-identity");
    SolveOptions opts;
    opts.engine = engine_config(dir);
    const DomainState g = d.canonical_goal();
    const auto out = solve(AlgorithmId::PemBaeStar, d, g, g, md_pair(d, g, g), opts);
    CHECK(out.cost == 0);
    CHECK(out.expanded == 0);
}

TEST_CASE("worker count changes neither costs nor totals") {
    TilePuzzle d(3);
    std::mt19937_64 rng(74);
    const auto [start, goal] = random_pair(d, rng);
    SearchOutcome reference;
    for (const int workers : {1, 2, 8}) {
        TempDir dir("engine-workers");
        SolveOptions opts;
        opts.engine = engine_config(dir, workers);
        const auto got =
            solve(AlgorithmId::PemBaeStar, d, start, goal, md_pair(d, start, goal), opts);
        if (workers == 1) {
            reference = got;
        } else {
            CHECK(got.cost == reference.cost);
            CHECK(got.expanded == reference.expanded);
            CHECK(got.generated == reference.generated);
        }
    }
}

TEST_CASE("single-worker reruns are bit-identical") {
    TilePuzzle d(3);
    std::mt19937_64 rng(75);
    const auto [start, goal] = random_pair(d, rng);
    SearchOutcome first;
    for (int run = 0; run < 2; ++run) {
        TempDir dir("engine-rerun");
        SolveOptions opts;
        opts.engine = engine_config(dir);
        const auto got = solve(AlgorithmId::PemAStar, d, start, goal, md_pair(d, start, goal), opts);
        if (run == 0)
            first = got;
        else {
            CHECK(got.expanded == first.expanded);
            CHECK(got.generated == first.generated);
            CHECK(got.cost == first.cost);
            CHECK(got.lb_trace == first.lb_trace);
        }
    }
}

TEST_CASE("g-level scan restriction changes nothing") {
    TilePuzzle d(3);
    std::mt19937_64 rng(76);
    for (int i = 0; i < 3; ++i) {
        const auto [start, goal] = random_pair(d, rng);
        EngineResult results[2];
        for (const bool rule : {true, false}) {
            TempDir dir("engine-glevel");
            EngineConfig cfg = engine_config(dir);
            cfg.g_level_rule = rule;
            cfg.collect_closed_sets = true;
            results[rule ? 0 : 1] = run_search(d, start, goal, md_pair(d, start, goal),
                                               make_policy(AlgorithmId::PemAStar), cfg);
        }
        CHECK(results[0].outcome.cost == results[1].outcome.cost);
        CHECK(results[0].outcome.expanded == results[1].outcome.expanded);
        CHECK(results[0].closed_sets[0] == results[1].closed_sets[0]);
        CHECK(results[0].closed_sets[1] == results[1].closed_sets[1]);
    }
}

TEST_CASE("delayed solution detection on a unidirectional policy stays optimal") {
    TilePuzzle d(3);
    std::mt19937_64 rng(77);
    for (int i = 0; i < 3; ++i) {
        const auto [start, goal] = random_pair(d, rng);
        const int oracle = bfs_oracle(d, start, goal).cost;
        TempDir dir("engine-dsd");
        SearchPolicy policy = make_policy(AlgorithmId::PemAStar);
        policy.solution_detection = SolutionDetection::Delayed;
        const auto got =
            run_search(d, start, goal, md_pair(d, start, goal), policy, engine_config(dir));
        CHECK(got.outcome.cost == oracle);
    }
}

TEST_CASE("closed sets match the bfs layers reachable below the optimum") {
    // Soundness of duplicate detection: nothing the engine closed twice, and
    // everything it closed is a real state at its true depth.
    TilePuzzle d(3);
    std::mt19937_64 rng(78);
    const auto [start, goal] = random_pair(d, rng);
    TempDir dir("engine-ddsound");
    EngineConfig cfg = engine_config(dir);
    cfg.collect_closed_sets = true;
    const auto res = run_search(d, start, goal, md_pair(d, start, goal),
                                make_policy(AlgorithmId::PemAStar), cfg);
    const auto dist = bfs_distance_map(d, start);
    std::set<PackedState> seen;
    for (const PackedState& p : res.closed_sets[0]) {
        CHECK(seen.insert(p).second);  // no duplicates across closed buckets
        CHECK(dist.count(packed_to_u64(p)) == 1);
    }
}

TEST_CASE("engine raises errors for bad inputs and tiny budgets") {
    TilePuzzle d(3);
    std::mt19937_64 rng(79);
    const auto [start, goal] = random_pair(d, rng);
    TempDir dir("engine-errors");

    DomainState bad = start;
    bad.v[0] = bad.v[1];
    SolveOptions opts;
    opts.engine = engine_config(dir);
    CHECK_THROWS_AS(solve(AlgorithmId::PemAStar, d, bad, goal, md_pair(d, start, goal), opts),
                    InputError);

    EngineConfig tiny = engine_config(dir);
    tiny.memory_budget_bytes = 1024;
    CHECK_THROWS_AS(
        run_search(d, start, goal, md_pair(d, start, goal), make_policy(AlgorithmId::PemAStar), tiny),
        CapacityError);

    EngineConfig hurried = engine_config(dir);
    hurried.max_seconds = 1e-9;
    CHECK_THROWS_AS(run_search(d, start, goal, md_pair(d, start, goal),
                               make_policy(AlgorithmId::PemAStar), hurried),
                    TimeoutError);

    CHECK_THROWS_AS(run_search(d, start, goal, HeuristicPair{}, make_policy(AlgorithmId::PemAStar),
                               engine_config(dir)),
                    InputError);
}

TEST_CASE("aida* and raida* are optimal and threshold-consistent") {
    TilePuzzle d(3);
    std::mt19937_64 rng(80);
    for (int i = 0; i < 5; ++i) {
        const auto [start, goal] = random_pair(d, rng);
        const int oracle = bfs_oracle(d, start, goal).cost;
        ManhattanDistance hf(d, goal);
        std::vector<int> thresholds;
        AidaConfig cfg;
        cfg.workers = 4;
        const auto out = aida_star(d, start, goal, hf, cfg, &thresholds);
        CHECK(out.cost == oracle);
        for (std::size_t j = 1; j < thresholds.size(); ++j)
            CHECK(thresholds[j] > thresholds[j - 1]);
        if (oracle > 0) CHECK(out.cost == thresholds.back());

        SolveOptions opts;
        opts.engine.workers = 2;
        HeuristicPair pair = md_pair(d, start, goal);
        CHECK(solve(AlgorithmId::RAidaStar, d, start, goal, pair, opts).cost == oracle);
    }
    // Perfect-bound case: one iteration, cost equals the initial estimate.
    const DomainState goal = d.canonical_goal();
    DomainState succ[Domain::kMaxSuccessors];
    d.successors(goal, succ);
    std::vector<int> thresholds;
    const auto out = aida_star(d, succ[0], goal, ManhattanDistance(d, goal), {}, &thresholds);
    CHECK(out.cost == 1);
    CHECK(thresholds.size() == 1);
}

TEST_CASE("solve covers the in-memory roster") {
    TilePuzzle d(3);
    std::mt19937_64 rng(81);
    const auto [start, goal] = random_pair(d, rng);
    const HeuristicPair pair = md_pair(d, start, goal);
    SolveOptions opts;
    const int oracle = solve(AlgorithmId::BfsOracle, d, start, goal, pair, opts).cost;
    for (const AlgorithmId id : {AlgorithmId::AStar, AlgorithmId::BaeStar, AlgorithmId::IdaStar})
        CHECK(solve(id, d, start, goal, pair, opts).cost == oracle);
}

TEST_CASE("algorithm name round-trip") {
    for (const AlgorithmId id : kAllAlgorithms)
        CHECK(algorithm_from_name(algorithm_name(id)) == id);
    CHECK(!algorithm_from_name("dijkstra").has_value());
    CHECK_THROWS_AS(make_policy(AlgorithmId::IdaStar), InputError);
}
