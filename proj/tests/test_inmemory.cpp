#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "pembihs/domain.hpp"
#include "pembihs/heuristics.hpp"
#include "pembihs/inmemory.hpp"

using namespace pembihs;

namespace {

DomainState random_tiles(const TilePuzzle& d, std::mt19937_64& rng) {
    DomainState s = d.canonical_goal();
    std::shuffle(s.v.begin(), s.v.begin() + d.cells(), rng);
    return s;
}

// Random mutually reachable 3x3 pair; a tile swap in the start fixes parity.
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

}  // namespace

TEST_CASE("bfs oracle sweeps the 3x3 space") {
    TilePuzzle d(3);
    const auto dist = bfs_distance_map(d, d.canonical_goal());
    CHECK(dist.size() == 181440);
    int max_depth = 0;
    for (const auto& [k, v] : dist) max_depth = std::max(max_depth, v);
    CHECK(max_depth == 31);
}

TEST_CASE("identity instances cost zero everywhere") {
    TilePuzzle d(3);
    const DomainState g = d.canonical_goal();
    ManhattanDistance md(d, g);
    HeuristicPair pair{std::make_shared<ManhattanDistance>(d, g),
                       std::make_shared<ManhattanDistance>(d, g)};
    CHECK(bfs_oracle(d, g, g).cost == 0);
    CHECK(astar(d, g, g, md).cost == 0);
    CHECK(astar(d, g, g, md).expanded == 0);
    CHECK(bae_star(d, g, g, pair).cost == 0);
    CHECK(ida_star(d, g, g, md).cost == 0);
}

TEST_CASE("all in-memory algorithms agree with the oracle on 3x3") {
    TilePuzzle d(3);
    std::mt19937_64 rng(101);
    for (int i = 0; i < 25; ++i) {
        const auto [start, goal] = random_pair(d, rng);
        const int oracle = bfs_oracle(d, start, goal).cost;
        ManhattanDistance md(d, goal);
        HeuristicPair pair{std::make_shared<ManhattanDistance>(d, goal),
                           std::make_shared<ManhattanDistance>(d, start)};
        const auto a = astar(d, start, goal, md);
        const auto b = bae_star(d, start, goal, pair);
        const auto c = ida_star(d, start, goal, md);
        CHECK(a.cost == oracle);
        CHECK(b.cost == oracle);
        CHECK(c.cost == oracle);

        // Histogram totaling and lower-bound soundness come with the run.
        std::uint64_t sum = 0;
        for (const auto& hist : a.depth_histogram)
            for (const auto& [g, cnt] : hist) sum += cnt;
        CHECK(sum == a.expanded);
        for (std::size_t j = 0; j < b.lb_trace.size(); ++j) {
            CHECK(b.lb_trace[j] <= oracle);
            if (j > 0) CHECK(b.lb_trace[j] >= b.lb_trace[j - 1]);
        }
    }
}

TEST_CASE("bae* agrees with the oracle on hanoi") {
    HanoiPuzzle d(8);
    std::mt19937_64 rng(202);
    for (int i = 0; i < 10; ++i) {
        const DomainState start = random_hanoi(d, rng);
        const DomainState goal = random_hanoi(d, rng);
        const int oracle = bfs_oracle(d, start, goal).cost;
        HeuristicPair pair{make_evaluator(d, "pdb:6+2", goal, {}),
                           make_evaluator(d, "pdb:6+2", start, {})};
        CHECK(bae_star(d, start, goal, pair).cost == oracle);
        CHECK(astar(d, start, goal, *pair.forward).cost == oracle);
    }
}

TEST_CASE("fraction before midpoint") {
    SearchOutcome out;
    out.histogram(Direction::Forward)[0] = 1;
    out.histogram(Direction::Forward)[1] = 2;
    out.histogram(Direction::Forward)[2] = 4;
    out.expanded = 7;
    CHECK(fraction_before_midpoint(out, 4) == doctest::Approx(3.0 / 7.0));

    SearchOutcome all_shallow;
    all_shallow.histogram(Direction::Forward)[0] = 9;
    all_shallow.expanded = 9;
    CHECK(fraction_before_midpoint(all_shallow, 5) == doctest::Approx(1.0));
    CHECK(fraction_before_midpoint(all_shallow, 0) == doctest::Approx(1.0));
}

TEST_CASE("in-memory limits raise capacity errors") {
    TilePuzzle d(3);
    InMemoryLimits limits;
    limits.max_states = 100;
    const DomainState goal = d.canonical_goal();
    std::mt19937_64 rng(7);
    const auto [start, g2] = random_pair(d, rng);
    ManhattanDistance md(d, goal);
    CHECK_THROWS_AS(bfs_distance_map(d, goal, limits), CapacityError);
    CHECK_THROWS_AS(astar(d, start, goal, md, limits), CapacityError);
}

TEST_CASE("ida* threshold equals final cost") {
    TilePuzzle d(3);
    std::mt19937_64 rng(55);
    const auto [start, goal] = random_pair(d, rng);
    ManhattanDistance md(d, goal);
    const auto out = ida_star(d, start, goal, md);
    const int oracle = bfs_oracle(d, start, goal).cost;
    CHECK(out.cost == oracle);
    // Perfect-bound case: start one move from goal.
    DomainState succ[Domain::kMaxSuccessors];
    d.successors(goal, succ);
    CHECK(ida_star(d, succ[0], goal, ManhattanDistance(d, goal)).cost == 1);
}
