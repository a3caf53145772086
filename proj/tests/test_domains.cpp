#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "pembihs/domain.hpp"
#include "pembihs/inmemory.hpp"

using namespace pembihs;

namespace {

DomainState tile_state(std::initializer_list<int> tiles) {
    DomainState s;
    int i = 0;
    for (int t : tiles) s.v[i++] = static_cast<std::uint8_t>(t);
    return s;
}

DomainState random_hanoi(const HanoiPuzzle& d, std::mt19937_64& rng) {
    DomainState s;
    std::uniform_int_distribution<int> peg(0, 3);
    for (int i = 0; i < d.disks(); ++i) s.v[i] = static_cast<std::uint8_t>(peg(rng));
    return s;
}

DomainState random_tiles(const TilePuzzle& d, std::mt19937_64& rng) {
    DomainState s = d.canonical_goal();
    std::shuffle(s.v.begin(), s.v.begin() + d.cells(), rng);
    return s;
}

}  // namespace

TEST_CASE("record widths") {
    CHECK(TilePuzzle(3).record_width() == 4);
    CHECK(TilePuzzle(4).record_width() == 8);
    CHECK(TilePuzzle(5).record_width() == 11);  // ceil(84 bits)
    CHECK(HanoiPuzzle(20).record_width() == 5);
    CHECK(HanoiPuzzle(12).record_width() == 3);
    CHECK(HanoiPuzzle(8).record_width() == 2);
}

TEST_CASE("lehmer rank boundaries") {
    TilePuzzle d(4);
    PackedState p = d.pack(d.canonical_goal());
    for (auto b : p.bytes) CHECK(b == std::byte{0});  // identity permutation -> rank 0

    DomainState descending;
    for (int i = 0; i < 16; ++i) descending.v[i] = static_cast<std::uint8_t>(15 - i);
    std::uint64_t rank = packed_to_u64(d.pack(descending));
    std::uint64_t fact16 = 1;
    for (int i = 2; i <= 16; ++i) fact16 *= static_cast<std::uint64_t>(i);
    CHECK(rank == fact16 - 1);

    CHECK(d.unpack(d.pack(descending)) == descending);
}

TEST_CASE("3x3 exhaustive codec round-trip") {
    TilePuzzle d(3);
    DomainState s = d.canonical_goal();
    std::uint64_t count = 0;
    do {
        CHECK(d.unpack(d.pack(s)) == s);
        ++count;
    } while (std::next_permutation(s.v.begin(), s.v.begin() + 9));
    CHECK(count == 362880);
}

TEST_CASE("3x3 reachable space is 9!/2") {
    TilePuzzle d(3);
    auto dist = bfs_distance_map(d, d.canonical_goal());
    CHECK(dist.size() == 181440);
    int max_depth = 0;
    for (const auto& [k, v] : dist) max_depth = std::max(max_depth, v);
    CHECK(max_depth == 31);
}

TEST_CASE("hanoi codec randomized round-trip") {
    HanoiPuzzle d(12);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const DomainState s = random_hanoi(d, rng);
        CHECK(d.unpack(d.pack(s)) == s);
    }
}

TEST_CASE("hanoi reachable space is 4^disks") {
    HanoiPuzzle d(8);
    auto dist = bfs_distance_map(d, d.all_on_peg(0));
    CHECK(dist.size() == 65536);
}

TEST_CASE("decode rejects out-of-range records") {
    TilePuzzle d(3);
    PackedState p;
    p.bytes.fill(std::byte{0xff});
    p.bytes[4] = p.bytes[5] = std::byte{0};  // keep only the 4 record bytes set
    for (int i = 4; i < 16; ++i) p.bytes[i] = std::byte{0};
    CHECK_THROWS_AS(d.decode(p.bytes.data()), CorruptionError);

    HanoiPuzzle h(3);  // one byte, 6 meaningful bits
    PackedState q;
    q.bytes[0] = std::byte{0xc0};
    CHECK_THROWS_AS(h.decode(q.bytes.data()), CorruptionError);
}

TEST_CASE("encode rejects illegal states") {
    TilePuzzle d(3);
    DomainState bad = tile_state({0, 1, 2, 3, 4, 5, 6, 7, 7});
    std::byte out[16];
    CHECK_THROWS_AS(d.encode(bad, out), InputError);
}

TEST_CASE("tile successor counts by blank position") {
    TilePuzzle d(4);
    DomainState corner = d.canonical_goal();  // blank at cell 0
    DomainState succ[Domain::kMaxSuccessors];
    CHECK(d.successors(corner, succ) == 2);

    DomainState center = tile_state({1, 2, 3, 4, 5, 0, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
    CHECK(d.successors(center, succ) == 4);
}

TEST_CASE("hanoi successor counts") {
    HanoiPuzzle d(12);
    DomainState succ[Domain::kMaxSuccessors];
    CHECK(d.successors(d.all_on_peg(2), succ) == 3);

    // Tops spread over all four pegs: 3+2+1 legal moves.
    DomainState s;
    for (int i = 0; i < 12; ++i) s.v[i] = static_cast<std::uint8_t>(i % 4);
    CHECK(d.successors(s, succ) == 6);
}

TEST_CASE("successor relation is symmetric") {
    std::mt19937_64 rng(11);
    TilePuzzle tiles(4);
    HanoiPuzzle hanoi(10);
    DomainState succ[Domain::kMaxSuccessors], back[Domain::kMaxSuccessors];
    auto check_domain = [&](const Domain& d, const DomainState& s) {
        const int cnt = d.successors(s, succ);
        for (int i = 0; i < cnt; ++i) {
            const int back_cnt = d.successors(succ[i], back);
            CHECK(std::count(back, back + back_cnt, s) == 1);
        }
    };
    for (int i = 0; i < 5000; ++i) check_domain(tiles, random_tiles(tiles, rng));
    for (int i = 0; i < 5000; ++i) check_domain(hanoi, random_hanoi(hanoi, rng));
}

TEST_CASE("tile reachability parity") {
    TilePuzzle d(4);
    DomainState goal = d.canonical_goal();
    DomainState swapped = goal;
    std::swap(swapped.v[1], swapped.v[2]);  // single transposition, blank fixed
    CHECK(!d.mutually_reachable(goal, swapped));
    CHECK(d.mutually_reachable(goal, goal));

    DomainState succ[Domain::kMaxSuccessors];
    const int cnt = d.successors(goal, succ);
    for (int i = 0; i < cnt; ++i) CHECK(d.mutually_reachable(goal, succ[i]));
}

TEST_CASE("reflection is an involution fixing the goal") {
    TilePuzzle d(4);
    CHECK(d.reflect(d.canonical_goal()) == d.canonical_goal());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const DomainState s = random_tiles(d, rng);
        CHECK(d.reflect(d.reflect(s)) == s);
        CHECK(d.is_legal(d.reflect(s)));
    }
}

TEST_CASE("domain factory") {
    CHECK(make_domain("stp4")->name() == "stp4");
    CHECK(make_domain("toh4:12")->name() == "toh4:12");
    CHECK_THROWS_AS(make_domain("stp7"), InputError);
}
