#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "pembihs/domain.hpp"

namespace pembihs {

// An admissible, consistent estimator of the distance from a state to the
// fixed target it was built for. Lookups are read-only and thread-safe.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual int value(const DomainState& s) const = 0;
};

struct HeuristicPair {
    std::shared_ptr<const Evaluator> forward;   // estimates dist(s, goal)
    std::shared_ptr<const Evaluator> backward;  // estimates dist(start, s)
};

class ManhattanDistance final : public Evaluator {
public:
    ManhattanDistance(const TilePuzzle& puzzle, const DomainState& target);
    int value(const DomainState& s) const override;

private:
    int n_, cells_;
    std::array<std::array<std::uint8_t, 25>, 25> dist_{};  // [tile][cell]
};

// Count of disks not on their target peg. Each move changes it by at most one.
class MisplacedDisks final : public Evaluator {
public:
    MisplacedDisks(const HanoiPuzzle& puzzle, const DomainState& target);
    int value(const DomainState& s) const override;

private:
    int disks_;
    DomainState target_;
};

// One additive-PDB component: a subset of tiles or disks, with exact abstract
// distances to the projected target.
struct PatternSpec {
    std::string domain;         // Domain::name() of the concrete space
    std::vector<int> elements;  // tile labels (nonzero) or disk indices
    bool include_blank = false; // sliding tile only
    PackedState target;

    std::uint64_t hash() const;
};

class PatternDb {
public:
    virtual ~PatternDb() = default;
    virtual int lookup(const DomainState& s) const = 0;
    const PatternSpec& spec() const { return spec_; }
    const std::vector<std::uint8_t>& entries() const { return entries_; }

    static constexpr std::uint8_t kUnreachable = 0xff;

protected:
    PatternSpec spec_;
    std::vector<std::uint8_t> entries_;
};

struct PdbOptions {
    std::filesystem::path cache_dir;                     // empty: no memoization
    std::uint64_t build_budget_bytes = 512ull << 20;     // abstract-space cap
};

// Builds (or reloads from cache) the exact abstract distance table by
// breadth-first search from the projected target. Blank moves cost 0 in tile
// abstractions so component values stay additive.
std::unique_ptr<PatternDb> build_pdb(const Domain& domain, const PatternSpec& spec,
                                     const PdbOptions& opts);

// Sum of disjoint pattern components. Validates that cost-bearing elements
// are disjoint and cover the whole domain.
class AdditivePdb final : public Evaluator {
public:
    AdditivePdb(const Domain& domain, std::vector<std::unique_ptr<PatternDb>> parts);
    int value(const DomainState& s) const override;
    const std::vector<std::unique_ptr<PatternDb>>& parts() const { return parts_; }

private:
    std::vector<std::unique_ptr<PatternDb>> parts_;
};

// max(h(s), h(reflect(s))) about the main diagonal. Requires a square tile
// puzzle whose target is invariant under the reflection.
class ReflectedMax final : public Evaluator {
public:
    ReflectedMax(const TilePuzzle& puzzle, std::shared_ptr<const Evaluator> base,
                 const DomainState& target);
    int value(const DomainState& s) const override;

private:
    const TilePuzzle& puzzle_;
    std::shared_ptr<const Evaluator> base_;
};

// Heuristic factory. spec: "md", "pdb:<name>", or "pdb:<name>+r" (reflection).
// Tile names: "44", "full" (stp3), "3444" (stp4), "6666" (stp5).
// Hanoi names: sizes joined by '+', largest disks first (e.g. "10+2"), or "full".
std::shared_ptr<const Evaluator> make_evaluator(const Domain& domain, const std::string& spec,
                                                const DomainState& target, const PdbOptions& opts);

// The partition behind a named tile/hanoi PDB, exposed for tests.
std::vector<std::vector<int>> named_partition(const Domain& domain, const std::string& name);

}  // namespace pembihs
