#pragma once

#include <string>
#include <vector>

#include "pembihs/bucket_store.hpp"
#include "pembihs/common.hpp"
#include "pembihs/domain.hpp"

namespace pembihs {

// Bucket identifier schemes: which node values key a bucket.
//   GH     (g, h_D)        external A* style
//   GPr    (g, priority)   MM style, priority = max(f, 2g)
//   GHfHb  (g, h_F, h_B)   BAE* style
enum class SchemeKind : std::uint8_t { GH, GPr, GHfHb };

enum class DirectionRule : std::uint8_t {
    AlwaysForward,
    AlwaysBackward,
    Alternate,
    MinPriority,
    Cardinality,
};

enum class LowerBoundRule : std::uint8_t { FMin, MMBound, BBound };
enum class SolutionDetection : std::uint8_t { Immediate, Delayed };
enum class TieBreak : std::uint8_t { LowerGFirst, HigherGFirst };

struct SearchPolicy {
    DirectionRule direction_rule = DirectionRule::AlwaysForward;
    SchemeKind scheme = SchemeKind::GH;
    LowerBoundRule lower_bound_rule = LowerBoundRule::FMin;
    SolutionDetection solution_detection = SolutionDetection::Immediate;
    TieBreak tie_break = TieBreak::LowerGFirst;
};

BucketKey make_bucket_key(SchemeKind scheme, Direction dir, const NodeAnnotation& a);
std::vector<std::string> scheme_component_names(SchemeKind scheme);
bool scheme_needs_forward_h(SchemeKind scheme, Direction dir);
bool scheme_needs_backward_h(SchemeKind scheme, Direction dir);

// The scalar the bucket order minimizes: f for GH, pr for GPr, b for GHfHb.
int priority_value(SchemeKind scheme, Direction dir, const BucketKey& key);

// Total order over buckets of one direction: priority value, then the g
// tie-break, then remaining components lexicographically.
bool bucket_less(SchemeKind scheme, TieBreak tie_break, Direction dir, const BucketKey& a,
                 const BucketKey& b);

// Everything derivable from identifiers alone, in one pass over the records.
// Minima are kInfCost over an empty frontier. For GPr buckets the f minimum
// is the tightest bound identifiers admit: f equals pr when pr > 2g and is
// only bounded below by g otherwise.
struct FrontierStats {
    int f_min = kInfCost;
    int g_min = kInfCost;
    int b_min = kInfCost;      // GHfHb only; kInfCost elsewhere
    int pr_min = kInfCost;
    int best_priority = kInfCost;
    std::uint64_t total_nodes = 0;
    std::size_t buckets = 0;
};

FrontierStats frontier_stats(SchemeKind scheme, const Frontier& open);

// FMin: min f on the policy's expanding side. MMBound: Eq-2 style
// max(PrMin, fMinF, fMinB, gMinF + gMinB) with PrMin joint over both sides.
// BBound: floor((bMinF + bMinB) / 2). Any empty required side yields
// kInfCost, which the driver reads as "halt".
int compute_lower_bound(const SearchPolicy& policy, const FrontierStats& forward,
                        const FrontierStats& backward);

Direction choose_direction(const SearchPolicy& policy, const FrontierStats& forward,
                           const FrontierStats& backward, Direction last);

// Minimum bucket under the policy order; frontier must be non-empty.
BucketRecord* choose_next_bucket(SchemeKind scheme, TieBreak tie_break, Frontier& open);

// Same-direction closed buckets that can hold a duplicate of a state in the
// loaded bucket: h components must match where the scheme has them, and on
// unit-cost undirected graphs only levels x-2, x-1, x can collide.
bool closed_scan_compatible(SchemeKind scheme, const BucketKey& loaded, const BucketKey& candidate,
                            bool g_level_rule, const DomainProperties& props);

// Opposite-direction closed buckets that can meet the loaded bucket: the
// same state has the same h_F and h_B, so both must match under GHfHb.
// GH and GPr identifiers carry no matchable h information.
bool dsd_scan_compatible(SchemeKind scheme, const BucketKey& loaded, const BucketKey& candidate);

}  // namespace pembihs
