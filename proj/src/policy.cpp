#include "pembihs/policy.hpp"

#include <algorithm>

namespace pembihs {

namespace {

std::uint16_t clamp_component(int v, const char* what) {
    if (v < 0 || v > 0xffff) throw InputError(std::string(what) + " does not fit a bucket component");
    return static_cast<std::uint16_t>(v);
}

}  // namespace

BucketKey make_bucket_key(SchemeKind scheme, Direction dir, const NodeAnnotation& a) {
    BucketKey key;
    key.c[0] = clamp_component(a.g, "g");
    switch (scheme) {
        case SchemeKind::GH:
            key.n = 2;
            key.c[1] = clamp_component(a.h(dir), "h");
            break;
        case SchemeKind::GPr:
            key.n = 2;
            key.c[1] = clamp_component(std::max(a.f(dir), 2 * a.g), "pr");
            break;
        case SchemeKind::GHfHb:
            key.n = 3;
            key.c[1] = clamp_component(a.hf, "hF");
            key.c[2] = clamp_component(a.hb, "hB");
            break;
    }
    return key;
}

std::vector<std::string> scheme_component_names(SchemeKind scheme) {
    switch (scheme) {
        case SchemeKind::GH:
            return {"g", "h"};
        case SchemeKind::GPr:
            return {"g", "pr"};
        case SchemeKind::GHfHb:
            return {"g", "hf", "hb"};
    }
    return {};
}

bool scheme_needs_forward_h(SchemeKind scheme, Direction dir) {
    return scheme == SchemeKind::GHfHb || dir == Direction::Forward;
}

bool scheme_needs_backward_h(SchemeKind scheme, Direction dir) {
    return scheme == SchemeKind::GHfHb || dir == Direction::Backward;
}

int priority_value(SchemeKind scheme, Direction dir, const BucketKey& key) {
    const int g = key.c[0];
    switch (scheme) {
        case SchemeKind::GH:
            return g + key.c[1];
        case SchemeKind::GPr:
            return key.c[1];
        case SchemeKind::GHfHb: {
            const int hd = dir == Direction::Forward ? key.c[1] : key.c[2];
            const int ho = dir == Direction::Forward ? key.c[2] : key.c[1];
            return 2 * g + hd - ho;
        }
    }
    return kInfCost;
}

bool bucket_less(SchemeKind scheme, TieBreak tie_break, Direction dir, const BucketKey& a,
                 const BucketKey& b) {
    const int pa = priority_value(scheme, dir, a);
    const int pb = priority_value(scheme, dir, b);
    if (pa != pb) return pa < pb;
    if (a.c[0] != b.c[0])
        return tie_break == TieBreak::LowerGFirst ? a.c[0] < b.c[0] : a.c[0] > b.c[0];
    // Equal priority and g: remaining components lexicographically.
    for (int i = 1; i < a.n; ++i)
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
}

FrontierStats frontier_stats(SchemeKind scheme, const Frontier& open) {
    FrontierStats stats;
    const Direction dir = open.direction();
    open.for_each([&](const BucketRecord& rec) {
        const BucketKey& key = rec.id.key;
        const int g = key.c[0];
        stats.g_min = std::min(stats.g_min, g);
        stats.total_nodes += rec.node_count;
        stats.buckets += 1;
        switch (scheme) {
            case SchemeKind::GH: {
                const int f = g + key.c[1];
                stats.f_min = std::min(stats.f_min, f);
                stats.pr_min = std::min(stats.pr_min, std::max(f, 2 * g));
                break;
            }
            case SchemeKind::GPr: {
                const int pr = key.c[1];
                stats.pr_min = std::min(stats.pr_min, pr);
                stats.f_min = std::min(stats.f_min, pr > 2 * g ? pr : g);
                break;
            }
            case SchemeKind::GHfHb: {
                const int f = g + (dir == Direction::Forward ? key.c[1] : key.c[2]);
                stats.f_min = std::min(stats.f_min, f);
                stats.pr_min = std::min(stats.pr_min, std::max(f, 2 * g));
                stats.b_min = std::min(stats.b_min, priority_value(scheme, dir, key));
                break;
            }
        }
        stats.best_priority = std::min(stats.best_priority, priority_value(scheme, dir, key));
    });
    return stats;
}

int compute_lower_bound(const SearchPolicy& policy, const FrontierStats& forward,
                        const FrontierStats& backward) {
    switch (policy.lower_bound_rule) {
        case LowerBoundRule::FMin:
            return policy.direction_rule == DirectionRule::AlwaysBackward ? backward.f_min
                                                                          : forward.f_min;
        case LowerBoundRule::MMBound: {
            if (forward.buckets == 0 || backward.buckets == 0) return kInfCost;
            const int pr_min = std::min(forward.pr_min, backward.pr_min);
            const int sum_g = forward.g_min + backward.g_min;
            return std::min(kInfCost,
                            std::max({pr_min, forward.f_min, backward.f_min, sum_g}));
        }
        case LowerBoundRule::BBound: {
            if (forward.buckets == 0 || backward.buckets == 0) return kInfCost;
            return std::min(kInfCost, (forward.b_min + backward.b_min) / 2);
        }
    }
    return kInfCost;
}

Direction choose_direction(const SearchPolicy& policy, const FrontierStats& forward,
                           const FrontierStats& backward, Direction last) {
    const bool have_f = forward.buckets > 0;
    const bool have_b = backward.buckets > 0;
    if (!have_f && !have_b)
        throw std::logic_error("choose_direction called with two empty open lists");
    switch (policy.direction_rule) {
        case DirectionRule::AlwaysForward:
            return Direction::Forward;
        case DirectionRule::AlwaysBackward:
            return Direction::Backward;
        case DirectionRule::Alternate: {
            const Direction next = opposite(last);
            if (next == Direction::Forward ? have_f : have_b) return next;
            return opposite(next);
        }
        case DirectionRule::MinPriority:
            if (!have_f) return Direction::Backward;
            if (!have_b) return Direction::Forward;
            return backward.best_priority < forward.best_priority ? Direction::Backward
                                                                  : Direction::Forward;
        case DirectionRule::Cardinality:
            if (!have_f) return Direction::Backward;
            if (!have_b) return Direction::Forward;
            return backward.total_nodes < forward.total_nodes ? Direction::Backward
                                                              : Direction::Forward;
    }
    return Direction::Forward;
}

BucketRecord* choose_next_bucket(SchemeKind scheme, TieBreak tie_break, Frontier& open) {
    BucketRecord* best = nullptr;
    open.for_each([&](const BucketRecord& rec) {
        if (!best || bucket_less(scheme, tie_break, open.direction(), rec.id.key, best->id.key))
            best = const_cast<BucketRecord*>(&rec);
    });
    return best;
}

bool closed_scan_compatible(SchemeKind scheme, const BucketKey& loaded, const BucketKey& candidate,
                            bool g_level_rule, const DomainProperties& props) {
    // h components are state functions, so a duplicate lives in a bucket with
    // identical h identifiers.
    switch (scheme) {
        case SchemeKind::GH:
            if (candidate.c[1] != loaded.c[1]) return false;
            break;
        case SchemeKind::GHfHb:
            if (candidate.c[1] != loaded.c[1] || candidate.c[2] != loaded.c[2]) return false;
            break;
        case SchemeKind::GPr:
            break;  // pr depends on g; no h information to match on
    }
    if (g_level_rule && props.unit_cost && props.undirected) {
        const int x = loaded.c[0];
        const int gc = candidate.c[0];
        return gc == x || gc == x - 1 || gc == x - 2;
    }
    return true;
}

bool dsd_scan_compatible(SchemeKind scheme, const BucketKey& loaded, const BucketKey& candidate) {
    if (scheme == SchemeKind::GHfHb)
        return candidate.c[1] == loaded.c[1] && candidate.c[2] == loaded.c[2];
    return true;
}

}  // namespace pembihs
