#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "pembihs/common.hpp"

namespace pembihs {

struct SearchOutcome {
    int cost = kInfCost;  // kInfCost: no solution (an open list emptied)
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    double elapsed_seconds = 0.0;
    // Expansions by path depth, per search direction.
    std::array<std::map<int, std::uint64_t>, 2> depth_histogram{};
    std::uint64_t peak_disk_bytes = 0;
    // Proven lower bound after each expansion cycle, where the algorithm
    // computes one.
    std::vector<int> lb_trace;

    std::map<int, std::uint64_t>& histogram(Direction d) {
        return depth_histogram[static_cast<int>(d)];
    }
    const std::map<int, std::uint64_t>& histogram(Direction d) const {
        return depth_histogram[static_cast<int>(d)];
    }
};

// Fraction of all expansions that happened at depth strictly below the
// solution midpoint c*/2. Defined as 1.0 when c* is zero.
double fraction_before_midpoint(const SearchOutcome& outcome, int c_star);

}  // namespace pembihs
