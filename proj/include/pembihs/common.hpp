#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pembihs {

// Cost sentinel for "no value / no solution". Large enough to dominate any
// reachable path cost, small enough that sums of two sentinels do not overflow.
inline constexpr int kInfCost = std::numeric_limits<int>::max() / 4;

enum class Direction : std::uint8_t { Forward = 0, Backward = 1 };

inline constexpr Direction opposite(Direction d) {
    return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

inline constexpr const char* to_string(Direction d) {
    return d == Direction::Forward ? "F" : "B";
}

// Error taxonomy. Fatal conditions are exceptions; "no solution" is a value.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};
struct StorageError : std::runtime_error {
    explicit StorageError(const std::string& what) : std::runtime_error(what) {}
};
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};
struct CorruptionError : std::runtime_error {
    explicit CorruptionError(const std::string& what) : std::runtime_error(what) {}
};
struct TimeoutError : std::runtime_error {
    explicit TimeoutError(const std::string& what) : std::runtime_error(what) {}
};

// Per-node search annotation. f/d/b are always derived, never stored.
struct NodeAnnotation {
    int g = 0;
    int hf = 0;  // estimate toward goal
    int hb = 0;  // estimate toward start

    int h(Direction d) const { return d == Direction::Forward ? hf : hb; }
    int h_opposite(Direction d) const { return d == Direction::Forward ? hb : hf; }
    int f(Direction d) const { return g + h(d); }
    int diff(Direction d) const { return g - h_opposite(d); }
    int b(Direction d) const { return f(d) + diff(d); }
};

}  // namespace pembihs
