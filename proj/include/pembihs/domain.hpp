#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "pembihs/common.hpp"

namespace pembihs {

// Decoded domain state. Only the first Domain::state_size() bytes are
// meaningful; the tail stays zeroed so equality and hashing can use the
// whole array.
struct DomainState {
    std::array<std::uint8_t, 32> v{};

    friend bool operator==(const DomainState&, const DomainState&) = default;
    friend auto operator<=>(const DomainState&, const DomainState&) = default;
};

// Fixed-width on-disk encoding of one state. bytes[width..) stays zero.
struct PackedState {
    std::array<std::byte, 16> bytes{};

    friend bool operator==(const PackedState&, const PackedState&) = default;
    friend auto operator<=>(const PackedState&, const PackedState&) = default;
};

std::uint64_t hash_packed(const PackedState& p);

// Packed value as an integer key, for in-memory algorithms. Requires the
// domain's record width to fit in 8 bytes.
std::uint64_t packed_to_u64(const PackedState& p);

struct DomainProperties {
    bool unit_cost = true;
    bool undirected = true;
    int record_width = 0;  // bytes per packed state
};

class Domain {
public:
    static constexpr int kMaxSuccessors = 12;

    virtual ~Domain() = default;
    virtual std::string name() const = 0;
    virtual int state_size() const = 0;
    virtual DomainProperties properties() const = 0;
    virtual bool is_legal(const DomainState& s) const = 0;

    // Fixed-width codec; encode/decode are mutually inverse on legal states.
    virtual void encode(const DomainState& s, std::byte* out) const = 0;
    virtual DomainState decode(const std::byte* in) const = 0;

    // Writes up to kMaxSuccessors states into out, returns the count.
    virtual int successors(const DomainState& s, DomainState* out) const = 0;

    int record_width() const { return properties().record_width; }
    PackedState pack(const DomainState& s) const;
    DomainState unpack(const PackedState& p) const;
};

// N x N sliding-tile puzzle, N in {3,4,5}. Tile 0 is the blank. States are
// stored as Lehmer permutation ranks: 4 bytes for N=3, 8 for N=4 (a whole
// word; 45 bits padded), 11 for N=5 (84 bits).
class TilePuzzle final : public Domain {
public:
    explicit TilePuzzle(int n);

    std::string name() const override;
    int state_size() const override { return cells_; }
    DomainProperties properties() const override;
    bool is_legal(const DomainState& s) const override;
    void encode(const DomainState& s, std::byte* out) const override;
    DomainState decode(const std::byte* in) const override;
    int successors(const DomainState& s, DomainState* out) const override;

    int n() const { return n_; }
    int cells() const { return cells_; }
    DomainState canonical_goal() const;

    // Reachability invariant: permutation parity must match the parity of the
    // blank's taxicab displacement.
    bool mutually_reachable(const DomainState& a, const DomainState& b) const;

    // Transpose about the main diagonal with matching tile relabeling. Maps
    // the canonical goal to itself.
    DomainState reflect(const DomainState& s) const;

private:
    int n_;
    int cells_;
    int width_;
    std::array<std::array<std::int8_t, 4>, 25> neighbors_{};
};

// 4-peg Towers of Hanoi. peg_of_disk[i] is the peg of disk i, disk 0 being
// the largest; stacking order is implied by the index order. 2 bits per disk.
class HanoiPuzzle final : public Domain {
public:
    explicit HanoiPuzzle(int disks);

    std::string name() const override;
    int state_size() const override { return disks_; }
    DomainProperties properties() const override;
    bool is_legal(const DomainState& s) const override;
    void encode(const DomainState& s, std::byte* out) const override;
    DomainState decode(const std::byte* in) const override;
    int successors(const DomainState& s, DomainState* out) const override;

    int disks() const { return disks_; }
    DomainState all_on_peg(int peg) const;

private:
    int disks_;
    int width_;
};

// "stp3" / "stp4" / "stp5" / "toh4:<disks>"
std::unique_ptr<Domain> make_domain(const std::string& spec);

}  // namespace pembihs
