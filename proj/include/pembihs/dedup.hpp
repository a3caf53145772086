#pragma once

#include <atomic>
#include <functional>

#include "pembihs/bucket_store.hpp"
#include "pembihs/domain.hpp"
#include "pembihs/thread_pool.hpp"

namespace pembihs {

// Open-addressed table holding one loaded bucket's distinct states. Inserts
// run concurrently during the read stage guarded by one mutex per group of
// 64 slots; later stages mark slots removed without locks (stages are
// barrier-separated, and flags are atomic for the parallel scans).
class InMemoryBucket {
public:
    enum class InsertResult { Inserted, Duplicate };

    InMemoryBucket(int width, std::uint64_t expected_records, MemoryBudget& budget);
    ~InMemoryBucket();

    InMemoryBucket(const InMemoryBucket&) = delete;
    InMemoryBucket& operator=(const InMemoryBucket&) = delete;

    InsertResult insert(const std::byte* rec);

    // Marks rec removed if live; returns whether this call removed it.
    bool try_remove(const std::byte* rec);
    bool contains_live(const std::byte* rec) const;

    int width() const { return width_; }
    std::uint64_t live_count() const { return live_.load(); }
    std::size_t slot_count() const { return capacity_; }
    bool slot_live(std::size_t i) const {
        return flags_[i].load(std::memory_order_relaxed) == kOccupied;
    }
    const std::byte* slot_data(std::size_t i) const { return data_.data() + i * width_; }

private:
    static constexpr std::uint8_t kEmpty = 0, kOccupied = 1, kRemoved = 2;
    static constexpr std::size_t kGroup = 64;

    std::size_t probe(const std::byte* rec) const;

    int width_;
    std::size_t capacity_ = 0;
    std::uint64_t reserved_ = 0;
    MemoryBudget& budget_;
    std::vector<std::byte> data_;
    std::unique_ptr<std::atomic<std::uint8_t>[]> flags_;
    std::vector<std::mutex> group_locks_;
    std::atomic<std::uint64_t> live_{0};
};

// Streams compatible closed buckets in segments and removes every loaded
// state found there. Returns the number of states removed.
std::uint64_t remove_duplicates_vs_closed(InMemoryBucket& bucket, const Frontier& closed,
                                          const std::function<bool(const BucketKey&)>& compatible,
                                          const BucketStore& store, std::byte* scratch,
                                          std::size_t scratch_bytes, ThreadPool& pool);

// Delayed solution detection: streams compatible opposite-direction closed
// buckets against the loaded table; every meeting state s yields the
// candidate loaded_g + g_opposite(s). The opposite root is probed directly
// (its g is exactly zero) so detection stays complete when the opposite side
// never expands, as in the unidirectional policies. Returns min(upper, ...).
int check_for_solution_delayed(const InMemoryBucket& bucket, int loaded_g,
                               const Frontier& opposite_closed,
                               const std::function<bool(const BucketKey&)>& compatible,
                               const PackedState& opposite_root, int upper,
                               const BucketStore& store, std::byte* scratch,
                               std::size_t scratch_bytes, ThreadPool& pool);

// Immediate solution detection for unidirectional policies: the opposite
// side's membership index is its single root state at g = 0.
inline int check_for_solution_immediate(const PackedState& s, int g, const PackedState& target,
                                        int upper) {
    return s == target && g < upper ? g : upper;
}

}  // namespace pembihs
