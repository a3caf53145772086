#include "pembihs/dedup.hpp"

#include <bit>
#include <cstring>

namespace pembihs {

namespace {

std::uint64_t hash_record(const std::byte* rec, int width) {
    PackedState p;
    std::memcpy(p.bytes.data(), rec, static_cast<std::size_t>(width));
    return hash_packed(p);
}

}  // namespace

InMemoryBucket::InMemoryBucket(int width, std::uint64_t expected_records, MemoryBudget& budget)
    : width_(width), budget_(budget) {
    // Capacity comfortably above the record count: the table never needs to
    // evict, and probe chains stay short.
    std::uint64_t want = expected_records + expected_records / 2 + 1;
    capacity_ = std::bit_ceil(std::max<std::uint64_t>(want, 2 * kGroup));
    reserved_ = capacity_ * (static_cast<std::uint64_t>(width_) + 1);
    budget_.reserve(reserved_, "loaded bucket table");
    data_.resize(capacity_ * static_cast<std::size_t>(width_));
    flags_ = std::make_unique<std::atomic<std::uint8_t>[]>(capacity_);
    for (std::size_t i = 0; i < capacity_; ++i)
        flags_[i].store(kEmpty, std::memory_order_relaxed);
    group_locks_ = std::vector<std::mutex>(capacity_ / kGroup);
}

InMemoryBucket::~InMemoryBucket() { budget_.release(reserved_); }

InMemoryBucket::InsertResult InMemoryBucket::insert(const std::byte* rec) {
    const std::size_t mask = capacity_ - 1;
    const std::size_t ngroups = group_locks_.size();
    std::size_t idx = hash_record(rec, width_) & mask;
    std::size_t group = idx / kGroup;
    // Probing advances group by group so each step holds exactly one lock.
    // A probe only leaves a group once every slot in it is taken by other
    // states, so two inserters of the same state always meet in one group.
    for (std::size_t visited = 0; visited <= ngroups; ++visited) {
        std::lock_guard lock(group_locks_[group]);
        const std::size_t group_end = (group + 1) * kGroup;
        for (std::size_t i = idx; i < group_end; ++i) {
            const std::uint8_t flag = flags_[i].load(std::memory_order_relaxed);
            if (flag == kEmpty) {
                std::memcpy(data_.data() + i * width_, rec, static_cast<std::size_t>(width_));
                flags_[i].store(kOccupied, std::memory_order_relaxed);
                live_.fetch_add(1, std::memory_order_relaxed);
                return InsertResult::Inserted;
            }
            if (std::memcmp(data_.data() + i * width_, rec, static_cast<std::size_t>(width_)) == 0)
                return InsertResult::Duplicate;
        }
        group = (group + 1) % ngroups;
        idx = group * kGroup;
    }
    throw CapacityError("in-memory bucket table overflow");
}

std::size_t InMemoryBucket::probe(const std::byte* rec) const {
    const std::size_t mask = capacity_ - 1;
    const std::size_t ngroups = group_locks_.size();
    std::size_t i = hash_record(rec, width_) & mask;
    std::size_t group = i / kGroup;
    for (std::size_t visited = 0; visited <= ngroups; ++visited) {
        const std::size_t group_end = (group + 1) * kGroup;
        for (; i < group_end; ++i) {
            const std::uint8_t flag = flags_[i].load(std::memory_order_relaxed);
            if (flag == kEmpty) return capacity_;  // not present
            if (std::memcmp(data_.data() + i * width_, rec, static_cast<std::size_t>(width_)) == 0)
                return i;
        }
        group = (group + 1) % ngroups;
        i = group * kGroup;
    }
    return capacity_;
}

bool InMemoryBucket::try_remove(const std::byte* rec) {
    const std::size_t i = probe(rec);
    if (i == capacity_) return false;
    std::uint8_t expected = kOccupied;
    if (flags_[i].compare_exchange_strong(expected, kRemoved, std::memory_order_relaxed)) {
        live_.fetch_sub(1, std::memory_order_relaxed);
        return true;
    }
    return false;
}

bool InMemoryBucket::contains_live(const std::byte* rec) const {
    const std::size_t i = probe(rec);
    return i != capacity_ && flags_[i].load(std::memory_order_relaxed) == kOccupied;
}

namespace {

// Shared segment walk over one bucket file: fn(record) per record.
template <class Fn>
void scan_bucket_file(const BucketRecord& rec, const BucketStore& store, int width,
                      std::byte* scratch, std::size_t scratch_bytes, ThreadPool& pool, Fn&& fn) {
    const std::uint64_t size = store.file_size(rec);
    if (size == 0) return;
    if (size % static_cast<std::uint64_t>(width) != 0)
        throw CorruptionError("bucket file " + rec.file.string() + " is not a whole number of records");
    const std::uint64_t seg_records = std::max<std::uint64_t>(1, scratch_bytes / static_cast<std::size_t>(width));
    const std::uint64_t total = size / static_cast<std::uint64_t>(width);
    for (std::uint64_t at = 0; at < total; at += seg_records) {
        const std::uint64_t n = std::min(seg_records, total - at);
        store.read_range(rec, at * static_cast<std::uint64_t>(width), scratch,
                         static_cast<std::size_t>(n) * static_cast<std::size_t>(width));
        pool.parallel_for(static_cast<std::size_t>(n), [&](int, std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) fn(scratch + i * static_cast<std::size_t>(width));
        });
    }
}

}  // namespace

std::uint64_t remove_duplicates_vs_closed(InMemoryBucket& bucket, const Frontier& closed,
                                          const std::function<bool(const BucketKey&)>& compatible,
                                          const BucketStore& store, std::byte* scratch,
                                          std::size_t scratch_bytes, ThreadPool& pool) {
    std::atomic<std::uint64_t> removed{0};
    closed.for_each([&](const BucketRecord& rec) {
        if (bucket.live_count() == 0 || !compatible(rec.id.key)) return;
        scan_bucket_file(rec, store, bucket.width(), scratch, scratch_bytes, pool,
                         [&](const std::byte* r) {
                             if (bucket.try_remove(r)) removed.fetch_add(1, std::memory_order_relaxed);
                         });
    });
    return removed.load();
}

int check_for_solution_delayed(const InMemoryBucket& bucket, int loaded_g,
                               const Frontier& opposite_closed,
                               const std::function<bool(const BucketKey&)>& compatible,
                               const PackedState& opposite_root, int upper,
                               const BucketStore& store, std::byte* scratch,
                               std::size_t scratch_bytes, ThreadPool& pool) {
    std::atomic<int> best{upper};
    if (bucket.contains_live(opposite_root.bytes.data())) best.store(std::min(upper, loaded_g));
    opposite_closed.for_each([&](const BucketRecord& rec) {
        const int candidate_base = loaded_g + rec.id.key.g();
        if (candidate_base >= best.load(std::memory_order_relaxed)) return;  // cannot improve
        if (!compatible(rec.id.key)) return;
        scan_bucket_file(rec, store, bucket.width(), scratch, scratch_bytes, pool,
                         [&](const std::byte* r) {
                             if (!bucket.contains_live(r)) return;
                             int cur = best.load(std::memory_order_relaxed);
                             while (candidate_base < cur &&
                                    !best.compare_exchange_weak(cur, candidate_base)) {
                             }
                         });
    });
    return best.load();
}

}  // namespace pembihs
