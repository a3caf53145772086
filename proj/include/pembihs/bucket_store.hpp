#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pembihs/common.hpp"

namespace pembihs {

enum class BucketStatus : std::uint8_t { Open, Closed };

inline constexpr const char* to_string(BucketStatus s) {
    return s == BucketStatus::Open ? "open" : "closed";
}

// Bucket identifier key: up to three small components. Component 0 is always
// the g-value; the rest depend on the algorithm's bucket scheme.
struct BucketKey {
    std::array<std::uint16_t, 3> c{};
    std::uint8_t n = 0;

    int g() const { return c[0]; }
    friend bool operator==(const BucketKey&, const BucketKey&) = default;
    friend auto operator<=>(const BucketKey&, const BucketKey&) = default;
};

struct BucketId {
    Direction dir = Direction::Forward;
    BucketKey key;
};

struct BucketRecord {
    BucketId id;
    std::filesystem::path file;
    std::uint64_t node_count = 0;
    BucketStatus status = BucketStatus::Open;
    std::mutex write_lock;

    BucketRecord(const BucketId& bucket_id, std::filesystem::path path, BucketStatus st)
        : id(bucket_id), file(std::move(path)), status(st) {}
};

// Tracks the engine's RAM budget (loaded bucket plus successor caches plus
// streaming buffers). Reservations fail before any allocation happens.
class MemoryBudget {
public:
    explicit MemoryBudget(std::uint64_t limit) : limit_(limit) {}

    void reserve(std::uint64_t bytes, const char* what) {
        const std::uint64_t now = used_.fetch_add(bytes) + bytes;
        if (now > limit_) {
            used_.fetch_sub(bytes);
            throw CapacityError(std::string(what) + " needs " + std::to_string(bytes) +
                                " bytes but only " + std::to_string(limit_ - (now - bytes)) +
                                " of " + std::to_string(limit_) + " remain in the memory budget");
        }
    }
    void release(std::uint64_t bytes) { used_.fetch_sub(bytes); }
    std::uint64_t used() const { return used_.load(); }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t limit_;
    std::atomic<std::uint64_t> used_{0};
};

class BucketStore;

// One direction's open or closed list: bucket records keyed by identifier.
// The map lock is held briefly at creation/removal; record contents are
// protected by their own write locks.
class Frontier {
public:
    Frontier(Direction dir, BucketStatus status) : dir_(dir), status_(status) {}

    Direction direction() const { return dir_; }
    BucketStatus status() const { return status_; }

    bool empty() const;
    std::size_t bucket_count() const;
    std::uint64_t total_nodes() const;

    BucketRecord* find(const BucketKey& key) const;
    // Creates the record (and registers its file path) when absent.
    BucketRecord& get_or_create(const BucketKey& key, BucketStore& store);
    std::unique_ptr<BucketRecord> extract(const BucketKey& key);
    void insert(std::unique_ptr<BucketRecord> record);

    void for_each(const std::function<void(const BucketRecord&)>& fn) const;

private:
    Direction dir_;
    BucketStatus status_;
    mutable std::mutex lock_;
    std::map<BucketKey, std::unique_ptr<BucketRecord>> records_;
};

// On-disk bucket layout: <root>/<F|B>/<open|closed>/<components>.bkt, flat
// little-endian fixed-width records, no headers.
class BucketStore {
public:
    BucketStore(std::filesystem::path root, std::vector<std::string> component_names);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path path_for(const BucketId& id, BucketStatus status) const;
    std::string bucket_name(const BucketId& id) const;

    // Appends under the record's write lock and keeps node_count in sync.
    void append(BucketRecord& rec, const std::byte* data, std::size_t bytes, int width);

    // pread into buf; short reads raise CorruptionError naming the file.
    void read_range(const BucketRecord& rec, std::uint64_t offset, std::byte* buf,
                    std::size_t bytes) const;

    std::uint64_t file_size(const BucketRecord& rec) const;
    void remove_file(BucketRecord& rec);

    // Replaces dst's file with old-contents + extra, atomically (fresh file,
    // then rename). Used by the reopening merge; closed buckets are never
    // rewritten in place.
    void merge_into(BucketRecord& dst, const std::byte* extra, std::size_t extra_bytes, int width);

    std::uint64_t current_bytes() const { return bytes_.load(); }
    std::uint64_t peak_bytes() const { return peak_.load(); }

    // One line per bucket: direction, status, identifier, node count.
    void write_manifest(const std::vector<const Frontier*>& frontiers) const;

private:
    void add_bytes(std::int64_t delta);

    std::filesystem::path root_;
    std::vector<std::string> names_;
    std::atomic<std::uint64_t> bytes_{0};
    std::atomic<std::uint64_t> peak_{0};
};

// Per-worker successor cache: one fixed-capacity array per target bucket.
// A full array is flushed to disk under the target's write lock, creating
// the bucket record in the open frontier when absent.
class SuccessorCache {
public:
    SuccessorCache(int width, std::size_t capacity_records, bool dedup_in_cache,
                   MemoryBudget& budget);
    ~SuccessorCache();

    SuccessorCache(const SuccessorCache&) = delete;
    SuccessorCache& operator=(const SuccessorCache&) = delete;

    void add(const BucketKey& key, const std::byte* rec, Frontier& open, BucketStore& store);
    void flush_all(Frontier& open, BucketStore& store);

private:
    struct Array {
        std::vector<std::byte> data;
        std::vector<std::uint64_t> hashes;  // in-cache dedup, when enabled
    };

    void flush(const BucketKey& key, Array& array, Frontier& open, BucketStore& store);

    int width_;
    std::size_t capacity_;
    bool dedup_;
    MemoryBudget& budget_;
    std::uint64_t reserved_ = 0;
    std::map<BucketKey, Array> arrays_;
};

}  // namespace pembihs
