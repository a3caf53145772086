#include "pembihs/bucket_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "pembihs/domain.hpp"

namespace pembihs {

namespace {

struct Fd {
    int fd = -1;
    ~Fd() {
        if (fd >= 0) ::close(fd);
    }
};

void write_all(int fd, const std::byte* data, std::size_t bytes, const std::string& what) {
    std::size_t done = 0;
    while (done < bytes) {
        const ssize_t n = ::write(fd, data + done, bytes - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StorageError("write failed on " + what + ": " + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Frontier

bool Frontier::empty() const {
    std::lock_guard lock(lock_);
    return records_.empty();
}

std::size_t Frontier::bucket_count() const {
    std::lock_guard lock(lock_);
    return records_.size();
}

std::uint64_t Frontier::total_nodes() const {
    std::lock_guard lock(lock_);
    std::uint64_t total = 0;
    for (const auto& [key, rec] : records_) total += rec->node_count;
    return total;
}

BucketRecord* Frontier::find(const BucketKey& key) const {
    std::lock_guard lock(lock_);
    const auto it = records_.find(key);
    return it == records_.end() ? nullptr : it->second.get();
}

BucketRecord& Frontier::get_or_create(const BucketKey& key, BucketStore& store) {
    std::lock_guard lock(lock_);
    auto it = records_.find(key);
    if (it == records_.end()) {
        const BucketId id{dir_, key};
        it = records_
                 .emplace(key, std::make_unique<BucketRecord>(id, store.path_for(id, status_), status_))
                 .first;
    }
    return *it->second;
}

std::unique_ptr<BucketRecord> Frontier::extract(const BucketKey& key) {
    std::lock_guard lock(lock_);
    auto it = records_.find(key);
    if (it == records_.end()) return nullptr;
    auto rec = std::move(it->second);
    records_.erase(it);
    return rec;
}

void Frontier::insert(std::unique_ptr<BucketRecord> record) {
    std::lock_guard lock(lock_);
    const BucketKey key = record->id.key;
    records_.emplace(key, std::move(record));
}

void Frontier::for_each(const std::function<void(const BucketRecord&)>& fn) const {
    std::lock_guard lock(lock_);
    for (const auto& [key, rec] : records_) fn(*rec);
}

// ---------------------------------------------------------------------------
// BucketStore

BucketStore::BucketStore(std::filesystem::path root, std::vector<std::string> component_names)
    : root_(std::move(root)), names_(std::move(component_names)) {
    std::error_code ec;
    for (const char* dir : {"F", "B"})
        for (const char* status : {"open", "closed"}) {
            std::filesystem::create_directories(root_ / dir / status, ec);
            if (ec)
                throw StorageError("cannot create bucket directory " +
                                   (root_ / dir / status).string() + ": " + ec.message());
        }
}

std::string BucketStore::bucket_name(const BucketId& id) const {
    std::string name;
    for (int i = 0; i < id.key.n; ++i) {
        if (i) name += '_';
        name += i < static_cast<int>(names_.size()) ? names_[i] : "c";
        name += std::to_string(id.key.c[i]);
    }
    return name;
}

std::filesystem::path BucketStore::path_for(const BucketId& id, BucketStatus status) const {
    return root_ / to_string(id.dir) / to_string(status) / (bucket_name(id) + ".bkt");
}

void BucketStore::add_bytes(std::int64_t delta) {
    const std::uint64_t now = bytes_.fetch_add(static_cast<std::uint64_t>(delta)) +
                              static_cast<std::uint64_t>(delta);
    std::uint64_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
}

void BucketStore::append(BucketRecord& rec, const std::byte* data, std::size_t bytes, int width) {
    if (bytes == 0) return;
    std::lock_guard lock(rec.write_lock);
    Fd fd{::open(rec.file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644)};
    if (fd.fd < 0)
        throw StorageError("cannot open bucket " + bucket_name(rec.id) + " at " +
                           rec.file.string() + ": " + std::strerror(errno));
    write_all(fd.fd, data, bytes, "bucket " + bucket_name(rec.id));
    rec.node_count += bytes / static_cast<std::size_t>(width);
    add_bytes(static_cast<std::int64_t>(bytes));
}

void BucketStore::read_range(const BucketRecord& rec, std::uint64_t offset, std::byte* buf,
                             std::size_t bytes) const {
    Fd fd{::open(rec.file.c_str(), O_RDONLY)};
    if (fd.fd < 0)
        throw StorageError("cannot read bucket " + bucket_name(rec.id) + " at " +
                           rec.file.string() + ": " + std::strerror(errno));
    std::size_t done = 0;
    while (done < bytes) {
        const ssize_t n = ::pread(fd.fd, buf + done, bytes - done,
                                  static_cast<off_t>(offset + done));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StorageError("read failed on " + rec.file.string() + ": " + std::strerror(errno));
        }
        if (n == 0)
            throw CorruptionError("short read in bucket file " + rec.file.string() + " at offset " +
                                  std::to_string(offset + done));
        done += static_cast<std::size_t>(n);
    }
}

std::uint64_t BucketStore::file_size(const BucketRecord& rec) const {
    std::error_code ec;
    const auto size = std::filesystem::file_size(rec.file, ec);
    if (ec) {
        if (rec.node_count == 0) return 0;  // never flushed
        throw StorageError("cannot stat bucket file " + rec.file.string() + ": " + ec.message());
    }
    return size;
}

void BucketStore::remove_file(BucketRecord& rec) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(rec.file, ec);
    if (!ec && std::filesystem::remove(rec.file, ec) && !ec)
        add_bytes(-static_cast<std::int64_t>(size));
}

void BucketStore::merge_into(BucketRecord& dst, const std::byte* extra, std::size_t extra_bytes,
                             int width) {
    std::lock_guard lock(dst.write_lock);
    const auto tmp = dst.file.string() + ".merge";
    Fd out{::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644)};
    if (out.fd < 0)
        throw StorageError("cannot create merge file " + tmp + ": " + std::strerror(errno));

    std::uint64_t old_size = 0;
    {
        Fd in{::open(dst.file.c_str(), O_RDONLY)};
        if (in.fd >= 0) {
            std::vector<std::byte> buf(1 << 20);
            while (true) {
                const ssize_t n = ::read(in.fd, buf.data(), buf.size());
                if (n < 0) {
                    if (errno == EINTR) continue;
                    throw StorageError("read failed on " + dst.file.string() + ": " +
                                       std::strerror(errno));
                }
                if (n == 0) break;
                write_all(out.fd, buf.data(), static_cast<std::size_t>(n), tmp);
                old_size += static_cast<std::uint64_t>(n);
            }
        }
    }
    write_all(out.fd, extra, extra_bytes, tmp);

    std::error_code ec;
    std::filesystem::rename(tmp, dst.file, ec);
    if (ec) throw StorageError("cannot swap merged bucket into " + dst.file.string());
    dst.node_count += extra_bytes / static_cast<std::size_t>(width);
    add_bytes(static_cast<std::int64_t>(extra_bytes));
    (void)old_size;
}

// ---------------------------------------------------------------------------
// SuccessorCache

SuccessorCache::SuccessorCache(int width, std::size_t capacity_records, bool dedup_in_cache,
                               MemoryBudget& budget)
    : width_(width), capacity_(capacity_records), dedup_(dedup_in_cache), budget_(budget) {}

SuccessorCache::~SuccessorCache() { budget_.release(reserved_); }

void SuccessorCache::add(const BucketKey& key, const std::byte* rec, Frontier& open,
                         BucketStore& store) {
    auto it = arrays_.find(key);
    if (it == arrays_.end()) {
        const std::uint64_t bytes = capacity_ * static_cast<std::uint64_t>(width_) +
                                    (dedup_ ? capacity_ * sizeof(std::uint64_t) : 0);
        budget_.reserve(bytes, "successor cache array");
        reserved_ += bytes;
        it = arrays_.emplace(key, Array{}).first;
        it->second.data.reserve(capacity_ * static_cast<std::size_t>(width_));
        if (dedup_) it->second.hashes.reserve(capacity_);
    }
    Array& array = it->second;
    if (dedup_) {
        PackedState p;
        std::memcpy(p.bytes.data(), rec, static_cast<std::size_t>(width_));
        const std::uint64_t h = hash_packed(p);
        for (std::size_t i = 0; i < array.hashes.size(); ++i)
            if (array.hashes[i] == h &&
                std::memcmp(array.data.data() + i * width_, rec,
                            static_cast<std::size_t>(width_)) == 0)
                return;
        array.hashes.push_back(h);
    }
    array.data.insert(array.data.end(), rec, rec + width_);
    if (array.data.size() >= capacity_ * static_cast<std::size_t>(width_))
        flush(key, array, open, store);
}

void SuccessorCache::flush(const BucketKey& key, Array& array, Frontier& open,
                           BucketStore& store) {
    if (array.data.empty()) return;
    BucketRecord& target = open.get_or_create(key, store);
    store.append(target, array.data.data(), array.data.size(), width_);
    array.data.clear();
    array.hashes.clear();
}

void SuccessorCache::flush_all(Frontier& open, BucketStore& store) {
    for (auto& [key, array] : arrays_) flush(key, array, open, store);
}

void BucketStore::write_manifest(const std::vector<const Frontier*>& frontiers) const {
    std::ofstream out(root_ / "manifest.tsv", std::ios::trunc);
    if (!out) throw StorageError("cannot write manifest under " + root_.string());
    out << "direction\tstatus\tbucket\tnodes\n";
    for (const Frontier* f : frontiers)
        f->for_each([&](const BucketRecord& rec) {
            out << to_string(rec.id.dir) << '\t' << to_string(rec.status) << '\t'
                << bucket_name(rec.id) << '\t' << rec.node_count << '\n';
        });
}

}  // namespace pembihs
