#include "pembihs/heuristics.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>
#include <fstream>

namespace pembihs {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Simple evaluators

ManhattanDistance::ManhattanDistance(const TilePuzzle& puzzle, const DomainState& target)
    : n_(puzzle.n()), cells_(puzzle.cells()) {
    if (!puzzle.is_legal(target)) throw InputError("manhattan: illegal target state");
    std::array<int, 25> target_cell{};
    for (int c = 0; c < cells_; ++c) target_cell[target.v[c]] = c;
    for (int t = 1; t < cells_; ++t) {
        const int tr = target_cell[t] / n_, tc = target_cell[t] % n_;
        for (int c = 0; c < cells_; ++c)
            dist_[t][c] = static_cast<std::uint8_t>(std::abs(c / n_ - tr) + std::abs(c % n_ - tc));
    }
}

int ManhattanDistance::value(const DomainState& s) const {
    int h = 0;
    for (int c = 0; c < cells_; ++c)
        if (s.v[c] != 0) h += dist_[s.v[c]][c];
    return h;
}

MisplacedDisks::MisplacedDisks(const HanoiPuzzle& puzzle, const DomainState& target)
    : disks_(puzzle.disks()), target_(target) {
    if (!puzzle.is_legal(target)) throw InputError("misplaced-disks: illegal target state");
}

int MisplacedDisks::value(const DomainState& s) const {
    int h = 0;
    for (int i = 0; i < disks_; ++i) h += s.v[i] != target_.v[i];
    return h;
}

// ---------------------------------------------------------------------------
// Pattern databases

std::uint64_t PatternSpec::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, domain.data(), domain.size());
    for (int e : elements) {
        const std::uint32_t v = static_cast<std::uint32_t>(e);
        h = fnv1a(h, &v, sizeof v);
    }
    const std::uint8_t blank = include_blank ? 1 : 0;
    h = fnv1a(h, &blank, 1);
    h = fnv1a(h, target.bytes.data(), target.bytes.size());
    return h;
}

namespace {

constexpr char kPdbMagic[4] = {'P', 'D', 'B', '1'};

bool try_load_cached(const std::filesystem::path& file, std::uint64_t want_hash,
                     std::uint64_t want_count, std::vector<std::uint8_t>& out) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return false;
    char magic[4];
    std::uint64_t h = 0, count = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || std::memcmp(magic, kPdbMagic, 4) != 0 || h != want_hash || count != want_count)
        return false;
    out.resize(count);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(count));
    return static_cast<bool>(in);
}

void store_cached(const std::filesystem::path& file, std::uint64_t hash,
                  const std::vector<std::uint8_t>& entries) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write pdb cache file " + file.string());
    const std::uint64_t count = entries.size();
    out.write(kPdbMagic, 4);
    out.write(reinterpret_cast<const char*>(&hash), sizeof hash);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(entries.data()), static_cast<std::streamsize>(count));
    if (!out) throw StorageError("short write on pdb cache file " + file.string());
}

std::filesystem::path cache_path(const PdbOptions& opts, const PatternSpec& spec) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(spec.hash()));
    std::string label = spec.domain;
    std::replace(label.begin(), label.end(), ':', '_');
    return opts.cache_dir / (label + "-" + buf + ".pdb");
}

// Tile pattern: ordered placement of the pattern tiles (plus the blank when
// tracked) into distinct cells. Blank moves cost 0 so component sums stay
// admissible; pattern-tile moves cost 1.
class TilePatternDb final : public PatternDb {
public:
    TilePatternDb(const TilePuzzle& puzzle, const PatternSpec& spec, const PdbOptions& opts)
        : n_(puzzle.n()), cells_(puzzle.cells()) {
        spec_ = spec;
        for (int t : spec.elements) {
            if (t <= 0 || t >= cells_) throw InputError("pattern tile out of range");
            tiles_.push_back(static_cast<std::uint8_t>(t));
        }
        track_ = static_cast<int>(tiles_.size()) + (spec.include_blank ? 1 : 0);
        if (track_ > 9) throw InputError("tile pattern too large (max 8 tiles + blank)");

        std::uint64_t count = 1;
        for (int i = 0; i < track_; ++i) count *= static_cast<std::uint64_t>(cells_ - i);
        if (count > opts.build_budget_bytes)
            throw CapacityError("pdb for " + spec.domain + " needs " + std::to_string(count) +
                                " bytes, budget is " + std::to_string(opts.build_budget_bytes));
        weights_.assign(track_, 1);
        for (int i = track_ - 2; i >= 0; --i)
            weights_[i] = weights_[i + 1] * static_cast<std::uint64_t>(cells_ - i - 1);

        for (int idx = 0; idx < cells_; ++idx) {
            const int r = idx / n_, c = idx % n_;
            int d = 0;
            auto& nb = neighbors_[idx];
            nb.fill(-1);
            if (r > 0) nb[d++] = static_cast<std::int8_t>(idx - n_);
            if (r < n_ - 1) nb[d++] = static_cast<std::int8_t>(idx + n_);
            if (c > 0) nb[d++] = static_cast<std::int8_t>(idx - 1);
            if (c < n_ - 1) nb[d++] = static_cast<std::int8_t>(idx + 1);
        }

        const std::uint64_t want = spec.hash();
        if (!opts.cache_dir.empty() && try_load_cached(cache_path(opts, spec), want, count, entries_))
            return;
        build(puzzle, count);
        if (!opts.cache_dir.empty()) store_cached(cache_path(opts, spec), want, entries_);
    }

    int lookup(const DomainState& s) const override {
        std::uint8_t pos[9];
        project(s, pos);
        const std::uint8_t v = entries_[rank(pos)];
        return v == kUnreachable ? kInfCost : v;
    }

private:
    void project(const DomainState& s, std::uint8_t* pos) const {
        for (int c = 0; c < cells_; ++c) {
            const std::uint8_t t = s.v[c];
            if (t == 0) {
                if (spec_.include_blank) pos[track_ - 1] = static_cast<std::uint8_t>(c);
                continue;
            }
            for (std::size_t i = 0; i < tiles_.size(); ++i)
                if (tiles_[i] == t) {
                    pos[i] = static_cast<std::uint8_t>(c);
                    break;
                }
        }
    }

    std::uint64_t rank(const std::uint8_t* pos) const {
        std::uint32_t used = 0;
        std::uint64_t r = 0;
        for (int i = 0; i < track_; ++i) {
            const std::uint32_t below = used & ((1u << pos[i]) - 1);
            r += weights_[i] * (pos[i] - std::popcount(below));
            used |= 1u << pos[i];
        }
        return r;
    }

    void unrank(std::uint64_t r, std::uint8_t* pos) const {
        std::uint8_t avail[25];
        for (int i = 0; i < cells_; ++i) avail[i] = static_cast<std::uint8_t>(i);
        int left = cells_;
        for (int i = 0; i < track_; ++i) {
            const std::uint64_t w = weights_[i];
            const int idx = static_cast<int>(r / w);
            r %= w;
            pos[i] = avail[idx];
            for (int j = idx; j + 1 < left; ++j) avail[j] = avail[j + 1];
            --left;
        }
    }

    void build(const TilePuzzle& puzzle, std::uint64_t count) {
        entries_.assign(count, kUnreachable);
        std::uint8_t pos[9];
        project(puzzle.unpack(spec_.target), pos);
        const std::uint64_t root = rank(pos);
        entries_[root] = 0;
        // 0-1 BFS: blank slides are free, pattern-tile slides cost one.
        std::deque<std::uint64_t> queue{root};
        const int k = static_cast<int>(tiles_.size());
        while (!queue.empty()) {
            const std::uint64_t cur = queue.front();
            queue.pop_front();
            unrank(cur, pos);
            const std::uint8_t d = entries_[cur];
            if (spec_.include_blank) {
                const int blank = pos[track_ - 1];
                for (int e = 0; e < 4; ++e) {
                    const int nb = neighbors_[blank][e];
                    if (nb < 0) break;
                    int moved = -1;
                    for (int i = 0; i < k; ++i)
                        if (pos[i] == nb) {
                            moved = i;
                            break;
                        }
                    std::uint8_t next[9];
                    std::memcpy(next, pos, sizeof next);
                    next[track_ - 1] = static_cast<std::uint8_t>(nb);
                    std::uint8_t cost = 0;
                    if (moved >= 0) {
                        next[moved] = static_cast<std::uint8_t>(blank);
                        cost = 1;
                    }
                    relax(rank(next), static_cast<std::uint8_t>(d + cost), queue, cost == 0);
                }
            } else {
                // No blank tracked: a pattern tile may slide into any adjacent
                // cell not occupied by another pattern tile.
                for (int i = 0; i < k; ++i) {
                    for (int e = 0; e < 4; ++e) {
                        const int nb = neighbors_[pos[i]][e];
                        if (nb < 0) break;
                        bool occupied = false;
                        for (int j = 0; j < k; ++j)
                            if (pos[j] == nb) {
                                occupied = true;
                                break;
                            }
                        if (occupied) continue;
                        std::uint8_t next[9];
                        std::memcpy(next, pos, sizeof next);
                        next[i] = static_cast<std::uint8_t>(nb);
                        relax(rank(next), static_cast<std::uint8_t>(d + 1), queue, false);
                    }
                }
            }
        }
    }

    void relax(std::uint64_t r, std::uint8_t nd, std::deque<std::uint64_t>& queue, bool zero) {
        if (nd < entries_[r]) {
            entries_[r] = nd;
            if (zero)
                queue.push_front(r);
            else
                queue.push_back(r);
        }
    }

    int n_, cells_, track_ = 0;
    std::vector<std::uint8_t> tiles_;
    std::vector<std::uint64_t> weights_;
    std::array<std::array<std::int8_t, 4>, 25> neighbors_{};
};

// Hanoi pattern: pegs of the pattern disks, base-4 rank. Non-pattern disks
// are removed from the abstract puzzle entirely.
class HanoiPatternDb final : public PatternDb {
public:
    HanoiPatternDb(const HanoiPuzzle& puzzle, const PatternSpec& spec, const PdbOptions& opts) {
        spec_ = spec;
        for (int d : spec.elements) {
            if (d < 0 || d >= puzzle.disks()) throw InputError("pattern disk out of range");
            disks_.push_back(static_cast<std::uint8_t>(d));
        }
        std::sort(disks_.begin(), disks_.end());
        const std::uint64_t count = 1ull << (2 * disks_.size());
        if (count > opts.build_budget_bytes)
            throw CapacityError("pdb for " + spec.domain + " needs " + std::to_string(count) +
                                " bytes, budget is " + std::to_string(opts.build_budget_bytes));

        const std::uint64_t want = spec.hash();
        if (!opts.cache_dir.empty() && try_load_cached(cache_path(opts, spec), want, count, entries_))
            return;
        build(puzzle, count);
        if (!opts.cache_dir.empty()) store_cached(cache_path(opts, spec), want, entries_);
    }

    int lookup(const DomainState& s) const override {
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < disks_.size(); ++i)
            r |= static_cast<std::uint64_t>(s.v[disks_[i]]) << (2 * i);
        const std::uint8_t v = entries_[r];
        return v == kUnreachable ? kInfCost : v;
    }

private:
    void build(const HanoiPuzzle& puzzle, std::uint64_t count) {
        entries_.assign(count, kUnreachable);
        const DomainState target = puzzle.unpack(spec_.target);
        std::uint64_t root = 0;
        for (std::size_t i = 0; i < disks_.size(); ++i)
            root |= static_cast<std::uint64_t>(target.v[disks_[i]]) << (2 * i);
        entries_[root] = 0;
        std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(root)}, next;
        const int k = static_cast<int>(disks_.size());
        std::uint8_t depth = 0;
        while (!frontier.empty()) {
            ++depth;
            next.clear();
            for (const std::uint32_t cur : frontier) {
                int top[4] = {-1, -1, -1, -1};
                for (int i = 0; i < k; ++i) top[(cur >> (2 * i)) & 3] = i;
                for (int p = 0; p < 4; ++p) {
                    if (top[p] < 0) continue;
                    for (int q = 0; q < 4; ++q) {
                        if (q == p || (top[q] >= 0 && top[q] > top[p])) continue;
                        const std::uint32_t succ =
                            (cur & ~(3u << (2 * top[p]))) | (static_cast<std::uint32_t>(q) << (2 * top[p]));
                        if (entries_[succ] == kUnreachable) {
                            entries_[succ] = depth;
                            next.push_back(succ);
                        }
                    }
                }
            }
            frontier.swap(next);
        }
    }

    std::vector<std::uint8_t> disks_;
};

}  // namespace

std::unique_ptr<PatternDb> build_pdb(const Domain& domain, const PatternSpec& spec,
                                     const PdbOptions& opts) {
    if (spec.domain != domain.name()) throw InputError("pattern spec built for a different domain");
    if (const auto* tp = dynamic_cast<const TilePuzzle*>(&domain))
        return std::make_unique<TilePatternDb>(*tp, spec, opts);
    if (const auto* hp = dynamic_cast<const HanoiPuzzle*>(&domain))
        return std::make_unique<HanoiPatternDb>(*hp, spec, opts);
    throw InputError("no pattern database support for domain " + domain.name());
}

AdditivePdb::AdditivePdb(const Domain& domain, std::vector<std::unique_ptr<PatternDb>> parts)
    : parts_(std::move(parts)) {
    // Cost-bearing elements must be disjoint and cover the domain.
    const bool tiles = dynamic_cast<const TilePuzzle*>(&domain) != nullptr;
    const int lo = tiles ? 1 : 0;  // the blank bears no cost
    const int hi = domain.state_size() - 1;
    std::vector<int> seen(static_cast<std::size_t>(hi) + 1, 0);
    for (const auto& part : parts_)
        for (int e : part->spec().elements) {
            if (e < lo || e > hi) throw InputError("pattern element out of range");
            if (seen[e]++) throw InputError("additive patterns overlap on element " + std::to_string(e));
        }
    for (int e = lo; e <= hi; ++e)
        if (!seen[e]) throw InputError("additive patterns do not cover element " + std::to_string(e));
}

int AdditivePdb::value(const DomainState& s) const {
    int h = 0;
    for (const auto& part : parts_) {
        const int v = part->lookup(s);
        if (v >= kInfCost) return kInfCost;
        h += v;
    }
    return h;
}

ReflectedMax::ReflectedMax(const TilePuzzle& puzzle, std::shared_ptr<const Evaluator> base,
                           const DomainState& target)
    : puzzle_(puzzle), base_(std::move(base)) {
    if (puzzle.reflect(target) != target)
        throw InputError("reflection lookup needs a target symmetric about the main diagonal");
}

int ReflectedMax::value(const DomainState& s) const {
    return std::max(base_->value(s), base_->value(puzzle_.reflect(s)));
}

std::vector<std::vector<int>> named_partition(const Domain& domain, const std::string& name) {
    if (const auto* tp = dynamic_cast<const TilePuzzle*>(&domain)) {
        if (tp->n() == 3 && name == "44") return {{1, 2, 3, 4}, {5, 6, 7, 8}};
        if (tp->n() == 3 && name == "full") return {{1, 2, 3, 4, 5, 6, 7, 8}};
        if (tp->n() == 4 && name == "3444")
            // One corner square each; the blank's corner carries three tiles.
            return {{1, 4, 5}, {2, 3, 6, 7}, {8, 9, 12, 13}, {10, 11, 14, 15}};
        if (tp->n() == 5 && name == "6666")
            return {{1, 2, 3, 4, 5, 6},
                    {7, 8, 9, 10, 11, 12},
                    {13, 14, 15, 16, 17, 18},
                    {19, 20, 21, 22, 23, 24}};
        throw InputError("unknown tile pdb name '" + name + "' for " + domain.name());
    }
    if (const auto* hp = dynamic_cast<const HanoiPuzzle*>(&domain)) {
        std::vector<std::vector<int>> groups;
        if (name == "full") {
            groups.emplace_back();
            for (int d = 0; d < hp->disks(); ++d) groups.back().push_back(d);
            return groups;
        }
        // "a+b+..." sizes, assigned from the largest disk down.
        int next = 0;
        std::size_t at = 0;
        while (at <= name.size()) {
            const auto plus = name.find('+', at);
            const std::string tok = name.substr(at, plus == std::string::npos ? plus : plus - at);
            int size = 0;
            try {
                size = std::stoi(tok);
            } catch (...) {
                throw InputError("bad hanoi pdb split '" + name + "'");
            }
            if (size <= 0) throw InputError("bad hanoi pdb split '" + name + "'");
            groups.emplace_back();
            for (int i = 0; i < size; ++i) groups.back().push_back(next++);
            if (plus == std::string::npos) break;
            at = plus + 1;
        }
        if (next != hp->disks())
            throw InputError("hanoi pdb split '" + name + "' does not sum to " +
                             std::to_string(hp->disks()) + " disks");
        return groups;
    }
    throw InputError("no named partitions for domain " + domain.name());
}

std::shared_ptr<const Evaluator> make_evaluator(const Domain& domain, const std::string& spec,
                                                const DomainState& target, const PdbOptions& opts) {
    if (!domain.is_legal(target)) throw InputError("heuristic target state is illegal");
    if (spec == "md") {
        if (const auto* tp = dynamic_cast<const TilePuzzle*>(&domain))
            return std::make_shared<ManhattanDistance>(*tp, target);
        if (const auto* hp = dynamic_cast<const HanoiPuzzle*>(&domain))
            return std::make_shared<MisplacedDisks>(*hp, target);
        throw InputError("no md heuristic for domain " + domain.name());
    }
    if (spec.rfind("pdb:", 0) == 0) {
        std::string name = spec.substr(4);
        bool reflected = false;
        if (name.size() > 2 && name.substr(name.size() - 2) == "+r") {
            reflected = true;
            name = name.substr(0, name.size() - 2);
        }
        std::vector<std::unique_ptr<PatternDb>> parts;
        const bool tiles = dynamic_cast<const TilePuzzle*>(&domain) != nullptr;
        for (const auto& group : named_partition(domain, name)) {
            PatternSpec ps;
            ps.domain = domain.name();
            ps.elements = group;
            ps.include_blank = tiles;
            ps.target = domain.pack(target);
            parts.push_back(build_pdb(domain, ps, opts));
        }
        std::shared_ptr<const Evaluator> h =
            std::make_shared<AdditivePdb>(domain, std::move(parts));
        if (reflected) {
            const auto* tp = dynamic_cast<const TilePuzzle*>(&domain);
            if (!tp) throw InputError("reflection is only defined for square tile puzzles");
            h = std::make_shared<ReflectedMax>(*tp, std::move(h), target);
        }
        return h;
    }
    throw InputError("unknown heuristic spec: " + spec);
}

}  // namespace pembihs
