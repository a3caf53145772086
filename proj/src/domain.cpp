#include "pembihs/domain.hpp"

#include <bit>
#include <cstring>

namespace pembihs {

namespace {

using u128 = unsigned __int128;

// fact[k] = k! ; 24! < 2^80 so u128 covers every rank we form.
const std::array<u128, 25>& factorials() {
    static const std::array<u128, 25> table = [] {
        std::array<u128, 25> f{};
        f[0] = 1;
        for (int i = 1; i < 25; ++i) f[i] = f[i - 1] * static_cast<unsigned>(i);
        return f;
    }();
    return table;
}

u128 read_le(const std::byte* in, int width) {
    u128 x = 0;
    for (int i = width - 1; i >= 0; --i) x = (x << 8) | static_cast<unsigned char>(in[i]);
    return x;
}

void write_le(u128 x, std::byte* out, int width) {
    for (int i = 0; i < width; ++i) {
        out[i] = static_cast<std::byte>(static_cast<unsigned char>(x & 0xff));
        x >>= 8;
    }
}

u128 lehmer_rank(const std::uint8_t* perm, int m) {
    const auto& fact = factorials();
    std::uint32_t seen = 0;
    u128 rank = 0;
    for (int i = 0; i < m; ++i) {
        const std::uint32_t below = seen & ((1u << perm[i]) - 1);
        const unsigned idx = perm[i] - std::popcount(below);
        rank += fact[m - 1 - i] * idx;
        seen |= 1u << perm[i];
    }
    return rank;
}

void lehmer_unrank(u128 rank, std::uint8_t* perm, int m) {
    const auto& fact = factorials();
    std::uint8_t avail[25];
    for (int i = 0; i < m; ++i) avail[i] = static_cast<std::uint8_t>(i);
    int left = m;
    for (int i = 0; i < m; ++i) {
        const u128 f = fact[m - 1 - i];
        const int idx = static_cast<int>(rank / f);
        rank %= f;
        perm[i] = avail[idx];
        for (int j = idx; j + 1 < left; ++j) avail[j] = avail[j + 1];
        --left;
    }
}

}  // namespace

std::uint64_t hash_packed(const PackedState& p) {
    // 128-bit load + mix; packed tails are zero so hashing the whole array is fine.
    std::uint64_t a, b;
    std::memcpy(&a, p.bytes.data(), 8);
    std::memcpy(&b, p.bytes.data() + 8, 8);
    std::uint64_t x = a ^ (b * 0x9e3779b97f4a7c15ull);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::uint64_t packed_to_u64(const PackedState& p) {
    std::uint64_t a;
    std::memcpy(&a, p.bytes.data(), 8);
    return a;
}

PackedState Domain::pack(const DomainState& s) const {
    PackedState p;
    encode(s, p.bytes.data());
    return p;
}

DomainState Domain::unpack(const PackedState& p) const {
    return decode(p.bytes.data());
}

// ---------------------------------------------------------------------------
// TilePuzzle

TilePuzzle::TilePuzzle(int n) : n_(n), cells_(n * n) {
    if (n < 3 || n > 5) throw InputError("tile puzzle size must be 3, 4, or 5");
    width_ = n == 3 ? 4 : n == 4 ? 8 : 11;
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
}

std::string TilePuzzle::name() const { return "stp" + std::to_string(n_); }

DomainProperties TilePuzzle::properties() const {
    return {true, true, width_};
}

bool TilePuzzle::is_legal(const DomainState& s) const {
    std::uint32_t seen = 0;
    for (int i = 0; i < cells_; ++i) {
        if (s.v[i] >= cells_) return false;
        seen |= 1u << s.v[i];
    }
    for (int i = cells_; i < 32; ++i)
        if (s.v[i] != 0) return false;
    return seen == (cells_ == 25 ? 0x1ffffffu : (1u << cells_) - 1);
}

void TilePuzzle::encode(const DomainState& s, std::byte* out) const {
    if (!is_legal(s)) throw InputError("illegal tile state (not a permutation)");
    write_le(lehmer_rank(s.v.data(), cells_), out, width_);
}

DomainState TilePuzzle::decode(const std::byte* in) const {
    const u128 rank = read_le(in, width_);
    if (rank >= factorials()[cells_])
        throw CorruptionError("tile record out of range for " + name());
    DomainState s;
    lehmer_unrank(rank, s.v.data(), cells_);
    return s;
}

int TilePuzzle::successors(const DomainState& s, DomainState* out) const {
    int blank = 0;
    while (s.v[blank] != 0) ++blank;
    int cnt = 0;
    for (int k = 0; k < 4; ++k) {
        const int nb = neighbors_[blank][k];
        if (nb < 0) break;
        out[cnt] = s;
        std::swap(out[cnt].v[blank], out[cnt].v[nb]);
        ++cnt;
    }
    return cnt;
}

DomainState TilePuzzle::canonical_goal() const {
    DomainState s;
    for (int i = 0; i < cells_; ++i) s.v[i] = static_cast<std::uint8_t>(i);
    return s;
}

bool TilePuzzle::mutually_reachable(const DomainState& a, const DomainState& b) const {
    // Parity of the permutation mapping a onto b, versus the blank's taxicab
    // displacement: each move is one transposition and one blank step.
    std::array<int, 25> pos_b{};
    int blank_a = 0, blank_b = 0;
    for (int i = 0; i < cells_; ++i) {
        pos_b[b.v[i]] = i;
        if (a.v[i] == 0) blank_a = i;
        if (b.v[i] == 0) blank_b = i;
    }
    std::array<int, 25> perm{};
    for (int i = 0; i < cells_; ++i) perm[i] = pos_b[a.v[i]];
    std::array<bool, 25> visited{};
    int transpositions = 0;
    for (int i = 0; i < cells_; ++i) {
        if (visited[i]) continue;
        int len = 0;
        for (int j = i; !visited[j]; j = perm[j]) {
            visited[j] = true;
            ++len;
        }
        transpositions += len - 1;
    }
    const int blank_dist = std::abs(blank_a / n_ - blank_b / n_) + std::abs(blank_a % n_ - blank_b % n_);
    return (transpositions & 1) == (blank_dist & 1);
}

DomainState TilePuzzle::reflect(const DomainState& s) const {
    DomainState r;
    for (int i = 0; i < cells_; ++i) {
        const int cell_t = (i % n_) * n_ + i / n_;
        const int tile = s.v[i];
        const int tile_t = tile == 0 ? 0 : (tile % n_) * n_ + tile / n_;
        r.v[cell_t] = static_cast<std::uint8_t>(tile_t);
    }
    return r;
}

// ---------------------------------------------------------------------------
// HanoiPuzzle

HanoiPuzzle::HanoiPuzzle(int disks) : disks_(disks) {
    if (disks < 1 || disks > 28) throw InputError("hanoi disk count must be in [1, 28]");
    width_ = (2 * disks_ + 7) / 8;
}

std::string HanoiPuzzle::name() const { return "toh4:" + std::to_string(disks_); }

DomainProperties HanoiPuzzle::properties() const {
    return {true, true, width_};
}

bool HanoiPuzzle::is_legal(const DomainState& s) const {
    for (int i = 0; i < disks_; ++i)
        if (s.v[i] > 3) return false;
    for (int i = disks_; i < 32; ++i)
        if (s.v[i] != 0) return false;
    return true;
}

void HanoiPuzzle::encode(const DomainState& s, std::byte* out) const {
    if (!is_legal(s)) throw InputError("illegal hanoi state (disk on invalid peg)");
    std::memset(out, 0, static_cast<std::size_t>(width_));
    for (int i = 0; i < disks_; ++i)
        out[i >> 2] |= static_cast<std::byte>(s.v[i] << ((i & 3) * 2));
}

DomainState HanoiPuzzle::decode(const std::byte* in) const {
    DomainState s;
    for (int i = 0; i < disks_; ++i)
        s.v[i] = (static_cast<std::uint8_t>(in[i >> 2]) >> ((i & 3) * 2)) & 3;
    // Padding bits past the last disk must be zero.
    if (disks_ % 4 != 0) {
        const auto tail = static_cast<std::uint8_t>(in[width_ - 1]);
        if (tail >> ((disks_ % 4) * 2) != 0)
            throw CorruptionError("hanoi record has nonzero padding bits");
    }
    return s;
}

int HanoiPuzzle::successors(const DomainState& s, DomainState* out) const {
    // top[p]: smallest disk (largest index) currently on peg p, or -1.
    std::array<int, 4> top = {-1, -1, -1, -1};
    for (int i = 0; i < disks_; ++i) top[s.v[i]] = i;
    int cnt = 0;
    for (int p = 0; p < 4; ++p) {
        if (top[p] < 0) continue;
        for (int q = 0; q < 4; ++q) {
            if (q == p) continue;
            if (top[q] < 0 || top[q] < top[p]) {
                out[cnt] = s;
                out[cnt].v[top[p]] = static_cast<std::uint8_t>(q);
                ++cnt;
            }
        }
    }
    return cnt;
}

DomainState HanoiPuzzle::all_on_peg(int peg) const {
    DomainState s;
    for (int i = 0; i < disks_; ++i) s.v[i] = static_cast<std::uint8_t>(peg);
    return s;
}

std::unique_ptr<Domain> make_domain(const std::string& spec) {
    if (spec == "stp3") return std::make_unique<TilePuzzle>(3);
    if (spec == "stp4") return std::make_unique<TilePuzzle>(4);
    if (spec == "stp5") return std::make_unique<TilePuzzle>(5);
    if (spec.rfind("toh4:", 0) == 0) {
        const int disks = std::stoi(spec.substr(5));
        return std::make_unique<HanoiPuzzle>(disks);
    }
    throw InputError("unknown domain spec: " + spec);
}

}  // namespace pembihs
