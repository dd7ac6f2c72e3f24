#include "snlv/bp_tree.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace snlv {

namespace {
constexpr std::uint64_t kSuper = 8192;  // rank superblock bits
constexpr std::uint64_t kBlock = 512;   // rank block bits
constexpr std::uint64_t kLeaf = 4096;   // excess tree leaf bits
constexpr std::int64_t kInf = std::numeric_limits<std::int32_t>::max();
}  // namespace

BpTree::BpTree(const BitSource& src) : src_(&src) { build(); }

BpTree::Agg BpTree::combine(const Agg& l, const Agg& r) {
    if (l.cnt == 0) return r;
    if (r.cnt == 0) return l;
    Agg out;
    out.tot = l.tot + r.tot;
    std::int64_t rmin = l.tot + r.minp;
    if (l.minp < rmin) {
        out.minp = l.minp;
        out.cnt = l.cnt;
    } else if (l.minp > rmin) {
        out.minp = rmin;
        out.cnt = r.cnt;
    } else {
        out.minp = l.minp;
        out.cnt = l.cnt + r.cnt;
    }
    return out;
}

void BpTree::build() {
    len_ = src_->size();
    const std::uint64_t nblocks = (len_ + kBlock - 1) / kBlock;
    const std::uint64_t nsupers = (len_ + kSuper - 1) / kSuper;
    super0_.assign(nsupers + 1, 0);
    block0_.assign(nblocks + 1, 0);
    pat_super_.assign(nsupers + 1, 0);
    pat_block_.assign(nblocks + 1, 0);

    leaves_ = std::max<std::uint64_t>(1, (len_ + kLeaf - 1) / kLeaf);
    base_ = std::bit_ceil(leaves_);
    tree_tot_.assign(2 * base_, 0);
    tree_min_.assign(2 * base_, static_cast<std::int32_t>(kInf));
    tree_cnt_.assign(2 * base_, 0);

    std::uint64_t zeros = 0, pat = 0;
    unsigned state = 0;
    std::int64_t rel = 0, lmin = kInf;
    std::uint64_t lcnt = 0, leaf = 0;

    auto flush_leaf = [&]() {
        tree_tot_[base_ + leaf] = static_cast<std::int32_t>(rel);
        tree_min_[base_ + leaf] = static_cast<std::int32_t>(lcnt ? lmin : kInf);
        tree_cnt_[base_ + leaf] = static_cast<std::uint32_t>(lcnt);
    };

    for (std::uint64_t pos = 1; pos <= len_; pos += 64) {
        unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, len_ - pos + 1));
        std::uint64_t word = src_->word(pos, w);
        for (unsigned k = 0; k < w; ++k) {
            std::uint64_t idx0 = pos + k - 1;  // 0-indexed
            if (idx0 % kBlock == 0) {
                std::uint64_t sb = idx0 / kSuper;
                if (idx0 % kSuper == 0) {
                    super0_[sb] = zeros;
                    pat_super_[sb] = pat;
                }
                block0_[idx0 / kBlock] = static_cast<std::uint16_t>(zeros - super0_[sb]);
                pat_block_[idx0 / kBlock] = static_cast<std::uint16_t>(pat - pat_super_[sb]);
            }
            if (idx0 / kLeaf != leaf) {
                flush_leaf();
                leaf = idx0 / kLeaf;
                rel = 0;
                lmin = kInf;
                lcnt = 0;
            }
            bool b = (word >> k) & 1u;
            if (b) {
                rel -= 1;
            } else {
                ++zeros;
                rel += 1;
            }
            if (rel < lmin) {
                lmin = rel;
                lcnt = 1;
            } else if (rel == lmin) {
                ++lcnt;
            }
            state = ((state << 1) | (b ? 1u : 0u)) & 7u;
            if (idx0 + 1 >= 3 && state == 6u) ++pat;
        }
    }
    if (len_ > 0) flush_leaf();
    super0_[nsupers] = zeros;
    pat_super_[nsupers] = pat;
    pat_total_ = pat;

    for (std::uint64_t v = base_ - 1; v >= 1; --v) {
        Agg l{tree_tot_[2 * v], tree_min_[2 * v], tree_cnt_[2 * v]};
        Agg r{tree_tot_[2 * v + 1], tree_min_[2 * v + 1], tree_cnt_[2 * v + 1]};
        Agg c = combine(l, r);
        tree_tot_[v] = static_cast<std::int32_t>(c.tot);
        tree_min_[v] = static_cast<std::int32_t>(std::min(c.minp, kInf));
        tree_cnt_[v] = static_cast<std::uint32_t>(c.cnt);
    }
}

std::uint64_t BpTree::rank0(std::uint64_t pos) const {
    if (pos == 0) return 0;
    if (pos > len_) throw std::invalid_argument("rank position outside the sequence");
    std::uint64_t b = (pos - 1) / kBlock;
    std::uint64_t r = super0_[(pos - 1) / kSuper] + block0_[b];
    std::uint64_t p = b * kBlock + 1;
    while (p <= pos) {
        unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, pos - p + 1));
        std::uint64_t word = src_->word(p, w);
        r += w - std::popcount(w == 64 ? word : (word & ((std::uint64_t{1} << w) - 1)));
        p += w;
    }
    return r;
}

std::uint64_t BpTree::select0(std::uint64_t j) const {
    std::uint64_t total = super0_.back();
    if (j == 0 || j > total) throw std::out_of_range("select0: no such zero");
    // superblock binary search over cumulative counts
    std::uint64_t lo = 0, hi = super0_.size() - 1;
    while (lo + 1 < hi) {
        std::uint64_t mid = (lo + hi) / 2;
        if (super0_[mid] < j)
            lo = mid;
        else
            hi = mid;
    }
    std::uint64_t sb = lo;
    std::uint64_t b = sb * (kSuper / kBlock);
    std::uint64_t cnt = super0_[sb] + block0_[b];
    std::uint64_t last_block = (len_ - 1) / kBlock;
    while (b < last_block && (b + 1) % (kSuper / kBlock) != 0) {
        std::uint64_t next = super0_[sb] + block0_[b + 1];
        if (next >= j) break;
        ++b;
        cnt = next;
    }
    std::uint64_t p = b * kBlock + 1;
    while (p <= len_) {
        unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, len_ - p + 1));
        std::uint64_t word = src_->word(p, w);
        for (unsigned k = 0; k < w; ++k) {
            if (!((word >> k) & 1u)) {
                if (++cnt == j) return p + k;
            }
        }
        p += w;
    }
    throw std::out_of_range("select0: no such zero");
}

std::uint64_t BpTree::rank110(std::uint64_t pos) const {
    if (pos == 0) return 0;
    if (pos > len_) throw std::invalid_argument("rank position outside the sequence");
    std::uint64_t b = (pos - 1) / kBlock;
    std::uint64_t r = pat_super_[(pos - 1) / kSuper] + pat_block_[b];
    std::uint64_t start = b * kBlock + 1;
    // seed the rolling window with the two bits before the block
    unsigned state = 0;
    if (start >= 3) {
        std::uint64_t two = src_->word(start - 2, 2);  // bit0 = start-2, bit1 = start-1
        state = static_cast<unsigned>(((two & 1u) << 1) | ((two >> 1) & 1u));
    } else if (start == 2) {
        state = static_cast<unsigned>(src_->word(1, 1) & 1u);
    }
    std::uint64_t p = start;
    while (p <= pos) {
        unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, pos - p + 1));
        std::uint64_t word = src_->word(p, w);
        for (unsigned k = 0; k < w; ++k) {
            bool bitv = (word >> k) & 1u;
            state = ((state << 1) | (bitv ? 1u : 0u)) & 7u;
            if (p + k >= 3 && state == 6u) ++r;
        }
        p += w;
    }
    return r;
}

std::uint64_t BpTree::open_pos(std::uint64_t i) const {
    if (i >= node_count()) throw std::invalid_argument("node outside the tree");
    return select0(i + 1);
}

std::uint64_t BpTree::fwd_le(std::uint64_t from, std::int64_t v) const {
    if (from > len_) return 0;
    std::int64_t run = excess(from - 1);
    return tree_fwd_le(1, 0, base_ - 1, from, len_, run, v);
}

std::uint64_t BpTree::bwd_le(std::uint64_t upto, std::int64_t v) const {
    if (upto == 0) return 0;
    std::int64_t at_end = excess(upto);
    std::uint64_t p = tree_bwd_le(1, 0, base_ - 1, 1, upto, at_end, v);
    return p;  // 0 means "not found": treated as virtual position 0 by callers
}

std::uint64_t BpTree::tree_fwd_le(std::uint64_t node, std::uint64_t node_lo, std::uint64_t node_hi,
                                  std::uint64_t lo, std::uint64_t hi, std::int64_t& run,
                                  std::int64_t v) const {
    std::uint64_t span_lo = node_lo * kLeaf + 1;
    std::uint64_t span_hi = std::min(len_, (node_hi + 1) * kLeaf);
    if (span_lo > len_ || span_hi < lo || span_lo > hi) return 0;
    std::uint64_t a = std::max(lo, span_lo), b = std::min(hi, span_hi);
    bool full = a == span_lo && b == span_hi;
    if (full && run + tree_min_[node] > v) {
        run += tree_tot_[node];
        return 0;
    }
    if (node_lo == node_hi) return scan_fwd_le(a, b, run, v);
    std::uint64_t mid = (node_lo + node_hi) / 2;
    std::uint64_t p = tree_fwd_le(2 * node, node_lo, mid, lo, hi, run, v);
    if (p) return p;
    return tree_fwd_le(2 * node + 1, mid + 1, node_hi, lo, hi, run, v);
}

std::uint64_t BpTree::tree_bwd_le(std::uint64_t node, std::uint64_t node_lo, std::uint64_t node_hi,
                                  std::uint64_t lo, std::uint64_t hi, std::int64_t& run_end,
                                  std::int64_t v) const {
    std::uint64_t span_lo = node_lo * kLeaf + 1;
    std::uint64_t span_hi = std::min(len_, (node_hi + 1) * kLeaf);
    if (span_lo > len_ || span_hi < lo || span_lo > hi) return 0;
    std::uint64_t a = std::max(lo, span_lo), b = std::min(hi, span_hi);
    bool full = a == span_lo && b == span_hi;
    if (full) {
        // min over the span = excess(span_lo - 1) + minp = run_end - tot + minp
        std::int64_t span_min = run_end - tree_tot_[node] + tree_min_[node];
        if (span_min > v) {
            run_end -= tree_tot_[node];
            return 0;
        }
    }
    if (node_lo == node_hi) return scan_bwd_le(a, b, run_end, v);
    std::uint64_t mid = (node_lo + node_hi) / 2;
    std::uint64_t p = tree_bwd_le(2 * node + 1, mid + 1, node_hi, lo, hi, run_end, v);
    if (p) return p;
    return tree_bwd_le(2 * node, node_lo, mid, lo, hi, run_end, v);
}

std::uint64_t BpTree::scan_fwd_le(std::uint64_t lo, std::uint64_t hi, std::int64_t& run,
                                  std::int64_t v) const {
    std::uint64_t p = lo;
    while (p <= hi) {
        unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, hi - p + 1));
        std::uint64_t word = src_->word(p, w);
        for (unsigned k = 0; k < w; ++k) {
            run += ((word >> k) & 1u) ? -1 : 1;
            if (run <= v) return p + k;
        }
        p += w;
    }
    return 0;  // run now holds excess(hi)
}

std::uint64_t BpTree::scan_bwd_le(std::uint64_t lo, std::uint64_t hi, std::int64_t& run,
                                  std::int64_t v) const {
    // run holds excess(hi) on entry, excess(lo-1) on a miss
    std::uint64_t p = hi;
    while (true) {
        if (run <= v) return p;
        run += src_->bit(p) ? 1 : -1;  // excess(p-1)
        if (p == lo) return 0;
        --p;
    }
}

BpTree::Agg BpTree::leaf_scan_agg(std::uint64_t lo, std::uint64_t hi) const {
    Agg a{0, kInf, 0};
    std::int64_t rel = 0;
    std::uint64_t p = lo;
    while (p <= hi) {
        unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, hi - p + 1));
        std::uint64_t word = src_->word(p, w);
        for (unsigned k = 0; k < w; ++k) {
            rel += ((word >> k) & 1u) ? -1 : 1;
            if (rel < a.minp) {
                a.minp = rel;
                a.cnt = 1;
            } else if (rel == a.minp) {
                ++a.cnt;
            }
        }
        p += w;
    }
    a.tot = rel;
    if (a.cnt == 0) a.minp = kInf;
    return a;
}

BpTree::Agg BpTree::node_agg(std::uint64_t node) const {
    return Agg{tree_tot_[node], tree_min_[node], tree_cnt_[node]};
}

BpTree::Agg BpTree::range_agg(std::uint64_t lo, std::uint64_t hi) const {
    if (lo > hi) return Agg{0, kInf, 0};
    struct Rec {
        const BpTree* t;
        std::uint64_t lo, hi;
        Agg go(std::uint64_t node, std::uint64_t nlo, std::uint64_t nhi) const {
            std::uint64_t span_lo = nlo * kLeaf + 1;
            std::uint64_t span_hi = std::min(t->len_, (nhi + 1) * kLeaf);
            if (span_lo > t->len_ || span_hi < lo || span_lo > hi) return Agg{0, kInf, 0};
            std::uint64_t a = std::max(lo, span_lo), b = std::min(hi, span_hi);
            if (a == span_lo && b == span_hi) return t->node_agg(node);
            if (nlo == nhi) return t->leaf_scan_agg(a, b);
            std::uint64_t mid = (nlo + nhi) / 2;
            return combine(go(2 * node, nlo, mid), go(2 * node + 1, mid + 1, nhi));
        }
    };
    return Rec{this, lo, hi}.go(1, 0, base_ - 1);
}

std::uint64_t BpTree::kth_eq(std::uint64_t lo, std::uint64_t hi, std::int64_t v,
                             std::uint64_t k) const {
    struct Rec {
        const BpTree* t;
        std::uint64_t lo, hi;
        std::int64_t v;
        std::uint64_t go(std::uint64_t node, std::uint64_t nlo, std::uint64_t nhi,
                         std::int64_t& run, std::uint64_t& k) const {
            std::uint64_t span_lo = nlo * kLeaf + 1;
            std::uint64_t span_hi = std::min(t->len_, (nhi + 1) * kLeaf);
            if (span_lo > t->len_ || span_hi < lo || span_lo > hi) return 0;
            std::uint64_t a = std::max(lo, span_lo), b = std::min(hi, span_hi);
            bool full = a == span_lo && b == span_hi;
            if (full) {
                std::int64_t node_min = run + t->tree_min_[node];
                std::uint64_t node_cnt = node_min == v ? t->tree_cnt_[node] : 0;
                if (node_min > v || node_cnt < k) {
                    if (node_min <= v) k -= node_cnt;
                    run += t->tree_tot_[node];
                    return 0;
                }
            }
            if (nlo == nhi) {
                // bit scan
                std::uint64_t p = a;
                while (p <= b) {
                    unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(64, b - p + 1));
                    std::uint64_t word = t->src_->word(p, w);
                    for (unsigned kk = 0; kk < w; ++kk) {
                        run += ((word >> kk) & 1u) ? -1 : 1;
                        if (run == v && --k == 0) return p + kk;
                    }
                    p += w;
                }
                return 0;
            }
            std::uint64_t mid = (nlo + nhi) / 2;
            std::uint64_t p = go(2 * node, nlo, mid, run, k);
            if (p) return p;
            return go(2 * node + 1, mid + 1, nhi, run, k);
        }
    };
    std::int64_t run = excess(lo - 1);
    std::uint64_t kk = k;
    std::uint64_t p = Rec{this, lo, hi, v}.go(1, 0, base_ - 1, run, kk);
    if (p == 0) throw std::out_of_range("kth_eq: fewer than k hits");
    return p;
}

std::uint64_t BpTree::close_pos(std::uint64_t i) const {
    std::uint64_t f = open_pos(i);
    std::int64_t d = excess(f);
    std::uint64_t q = fwd_le(f + 1, d - 1);
    assert(q != 0);
    return q;
}

std::optional<std::uint64_t> BpTree::parent(std::uint64_t i) const {
    if (i >= node_count()) throw std::invalid_argument("node outside the tree");
    if (i == 0) return std::nullopt;
    std::uint64_t f = open_pos(i);
    std::int64_t d = excess(f);
    std::uint64_t q = bwd_le(f - 1, d - 2);
    return node_at_open(q + 1);
}

std::uint64_t BpTree::subtree_size(std::uint64_t i) const {
    return (close_pos(i) - open_pos(i) + 1) / 2;
}

std::uint64_t BpTree::depth(std::uint64_t i) const {
    return static_cast<std::uint64_t>(excess(open_pos(i)));
}

bool BpTree::is_leaf(std::uint64_t i) const { return bit(open_pos(i) + 1); }

std::uint64_t BpTree::degree(std::uint64_t i) const {
    std::uint64_t f = open_pos(i);
    std::uint64_t c = close_pos(i);
    if (c == f + 1) return 0;
    std::int64_t d = excess(f);
    Agg a = range_agg(f + 1, c - 1);
    return (d + a.minp == d) ? a.cnt : 0;
}

std::uint64_t BpTree::child_rank(std::uint64_t i) const {
    auto p = parent(i);
    if (!p) throw std::invalid_argument("the root has no child rank");
    std::uint64_t fp = open_pos(*p);
    std::uint64_t f = open_pos(i);
    if (f == fp + 1) return 1;
    std::int64_t dp = excess(fp);
    Agg a = range_agg(fp + 1, f - 1);
    return ((dp + a.minp == dp) ? a.cnt : 0) + 1;
}

std::uint64_t BpTree::child_select(std::uint64_t i, std::uint64_t r) const {
    if (r < 1 || r > degree(i)) throw std::invalid_argument("child rank outside the degree");
    std::uint64_t f = open_pos(i);
    if (r == 1) return node_at_open(f + 1);
    std::int64_t d = excess(f);
    std::uint64_t q = kth_eq(f + 1, close_pos(i) - 1, d, r - 1);
    return node_at_open(q + 1);
}

std::optional<std::uint64_t> BpTree::next_sibling(std::uint64_t i) const {
    if (i >= node_count()) throw std::invalid_argument("node outside the tree");
    std::uint64_t c = close_pos(i);
    if (c + 1 > len_) return std::nullopt;
    if (bit(c + 1)) return std::nullopt;
    return node_at_open(c + 1);
}

std::optional<std::uint64_t> BpTree::prev_sibling(std::uint64_t i) const {
    if (i >= node_count()) throw std::invalid_argument("node outside the tree");
    if (i == 0) return std::nullopt;
    std::uint64_t f = open_pos(i);
    if (!bit(f - 1)) return std::nullopt;  // parent's open: i is a leftmost child
    std::int64_t e = excess(f - 1);
    std::uint64_t q = bwd_le(f - 2, e);  // position before the sibling's open
    return node_at_open(q + 1);
}

std::uint64_t BpTree::level_ancestor(std::uint64_t i, std::uint64_t levels_up) const {
    if (i >= node_count()) throw std::invalid_argument("node outside the tree");
    if (levels_up == 0) return i;
    std::uint64_t d = depth(i);
    if (levels_up > d - 1) throw std::invalid_argument("ancestor above the root");
    std::int64_t dt = static_cast<std::int64_t>(d - levels_up);
    std::uint64_t q = bwd_le(open_pos(i) - 1, dt - 1);
    return node_at_open(q + 1);
}

std::uint64_t BpTree::range_rightmost_min_node(std::uint64_t i, std::uint64_t j) const {
    std::uint64_t m = node_count() - 1;
    if (i < 1 || j > m || i > j) throw std::invalid_argument("bad node range");
    if (i == j) return i;
    std::uint64_t l = open_pos(i), r = open_pos(j);
    Agg a = range_agg(l, r);
    std::int64_t vmin = excess(l - 1) + a.minp;
    if (excess(l) == vmin) return i;
    std::int64_t at_r = excess(r);
    std::uint64_t p = tree_bwd_le(1, 0, base_ - 1, l, r, at_r, vmin);
    assert(p != 0 && p + 1 <= r && !bit(p + 1));
    return node_at_open(p + 1);
}

std::uint64_t BpTree::range_leftmost_min_node(
    std::uint64_t i, std::uint64_t j, const std::function<bool(std::uint64_t)>& is_red) const {
    std::uint64_t cur = range_rightmost_min_node(i, j);
    while (cur > i && !is_red(cur)) {
        auto ps = prev_sibling(cur);
        if (!ps || *ps < i) break;
        cur = *ps;
    }
    return cur;
}

std::uint64_t BpTree::directory_bits() const {
    return super0_.size() * 64 + block0_.size() * 16 + pat_super_.size() * 64 +
           pat_block_.size() * 16 + (tree_tot_.size() + tree_min_.size()) * 32 +
           tree_cnt_.size() * 32;
}

}  // namespace snlv
