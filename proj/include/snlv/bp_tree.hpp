#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "snlv/bitvec.hpp"

namespace snlv {

/// Read-only bit supplier: any <=64 consecutive bits at a 1-indexed position.
/// Repeated reads of the same range must return identical bits.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual std::uint64_t size() const = 0;
    virtual std::uint64_t word(std::uint64_t pos, unsigned w) const = 0;
    bool bit(std::uint64_t pos) const { return word(pos, 1) & 1u; }
};

class ExplicitBitSource final : public BitSource {
public:
    explicit ExplicitBitSource(const BitVector& bv) : bv_(&bv) {}
    std::uint64_t size() const override { return bv_->size(); }
    std::uint64_t word(std::uint64_t pos, unsigned w) const override {
        return bv_->access_word(pos, w);
    }

private:
    const BitVector* bv_;
};

/// Ordinal-tree navigation over a balanced-parentheses sequence with 0 = open.
/// Node i (preorder, root = 0) opens at the (i+1)-th 0. Directories are rebuilt
/// from the source at construction and never serialized.
///
/// Excess(p) = #0 - #1 over positions [1..p]; a node's open sits at excess = depth.
class BpTree {
public:
    /// Source must stay alive for the tree's lifetime.
    explicit BpTree(const BitSource& src);

    std::uint64_t bp_length() const { return len_; }
    std::uint64_t node_count() const { return len_ / 2; }  // includes the root

    bool bit(std::uint64_t pos) const { return src_->bit(pos); }
    std::uint64_t word(std::uint64_t pos, unsigned w) const { return src_->word(pos, w); }

    std::uint64_t rank0(std::uint64_t pos) const;            // pos may be 0
    std::uint64_t select0(std::uint64_t j) const;
    std::int64_t excess(std::uint64_t pos) const {
        return 2 * static_cast<std::int64_t>(rank0(pos)) - static_cast<std::int64_t>(pos);
    }

    /// Occurrences of "110" ending at positions <= pos.
    std::uint64_t rank110(std::uint64_t pos) const;
    std::uint64_t count110() const { return pat_total_; }

    // -- node operations (nodes 0..node_count-1, preorder) --
    std::uint64_t open_pos(std::uint64_t i) const;           // f(i)
    std::uint64_t close_pos(std::uint64_t i) const;          // matching 1
    std::uint64_t node_at_open(std::uint64_t pos) const { return rank0(pos) - 1; }

    std::optional<std::uint64_t> parent(std::uint64_t i) const;
    std::uint64_t subtree_size(std::uint64_t i) const;
    std::uint64_t depth(std::uint64_t i) const;              // root = 1
    std::uint64_t degree(std::uint64_t i) const;
    std::uint64_t child_rank(std::uint64_t i) const;         // 1-based, root rejected
    std::uint64_t child_select(std::uint64_t i, std::uint64_t r) const;
    std::optional<std::uint64_t> next_sibling(std::uint64_t i) const;
    std::optional<std::uint64_t> prev_sibling(std::uint64_t i) const;
    std::uint64_t level_ancestor(std::uint64_t i, std::uint64_t levels_up) const;
    bool is_leaf(std::uint64_t i) const;

    /// Leftmost position p in [i, j] holding the range minimum of the underlying
    /// array. Tree shape alone cannot split ties between equal-valued siblings,
    /// so the caller supplies is_red (false = node equals its left sibling when
    /// it has one). For max-kind trees this is the range maximum.
    std::uint64_t range_leftmost_min_node(std::uint64_t i, std::uint64_t j,
                                          const std::function<bool(std::uint64_t)>& is_red) const;

    /// Rightmost position in [i, j] holding the range minimum (shape-only).
    std::uint64_t range_rightmost_min_node(std::uint64_t i, std::uint64_t j) const;

    std::uint64_t directory_bits() const;

private:
    struct Agg {
        std::int64_t tot;
        std::int64_t minp;   // min prefix excess, relative to segment start
        std::uint64_t cnt;   // prefixes achieving minp
    };
    static Agg combine(const Agg& l, const Agg& r);

    void build();
    Agg leaf_scan_agg(std::uint64_t lo, std::uint64_t hi) const;  // inclusive bit range
    Agg node_agg(std::uint64_t node) const;

    // first p in [lo, hi] with excess(p) <= v; run = excess(lo-1) in, updated out
    std::uint64_t scan_fwd_le(std::uint64_t lo, std::uint64_t hi, std::int64_t& run,
                              std::int64_t v) const;
    // last p in [lo, hi] with excess(p) <= v; run = excess(hi) in, excess(lo-1) out on a miss
    std::uint64_t scan_bwd_le(std::uint64_t lo, std::uint64_t hi, std::int64_t& run,
                              std::int64_t v) const;
    std::uint64_t tree_fwd_le(std::uint64_t node, std::uint64_t node_lo, std::uint64_t node_hi,
                              std::uint64_t lo, std::uint64_t hi, std::int64_t& run,
                              std::int64_t v) const;
    std::uint64_t tree_bwd_le(std::uint64_t node, std::uint64_t node_lo, std::uint64_t node_hi,
                              std::uint64_t lo, std::uint64_t hi, std::int64_t& run_end,
                              std::int64_t v) const;

    std::uint64_t fwd_le(std::uint64_t from, std::int64_t v) const;   // first >= from
    std::uint64_t bwd_le(std::uint64_t upto, std::int64_t v) const;   // last <= upto, 0 ok

    Agg range_agg(std::uint64_t lo, std::uint64_t hi) const;
    std::uint64_t kth_eq(std::uint64_t lo, std::uint64_t hi, std::int64_t v, std::uint64_t k) const;

    const BitSource* src_;
    std::uint64_t len_ = 0;

    std::vector<std::uint64_t> super0_;   // zeros per 8192-bit superblock, cumulative
    std::vector<std::uint16_t> block0_;   // zeros per 512-bit block, relative
    std::vector<std::uint64_t> pat_super_;
    std::vector<std::uint16_t> pat_block_;
    std::uint64_t pat_total_ = 0;

    std::uint64_t leaves_ = 0, base_ = 0;  // excess tree leaves / padded size
    std::vector<std::int32_t> tree_tot_;
    std::vector<std::int32_t> tree_min_;
    std::vector<std::uint32_t> tree_cnt_;
};

}  // namespace snlv
