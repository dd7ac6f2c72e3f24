#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace snlv {

enum class HeapKind { Min, Max };

/// Ordered tree over array positions 1..m plus a synthetic root 0.
/// Parent of node i is the previous smaller (Min) or larger (Max) value position.
/// Preorder equals array order; the parentheses sequence uses 0 for "open".
struct ColoredHeap {
    HeapKind kind = HeapKind::Min;
    std::uint64_t m = 0;               // number of array entries
    std::vector<bool> bp;              // 2(m+1) bits, 0 = open
    std::vector<bool> red;             // per node 1..m (index 0 unused)
    std::vector<bool> valid;           // per node 1..m, parenthesis characterization
    std::vector<std::uint64_t> open_pos;  // per node 0..m, 1-indexed position of its 0

    /// Colors of valid nodes in preorder, 0 = blue, 1 = red.
    std::vector<bool> color_array() const;

    /// Validity flag of node i (1 <= i <= m). The root is rejected.
    bool is_valid(std::uint64_t i) const;

    bool node_red(std::uint64_t i) const { return red[i]; }
};

/// Single left-to-right stack pass. Throws invalid_argument on an empty array.
ColoredHeap build_colored_heap(std::span<const std::int64_t> a, HeapKind kind);

}  // namespace snlv
