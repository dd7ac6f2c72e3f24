#include "snlv/heap_builder.hpp"

#include <stdexcept>

namespace snlv {

std::vector<bool> ColoredHeap::color_array() const {
    std::vector<bool> c;
    for (std::uint64_t i = 1; i <= m; ++i)
        if (valid[i]) c.push_back(red[i]);
    return c;
}

bool ColoredHeap::is_valid(std::uint64_t i) const {
    if (i < 1 || i > m) throw std::invalid_argument("node outside 1..m");
    return valid[i];
}

ColoredHeap build_colored_heap(std::span<const std::int64_t> a, HeapKind kind) {
    if (a.empty()) throw std::invalid_argument("array must be non-empty");
    const std::uint64_t m = a.size();

    ColoredHeap h;
    h.kind = kind;
    h.m = m;
    h.bp.reserve(2 * (m + 1));
    h.red.assign(m + 1, false);
    h.valid.assign(m + 1, false);
    h.open_pos.assign(m + 1, 0);

    struct Entry {
        std::uint64_t node;      // 0 = synthetic root
        std::int64_t value;      // unused for the root
        bool has_children;
        std::int64_t last_child_value;
    };
    std::vector<Entry> stack;
    stack.push_back({0, 0, false, 0});

    auto keeps = [kind](std::int64_t top, std::int64_t v) {
        // keep the stack entry iff it is a strict parent candidate
        return kind == HeapKind::Min ? top < v : top > v;
    };

    h.bp.push_back(false);  // root opens
    h.open_pos[0] = 1;
    for (std::uint64_t i = 1; i <= m; ++i) {
        std::int64_t v = a[i - 1];
        while (stack.size() > 1 && !keeps(stack.back().value, v)) {
            stack.pop_back();
            h.bp.push_back(true);
        }
        Entry& p = stack.back();
        bool leftmost = !p.has_children;
        h.red[i] = !leftmost && p.last_child_value != v;
        p.has_children = true;
        p.last_child_value = v;

        std::uint64_t pos = h.bp.size() + 1;
        h.open_pos[i] = pos;
        // valid iff the two preceding parentheses are both closes
        h.valid[i] = pos > 2 && h.bp[pos - 2] && h.bp[pos - 3];
        h.bp.push_back(false);
        stack.push_back({i, v, false, 0});
    }
    while (!stack.empty()) {
        stack.pop_back();
        h.bp.push_back(true);
    }
    return h;
}

}  // namespace snlv
