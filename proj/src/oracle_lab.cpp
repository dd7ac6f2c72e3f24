#include "snlv/oracle_lab.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>

namespace snlv {

void NaiveOracle::check_pos(std::uint64_t i) const {
    if (i < 1 || i > a_.size()) throw std::invalid_argument("position outside 1..n");
}

void NaiveOracle::check_range(std::uint64_t i, std::uint64_t j) const {
    if (i < 1 || j > a_.size() || i > j) throw std::invalid_argument("bad range");
}

std::uint64_t NaiveOracle::psv(std::uint64_t i) const {
    check_pos(i);
    for (std::uint64_t j = i - 1; j >= 1; --j)
        if (a_[j - 1] < a_[i - 1]) return j;
    return 0;
}

std::uint64_t NaiveOracle::nsv(std::uint64_t i) const {
    check_pos(i);
    for (std::uint64_t j = i + 1; j <= a_.size(); ++j)
        if (a_[j - 1] < a_[i - 1]) return j;
    return a_.size() + 1;
}

std::uint64_t NaiveOracle::plv(std::uint64_t i) const {
    check_pos(i);
    for (std::uint64_t j = i - 1; j >= 1; --j)
        if (a_[j - 1] > a_[i - 1]) return j;
    return 0;
}

std::uint64_t NaiveOracle::nlv(std::uint64_t i) const {
    check_pos(i);
    for (std::uint64_t j = i + 1; j <= a_.size(); ++j)
        if (a_[j - 1] > a_[i - 1]) return j;
    return a_.size() + 1;
}

std::uint64_t NaiveOracle::rmin(std::uint64_t i, std::uint64_t j) const {
    check_range(i, j);
    std::uint64_t best = i;
    for (std::uint64_t p = i + 1; p <= j; ++p)
        if (a_[p - 1] < a_[best - 1]) best = p;
    return best;
}

std::uint64_t NaiveOracle::rmax(std::uint64_t i, std::uint64_t j) const {
    check_range(i, j);
    std::uint64_t best = i;
    for (std::uint64_t p = i + 1; p <= j; ++p)
        if (a_[p - 1] > a_[best - 1]) best = p;
    return best;
}

std::uint64_t NaiveOracle::rmin_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const {
    check_range(i, j);
    if (q < 1) throw std::invalid_argument("q must be positive");
    std::int64_t m = a_[rmin(i, j) - 1];
    std::uint64_t seen = 0, last = 0;
    for (std::uint64_t p = i; p <= j; ++p) {
        if (a_[p - 1] == m) {
            last = p;
            if (++seen == q) return p;
        }
    }
    return last;  // q beyond the occurrence count saturates
}

std::uint64_t NaiveOracle::rmax_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const {
    check_range(i, j);
    if (q < 1) throw std::invalid_argument("q must be positive");
    std::int64_t m = a_[rmax(i, j) - 1];
    std::uint64_t seen = 0, last = 0;
    for (std::uint64_t p = i; p <= j; ++p) {
        if (a_[p - 1] == m) {
            last = p;
            if (++seen == q) return p;
        }
    }
    return last;
}

bool is_baxter(std::span<const int> perm) {
    const int m = static_cast<int>(perm.size());
    std::vector<bool> seen(m + 1, false);
    for (int v : perm) {
        if (v < 1 || v > m || seen[v]) throw std::invalid_argument("input is not a permutation of 1..m");
        seen[v] = true;
    }
    // vincular patterns: the "41" / "14" pair sits at adjacent positions j, j+1
    for (int j = 1; j + 2 <= m; ++j) {
        int hi = perm[j - 1], lo = perm[j];
        if (hi > lo) {
            // 2-41-3: sigma(j+1) < sigma(i) < sigma(k) < sigma(j), i < j < j+1 < k
            for (int i = 1; i < j; ++i) {
                int v = perm[i - 1];
                if (v <= lo || v >= hi) continue;
                for (int k = j + 2; k <= m; ++k) {
                    int w = perm[k - 1];
                    if (v < w && w < hi) return false;
                }
            }
        } else {
            // 3-14-2: sigma(j) < sigma(k) < sigma(i) < sigma(j+1)
            for (int i = 1; i < j; ++i) {
                int v = perm[i - 1];
                if (v <= hi || v >= lo) continue;
                for (int k = j + 2; k <= m; ++k) {
                    int w = perm[k - 1];
                    if (hi < w && w < v) return false;
                }
            }
        }
    }
    return true;
}

std::vector<std::vector<int>> baxter_permutations(int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 1);
    do {
        if (is_baxter(p)) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<std::int64_t> dense_ranks(std::span<const std::int64_t> a) {
    std::vector<std::int64_t> sorted(a.begin(), a.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::int64_t> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = 1 + (std::lower_bound(sorted.begin(), sorted.end(), a[i]) - sorted.begin());
    return r;
}

AnEnumeration enumerate_An(int n) {
    if (n < 2 || n > 9) throw std::invalid_argument("supported sizes are 2..9");
    std::vector<std::vector<std::vector<int>>> bax(n + 1);
    for (int s = 1; s <= n; ++s) bax[s] = baxter_permutations(s);

    AnEnumeration out;
    std::set<std::vector<std::int64_t>> seen;
    const std::uint32_t masks = 1u << (n - 1);  // subsets of {2..n}
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        int k = std::popcount(mask);
        if (k == n) continue;  // position 1 always survives, so k <= n-1 anyway
        for (const auto& pi : bax[n - k]) {
            std::vector<std::int64_t> arr(n);
            int t = 0;
            for (int p = 1; p <= n; ++p) {
                bool is_picked = p >= 2 && ((mask >> (p - 2)) & 1u);
                if (is_picked)
                    arr[p - 1] = arr[p - 2];  // nearest left survivor's value propagates
                else
                    arr[p - 1] = pi[t++];
            }
            ++out.raw_count;
            auto canon = dense_ranks(arr);
            if (seen.insert(canon).second)
                out.instances.push_back(AnInstance{n, mask, pi, std::move(canon)});
        }
    }
    out.collisions = out.raw_count - out.instances.size();
    return out;
}

std::uint64_t an_expected_count(int n) {
    auto binom = [](int a, int b) {
        std::uint64_t r = 1;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    std::uint64_t total = 0;
    for (int k = 0; k <= n - 1; ++k)
        total += binom(n - 1, k) * baxter_permutations(n - k).size();
    return total;
}

namespace {

enum class Rel { Less, Equal, Greater, Unknown };

Rel invert(Rel r) {
    if (r == Rel::Less) return Rel::Greater;
    if (r == Rel::Greater) return Rel::Less;
    return r;
}

Rel rel_from_ranks(std::int64_t x, std::int64_t y) {
    if (x < y) return Rel::Less;
    if (x > y) return Rel::Greater;
    return Rel::Equal;
}

// Compose "a ? b" and "b ? c" into "a ? c" where possible.
Rel compose(Rel ab, Rel bc) {
    if (ab == Rel::Equal) return bc;
    if (bc == Rel::Equal) return ab;
    if (ab == bc) return ab;
    return Rel::Unknown;
}

struct Reconstructor {
    const QueryAccess& q;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::int64_t>> memo;

    // distinct answer positions of the q-th query family on [lo, hi], increasing
    std::vector<std::uint64_t> occurrence_set(std::uint64_t lo, std::uint64_t hi, bool maximum) {
        std::vector<std::uint64_t> s;
        for (std::uint64_t t = 1;; ++t) {
            std::uint64_t p = maximum ? q.rmax_q(lo, hi, t) : q.rmin_q(lo, hi, t);
            if (!s.empty() && p == s.back()) break;
            s.push_back(p);
        }
        return s;
    }

    std::vector<std::int64_t> solve(std::uint64_t lo, std::uint64_t hi) {
        auto key = std::make_pair(lo, hi);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        std::vector<std::int64_t> result;
        if (hi - lo == 1) {
            std::uint64_t p1 = q.rmin_q(lo, hi, 1);
            std::uint64_t p2 = q.rmin_q(lo, hi, 2);
            if (p1 == lo && p2 == hi)
                result = {1, 1};
            else if (p1 == lo)
                result = {1, 2};
            else
                result = {2, 1};
        } else {
            std::vector<std::int64_t> a1 = solve(lo, hi - 1);  // ranks of [lo, hi-1]
            std::vector<std::int64_t> a2 = solve(lo + 1, hi);  // ranks of [lo+1, hi]
            Rel rel = resolve_ends(lo, hi, a1, a2);
            result = merge(lo, hi, a1, a2, rel);
        }
        memo.emplace(key, result);
        return result;
    }

    // Relation of A[lo] to A[hi].
    Rel resolve_ends(std::uint64_t lo, std::uint64_t hi, const std::vector<std::int64_t>& a1,
                     const std::vector<std::int64_t>& a2) {
        auto smin = occurrence_set(lo, hi, false);
        auto smax = occurrence_set(lo, hi, true);
        bool lo_min = std::find(smin.begin(), smin.end(), lo) != smin.end();
        bool hi_min = std::find(smin.begin(), smin.end(), hi) != smin.end();
        bool lo_max = std::find(smax.begin(), smax.end(), lo) != smax.end();
        bool hi_max = std::find(smax.begin(), smax.end(), hi) != smax.end();
        if (lo_min) return hi_min ? Rel::Equal : Rel::Less;
        if (hi_min) return Rel::Greater;
        if (lo_max) return hi_max ? Rel::Equal : Rel::Greater;
        if (hi_max) return Rel::Less;

        std::uint64_t x = smin.back(), y = smax.back();  // rightmost extreme positions
        std::uint64_t from = std::min(x, y), to = std::max(x, y);
        for (std::uint64_t i = from; i <= to; ++i) {
            Rel lo_i = rel_from_ranks(a1[0], a1[i - lo]);           // A[lo] ? A[i]
            Rel i_hi = rel_from_ranks(a2[i - lo - 1], a2.back());   // A[i] ? A[hi]
            Rel r = compose(lo_i, i_hi);
            if (r != Rel::Unknown) return r;
        }
        return x < y ? Rel::Less : Rel::Greater;
    }

    std::vector<std::int64_t> merge(std::uint64_t lo, std::uint64_t hi,
                                    const std::vector<std::int64_t>& a1,
                                    const std::vector<std::int64_t>& a2, Rel lo_hi) {
        const std::uint64_t m = hi - lo + 1;
        std::vector<std::int64_t> out(m);
        for (std::uint64_t p = lo; p <= hi; ++p) {
            std::int64_t smaller = 0;
            for (std::uint64_t r = lo; r <= hi; ++r) {
                if (r != p && pair_rel(p, r, lo, hi, a1, a2, lo_hi) == Rel::Greater) ++smaller;
            }
            out[p - lo] = smaller + 1;
        }
        // collapse to dense ranks (ties share a rank, gaps removed)
        return dense_ranks(out);
    }

    static Rel pair_rel(std::uint64_t p, std::uint64_t r, std::uint64_t lo, std::uint64_t hi,
                        const std::vector<std::int64_t>& a1, const std::vector<std::int64_t>& a2,
                        Rel lo_hi) {
        if (p == r) return Rel::Equal;
        if (p > r) return invert(pair_rel(r, p, lo, hi, a1, a2, lo_hi));
        if (p == lo && r == hi) return lo_hi;
        if (r < hi) return rel_from_ranks(a1[p - lo], a1[r - lo]);
        return rel_from_ranks(a2[p - lo - 1], a2[r - lo - 1]);  // p >= lo+1 here
    }
};

}  // namespace

std::vector<std::int64_t> reconstruct_from_queries(const QueryAccess& q) {
    const std::uint64_t n = q.n();
    if (n == 0) throw std::invalid_argument("empty hidden array");
    if (n == 1) return {1};
    Reconstructor rc{q, {}};
    std::vector<std::int64_t> candidate = rc.solve(1, n);

    // Replay the query families against the candidate; any disagreement means the
    // hidden array is outside the supported class.
    NaiveOracle check(candidate);
    for (std::uint64_t i = 1; i <= n; ++i) {
        for (std::uint64_t j = i; j <= n; ++j) {
            for (std::uint64_t t = 1; t <= j - i + 1; ++t) {
                if (check.rmin_q(i, j, t) != q.rmin_q(i, j, t) ||
                    check.rmax_q(i, j, t) != q.rmax_q(i, j, t))
                    throw UnsupportedInstance("hidden array is outside the reconstructible class");
            }
        }
    }
    return candidate;
}

}  // namespace snlv
