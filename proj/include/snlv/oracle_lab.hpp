#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace snlv {

/// Scan-based reference for all eight queries. Positions are 1-indexed;
/// psv/plv return 0 and nsv/nlv return n+1 when no qualifying position exists;
/// q-th queries saturate at the last occurrence.
class NaiveOracle {
public:
    explicit NaiveOracle(std::vector<std::int64_t> a) : a_(std::move(a)) {}

    std::uint64_t n() const { return a_.size(); }
    const std::vector<std::int64_t>& array() const { return a_; }

    std::uint64_t psv(std::uint64_t i) const;
    std::uint64_t nsv(std::uint64_t i) const;
    std::uint64_t plv(std::uint64_t i) const;
    std::uint64_t nlv(std::uint64_t i) const;
    std::uint64_t rmin(std::uint64_t i, std::uint64_t j) const;      // leftmost
    std::uint64_t rmax(std::uint64_t i, std::uint64_t j) const;      // leftmost
    std::uint64_t rmin_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const;
    std::uint64_t rmax_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const;

private:
    void check_pos(std::uint64_t i) const;
    void check_range(std::uint64_t i, std::uint64_t j) const;
    std::vector<std::int64_t> a_;
};

/// Query-only view of a hidden array; the reconstruction code sees nothing else.
class QueryAccess {
public:
    virtual ~QueryAccess() = default;
    virtual std::uint64_t n() const = 0;
    virtual std::uint64_t psv(std::uint64_t i) const = 0;
    virtual std::uint64_t nsv(std::uint64_t i) const = 0;
    virtual std::uint64_t plv(std::uint64_t i) const = 0;
    virtual std::uint64_t nlv(std::uint64_t i) const = 0;
    virtual std::uint64_t rmin(std::uint64_t i, std::uint64_t j) const = 0;
    virtual std::uint64_t rmax(std::uint64_t i, std::uint64_t j) const = 0;
    virtual std::uint64_t rmin_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const = 0;
    virtual std::uint64_t rmax_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const = 0;
};

/// Counts every consulted query; the hidden array stays private.
class CountingQueryAccess final : public QueryAccess {
public:
    explicit CountingQueryAccess(const NaiveOracle& o) : o_(o) {}
    std::uint64_t calls() const { return calls_; }

    std::uint64_t n() const override { return o_.n(); }
    std::uint64_t psv(std::uint64_t i) const override { ++calls_; return o_.psv(i); }
    std::uint64_t nsv(std::uint64_t i) const override { ++calls_; return o_.nsv(i); }
    std::uint64_t plv(std::uint64_t i) const override { ++calls_; return o_.plv(i); }
    std::uint64_t nlv(std::uint64_t i) const override { ++calls_; return o_.nlv(i); }
    std::uint64_t rmin(std::uint64_t i, std::uint64_t j) const override { ++calls_; return o_.rmin(i, j); }
    std::uint64_t rmax(std::uint64_t i, std::uint64_t j) const override { ++calls_; return o_.rmax(i, j); }
    std::uint64_t rmin_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const override {
        ++calls_;
        return o_.rmin_q(i, j, q);
    }
    std::uint64_t rmax_q(std::uint64_t i, std::uint64_t j, std::uint64_t q) const override {
        ++calls_;
        return o_.rmax_q(i, j, q);
    }

private:
    const NaiveOracle& o_;
    mutable std::uint64_t calls_ = 0;
};

/// Pattern test: true iff perm (a permutation of 1..m) avoids 2-41-3 and 3-14-2,
/// with the "41"/"14" pair adjacent in position. Throws on a non-permutation.
bool is_baxter(std::span<const int> perm);

/// All Baxter permutations of size m, lexicographic.
std::vector<std::vector<int>> baxter_permutations(int m);

/// Arrays built by copying some positions from their nearest left survivor,
/// with the survivors forming a Baxter permutation.
struct AnInstance {
    int n = 0;
    std::uint32_t picked = 0;            // bit p-2 set <=> position p copies its left neighbor chain
    std::vector<int> base;               // the Baxter permutation over survivors
    std::vector<std::int64_t> array;     // materialized values, dense ranks
};

struct AnEnumeration {
    std::vector<AnInstance> instances;   // deduplicated
    std::uint64_t raw_count = 0;         // (picked set, permutation) pairs generated
    std::uint64_t collisions = 0;        // raw_count - instances.size()
};

/// Enumerates the full class for 2 <= n <= 9.
AnEnumeration enumerate_An(int n);

/// Closed-form count: sum over k of C(n-1, k) * baxter(n-k).
std::uint64_t an_expected_count(int n);

class UnsupportedInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rebuilds an array order-isomorphic to the hidden one (dense ranks, ties kept)
/// from q-th range minimum/maximum queries alone. Succeeds on every instance of
/// the enumerated class; other arrays may raise UnsupportedInstance.
std::vector<std::int64_t> reconstruct_from_queries(const QueryAccess& q);

/// Dense ranking (values 1..d, ties preserved) — the canonical order pattern.
std::vector<std::int64_t> dense_ranks(std::span<const std::int64_t> a);

}  // namespace snlv
