#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snlv/bitvec.hpp"
#include "snlv/bp_tree.hpp"
#include "snlv/heap_builder.hpp"
#include "snlv/packed.hpp"

namespace snlv {

enum class Side : int { Min = 0, Max = 1 };

/// Joint encoding of both parentheses trees. U names each position's internal
/// tree, D classifies the other tree's close-run length (0 / 1 / >=2 extra
/// ones) and E carries the tails of the long runs. For arrays with adjacent
/// repeats, C marks the repeated positions and the trees describe the
/// deduplicated core; the full-array parentheses are re-expanded on demand.
///
/// Everything needed to answer queries is rebuilt from the serialized payload;
/// no directory is written to disk.
class CombinedEncoding {
public:
    /// Per-decode-block metadata for one tree: where the block's first
    /// regenerated chunk starts in U/D and in E, the leading-ones trim class,
    /// and extracted bits for blocks whose E span is too wide to scan.
    struct SideDir {
        std::uint64_t fprime = 0;   // length of the stripped sequence B
        std::uint64_t nblocks = 0;
        PackedArray gap_delta;      // start-gap advance per block
        std::vector<std::uint64_t> gap_sample;  // absolute start every 64 blocks
        PackedArray e_delta;        // E-start advance per block (escape = max)
        std::vector<std::uint64_t> e_sample;
        std::vector<std::pair<std::uint32_t, std::uint64_t>> e_escape;
        PackedArray r_class;        // 2-bit leading-ones class per block
        std::vector<bool> f_bits;   // concatenated extracts for bad blocks
        std::vector<std::pair<std::uint32_t, std::uint64_t>> f_index;  // block -> offset

        std::uint64_t gap_start(std::uint64_t block) const;
        std::uint64_t e_start(std::uint64_t block) const;
        std::uint64_t bits() const;
    };

    /// Block metadata for the re-expanded (original array) tree.
    struct GeneralDir {
        std::uint64_t blen = 0;     // 2(n+1)
        std::uint64_t nblocks = 0;
        BitVector m_bprime;         // marked start positions in the core BP
        BitVector m_bprime_dup;     // per block: shares the previous block's mark
        BitVector m_c;              // marked start positions in C (slot n+1 = exhausted)
        BitVector m_c_dup;
        BitVector first_bit_zero;   // per block: first bit of the block is 0

        std::uint64_t bprime_start(std::uint64_t block) const;
        std::uint64_t c_start(std::uint64_t block) const;
        std::uint64_t bits() const;
    };

    CombinedEncoding() = default;

    /// Joint encoding of two parentheses sequences from the same
    /// distinct-adjacent array, with the valid-node colors of each.
    static CombinedEncoding encode(const std::vector<bool>& bp_min,
                                   const std::vector<bool>& bp_max,
                                   const std::vector<bool>& c_min,
                                   const std::vector<bool>& c_max,
                                   std::uint32_t block_bits = kDefaultBlockBits);

    /// Any array: extracts C and the deduplicated core, then encodes the core.
    static CombinedEncoding encode_general(std::span<const std::int64_t> a,
                                           std::uint32_t block_bits = kDefaultBlockBits);

    static constexpr std::uint32_t kDefaultBlockBits = 512;

    bool general() const { return general_; }
    std::uint64_t n() const { return n_; }
    std::uint64_t n_prime() const { return n_prime_; }
    std::uint32_t block_bits() const { return block_bits_; }
    std::uint64_t c_split() const { return c_split_; }
    const BitVector& u() const { return u_; }
    const TritArray& d() const { return d_; }
    const BitVector& e() const { return e_; }
    const BitVector& c_minmax() const { return cmm_; }
    const BitVector& c() const { return c_; }
    std::uint64_t f_end(Side s) const { return f_end_[static_cast<int>(s)]; }

    /// Length of the core tree's parentheses sequence: 2(n'+1).
    std::uint64_t core_bp_length() const { return 2 * (n_prime_ + 1); }
    /// Length of the original-array tree's parentheses sequence: 2(n+1).
    std::uint64_t full_bp_length() const { return 2 * (n_ + 1); }

    /// Bits of the b-th block (1-indexed) of the stripped core sequence B.
    std::vector<bool> decode_block(Side s, std::uint64_t block) const;
    /// Bits of the b-th block of the full re-expanded sequence (general arrays).
    std::vector<bool> decode_block_general(Side s, std::uint64_t block) const;

    const SideDir& side_dir(Side s) const { return dir_[static_cast<int>(s)]; }
    const GeneralDir& general_dir(Side s) const { return gdir_[static_cast<int>(s)]; }

    struct SpaceComponent {
        std::string name;
        std::string group;  // "core" | "directory"
        std::uint64_t bits;
    };
    struct SpaceReport {
        std::uint64_t n = 0, n_prime = 0;
        std::vector<SpaceComponent> components;
        std::uint64_t core_bits() const;
        std::uint64_t directory_bits() const;
        double info_core_bits() const;  // entropy-coded reference for the same data
        double info_core_reference = 0.0;
    };
    SpaceReport space_report() const;

    void save(std::ostream& os) const;
    static CombinedEncoding load(std::istream& is);
    void save_file(const std::string& path) const;
    static CombinedEncoding load_file(const std::string& path);

    /// Test hook: flips one bit of E and rebuilds the directories.
    void corrupt_e_bit_for_test(std::uint64_t pos);

private:
    friend class VirtualBp;

    void finish_build();
    std::vector<bool> generate_core_b(Side s) const;       // sequential expansion of B
    void build_side_dir(Side s, const std::vector<bool>& b);
    void build_general_dir(Side s, const std::vector<bool>& bcore_full);
    std::vector<bool> decode_core_block_impl(Side s, std::uint64_t block,
                                             std::vector<bool>* f_record) const;
    const std::vector<bool>& core_block_cached(Side s, std::uint64_t block) const;
    bool core_bp_bit(Side s, std::uint64_t pos) const;   // over 0 . B . 1^tail
    bool full_bp_bit(Side s, std::uint64_t pos) const;   // over the re-expanded tree

    bool general_ = false;
    std::uint64_t epoch_ = 0;  // invalidates thread-local block caches
    std::uint64_t n_ = 0, n_prime_ = 0;
    std::uint32_t block_bits_ = kDefaultBlockBits;
    BitVector u_;
    TritArray d_;
    BitVector e_;
    BitVector cmm_;
    std::uint64_t c_split_ = 0;
    BitVector c_;               // empty unless general
    std::uint64_t f_end_[2] = {0, 0};
    SideDir dir_[2];
    GeneralDir gdir_[2];
};

/// Word access over a tree's parentheses bits decoded from the encoding.
/// layer Core exposes the deduplicated tree (2(n'+1) bits); layer Full the
/// original-array tree (2(n+1) bits; equals Core for distinct-adjacent input).
class VirtualBp final : public BitSource {
public:
    enum class Layer { Core, Full };
    VirtualBp(const CombinedEncoding& enc, Side side, Layer layer);

    std::uint64_t size() const override { return len_; }
    std::uint64_t word(std::uint64_t pos, unsigned w) const override;

private:
    const std::vector<bool>& block_bits(std::uint64_t block) const;

    const CombinedEncoding* enc_;
    Side side_;
    Layer layer_;
    std::uint64_t len_ = 0;
};

/// The u/d/e chunk expansion, as a pure function on finite sequences.
/// b picks which tree's bits come out; inputs may end mid-chunk.
std::vector<bool> g_expand(const std::vector<bool>& u, const std::vector<std::uint8_t>& d,
                           const std::vector<bool>& e, bool b);

/// Re-expansion of repeated positions: every c=1 inserts "10" before the next
/// copied run of b; a run of b up to and including its 0 consumes one c=0.
std::vector<bool> h_expand(const std::vector<bool>& b, const std::vector<bool>& c);

/// C extraction: marks[i] set iff i > 1 and a[i-1] == a[i] (1-indexed).
std::vector<bool> repeat_marks(std::span<const std::int64_t> a);
/// The array with marked positions removed.
std::vector<std::int64_t> drop_repeats(std::span<const std::int64_t> a);

}  // namespace snlv
