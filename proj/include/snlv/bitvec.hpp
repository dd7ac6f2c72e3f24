#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace snlv {

/// Short bit pattern (length 1..8), bits stored LSB-first: bit k = pattern position k+1.
struct Pattern {
    std::uint8_t len = 0;
    std::uint8_t bits = 0;

    static Pattern parse(std::string_view s);
    std::string to_string() const;
    bool operator==(const Pattern&) const = default;
};

/// Packed bit array with 1-indexed positions and constant-time-ish rank/select
/// for "1", "0" and any registered short pattern.
///
/// Pattern rank counts occurrences whose LAST bit lies at position <= i, so an
/// occurrence ending exactly at i is included. select returns the FIRST position
/// of the j-th occurrence in left-to-right order.
///
/// Immutable after build; concurrent reads are safe.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::vector<std::uint64_t> words, std::uint64_t length,
                       const std::vector<Pattern>& patterns = {});
    static BitVector from_bools(const std::vector<bool>& bits,
                                const std::vector<Pattern>& patterns = {});
    static BitVector from_string(std::string_view bits,
                                 const std::vector<Pattern>& patterns = {});

    std::uint64_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    /// Bit at 1-indexed position (no range check beyond assert).
    bool get(std::uint64_t pos) const {
        std::uint64_t i = pos - 1;
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    /// The w bits starting at pos, LSB-first (bit 0 of the result = bits[pos]).
    std::uint64_t access_word(std::uint64_t pos, unsigned w) const;

    /// Count of ones in bits[1..i]; i = 0 allowed (returns 0).
    std::uint64_t rank1(std::uint64_t i) const;
    std::uint64_t rank0(std::uint64_t i) const { return i - rank1(i); }

    /// Position of the j-th one / zero (1-indexed j). Throws out_of_range when absent.
    std::uint64_t select1(std::uint64_t j) const;
    std::uint64_t select0(std::uint64_t j) const;

    /// Occurrences of a registered pattern ending at positions <= i. Validates 1 <= i <= size.
    std::uint64_t rank_pattern(const Pattern& p, std::uint64_t i) const;
    std::uint64_t rank_pattern(std::string_view p, std::uint64_t i) const {
        return rank_pattern(Pattern::parse(p), i);
    }
    /// Start position of the j-th occurrence. Throws out_of_range when j is beyond the count.
    std::uint64_t select_pattern(const Pattern& p, std::uint64_t j) const;
    std::uint64_t select_pattern(std::string_view p, std::uint64_t j) const {
        return select_pattern(Pattern::parse(p), j);
    }

    std::uint64_t pattern_count(const Pattern& p) const;

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::uint64_t bits() const { return len_; }

    /// Bits of the raw payload plus all directory storage, for space reports.
    std::uint64_t directory_bits() const;

    std::string to_string() const;

    void save(std::ostream& os) const;
    static BitVector load(std::istream& is);

private:
    struct PatternDir {
        Pattern pat;
        std::vector<std::uint64_t> super;   // cumulative ends per 512-bit superblock
        std::vector<std::uint16_t> block;   // relative ends per 64-bit block
        std::vector<std::uint64_t> samples; // start of every 4096th occurrence
        std::uint64_t total = 0;
    };

    void build_directories();
    void build_pattern_dir(PatternDir& d) const;
    const PatternDir* find_dir(const Pattern& p) const;
    bool match_end(const Pattern& p, std::uint64_t end) const;

    std::vector<std::uint64_t> words_;
    std::uint64_t len_ = 0;

    std::vector<std::uint64_t> super1_;  // ones per 512-bit superblock, cumulative
    std::vector<std::uint16_t> block1_;  // ones per 64-bit block, relative to superblock
    std::vector<std::uint64_t> sel1_samples_;
    std::vector<std::uint64_t> sel0_samples_;
    std::vector<PatternDir> pattern_dirs_;
};

/// Fixed sequence over {0,1,2}, packed five values per byte.
class TritArray {
public:
    TritArray() = default;
    explicit TritArray(const std::vector<std::uint8_t>& values);

    std::uint64_t size() const { return len_; }
    /// Value at 1-indexed position.
    std::uint8_t get(std::uint64_t pos) const;
    /// Decode count consecutive values starting at pos into out.
    void decode(std::uint64_t pos, std::uint64_t count, std::uint8_t* out) const;

    std::uint64_t storage_bits() const { return bytes_.size() * 8; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    void save(std::ostream& os) const;
    static TritArray load(std::istream& is);

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t len_ = 0;
};

/// build_bitvector: validates patterns (non-empty, length <= 8) and builds all directories.
BitVector build_bitvector(const std::vector<bool>& bits, const std::vector<std::string>& patterns);

}  // namespace snlv
