#include "snlv/bitvec.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

#include "snlv/wire.hpp"

namespace snlv {

namespace {
constexpr std::uint64_t kSuper = 512;   // bits per rank superblock
constexpr std::uint64_t kBlock = 64;    // bits per rank block
constexpr std::uint64_t kSelSample = 4096;

// Base-3 digits of every byte, digit 0 first.
struct TritTable {
    std::uint8_t digit[256][5];
    TritTable() {
        for (int b = 0; b < 256; ++b) {
            int v = b;
            for (int k = 0; k < 5; ++k) {
                digit[b][k] = static_cast<std::uint8_t>(v % 3);
                v /= 3;
            }
        }
    }
};
const TritTable kTrits;
}  // namespace

Pattern Pattern::parse(std::string_view s) {
    if (s.empty() || s.size() > 8) throw std::invalid_argument("pattern length must be 1..8");
    Pattern p;
    p.len = static_cast<std::uint8_t>(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '1')
            p.bits |= static_cast<std::uint8_t>(1u << k);
        else if (s[k] != '0')
            throw std::invalid_argument("pattern must be over {0,1}");
    }
    return p;
}

std::string Pattern::to_string() const {
    std::string s(len, '0');
    for (unsigned k = 0; k < len; ++k)
        if ((bits >> k) & 1u) s[k] = '1';
    return s;
}

BitVector::BitVector(std::vector<std::uint64_t> words, std::uint64_t length,
                     const std::vector<Pattern>& patterns)
    : words_(std::move(words)), len_(length) {
    words_.resize((len_ + 63) / 64, 0);
    if (len_ % 64 != 0 && !words_.empty())
        words_.back() &= (~std::uint64_t{0}) >> (64 - len_ % 64);
    for (const Pattern& p : patterns) {
        if (p.len == 0 || p.len > 8) throw std::invalid_argument("pattern length must be 1..8");
        pattern_dirs_.push_back(PatternDir{p, {}, {}, {}, 0});
    }
    build_directories();
}

BitVector BitVector::from_bools(const std::vector<bool>& bits, const std::vector<Pattern>& patterns) {
    std::vector<std::uint64_t> w((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) w[i >> 6] |= std::uint64_t{1} << (i & 63);
    return BitVector(std::move(w), bits.size(), patterns);
}

BitVector BitVector::from_string(std::string_view bits, const std::vector<Pattern>& patterns) {
    std::vector<std::uint64_t> w((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            w[i >> 6] |= std::uint64_t{1} << (i & 63);
        else if (bits[i] != '0')
            throw std::invalid_argument("bit string must be over {0,1}");
    }
    return BitVector(std::move(w), bits.size(), patterns);
}

std::uint64_t BitVector::access_word(std::uint64_t pos, unsigned w) const {
    if (w == 0 || w > 64 || pos < 1 || pos + w - 1 > len_)
        throw std::invalid_argument("access_word range outside the array");
    std::uint64_t i = pos - 1;
    std::uint64_t wi = i >> 6, off = i & 63;
    std::uint64_t lo = words_[wi] >> off;
    if (off != 0 && wi + 1 < words_.size()) lo |= words_[wi + 1] << (64 - off);
    if (w == 64) return lo;
    return lo & ((std::uint64_t{1} << w) - 1);
}

void BitVector::build_directories() {
    std::uint64_t nblocks = (len_ + kBlock - 1) / kBlock;
    std::uint64_t nsupers = (len_ + kSuper - 1) / kSuper;
    super1_.assign(nsupers + 1, 0);
    block1_.assign(nblocks + 1, 0);
    sel1_samples_.clear();
    sel0_samples_.clear();

    std::uint64_t total = 0, in_super = 0, zeros = 0;
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        if (b * kBlock % kSuper == 0) {
            super1_[b * kBlock / kSuper] = total;
            in_super = 0;
        }
        block1_[b] = static_cast<std::uint16_t>(in_super);
        std::uint64_t word = words_[b];
        std::uint64_t valid = std::min<std::uint64_t>(64, len_ - b * 64);
        for (std::uint64_t k = 0; k < valid; ++k) {
            if ((word >> k) & 1u) {
                ++total;
                ++in_super;
                if (total % kSelSample == 1) sel1_samples_.push_back(b * 64 + k + 1);
            } else {
                ++zeros;
                if (zeros % kSelSample == 1) sel0_samples_.push_back(b * 64 + k + 1);
            }
        }
    }
    super1_[nsupers] = total;
    for (auto& d : pattern_dirs_) build_pattern_dir(d);
}

bool BitVector::match_end(const Pattern& p, std::uint64_t end) const {
    if (end < p.len || end > len_) return false;
    return access_word(end - p.len + 1, p.len) == p.bits;
}

void BitVector::build_pattern_dir(PatternDir& d) const {
    std::uint64_t nblocks = (len_ + kBlock - 1) / kBlock;
    std::uint64_t nsupers = (len_ + kSuper - 1) / kSuper;
    d.super.assign(nsupers + 1, 0);
    d.block.assign(nblocks + 1, 0);
    d.samples.clear();
    std::uint64_t total = 0, in_super = 0;
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        if (b * kBlock % kSuper == 0) {
            d.super[b * kBlock / kSuper] = total;
            in_super = 0;
        }
        d.block[b] = static_cast<std::uint16_t>(in_super);
        std::uint64_t hi = std::min(len_, (b + 1) * kBlock);
        for (std::uint64_t e = b * kBlock + 1; e <= hi; ++e) {
            if (match_end(d.pat, e)) {
                ++total;
                ++in_super;
                if (total % kSelSample == 1) d.samples.push_back(e - d.pat.len + 1);
            }
        }
    }
    d.super[nsupers] = total;
    d.total = total;
}

std::uint64_t BitVector::rank1(std::uint64_t i) const {
    if (i > len_) throw std::invalid_argument("rank position outside the array");
    if (i == 0) return 0;
    std::uint64_t idx = i;  // count bits [1..i] = first i bits
    std::uint64_t sb = (idx - 1) / kSuper;
    std::uint64_t blk = (idx - 1) / kBlock;
    std::uint64_t r = super1_[sb] + block1_[blk];
    std::uint64_t base = blk * kBlock;
    std::uint64_t rem = idx - base;  // 1..64
    std::uint64_t word = words_[blk];
    if (rem < 64) word &= (std::uint64_t{1} << rem) - 1;
    return r + std::popcount(word);
}

std::uint64_t BitVector::select1(std::uint64_t j) const {
    std::uint64_t total = super1_.empty() ? 0 : super1_.back();
    if (j == 0 || j > total) throw std::out_of_range("select1: no such occurrence");
    std::uint64_t pos = sel1_samples_[(j - 1) / kSelSample];
    std::uint64_t blk = (pos - 1) / kBlock;
    std::uint64_t cnt = super1_[blk * kBlock / kSuper] + block1_[blk];
    while ((blk + 1) * kBlock < len_) {
        std::uint64_t ones_next = super1_[((blk + 1) * kBlock) / kSuper] + block1_[blk + 1];
        if (ones_next >= j) break;
        blk++;
        cnt = ones_next;
    }
    std::uint64_t word = words_[blk];
    std::uint64_t valid = std::min<std::uint64_t>(64, len_ - blk * 64);
    for (std::uint64_t k = 0; k < valid; ++k) {
        if ((word >> k) & 1u) {
            if (++cnt == j) return blk * 64 + k + 1;
        }
    }
    throw std::out_of_range("select1: no such occurrence");
}

std::uint64_t BitVector::select0(std::uint64_t j) const {
    std::uint64_t total = len_ - (super1_.empty() ? 0 : super1_.back());
    if (j == 0 || j > total) throw std::out_of_range("select0: no such occurrence");
    std::uint64_t pos = sel0_samples_[(j - 1) / kSelSample];
    std::uint64_t blk = (pos - 1) / kBlock;
    std::uint64_t cnt = blk * kBlock - (super1_[blk * kBlock / kSuper] + block1_[blk]);
    while ((blk + 1) * kBlock < len_) {
        std::uint64_t ones_next = super1_[((blk + 1) * kBlock) / kSuper] + block1_[blk + 1];
        std::uint64_t zeros_next = (blk + 1) * kBlock - ones_next;
        if (zeros_next >= j) break;
        blk++;
        cnt = zeros_next;
    }
    std::uint64_t word = words_[blk];
    std::uint64_t valid = std::min<std::uint64_t>(64, len_ - blk * 64);
    for (std::uint64_t k = 0; k < valid; ++k) {
        if (!((word >> k) & 1u)) {
            if (++cnt == j) return blk * 64 + k + 1;
        }
    }
    throw std::out_of_range("select0: no such occurrence");
}

const BitVector::PatternDir* BitVector::find_dir(const Pattern& p) const {
    for (const auto& d : pattern_dirs_)
        if (d.pat == p) return &d;
    return nullptr;
}

std::uint64_t BitVector::rank_pattern(const Pattern& p, std::uint64_t i) const {
    if (i < 1 || i > len_) throw std::invalid_argument("rank position outside the array");
    if (p.len == 1) return p.bits ? rank1(i) : rank0(i);
    const PatternDir* d = find_dir(p);
    if (d == nullptr) throw std::invalid_argument("pattern not registered");
    std::uint64_t blk = (i - 1) / kBlock;
    std::uint64_t r = d->super[blk * kBlock / kSuper] + d->block[blk];
    for (std::uint64_t e = blk * kBlock + 1; e <= i; ++e)
        if (match_end(p, e)) ++r;
    return r;
}

std::uint64_t BitVector::pattern_count(const Pattern& p) const {
    if (p.len == 1) return p.bits ? rank1(len_) : rank0(len_);
    const PatternDir* d = find_dir(p);
    if (d == nullptr) throw std::invalid_argument("pattern not registered");
    return d->total;
}

std::uint64_t BitVector::select_pattern(const Pattern& p, std::uint64_t j) const {
    if (p.len == 1) return p.bits ? select1(j) : select0(j);
    const PatternDir* d = find_dir(p);
    if (d == nullptr) throw std::invalid_argument("pattern not registered");
    if (j == 0 || j > d->total) throw std::out_of_range("select_pattern: no such occurrence");
    std::uint64_t start = d->samples[(j - 1) / kSelSample];
    std::uint64_t end0 = start + p.len - 1;  // end of the sampled occurrence
    std::uint64_t blk = (end0 - 1) / kBlock;
    std::uint64_t cnt = d->super[blk * kBlock / kSuper] + d->block[blk];
    while ((blk + 1) * kBlock < len_) {
        std::uint64_t next = d->super[((blk + 1) * kBlock) / kSuper] + d->block[blk + 1];
        if (next >= j) break;
        blk++;
        cnt = next;
    }
    for (std::uint64_t e = blk * kBlock + 1; e <= len_; ++e) {
        if (match_end(p, e)) {
            if (++cnt == j) return e - p.len + 1;
        }
    }
    throw std::out_of_range("select_pattern: no such occurrence");
}

std::uint64_t BitVector::directory_bits() const {
    std::uint64_t bits = super1_.size() * 64 + block1_.size() * 16 +
                         (sel1_samples_.size() + sel0_samples_.size()) * 64;
    for (const auto& d : pattern_dirs_)
        bits += d.super.size() * 64 + d.block.size() * 16 + d.samples.size() * 64;
    return bits;
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for (std::uint64_t i = 1; i <= len_; ++i)
        if (get(i)) s[i - 1] = '1';
    return s;
}

void BitVector::save(std::ostream& os) const {
    wire::put_u32(os, 0x56424e53u);  // "SNBV"
    wire::put_u16(os, 1);
    wire::put_u16(os, static_cast<std::uint16_t>(pattern_dirs_.size()));
    wire::put_u64(os, len_);
    for (const auto& d : pattern_dirs_) {
        wire::put_u8(os, d.pat.len);
        wire::put_u8(os, d.pat.bits);
    }
    wire::put_words(os, words_);
}

BitVector BitVector::load(std::istream& is) {
    if (wire::get_u32(is) != 0x56424e53u) throw std::runtime_error("bad bitvector magic");
    if (wire::get_u16(is) != 1) throw std::runtime_error("unsupported bitvector version");
    std::uint16_t np = wire::get_u16(is);
    std::uint64_t len = wire::get_u64(is);
    std::vector<Pattern> pats(np);
    for (auto& p : pats) {
        p.len = wire::get_u8(is);
        p.bits = wire::get_u8(is);
    }
    std::vector<std::uint64_t> words = wire::get_words(is);
    return BitVector(std::move(words), len, pats);
}

BitVector build_bitvector(const std::vector<bool>& bits, const std::vector<std::string>& patterns) {
    std::vector<Pattern> ps;
    ps.reserve(patterns.size());
    for (const auto& s : patterns) ps.push_back(Pattern::parse(s));
    return BitVector::from_bools(bits, ps);
}

TritArray::TritArray(const std::vector<std::uint8_t>& values) : len_(values.size()) {
    bytes_.assign((len_ + 4) / 5, 0);
    for (std::uint64_t i = 0; i < len_; ++i) {
        if (values[i] > 2) throw std::invalid_argument("trit value must be 0, 1 or 2");
        static const std::uint8_t pow3[5] = {1, 3, 9, 27, 81};
        bytes_[i / 5] = static_cast<std::uint8_t>(bytes_[i / 5] + values[i] * pow3[i % 5]);
    }
}

std::uint8_t TritArray::get(std::uint64_t pos) const {
    if (pos < 1 || pos > len_) throw std::invalid_argument("trit position outside the array");
    std::uint64_t i = pos - 1;
    return kTrits.digit[bytes_[i / 5]][i % 5];
}

void TritArray::decode(std::uint64_t pos, std::uint64_t count, std::uint8_t* out) const {
    if (count == 0) return;
    if (pos < 1 || pos + count - 1 > len_) throw std::invalid_argument("trit range outside the array");
    std::uint64_t i = pos - 1;
    for (std::uint64_t k = 0; k < count; ++k, ++i) out[k] = kTrits.digit[bytes_[i / 5]][i % 5];
}

void TritArray::save(std::ostream& os) const {
    wire::put_u64(os, len_);
    wire::put_u64(os, bytes_.size());
    os.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
}

TritArray TritArray::load(std::istream& is) {
    TritArray t;
    t.len_ = wire::get_u64(is);
    std::uint64_t nb = wire::get_u64(is);
    t.bytes_.resize(nb);
    if (nb && !is.read(reinterpret_cast<char*>(t.bytes_.data()), static_cast<std::streamsize>(nb)))
        throw std::runtime_error("unexpected end of stream");
    return t;
}

}  // namespace snlv
