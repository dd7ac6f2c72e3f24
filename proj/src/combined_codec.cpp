#include "snlv/combined_codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "snlv/wire.hpp"

namespace snlv {

namespace {

constexpr std::uint64_t kSampleEvery = 64;  // absolute start sample spacing, in blocks

bool side_flag(Side s) { return s == Side::Min; }  // u bit that makes a gap live in this tree

std::uint64_t bit_width_for(std::uint64_t maxval) {
    return std::max<std::uint64_t>(1, std::bit_width(maxval));
}

// version counters for the thread-local block cache; bumped by test hooks
std::uint64_t& cache_epoch(const void* enc) {
    static thread_local std::uint64_t dummy = 0;
    (void)enc;
    return dummy;
}

struct CacheEntry {
    const void* enc = nullptr;
    int side = -1;
    int layer = -1;
    std::uint64_t block = 0;
    std::uint64_t epoch = 0;
    std::vector<bool> bits;
};

thread_local std::array<CacheEntry, 4> t_cache;

}  // namespace

// ---------------------------------------------------------------- pure ops

std::vector<bool> g_expand(const std::vector<bool>& u, const std::vector<std::uint8_t>& d,
                           const std::vector<bool>& e, bool b) {
    std::vector<bool> out;
    std::size_t ui = 0, ei = 0;
    while (ui < u.size() && ui < d.size()) {
        bool uv = u[ui];
        std::uint8_t dv = d[ui];
        if (uv != b) {
            if (dv == 2) {  // the other tree's long run: skip one chunk of e
                while (ei < e.size() && e[ei]) ++ei;
                if (ei >= e.size()) return out;  // chunk truncated: stop here
                ++ei;
            }
            out.push_back(false);
            ++ui;
        } else if (dv == 0) {
            out.push_back(true);
            out.push_back(false);
            ++ui;
        } else if (dv == 1) {
            out.push_back(true);
            out.push_back(true);
            out.push_back(false);
            ++ui;
        } else {
            out.push_back(true);
            out.push_back(true);
            out.push_back(true);
            while (ei < e.size() && e[ei]) {
                out.push_back(true);
                ++ei;
            }
            if (ei >= e.size()) return out;  // emitted the partial ones; inputs exhausted
            out.push_back(false);
            ++ei;
            ++ui;
        }
    }
    return out;
}

std::vector<bool> h_expand(const std::vector<bool>& b, const std::vector<bool>& c) {
    std::vector<bool> out;
    std::size_t bi = 0, ci = 0;
    while (ci < c.size()) {
        if (c[ci]) {
            out.push_back(true);
            out.push_back(false);
            ++ci;
            continue;
        }
        // copy one run of b up to and including its 0
        while (bi < b.size() && b[bi]) {
            out.push_back(true);
            ++bi;
        }
        if (bi >= b.size()) return out;  // b = 1^t with c pending: emitted the ones
        out.push_back(false);
        ++bi;
        ++ci;
    }
    while (bi < b.size()) {  // c exhausted: stream the rest of b
        out.push_back(b[bi]);
        ++bi;
    }
    return out;
}

std::vector<bool> repeat_marks(std::span<const std::int64_t> a) {
    std::vector<bool> c(a.size(), false);
    for (std::size_t i = 1; i < a.size(); ++i) c[i] = a[i] == a[i - 1];
    return c;
}

std::vector<std::int64_t> drop_repeats(std::span<const std::int64_t> a) {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (i == 0 || a[i] != a[i - 1]) out.push_back(a[i]);
    return out;
}

// ---------------------------------------------------------------- encode

CombinedEncoding CombinedEncoding::encode(const std::vector<bool>& bp_min,
                                          const std::vector<bool>& bp_max,
                                          const std::vector<bool>& c_min,
                                          const std::vector<bool>& c_max,
                                          std::uint32_t block_bits) {
    if (bp_min.size() != bp_max.size() || bp_min.size() < 4 || bp_min.size() % 2 != 0)
        throw std::invalid_argument("parentheses sequences must have equal even length >= 4");
    if (block_bits < 8 || (block_bits & (block_bits - 1)) != 0)
        throw std::invalid_argument("block size must be a power of two >= 8");

    const std::uint64_t np = bp_min.size() / 2 - 1;  // array entries
    CombinedEncoding enc;
    enc.block_bits_ = block_bits;
    enc.n_ = np;
    enc.n_prime_ = np;

    std::vector<bool> ubits;
    std::vector<std::uint8_t> dvals;
    std::vector<bool> ebits;
    ubits.reserve(np ? np - 1 : 0);
    dvals.reserve(np ? np - 1 : 0);

    // cursors at f(i) in each sequence; node 1 opens at position 2 in both
    std::uint64_t fm = 2, fx = 2;
    auto next_zero = [](const std::vector<bool>& bp, std::uint64_t from) {
        std::uint64_t p = from;  // 1-indexed
        while (p <= bp.size() && bp[p - 1]) ++p;
        return p;
    };
    if (np >= 1 && (bp_min[1] || bp_max[1]))
        throw std::invalid_argument("node 1 must open at position 2 in both sequences");

    for (std::uint64_t i = 1; i + 1 <= np; ++i) {
        std::uint64_t nm = next_zero(bp_min, fm + 1);
        std::uint64_t nx = next_zero(bp_max, fx + 1);
        bool min_steps = nm == fm + 1;
        bool max_steps = nx == fx + 1;
        if (min_steps == max_steps)
            throw std::invalid_argument("sequences are not a distinct-adjacent min/max pair");
        ubits.push_back(min_steps ? false : true);  // 0: the min tree is node i's internal tree
        std::uint64_t k = min_steps ? (nx - fx - 1) : (nm - fm - 1);
        assert(k >= 1);
        if (k == 1) {
            dvals.push_back(0);
        } else if (k == 2) {
            dvals.push_back(1);
        } else {
            dvals.push_back(2);
            for (std::uint64_t t = 0; t + 3 < k; ++t) ebits.push_back(true);
            ebits.push_back(false);
        }
        fm = nm;
        fx = nx;
    }
    enc.f_end_[0] = fm;
    enc.f_end_[1] = fx;

    std::vector<bool> cmm(c_min);
    cmm.insert(cmm.end(), c_max.begin(), c_max.end());
    enc.c_split_ = c_min.size();

    enc.u_ = BitVector::from_bools(ubits);
    enc.d_ = TritArray(dvals);
    enc.e_ = BitVector::from_bools(ebits);
    enc.cmm_ = BitVector::from_bools(cmm);
    enc.finish_build();
    return enc;
}

CombinedEncoding CombinedEncoding::encode_general(std::span<const std::int64_t> a,
                                                  std::uint32_t block_bits) {
    if (a.empty()) throw std::invalid_argument("array must be non-empty");
    std::vector<bool> cbits = repeat_marks(a);
    std::vector<std::int64_t> core = drop_repeats(a);

    ColoredHeap hmin = build_colored_heap(core, HeapKind::Min);
    ColoredHeap hmax = build_colored_heap(core, HeapKind::Max);
    CombinedEncoding enc = encode(hmin.bp, hmax.bp, hmin.color_array(), hmax.color_array(),
                                  block_bits);
    bool any_repeat = core.size() != a.size();
    if (any_repeat) {
        enc.general_ = true;
        enc.n_ = a.size();
        enc.c_ = BitVector::from_bools(cbits);
        enc.finish_build();  // adds the re-expansion directories
    }
    return enc;
}

// ---------------------------------------------------------------- core walk

std::vector<bool> CombinedEncoding::generate_core_b(Side s) const {
    const bool b = side_flag(s);
    std::vector<bool> out;
    out.reserve(f_end_[static_cast<int>(s)]);
    out.push_back(false);  // node 1 opens first
    std::uint64_t epos = 1;
    const std::uint64_t gaps = n_prime_ ? n_prime_ - 1 : 0;
    for (std::uint64_t gap = 1; gap <= gaps; ++gap) {
        bool uv = u_.get(gap);
        std::uint8_t dv = d_.get(gap);
        if (uv == b) {
            if (dv == 0) {
                out.push_back(true);
            } else if (dv == 1) {
                out.push_back(true);
                out.push_back(true);
            } else {
                out.push_back(true);
                out.push_back(true);
                out.push_back(true);
                while (e_.get(epos)) {
                    out.push_back(true);
                    ++epos;
                }
                ++epos;
            }
            out.push_back(false);
        } else {
            if (dv == 2) {
                while (e_.get(epos)) ++epos;
                ++epos;
            }
            out.push_back(false);
        }
    }
    assert(out.size() == f_end_[static_cast<int>(s)] - 1);
    return out;
}

void CombinedEncoding::build_side_dir(Side s, const std::vector<bool>& b) {
    const std::uint32_t w = block_bits_;
    const bool bflag = side_flag(s);
    SideDir dir;
    dir.fprime = b.size();
    dir.nblocks = (b.size() + w - 1) / w;

    std::vector<std::uint64_t> gap_start(dir.nblocks + 2, 1);
    std::vector<std::uint64_t> e_start(dir.nblocks + 2, 1);

    // chunk walk recording the containing gap and E cursor at each block start
    {
        std::uint64_t pos = 1;  // last emitted position; B[1] is the node-1 open
        std::uint64_t epos = 1;
        const std::uint64_t gaps = n_prime_ ? n_prime_ - 1 : 0;
        auto record = [&](std::uint64_t gap, std::uint64_t chunk_end, bool our_d2,
                          std::uint64_t echunk_end, std::uint64_t enext) {
            // block starts inside (pos, chunk_end]
            std::uint64_t first_block = pos / w + 2;  // first block whose start > pos
            for (std::uint64_t blk = first_block; (blk - 1) * w + 1 <= chunk_end; ++blk) {
                std::uint64_t p = (blk - 1) * w + 1;
                gap_start[blk] = gap;
                if (our_d2) {
                    std::uint64_t jprime = chunk_end - p;  // ones remaining from p
                    e_start[blk] = echunk_end - (jprime > 3 ? jprime - 3 : 0);
                } else {
                    e_start[blk] = enext;
                }
            }
        };
        for (std::uint64_t gap = 1; gap <= gaps; ++gap) {
            bool uv = u_.get(gap);
            std::uint8_t dv = d_.get(gap);
            std::uint64_t echunk_end = 0;
            if (dv == 2) {
                echunk_end = epos;
                while (e_.get(echunk_end)) ++echunk_end;
            }
            if (uv == bflag) {
                std::uint64_t k = dv == 0 ? 1 : dv == 1 ? 2 : 3 + (echunk_end - epos);
                record(gap, pos + k + 1, dv == 2, echunk_end, epos);
                pos += k + 1;
            } else {
                record(gap, pos + 1, false, 0, dv == 2 ? echunk_end : epos);
                pos += 1;
            }
            if (dv == 2) epos = echunk_end + 1;
        }
        assert(pos == dir.fprime);
    }
    // other-tree long chunks at a block start need the chunk-end position
    // (handled above by passing echunk_end as enext for the skip case)

    // leading-ones class per block
    dir.r_class = PackedArray(2);
    for (std::uint64_t blk = 1; blk <= dir.nblocks; ++blk) {
        std::uint64_t p = (blk - 1) * w;  // 0-indexed start
        std::uint64_t hi = std::min<std::uint64_t>(blk * w, b.size());
        std::uint64_t lead = 0;
        while (p < hi && b[p] && lead < 3) {
            ++lead;
            ++p;
        }
        dir.r_class.push_back(lead);
    }

    // pack starts as deltas with periodic absolute samples
    const unsigned gap_w = static_cast<unsigned>(bit_width_for(w));
    const std::uint64_t e_span_cap = 9ull * w;
    const unsigned e_w = static_cast<unsigned>(bit_width_for(e_span_cap) + 1);
    const std::uint64_t e_escape_val = (std::uint64_t{1} << e_w) - 1;
    dir.gap_delta = PackedArray(gap_w);
    dir.e_delta = PackedArray(e_w);
    for (std::uint64_t blk = 1; blk <= dir.nblocks; ++blk) {
        if ((blk - 1) % kSampleEvery == 0) {
            dir.gap_sample.push_back(gap_start[blk]);
            dir.e_sample.push_back(e_start[blk]);
        }
        if (blk == 1) {
            dir.gap_delta.push_back(0);
            dir.e_delta.push_back(0);
            continue;
        }
        std::uint64_t gd = gap_start[blk] - gap_start[blk - 1];
        std::uint64_t ed = e_start[blk] - e_start[blk - 1];
        dir.gap_delta.push_back(gd);
        if (ed >= e_escape_val) {
            dir.e_delta.push_back(e_escape_val);
            dir.e_escape.emplace_back(static_cast<std::uint32_t>(blk), e_start[blk]);
        } else {
            dir.e_delta.push_back(ed);
        }
    }

    dir_[static_cast<int>(s)] = std::move(dir);

    // classify bad blocks and extract the bits their decode actually touches
    SideDir& d2 = dir_[static_cast<int>(s)];
    for (std::uint64_t blk = 1; blk <= d2.nblocks; ++blk) {
        std::uint64_t span_end =
            blk < d2.nblocks ? e_start[blk + 1] : e_.size() + 1;
        std::uint64_t span = span_end - e_start[blk] + 1;
        if (span >= e_span_cap) {
            std::vector<bool> fb;
            decode_core_block_impl(s, blk, &fb);
            d2.f_index.emplace_back(static_cast<std::uint32_t>(blk), d2.f_bits.size());
            d2.f_bits.insert(d2.f_bits.end(), fb.begin(), fb.end());
        }
    }
}

std::uint64_t CombinedEncoding::SideDir::gap_start(std::uint64_t block) const {
    std::uint64_t k = (block - 1) / kSampleEvery;
    std::uint64_t s = gap_sample[k];
    for (std::uint64_t t = k * kSampleEvery + 2; t <= block; ++t) s += gap_delta.get(t - 1);
    return s;
}

std::uint64_t CombinedEncoding::SideDir::e_start(std::uint64_t block) const {
    std::uint64_t k = (block - 1) / kSampleEvery;
    std::uint64_t s = e_sample[k];
    const std::uint64_t escape = (std::uint64_t{1} << e_delta.width()) - 1;
    for (std::uint64_t t = k * kSampleEvery + 2; t <= block; ++t) {
        std::uint64_t dv = e_delta.get(t - 1);
        if (dv == escape) {
            auto it = std::lower_bound(e_escape.begin(), e_escape.end(),
                                       std::make_pair(static_cast<std::uint32_t>(t), std::uint64_t{0}));
            assert(it != e_escape.end() && it->first == t);
            s = it->second;
        } else {
            s += dv;
        }
    }
    return s;
}

std::uint64_t CombinedEncoding::SideDir::bits() const {
    return gap_delta.storage_bits() + e_delta.storage_bits() + r_class.storage_bits() +
           (gap_sample.size() + e_sample.size()) * 64 + e_escape.size() * 96 + f_bits.size() +
           f_index.size() * 96;
}

// ---------------------------------------------------------------- core decode

std::vector<bool> CombinedEncoding::decode_core_block_impl(Side s, std::uint64_t block,
                                                           std::vector<bool>* f_record) const {
    const SideDir& dir = dir_[static_cast<int>(s)];
    if (block < 1 || block > dir.nblocks) throw std::invalid_argument("block outside the sequence");
    const std::uint32_t w = block_bits_;
    const bool bflag = side_flag(s);
    const std::uint64_t lo = (block - 1) * w + 1;
    const std::uint64_t hi = std::min<std::uint64_t>(block * w, dir.fprime);
    const std::uint64_t need = hi - lo + 1;

    // E supplier: raw bits, or the stored extract for bad blocks
    const std::vector<bool>* fsrc = nullptr;
    std::uint64_t fpos = 0;
    if (f_record == nullptr) {
        auto it = std::lower_bound(dir.f_index.begin(), dir.f_index.end(),
                                   std::make_pair(static_cast<std::uint32_t>(block), std::uint64_t{0}));
        if (it != dir.f_index.end() && it->first == block) {
            fsrc = &dir.f_bits;
            fpos = it->second;
        }
    }
    std::uint64_t epos = block == 1 ? 1 : dir.e_start(block);
    auto e_next = [&]() -> bool {
        if (fsrc) return (*fsrc)[fpos++];
        bool bit = e_.get(epos);
        ++epos;
        return bit;
    };

    std::vector<bool> out;
    out.reserve(need + 4);
    std::uint64_t gap;
    if (block == 1) {
        out.push_back(false);  // B[1]: the node-1 open
        gap = 1;
    } else {
        gap = dir.gap_start(block);
    }

    const std::uint64_t gaps = n_prime_ ? n_prime_ - 1 : 0;
    bool first_chunk = block > 1;
    while (out.size() < need + 3 && gap <= gaps) {
        bool uv = u_.get(gap);
        std::uint8_t dv = d_.get(gap);
        if (uv == bflag) {
            std::uint64_t ones = dv == 0 ? 1 : dv == 1 ? 2 : 3;
            for (std::uint64_t t = 0; t < ones; ++t) out.push_back(true);
            if (dv == 2) {
                while (true) {
                    bool bit = e_next();
                    if (f_record) f_record->push_back(bit);
                    if (!bit) break;
                    out.push_back(true);
                }
            }
            out.push_back(false);
        } else {
            if (dv == 2) {
                while (e_next()) {
                    if (fsrc == nullptr && f_record == nullptr) continue;
                    // raw ones of a skipped chunk never enter the extract
                }
                if (f_record) f_record->push_back(false);
            }
            out.push_back(false);
        }
        ++gap;
        if (first_chunk) {
            first_chunk = false;
            std::uint64_t lead = 0;
            while (lead < out.size() && out[lead]) ++lead;
            std::uint64_t rc = dir.r_class.get(block - 1);
            if (rc <= 2) {
                assert(lead >= rc);
                out.erase(out.begin(), out.begin() + (lead - rc));
            }
        }
    }
    assert(out.size() >= need);
    out.resize(need);
    return out;
}

std::vector<bool> CombinedEncoding::decode_block(Side s, std::uint64_t block) const {
    return decode_core_block_impl(s, block, nullptr);
}

// ---------------------------------------------------------------- general layer

const std::vector<bool>& CombinedEncoding::core_block_cached(Side s, std::uint64_t block) const {
    CacheEntry& ce = t_cache[block & 3];
    if (ce.enc != this || ce.side != static_cast<int>(s) || ce.layer != 0 || ce.block != block ||
        ce.epoch != epoch_) {
        ce.enc = this;
        ce.side = static_cast<int>(s);
        ce.layer = 0;
        ce.block = block;
        ce.epoch = epoch_;
        ce.bits = decode_block(s, block);
    }
    return ce.bits;
}

bool CombinedEncoding::core_bp_bit(Side s, std::uint64_t pos) const {
    // full core sequence: 0 . B . 1^(2(n'+1) - f_end)
    if (pos == 1) return false;
    if (pos > f_end_[static_cast<int>(s)]) return true;
    std::uint64_t bpos = pos - 1;  // position in B
    std::uint64_t block = (bpos - 1) / block_bits_ + 1;
    const std::vector<bool>& bits = core_block_cached(s, block);
    return bits[(bpos - 1) % block_bits_];
}

void CombinedEncoding::build_general_dir(Side s, const std::vector<bool>& bcore_full) {
    const std::uint32_t w = block_bits_;
    GeneralDir gd;
    gd.blen = 2 * (n_ + 1);
    gd.nblocks = (gd.blen + w - 1) / w;

    std::vector<std::uint64_t> bstart(gd.nblocks + 1, 1);
    std::vector<std::uint64_t> cstart(gd.nblocks + 1, 1);
    std::vector<bool> first_zero(gd.nblocks + 1, false);

    // regenerate the full sequence, snapshotting the stream state at block starts
    std::vector<bool> bfull;
    bfull.reserve(gd.blen);
    std::uint64_t bpos = 2, cpos = 1;
    auto note = [&](std::uint64_t p, std::uint64_t bp, std::uint64_t cp) {
        if ((p - 1) % w == 0) {
            std::uint64_t blk = (p - 1) / w + 1;
            bstart[blk] = bp;
            cstart[blk] = cp;
        }
    };
    note(1, 1, 1);  // block 1 is decoded with fixed state anyway
    bfull.push_back(false);
    while (bfull.size() < gd.blen) {
        if (cpos <= n_ && c_.get(cpos)) {
            note(bfull.size() + 1, bpos, cpos);
            bfull.push_back(true);
            note(bfull.size() + 1, bpos, cpos);
            bfull.push_back(false);
            ++cpos;
        } else if (cpos <= n_) {
            while (bcore_full[bpos - 1]) {
                note(bfull.size() + 1, bpos, cpos);
                bfull.push_back(true);
                ++bpos;
            }
            note(bfull.size() + 1, bpos, cpos);
            bfull.push_back(false);
            ++bpos;
            ++cpos;
        } else {
            note(bfull.size() + 1, bpos, n_ + 1);
            bfull.push_back(true);
            ++bpos;
        }
    }
    for (std::uint64_t blk = 1; blk <= gd.nblocks; ++blk)
        first_zero[blk] = !bfull[(blk - 1) * w];

    // mark arrays with duplicate flags, paper-style
    std::vector<bool> mb(2 * (n_prime_ + 1), false);
    std::vector<bool> mbd(gd.nblocks, false);
    std::vector<bool> mc(n_ + 1, false);
    std::vector<bool> mcd(gd.nblocks, false);
    std::vector<bool> fz(gd.nblocks, false);
    for (std::uint64_t blk = 1; blk <= gd.nblocks; ++blk) {
        mb[bstart[blk] - 1] = true;
        mc[cstart[blk] - 1] = true;
        mbd[blk - 1] = blk > 1 && bstart[blk] == bstart[blk - 1];
        mcd[blk - 1] = blk > 1 && cstart[blk] == cstart[blk - 1];
        fz[blk - 1] = first_zero[blk];
    }
    gd.m_bprime = BitVector::from_bools(mb);
    gd.m_bprime_dup = BitVector::from_bools(mbd);
    gd.m_c = BitVector::from_bools(mc);
    gd.m_c_dup = BitVector::from_bools(mcd);
    gd.first_bit_zero = BitVector::from_bools(fz);
    gdir_[static_cast<int>(s)] = std::move(gd);
}

std::uint64_t CombinedEncoding::GeneralDir::bprime_start(std::uint64_t block) const {
    std::uint64_t fresh = block - m_bprime_dup.rank1(block);  // non-duplicate blocks up to here
    return m_bprime.select1(fresh);
}

std::uint64_t CombinedEncoding::GeneralDir::c_start(std::uint64_t block) const {
    std::uint64_t fresh = block - m_c_dup.rank1(block);
    return m_c.select1(fresh);
}

std::uint64_t CombinedEncoding::GeneralDir::bits() const {
    return m_bprime.bits() + m_bprime_dup.bits() + m_c.bits() + m_c_dup.bits() +
           first_bit_zero.bits();
}

std::vector<bool> CombinedEncoding::decode_block_general(Side s, std::uint64_t block) const {
    if (!general_) return decode_block(s, block);
    const GeneralDir& gd = gdir_[static_cast<int>(s)];
    if (block < 1 || block > gd.nblocks) throw std::invalid_argument("block outside the sequence");
    const std::uint32_t w = block_bits_;
    const std::uint64_t lo = (block - 1) * w + 1;
    const std::uint64_t hi = std::min<std::uint64_t>(block * w, gd.blen);
    const std::uint64_t need = hi - lo + 1;

    std::vector<bool> out;
    out.reserve(need + 2);
    std::uint64_t bpos, cpos;
    bool drop_first = false;
    if (block == 1) {
        out.push_back(false);
        bpos = 2;
        cpos = 1;
    } else {
        bpos = gd.bprime_start(block);
        cpos = gd.c_start(block);
        drop_first = gd.first_bit_zero.get(block) && cpos <= n_ && c_.get(cpos);
    }
    const std::uint64_t want = need + (drop_first ? 1 : 0);
    const std::uint64_t core_len = 2 * (n_prime_ + 1);
    while (out.size() < want) {
        if (cpos <= n_ && c_.get(cpos)) {
            out.push_back(true);
            out.push_back(false);
            ++cpos;
        } else if (cpos <= n_) {
            while (bpos <= core_len && core_bp_bit(s, bpos)) {
                out.push_back(true);
                ++bpos;
                if (out.size() >= want) break;
            }
            if (out.size() >= want) break;
            out.push_back(false);
            ++bpos;
            ++cpos;
        } else {
            out.push_back(true);
            ++bpos;
        }
    }
    if (drop_first) out.erase(out.begin());
    out.resize(need);
    return out;
}

// ---------------------------------------------------------------- assembly

void CombinedEncoding::finish_build() {
    ++epoch_;
    for (Side s : {Side::Min, Side::Max}) {
        std::vector<bool> b = generate_core_b(s);
        build_side_dir(s, b);
        if (general_) {
            std::vector<bool> bcore_full;
            bcore_full.reserve(core_bp_length());
            bcore_full.push_back(false);
            bcore_full.insert(bcore_full.end(), b.begin(), b.end());
            bcore_full.resize(core_bp_length(), true);
            build_general_dir(s, bcore_full);
        }
    }
}

VirtualBp::VirtualBp(const CombinedEncoding& enc, Side side, Layer layer)
    : enc_(&enc), side_(side), layer_(layer) {
    len_ = layer == Layer::Core ? enc.core_bp_length() : enc.full_bp_length();
}

std::uint64_t VirtualBp::word(std::uint64_t pos, unsigned w) const {
    if (w == 0 || w > 64 || pos < 1 || pos + w - 1 > len_)
        throw std::invalid_argument("word range outside the sequence");
    std::uint64_t out = 0;
    for (unsigned k = 0; k < w; ++k) {
        bool bit;
        std::uint64_t p = pos + k;
        if (layer_ == Layer::Core || !enc_->general()) {
            bit = enc_->core_bp_bit(side_, p);
        } else {
            bit = enc_->full_bp_bit(side_, p);
        }
        if (bit) out |= std::uint64_t{1} << k;
    }
    return out;
}

bool CombinedEncoding::full_bp_bit(Side s, std::uint64_t pos) const {
    if (!general_) return core_bp_bit(s, pos);
    const GeneralDir& gd = gdir_[static_cast<int>(s)];
    std::uint64_t block = (pos - 1) / block_bits_ + 1;
    CacheEntry& ce = t_cache[(block & 1) | 2];  // separate slots from the core layer
    if (ce.enc != this || ce.side != static_cast<int>(s) || ce.layer != 1 || ce.block != block ||
        ce.epoch != epoch_) {
        ce.enc = this;
        ce.side = static_cast<int>(s);
        ce.layer = 1;
        ce.block = block;
        ce.epoch = epoch_;
        ce.bits = decode_block_general(s, block);
    }
    (void)gd;
    return ce.bits[(pos - 1) % block_bits_];
}

// ---------------------------------------------------------------- space

std::uint64_t CombinedEncoding::SpaceReport::core_bits() const {
    std::uint64_t t = 0;
    for (const auto& c : components)
        if (c.group == "core") t += c.bits;
    return t;
}

std::uint64_t CombinedEncoding::SpaceReport::directory_bits() const {
    std::uint64_t t = 0;
    for (const auto& c : components)
        if (c.group == "directory") t += c.bits;
    return t;
}

double CombinedEncoding::SpaceReport::info_core_bits() const { return info_core_reference; }

CombinedEncoding::SpaceReport CombinedEncoding::space_report() const {
    SpaceReport r;
    r.n = n_;
    r.n_prime = n_prime_;
    auto add = [&](std::string name, std::string group, std::uint64_t bits) {
        r.components.push_back(SpaceComponent{std::move(name), std::move(group), bits});
    };
    add("U", "core", u_.size());
    add("D", "core", d_.storage_bits());
    add("E", "core", e_.size());
    add("c_minmax", "core", cmm_.size());
    add("f_end_values", "core", 128);
    if (general_) add("C", "core", c_.size());

    const char* side_name[2] = {"min", "max"};
    for (int s = 0; s < 2; ++s) {
        const SideDir& d = dir_[s];
        add(std::string("blocks_") + side_name[s] + "_starts",
            "directory", d.gap_delta.storage_bits() + d.e_delta.storage_bits() +
                             (d.gap_sample.size() + d.e_sample.size()) * 64 +
                             d.e_escape.size() * 96);
        add(std::string("blocks_") + side_name[s] + "_runclass", "directory",
            d.r_class.storage_bits());
        add(std::string("blocks_") + side_name[s] + "_bad_extracts", "directory",
            d.f_bits.size() + d.f_index.size() * 96);
        if (general_) {
            const GeneralDir& g = gdir_[s];
            add(std::string("expand_") + side_name[s] + "_marks", "directory", g.bits());
        }
    }
    // entropy-coded reference for the same content
    double info = 3.585 * static_cast<double>(n_prime_);
    if (general_) {
        double k = static_cast<double>(n_ - n_prime_);
        double n = static_cast<double>(n_);
        info = 3.585 * (n - k);
        if (k > 0 && k < n)
            info += (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) /
                    std::log(2.0);
    }
    r.info_core_reference = info;
    return r;
}

// ---------------------------------------------------------------- io

namespace {
constexpr std::uint32_t kMagic = 0x564C4E53u;  // "SNLV"
}

void CombinedEncoding::save(std::ostream& os) const {
    wire::put_u32(os, kMagic);
    wire::put_u16(os, 1);
    wire::put_u8(os, general_ ? 1 : 0);
    wire::put_u8(os, 0);
    wire::put_u32(os, block_bits_);
    wire::put_u64(os, n_);
    wire::put_u64(os, n_prime_);
    wire::put_u64(os, c_split_);
    wire::put_u64(os, f_end_[0]);
    wire::put_u64(os, f_end_[1]);
    u_.save(os);
    d_.save(os);
    e_.save(os);
    cmm_.save(os);
    if (general_) c_.save(os);
}

CombinedEncoding CombinedEncoding::load(std::istream& is) {
    if (wire::get_u32(is) != kMagic) throw std::runtime_error("bad index magic");
    if (wire::get_u16(is) != 1) throw std::runtime_error("unsupported index version");
    CombinedEncoding enc;
    enc.general_ = wire::get_u8(is) != 0;
    wire::get_u8(is);
    enc.block_bits_ = wire::get_u32(is);
    enc.n_ = wire::get_u64(is);
    enc.n_prime_ = wire::get_u64(is);
    enc.c_split_ = wire::get_u64(is);
    enc.f_end_[0] = wire::get_u64(is);
    enc.f_end_[1] = wire::get_u64(is);
    enc.u_ = BitVector::load(is);
    enc.d_ = TritArray::load(is);
    enc.e_ = BitVector::load(is);
    enc.cmm_ = BitVector::load(is);
    if (enc.general_) enc.c_ = BitVector::load(is);
    enc.finish_build();
    return enc;
}

void CombinedEncoding::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    save(os);
}

CombinedEncoding CombinedEncoding::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load(is);
}

void CombinedEncoding::corrupt_e_bit_for_test(std::uint64_t pos) {
    std::vector<bool> bits(e_.size());
    for (std::uint64_t i = 1; i <= e_.size(); ++i) bits[i - 1] = e_.get(i);
    if (pos < 1 || pos > bits.size()) throw std::invalid_argument("no such bit in E");
    bits[pos - 1] = !bits[pos - 1];
    e_ = BitVector::from_bools(bits);
    finish_build();
}

}  // namespace snlv
