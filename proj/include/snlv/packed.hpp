#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace snlv {

/// Fixed-width bit-packed integer array (width 0..64). Width 0 stores only zeros.
class PackedArray {
public:
    PackedArray() = default;
    explicit PackedArray(unsigned width) : width_(width) {
        if (width > 64) throw std::invalid_argument("width must be <= 64");
    }

    void push_back(std::uint64_t v) {
        if (width_ < 64 && v >> width_)
            throw std::invalid_argument("value exceeds the packed width");
        std::uint64_t bit = size_ * width_;
        std::uint64_t need = (bit + width_ + 63) / 64;
        if (words_.size() < need) words_.resize(need, 0);
        if (width_) {
            std::uint64_t wi = bit >> 6, off = bit & 63;
            words_[wi] |= v << off;
            if (off + width_ > 64) words_[wi + 1] |= v >> (64 - off);
        }
        ++size_;
    }

    std::uint64_t get(std::uint64_t i) const {
        if (i >= size_) throw std::out_of_range("packed index");
        if (width_ == 0) return 0;
        std::uint64_t bit = i * width_;
        std::uint64_t wi = bit >> 6, off = bit & 63;
        std::uint64_t v = words_[wi] >> off;
        if (off + width_ > 64) v |= words_[wi + 1] << (64 - off);
        return width_ == 64 ? v : (v & ((std::uint64_t{1} << width_) - 1));
    }

    std::uint64_t size() const { return size_; }
    unsigned width() const { return width_; }
    std::uint64_t storage_bits() const { return words_.size() * 64; }

private:
    unsigned width_ = 0;
    std::uint64_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace snlv
