#include "lightrng/bitvec.hpp"

#include <bit>

#include "lightrng/errors.hpp"

namespace lightrng {

namespace {

std::size_t word_count(std::size_t nbits) {
    return (nbits + 63) / 64;
}

} // namespace

BitVec::BitVec(std::size_t nbits) : words_(word_count(nbits), 0), size_(nbits) {}

BitVec BitVec::from_string(std::string_view bits) {
    BitVec out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            out.set(i, true);
        } else if (bits[i] != '0') {
            throw ParseError("BitVec::from_string: characters must be '0' or '1'");
        }
    }
    return out;
}

BitVec BitVec::from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) {
        throw ContractError("BitVec::from_bytes: byte stream shorter than requested bit count");
    }
    BitVec out(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
        if ((bytes[i / 8] >> (7 - i % 8)) & 1U) {
            out.set(i, true);
        }
    }
    return out;
}

bool BitVec::get(std::size_t i) const {
    if (i >= size_) {
        throw ContractError("BitVec::get: index out of range");
    }
    return (words_[i / 64] >> (i % 64)) & 1ULL;
}

void BitVec::set(std::size_t i, bool value) {
    if (i >= size_) {
        throw ContractError("BitVec::set: index out of range");
    }
    const std::uint64_t mask = 1ULL << (i % 64);
    if (value) {
        words_[i / 64] |= mask;
    } else {
        words_[i / 64] &= ~mask;
    }
}

void BitVec::append(bool bit) {
    if (size_ % 64 == 0) {
        words_.push_back(0);
    }
    ++size_;
    if (bit) {
        words_[(size_ - 1) / 64] |= 1ULL << ((size_ - 1) % 64);
    }
}

void BitVec::append_bits(std::uint64_t value, int width) {
    if (width < 0 || width > 64) {
        throw ContractError("BitVec::append_bits: width must lie in [0, 64]");
    }
    for (int b = width - 1; b >= 0; --b) {
        append((value >> b) & 1ULL);
    }
}

std::uint64_t BitVec::window64(std::size_t pos) const {
    const std::size_t q = pos / 64;
    const std::size_t r = pos % 64;
    std::uint64_t w = q < words_.size() ? words_[q] >> r : 0;
    if (r != 0 && q + 1 < words_.size()) {
        w |= words_[q + 1] << (64 - r);
    }
    return w;
}

BitVec BitVec::slice(std::size_t pos, std::size_t len) const {
    if (pos + len > size_) {
        throw ContractError("BitVec::slice: range out of bounds");
    }
    BitVec out(len);
    for (std::size_t w = 0; w < out.words_.size(); ++w) {
        out.words_[w] = window64(pos + 64 * w);
    }
    if (len % 64 != 0 && !out.words_.empty()) {
        out.words_.back() &= (1ULL << (len % 64)) - 1;
    }
    return out;
}

std::vector<std::uint8_t> BitVec::to_bytes() const {
    std::vector<std::uint8_t> bytes((size_ + 7) / 8, 0);
    for (std::size_t i = 0; i < size_; ++i) {
        if ((words_[i / 64] >> (i % 64)) & 1ULL) {
            bytes[i / 8] |= std::uint8_t(1U << (7 - i % 8));
        }
    }
    return bytes;
}

std::string BitVec::to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if ((words_[i / 64] >> (i % 64)) & 1ULL) {
            out[i] = '1';
        }
    }
    return out;
}

BitVec BitVec::reversed() const {
    BitVec out(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        if ((words_[i / 64] >> (i % 64)) & 1ULL) {
            out.set(size_ - 1 - i, true);
        }
    }
    return out;
}

BitVec& BitVec::operator^=(const BitVec& other) {
    if (size_ != other.size_) {
        throw ContractError("BitVec::operator^=: length mismatch");
    }
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] ^= other.words_[w];
    }
    return *this;
}

std::size_t BitVec::popcount() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) {
        total += std::size_t(std::popcount(w));
    }
    return total;
}

} // namespace lightrng
