#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lightrng {

/// Dynamically sized bit string with a fixed logical order: bit 0 is the
/// first bit of the stream.  Byte conversions place bit 0 in the most
/// significant position of byte 0, matching the on-disk stream format used
/// throughout (big-endian bit order within each fixed-width code).
///
/// Internally bits pack LSB-first into 64-bit words so that windowed reads
/// (`window64`) reduce to two shifts; bits past `size()` in the last word
/// are kept zero, making word-level comparisons and popcounts safe.
class BitVec {
public:
    BitVec() = default;

    /// Zero-filled vector of `nbits` bits.
    explicit BitVec(std::size_t nbits);

    /// Parse a string of '0'/'1' characters, first character = bit 0.
    static BitVec from_string(std::string_view bits);

    /// Unpack `nbits` bits from a byte stream, MSB of byte 0 first.
    static BitVec from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const;
    void set(std::size_t i, bool value);

    void append(bool bit);

    /// Append the low `width` bits of `value`, most significant first.
    void append_bits(std::uint64_t value, int width);

    /// 64 bits starting at logical offset `pos`, zero-padded past the end.
    std::uint64_t window64(std::size_t pos) const;

    /// Copy of bits [pos, pos + len).
    BitVec slice(std::size_t pos, std::size_t len) const;

    /// Pack to bytes, bit 0 in the MSB of byte 0; trailing bits zero-padded.
    std::vector<std::uint8_t> to_bytes() const;

    std::string to_string() const;

    BitVec reversed() const;

    /// XOR with a vector of identical length.
    BitVec& operator^=(const BitVec& other);

    std::size_t popcount() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const BitVec& other) const = default;

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

} // namespace lightrng
