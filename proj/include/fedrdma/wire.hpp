#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>

#include "fedrdma/result.hpp"

namespace fedrdma {

// Chunk header wire layout, 32 bytes, little-endian, fixed field order:
//
//   offset  size  field
//   0       4     magic             ASCII "FRDM"
//   4       2     version           = 1
//   6       2     flags             bit0 = carries-total, bit1 = primer chunk
//   8       4     seq               1-based chunk index
//   12      4     total             total chunk count
//   16      4     payload_len       payload bytes in this chunk
//   20      8     total_payload_len payload bytes in the whole transfer
//   28      4     payload_crc32     CRC-32 of this chunk's payload
//                                   (whole-payload CRC when the header frames
//                                   an entire in-place transfer)
//
// This layout is the only wire contract and must stay bit-exact.

inline constexpr std::size_t kHeaderSize = 32;
inline constexpr std::array<std::uint8_t, 4> kHeaderMagic = {0x46, 0x52, 0x44, 0x4D};  // "FRDM"
inline constexpr std::uint16_t kWireVersion = 1;

inline constexpr std::uint16_t kFlagCarriesTotal = 1u << 0;
inline constexpr std::uint16_t kFlagPrimer = 1u << 1;

struct ChunkHeader {
    std::uint16_t version = kWireVersion;
    std::uint16_t flags = 0;
    std::uint32_t seq = 0;
    std::uint32_t total = 0;
    std::uint32_t payload_len = 0;
    std::uint64_t total_payload_len = 0;
    std::uint32_t payload_crc32 = 0;

    friend bool operator==(const ChunkHeader&, const ChunkHeader&) = default;
};

enum class HeaderError {
    TooShort,
    InvalidMagic,
    InvalidVersion,
    InconsistentFields,
};

inline const char* to_string(HeaderError e) {
    switch (e) {
        case HeaderError::TooShort: return "TooShort";
        case HeaderError::InvalidMagic: return "InvalidMagic";
        case HeaderError::InvalidVersion: return "InvalidVersion";
        case HeaderError::InconsistentFields: return "InconsistentFields";
    }
    return "?";
}

namespace detail {

template <typename T>
void put_le(std::uint8_t* p, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        p[i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<T>(p[i]) << (8 * i);
    }
    return v;
}

}  // namespace detail

// Field-level consistency used by both decode and upstream validation.
// A multi-chunk plan cannot describe an empty transfer: ceil-splitting gives
// every chunk at least one byte, so total >= 2 forces a nonempty chunk and a
// total payload of at least `total` bytes. Zero or truncated header regions
// always fail here.
inline bool header_fields_consistent(const ChunkHeader& h) {
    if (h.total > 0 && (h.seq < 1 || h.seq > h.total)) return false;
    if (h.payload_len > h.total_payload_len) return false;
    if (h.total >= 2 && (h.payload_len == 0 || h.total_payload_len < h.total)) return false;
    return true;
}

inline std::array<std::uint8_t, kHeaderSize> encode_header(const ChunkHeader& h) {
    std::array<std::uint8_t, kHeaderSize> out{};
    std::memcpy(out.data(), kHeaderMagic.data(), 4);
    detail::put_le(out.data() + 4, h.version);
    detail::put_le(out.data() + 6, h.flags);
    detail::put_le(out.data() + 8, h.seq);
    detail::put_le(out.data() + 12, h.total);
    detail::put_le(out.data() + 16, h.payload_len);
    detail::put_le(out.data() + 20, h.total_payload_len);
    detail::put_le(out.data() + 28, h.payload_crc32);
    return out;
}

inline Result<ChunkHeader, HeaderError> decode_header(std::span<const std::uint8_t> b) {
    using R = Result<ChunkHeader, HeaderError>;
    if (b.size() < kHeaderSize) return R::err(HeaderError::TooShort);
    if (std::memcmp(b.data(), kHeaderMagic.data(), 4) != 0) return R::err(HeaderError::InvalidMagic);
    ChunkHeader h;
    h.version = detail::get_le<std::uint16_t>(b.data() + 4);
    if (h.version != kWireVersion) return R::err(HeaderError::InvalidVersion);
    h.flags = detail::get_le<std::uint16_t>(b.data() + 6);
    h.seq = detail::get_le<std::uint32_t>(b.data() + 8);
    h.total = detail::get_le<std::uint32_t>(b.data() + 12);
    h.payload_len = detail::get_le<std::uint32_t>(b.data() + 16);
    h.total_payload_len = detail::get_le<std::uint64_t>(b.data() + 20);
    h.payload_crc32 = detail::get_le<std::uint32_t>(b.data() + 28);
    if (!header_fields_consistent(h)) return R::err(HeaderError::InconsistentFields);
    return R::ok(h);
}

}  // namespace fedrdma
