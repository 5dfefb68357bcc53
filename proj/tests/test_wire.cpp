#include "fedrdma/wire.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fedrdma/crc32.hpp"

using namespace fedrdma;

TEST(Crc32, KnownVectors) {
    const std::uint8_t msg[] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
    EXPECT_EQ(crc32_of(msg), 0xCBF43926u);
    EXPECT_EQ(crc32_of({}), 0x00000000u);
}

TEST(Crc32, StreamingMatchesOneShot) {
    std::mt19937_64 rng(7);
    std::vector<std::uint8_t> data(4096 + 31);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    Crc32 c;
    c.update(std::span<const std::uint8_t>(data.data(), 100));
    c.update(std::span<const std::uint8_t>(data.data() + 100, data.size() - 100));
    EXPECT_EQ(c.finish(), crc32_of(data));
}

TEST(EncodeHeader, HandDerivedLayout) {
    ChunkHeader h;
    h.flags = kFlagCarriesTotal;
    h.seq = 1;
    h.total = 1;
    h.payload_len = 0;
    h.total_payload_len = 0;
    h.payload_crc32 = 0;
    const auto bytes = encode_header(h);
    // magic "FRDM", version 1 LE, flags bit0 LE
    const std::uint8_t expected_prefix[] = {0x46, 0x52, 0x44, 0x4D, 0x01, 0x00, 0x01, 0x00};
    for (std::size_t i = 0; i < sizeof(expected_prefix); ++i) {
        EXPECT_EQ(bytes[i], expected_prefix[i]) << "byte " << i;
    }
    // seq = 1 at offset 8, everything after zero
    EXPECT_EQ(bytes[8], 0x01);
    for (std::size_t i = 9; i < 12; ++i) EXPECT_EQ(bytes[i], 0x00);
    EXPECT_EQ(bytes[12], 0x01);  // total = 1
    for (std::size_t i = 13; i < kHeaderSize; ++i) EXPECT_EQ(bytes[i], 0x00);
}

TEST(EncodeHeader, LittleEndianSeq250) {
    ChunkHeader h;
    h.flags = kFlagCarriesTotal;
    h.seq = 250;
    h.total = 250;
    h.payload_len = 100;
    h.total_payload_len = 100;
    const auto bytes = encode_header(h);
    EXPECT_EQ(bytes[8], 0xFA);
    EXPECT_EQ(bytes[9], 0x00);
    EXPECT_EQ(bytes[10], 0x00);
    EXPECT_EQ(bytes[11], 0x00);
    EXPECT_EQ(bytes[12], 0xFA);  // total shares the encoding
}

TEST(DecodeHeader, RoundTrip) {
    ChunkHeader h;
    h.flags = kFlagCarriesTotal | kFlagPrimer;
    h.seq = 42;
    h.total = 250;
    h.payload_len = 4'000'000;
    h.total_payload_len = 1'000'000'000;
    h.payload_crc32 = 0xDEADBEEF;
    auto r = decode_header(encode_header(h));
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r.value(), h);
}

TEST(DecodeHeader, ZeroedRegionIsNotAHeader) {
    std::array<std::uint8_t, kHeaderSize> zeros{};
    auto r = decode_header(zeros);
    ASSERT_FALSE(r.has_value());
    EXPECT_EQ(r.error(), HeaderError::InvalidMagic);
}

TEST(DecodeHeader, TooShort) {
    std::array<std::uint8_t, kHeaderSize - 1> buf{};
    auto r = decode_header(buf);
    ASSERT_FALSE(r.has_value());
    EXPECT_EQ(r.error(), HeaderError::TooShort);
}

TEST(DecodeHeader, BadVersion) {
    ChunkHeader h;
    h.seq = 1;
    h.total = 1;
    auto bytes = encode_header(h);
    bytes[4] = 0x02;
    auto r = decode_header(bytes);
    ASSERT_FALSE(r.has_value());
    EXPECT_EQ(r.error(), HeaderError::InvalidVersion);
}

TEST(DecodeHeader, SeqZeroWithTotalIsInconsistent) {
    ChunkHeader h;
    h.seq = 1;
    h.total = 3;
    h.payload_len = 0;
    h.total_payload_len = 0;
    auto bytes = encode_header(h);
    bytes[8] = 0x00;  // seq = 0 while total = 3
    auto r = decode_header(bytes);
    ASSERT_FALSE(r.has_value());
    EXPECT_EQ(r.error(), HeaderError::InconsistentFields);
}

TEST(DecodeHeader, PayloadLongerThanTotalIsInconsistent) {
    ChunkHeader h;
    h.seq = 1;
    h.total = 1;
    h.payload_len = 10;
    h.total_payload_len = 10;
    auto bytes = encode_header(h);
    bytes[16] = 11;  // payload_len > total_payload_len
    auto r = decode_header(bytes);
    ASSERT_FALSE(r.has_value());
    EXPECT_EQ(r.error(), HeaderError::InconsistentFields);
}

// Injectivity: distinct valid headers never encode to the same bytes.
TEST(EncodeHeader, InjectiveOverRandomHeaders) {
    std::mt19937_64 rng(11);
    std::set<std::array<std::uint8_t, kHeaderSize>> seen;
    int distinct = 0;
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint64_t,
                        std::uint32_t, std::uint16_t>>
        headers;
    for (int i = 0; i < 2000; ++i) {
        ChunkHeader h;
        h.flags = static_cast<std::uint16_t>(rng() & 0x3);
        h.total = static_cast<std::uint32_t>(rng() % 1000) + 1;
        h.seq = static_cast<std::uint32_t>(rng() % h.total) + 1;
        h.total_payload_len = rng() % 1'000'000;
        h.payload_len = static_cast<std::uint32_t>(
            h.total_payload_len == 0 ? 0 : rng() % h.total_payload_len);
        h.payload_crc32 = static_cast<std::uint32_t>(rng());
        if (headers.insert({h.seq, h.total, h.payload_len, h.total_payload_len, h.payload_crc32,
                            h.flags})
                .second) {
            ++distinct;
            EXPECT_TRUE(seen.insert(encode_header(h)).second);
        }
    }
    EXPECT_EQ(static_cast<int>(seen.size()), distinct);
}
