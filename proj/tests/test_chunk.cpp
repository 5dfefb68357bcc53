#include "fedrdma/chunk.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace fedrdma;

TEST(PlanChunks, ExactDivision) {
    // 1 GB at 4 MB chunks: 250 equal chunks.
    ChunkPlan p = plan_chunks(1'000'000'000, 4'000'000);
    EXPECT_EQ(p.num_chunks, 250u);
    EXPECT_EQ(p.last_chunk_size, 4'000'000u);
}

TEST(PlanChunks, CeilWithRemainder) {
    ChunkPlan p = plan_chunks(9'000'000, 4'000'000);
    EXPECT_EQ(p.num_chunks, 3u);
    EXPECT_EQ(p.chunk_len(1), 4'000'000u);
    EXPECT_EQ(p.chunk_len(2), 4'000'000u);
    EXPECT_EQ(p.chunk_len(3), 1'000'000u);
}

TEST(PlanChunks, EmptyPayloadIsOneZeroChunk) {
    ChunkPlan p = plan_chunks(0, 4'000'000);
    EXPECT_EQ(p.num_chunks, 1u);
    EXPECT_EQ(p.last_chunk_size, 0u);
}

TEST(PlanChunks, ZeroChunkSizeThrows) {
    EXPECT_THROW(plan_chunks(100, 0), ZeroChunkSizeError);
}

TEST(SplitBlob, HeadersPopulated) {
    Blob b = make_blob(9'000'000, 42);
    SplitResult r = split_blob(b, 4'000'000);
    ASSERT_EQ(r.chunks.size(), 3u);
    std::uint64_t off = 0;
    for (std::uint32_t s = 1; s <= 3; ++s) {
        const Chunk& c = r.chunks[s - 1];
        ASSERT_TRUE(c.header.has_value());
        EXPECT_EQ(c.header->seq, s);
        EXPECT_EQ(c.header->total, 3u);
        EXPECT_EQ(c.header->payload_len, c.payload.size());
        EXPECT_EQ(c.header->total_payload_len, b.len());
        EXPECT_EQ(c.header->payload_crc32, crc32_of(c.payload));
        EXPECT_TRUE(std::equal(c.payload.begin(), c.payload.end(), b.content.begin() + off));
        off += c.payload.size();
    }
}

TEST(SplitBlob, EmptyBlob) {
    Blob b = make_blob(std::uint64_t{0}, 1);
    SplitResult r = split_blob(b, 4'000'000);
    ASSERT_EQ(r.chunks.size(), 1u);
    EXPECT_EQ(r.chunks[0].header->payload_len, 0u);
    EXPECT_EQ(r.chunks[0].header->total, 1u);
}

TEST(Reassemble, AnyPermutationRestoresBlob) {
    Blob b = make_blob(1'000'000, 3);
    SplitResult r = split_blob(b, 123'457);
    std::mt19937_64 rng(5);
    std::shuffle(r.chunks.begin(), r.chunks.end(), rng);
    auto out = reassemble(r.chunks);
    ASSERT_TRUE(out.has_value());
    EXPECT_EQ(out.value().content, b.content);
    EXPECT_EQ(out.value().crc, b.crc);
}

TEST(Reassemble, MissingChunkNamesTheGap) {
    Blob b = make_blob(300'000, 4);
    SplitResult r = split_blob(b, 100'000);
    ASSERT_EQ(r.chunks.size(), 3u);
    std::vector<Chunk> partial = {r.chunks[0], r.chunks[2]};  // seqs {1, 3} of 3
    auto out = reassemble(partial);
    ASSERT_FALSE(out.has_value());
    EXPECT_EQ(out.error().kind, ReassembleErrorKind::MissingChunk);
    EXPECT_EQ(out.error().seq, 2u);
}

TEST(Reassemble, DuplicateSeq) {
    Blob b = make_blob(200'000, 4);
    SplitResult r = split_blob(b, 100'000);
    std::vector<Chunk> dup = {r.chunks[0], r.chunks[0], r.chunks[1]};
    auto out = reassemble(dup);
    ASSERT_FALSE(out.has_value());
    EXPECT_EQ(out.error().kind, ReassembleErrorKind::DuplicateSeq);
}

TEST(Reassemble, FlippedByteIsCrcMismatch) {
    Blob b = make_blob(200'000, 4);
    SplitResult r = split_blob(b, 100'000);
    r.chunks[1].payload[50] ^= 0x01;
    auto out = reassemble(r.chunks);
    ASSERT_FALSE(out.has_value());
    EXPECT_EQ(out.error().kind, ReassembleErrorKind::CrcMismatch);
    EXPECT_EQ(out.error().seq, 2u);
}

TEST(Reassemble, DisagreeingTotalsRejected) {
    Blob b = make_blob(200'000, 4);
    SplitResult r = split_blob(b, 100'000);
    r.chunks[1].header->total = 5;
    auto out = reassemble(r.chunks);
    ASSERT_FALSE(out.has_value());
    EXPECT_EQ(out.error().kind, ReassembleErrorKind::TotalMismatch);
}

TEST(Reassemble, HeaderlessChunkRejected) {
    Blob b = make_blob(200'000, 4);
    SplitResult r = split_blob(b, 100'000);
    r.chunks[0].header.reset();
    auto out = reassemble(r.chunks);
    ASSERT_FALSE(out.has_value());
    EXPECT_EQ(out.error().kind, ReassembleErrorKind::MissingHeader);
}

// Split/merge inverse over randomized (size, chunk-size) pairs, bit-exact.
TEST(Property, SplitReassembleRoundTrip) {
    std::mt19937_64 rng(99);
    int cases = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t len = rng() % 262'144;
        const std::uint64_t s = 1 + rng() % 65'536;
        Blob b = make_blob(len, rng());
        SplitResult r = split_blob(b, s);
        EXPECT_EQ(r.plan.num_chunks,
                  len == 0 ? 1 : static_cast<std::uint32_t>((len + s - 1) / s));
        std::shuffle(r.chunks.begin(), r.chunks.end(), rng);
        auto out = reassemble(r.chunks);
        ASSERT_TRUE(out.has_value()) << "len=" << len << " s=" << s;
        ASSERT_EQ(out.value().content, b.content) << "len=" << len << " s=" << s;
        ++cases;
    }
    // A few at the multi-megabyte scale with megabyte chunks.
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t len = 1'000'000 + rng() % 64'000'000;
        const std::uint64_t s = 1'024 + rng() % 8'388'608;
        Blob b = make_blob(len, rng());
        SplitResult r = split_blob(b, s);
        std::shuffle(r.chunks.begin(), r.chunks.end(), rng);
        auto out = reassemble(r.chunks);
        ASSERT_TRUE(out.has_value());
        ASSERT_EQ(out.value().content, b.content);
        ++cases;
    }
    EXPECT_GE(cases, 1000);
}

// Per-chunk framing adds exactly 32 x n bytes; a single in-place header adds 32.
TEST(Property, FramingOverheadIsExact) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t len = rng() % 1'000'000;
        const std::uint64_t s = 1 + rng() % 100'000;
        Blob b = make_blob(len, rng());
        SplitResult r = split_blob(b, s);
        std::uint64_t wire = 0;
        for (const Chunk& c : r.chunks) wire += kHeaderSize + c.payload.size();
        EXPECT_EQ(wire, len + kHeaderSize * static_cast<std::uint64_t>(r.plan.num_chunks));
    }
}
