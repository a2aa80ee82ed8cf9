#include <doctest.h>

#include <stdexcept>

#include "bletwin/detail/rng.hpp"
#include "bletwin/frames.hpp"
#include "bletwin/sweep.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"

using namespace bletwin;

namespace {

BitVec random_bits(detail::Rng& rng, std::size_t n) {
    BitVec bits(n);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    return bits;
}

AdvPdu random_pdu(detail::Rng& rng) {
    DeviceAddress adv;
    for (auto& b : adv.bytes) b = static_cast<uint8_t>(rng.below(256));
    switch (rng.below(3)) {
        case 0: {
            std::vector<GapBlock> blocks;
            std::size_t budget = rng.below(static_cast<uint64_t>(kMaxPayloadBytes - 6 + 1));
            while (budget >= 2) {
                GapBlock blk;
                blk.code = static_cast<uint8_t>(rng.below(256));
                const std::size_t len = rng.below(std::min<uint64_t>(budget - 2, 12) + 1);
                blk.data.resize(len);
                for (auto& b : blk.data) b = static_cast<uint8_t>(rng.below(256));
                budget -= blk.wire_size();
                blocks.push_back(std::move(blk));
            }
            return AdvPdu::adv_ind(adv, std::move(blocks));
        }
        case 1: {
            DeviceAddress scan;
            for (auto& b : scan.bytes) b = static_cast<uint8_t>(rng.below(256));
            return AdvPdu::scan_req(scan, adv);
        }
        default: {
            GapBlock blk;
            blk.code = 0x09;
            blk.data = {'t', 'w', 'i', 'n'};
            return AdvPdu::scan_rsp(adv, {blk});
        }
    }
}

}  // namespace

TEST_CASE("crc24 of the empty sequence is the init register") {
    CHECK(crc24({}) == 0x555555u);
}

TEST_CASE("crc24 golden vectors against the long-division oracle") {
    BitVec zeros(80, 0);
    const uint32_t v0 = crc24(zeros);
    CHECK(v0 == oracles::crc24_long_division(zeros));
    CHECK(v0 == 0xC06149u);  // frozen from the oracle

    // Serialized ADV_IND from the fixed-seed generator, stored as a golden vector.
    const AdvPdu pdu = random_test_pdu(20250810, 37);
    const BitVec body = serialize_pdu(pdu);
    const uint32_t v1 = crc24(body);
    CHECK(v1 == oracles::crc24_long_division(body));
    CHECK(v1 == kGoldenCrcV1);
}

TEST_CASE("crc24 equals the long-division oracle on random inputs") {
    detail::Rng rng(99);
    for (int i = 0; i < 3000; ++i) {
        const auto bits = random_bits(rng, rng.below(400));
        CHECK(crc24(bits) == oracles::crc24_long_division(bits));
    }
}

TEST_CASE("crc24 matches the published CRC-24/BLE check value") {
    // reveng catalog: poly 0x00065B, init 0x555555, refin/refout -> check 0xC25A56
    // over "123456789". Our register convention is the bit-reverse of that value.
    BitVec bits;
    for (char c : std::string("123456789")) append_byte_lsb_first(bits, static_cast<uint8_t>(c));
    uint32_t reg = crc24(bits);
    uint32_t reflected = 0;
    for (int i = 0; i < 24; ++i) reflected |= ((reg >> i) & 1u) << (23 - i);
    CHECK(reflected == 0xC25A56u);
}

TEST_CASE("whitening keystream for channel 37") {
    const BitVec k37 = whitening_keystream(ChannelIndex(37), 16);
    const BitVec expected = {1, 0, 1, 1, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 1, 1};  // hand-clocked
    CHECK(k37 == expected);

    // Independent formulation of the same register.
    for (unsigned ch : {0u, 9u, 37u, 38u, 39u})
        CHECK(whitening_keystream(ChannelIndex(ch), 64) ==
              oracles::whitening_keystream_reference(ch, 64));

    // whiten(zeros) emits the keystream; whiten(keystream) gives zeros back.
    const BitVec zeros(16, 0);
    CHECK(whiten(zeros, ChannelIndex(37)) == k37);
    CHECK(whiten(k37, ChannelIndex(37)) == zeros);
}

TEST_CASE("whitening is an involution on every channel") {
    detail::Rng rng(7);
    for (unsigned ch = 0; ch <= 39; ++ch) {
        const auto bits = random_bits(rng, 1 + rng.below(400));
        CHECK(whiten(whiten(bits, ChannelIndex(ch)), ChannelIndex(ch)) == bits);
    }
}

TEST_CASE("channel index range is enforced") {
    CHECK_THROWS_AS(ChannelIndex(40), std::out_of_range);
    CHECK(ChannelIndex(37).is_advertising());
    CHECK(!ChannelIndex(0).is_advertising());
    CHECK(ChannelIndex(37).center_frequency_hz() == doctest::Approx(2.402e9));
    CHECK(ChannelIndex(38).center_frequency_hz() == doctest::Approx(2.426e9));
    CHECK(ChannelIndex(39).center_frequency_hz() == doctest::Approx(2.480e9));
}

TEST_CASE("serialize_pdu lays fields out per the header table") {
    // ADV_IND, zero address, no blocks: type 0000, flags 0, length 6.
    const AdvPdu pdu = AdvPdu::adv_ind(DeviceAddress{});
    const BitVec bits = serialize_pdu(pdu);
    REQUIRE(bits.size() == 16 + 48);
    const BitVec header(bits.begin(), bits.begin() + 16);
    const BitVec expected_header = {0, 0, 0, 0, 0, 0, 0, 0, /* length 6 LSB-first */ 0, 1, 1, 0, 0, 0, 0, 0};
    CHECK(header == expected_header);
    for (std::size_t i = 16; i < bits.size(); ++i) CHECK(bits[i] == 0);
}

TEST_CASE("gap block wire format: length excludes the length byte") {
    GapBlock blk;
    blk.code = 0x09;
    blk.data = {'S', 'C', 'U', 'M'};
    AdvPdu pdu = AdvPdu::adv_ind(DeviceAddress{{1, 2, 3, 4, 5, 6}}, {blk});
    const BitVec bits = serialize_pdu(pdu);
    const std::vector<uint8_t> expected = {0x05, 0x09, 'S', 'C', 'U', 'M'};
    REQUIRE(bits.size() == 16u + 8u * (6 + 6));
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const std::size_t off = 16 + 8 * (6 + i);
        CHECK(byte_from_bits_lsb_first(std::span(bits).subspan(off, 8)) == expected[i]);
    }
}

TEST_CASE("scan_req serialization matches the byte-level reference encoder") {
    const DeviceAddress a{{0x11, 0x22, 0x33, 0x44, 0x55, 0x66}};
    const DeviceAddress b{{0xAA, 0xBB, 0xCC, 0xDD, 0xEE, 0xFF}};
    const BitVec bits = serialize_pdu(AdvPdu::scan_req(a, b));
    const auto ref = oracles::scan_req_reference_bytes(a.bytes, b.bytes);
    REQUIRE(bits.size() == ref.size() * 8);
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(byte_from_bits_lsb_first(std::span(bits).subspan(8 * i, 8)) == ref[i]);
}

TEST_CASE("assembled packets start with the 0xAA preamble") {
    const AirBits air = assemble_packet(AdvPdu::adv_ind(DeviceAddress{{9, 8, 7, 6, 5, 4}}),
                                        ChannelIndex(38));
    const BitVec preamble(air.bits.begin(), air.bits.begin() + 8);
    CHECK(preamble == BitVec{0, 1, 0, 1, 0, 1, 0, 1});
    CHECK(byte_from_bits_lsb_first(std::span(air.bits).first(8)) == 0xAA);
    // Preamble law: eight alternating bits and a transition into the access address.
    for (int i = 1; i < 8; ++i) CHECK(air.bits[i] != air.bits[i - 1]);
    CHECK(air.bits[8] != air.bits[7]);
}

TEST_CASE("maximum-length packet is exactly 376 bits") {
    const AdvPdu pdu = random_test_pdu(1, 37);
    REQUIRE(pdu.payload_bytes() == 37);
    const AirBits air = assemble_packet(pdu, ChannelIndex(37));
    CHECK(air.bits.size() == kMaxPacketBits);
}

TEST_CASE("assemble/parse round-trips and obeys the length law") {
    detail::Rng rng(1234);
    for (int i = 0; i < 1000; ++i) {
        const AdvPdu pdu = random_pdu(rng);
        const ChannelIndex ch(37 + static_cast<unsigned>(rng.below(3)));
        const AirBits air = assemble_packet(pdu, ch);
        CHECK(air.bits.size() == 8 + 32 + 16 + 8 * pdu.payload_bytes() + 24);
        CHECK(air.bits.size() <= kMaxPacketBits);
        auto back = parse_packet(air.bits, ch);
        REQUIRE(back.ok());
        CHECK(back.value() == pdu);
        // Also accepted without the preamble.
        auto stripped = parse_packet(std::span(air.bits).subspan(8), ch);
        REQUIRE(stripped.ok());
        CHECK(stripped.value() == pdu);
    }
}

TEST_CASE("any single flipped bit in PDU||CRC fails the parse") {
    const AdvPdu pdu = AdvPdu::adv_ind(DeviceAddress{{1, 2, 3, 4, 5, 6}},
                                       {GapBlock{0xFF, {10, 20, 30}}});
    const ChannelIndex ch(37);
    AirBits air = assemble_packet(pdu, ch);
    for (std::size_t i = 40; i < air.bits.size(); ++i) {
        air.bits[i] ^= 1;
        CHECK(!parse_packet(air.bits, ch).ok());
        air.bits[i] ^= 1;
    }
    // And the unflipped packet still parses.
    CHECK(parse_packet(air.bits, ch).ok());
}

TEST_CASE("parse failure modes are reported as typed errors") {
    const AdvPdu pdu = AdvPdu::scan_req(DeviceAddress{{1, 1, 1, 1, 1, 1}},
                                        DeviceAddress{{2, 2, 2, 2, 2, 2}});
    const ChannelIndex ch(39);
    const AirBits air = assemble_packet(pdu, ch);

    SUBCASE("flipped PDU bit -> crc mismatch") {
        AirBits bad = air;
        bad.bits[60] ^= 1;
        auto r = parse_packet(bad.bits, ch);
        REQUIRE(!r.ok());
        CHECK(r.error() == DecodeError::CrcMismatch);
    }
    SUBCASE("wrong access address -> mismatch error") {
        AirBits bad = air;
        for (int i = 0; i < 6; ++i) bad.bits[8 + i] ^= 1;
        auto r = parse_packet(bad.bits, ch);
        REQUIRE(!r.ok());
        CHECK(r.error() == DecodeError::AccessAddressMismatch);
    }
    SUBCASE("truncated payload -> malformed length") {
        // Header promises 37 bytes; only ~10 present.
        const AdvPdu big = random_test_pdu(7, 37);
        AirBits a = assemble_packet(big, ch);
        BitVec cut(a.bits.begin(), a.bits.begin() + 8 + 32 + 16 + 80);
        auto r = parse_packet(cut, ch);
        REQUIRE(!r.ok());
        CHECK(r.error() == DecodeError::MalformedLength);
    }
    SUBCASE("oversize payload is rejected at construction") {
        GapBlock blk;
        blk.code = 0xFF;
        blk.data.resize(31);  // 6 + 2 + 31 = 39 > 37
        CHECK_THROWS_AS(serialize_pdu(AdvPdu::adv_ind(DeviceAddress{}, {blk})),
                        std::length_error);
    }
    SUBCASE("data channels cannot carry advertising packets") {
        CHECK_THROWS_AS(assemble_packet(pdu, ChannelIndex(5)), std::invalid_argument);
    }
}

TEST_CASE("hex dump round-trips") {
    const AdvPdu pdu = AdvPdu::adv_ind(DeviceAddress{{0xC0, 1, 2, 3, 4, 5}},
                                       {GapBlock{0x09, {'h', 'i'}}});
    const AirBits air = assemble_packet(pdu, ChannelIndex(37));
    const std::string hex = air_bits_to_hex(air);
    CHECK(hex.substr(0, 2) == "aa");  // preamble byte
    auto bits = hex_to_bits(hex);
    REQUIRE(bits.ok());
    CHECK(bits.value() == air.bits);
    CHECK(!hex_to_bits("abc").ok());   // odd digit count
    CHECK(!hex_to_bits("zz").ok());    // not hex
}
