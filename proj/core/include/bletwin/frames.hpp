#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bletwin/result.hpp"

namespace bletwin {

/// One bit per element, value 0 or 1, in transmission order.
using BitVec = std::vector<uint8_t>;

/// Advertising-channel access address, fixed by the standard.
inline constexpr uint32_t kAdvAccessAddress = 0x8E89BED6u;

/// Longest advertising-channel packet: preamble + AA + header + 37-byte payload + CRC.
inline constexpr std::size_t kMaxPacketBits = 376;
inline constexpr std::size_t kMaxPayloadBytes = 37;
inline constexpr std::size_t kMinPayloadBytes = 6;

enum class PduType : uint8_t {
    AdvInd = 0x0,
    ScanReq = 0x3,
    ScanRsp = 0x4,
};

const char* to_string(PduType t);

/// 6-byte advertising address. bytes[0] goes on air first (each byte LSB-first).
struct DeviceAddress {
    std::array<uint8_t, 6> bytes{};

    bool operator==(const DeviceAddress&) const = default;
    std::string to_string() const;  // "aa:bb:cc:dd:ee:ff", bytes[0] first
    static DeviceAddress from_string(const std::string& s);
};

struct PduHeader {
    PduType type = PduType::AdvInd;
    uint8_t rfu = 0;  // must be 0 on TX
    bool tx_add = false;
    bool rx_add = false;
    uint8_t length = 0;  // payload bytes

    bool operator==(const PduHeader&) const = default;
};

/// GAP advertising-data block. The on-air length byte covers code + data.
struct GapBlock {
    uint8_t code = 0;
    std::vector<uint8_t> data;

    std::size_t wire_size() const { return 2 + data.size(); }
    bool operator==(const GapBlock&) const = default;
};

/// Typed advertising-channel PDU. scan_addr is present for SCAN_REQ only;
/// blocks are meaningful for ADV_IND / SCAN_RSP.
struct AdvPdu {
    PduType kind = PduType::AdvInd;
    DeviceAddress adv_addr{};
    std::optional<DeviceAddress> scan_addr;
    std::vector<GapBlock> blocks;
    uint8_t rfu = 0;
    bool tx_add = false;
    bool rx_add = false;

    std::size_t payload_bytes() const;
    PduHeader header() const;
    bool operator==(const AdvPdu&) const = default;

    static AdvPdu adv_ind(const DeviceAddress& adv, std::vector<GapBlock> blocks = {});
    static AdvPdu scan_req(const DeviceAddress& scanner, const DeviceAddress& target);
    static AdvPdu scan_rsp(const DeviceAddress& adv, std::vector<GapBlock> blocks = {});
};

/// BLE channel index 0..39. Advertising channels are 37, 38, 39.
class ChannelIndex {
public:
    explicit ChannelIndex(unsigned index);

    unsigned value() const { return index_; }
    bool is_advertising() const { return index_ >= 37; }
    double center_frequency_hz() const;

    bool operator==(const ChannelIndex&) const = default;

private:
    unsigned index_;
};

/// A fully assembled on-air bit sequence: preamble || AA || whitened(PDU || CRC).
struct AirBits {
    BitVec bits;
};

/// CRC-24, polynomial 0x00065B, register seeded with 0x555555, clocked over the
/// un-whitened PDU in transmission order. Returns the final register value;
/// crc_bits() gives the on-air emission order (register bit 23 first).
uint32_t crc24(std::span<const uint8_t> pdu_bits);
BitVec crc24_bits(uint32_t crc);

/// Whitening/dewhitening keystream XOR (involution). The 7-bit LFSR is seeded from
/// the channel index per the standard layout; see whitening_keystream() for the
/// exact register update.
BitVec whiten(std::span<const uint8_t> bits, ChannelIndex channel);
BitVec whitening_keystream(ChannelIndex channel, std::size_t nbits);

/// PDU body serialization: 16 header bits then payload bytes, every field LSB-first.
/// Throws std::length_error if the payload would exceed 37 bytes.
BitVec serialize_pdu(const AdvPdu& pdu);
Result<AdvPdu> parse_pdu(std::span<const uint8_t> pdu_bits);

/// Full packet assembly for an advertising channel. Throws std::invalid_argument for
/// non-advertising channels and std::length_error on payload overflow.
AirBits assemble_packet(const AdvPdu& pdu, ChannelIndex channel);

/// Inverse of assemble_packet. Accepts bit sequences starting either at the preamble
/// or directly at the access address (the preamble carries no data).
Result<AdvPdu> parse_packet(std::span<const uint8_t> bits, ChannelIndex channel);

// Hex-dump packet format: transmission-order bytes, bit 0 of each byte first on air.
std::string air_bits_to_hex(const AirBits& air);
Result<BitVec> hex_to_bits(const std::string& hex);

// Bit/byte order helpers shared with the rest of the stack.
void append_byte_lsb_first(BitVec& out, uint8_t byte);
void append_u32_lsb_first(BitVec& out, uint32_t word);
uint8_t byte_from_bits_lsb_first(std::span<const uint8_t> bits);

}  // namespace bletwin
