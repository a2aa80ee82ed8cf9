#include "bletwin/frames.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace bletwin {

namespace {

constexpr uint32_t kCrcPoly = 0x00065Bu;
constexpr uint32_t kCrcInit = 0x555555u;
constexpr std::size_t kHeaderBits = 16;
constexpr std::size_t kCrcBits = 24;
constexpr std::size_t kAaBits = 32;
constexpr std::size_t kPreambleBits = 8;

BitVec access_address_bits() {
    BitVec bits;
    bits.reserve(kAaBits);
    append_u32_lsb_first(bits, kAdvAccessAddress);
    return bits;
}

}  // namespace

const char* to_string(DecodeError e) {
    switch (e) {
        case DecodeError::AccessAddressMismatch: return "access-address mismatch";
        case DecodeError::CrcMismatch: return "crc mismatch";
        case DecodeError::MalformedLength: return "malformed length";
        case DecodeError::UnknownPduType: return "unknown pdu type";
        case DecodeError::Oversize: return "payload oversize";
        case DecodeError::NoSignal: return "no signal";
        case DecodeError::NoDetection: return "no detection";
        case DecodeError::TooShort: return "input too short";
    }
    return "unknown error";
}

const char* to_string(PduType t) {
    switch (t) {
        case PduType::AdvInd: return "ADV_IND";
        case PduType::ScanReq: return "SCAN_REQ";
        case PduType::ScanRsp: return "SCAN_RSP";
    }
    return "UNKNOWN";
}

std::string DeviceAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", bytes[0], bytes[1],
                  bytes[2], bytes[3], bytes[4], bytes[5]);
    return buf;
}

DeviceAddress DeviceAddress::from_string(const std::string& s) {
    DeviceAddress a;
    unsigned v[6];
    if (std::sscanf(s.c_str(), "%x:%x:%x:%x:%x:%x", &v[0], &v[1], &v[2], &v[3], &v[4],
                    &v[5]) != 6) {
        throw std::invalid_argument("device address must look like aa:bb:cc:dd:ee:ff");
    }
    for (int i = 0; i < 6; ++i) {
        if (v[i] > 0xFF) throw std::invalid_argument("device address octet out of range");
        a.bytes[static_cast<std::size_t>(i)] = static_cast<uint8_t>(v[i]);
    }
    return a;
}

std::size_t AdvPdu::payload_bytes() const {
    if (kind == PduType::ScanReq) return 12;
    std::size_t n = 6;
    for (const auto& b : blocks) n += b.wire_size();
    return n;
}

PduHeader AdvPdu::header() const {
    PduHeader h;
    h.type = kind;
    h.rfu = rfu;
    h.tx_add = tx_add;
    h.rx_add = rx_add;
    h.length = static_cast<uint8_t>(payload_bytes());
    return h;
}

AdvPdu AdvPdu::adv_ind(const DeviceAddress& adv, std::vector<GapBlock> blocks) {
    AdvPdu p;
    p.kind = PduType::AdvInd;
    p.adv_addr = adv;
    p.blocks = std::move(blocks);
    return p;
}

AdvPdu AdvPdu::scan_req(const DeviceAddress& scanner, const DeviceAddress& target) {
    AdvPdu p;
    p.kind = PduType::ScanReq;
    p.scan_addr = scanner;
    p.adv_addr = target;
    return p;
}

AdvPdu AdvPdu::scan_rsp(const DeviceAddress& adv, std::vector<GapBlock> blocks) {
    AdvPdu p;
    p.kind = PduType::ScanRsp;
    p.adv_addr = adv;
    p.blocks = std::move(blocks);
    return p;
}

ChannelIndex::ChannelIndex(unsigned index) : index_(index) {
    if (index > 39) throw std::out_of_range("BLE channel index must be 0..39");
}

double ChannelIndex::center_frequency_hz() const {
    // 2 MHz grid from 2.402 GHz; advertising channels sit at 2.402/2.426/2.480 GHz.
    switch (index_) {
        case 37: return 2.402e9;
        case 38: return 2.426e9;
        case 39: return 2.480e9;
        default: return 2.404e9 + 2e6 * ((index_ < 11) ? index_ : (index_ + 1));
    }
}

void append_byte_lsb_first(BitVec& out, uint8_t byte) {
    for (int i = 0; i < 8; ++i) out.push_back((byte >> i) & 1u);
}

void append_u32_lsb_first(BitVec& out, uint32_t word) {
    for (int i = 0; i < 32; ++i) out.push_back((word >> i) & 1u);
}

uint8_t byte_from_bits_lsb_first(std::span<const uint8_t> bits) {
    uint8_t v = 0;
    for (std::size_t i = 0; i < 8 && i < bits.size(); ++i)
        v = static_cast<uint8_t>(v | (bits[i] & 1u) << i);
    return v;
}

uint32_t crc24(std::span<const uint8_t> pdu_bits) {
    // Galois LFSR as drawn in the standard: data enters XOR'ed with register bit 23,
    // the feedback taps are the polynomial coefficients 0x65B.
    uint32_t reg = kCrcInit;
    for (uint8_t b : pdu_bits) {
        const uint32_t feedback = (b & 1u) ^ (reg >> 23 & 1u);
        reg = (reg << 1) & 0xFFFFFFu;
        if (feedback) reg ^= kCrcPoly;
    }
    return reg;
}

BitVec crc24_bits(uint32_t crc) {
    // The CRC goes on air most significant register bit first.
    BitVec bits;
    bits.reserve(kCrcBits);
    for (int i = 23; i >= 0; --i) bits.push_back((crc >> i) & 1u);
    return bits;
}

BitVec whitening_keystream(ChannelIndex channel, std::size_t nbits) {
    // 7-bit LFSR, polynomial x^7 + x^4 + 1. Register positions p0..p6; init puts a 1
    // in p0 and the 6-bit channel index MSB-first into p1..p6. Each clock emits p6,
    // feeds it back into p0 and XORs it into p4.
    uint8_t p[7];
    p[0] = 1;
    for (int i = 0; i < 6; ++i) p[i + 1] = (channel.value() >> (5 - i)) & 1u;
    BitVec out;
    out.reserve(nbits);
    for (std::size_t n = 0; n < nbits; ++n) {
        const uint8_t o = p[6];
        out.push_back(o);
        p[6] = p[5];
        p[5] = p[4];
        p[4] = p[3] ^ o;
        p[3] = p[2];
        p[2] = p[1];
        p[1] = p[0];
        p[0] = o;
    }
    return out;
}

BitVec whiten(std::span<const uint8_t> bits, ChannelIndex channel) {
    BitVec ks = whitening_keystream(channel, bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) ks[i] ^= bits[i] & 1u;
    return ks;
}

BitVec serialize_pdu(const AdvPdu& pdu) {
    const std::size_t payload = pdu.payload_bytes();
    if (payload > kMaxPayloadBytes) throw std::length_error("PDU payload exceeds 37 bytes");
    if (pdu.kind == PduType::ScanReq && !pdu.scan_addr)
        throw std::invalid_argument("SCAN_REQ requires a scanner address");

    BitVec bits;
    bits.reserve(kHeaderBits + 8 * payload);

    // Header, Table order: type(4) rfu(2) txadd(1) rxadd(1) length(8), LSB-first each.
    const uint8_t type = static_cast<uint8_t>(pdu.kind);
    for (int i = 0; i < 4; ++i) bits.push_back((type >> i) & 1u);
    for (int i = 0; i < 2; ++i) bits.push_back((pdu.rfu >> i) & 1u);
    bits.push_back(pdu.tx_add ? 1 : 0);
    bits.push_back(pdu.rx_add ? 1 : 0);
    append_byte_lsb_first(bits, static_cast<uint8_t>(payload));

    if (pdu.kind == PduType::ScanReq) {
        for (uint8_t b : pdu.scan_addr->bytes) append_byte_lsb_first(bits, b);
        for (uint8_t b : pdu.adv_addr.bytes) append_byte_lsb_first(bits, b);
    } else {
        for (uint8_t b : pdu.adv_addr.bytes) append_byte_lsb_first(bits, b);
        for (const auto& blk : pdu.blocks) {
            append_byte_lsb_first(bits, static_cast<uint8_t>(1 + blk.data.size()));
            append_byte_lsb_first(bits, blk.code);
            for (uint8_t b : blk.data) append_byte_lsb_first(bits, b);
        }
    }
    return bits;
}

Result<AdvPdu> parse_pdu(std::span<const uint8_t> pdu_bits) {
    if (pdu_bits.size() < kHeaderBits) return DecodeError::TooShort;

    AdvPdu pdu;
    uint8_t type = 0;
    for (int i = 0; i < 4; ++i) type = static_cast<uint8_t>(type | (pdu_bits[i] & 1u) << i);
    pdu.rfu = static_cast<uint8_t>((pdu_bits[4] & 1u) | (pdu_bits[5] & 1u) << 1);
    pdu.tx_add = pdu_bits[6] & 1u;
    pdu.rx_add = pdu_bits[7] & 1u;
    const uint8_t length = byte_from_bits_lsb_first(pdu_bits.subspan(8, 8));

    switch (type) {
        case static_cast<uint8_t>(PduType::AdvInd): pdu.kind = PduType::AdvInd; break;
        case static_cast<uint8_t>(PduType::ScanReq): pdu.kind = PduType::ScanReq; break;
        case static_cast<uint8_t>(PduType::ScanRsp): pdu.kind = PduType::ScanRsp; break;
        default: return DecodeError::UnknownPduType;
    }

    if (length < kMinPayloadBytes || length > kMaxPayloadBytes)
        return DecodeError::MalformedLength;
    if (pdu_bits.size() < kHeaderBits + 8u * length) return DecodeError::MalformedLength;

    auto read_byte = [&](std::size_t byte_idx) {
        return byte_from_bits_lsb_first(pdu_bits.subspan(kHeaderBits + 8 * byte_idx, 8));
    };

    if (pdu.kind == PduType::ScanReq) {
        if (length != 12) return DecodeError::MalformedLength;
        DeviceAddress scanner, target;
        for (std::size_t i = 0; i < 6; ++i) scanner.bytes[i] = read_byte(i);
        for (std::size_t i = 0; i < 6; ++i) target.bytes[i] = read_byte(6 + i);
        pdu.scan_addr = scanner;
        pdu.adv_addr = target;
        return pdu;
    }

    for (std::size_t i = 0; i < 6; ++i) pdu.adv_addr.bytes[i] = read_byte(i);
    std::size_t pos = 6;
    while (pos < length) {
        const uint8_t block_len = read_byte(pos);
        if (block_len == 0 || pos + 1 + block_len > length) return DecodeError::MalformedLength;
        GapBlock blk;
        blk.code = read_byte(pos + 1);
        blk.data.resize(block_len - 1u);
        for (std::size_t i = 0; i + 1 < block_len; ++i) blk.data[i] = read_byte(pos + 2 + i);
        pdu.blocks.push_back(std::move(blk));
        pos += 1u + block_len;
    }
    return pdu;
}

AirBits assemble_packet(const AdvPdu& pdu, ChannelIndex channel) {
    if (!channel.is_advertising())
        throw std::invalid_argument("advertising PDUs go on channels 37..39");

    BitVec body = serialize_pdu(pdu);
    const uint32_t crc = crc24(body);
    BitVec crc_b = crc24_bits(crc);
    body.insert(body.end(), crc_b.begin(), crc_b.end());
    BitVec whitened = whiten(body, channel);

    AirBits air;
    air.bits.reserve(kPreambleBits + kAaBits + whitened.size());
    // Preamble alternates, chosen so its last bit differs from the first AA bit.
    const uint8_t first_aa_bit = kAdvAccessAddress & 1u;
    const uint8_t last_preamble = first_aa_bit ^ 1u;
    for (std::size_t i = 0; i < kPreambleBits; ++i)
        air.bits.push_back((i % 2 == 1) ? last_preamble : static_cast<uint8_t>(last_preamble ^ 1u));
    append_u32_lsb_first(air.bits, kAdvAccessAddress);
    air.bits.insert(air.bits.end(), whitened.begin(), whitened.end());
    return air;
}

Result<AdvPdu> parse_packet(std::span<const uint8_t> bits, ChannelIndex channel) {
    BitVec aa = access_address_bits();
    auto aa_at = [&](std::size_t off) {
        if (bits.size() < off + kAaBits) return false;
        for (std::size_t i = 0; i < kAaBits; ++i)
            if ((bits[off + i] & 1u) != aa[i]) return false;
        return true;
    };

    std::size_t start;
    if (aa_at(0)) {
        start = kAaBits;
    } else if (aa_at(kPreambleBits)) {
        start = kPreambleBits + kAaBits;
    } else {
        return bits.size() < kAaBits ? DecodeError::TooShort
                                     : DecodeError::AccessAddressMismatch;
    }

    auto whitened = bits.subspan(start);
    if (whitened.size() < kHeaderBits + 8 * kMinPayloadBytes + kCrcBits)
        return DecodeError::TooShort;
    BitVec body = whiten(whitened, channel);

    // Length must be known before the CRC can be located.
    const uint8_t length = byte_from_bits_lsb_first(std::span(body).subspan(8, 8));
    if (length < kMinPayloadBytes || length > kMaxPayloadBytes)
        return DecodeError::MalformedLength;
    const std::size_t pdu_bits_n = kHeaderBits + 8u * length;
    if (body.size() < pdu_bits_n + kCrcBits) return DecodeError::MalformedLength;

    auto pdu_bits = std::span(body).first(pdu_bits_n);
    const uint32_t computed = crc24(pdu_bits);
    BitVec expected = crc24_bits(computed);
    for (std::size_t i = 0; i < kCrcBits; ++i)
        if (body[pdu_bits_n + i] != expected[i]) return DecodeError::CrcMismatch;

    return parse_pdu(pdu_bits);
}

std::string air_bits_to_hex(const AirBits& air) {
    std::string out;
    out.reserve(air.bits.size() / 4 + 2);
    for (std::size_t i = 0; i + 7 < air.bits.size(); i += 8) {
        const uint8_t byte = byte_from_bits_lsb_first(std::span(air.bits).subspan(i, 8));
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", byte);
        out += buf;
    }
    return out;
}

Result<BitVec> hex_to_bits(const std::string& hex) {
    std::string clean;
    for (char c : hex)
        if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
    if (clean.size() % 2 != 0) return DecodeError::MalformedLength;
    BitVec bits;
    bits.reserve(clean.size() * 4);
    for (std::size_t i = 0; i < clean.size(); i += 2) {
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        const int hi = nibble(clean[i]);
        const int lo = nibble(clean[i + 1]);
        if (hi < 0 || lo < 0) return DecodeError::MalformedLength;
        append_byte_lsb_first(bits, static_cast<uint8_t>(hi << 4 | lo));
    }
    return bits;
}

}  // namespace bletwin
