#include "bletwin/iq_files.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace bletwin {

namespace {

constexpr char kMagic[4] = {'B', 'T', 'I', 'Q'};
constexpr uint16_t kVersion = 1;
constexpr uint16_t kFormatIq16 = 1;
constexpr uint16_t kFormatQ4 = 2;

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8 & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i) & 0xFF));
}

void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<uint64_t>(v));
}

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open " + path);
    }

    uint8_t u8() {
        char c;
        if (!in_.get(c)) throw std::runtime_error("truncated file");
        return static_cast<uint8_t>(c);
    }
    uint16_t u16() { return static_cast<uint16_t>(u8() | u8() << 8); }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    int16_t i16() { return static_cast<int16_t>(u16()); }

private:
    std::ifstream in_;
};

uint16_t read_common_header(Reader& r) {
    char magic[4];
    for (auto& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad magic");
    const uint16_t version = r.u16();
    if (version != kVersion) throw std::runtime_error("unsupported container version");
    return r.u16();  // format
}

void write_blob(const std::string& path, const std::string& blob) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void write_iq16(const std::string& path, const IqFrame& frame) {
    std::string blob;
    blob.reserve(32 + frame.samples.size() * 4);
    blob.append(kMagic, 4);
    put_u16(blob, kVersion);
    put_u16(blob, kFormatIq16);
    put_f64(blob, frame.sample_rate);
    put_f64(blob, frame.center_offset_hz);
    put_u64(blob, frame.samples.size());
    auto q15 = [](double x) {
        const double scaled = std::round(x * 32768.0);
        return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    };
    for (const auto& s : frame.samples) {
        put_u16(blob, static_cast<uint16_t>(q15(s.real())));
        put_u16(blob, static_cast<uint16_t>(q15(s.imag())));
    }
    write_blob(path, blob);
}

IqFrame read_iq16(const std::string& path) {
    Reader r(path);
    if (read_common_header(r) != kFormatIq16)
        throw std::runtime_error("not an iq16 file: " + path);
    IqFrame frame;
    frame.sample_rate = r.f64();
    frame.center_offset_hz = r.f64();
    const uint64_t n = r.u64();
    frame.samples.resize(n);
    for (uint64_t i = 0; i < n; ++i) {
        const double re = r.i16() / 32768.0;
        const double im = r.i16() / 32768.0;
        frame.samples[i] = {re, im};
    }
    return frame;
}

void write_q4(const std::string& path, const QuantizedIq& q) {
    if (q.cfg.adc_bits != 4)
        throw std::runtime_error("q4 container requires adc_bits == 4");
    std::string blob;
    blob.reserve(64 + q.size());
    blob.append(kMagic, 4);
    put_u16(blob, kVersion);
    put_u16(blob, kFormatQ4);
    put_f64(blob, q.cfg.sample_rate);
    put_f64(blob, 0.0);  // center offset: quantized stream sits at the IF below
    put_u64(blob, q.size());
    put_f64(blob, q.cfg.if_hz);
    put_f64(blob, q.cfg.symbol_rate);
    put_f64(blob, q.cfg.deviation);
    put_f64(blob, q.cfg.full_scale);
    put_u16(blob, static_cast<uint16_t>(q.cfg.adc_bits));
    put_u16(blob, 0);
    put_u16(blob, 0);
    put_u16(blob, 0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const uint8_t lo = static_cast<uint8_t>(q.i_codes[i]) & 0x0F;
        const uint8_t hi = static_cast<uint8_t>(q.q_codes[i]) & 0x0F;
        blob.push_back(static_cast<char>(lo | hi << 4));
    }
    write_blob(path, blob);
}

QuantizedIq read_q4(const std::string& path) {
    Reader r(path);
    if (read_common_header(r) != kFormatQ4) throw std::runtime_error("not a q4 file: " + path);
    QuantizedIq q;
    q.cfg.sample_rate = r.f64();
    (void)r.f64();  // center offset
    const uint64_t n = r.u64();
    q.cfg.if_hz = r.f64();
    q.cfg.symbol_rate = r.f64();
    q.cfg.deviation = r.f64();
    q.cfg.full_scale = r.f64();
    q.cfg.adc_bits = r.u16();
    (void)r.u16();
    (void)r.u16();
    (void)r.u16();
    if (q.cfg.adc_bits != 4) throw std::runtime_error("q4 container requires adc_bits == 4");
    q.i_codes.resize(n);
    q.q_codes.resize(n);
    auto sign_extend4 = [](uint8_t nibble) {
        return static_cast<int16_t>(static_cast<int8_t>(nibble << 4) >> 4);
    };
    for (uint64_t i = 0; i < n; ++i) {
        const uint8_t byte = r.u8();
        q.i_codes[i] = sign_extend4(byte & 0x0F);
        q.q_codes[i] = sign_extend4(byte >> 4);
    }
    return q;
}

bool file_is_q4(const std::string& path) {
    Reader r(path);
    return read_common_header(r) == kFormatQ4;
}

}  // namespace bletwin
