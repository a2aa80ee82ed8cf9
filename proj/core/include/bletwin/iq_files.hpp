#pragma once

#include <string>

#include "bletwin/modulator.hpp"
#include "bletwin/receiver.hpp"

namespace bletwin {

/// Little-endian "BTIQ" container, version 1.
///   iq16: interleaved int16 I,Q at Q15 scale (1.0 <-> 32768, clamped to 32767).
///   q4:   one byte per sample pair, two's-complement nibbles (I low, Q high),
///         with the front-end fields appended to the header. Requires adc_bits == 4.
/// Reads throw std::runtime_error on bad magic/version/truncation.
void write_iq16(const std::string& path, const IqFrame& frame);
IqFrame read_iq16(const std::string& path);

void write_q4(const std::string& path, const QuantizedIq& q);
QuantizedIq read_q4(const std::string& path);

/// Sniff the format field; true when the file holds packed 4-bit data.
bool file_is_q4(const std::string& path);

}  // namespace bletwin
