#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bletwin/frames.hpp"

namespace bletwin {

enum class FrameOrigin { Tx, Channel, FrontEnd };

/// Complex sample stream plus the metadata needed to interpret it. center_offset_hz
/// records where the signal's spectral center sits relative to baseband.
struct IqFrame {
    std::vector<std::complex<double>> samples;
    double sample_rate = 0.0;
    double center_offset_hz = 0.0;
    FrameOrigin origin = FrameOrigin::Tx;
};

struct ModConfig {
    double symbol_rate = 1e6;
    double deviation = 250e3;
    double bt = 0.5;
    int sps = 16;
    double center_offset = 0.0;
    int span_symbols = 3;

    double sample_rate() const { return symbol_rate * sps; }
    void validate() const;  // throws std::invalid_argument
};

/// Unit-DC-gain symmetric Gaussian pulse for the given bandwidth-time product.
/// Tap count is span_symbols * sps + 1.
std::vector<double> gaussian_taps(double bt, int sps, int span_symbols);

/// GFSK: NRZ-map bits, Gaussian-filter, integrate frequency to phase, emit a
/// constant-envelope complex stream of exactly bits.size() * sps samples.
/// Bit 1 maps to +deviation, bit 0 to -deviation.
IqFrame gfsk_modulate(std::span<const uint8_t> bits, const ModConfig& cfg);
IqFrame gfsk_modulate(const AirBits& air, const ModConfig& cfg);

/// Per-sample discrete phase-difference frequency estimate, length N-1.
/// Throws std::invalid_argument for frames shorter than 2 samples.
std::vector<double> instantaneous_frequency(const IqFrame& frame);

}  // namespace bletwin
