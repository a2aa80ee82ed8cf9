#pragma once

// Independent reference implementations used as test oracles. These deliberately
// take different computational routes than the library code they check.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bletwin/receiver.hpp"

namespace oracles {

/// Schoolbook polynomial long division: append 24 zero bits, fold the init register
/// into the top of the message (MSB-first), divide by g(x) = x^24 + 0x65B, return
/// the remainder as a register value.
uint32_t crc24_long_division(std::span<const uint8_t> bits, uint32_t init = 0x555555);

/// Whitening keystream via the packed 8-bit coefficient formulation (bit-reversed
/// channel OR 2, XOR 0x11 on feedback) rather than the position-array register.
std::vector<uint8_t> whitening_keystream_reference(unsigned channel, std::size_t nbits);

/// Naive per-window complex dot product against a window-local tone template.
double window_correlation_magnitude(const bletwin::QuantizedIq& q, std::size_t start,
                                    std::size_t window, double tone_hz);

/// In-place iterative radix-2 FFT (size must be a power of two).
void fft(std::vector<std::complex<double>>& x);

/// |X_k|^2 / N^2 periodogram of a (power-of-two) sample block.
std::vector<double> periodogram(const std::vector<std::complex<double>>& samples);

/// Frequency of the strongest periodogram bin, in Hz, in (-fs/2, fs/2].
double dominant_frequency_hz(const std::vector<std::complex<double>>& samples, double fs);

/// Wilson 95% confidence interval for a binomial proportion.
struct Interval {
    double lo, hi;
};
Interval wilson95(int successes, int trials);

/// Byte-level reference encoder for a SCAN_REQ PDU (header + ScanA + AdvA).
std::vector<uint8_t> scan_req_reference_bytes(const std::array<uint8_t, 6>& scan_addr,
                                              const std::array<uint8_t, 6>& adv_addr);

}  // namespace oracles
