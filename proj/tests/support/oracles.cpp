#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracles {

uint32_t crc24_long_division(std::span<const uint8_t> bits, uint32_t init) {
    // Dividend: message bits followed by 24 zeros, with the init register XOR'ed
    // into the leading 24 positions (MSB of the register first).
    std::vector<uint8_t> s(bits.begin(), bits.end());
    s.insert(s.end(), 24, 0);
    for (int j = 0; j < 24; ++j) s[static_cast<std::size_t>(j)] ^= (init >> (23 - j)) & 1u;

    uint8_t g[25];
    g[0] = 1;
    for (int k = 1; k <= 24; ++k) g[k] = (0x65B >> (24 - k)) & 1u;

    for (std::size_t i = 0; i + 24 < s.size(); ++i) {
        if (!s[i]) continue;
        for (int k = 0; k <= 24; ++k) s[i + static_cast<std::size_t>(k)] ^= g[k];
    }

    uint32_t reg = 0;
    const std::size_t tail = s.size() - 24;
    for (int j = 0; j < 24; ++j)
        reg |= static_cast<uint32_t>(s[tail + static_cast<std::size_t>(j)]) << (23 - j);
    return reg;
}

std::vector<uint8_t> whitening_keystream_reference(unsigned channel, std::size_t nbits) {
    auto swapbits = [](uint8_t x) {
        uint8_t r = 0;
        for (int i = 0; i < 8; ++i) r = static_cast<uint8_t>(r | ((x >> i) & 1u) << (7 - i));
        return r;
    };
    uint8_t coeff = static_cast<uint8_t>(swapbits(static_cast<uint8_t>(channel)) | 2u);
    std::vector<uint8_t> out;
    out.reserve(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
        if (coeff & 0x80u) {
            out.push_back(1);
            coeff = static_cast<uint8_t>((coeff ^ 0x11u) << 1);
        } else {
            out.push_back(0);
            coeff = static_cast<uint8_t>(coeff << 1);
        }
    }
    return out;
}

double window_correlation_magnitude(const bletwin::QuantizedIq& q, std::size_t start,
                                    std::size_t window, double tone_hz) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < window; ++k) {
        const std::size_t n = start + k;
        const std::complex<double> x(q.i_codes[n], q.q_codes[n]);
        const double ph = 2.0 * std::numbers::pi * tone_hz * static_cast<double>(k) / q.cfg.sample_rate;
        acc += x * std::complex<double>(std::cos(ph), -std::sin(ph));
    }
    return std::abs(acc);
}

void fft(std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be 2^k");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<double> periodogram(const std::vector<std::complex<double>>& samples) {
    std::vector<std::complex<double>> x = samples;
    fft(x);
    std::vector<double> p(x.size());
    const double n2 = static_cast<double>(x.size()) * static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) p[k] = std::norm(x[k]) / n2;
    return p;
}

double dominant_frequency_hz(const std::vector<std::complex<double>>& samples, double fs) {
    const auto p = periodogram(samples);
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    const double n = static_cast<double>(p.size());
    double f = static_cast<double>(peak) / n * fs;
    if (f > fs / 2) f -= fs;
    return f;
}

Interval wilson95(int successes, int trials) {
    const double z = 1.959963984540054;
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<uint8_t> scan_req_reference_bytes(const std::array<uint8_t, 6>& scan_addr,
                                              const std::array<uint8_t, 6>& adv_addr) {
    std::vector<uint8_t> bytes;
    bytes.push_back(0x03);  // type=0b0011, rfu=0, txadd=0, rxadd=0
    bytes.push_back(12);    // payload length
    bytes.insert(bytes.end(), scan_addr.begin(), scan_addr.end());
    bytes.insert(bytes.end(), adv_addr.begin(), adv_addr.end());
    return bytes;
}

}  // namespace oracles
