#include "bletwin/modulator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bletwin {

void ModConfig::validate() const {
    if (sps < 2) throw std::invalid_argument("sps must be >= 2");
    if (deviation <= 0) throw std::invalid_argument("deviation must be positive");
    if (bt <= 0 || bt > 1) throw std::invalid_argument("bt must be in (0, 1]");
    if (symbol_rate <= 0) throw std::invalid_argument("symbol_rate must be positive");
    if (span_symbols < 1) throw std::invalid_argument("span_symbols must be >= 1");
}

std::vector<double> gaussian_taps(double bt, int sps, int span_symbols) {
    if (bt <= 0 || sps < 1 || span_symbols < 1)
        throw std::invalid_argument("gaussian_taps: parameters must be positive");
    // 3-dB bandwidth B with B*T = bt gives sigma = sqrt(ln 2) / (2 pi bt) symbols.
    const double sigma_samples = std::sqrt(std::numbers::ln2) / (2.0 * std::numbers::pi * bt) * sps;
    const int half = span_symbols * sps / 2;
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double v = std::exp(-0.5 * (k / sigma_samples) * (k / sigma_samples));
        taps[static_cast<std::size_t>(k + half)] = v;
        sum += v;
    }
    for (auto& t : taps) t /= sum;
    return taps;
}

IqFrame gfsk_modulate(std::span<const uint8_t> bits, const ModConfig& cfg) {
    cfg.validate();
    if (bits.empty()) throw std::invalid_argument("gfsk_modulate: empty bit sequence");

    const auto taps = gaussian_taps(cfg.bt, cfg.sps, cfg.span_symbols);
    const std::size_t half = taps.size() / 2;
    const std::size_t n_out = bits.size() * static_cast<std::size_t>(cfg.sps);

    // NRZ levels, padded by repeating the edge bits so the filter starts settled.
    std::vector<double> levels(n_out + 2 * half);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        std::size_t bit_idx = (i < half) ? 0 : (i - half) / static_cast<std::size_t>(cfg.sps);
        if (bit_idx >= bits.size()) bit_idx = bits.size() - 1;
        levels[i] = (bits[bit_idx] & 1u) ? 1.0 : -1.0;
    }

    IqFrame frame;
    frame.samples.resize(n_out);
    frame.sample_rate = cfg.sample_rate();
    frame.center_offset_hz = cfg.center_offset;
    frame.origin = FrameOrigin::Tx;

    const double fs = cfg.sample_rate();
    double phase = 0.0;
    for (std::size_t n = 0; n < n_out; ++n) {
        double filtered = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) filtered += taps[k] * levels[n + k];
        const double f_inst = cfg.center_offset + cfg.deviation * filtered;
        phase += 2.0 * std::numbers::pi * f_inst / fs;
        frame.samples[n] = {std::cos(phase), std::sin(phase)};
    }
    return frame;
}

IqFrame gfsk_modulate(const AirBits& air, const ModConfig& cfg) {
    return gfsk_modulate(std::span<const uint8_t>(air.bits), cfg);
}

std::vector<double> instantaneous_frequency(const IqFrame& frame) {
    if (frame.samples.size() < 2)
        throw std::invalid_argument("instantaneous_frequency: need at least 2 samples");
    std::vector<double> freq(frame.samples.size() - 1);
    const double scale = frame.sample_rate / (2.0 * std::numbers::pi);
    for (std::size_t n = 0; n + 1 < frame.samples.size(); ++n)
        freq[n] = std::arg(frame.samples[n + 1] * std::conj(frame.samples[n])) * scale;
    return freq;
}

}  // namespace bletwin
