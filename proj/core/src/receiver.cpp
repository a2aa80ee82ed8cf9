#include "bletwin/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bletwin/detail/dsp.hpp"

namespace bletwin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fresh prefix-sum accumulators every block keeps rounding drift bounded on long
// captures without giving up the O(1)-per-sample sliding window.
constexpr std::size_t kCorrelatorBlock = 4096;

void sliding_magnitudes(const std::vector<std::complex<double>>& rotated, std::size_t w,
                        std::vector<double>& out) {
    const std::size_t n = rotated.size();
    if (n < w) return;
    out.resize(n - w + 1);
    std::vector<std::complex<double>> prefix;
    for (std::size_t block = 0; block < n; block += kCorrelatorBlock) {
        const std::size_t last_start = std::min(block + kCorrelatorBlock, n - w + 1);
        if (block >= last_start) break;
        const std::size_t span = (last_start - 1 - block) + w;  // samples this block touches
        prefix.assign(span + 1, {0.0, 0.0});
        for (std::size_t i = 0; i < span; ++i) prefix[i + 1] = prefix[i] + rotated[block + i];
        for (std::size_t s = block; s < last_start; ++s)
            out[s] = std::abs(prefix[s - block + w] - prefix[s - block]);
    }
}

}  // namespace

void FrontEndConfig::validate() const {
    if (sample_rate <= 2.0 * (if_hz + deviation))
        throw std::invalid_argument("sample_rate must exceed 2*(if_hz + deviation)");
    if (adc_bits < 2 || adc_bits > 16) throw std::invalid_argument("adc_bits must be in [2, 16]");
    if (full_scale <= 0) throw std::invalid_argument("full_scale must be positive");
    if (symbol_rate <= 0 || sample_rate < 2 * symbol_rate)
        throw std::invalid_argument("sample_rate must cover the symbol rate");
}

QuantizedIq low_if_front_end(const IqFrame& frame, const FrontEndConfig& cfg) {
    cfg.validate();
    if (frame.sample_rate <= 0) throw std::invalid_argument("frame has no sample rate");

    // Mix so the signal center lands on the IF, whatever the frame was centered on.
    const double shift_hz = cfg.if_hz - frame.center_offset_hz;
    std::vector<std::complex<double>> mixed(frame.samples.size());
    const double w = kTwoPi * shift_hz / frame.sample_rate;
    for (std::size_t n = 0; n < mixed.size(); ++n) {
        const double ph = w * static_cast<double>(n);
        mixed[n] = frame.samples[n] * std::complex<double>(std::cos(ph), std::sin(ph));
    }

    if (frame.sample_rate != cfg.sample_rate)
        mixed = detail::resample_by_step(mixed, frame.sample_rate / cfg.sample_rate);

    QuantizedIq q;
    q.cfg = cfg;
    const int levels = 1 << (cfg.adc_bits - 1);
    const double delta = cfg.full_scale / levels;
    const double lo = -levels, hi = levels - 1;
    q.i_codes.resize(mixed.size());
    q.q_codes.resize(mixed.size());
    for (std::size_t n = 0; n < mixed.size(); ++n) {
        q.i_codes[n] = static_cast<int16_t>(std::clamp(std::floor(mixed[n].real() / delta), lo, hi));
        q.q_codes[n] = static_cast<int16_t>(std::clamp(std::floor(mixed[n].imag() / delta), lo, hi));
    }
    return q;
}

double dequantize_code(int16_t code, const FrontEndConfig& cfg) {
    const int levels = 1 << (cfg.adc_bits - 1);
    const double delta = cfg.full_scale / levels;
    return (static_cast<double>(code) + 0.5) * delta;
}

RollingMetrics rolling_matched_filter(const QuantizedIq& q) {
    const std::size_t w = static_cast<std::size_t>(q.cfg.sps());
    RollingMetrics m;
    m.sps = q.cfg.sps();
    if (q.size() < w) return m;

    const double wm = kTwoPi * (q.cfg.if_hz + q.cfg.deviation) / q.cfg.sample_rate;
    const double ws = kTwoPi * (q.cfg.if_hz - q.cfg.deviation) / q.cfg.sample_rate;
    std::vector<std::complex<double>> rot_mark(q.size()), rot_space(q.size());
    for (std::size_t n = 0; n < q.size(); ++n) {
        const std::complex<double> x(q.i_codes[n], q.q_codes[n]);
        const double a = wm * static_cast<double>(n);
        const double b = ws * static_cast<double>(n);
        rot_mark[n] = x * std::complex<double>(std::cos(a), -std::sin(a));
        rot_space[n] = x * std::complex<double>(std::cos(b), -std::sin(b));
    }
    sliding_magnitudes(rot_mark, w, m.mark);
    sliding_magnitudes(rot_space, w, m.space);
    return m;
}

std::vector<std::pair<double, double>> matched_filter_metrics(const QuantizedIq& q,
                                                              SymbolTiming timing) {
    if (timing.offset_samples < 0 || timing.offset_samples >= timing.sps)
        throw std::invalid_argument("timing offset must be in [0, sps)");
    RollingMetrics m = rolling_matched_filter(q);
    std::vector<std::pair<double, double>> out;
    for (std::size_t s = static_cast<std::size_t>(timing.offset_samples); s < m.mark.size();
         s += static_cast<std::size_t>(timing.sps))
        out.emplace_back(m.mark[s], m.space[s]);
    return out;
}

Result<SymbolTiming> clock_recovery(const RollingMetrics& metrics, int search_window_symbols) {
    const int sps = metrics.sps;
    const std::size_t limit = std::min<std::size_t>(
        metrics.mark.size(), static_cast<std::size_t>(search_window_symbols) *
                                 static_cast<std::size_t>(sps));
    if (limit < 2) return DecodeError::NoSignal;

    // Transition instants of the hard-decision stream, voted into a circular
    // histogram with a small triangular smear; additions only.
    std::vector<int> votes(static_cast<std::size_t>(sps), 0);
    bool prev = metrics.mark[0] > metrics.space[0];
    bool any = false;
    for (std::size_t n = 1; n < limit; ++n) {
        const bool cur = metrics.mark[n] > metrics.space[n];
        if (cur != prev) {
            any = true;
            const int t = static_cast<int>(n % static_cast<std::size_t>(sps));
            for (int j = -2; j <= 2; ++j) {
                const int bin = ((t + j) % sps + sps) % sps;
                votes[static_cast<std::size_t>(bin)] += 3 - std::abs(j);
            }
        }
        prev = cur;
    }
    if (!any) return DecodeError::NoSignal;

    int best = 0;
    for (int k = 1; k < sps; ++k)
        if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) best = k;

    SymbolTiming timing;
    timing.sps = sps;
    timing.offset_samples = (best + sps / 2) % sps;
    return timing;
}

Result<SymbolTiming> clock_recovery(const QuantizedIq& q, int search_window_symbols) {
    return clock_recovery(rolling_matched_filter(q), search_window_symbols);
}

std::optional<PacketCapture> detect_and_capture(const QuantizedIq& q, uint32_t access_address,
                                                int aa_err_threshold) {
    RollingMetrics metrics = rolling_matched_filter(q);
    auto timing = clock_recovery(metrics, kDefaultSearchWindowSymbols);
    if (!timing) return std::nullopt;
    const int sps = timing.value().sps;

    // Decisions on the recovered grid. The access-address search below absorbs any
    // whole-symbol shift, so only the circular phase of the grid matters.
    BitVec stream;
    for (std::size_t s = static_cast<std::size_t>(timing.value().offset_samples);
         s < metrics.mark.size(); s += static_cast<std::size_t>(sps))
        stream.push_back(metrics.mark[s] > metrics.space[s] ? 1 : 0);

    uint8_t aa_bits[32];
    for (int i = 0; i < 32; ++i) aa_bits[i] = (access_address >> i) & 1u;

    const std::size_t capture_len = kMaxPacketBits - 8 - 32;  // header + payload + crc
    for (std::size_t p = 31; p < stream.size(); ++p) {
        int mismatches = 0;
        for (int i = 0; i < 32; ++i)
            mismatches += (stream[p - 31 + static_cast<std::size_t>(i)] != aa_bits[i]);
        if (mismatches <= aa_err_threshold) {
            PacketCapture cap;
            cap.aa_errors = mismatches;
            cap.start_index = static_cast<std::size_t>(timing.value().offset_samples) +
                              (p - 31) * static_cast<std::size_t>(sps);
            const std::size_t first = p + 1;
            const std::size_t last = std::min(stream.size(), first + capture_len);
            cap.bits.assign(stream.begin() + static_cast<long>(first),
                            stream.begin() + static_cast<long>(last));
            return cap;
        }
    }
    return std::nullopt;
}

Result<AdvPdu> demodulate_quantized(const QuantizedIq& q, ChannelIndex channel_index) {
    RollingMetrics metrics = rolling_matched_filter(q);
    auto timing = clock_recovery(metrics, kDefaultSearchWindowSymbols);
    if (!timing) return DecodeError::NoSignal;

    auto capture = detect_and_capture(q, kAdvAccessAddress, kDefaultAaErrorThreshold);
    if (!capture) return DecodeError::NoDetection;

    BitVec packet;
    packet.reserve(32 + capture->bits.size());
    append_u32_lsb_first(packet, kAdvAccessAddress);
    packet.insert(packet.end(), capture->bits.begin(), capture->bits.end());
    return parse_packet(packet, channel_index);
}

Result<AdvPdu> demodulate_packet(const IqFrame& frame, const FrontEndConfig& fe,
                                 ChannelIndex channel_index) {
    return demodulate_quantized(low_if_front_end(frame, fe), channel_index);
}

}  // namespace bletwin
