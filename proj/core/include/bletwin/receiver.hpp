#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bletwin/channel.hpp"
#include "bletwin/frames.hpp"
#include "bletwin/modulator.hpp"
#include "bletwin/result.hpp"

namespace bletwin {

/// Receiver front-end model: complex mix to a low IF, resample to the ADC rate,
/// then quantize I and Q independently. symbol_rate and deviation parameterize the
/// demodulator templates that run on the quantized stream.
struct FrontEndConfig {
    double if_hz = 2.5e6;
    double sample_rate = 16e6;
    int adc_bits = 4;
    double full_scale = 1.0;
    double symbol_rate = 1e6;
    double deviation = 250e3;

    int sps() const { return static_cast<int>(std::lround(sample_rate / symbol_rate)); }
    void validate() const;  // throws std::invalid_argument
};

struct QuantizedIq {
    std::vector<int16_t> i_codes, q_codes;
    FrontEndConfig cfg;

    std::size_t size() const { return i_codes.size(); }
};

struct SymbolTiming {
    int offset_samples = 0;  // phase of the symbol grid, in [0, sps)
    int sps = 16;
};

struct PacketCapture {
    BitVec bits;              // demodulated bits following the access address
    std::size_t start_index;  // sample index where the access address begins
    int aa_errors = 0;
};

/// Sliding mark/space correlation magnitudes: entry n is the magnitude of the
/// one-symbol-window correlation starting at sample n, against tones at
/// if_hz + deviation (mark) and if_hz - deviation (space).
struct RollingMetrics {
    std::vector<double> mark, space;
    int sps = 16;
};

inline constexpr int kDefaultAaErrorThreshold = 2;
inline constexpr int kDefaultSearchWindowSymbols = 40;

QuantizedIq low_if_front_end(const IqFrame& frame, const FrontEndConfig& cfg);

/// Reconstruction of a quantizer code to the center of its cell (test instrumentation).
double dequantize_code(int16_t code, const FrontEndConfig& cfg);

RollingMetrics rolling_matched_filter(const QuantizedIq& q);

/// Per-symbol (mark_mag, space_mag) pairs on the timing grid.
std::vector<std::pair<double, double>> matched_filter_metrics(const QuantizedIq& q,
                                                              SymbolTiming timing);

/// Bit-transition clock recovery: per-sample hard decisions from the sliding matched
/// filter, transition instants voted into a circular histogram, symbol windows
/// centered between transitions. Fails with NoSignal when nothing toggles.
Result<SymbolTiming> clock_recovery(const QuantizedIq& q,
                                    int search_window_symbols = kDefaultSearchWindowSymbols);
Result<SymbolTiming> clock_recovery(const RollingMetrics& metrics,
                                    int search_window_symbols = kDefaultSearchWindowSymbols);

/// Demodulate a rolling bit stream at the recovered timing and hunt for the access
/// address (aa_err_threshold tolerated bit mismatches); capture what follows.
std::optional<PacketCapture> detect_and_capture(const QuantizedIq& q, uint32_t access_address,
                                                int aa_err_threshold = kDefaultAaErrorThreshold);

/// Full receive chain: front end -> detect/capture -> dewhiten + CRC + parse.
Result<AdvPdu> demodulate_packet(const IqFrame& frame, const FrontEndConfig& fe,
                                 ChannelIndex channel_index);

/// Same chain starting from an already-quantized capture (e.g. a q4 file).
Result<AdvPdu> demodulate_quantized(const QuantizedIq& q, ChannelIndex channel_index);

}  // namespace bletwin
