#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "bletwin/modulator.hpp"

namespace bletwin {

/// Impairment specification for one pass through the channel. Exactly one of
/// snr_db / rx_power_dbm must be set; snr_db = +inf disables noise entirely.
struct ChannelConfig {
    std::optional<double> snr_db;
    std::optional<double> rx_power_dbm;
    double noise_figure_db = 10.0;
    double noise_bandwidth_hz = 1e6;
    double cfo_hz = 0.0;
    double drift_hz_per_s = 0.0;
    double linewidth_hz = 0.0;
    double clock_ppm = 0.0;
    uint64_t seed = 0;

    /// SNR in noise_bandwidth_hz, from whichever of the two level fields is set.
    /// Throws std::invalid_argument unless exactly one is set.
    double resolve_snr_db() const;

    static ChannelConfig disabled() {
        ChannelConfig c;
        c.snr_db = std::numeric_limits<double>::infinity();
        return c;
    }
};

/// Thermal-noise-floor mapping: snr = power - (-174 dBm/Hz + NF + 10 log10 B).
double power_to_snr(double rx_power_dbm, double noise_figure_db, double bandwidth_hz);

/// Complex AWGN sized so the SNR measured in `bandwidth_hz` around the signal
/// equals snr_db (the noise itself is white across the frame's sample rate).
IqFrame apply_awgn(const IqFrame& frame, double snr_db, uint64_t seed, double bandwidth_hz = 1e6);

/// Static frequency offset plus linear drift: multiply by exp(j 2 pi (f t + d t^2 / 2)).
IqFrame apply_cfo(const IqFrame& frame, double cfo_hz, double drift_hz_per_s = 0.0);

/// Wiener phase noise with per-sample increment variance 2 pi linewidth Ts.
IqFrame apply_phase_noise(const IqFrame& frame, double linewidth_hz, uint64_t seed);

/// Sample-clock error: resample by r = 1 + ppm 1e-6, y[n] = x(n r); output length
/// is about N / r. |ppm| must be < 1000.
IqFrame apply_clock_offset(const IqFrame& frame, double ppm);

/// All impairments in physical order: cfo/drift, phase noise, clock error, noise.
IqFrame apply_channel(const IqFrame& frame, const ChannelConfig& cfg);

}  // namespace bletwin
