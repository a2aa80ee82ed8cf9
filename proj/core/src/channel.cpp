#include "bletwin/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bletwin/detail/rng.hpp"

namespace bletwin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Blackman-windowed sinc interpolator, 8 taps per side.
constexpr int kInterpHalfTaps = 8;

double windowed_sinc(double x) {
    if (std::abs(x) >= kInterpHalfTaps) return 0.0;
    const double s = (x == 0.0) ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double u = x / kInterpHalfTaps;  // in [-1, 1]
    const double w = 0.42 + 0.5 * std::cos(std::numbers::pi * u) + 0.08 * std::cos(2.0 * std::numbers::pi * u);
    return s * w;
}

}  // namespace

double ChannelConfig::resolve_snr_db() const {
    if (snr_db.has_value() == rx_power_dbm.has_value())
        throw std::invalid_argument("exactly one of snr_db / rx_power_dbm must be set");
    if (snr_db) return *snr_db;
    return power_to_snr(*rx_power_dbm, noise_figure_db, noise_bandwidth_hz);
}

double power_to_snr(double rx_power_dbm, double noise_figure_db, double bandwidth_hz) {
    if (bandwidth_hz <= 0) throw std::invalid_argument("bandwidth must be positive");
    const double noise_floor_dbm = -174.0 + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
    return rx_power_dbm - noise_floor_dbm;
}

IqFrame apply_awgn(const IqFrame& frame, double snr_db, uint64_t seed, double bandwidth_hz) {
    if (std::isinf(snr_db) && snr_db > 0) return frame;
    if (frame.sample_rate <= 0) throw std::invalid_argument("frame has no sample rate");

    double signal_power = 0.0;
    for (const auto& s : frame.samples) signal_power += std::norm(s);
    signal_power /= static_cast<double>(frame.samples.size());

    // White noise across fs; the share falling into bandwidth_hz sets the SNR.
    const double snr_lin = std::pow(10.0, snr_db / 10.0);
    const double sigma2 = signal_power * (frame.sample_rate / bandwidth_hz) / snr_lin;
    const double sigma_rail = std::sqrt(sigma2 / 2.0);

    detail::Rng rng(detail::derive_seed(seed, 0x41574e47 /* stage tag */));
    IqFrame out = frame;
    out.origin = FrameOrigin::Channel;
    for (auto& s : out.samples)
        s += std::complex<double>(sigma_rail * rng.gaussian(), sigma_rail * rng.gaussian());
    return out;
}

IqFrame apply_cfo(const IqFrame& frame, double cfo_hz, double drift_hz_per_s) {
    IqFrame out = frame;
    out.origin = FrameOrigin::Channel;
    const double ts = 1.0 / frame.sample_rate;
    for (std::size_t n = 0; n < out.samples.size(); ++n) {
        const double t = static_cast<double>(n) * ts;
        const double ph = kTwoPi * (cfo_hz * t + 0.5 * drift_hz_per_s * t * t);
        out.samples[n] *= std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return out;
}

IqFrame apply_phase_noise(const IqFrame& frame, double linewidth_hz, uint64_t seed) {
    if (linewidth_hz < 0) throw std::invalid_argument("linewidth must be >= 0");
    if (linewidth_hz == 0.0) return frame;
    IqFrame out = frame;
    out.origin = FrameOrigin::Channel;
    detail::Rng rng(detail::derive_seed(seed, 0x504e4f49));
    const double inc_sigma = std::sqrt(kTwoPi * linewidth_hz / frame.sample_rate);
    double phi = 0.0;
    for (auto& s : out.samples) {
        phi += inc_sigma * rng.gaussian();
        s *= std::complex<double>(std::cos(phi), std::sin(phi));
    }
    return out;
}

IqFrame apply_clock_offset(const IqFrame& frame, double ppm) {
    if (std::abs(ppm) >= 1000.0) throw std::invalid_argument("|ppm| must be < 1000");
    if (ppm == 0.0) return frame;

    const double r = 1.0 + ppm * 1e-6;
    const std::size_t n_in = frame.samples.size();
    const std::size_t n_out =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_in - 1) / r)) + 1;

    IqFrame out;
    out.sample_rate = frame.sample_rate;
    out.center_offset_hz = frame.center_offset_hz;
    out.origin = FrameOrigin::Channel;
    out.samples.resize(n_out);
    for (std::size_t n = 0; n < n_out; ++n) {
        const double t = static_cast<double>(n) * r;
        const long k0 = static_cast<long>(std::floor(t));
        std::complex<double> acc = 0.0;
        for (long k = k0 - kInterpHalfTaps + 1; k <= k0 + kInterpHalfTaps; ++k) {
            if (k < 0 || k >= static_cast<long>(n_in)) continue;
            acc += frame.samples[static_cast<std::size_t>(k)] * windowed_sinc(t - static_cast<double>(k));
        }
        out.samples[n] = acc;
    }
    return out;
}

IqFrame apply_channel(const IqFrame& frame, const ChannelConfig& cfg) {
    IqFrame out = frame;
    if (cfg.cfo_hz != 0.0 || cfg.drift_hz_per_s != 0.0)
        out = apply_cfo(out, cfg.cfo_hz, cfg.drift_hz_per_s);
    if (cfg.linewidth_hz > 0.0)
        out = apply_phase_noise(out, cfg.linewidth_hz, detail::derive_seed(cfg.seed, 1));
    if (cfg.clock_ppm != 0.0) out = apply_clock_offset(out, cfg.clock_ppm);
    const double snr = cfg.resolve_snr_db();
    if (!(std::isinf(snr) && snr > 0))
        out = apply_awgn(out, snr, detail::derive_seed(cfg.seed, 2), cfg.noise_bandwidth_hz);
    out.origin = FrameOrigin::Channel;
    return out;
}

}  // namespace bletwin
