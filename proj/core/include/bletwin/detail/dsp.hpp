#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace bletwin::detail {

/// 4-term Blackman-Harris window on u in [-1, 1]; ~-92 dB sidelobes.
inline double blackman_harris(double u) {
    const double pu = std::numbers::pi * u;
    return 0.35875 + 0.48829 * std::cos(pu) + 0.14128 * std::cos(2.0 * pu) +
           0.01168 * std::cos(3.0 * pu);
}

/// Windowed-sinc fractional interpolation: y[n] = x(n * step) on the input grid.
/// For step > 1 (decimation) the kernel cutoff is scaled to keep images below
/// the window's stopband.
inline std::vector<std::complex<double>> resample_by_step(
    const std::vector<std::complex<double>>& x, double step, int half_taps = 8) {
    const double stretch = std::max(1.0, step);
    const int half = static_cast<int>(std::ceil(half_taps * stretch));
    const std::size_t n_in = x.size();
    if (n_in == 0) return {};
    const std::size_t n_out =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_in - 1) / step)) + 1;

    std::vector<std::complex<double>> y(n_out);
    for (std::size_t n = 0; n < n_out; ++n) {
        const double t = static_cast<double>(n) * step;
        const long k0 = static_cast<long>(std::floor(t));
        std::complex<double> acc = 0.0;
        for (long k = k0 - half + 1; k <= k0 + half; ++k) {
            if (k < 0 || k >= static_cast<long>(n_in)) continue;
            const double d = (t - static_cast<double>(k)) / stretch;
            const double s =
                (d == 0.0) ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
            acc += x[static_cast<std::size_t>(k)] *
                   (s * blackman_harris(static_cast<double>(t - k) / half) / stretch);
        }
        y[n] = acc;
    }
    return y;
}

}  // namespace bletwin::detail
