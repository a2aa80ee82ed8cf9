#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bletwin/detail/rng.hpp"
#include "bletwin/modulator.hpp"
#include "support/oracles.hpp"

using namespace bletwin;

TEST_CASE("gaussian taps have unit DC gain and are symmetric") {
    for (double bt : {0.3, 0.5, 1.0}) {
        for (int sps : {2, 8, 16}) {
            const auto taps = gaussian_taps(bt, sps, 3);
            CHECK(std::abs(std::accumulate(taps.begin(), taps.end(), 0.0) - 1.0) < 1e-12);
            for (std::size_t i = 0; i < taps.size(); ++i)
                CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(gaussian_taps(0.0, 16, 3), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_taps(0.5, 16, 0), std::invalid_argument);
}

TEST_CASE("gaussian filtering attenuates an alternating NRZ wave") {
    const auto taps = gaussian_taps(0.5, 16, 3);
    // Convolve with a +/-1 square wave of period 2 symbols (the derived oracle).
    std::vector<double> wave(16 * 40);
    for (std::size_t i = 0; i < wave.size(); ++i) wave[i] = ((i / 16) % 2 == 0) ? 1.0 : -1.0;
    double peak = 0.0;
    for (std::size_t n = taps.size(); n + taps.size() < wave.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * wave[n + k];
        peak = std::max(peak, std::abs(acc));
    }
    CHECK(peak < 1.0);
    CHECK(peak > 0.4);  // BT=0.5 does not crush the eye either
}

TEST_CASE("modulator emits a constant envelope") {
    detail::Rng rng(5);
    BitVec bits(256);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    const IqFrame frame = gfsk_modulate(bits, ModConfig{});
    REQUIRE(frame.samples.size() == bits.size() * 16);
    double worst = 0.0;
    for (const auto& s : frame.samples) worst = std::max(worst, std::abs(std::abs(s) - 1.0));
    CHECK(worst < 1e-9);
}

TEST_CASE("all-ones bits settle to a +deviation tone") {
    BitVec ones(64, 1);
    ModConfig cfg;
    const IqFrame frame = gfsk_modulate(ones, cfg);
    const auto freq = instantaneous_frequency(frame);
    // Edge priming makes the whole run settled, not just the tail.
    for (std::size_t n = 16; n + 16 < freq.size(); ++n)
        CHECK(freq[n] == doctest::Approx(250e3).epsilon(1e-6));
    const double tail =
        std::accumulate(freq.end() - 20, freq.end(), 0.0) / 20.0;
    CHECK(std::abs(tail - 250e3) < 1.0);
}

TEST_CASE("alternating preamble swings below the full deviation") {
    BitVec pre = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const IqFrame frame = gfsk_modulate(pre, ModConfig{});
    const auto freq = instantaneous_frequency(frame);
    double peak = 0.0;
    for (double f : freq) peak = std::max(peak, std::abs(f));
    CHECK(peak < 250e3);
    CHECK(peak > 150e3);  // the BLE minimum for 1010 data is 185 kHz at BT=0.5
}

TEST_CASE("instantaneous frequency never exceeds the deviation bound") {
    detail::Rng rng(6);
    BitVec bits(512);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    ModConfig cfg;
    cfg.center_offset = 100e3;
    const auto freq = instantaneous_frequency(gfsk_modulate(bits, cfg));
    for (double f : freq) {
        CHECK(f <= cfg.center_offset + cfg.deviation + 1e-6);
        CHECK(f >= cfg.center_offset - cfg.deviation - 1e-6);
    }
}

TEST_CASE("instantaneous frequency of a pure tone and its conjugate") {
    IqFrame tone;
    tone.sample_rate = 16e6;
    tone.samples.resize(1000);
    const double f = 1.25e6;
    for (std::size_t n = 0; n < tone.samples.size(); ++n) {
        const double ph = 2.0 * M_PI * f * static_cast<double>(n) / tone.sample_rate;
        tone.samples[n] = {std::cos(ph), std::sin(ph)};
    }
    for (double v : instantaneous_frequency(tone)) CHECK(v == doctest::Approx(f).epsilon(1e-9));

    IqFrame conj = tone;
    for (auto& s : conj.samples) s = std::conj(s);
    for (double v : instantaneous_frequency(conj)) CHECK(v == doctest::Approx(-f).epsilon(1e-9));

    IqFrame tiny;
    tiny.sample_rate = 16e6;
    tiny.samples.resize(1);
    CHECK_THROWS_AS(instantaneous_frequency(tiny), std::invalid_argument);
}

TEST_CASE("identical input produces a bit-identical sample stream") {
    BitVec bits = {1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0};
    const IqFrame a = gfsk_modulate(bits, ModConfig{});
    const IqFrame b = gfsk_modulate(bits, ModConfig{});
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("99 percent of the power stays within 1 MHz of center") {
    detail::Rng rng(77);
    BitVec bits(16384 / 16);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.bit());
    const IqFrame frame = gfsk_modulate(bits, ModConfig{});  // 16384 samples
    const auto p = oracles::periodogram(frame.samples);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    // Bins within +/-1 MHz at fs=16 MHz: |f| <= fs/16.
    const std::size_t n = p.size();
    double inband = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double f = static_cast<double>(k) / static_cast<double>(n) * 16e6;
        if (f > 8e6) f -= 16e6;
        if (std::abs(f) <= 1e6) inband += p[k];
    }
    CHECK(inband / total > 0.99);
}

TEST_CASE("modulator validates its configuration") {
    BitVec bits = {1, 0};
    ModConfig bad;
    bad.sps = 1;
    CHECK_THROWS_AS(gfsk_modulate(bits, bad), std::invalid_argument);
    bad = ModConfig{};
    bad.bt = 0.0;
    CHECK_THROWS_AS(gfsk_modulate(bits, bad), std::invalid_argument);
    bad = ModConfig{};
    bad.deviation = -1.0;
    CHECK_THROWS_AS(gfsk_modulate(bits, bad), std::invalid_argument);
    CHECK_THROWS_AS(gfsk_modulate(BitVec{}, ModConfig{}), std::invalid_argument);
}
