#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bletwin/channel.hpp"
#include "bletwin/modulator.hpp"
#include "bletwin/receiver.hpp"

namespace bletwin {

/// PER threshold equivalent to 0.1% BER on maximum-length packets.
inline constexpr double kSensitivityPerThreshold = 0.308;
inline constexpr int kMaxPacketPayloadBits = 368;  // packet bits excluding the preamble

struct SweepConfig {
    std::vector<double> levels;     // dBm (levels_are_dbm) or SNR dB points
    bool levels_are_dbm = true;
    int packets_per_level = 2000;
    int payload_bytes = 37;
    unsigned channel_index = 37;
    FrontEndConfig fe;
    ModConfig mod;
    ChannelConfig channel;          // template; per-level SNR and per-packet seeds filled in
    uint64_t seed = 1;
    // Static front-end loading: scale the ADC clip level to the expected input RMS
    // (signal power is known and the noise level is set by this harness).
    bool auto_full_scale = true;
    double full_scale_headroom = 3.0;
    int threads = 0;                // 0 = hardware concurrency

    void validate() const;
};

struct LevelResult {
    double level = 0.0;  // as configured (dBm or dB)
    double snr_db = 0.0;
    int n_packets = 0;
    int n_errors = 0;
    double per = 0.0;
    double ber_equivalent = 0.0;
};

struct SweepResult {
    std::vector<LevelResult> levels;
    SweepConfig cfg;
};

/// Independent-bit-error inversion: ber = 1 - (1 - per)^(1/bits).
double per_to_ber(double per, int bits_per_packet = kMaxPacketPayloadBits);
double ber_to_per(double ber, int bits_per_packet = kMaxPacketPayloadBits);

SweepResult run_per_sweep(const SweepConfig& cfg);

/// Lowest power (or SNR) at which PER <= threshold, log-domain interpolated between
/// the bracketing sweep points; nullopt when the threshold is never reached.
std::optional<double> sensitivity_from_sweep(const SweepResult& result,
                                             double per_threshold = kSensitivityPerThreshold);

/// CSV schema: "# bletwin sweep csv v1" then level,n,errors,per,ber rows.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// Deterministic random test packet used by the sweep and the loopback tests:
/// ADV_IND with a random address and random GAP payload filling payload_bytes.
AdvPdu random_test_pdu(uint64_t seed, int payload_bytes);

}  // namespace bletwin
