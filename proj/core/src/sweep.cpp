#include "bletwin/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "bletwin/detail/rng.hpp"
#include "bletwin/frames.hpp"

namespace bletwin {

void SweepConfig::validate() const {
    if (levels.empty()) throw std::invalid_argument("sweep needs at least one level");
    if (packets_per_level < 1) throw std::invalid_argument("packets_per_level must be >= 1");
    if (payload_bytes < static_cast<int>(kMinPayloadBytes) ||
        payload_bytes > static_cast<int>(kMaxPayloadBytes))
        throw std::invalid_argument("payload_bytes must be in [6, 37]");
    fe.validate();
    mod.validate();
    if (!ChannelIndex(channel_index).is_advertising())
        throw std::invalid_argument("sweep channel must be an advertising channel");
}

double per_to_ber(double per, int bits_per_packet) {
    if (per < 0.0 || per > 1.0) throw std::out_of_range("per must be in [0, 1]");
    if (bits_per_packet < 1) throw std::invalid_argument("bits_per_packet must be >= 1");
    return 1.0 - std::pow(1.0 - per, 1.0 / bits_per_packet);
}

double ber_to_per(double ber, int bits_per_packet) {
    if (ber < 0.0 || ber > 1.0) throw std::out_of_range("ber must be in [0, 1]");
    return 1.0 - std::pow(1.0 - ber, bits_per_packet);
}

AdvPdu random_test_pdu(uint64_t seed, int payload_bytes) {
    detail::Rng rng(detail::derive_seed(seed, 0x7D0));
    DeviceAddress addr;
    for (auto& b : addr.bytes) b = static_cast<uint8_t>(rng.below(256));

    // One GAP block of manufacturer data sized to hit the requested payload exactly.
    std::vector<GapBlock> blocks;
    int remaining = payload_bytes - 6;
    if (remaining >= 2) {
        GapBlock blk;
        blk.code = 0xFF;
        blk.data.resize(static_cast<std::size_t>(remaining - 2));
        for (auto& b : blk.data) b = static_cast<uint8_t>(rng.below(256));
        blocks.push_back(std::move(blk));
    } else if (remaining == 1) {
        // A data-less block still takes two bytes; fall back to 6+2.
        throw std::invalid_argument("payload_bytes of 7 is not representable with GAP blocks");
    }
    return AdvPdu::adv_ind(addr, std::move(blocks));
}

namespace {

struct PacketVerdict {
    bool error;
};

PacketVerdict run_one_packet(const SweepConfig& cfg, double snr_db, uint64_t level_idx,
                             uint64_t pkt_idx) {
    const uint64_t pkt_seed = detail::derive_seed(cfg.seed, level_idx, pkt_idx);
    const AdvPdu sent = random_test_pdu(pkt_seed, cfg.payload_bytes);
    const ChannelIndex ch(cfg.channel_index);

    AirBits air = assemble_packet(sent, ch);
    IqFrame tx = gfsk_modulate(air, cfg.mod);

    ChannelConfig cc = cfg.channel;
    cc.snr_db = snr_db;
    cc.rx_power_dbm.reset();
    cc.seed = detail::derive_seed(pkt_seed, 0xC4A);
    IqFrame rx = apply_channel(tx, cc);

    FrontEndConfig fe = cfg.fe;
    if (cfg.auto_full_scale) {
        const double snr_lin = std::pow(10.0, snr_db / 10.0);
        const double noise_power = std::isinf(snr_lin)
                                       ? 0.0
                                       : (tx.sample_rate / cc.noise_bandwidth_hz) / snr_lin;
        fe.full_scale = cfg.full_scale_headroom * std::sqrt((1.0 + noise_power) / 2.0);
    }

    auto decoded = demodulate_packet(rx, fe, ch);
    // Counted correct only when the recovered payload matches what went out.
    return {!(decoded && decoded.value() == sent)};
}

}  // namespace

SweepResult run_per_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult result;
    result.cfg = cfg;

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());

    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        const double level = cfg.levels[li];
        const double snr_db =
            cfg.levels_are_dbm
                ? power_to_snr(level, cfg.channel.noise_figure_db, cfg.channel.noise_bandwidth_hz)
                : level;

        std::atomic<int> errors{0};
        std::atomic<int> next{0};
        auto worker = [&]() {
            int local = 0;
            for (int p = next.fetch_add(1); p < cfg.packets_per_level; p = next.fetch_add(1))
                local += run_one_packet(cfg, snr_db, li, static_cast<uint64_t>(p)).error;
            errors += local;
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        LevelResult lr;
        lr.level = level;
        lr.snr_db = snr_db;
        lr.n_packets = cfg.packets_per_level;
        lr.n_errors = errors.load();
        lr.per = static_cast<double>(lr.n_errors) / lr.n_packets;
        lr.ber_equivalent = per_to_ber(lr.per, 8 * cfg.payload_bytes + 16 + 24 + 32);
        result.levels.push_back(lr);
    }
    return result;
}

std::optional<double> sensitivity_from_sweep(const SweepResult& result, double per_threshold) {
    // Sort levels ascending; find the lowest level meeting the threshold and refine
    // against the bracketing failing point by interpolating log10(per) vs level.
    std::vector<LevelResult> sorted = result.levels;
    std::sort(sorted.begin(), sorted.end(),
              [](const LevelResult& a, const LevelResult& b) { return a.level < b.level; });

    std::size_t pass_idx = sorted.size();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].per <= per_threshold) {
            pass_idx = i;
            break;
        }
    }
    if (pass_idx == sorted.size()) return std::nullopt;
    if (pass_idx == 0) return sorted.front().level;

    const LevelResult& lo = sorted[pass_idx - 1];  // failing side
    const LevelResult& hi = sorted[pass_idx];      // passing side
    // Zero counts cannot be placed on a log axis; use half an event as the floor.
    const double per_floor = 0.5 / hi.n_packets;
    const double y0 = std::log10(std::max(lo.per, per_floor));
    const double y1 = std::log10(std::max(hi.per, per_floor));
    const double yt = std::log10(per_threshold);
    if (y0 <= yt) return lo.level;
    if (y1 >= yt) return hi.level;
    const double frac = (y0 - yt) / (y0 - y1);
    return lo.level + frac * (hi.level - lo.level);
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "# bletwin sweep csv v1\n";
    os << "level,n,errors,per,ber\n";
    char buf[160];
    for (const auto& lr : result.levels) {
        std::snprintf(buf, sizeof buf, "%.6g,%d,%d,%.8g,%.8g\n", lr.level, lr.n_packets,
                      lr.n_errors, lr.per, lr.ber_equivalent);
        os << buf;
    }
}

}  // namespace bletwin
