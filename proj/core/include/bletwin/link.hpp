#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bletwin/channel.hpp"
#include "bletwin/frames.hpp"
#include "bletwin/receiver.hpp"

namespace bletwin {

/// Link-layer timing knobs, all in microseconds.
struct LinkConfig {
    uint64_t t_ifs_us = 150;
    uint64_t adv_interval_us = 100'000;
    uint64_t adv_delay_max_us = 10'000;
    uint64_t listen_window_us = 400;      // advertiser wait for SCAN_REQ after TX end
    uint64_t scan_rsp_timeout_us = 600;   // scanner wait for SCAN_RSP after TX end
    uint64_t inter_channel_gap_us = 1'000;
    uint64_t scan_dwell_us = 100'000;
};

/// Air time at 1 Mb/s: one microsecond per bit.
uint64_t packet_air_time_us(const AdvPdu& pdu);

inline constexpr unsigned kAdvChannels[3] = {37, 38, 39};

struct LinkInput {
    bool timer = false;
    std::optional<AdvPdu> pdu;

    static LinkInput timer_expiry() { return {true, std::nullopt}; }
    static LinkInput received(AdvPdu p) { return {false, std::move(p)}; }
    static LinkInput none() { return {false, std::nullopt}; }
};

struct LinkAction {
    enum class Kind { Transmit, Listen, Idle };
    Kind kind = Kind::Idle;
    AdvPdu pdu;
    unsigned channel = 37;

    static LinkAction idle() { return {}; }
    static LinkAction listen(unsigned ch) { return {Kind::Listen, {}, ch}; }
    static LinkAction transmit(AdvPdu p, unsigned ch) { return {Kind::Transmit, std::move(p), ch}; }
};

struct AdvertiserState {
    enum class Phase { IdleWait, Advertising, ListenForScanReq, SendScanRsp };
    Phase phase = Phase::Advertising;
    int channel_slot = 0;  // index into kAdvChannels
    uint64_t deadline_us = 0;
    uint64_t event_count = 0;  // feeds the per-event advertising delay
    AdvPdu adv_pdu;
    AdvPdu rsp_pdu;
    LinkConfig cfg;
    uint64_t seed = 0;

    unsigned channel() const { return kAdvChannels[channel_slot]; }
    bool listening() const { return phase == Phase::ListenForScanReq; }
};

struct DiscoveredDevice {
    std::vector<GapBlock> adv_blocks;
    std::vector<GapBlock> rsp_blocks;
    bool scan_complete = false;
};

struct ScannerState {
    enum class Phase { Scanning, AwaitScanRsp };
    Phase phase = Phase::Scanning;
    int channel_slot = 0;
    uint64_t deadline_us = 0;
    bool scan_req_pending = false;  // t_ifs elapsed -> transmit the queued SCAN_REQ
    DeviceAddress own_addr{};
    std::optional<DeviceAddress> awaiting;  // AdvA of the pending transaction
    std::map<std::string, DiscoveredDevice> discovered;
    LinkConfig cfg;

    unsigned channel() const { return kAdvChannels[channel_slot]; }
    bool listening() const { return !scan_req_pending; }
};

AdvertiserState make_advertiser(const DeviceAddress& addr, std::vector<GapBlock> adv_blocks,
                                std::vector<GapBlock> rsp_blocks, LinkConfig cfg = {},
                                uint64_t seed = 0);
ScannerState make_scanner(const DeviceAddress& addr, LinkConfig cfg = {});

/// Pure transition functions; `now` is the simulation clock in microseconds.
std::pair<AdvertiserState, LinkAction> advertiser_step(AdvertiserState state,
                                                       const LinkInput& input, uint64_t now);
std::pair<ScannerState, LinkAction> scanner_step(ScannerState state, const LinkInput& input,
                                                 uint64_t now);

struct TraceEvent {
    uint64_t t_us = 0;
    std::string actor;   // "adv" or "scan"
    std::string action;  // TX / RX / RX-ERR / DISCOVERED
    std::string detail;
};
using EventTrace = std::vector<TraceEvent>;

std::string trace_to_text(const EventTrace& trace);
std::string trace_to_csv(const EventTrace& trace);

struct ScanSimPhy {
    ModConfig mod;
    FrontEndConfig fe;
};

/// Discrete-event loop: every transmit is modulated, run through the impairment
/// channel, and demodulated by whichever peer is listening on that RF channel.
EventTrace run_scan_simulation(AdvertiserState adv, ScannerState scan,
                               const ChannelConfig& channel_cfg, uint64_t duration_us,
                               uint64_t seed, const ScanSimPhy& phy = {});

}  // namespace bletwin
