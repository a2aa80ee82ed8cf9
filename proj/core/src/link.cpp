#include "bletwin/link.hpp"

#include <algorithm>
#include <sstream>

#include "bletwin/detail/rng.hpp"
#include "bletwin/modulator.hpp"

namespace bletwin {

namespace {

uint64_t adv_event_delay_us(const AdvertiserState& s) {
    if (s.cfg.adv_delay_max_us == 0) return 0;
    uint64_t seed = detail::derive_seed(s.seed, 0xAD5EED, s.event_count);
    return detail::splitmix64(seed) % (s.cfg.adv_delay_max_us + 1);
}

std::string blocks_summary(const std::vector<GapBlock>& blocks) {
    std::ostringstream os;
    os << blocks.size() << " block" << (blocks.size() == 1 ? "" : "s");
    return os.str();
}

std::string pdu_summary(const AdvPdu& pdu) {
    std::ostringstream os;
    os << to_string(pdu.kind) << " adv=" << pdu.adv_addr.to_string();
    if (pdu.scan_addr) os << " scan=" << pdu.scan_addr->to_string();
    if (pdu.kind != PduType::ScanReq) os << " " << blocks_summary(pdu.blocks);
    return os.str();
}

}  // namespace

uint64_t packet_air_time_us(const AdvPdu& pdu) {
    return 8 + 32 + 16 + 8 * pdu.payload_bytes() + 24;
}

AdvertiserState make_advertiser(const DeviceAddress& addr, std::vector<GapBlock> adv_blocks,
                                std::vector<GapBlock> rsp_blocks, LinkConfig cfg, uint64_t seed) {
    AdvertiserState s;
    s.adv_pdu = AdvPdu::adv_ind(addr, std::move(adv_blocks));
    s.rsp_pdu = AdvPdu::scan_rsp(addr, std::move(rsp_blocks));
    s.cfg = cfg;
    s.seed = seed;
    s.phase = AdvertiserState::Phase::Advertising;
    s.deadline_us = 0;
    return s;
}

ScannerState make_scanner(const DeviceAddress& addr, LinkConfig cfg) {
    ScannerState s;
    s.own_addr = addr;
    s.cfg = cfg;
    s.deadline_us = cfg.scan_dwell_us;
    return s;
}

std::pair<AdvertiserState, LinkAction> advertiser_step(AdvertiserState s, const LinkInput& input,
                                                       uint64_t now) {
    using Phase = AdvertiserState::Phase;

    if (input.timer) {
        switch (s.phase) {
            case Phase::IdleWait:
            case Phase::Advertising: {
                // Transmit ADV_IND on the current channel, then listen for a request.
                const unsigned ch = s.channel();
                s.phase = Phase::ListenForScanReq;
                s.deadline_us = now + packet_air_time_us(s.adv_pdu) + s.cfg.t_ifs_us +
                                s.cfg.listen_window_us;
                return {s, LinkAction::transmit(s.adv_pdu, ch)};
            }
            case Phase::ListenForScanReq: {
                // Listen window over: next advertising channel, or wait out the interval.
                if (s.channel_slot < 2) {
                    s.channel_slot++;
                    s.phase = Phase::Advertising;
                    s.deadline_us = now + s.cfg.inter_channel_gap_us;
                } else {
                    s.channel_slot = 0;
                    s.phase = Phase::IdleWait;
                    s.event_count++;
                    s.deadline_us = now + s.cfg.adv_interval_us + adv_event_delay_us(s);
                }
                return {s, LinkAction::idle()};
            }
            case Phase::SendScanRsp: {
                const unsigned ch = s.channel();
                // After responding, this advertising event is complete on this channel.
                if (s.channel_slot < 2) {
                    s.channel_slot++;
                    s.phase = Phase::Advertising;
                    s.deadline_us = now + packet_air_time_us(s.rsp_pdu) + s.cfg.inter_channel_gap_us;
                } else {
                    s.channel_slot = 0;
                    s.phase = Phase::IdleWait;
                    s.event_count++;
                    s.deadline_us = now + s.cfg.adv_interval_us + adv_event_delay_us(s);
                }
                return {s, LinkAction::transmit(s.rsp_pdu, ch)};
            }
        }
    }

    if (input.pdu && s.phase == Phase::ListenForScanReq) {
        const AdvPdu& pdu = *input.pdu;
        // Respond only to a SCAN_REQ aimed at our own advertising address.
        if (pdu.kind == PduType::ScanReq && pdu.adv_addr == s.adv_pdu.adv_addr) {
            s.phase = Phase::SendScanRsp;
            s.deadline_us = now + s.cfg.t_ifs_us;
            return {s, LinkAction::idle()};
        }
        return {s, LinkAction::listen(s.channel())};
    }

    return {s, LinkAction::idle()};
}

std::pair<ScannerState, LinkAction> scanner_step(ScannerState s, const LinkInput& input,
                                                 uint64_t now) {
    using Phase = ScannerState::Phase;

    if (input.timer) {
        if (s.phase == Phase::AwaitScanRsp && s.scan_req_pending) {
            // T_IFS elapsed: send the queued SCAN_REQ and start the response timer.
            s.scan_req_pending = false;
            AdvPdu req = AdvPdu::scan_req(s.own_addr, *s.awaiting);
            s.deadline_us = now + packet_air_time_us(req) + s.cfg.t_ifs_us +
                            s.cfg.scan_rsp_timeout_us;
            return {s, LinkAction::transmit(std::move(req), s.channel())};
        }
        if (s.phase == Phase::AwaitScanRsp) {
            // No response in time: the transaction stays incomplete.
            s.phase = Phase::Scanning;
            s.awaiting.reset();
            s.deadline_us = now + s.cfg.scan_dwell_us;
            return {s, LinkAction::listen(s.channel())};
        }
        // Dwell expired: rotate to the next advertising channel.
        s.channel_slot = (s.channel_slot + 1) % 3;
        s.deadline_us = now + s.cfg.scan_dwell_us;
        return {s, LinkAction::listen(s.channel())};
    }

    if (input.pdu) {
        const AdvPdu& pdu = *input.pdu;
        if (s.phase == Phase::Scanning && pdu.kind == PduType::AdvInd) {
            auto& entry = s.discovered[pdu.adv_addr.to_string()];
            entry.adv_blocks = pdu.blocks;
            s.phase = Phase::AwaitScanRsp;
            s.scan_req_pending = true;
            s.awaiting = pdu.adv_addr;
            s.deadline_us = now + s.cfg.t_ifs_us;
            return {s, LinkAction::idle()};
        }
        if (s.phase == Phase::AwaitScanRsp && !s.scan_req_pending &&
            pdu.kind == PduType::ScanRsp && s.awaiting && pdu.adv_addr == *s.awaiting) {
            auto& entry = s.discovered[pdu.adv_addr.to_string()];
            entry.rsp_blocks = pdu.blocks;
            entry.scan_complete = true;
            s.phase = Phase::Scanning;
            s.awaiting.reset();
            s.deadline_us = now + s.cfg.scan_dwell_us;
            return {s, LinkAction::listen(s.channel())};
        }
        return {s, LinkAction::idle()};
    }

    return {s, LinkAction::idle()};
}

std::string trace_to_text(const EventTrace& trace) {
    std::ostringstream os;
    for (const auto& ev : trace)
        os << ev.t_us << " us  " << ev.actor << "  " << ev.action << "  " << ev.detail << "\n";
    return os.str();
}

std::string trace_to_csv(const EventTrace& trace) {
    std::ostringstream os;
    os << "# bletwin scan trace v1\n";
    os << "time_us,actor,action,detail\n";
    for (const auto& ev : trace) {
        std::string detail = ev.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        os << ev.t_us << "," << ev.actor << "," << ev.action << "," << detail << "\n";
    }
    return os.str();
}

EventTrace run_scan_simulation(AdvertiserState adv, ScannerState scan,
                               const ChannelConfig& channel_cfg, uint64_t duration_us,
                               uint64_t seed, const ScanSimPhy& phy) {
    EventTrace trace;

    struct InFlight {
        uint64_t end_us;
        unsigned channel;
        bool from_adv;
        AdvPdu pdu;
    };
    std::vector<InFlight> air;
    uint64_t tx_counter = 0;

    auto do_action = [&](const LinkAction& action, bool from_adv, uint64_t now) {
        if (action.kind != LinkAction::Kind::Transmit) return;
        const uint64_t air_us = packet_air_time_us(action.pdu);
        air.push_back({now + air_us, action.channel, from_adv, action.pdu});
        trace.push_back({now, from_adv ? "adv" : "scan", "TX", pdu_summary(action.pdu) +
                         " ch=" + std::to_string(action.channel)});
        tx_counter++;
    };

    auto deliver = [&](const InFlight& tx) {
        const uint64_t now = tx.end_us;
        // PHY pass: modulate, impair, demodulate at the listening peer.
        const bool peer_is_adv = !tx.from_adv;
        const bool peer_listens = peer_is_adv ? (adv.listening() && adv.channel() == tx.channel)
                                              : (scan.listening() && scan.channel() == tx.channel);
        if (!peer_listens) return;

        AirBits bits = assemble_packet(tx.pdu, ChannelIndex(tx.channel));
        IqFrame frame = gfsk_modulate(bits, phy.mod);
        ChannelConfig per_tx = channel_cfg;
        per_tx.seed = detail::derive_seed(seed, 0x5C4E, tx_counter * 7919 + tx.end_us);
        IqFrame impaired = apply_channel(frame, per_tx);
        auto decoded = demodulate_packet(impaired, phy.fe, ChannelIndex(tx.channel));

        const char* actor = peer_is_adv ? "adv" : "scan";
        if (!decoded) {
            trace.push_back({now, actor, "RX-ERR", to_string(decoded.error())});
            return;
        }
        trace.push_back({now, actor, "RX", pdu_summary(decoded.value())});
        if (peer_is_adv) {
            auto [ns, act] = advertiser_step(std::move(adv), LinkInput::received(decoded.value()), now);
            adv = std::move(ns);
            do_action(act, true, now);
        } else {
            auto before = scan.discovered;
            auto [ns, act] = scanner_step(std::move(scan), LinkInput::received(decoded.value()), now);
            scan = std::move(ns);
            for (const auto& [addr, dev] : scan.discovered) {
                auto it = before.find(addr);
                if (dev.scan_complete && (it == before.end() || !it->second.scan_complete))
                    trace.push_back({now, "scan", "DISCOVERED", addr});
            }
            do_action(act, false, now);
        }
    };

    while (true) {
        uint64_t next = std::min(adv.deadline_us, scan.deadline_us);
        std::size_t air_idx = air.size();
        for (std::size_t i = 0; i < air.size(); ++i) {
            if (air[i].end_us <= next) {
                next = air[i].end_us;
                air_idx = i;
            }
        }
        if (next >= duration_us) break;

        if (air_idx < air.size()) {
            InFlight tx = air[air_idx];
            air.erase(air.begin() + static_cast<long>(air_idx));
            deliver(tx);
            continue;
        }
        if (adv.deadline_us <= scan.deadline_us) {
            const uint64_t now = adv.deadline_us;
            auto [ns, act] = advertiser_step(std::move(adv), LinkInput::timer_expiry(), now);
            adv = std::move(ns);
            do_action(act, true, now);
        } else {
            const uint64_t now = scan.deadline_us;
            auto [ns, act] = scanner_step(std::move(scan), LinkInput::timer_expiry(), now);
            scan = std::move(ns);
            do_action(act, false, now);
        }
    }
    return trace;
}

}  // namespace bletwin
