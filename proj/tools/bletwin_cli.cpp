// bletwin command-line front end: packet codec, modem, PER sweep, and the
// active-scanning simulation, glued together with the BTIQ file containers.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bletwin/config_text.hpp"
#include "bletwin/iq_files.hpp"
#include "bletwin/link.hpp"
#include "bletwin/sweep.hpp"

namespace {

using namespace bletwin;

struct PduArgs {
    std::string pdu_hex;
    std::string type = "adv_ind";
    std::string adv_addr = "c0:11:ec:7e:d0:01";
    std::string scan_addr = "de:ad:be:ef:00:02";
    std::string name;
    std::string data_hex;
    unsigned channel = 37;
};

void add_pdu_options(CLI::App* cmd, PduArgs& args) {
    cmd->add_option("--pdu", args.pdu_hex, "raw PDU (header+payload) as hex, overrides field options");
    cmd->add_option("--type", args.type, "adv_ind | scan_req | scan_rsp")
        ->check(CLI::IsMember({"adv_ind", "scan_req", "scan_rsp"}));
    cmd->add_option("--adv-addr", args.adv_addr, "advertising address aa:bb:cc:dd:ee:ff");
    cmd->add_option("--scan-addr", args.scan_addr, "scanner address (scan_req only)");
    cmd->add_option("--name", args.name, "complete local name GAP block");
    cmd->add_option("--data-hex", args.data_hex, "manufacturer-data GAP block, hex bytes");
    cmd->add_option("--channel", args.channel, "advertising channel index")
        ->check(CLI::IsMember({37u, 38u, 39u}));
}

std::vector<uint8_t> parse_hex_bytes(const std::string& hex) {
    auto bits = hex_to_bits(hex);
    if (!bits) throw std::runtime_error("bad hex string");
    std::vector<uint8_t> bytes;
    for (std::size_t i = 0; i + 7 < bits.value().size(); i += 8)
        bytes.push_back(byte_from_bits_lsb_first(std::span(bits.value()).subspan(i, 8)));
    return bytes;
}

AdvPdu build_pdu(const PduArgs& args) {
    if (!args.pdu_hex.empty()) {
        auto bits = hex_to_bits(args.pdu_hex);
        if (!bits) throw std::runtime_error("--pdu: invalid hex");
        auto pdu = parse_pdu(bits.value());
        if (!pdu) throw std::runtime_error(std::string("--pdu: ") + to_string(pdu.error()));
        return pdu.value();
    }
    const DeviceAddress adv = DeviceAddress::from_string(args.adv_addr);
    std::vector<GapBlock> blocks;
    if (!args.name.empty()) {
        GapBlock b;
        b.code = 0x09;  // complete local name
        b.data.assign(args.name.begin(), args.name.end());
        blocks.push_back(std::move(b));
    }
    if (!args.data_hex.empty()) {
        GapBlock b;
        b.code = 0xFF;  // manufacturer specific data
        b.data = parse_hex_bytes(args.data_hex);
        blocks.push_back(std::move(b));
    }
    if (args.type == "adv_ind") return AdvPdu::adv_ind(adv, std::move(blocks));
    if (args.type == "scan_rsp") return AdvPdu::scan_rsp(adv, std::move(blocks));
    return AdvPdu::scan_req(DeviceAddress::from_string(args.scan_addr), adv);
}

std::string describe(const AdvPdu& pdu) {
    std::ostringstream os;
    os << to_string(pdu.kind) << " adv_addr=" << pdu.adv_addr.to_string();
    if (pdu.scan_addr) os << " scan_addr=" << pdu.scan_addr->to_string();
    os << " len=" << pdu.payload_bytes();
    for (const auto& b : pdu.blocks) {
        os << " [gap 0x" << std::hex << static_cast<int>(b.code) << std::dec << ":";
        bool printable = !b.data.empty();
        for (uint8_t c : b.data) printable = printable && c >= 0x20 && c < 0x7F;
        if (printable) {
            os << " \"" << std::string(b.data.begin(), b.data.end()) << "\"";
        } else {
            char buf[4];
            for (uint8_t c : b.data) {
                std::snprintf(buf, sizeof buf, " %02x", c);
                os << buf;
            }
        }
        os << "]";
    }
    return os.str();
}

ModConfig mod_from_config(const KeyValueConfig& kv) {
    ModConfig mod;
    mod.symbol_rate = kv.get_double("symbol_rate", mod.symbol_rate);
    mod.deviation = kv.get_double("deviation", mod.deviation);
    mod.bt = kv.get_double("bt", mod.bt);
    mod.sps = static_cast<int>(kv.get_int("sps", mod.sps));
    mod.center_offset = kv.get_double("center_offset", mod.center_offset);
    return mod;
}

FrontEndConfig fe_from_config(const KeyValueConfig& kv) {
    FrontEndConfig fe;
    fe.if_hz = kv.get_double("if_hz", fe.if_hz);
    fe.sample_rate = kv.get_double("fe_sample_rate", fe.sample_rate);
    fe.adc_bits = static_cast<int>(kv.get_int("adc_bits", fe.adc_bits));
    fe.full_scale = kv.get_double("full_scale", fe.full_scale);
    fe.symbol_rate = kv.get_double("symbol_rate", fe.symbol_rate);
    fe.deviation = kv.get_double("deviation", fe.deviation);
    return fe;
}

ChannelConfig channel_from_config(const KeyValueConfig& kv) {
    ChannelConfig ch = ChannelConfig::disabled();
    if (kv.has("snr_db")) {
        ch.snr_db = kv.get_double("snr_db", 0.0);
        ch.rx_power_dbm.reset();
    }
    ch.noise_figure_db = kv.get_double("nf_db", ch.noise_figure_db);
    ch.noise_bandwidth_hz = kv.get_double("noise_bandwidth_hz", ch.noise_bandwidth_hz);
    ch.cfo_hz = kv.get_double("cfo_hz", 0.0);
    ch.drift_hz_per_s = kv.get_double("drift_hz_per_s", 0.0);
    ch.linewidth_hz = kv.get_double("linewidth_hz", 0.0);
    ch.clock_ppm = kv.get_double("clock_ppm", 0.0);
    return ch;
}

int cmd_encode(const PduArgs& args) {
    const AdvPdu pdu = build_pdu(args);
    const AirBits air = assemble_packet(pdu, ChannelIndex(args.channel));
    std::cout << air_bits_to_hex(air) << "\n";
    return 0;
}

int cmd_decode(const std::string& hex_arg, const std::string& in_path,
               const std::string& iq_path, unsigned channel) {
    const ChannelIndex ch(channel);
    int failures = 0;

    auto report = [&](const Result<AdvPdu>& r) {
        if (r) {
            std::cout << "ok: " << describe(r.value()) << "\n";
        } else {
            std::cout << "error: " << to_string(r.error()) << "\n";
            failures++;
        }
    };

    if (!iq_path.empty()) {
        if (file_is_q4(iq_path)) {
            report(demodulate_quantized(read_q4(iq_path), ch));
        } else {
            report(demodulate_packet(read_iq16(iq_path), FrontEndConfig{}, ch));
        }
        return failures == 0 ? 0 : 1;
    }

    auto decode_line = [&](const std::string& line) {
        if (line.empty()) return;
        auto bits = hex_to_bits(line);
        if (!bits) {
            std::cout << "error: invalid hex line\n";
            failures++;
            return;
        }
        report(parse_packet(bits.value(), ch));
    };

    if (!hex_arg.empty()) {
        decode_line(hex_arg);
    } else {
        std::istream* in = &std::cin;
        std::ifstream file;
        if (!in_path.empty() && in_path != "-") {
            file.open(in_path);
            if (!file) throw std::runtime_error("cannot open " + in_path);
            in = &file;
        }
        std::string line;
        while (std::getline(*in, line)) decode_line(line);
    }
    return failures == 0 ? 0 : 1;
}

int cmd_modulate(const PduArgs& args, const std::string& out_path, const std::string& format,
                 const KeyValueConfig& kv) {
    const AdvPdu pdu = build_pdu(args);
    const AirBits air = assemble_packet(pdu, ChannelIndex(args.channel));
    const IqFrame frame = gfsk_modulate(air, mod_from_config(kv));
    if (format == "q4") {
        write_q4(out_path, low_if_front_end(frame, fe_from_config(kv)));
    } else {
        write_iq16(out_path, frame);
    }
    std::cerr << "wrote " << frame.samples.size() << " samples to " << out_path << "\n";
    return 0;
}

int cmd_demodulate(const std::string& in_path, unsigned channel, const KeyValueConfig& kv) {
    const ChannelIndex ch(channel);
    Result<AdvPdu> decoded = file_is_q4(in_path)
                                 ? demodulate_quantized(read_q4(in_path), ch)
                                 : demodulate_packet(read_iq16(in_path), fe_from_config(kv), ch);
    if (!decoded) {
        std::cout << "error: " << to_string(decoded.error()) << "\n";
        return 1;
    }
    std::cout << "ok: " << describe(decoded.value()) << "\n";
    return 0;
}

int cmd_sweep(const KeyValueConfig& kv, uint64_t seed_override, bool have_seed,
              const std::string& out_path) {
    SweepConfig cfg;
    cfg.levels = kv.get_double_list("levels");
    const std::string unit = kv.get_string("levels_unit", "dbm");
    cfg.levels_are_dbm = unit != "snr";
    cfg.packets_per_level = static_cast<int>(kv.get_int("packets_per_level", cfg.packets_per_level));
    cfg.payload_bytes = static_cast<int>(kv.get_int("payload_bytes", cfg.payload_bytes));
    cfg.channel_index = static_cast<unsigned>(kv.get_int("channel", cfg.channel_index));
    cfg.seed = static_cast<uint64_t>(kv.get_int("seed", static_cast<int64_t>(cfg.seed)));
    if (have_seed) cfg.seed = seed_override;
    cfg.fe = fe_from_config(kv);
    cfg.mod = mod_from_config(kv);
    cfg.channel = channel_from_config(kv);
    if (!cfg.channel.snr_db && !cfg.channel.rx_power_dbm) cfg.channel.snr_db = 0.0;  // replaced per level
    cfg.auto_full_scale = kv.get_bool("auto_full_scale", cfg.auto_full_scale);
    cfg.full_scale_headroom = kv.get_double("full_scale_headroom", cfg.full_scale_headroom);
    cfg.threads = static_cast<int>(kv.get_int("threads", cfg.threads));

    const SweepResult result = run_per_sweep(cfg);

    std::ostringstream csv;
    write_sweep_csv(csv, result);
    auto sens = sensitivity_from_sweep(result);
    csv << "# sensitivity_" << (cfg.levels_are_dbm ? "dbm" : "snr_db") << " = ";
    if (sens)
        csv << *sens << "\n";
    else
        csv << "none\n";

    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << csv.str();
    }
    return 0;
}

int cmd_scan_sim(const KeyValueConfig& kv, uint64_t seed_override, bool have_seed,
                 const std::string& out_path, bool csv) {
    LinkConfig link;
    link.t_ifs_us = static_cast<uint64_t>(kv.get_int("t_ifs_us", static_cast<int64_t>(link.t_ifs_us)));
    link.adv_interval_us =
        static_cast<uint64_t>(kv.get_int("adv_interval_us", static_cast<int64_t>(link.adv_interval_us)));
    link.adv_delay_max_us =
        static_cast<uint64_t>(kv.get_int("adv_delay_max_us", static_cast<int64_t>(link.adv_delay_max_us)));
    link.scan_dwell_us =
        static_cast<uint64_t>(kv.get_int("scan_dwell_us", static_cast<int64_t>(link.scan_dwell_us)));

    uint64_t seed = static_cast<uint64_t>(kv.get_int("seed", 1));
    if (have_seed) seed = seed_override;
    const uint64_t duration = static_cast<uint64_t>(kv.get_int("duration_us", 200000));

    const DeviceAddress adv_addr =
        DeviceAddress::from_string(kv.get_string("adv_addr", "c0:11:ec:7e:d0:01"));
    const DeviceAddress scan_addr =
        DeviceAddress::from_string(kv.get_string("scan_addr", "de:ad:be:ef:00:02"));

    auto name_block = [](const std::string& name) {
        GapBlock b;
        b.code = 0x09;
        b.data.assign(name.begin(), name.end());
        return b;
    };
    AdvertiserState adv = make_advertiser(adv_addr, {name_block(kv.get_string("adv_name", "bletwin"))},
                                          {name_block(kv.get_string("rsp_name", "bletwin-rsp"))},
                                          link, seed);
    ScannerState scan = make_scanner(scan_addr, link);

    ScanSimPhy phy;
    phy.mod = mod_from_config(kv);
    phy.fe = fe_from_config(kv);

    const EventTrace trace =
        run_scan_simulation(std::move(adv), std::move(scan), channel_from_config(kv), duration, seed, phy);
    const std::string text = csv ? trace_to_csv(trace) : trace_to_text(trace);

    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bletwin - BLE LE1M low-IF transceiver twin"};
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed = 0;
    app.add_option("--config", config_path, "key=value config file")->expected(1);
    auto* seed_opt = app.add_option("--seed", seed, "override the RNG seed");

    PduArgs enc_args;
    auto* enc = app.add_subcommand("encode", "assemble a packet, print on-air bytes as hex");
    add_pdu_options(enc, enc_args);

    std::string dec_hex, dec_in, dec_iq;
    unsigned dec_channel = 37;
    auto* dec = app.add_subcommand("decode", "parse hex packets or demodulate a capture file");
    dec->add_option("hex", dec_hex, "packet hex (positional)");
    dec->add_option("--in", dec_in, "file of hex lines, '-' for stdin");
    dec->add_option("--iq", dec_iq, "BTIQ capture file to demodulate");
    dec->add_option("--channel", dec_channel, "channel index")->check(CLI::IsMember({37u, 38u, 39u}));

    PduArgs mod_args;
    std::string mod_out = "packet.btiq", mod_format = "iq16";
    auto* mod = app.add_subcommand("modulate", "assemble + GFSK-modulate a packet into a BTIQ file");
    add_pdu_options(mod, mod_args);
    mod->add_option("--out", mod_out, "output file");
    mod->add_option("--format", mod_format, "iq16 | q4")->check(CLI::IsMember({"iq16", "q4"}));

    std::string dem_in;
    unsigned dem_channel = 37;
    auto* dem = app.add_subcommand("demodulate", "demodulate a BTIQ file and parse the packet");
    dem->add_option("file", dem_in, "input BTIQ file")->required();
    dem->add_option("--channel", dem_channel, "channel index")->check(CLI::IsMember({37u, 38u, 39u}));

    std::string sweep_out;
    auto* swp = app.add_subcommand("sweep", "run a PER/BER sensitivity sweep, emit CSV");
    swp->add_option("--out", sweep_out, "CSV output path ('-' = stdout)");

    std::string sim_out;
    bool sim_csv = false;
    auto* sim = app.add_subcommand("scan-sim", "simulate an active-scanning event over the PHY");
    sim->add_option("--out", sim_out, "trace output path ('-' = stdout)");
    sim->add_flag("--csv", sim_csv, "emit CSV instead of text");

    CLI11_PARSE(app, argc, argv);

    try {
        KeyValueConfig kv =
            config_path.empty() ? KeyValueConfig::parse("") : KeyValueConfig::load(config_path);
        const bool have_seed = seed_opt->count() > 0;

        if (enc->parsed()) return cmd_encode(enc_args);
        if (dec->parsed()) return cmd_decode(dec_hex, dec_in, dec_iq, dec_channel);
        if (mod->parsed()) return cmd_modulate(mod_args, mod_out, mod_format, kv);
        if (dem->parsed()) return cmd_demodulate(dem_in, dem_channel, kv);
        if (swp->parsed()) return cmd_sweep(kv, seed, have_seed, sweep_out);
        if (sim->parsed()) return cmd_scan_sim(kv, seed, have_seed, sim_out, sim_csv);
    } catch (const std::exception& e) {
        std::cerr << "bletwin: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
