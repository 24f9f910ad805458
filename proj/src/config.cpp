#include "tcdgp/config.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

namespace tcdgp {

std::string toString(Scenario s) { return std::to_string(static_cast<int>(s)); }
std::string toString(ClusterMode m) { return m == ClusterMode::Split ? "split" : "segment"; }
std::string toString(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
}

double toDouble(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) bad(key, "expected a number, got '" + value + "'");
    return out;
}

long long toInteger(const std::string& key, const std::string& value) {
    long long out = 0;
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc{} || ptr != last) bad(key, "expected an integer, got '" + value + "'");
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void applySetting(SimConfig& cfg, const std::string& key, const std::string& value) {
    auto& road = cfg.geometry;
    auto& radio = cfg.radio;
    auto& t = cfg.timers;
    if (key == "scenario") {
        const auto s = toInteger(key, value);
        if (s < 1 || s > 3) bad(key, "must be 1, 2 or 3");
        cfg.scenario = static_cast<Scenario>(s);
    } else if (key == "nodes") {
        const auto n = toInteger(key, value);
        if (n < 1) bad(key, "must be at least 1");
        cfg.nodeCount = static_cast<std::size_t>(n);
    } else if (key == "duration") {
        cfg.duration = toDouble(key, value);
    } else if (key == "seed") {
        const auto s = toInteger(key, value);
        if (s < 0) bad(key, "must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "road_length") {
        road.length = toDouble(key, value);
    } else if (key == "road_width") {
        road.width = toDouble(key, value);
        road.baseStation.y() = road.width / 2;
    } else if (key == "lanes") {
        road.lanes = static_cast<int>(toInteger(key, value));
    } else if (key == "segment_length") {
        road.segmentLength = toDouble(key, value);
    } else if (key == "segment_count") {
        road.segmentCount = static_cast<int>(toInteger(key, value));
    } else if (key == "map_size") {
        road.mapSize = toDouble(key, value);
    } else if (key == "transmission_range") {
        radio.transmissionRange = toDouble(key, value);
    } else if (key == "hl_pt") {
        radio.helloProcessingDelay = toDouble(key, value);
    } else if (key == "pk_pt") {
        radio.packetProcessingDelay = toDouble(key, value);
    } else if (key == "is_pt") {
        radio.initialSetupDelay = toDouble(key, value);
    } else if (key == "capacity_bps") {
        radio.capacityBps = toDouble(key, value);
    } else if (key == "energy_per_tx") {
        radio.energyPerTransmission = toDouble(key, value);
    } else if (key == "full_duration") {
        const double v = toDouble(key, value);
        // The validity window tracks the cycle length unless set on its own.
        if (t.validityWindow == t.fullDuration) t.validityWindow = v;
        t.fullDuration = v;
    } else if (key == "chd_duration") {
        t.chdDuration = toDouble(key, value);
    } else if (key == "gat_duration") {
        t.gatDuration = toDouble(key, value);
    } else if (key == "agg_duration") {
        t.aggDuration = toDouble(key, value);
    } else if (key == "dis_duration") {
        t.disDuration = toDouble(key, value);
    } else if (key == "validity_window") {
        t.validityWindow = toDouble(key, value);
    } else if (key == "w_energy") {
        cfg.weights.wEnergy = toDouble(key, value);
    } else if (key == "w_center") {
        cfg.weights.wCenter = toDouble(key, value);
    } else if (key == "w_bs") {
        cfg.weights.wBS = toDouble(key, value);
    } else if (key == "max_speed") {
        cfg.mobility.maxSpeed = toDouble(key, value);
    } else if (key == "speed_jitter") {
        cfg.mobility.speedJitter = toDouble(key, value);
    } else if (key == "mobility_dt") {
        cfg.mobility.dt = toDouble(key, value);
    } else if (key == "cluster_mode") {
        if (value == "split") cfg.clusterMode = ClusterMode::Split;
        else if (value == "segment") cfg.clusterMode = ClusterMode::Segment;
        else bad(key, "must be 'split' or 'segment'");
    } else if (key == "report_period") {
        cfg.reportPeriod = toDouble(key, value);
    } else if (key == "out") {
        cfg.outputPath = value;
    } else if (key == "format") {
        if (value == "csv") cfg.outputFormat = OutputFormat::Csv;
        else if (value == "json") cfg.outputFormat = OutputFormat::Json;
        else bad(key, "must be 'csv' or 'json'");
    } else {
        bad(key, "unknown configuration key");
    }
}

void SimConfig::validate() const {
    if (nodeCount < 1) bad("nodes", "must be at least 1");
    if (!(duration > 0)) bad("duration", "must be positive");
    if (!(reportPeriod > 0)) bad("report_period", "must be positive");
    if (!(mobility.maxSpeed > 0)) bad("max_speed", "must be positive");
    if (mobility.speedJitter < 0) bad("speed_jitter", "must be >= 0");
    if (!(mobility.dt > 0)) bad("mobility_dt", "must be positive");
    geometry.validate();
    radio.validate();
    timers.validate();
    weights.validate();
    // CHD has to hold Hello, CHNotify, hand-over, Join and SlotAssign hops.
    const double setup = radio.initialSetupDelay + radio.helloProcessingDelay + 4 * radio.packetProcessingDelay;
    if (setup > timers.chdDuration + 1e-9) {
        bad("chd_duration", "too short for the setup exchange (IS_PT + HL_PT + 4 PK_PT)");
    }
    if (timers.aggDuration + radio.packetProcessingDelay > timers.disDuration + 1e-9) {
        bad("dis_duration", "too short for AGG plus one uplink");
    }
}

std::vector<std::pair<std::string, std::string>> SimConfig::entries() const {
    return {
        {"scenario", toString(scenario)},
        {"nodes", std::to_string(nodeCount)},
        {"duration", fmt(duration)},
        {"seed", std::to_string(seed)},
        {"road_length", fmt(geometry.length)},
        {"road_width", fmt(geometry.width)},
        {"lanes", std::to_string(geometry.lanes)},
        {"segment_length", fmt(geometry.segmentLength)},
        {"segment_count", std::to_string(geometry.segmentCount)},
        {"map_size", fmt(geometry.mapSize)},
        {"transmission_range", fmt(radio.transmissionRange)},
        {"hl_pt", fmt(radio.helloProcessingDelay)},
        {"pk_pt", fmt(radio.packetProcessingDelay)},
        {"is_pt", fmt(radio.initialSetupDelay)},
        {"capacity_bps", fmt(radio.capacityBps)},
        {"energy_per_tx", fmt(radio.energyPerTransmission)},
        {"full_duration", fmt(timers.fullDuration)},
        {"chd_duration", fmt(timers.chdDuration)},
        {"gat_duration", fmt(timers.gatDuration)},
        {"agg_duration", fmt(timers.aggDuration)},
        {"dis_duration", fmt(timers.disDuration)},
        {"validity_window", fmt(timers.validityWindow)},
        {"w_energy", fmt(weights.wEnergy)},
        {"w_center", fmt(weights.wCenter)},
        {"w_bs", fmt(weights.wBS)},
        {"max_speed", fmt(mobility.maxSpeed)},
        {"speed_jitter", fmt(mobility.speedJitter)},
        {"mobility_dt", fmt(mobility.dt)},
        {"cluster_mode", toString(clusterMode)},
        {"report_period", fmt(reportPeriod)},
        {"format", toString(outputFormat)},
    };
}

std::map<std::string, std::string> readConfigFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: " + path + ":" + std::to_string(lineNo) + ": expected key = value");
        }
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

namespace {

SeedRange parseSeedRange(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) bad("seeds", "expected A..B");
    const auto a = toInteger("seeds", text.substr(0, dots));
    const auto b = toInteger("seeds", text.substr(dots + 2));
    if (a < 0 || b < a) bad("seeds", "expected 0 <= A <= B");
    return {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)};
}

}  // namespace

std::optional<CliOptions> parseConfig(int argc, const char* const* argv) {
    CLI::App app{"Cluster-based road speed gathering simulator"};
    std::string scenario, nodes, duration, seed, seeds, configPath, out, format, clusterMode;
    std::vector<std::string> sets;
    app.add_option("--scenario", scenario, "1 = per-node, 2 = per-cluster-head, 3 = full TCDGP");
    app.add_option("--nodes", nodes, "number of vehicles");
    app.add_option("--duration", duration, "simulated seconds");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--seeds", seeds, "seed sweep A..B, run in parallel");
    app.add_option("--config", configPath, "flat key = value config file");
    app.add_option("--out", out, "report path (stdout summary only when omitted)");
    app.add_option("--format", format, "csv or json");
    app.add_option("--cluster-mode", clusterMode, "split or segment");
    app.add_option("--set", sets, "override any config key: --set key=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(std::string("command line: ") + e.what());
    }

    CliOptions opts;
    if (!configPath.empty()) {
        for (const auto& [k, v] : readConfigFile(configPath)) applySetting(opts.config, k, v);
    }
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) bad("set", "expected key=value, got '" + kv + "'");
        applySetting(opts.config, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"scenario", &scenario}, {"nodes", &nodes},   {"duration", &duration},
        {"seed", &seed},         {"out", &out},       {"format", &format},
        {"cluster_mode", &clusterMode},
    };
    for (const auto& [key, value] : flags) {
        if (!value->empty()) applySetting(opts.config, key, *value);
    }
    if (!seeds.empty()) opts.seeds = parseSeedRange(seeds);
    opts.config.validate();
    return opts;
}

}  // namespace tcdgp
