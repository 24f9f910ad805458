#include "tcdgp/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tcdgp {

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return {};
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

nlohmann::ordered_json jnum(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

std::vector<std::pair<std::string, std::string>> metricEntries(const Metrics& m) {
    std::vector<std::pair<std::string, std::string>> out = {
        {"v2i_messages", std::to_string(m.v2iMessageCount)},
        {"v2v_messages", std::to_string(m.v2vMessageCount)},
        {"delivered_aggregates", std::to_string(m.deliveredAggregates)},
        {"unclustered_node_cycles", std::to_string(m.unclusteredNodeCycles)},
        {"unreachable_members", std::to_string(m.unreachableMembers)},
        {"lost_messages", std::to_string(m.lostMessages)},
        {"dropped_readings", std::to_string(m.droppedReadings)},
        {"late_readings", std::to_string(m.lateReadings)},
    };
    for (const auto& [kind, count] : m.perKindCounts) out.emplace_back("kind." + kind, std::to_string(count));
    return out;
}

}  // namespace

std::string toCsv(const RunReport& report) {
    std::ostringstream os;
    os << "# tcdgp report schema " << kReportSchemaVersion << '\n';
    for (const auto& [k, v] : report.config.entries()) os << "# config." << k << '=' << v << '\n';
    for (const auto& [k, v] : metricEntries(report.metrics)) os << "# metrics." << k << '=' << v << '\n';
    os << kCsvHeader << '\n';
    for (const auto& r : report.rows) {
        os << r.cycle << ',' << r.tag.group << ',' << r.tag.direction << ',' << r.count << ','
           << (r.hasAggregate ? num(r.meanSpeed) : std::string{}) << ',' << num(r.truthMean) << ','
           << (r.hasAggregate ? num(r.absError()) : std::string{}) << '\n';
    }
    return os.str();
}

std::string toJson(const RunReport& report) {
    nlohmann::ordered_json config;
    config["report_schema"] = kReportSchemaVersion;
    for (const auto& [k, v] : report.config.entries()) {
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
        if (ec == std::errc{} && ptr == v.data() + v.size()) config[k] = d;
        else config[k] = v;
    }

    nlohmann::ordered_json metrics;
    const auto& m = report.metrics;
    metrics["v2i_messages"] = m.v2iMessageCount;
    metrics["v2v_messages"] = m.v2vMessageCount;
    metrics["delivered_aggregates"] = m.deliveredAggregates;
    metrics["unclustered_node_cycles"] = m.unclusteredNodeCycles;
    metrics["unreachable_members"] = m.unreachableMembers;
    metrics["lost_messages"] = m.lostMessages;
    metrics["dropped_readings"] = m.droppedReadings;
    metrics["late_readings"] = m.lateReadings;
    metrics["per_kind"] = m.perKindCounts;

    nlohmann::ordered_json cycles = nlohmann::ordered_json::array();
    std::map<int, nlohmann::ordered_json> byCycle;
    for (const auto& s : report.summaries) {
        auto& c = byCycle[s.cycle];
        c["cycle"] = s.cycle;
        c["road_mean_speed"] = jnum(s.road.meanSpeed);
        c["vehicle_count"] = s.road.vehicleCount;
        c["segments"] = nlohmann::ordered_json::array();
    }
    for (const auto& r : report.rows) {
        auto& c = byCycle[r.cycle];
        if (!c.contains("cycle")) {
            c["cycle"] = r.cycle;
            c["segments"] = nlohmann::ordered_json::array();
        }
        nlohmann::ordered_json row;
        row["segment"] = r.tag.group;
        row["direction"] = r.tag.direction;
        row["count"] = r.count;
        row["mean_speed"] = r.hasAggregate ? jnum(r.meanSpeed) : nlohmann::ordered_json(nullptr);
        row["truth_count"] = r.truthCount;
        row["truth_mean"] = jnum(r.truthMean);
        row["abs_err"] = r.hasAggregate ? jnum(r.absError()) : nlohmann::ordered_json(nullptr);
        row["drops"] = r.drops;
        c["segments"].push_back(std::move(row));
    }
    for (auto& [id, c] : byCycle) cycles.push_back(std::move(c));

    nlohmann::ordered_json root;
    root["config"] = std::move(config);
    root["metrics"] = std::move(metrics);
    root["cycles"] = std::move(cycles);
    return root.dump(2) + "\n";
}

void emitReport(const RunReport& report, OutputFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open report file '" + path + "' for writing");
    out << (format == OutputFormat::Csv ? toCsv(report) : toJson(report));
    out.flush();
    if (!out) throw std::runtime_error("failed writing report file '" + path + "'");
}

}  // namespace tcdgp
