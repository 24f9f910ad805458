#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcdgp/clustering.hpp"
#include "tcdgp/gathering.hpp"
#include "tcdgp/mobility.hpp"
#include "tcdgp/radio.hpp"

namespace tcdgp {

enum class Scenario { PerNode = 1, PerClusterHead = 2, FullTCDGP = 3 };
enum class ClusterMode { Split, Segment };
enum class OutputFormat { Csv, Json };

std::string toString(Scenario s);
std::string toString(ClusterMode m);
std::string toString(OutputFormat f);

struct SimConfig {
    Scenario scenario = Scenario::FullTCDGP;
    std::size_t nodeCount = 100;
    double duration = 600.0;
    std::uint64_t seed = 1;
    RoadGeometry geometry;
    RadioConfig radio;
    CycleTimers timers;
    WeightParams weights;
    MobilityParams mobility;
    ClusterMode clusterMode = ClusterMode::Segment;
    double reportPeriod = 5.0;
    std::string outputPath;
    OutputFormat outputFormat = OutputFormat::Csv;

    // Throws std::invalid_argument naming the first bad field.
    void validate() const;

    // Flat key/value view, identical keys to the config file.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

// Applies `key = value` settings. Throws std::invalid_argument for unknown
// keys or unparsable values.
void applySetting(SimConfig& cfg, const std::string& key, const std::string& value);

// Parses a flat `key = value` file; '#' starts a comment.
std::map<std::string, std::string> readConfigFile(const std::string& path);

struct SeedRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
};

struct CliOptions {
    SimConfig config;
    std::optional<SeedRange> seeds;
};

// Defaults, then the --config file, then command-line flags. Returns nullopt
// when --help was printed. Throws std::invalid_argument on bad input.
std::optional<CliOptions> parseConfig(int argc, const char* const* argv);

}  // namespace tcdgp
