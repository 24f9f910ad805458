#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <future>
#include <iostream>
#include <thread>

#include "tcdgp/config.hpp"
#include "tcdgp/report.hpp"
#include "tcdgp/scenario.hpp"

namespace {

std::string seededPath(const std::string& path, std::uint64_t seed) {
    std::filesystem::path p(path);
    const auto stem = p.stem().string() + "_seed" + std::to_string(seed);
    return (p.parent_path() / (stem + p.extension().string())).string();
}

void printSummary(const tcdgp::RunReport& r) {
    double maxErr = 0.0;
    std::size_t clean = 0;
    for (const auto& row : r.rows) {
        if (row.hasAggregate && row.drops == 0) {
            ++clean;
            maxErr = std::max(maxErr, row.absError());
        }
    }
    std::printf("scenario=%s nodes=%zu seed=%llu v2i=%llu v2v=%llu rows=%zu drop_free=%zu max_err=%.3g wall=%.3fs\n",
                tcdgp::toString(r.config.scenario).c_str(), r.config.nodeCount,
                static_cast<unsigned long long>(r.config.seed),
                static_cast<unsigned long long>(r.metrics.v2iMessageCount),
                static_cast<unsigned long long>(r.metrics.v2vMessageCount), r.rows.size(), clean, maxErr,
                r.wallSeconds);
}

}  // namespace

int main(int argc, char** argv) {
    std::optional<tcdgp::CliOptions> opts;
    try {
        opts = tcdgp::parseConfig(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    if (!opts) return 0;

    std::vector<tcdgp::SimConfig> runs;
    if (opts->seeds) {
        for (auto s = opts->seeds->first; s <= opts->seeds->last; ++s) {
            auto cfg = opts->config;
            cfg.seed = s;
            if (!cfg.outputPath.empty()) cfg.outputPath = seededPath(cfg.outputPath, s);
            runs.push_back(cfg);
        }
    } else {
        runs.push_back(opts->config);
    }

    // Each run owns its engine; results are merged only once all are done.
    std::vector<tcdgp::RunReport> reports(runs.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < runs.size(); base += workers) {
        std::vector<std::future<tcdgp::RunReport>> batch;
        for (std::size_t i = base; i < std::min(runs.size(), base + workers); ++i) {
            batch.push_back(std::async(std::launch::async, [&cfg = runs[i]] { return tcdgp::runScenario(cfg); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) reports[base + i] = batch[i].get();
    }

    int status = 0;
    for (const auto& r : reports) {
        printSummary(r);
        if (r.config.outputPath.empty()) continue;
        try {
            tcdgp::emitReport(r, r.config.outputFormat, r.config.outputPath);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            status = 3;
        }
    }
    return status;
}
