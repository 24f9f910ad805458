#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tcdgp/gathering.hpp"
#include "tcdgp/report.hpp"
#include "tcdgp/scenario.hpp"

using namespace tcdgp;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

SimConfig config(Scenario s, std::size_t nodes, std::uint64_t seed = 1) {
    SimConfig c;
    c.scenario = s;
    c.nodeCount = nodes;
    c.seed = seed;
    return c;
}

std::uint64_t occupiedTotal(const RunReport& r) {
    std::uint64_t n = 0;
    for (const auto& [cycle, k] : r.occupiedClusters) n += static_cast<std::uint64_t>(k);
    return n;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::vector<std::size_t> kSweep{50, 100, 200, 400, 600, 800, 1000};

void perNodeCountLaw() {
    bool ok = true;
    std::ostringstream d;
    for (std::size_t n : {100u, 1000u}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = runScenario1(config(Scenario::PerNode, n));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::uint64_t expect = n * 120;
        ok = ok && r.metrics.v2iMessageCount == expect && secs < 5.0;
        d << "N=" << n << " v2i=" << r.metrics.v2iMessageCount << " (expect " << expect << ") in " << secs << "s; ";
    }
    verdict(1, ok, d.str());
}

void clusteredSweep() {
    bool boundOk = true, lawOk = true, fewerOk = true;
    std::ostringstream d2, d3;
    for (std::size_t n : kSweep) {
        const auto s3 = runScenario3(config(Scenario::FullTCDGP, n));
        const auto s1 = runScenario1(config(Scenario::PerNode, n));
        const auto v3 = s3.metrics.v2iMessageCount;
        boundOk = boundOk && v3 <= 4320;
        lawOk = lawOk && v3 == occupiedTotal(s3);
        fewerOk = fewerOk && v3 < s1.metrics.v2iMessageCount;
        d2 << "N=" << n << ":" << v3 << "/" << occupiedTotal(s3) << " ";
        d3 << "N=" << n << ":" << s1.metrics.v2iMessageCount << ">" << v3 << " ";
    }
    verdict(2, boundOk && lawOk, "v2i/occupied " + d2.str());

    double worst = std::numeric_limits<double>::infinity();
    std::ostringstream ratio;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s1 = runScenario1(config(Scenario::PerNode, 1000, seed));
        const auto s3 = runScenario3(config(Scenario::FullTCDGP, 1000, seed));
        const double r = static_cast<double>(s1.metrics.v2iMessageCount) / static_cast<double>(s3.metrics.v2iMessageCount);
        worst = std::min(worst, r);
        ratio << "seed" << seed << "=" << r << " ";
    }
    verdict(3, fewerOk && worst >= 25.0, d3.str() + "| ratio at N=1000 " + ratio.str() + "min=" + std::to_string(worst));
}

void primMatchesExhaustive() {
    RadioConfig radio;
    RandomSource rng(2024);
    const auto s = rng.registerStream("acceptance.mst");
    int cases = 0, agree = 0;
    double worstGap = 0.0;
    while (cases < 200) {
        const int n = 3 + static_cast<int>(rng.next(s) * 5);
        std::vector<MemberState> m;
        for (int i = 0; i < n; ++i) m.push_back({i, Vec2(rng.uniform(s, 0.0, 500.0), rng.uniform(s, 0.0, 15.0)), 1.0});
        const auto ref = oracle::bruteForceMstWeight(m, radio.transmissionRange);
        if (!ref) continue;
        ++cases;
        const auto tree = buildMST(m, static_cast<NodeId>(rng.next(s) * n), radio);
        const double got = treeWeight(tree, m);
        const double gap = std::abs(got - *ref);
        worstGap = std::max(worstGap, gap);
        if (tree.excluded.empty() && tree.size() == static_cast<std::size_t>(n) && gap <= 1e-9 * std::max(1.0, *ref)) ++agree;
    }
    verdict(4, agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " connected clusters match, worst gap " +
                                   std::to_string(worstGap));
}

void exactFold(const RunReport& r) {
    int dropFree = 0, withDrops = 0, missingUnreported = 0, aggregates = 0;
    double maxErr = 0.0, maxErrWithDrops = 0.0;
    for (const auto& row : r.rows) {
        if (!row.hasAggregate) {
            if (row.drops < row.truthCount) ++missingUnreported;
            continue;
        }
        ++aggregates;
        if (row.count < row.truthCount && row.drops < row.truthCount - row.count) ++missingUnreported;
        if (row.drops == 0) {
            ++dropFree;
            maxErr = std::max(maxErr, row.absError());
        } else {
            ++withDrops;
            maxErrWithDrops = std::max(maxErrWithDrops, row.absError());
        }
    }
    std::ostringstream d;
    d << dropFree << "/" << aggregates << " rows drop-free, max err " << maxErr << "; " << withDrops
      << " rows with drops (max err " << maxErrWithDrops << "), unreported gaps " << missingUnreported;
    verdict(5, dropFree > 0 && maxErr <= 1e-9 && missingUnreported == 0, d.str());
}

void treeEdgeCount(const RunReport& r) {
    int clusters = 0, bad = 0;
    for (const auto& t : r.clusterTraces) {
        ++clusters;
        const std::set<NodeId> frozen(t.frozenMembers.begin(), t.frozenMembers.end());
        bool ok = t.treeDataSent == t.treeSize - 1 && t.treeSize >= 1 &&
                  t.treeSize <= static_cast<int>(frozen.size()) && frozen.count(t.head) == 1;
        if (auto it = r.deliveredReadings.find({t.cycle, t.tag}); it != r.deliveredReadings.end()) {
            for (const auto& rd : it->second) ok = ok && frozen.count(rd.node) == 1 && rd.tag == t.tag;
            ok = ok && static_cast<int>(it->second.size()) <= t.treeSize;
        }
        if (!ok) ++bad;
    }
    verdict(6, clusters > 0 && bad == 0,
            std::to_string(clusters - bad) + "/" + std::to_string(clusters) + " cluster-cycles with TreeData == treeSize - 1");
}

void splitPartitions() {
    RandomSource rng(77);
    const auto s = rng.registerStream("acceptance.split");
    int ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t target = 1 + static_cast<std::size_t>(rng.next(s) * 16);
        const std::size_t n = target + static_cast<std::size_t>(rng.next(s) * 60);
        std::vector<MemberState> nodes;
        for (std::size_t i = 0; i < n; ++i) {
            nodes.push_back({static_cast<NodeId>(i), Vec2(rng.uniform(s, 0.0, 1800.0), rng.uniform(s, 0.0, 15.0)), 1.0});
        }
        const auto cs = splitNetwork(nodes, target);
        std::vector<int> hits(n, 0);
        bool good = cs.size() == target;
        for (const auto& c : cs) {
            good = good && !c.memberIds.empty() && c.contains(c.headId);
            for (NodeId id : c.memberIds) ++hits[static_cast<std::size_t>(id)];
        }
        for (int h : hits) good = good && h == 1;
        ok += good;
    }
    verdict(7, ok == 1000, std::to_string(ok) + "/1000 splits are exact partitions of the requested size");
}

void byteIdentical() {
    const auto dir = std::filesystem::temp_directory_path();
    bool ok = true;
    std::ostringstream d;
    for (auto sc : {Scenario::PerNode, Scenario::PerClusterHead, Scenario::FullTCDGP}) {
        for (auto fmt : {OutputFormat::Csv, OutputFormat::Json}) {
            const auto a = dir / "tcdgp_acc_a.out";
            const auto b = dir / "tcdgp_acc_b.out";
            const auto c = config(sc, 100, 7);
            emitReport(runScenario(c), fmt, a.string());
            emitReport(runScenario(c), fmt, b.string());
            const auto sa = slurp(a), sb = slurp(b);
            const bool same = !sa.empty() && sa == sb;
            ok = ok && same;
            d << "s" << static_cast<int>(sc) << "/" << toString(fmt) << "=" << (same ? "same" : "DIFF") << "(" << sa.size()
              << "B) ";
            std::filesystem::remove(a);
            std::filesystem::remove(b);
        }
    }
    verdict(8, ok, d.str());
}

}  // namespace

int main() {
    try {
        perNodeCountLaw();
        clusteredSweep();
        primMatchesExhaustive();
        const auto full = runScenario3(config(Scenario::FullTCDGP, 100));
        exactFold(full);
        treeEdgeCount(full);
        splitPartitions();
        byteIdentical();
    } catch (const std::exception& e) {
        std::printf("[FAIL] aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
