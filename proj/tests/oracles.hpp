#pragma once

#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "tcdgp/clustering.hpp"

namespace tcdgp::oracle {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

// Minimum spanning weight by exhaustive search over every (n-1)-edge subset of
// the unit-disk graph. nullopt when the graph is disconnected. Small n only.
inline std::optional<double> bruteForceMstWeight(const std::vector<MemberState>& nodes, double range) {
    struct Edge {
        std::size_t a, b;
        double w;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const double dx = nodes[i].position.x() - nodes[j].position.x();
            const double dy = nodes[i].position.y() - nodes[j].position.y();
            const double d2 = dx * dx + dy * dy;
            if (d2 <= range * range) edges.push_back({i, j, d2});
        }
    }
    const std::size_t need = nodes.size() - 1;
    if (need == 0) return 0.0;
    std::optional<double> best;
    std::vector<std::size_t> pick(need);
    // Enumerate combinations of `need` edges in lexicographic order.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == need) {
            DisjointSets ds(nodes.size());
            double total = 0.0;
            for (std::size_t k : pick) {
                if (!ds.unite(edges[k].a, edges[k].b)) return;
                total += edges[k].w;
            }
            if (!best || total < *best) best = total;
            return;
        }
        for (std::size_t e = start; e + (need - depth) <= edges.size(); ++e) {
            pick[depth] = e;
            rec(e + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace tcdgp::oracle
