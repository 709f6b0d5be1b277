#include "housing/region_graph.hpp"

#include <algorithm>
#include <queue>

namespace housing {

Topology Topology::complete(int n) {
    Topology t;
    t.kind = TopologyKind::Complete;
    t.n_areas = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) t.edges.emplace_back(i, j);
    return t;
}

Topology Topology::adjacency(int n, std::vector<std::pair<int, int>> edges) {
    Topology t;
    t.kind = TopologyKind::AdjacencyList;
    t.n_areas = n;
    t.edges = std::move(edges);
    return t;
}

RegionGraph::RegionGraph(const Topology& topo) : topo_(topo), n_(topo.n_areas) {
    if (n_ <= 0) throw UnknownArea("graph needs at least one area");

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (const auto& [a, b] : topo.edges) {
        if (a < 0 || a >= n_ || b < 0 || b >= n_)
            throw UnknownArea("edge endpoint out of range");
        if (a == b) continue;
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }

    dist_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), -1);
    ecc_.assign(static_cast<std::size_t>(n_), 0);

    // BFS from every source; unit weights make this the all-pairs solution.
    std::vector<int> frontier;
    for (int s = 0; s < n_; ++s) {
        int* row = dist_.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(n_);
        std::queue<int> q;
        row[s] = 0;
        q.push(s);
        int reached = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (const int v : adj[static_cast<std::size_t>(u)]) {
                if (row[v] < 0) {
                    row[v] = row[u] + 1;
                    ++reached;
                    q.push(v);
                }
            }
        }
        if (reached != n_)
            throw DisconnectedGraph("area " + std::to_string(s) +
                                    " cannot reach the whole region");
        ecc_[static_cast<std::size_t>(s)] = *std::max_element(row, row + n_);
    }
}

Topology parse_edge_list(const std::vector<std::vector<std::string>>& rows,
                         std::vector<std::string>& names) {
    names.clear();
    std::vector<std::pair<int, int>> edges;
    auto index_of = [&names](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        names.push_back(name);
        return static_cast<int>(names.size() - 1);
    };
    // rows[0] is the header. Index the left endpoint first; leaving the two
    // calls inside one expression would make first-appearance order depend on
    // the compiler's argument evaluation order.
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() < 2) throw UnknownArea("edge row needs two fields");
        const int a = index_of(rows[r][0]);
        const int b = index_of(rows[r][1]);
        edges.emplace_back(a, b);
    }
    return Topology::adjacency(static_cast<int>(names.size()), std::move(edges));
}

} // namespace housing
