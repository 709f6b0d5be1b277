#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace housing {

struct DisconnectedGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownArea : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TopologyKind { Singleton, AdjacencyList, Complete };

/// Structural description of the area graph before distances are computed.
struct Topology {
    TopologyKind kind = TopologyKind::Singleton;
    int n_areas = 1;
    /// Undirected unit-weight edges, only meaningful for AdjacencyList.
    std::vector<std::pair<int, int>> edges;

    static Topology singleton() { return {TopologyKind::Singleton, 1, {}}; }
    static Topology complete(int n);
    static Topology adjacency(int n, std::vector<std::pair<int, int>> edges);
};

/// Immutable area graph with precomputed all-pairs shortest path hops and the
/// outreach weight 1 - d(i,j)/ecc(i) used by spatially constrained buyers.
class RegionGraph {
public:
    RegionGraph() : RegionGraph(Topology::singleton()) {}
    explicit RegionGraph(const Topology& topo);

    int size() const { return n_; }
    int distance(int from, int to) const {
        check(from);
        check(to);
        return dist_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                     static_cast<std::size_t>(to)];
    }
    int eccentricity(int area) const {
        check(area);
        return ecc_[static_cast<std::size_t>(area)];
    }

    /// Spatial attenuation of listing visibility from a viewer area toward a
    /// listing area: 1 at the viewer's own area, 0 at its farthest area.
    /// A single-area graph has zero eccentricity and full outreach everywhere.
    double outreach(int from, int to) const {
        const int e = eccentricity(from);
        if (e == 0) return 1.0;
        return 1.0 - static_cast<double>(distance(from, to)) / static_cast<double>(e);
    }

    const Topology& topology() const { return topo_; }

private:
    void check(int area) const {
        if (area < 0 || area >= n_)
            throw UnknownArea("area index " + std::to_string(area) + " out of range [0," +
                              std::to_string(n_) + ")");
    }

    Topology topo_;
    int n_ = 0;
    std::vector<int> dist_; // row-major n x n
    std::vector<int> ecc_;
};

/// Parse an `area_a,area_b` edge list (header row required). Area names are
/// assigned dense indices in first-appearance order; `names` receives them.
Topology parse_edge_list(const std::vector<std::vector<std::string>>& rows,
                         std::vector<std::string>& names);

} // namespace housing
