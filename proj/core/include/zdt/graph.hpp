#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "zdt/flow.hpp"

namespace zdt {

// Weighted host-interaction graph. Each flow src->dst contributes edge
// weight 1, so a directed weight is the count of flows for that ordered
// pair. Self-loops are dropped at construction. Nodes are stored sorted by
// host id, which makes every downstream computation independent of record
// order.
class HostGraph {
public:
    using Edge = std::pair<int, double>;  // (neighbor index, weight)

    static HostGraph from_records(const std::vector<FlowRecord>& records);

    // Direct construction from explicit hosts and directed edge weights;
    // hosts without edges stay as isolated nodes. Self-loops are rejected.
    static HostGraph from_edges(const std::vector<std::string>& hosts,
                                const std::vector<std::tuple<std::string, std::string, double>>& edges);

    int node_count() const { return static_cast<int>(hosts_.size()); }
    bool empty() const { return hosts_.empty(); }
    const std::vector<std::string>& hosts() const { return hosts_; }
    const std::string& host(int i) const { return hosts_[i]; }
    int index_of(const std::string& host) const;  // -1 when absent

    // Directed view. Adjacency lists are sorted by neighbor index.
    const std::vector<Edge>& out_edges(int i) const { return out_[i]; }
    const std::vector<Edge>& in_edges(int i) const { return in_[i]; }
    double out_strength(int i) const { return out_strength_[i]; }
    double in_strength(int i) const { return in_strength_[i]; }
    double directed_weight(int src, int dst) const;

    // Undirected view: weight(u,v) = w(u->v) + w(v->u).
    const std::vector<Edge>& und_edges(int i) const { return und_[i]; }
    double und_strength(int i) const { return und_strength_[i]; }
    double total_und_weight() const { return total_und_weight_; }  // 2m

private:
    static HostGraph build(std::map<std::string, int> index,
                           const std::map<std::pair<std::string, std::string>, double>& weights);

    std::vector<std::string> hosts_;
    std::vector<std::vector<Edge>> out_, in_, und_;
    std::vector<double> out_strength_, in_strength_, und_strength_;
    double total_und_weight_ = 0.0;
};

inline HostGraph build_graph(const std::vector<FlowRecord>& records) {
    return HostGraph::from_records(records);
}

// Partition of the graph nodes. Labels are dense integers from 0, numbered
// in first-seen order over the node index order.
struct CommunityAssignment {
    std::vector<int> label;  // label[node index]
    int count = 0;

    std::map<std::string, int> by_host(const HostGraph& g) const;
};

// Seeded Louvain modularity maximization on the undirected weighted view.
CommunityAssignment detect_communities(const HostGraph& g, std::uint64_t seed);

// Newman modularity of an arbitrary partition on the undirected view.
// Exposed so partitions can be compared against exhaustive search in tests.
double modularity(const HostGraph& g, const std::vector<int>& labels);

// Power iteration with uniform teleport; dangling mass is redistributed
// uniformly. Scores sum to 1.
std::vector<double> pagerank(const HostGraph& g, double damping = 0.85, double tol = 1e-8,
                             int max_iter = 100);

// The nine per-host descriptors.
struct HostFeatures {
    double in_degree = 0;                 // distinct predecessors
    double out_degree = 0;                // distinct successors
    double in_strength = 0;               // total incoming weight
    double out_strength = 0;              // total outgoing weight
    double pagerank = 0;                  // in (0,1), sums to 1 over hosts
    double clustering_coefficient = 0;    // [0,1], undirected view
    double community_size_fraction = 0;   // |own community| / |nodes|
    double intra_community_ratio = 0;     // [0,1], undirected edge weight staying inside
    double k_core = 0;                    // undirected core number

    std::array<double, 9> as_array() const {
        return {in_degree, out_degree, in_strength, out_strength, pagerank,
                clustering_coefficient, community_size_fraction, intra_community_ratio, k_core};
    }
};

extern const std::array<const char*, 9> kHostFeatureNames;

std::map<std::string, HostFeatures> compute_host_features(const HostGraph& g,
                                                          const CommunityAssignment& communities);

// `host,in_degree,...,k_core,community` rows.
void write_host_features_csv(std::ostream& out, const HostGraph& g,
                             const std::map<std::string, HostFeatures>& features,
                             const CommunityAssignment& communities);

}  // namespace zdt
