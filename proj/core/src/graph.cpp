#include "zdt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "zdt/csv.hpp"

namespace zdt {

HostGraph HostGraph::from_records(const std::vector<FlowRecord>& records) {
    // Accumulate flow counts per ordered pair; integer counts make the
    // accumulation independent of record order.
    std::map<std::pair<std::string, std::string>, double> weights;
    for (const auto& r : records) {
        if (r.src_ip == r.dst_ip) continue;  // loopback flows carry no graph signal
        weights[{r.src_ip, r.dst_ip}] += 1.0;
    }
    std::map<std::string, int> index;
    for (const auto& [pair, w] : weights) {
        (void)w;
        index.emplace(pair.first, 0);
        index.emplace(pair.second, 0);
    }
    return build(std::move(index), weights);
}

HostGraph HostGraph::from_edges(
    const std::vector<std::string>& hosts,
    const std::vector<std::tuple<std::string, std::string, double>>& edges) {
    std::map<std::pair<std::string, std::string>, double> weights;
    std::map<std::string, int> index;
    for (const auto& h : hosts) index.emplace(h, 0);
    for (const auto& [src, dst, w] : edges) {
        if (src == dst) throw DataError("HostGraph::from_edges: self-loop " + src);
        if (!(w > 0.0)) throw DataError("HostGraph::from_edges: edge weight must be positive");
        weights[{src, dst}] += w;
        index.emplace(src, 0);
        index.emplace(dst, 0);
    }
    return build(std::move(index), weights);
}

HostGraph HostGraph::build(std::map<std::string, int> index,
                           const std::map<std::pair<std::string, std::string>, double>& weights) {
    HostGraph g;
    g.hosts_.reserve(index.size());
    for (auto& [host, idx] : index) {
        idx = static_cast<int>(g.hosts_.size());
        g.hosts_.push_back(host);
    }
    const int n = g.node_count();
    g.out_.resize(n);
    g.in_.resize(n);
    g.und_.resize(n);
    g.out_strength_.assign(n, 0.0);
    g.in_strength_.assign(n, 0.0);
    g.und_strength_.assign(n, 0.0);

    std::map<std::pair<int, int>, double> und;
    for (const auto& [pair, w] : weights) {
        int u = index[pair.first], v = index[pair.second];
        g.out_[u].push_back({v, w});
        g.in_[v].push_back({u, w});
        g.out_strength_[u] += w;
        g.in_strength_[v] += w;
        und[{std::min(u, v), std::max(u, v)}] += w;
    }
    for (const auto& [pair, w] : und) {
        g.und_[pair.first].push_back({pair.second, w});
        g.und_[pair.second].push_back({pair.first, w});
        g.und_strength_[pair.first] += w;
        g.und_strength_[pair.second] += w;
        g.total_und_weight_ += 2.0 * w;
    }
    for (auto* lists : {&g.out_, &g.in_, &g.und_})
        for (auto& edges : *lists)
            std::sort(edges.begin(), edges.end());
    return g;
}

int HostGraph::index_of(const std::string& host) const {
    auto it = std::lower_bound(hosts_.begin(), hosts_.end(), host);
    if (it == hosts_.end() || *it != host) return -1;
    return static_cast<int>(it - hosts_.begin());
}

double HostGraph::directed_weight(int src, int dst) const {
    const auto& edges = out_[src];
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair<int, double>{dst, 0.0},
                               [](const Edge& a, const Edge& b) { return a.first < b.first; });
    if (it == edges.end() || it->first != dst) return 0.0;
    return it->second;
}

std::map<std::string, int> CommunityAssignment::by_host(const HostGraph& g) const {
    std::map<std::string, int> m;
    for (int i = 0; i < g.node_count(); ++i) m[g.host(i)] = label[i];
    return m;
}

double modularity(const HostGraph& g, const std::vector<int>& labels) {
    const double two_m = g.total_und_weight();
    if (two_m <= 0.0) return 0.0;
    int max_label = 0;
    for (int l : labels) max_label = std::max(max_label, l);
    std::vector<double> intra(max_label + 1, 0.0), total(max_label + 1, 0.0);
    for (int v = 0; v < g.node_count(); ++v) {
        total[labels[v]] += g.und_strength(v);
        for (const auto& [u, w] : g.und_edges(v))
            if (labels[u] == labels[v]) intra[labels[v]] += w;  // counts each edge twice
    }
    double q = 0.0;
    for (std::size_t c = 0; c < intra.size(); ++c) {
        q += intra[c] / two_m - (total[c] / two_m) * (total[c] / two_m);
    }
    return q;
}

namespace {

// Working graph for Louvain aggregation levels.
struct LevelGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj;  // undirected, no self entries
    std::vector<double> self_loop;                         // intra weight folded by aggregation
    std::vector<double> strength;                          // incl. self loop counted twice
    double two_m = 0.0;
};

// One pass of greedy local moving. Returns true if any node changed
// community. Visitation order is the caller-provided permutation.
bool local_move_pass(const LevelGraph& g, std::vector<int>& comm, std::vector<double>& comm_total,
                     const std::vector<int>& order) {
    bool moved = false;
    std::vector<double> neigh_w(g.n, 0.0);
    std::vector<int> touched;
    for (int v : order) {
        const int old_c = comm[v];
        touched.clear();
        for (const auto& [u, w] : g.adj[v]) {
            const int c = comm[u];
            if (neigh_w[c] == 0.0) touched.push_back(c);
            neigh_w[c] += w;
        }
        comm_total[old_c] -= g.strength[v];

        // Gain of joining community c, up to a constant shared by all
        // candidates: w(v->c) - strength(v) * total(c) / two_m. Moves require
        // a strict improvement, so every move raises Q and passes terminate.
        const double k_v = g.strength[v];
        double best_gain = neigh_w[old_c] - k_v * comm_total[old_c] / g.two_m;
        int best_c = old_c;
        for (int c : touched) {
            if (c == old_c) continue;
            const double gain = neigh_w[c] - k_v * comm_total[c] / g.two_m;
            if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best_c = c;
            }
        }
        comm_total[best_c] += k_v;
        if (best_c != old_c) {
            comm[v] = best_c;
            moved = true;
        }
        for (int c : touched) neigh_w[c] = 0.0;
    }
    return moved;
}

std::vector<int> renumber_dense(const std::vector<int>& labels) {
    std::vector<int> remap(labels.size(), -1);
    std::vector<int> out(labels.size());
    int next = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (remap[labels[i]] < 0) remap[labels[i]] = next++;
        out[i] = remap[labels[i]];
    }
    return out;
}

}  // namespace

CommunityAssignment detect_communities(const HostGraph& g, std::uint64_t seed) {
    CommunityAssignment result;
    const int n = g.node_count();
    result.label.assign(n, 0);
    if (n == 0) return result;
    if (g.total_und_weight() <= 0.0) {
        // No edges at all: every node is its own singleton community.
        std::iota(result.label.begin(), result.label.end(), 0);
        result.count = n;
        return result;
    }

    std::mt19937_64 rng(seed);

    LevelGraph level;
    level.n = n;
    level.adj.resize(n);
    level.self_loop.assign(n, 0.0);
    level.strength.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
        level.adj[v] = g.und_edges(v);
        level.strength[v] = g.und_strength(v);
    }
    level.two_m = g.total_und_weight();

    std::vector<int> node_to_final(n);
    std::iota(node_to_final.begin(), node_to_final.end(), 0);

    for (int depth = 0; depth < 64; ++depth) {
        std::vector<int> comm(level.n);
        std::iota(comm.begin(), comm.end(), 0);
        std::vector<double> comm_total = level.strength;

        std::vector<int> order(level.n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);

        bool any_move = false;
        for (int pass = 0; pass < 1000; ++pass) {
            if (!local_move_pass(level, comm, comm_total, order)) break;
            any_move = true;
        }
        if (!any_move) break;

        comm = renumber_dense(comm);
        int n_comm = *std::max_element(comm.begin(), comm.end()) + 1;
        for (int& f : node_to_final) f = comm[f];
        if (n_comm == level.n) break;

        // Aggregate communities into supernodes.
        LevelGraph next;
        next.n = n_comm;
        next.adj.resize(n_comm);
        next.self_loop.assign(n_comm, 0.0);
        next.strength.assign(n_comm, 0.0);
        next.two_m = level.two_m;
        std::vector<std::map<int, double>> agg(n_comm);
        for (int v = 0; v < level.n; ++v) {
            const int cv = comm[v];
            next.self_loop[cv] += level.self_loop[v];
            for (const auto& [u, w] : level.adj[v]) {
                const int cu = comm[u];
                if (cu == cv)
                    next.self_loop[cv] += w / 2.0;  // each intra edge seen from both ends
                else
                    agg[cv][cu] += w;
            }
        }
        for (int c = 0; c < n_comm; ++c) {
            next.adj[c].assign(agg[c].begin(), agg[c].end());
            double s = 2.0 * next.self_loop[c];
            for (const auto& [u, w] : next.adj[c]) {
                (void)u;
                s += w;
            }
            next.strength[c] = s;
        }
        level = std::move(next);
    }

    result.label = renumber_dense(node_to_final);
    result.count = *std::max_element(result.label.begin(), result.label.end()) + 1;
    return result;
}

std::vector<double> pagerank(const HostGraph& g, double damping, double tol, int max_iter) {
    if (g.empty()) throw DataError("pagerank: empty graph");
    if (!(damping > 0.0 && damping < 1.0)) throw DataError("pagerank: damping must be in (0,1)");
    const int n = g.node_count();
    std::vector<double> x(n, 1.0 / n), next(n, 0.0);
    for (int iter = 0; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (int v = 0; v < n; ++v)
            if (g.out_strength(v) == 0.0) dangling += x[v];
        const double base = (1.0 - damping) / n + damping * dangling / n;
        for (int v = 0; v < n; ++v) {
            double acc = 0.0;
            for (const auto& [u, w] : g.in_edges(v)) acc += x[u] * (w / g.out_strength(u));
            next[v] = base + damping * acc;
        }
        double delta = 0.0;
        for (int v = 0; v < n; ++v) delta += std::abs(next[v] - x[v]);
        x.swap(next);
        if (delta < tol) break;
    }
    return x;
}

namespace {

std::vector<int> core_numbers(const HostGraph& g) {
    const int n = g.node_count();
    std::vector<int> degree(n), core(n, 0);
    for (int v = 0; v < n; ++v) degree[v] = static_cast<int>(g.und_edges(v).size());
    // Peel in nondecreasing degree order (Batagelj-Zaversnik).
    int maxd = 0;
    for (int d : degree) maxd = std::max(maxd, d);
    std::vector<std::vector<int>> buckets(maxd + 1);
    for (int v = 0; v < n; ++v) buckets[degree[v]].push_back(v);
    std::vector<bool> removed(n, false);
    std::vector<int> cur_degree = degree;
    int k = 0;
    for (int d = 0; d <= maxd; ++d) {
        auto& bucket = buckets[d];
        for (std::size_t i = 0; i < bucket.size(); ++i) {
            const int v = bucket[i];
            if (removed[v] || cur_degree[v] != d) continue;
            k = std::max(k, d);
            core[v] = k;
            removed[v] = true;
            for (const auto& [u, w] : g.und_edges(v)) {
                (void)w;
                if (removed[u]) continue;
                if (cur_degree[u] > d) {
                    --cur_degree[u];
                    if (cur_degree[u] <= d) bucket.push_back(u);  // falls into the current shell
                    else buckets[cur_degree[u]].push_back(u);
                }
            }
        }
    }
    return core;
}

double clustering_coefficient(const HostGraph& g, int v) {
    const auto& nbrs = g.und_edges(v);
    const int d = static_cast<int>(nbrs.size());
    if (d < 2) return 0.0;
    // Count undirected links among neighbors via sorted adjacency lookups.
    long long links = 0;
    for (int i = 0; i < d; ++i) {
        const auto& adj_i = g.und_edges(nbrs[i].first);
        for (int j = i + 1; j < d; ++j) {
            const int target = nbrs[j].first;
            auto it = std::lower_bound(adj_i.begin(), adj_i.end(),
                                       std::pair<int, double>{target, 0.0},
                                       [](const auto& a, const auto& b) { return a.first < b.first; });
            if (it != adj_i.end() && it->first == target) ++links;
        }
    }
    return 2.0 * static_cast<double>(links) / (static_cast<double>(d) * (d - 1));
}

}  // namespace

const std::array<const char*, 9> kHostFeatureNames = {
    "in_degree", "out_degree", "in_strength", "out_strength", "pagerank",
    "clustering", "community_size_fraction", "intra_community_ratio", "k_core"};

std::map<std::string, HostFeatures> compute_host_features(const HostGraph& g,
                                                          const CommunityAssignment& communities) {
    const int n = g.node_count();
    if (static_cast<int>(communities.label.size()) != n)
        throw DataError("compute_host_features: community assignment does not cover the graph");
    std::map<std::string, HostFeatures> out;
    if (n == 0) return out;

    const auto pr = pagerank(g);
    const auto core = core_numbers(g);
    std::vector<double> comm_size(communities.count, 0.0);
    for (int v = 0; v < n; ++v) comm_size[communities.label[v]] += 1.0;

    for (int v = 0; v < n; ++v) {
        HostFeatures f;
        f.in_degree = static_cast<double>(g.in_edges(v).size());
        f.out_degree = static_cast<double>(g.out_edges(v).size());
        f.in_strength = g.in_strength(v);
        f.out_strength = g.out_strength(v);
        f.pagerank = pr[v];
        f.clustering_coefficient = clustering_coefficient(g, v);
        f.community_size_fraction = comm_size[communities.label[v]] / n;
        double intra = 0.0, total = 0.0;
        for (const auto& [u, w] : g.und_edges(v)) {
            total += w;
            if (communities.label[u] == communities.label[v]) intra += w;
        }
        f.intra_community_ratio = total > 0.0 ? intra / total : 1.0;
        f.k_core = static_cast<double>(core[v]);
        out.emplace(g.host(v), f);
    }
    return out;
}

void write_host_features_csv(std::ostream& out, const HostGraph& g,
                             const std::map<std::string, HostFeatures>& features,
                             const CommunityAssignment& communities) {
    out << "host";
    for (const char* name : kHostFeatureNames) out << ',' << name;
    out << ",community\n";
    for (int v = 0; v < g.node_count(); ++v) {
        const auto& f = features.at(g.host(v));
        std::vector<std::string> row{g.host(v)};
        for (double x : f.as_array()) row.push_back(csv::format_double(x));
        row.push_back(std::to_string(communities.label[v]));
        csv::write_row(out, row);
    }
}

}  // namespace zdt
