#include "infoflow/dcg.hpp"

#include "infoflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace infoflow {

namespace {

struct Dendrogram {
    std::vector<TreeMerge> merges; // heights nondecreasing (average linkage is monotone)
    size_t n = 0;
};

// Unweighted average linkage. Tie-breaking is deterministic: among
// equal-distance candidates, merge the pair whose smallest-leaf labels
// are lexicographically smallest.
Dendrogram average_linkage(const std::vector<double>& dist, size_t n) {
    Dendrogram dendro;
    dendro.n = n;
    if (n <= 1) return dendro;

    const size_t slots = 2 * n - 1;
    std::vector<double> d(slots * slots, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) d[i * slots + j] = dist[i * n + j];

    std::vector<int> label(slots);   // smallest original leaf in the cluster
    std::vector<long> size(slots, 1);
    for (size_t i = 0; i < n; ++i) label[i] = static_cast<int>(i);

    std::vector<size_t> active(n);
    std::iota(active.begin(), active.end(), 0);

    for (size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::max();
        size_t bi = 0, bj = 0;
        int bli = 0, blj = 0;
        bool first = true;
        for (size_t a = 0; a < active.size(); ++a) {
            for (size_t b = a + 1; b < active.size(); ++b) {
                const size_t i = active[a], j = active[b];
                const double v = d[i * slots + j];
                const int li = std::min(label[i], label[j]);
                const int lj = std::max(label[i], label[j]);
                if (first || v < best ||
                    (v == best && (li < bli || (li == bli && lj < blj)))) {
                    first = false;
                    best = v;
                    bi = i;
                    bj = j;
                    bli = li;
                    blj = lj;
                }
            }
        }
        size_t left = bi, right = bj;
        if (label[right] < label[left]) std::swap(left, right);

        const size_t merged = n + step;
        label[merged] = std::min(label[left], label[right]);
        size[merged] = size[left] + size[right];
        dendro.merges.push_back({static_cast<int>(left), static_cast<int>(right), best});

        const double wl = static_cast<double>(size[left]);
        const double wr = static_cast<double>(size[right]);
        for (size_t other : active) {
            if (other == left || other == right) continue;
            const double nd =
                (wl * d[left * slots + other] + wr * d[right * slots + other]) / (wl + wr);
            d[merged * slots + other] = nd;
            d[other * slots + merged] = nd;
        }
        active.erase(std::remove(active.begin(), active.end(), left), active.end());
        active.erase(std::remove(active.begin(), active.end(), right), active.end());
        active.push_back(merged);
    }
    return dendro;
}

// Exact minimum-adjacency-cost leaf ordering over every layout reachable
// by flipping children of internal nodes. The cost of a layout is the sum
// of d(x, y) over consecutive leaves; this is what the lattice energy of
// a seriated matrix decomposes into along one axis.
class LeafOrderer {
public:
    LeafOrderer(const Dendrogram& dendro, const std::vector<double>& dist)
        : dendro_(dendro), dist_(dist), n_(dendro.n) {}

    std::vector<int> order() {
        if (n_ == 0) return {};
        if (n_ == 1) return {0};

        const size_t nodes = n_ + dendro_.merges.size();
        leaves_.resize(nodes);
        for (size_t i = 0; i < n_; ++i) leaves_[i] = {static_cast<int>(i)};
        tables_.resize(nodes);

        for (size_t t = 0; t < dendro_.merges.size(); ++t) {
            const auto a = static_cast<size_t>(dendro_.merges[t].left);
            const auto b = static_cast<size_t>(dendro_.merges[t].right);
            build_table(n_ + t, a, b);
        }

        const size_t root = nodes - 1;
        const Table& rt = tables_[root];
        double best = std::numeric_limits<double>::max();
        size_t bl = 0, br = 0;
        for (size_t i = 0; i < rt.la.size(); ++i) {
            for (size_t j = 0; j < rt.lb.size(); ++j) {
                const double c = rt.cost[i * rt.lb.size() + j];
                if (c < best) {
                    best = c;
                    bl = i;
                    br = j;
                }
            }
        }
        std::vector<int> layout;
        layout.reserve(n_);
        emit(root, rt.la[bl], rt.lb[br], layout);
        return layout;
    }

private:
    struct Table {
        size_t child_a = 0, child_b = 0;
        std::vector<int> la, lb;      // leaves of each child, ascending
        std::vector<double> cost;     // [i * lb.size() + j], endpoint la[i] .. lb[j]
        std::vector<int> meet_a;      // argmin: boundary leaf inside child a
        std::vector<int> meet_b;      // argmin: boundary leaf inside child b
    };

    double d(int i, int j) const { return dist_[static_cast<size_t>(i) * n_ + j]; }

    // Cost of laying child `node` out from endpoint l to endpoint m.
    // Valid only when l and m sit in opposite halves of `node` (or the
    // node is a single leaf and l == m).
    double child_cost(size_t node, int l, int m) const {
        if (node < n_) return l == m ? 0.0 : std::numeric_limits<double>::max();
        const Table& t = tables_[node];
        const size_t cols = t.lb.size();
        auto ia = std::lower_bound(t.la.begin(), t.la.end(), l);
        if (ia != t.la.end() && *ia == l) {
            auto jb = std::lower_bound(t.lb.begin(), t.lb.end(), m);
            if (jb == t.lb.end() || *jb != m) return std::numeric_limits<double>::max();
            return t.cost[static_cast<size_t>(ia - t.la.begin()) * cols +
                          static_cast<size_t>(jb - t.lb.begin())];
        }
        auto ib = std::lower_bound(t.lb.begin(), t.lb.end(), l);
        if (ib != t.lb.end() && *ib == l) {
            auto ja = std::lower_bound(t.la.begin(), t.la.end(), m);
            if (ja == t.la.end() || *ja != m) return std::numeric_limits<double>::max();
            // reversed layout has identical cost
            return t.cost[static_cast<size_t>(ja - t.la.begin()) * cols +
                          static_cast<size_t>(ib - t.lb.begin())];
        }
        return std::numeric_limits<double>::max();
    }

    void build_table(size_t node, size_t a, size_t b) {
        Table t;
        t.child_a = a;
        t.child_b = b;
        t.la = leaves_[a];
        t.lb = leaves_[b];
        const size_t ra = t.la.size(), rb = t.lb.size();
        t.cost.assign(ra * rb, 0.0);
        t.meet_a.assign(ra * rb, -1);
        t.meet_b.assign(ra * rb, -1);

        // bridge[m][r] = min over m' of d(m, m') + cost_b(m', r), plus argmin
        std::vector<double> bridge(ra * rb, std::numeric_limits<double>::max());
        std::vector<int> bridge_arg(ra * rb, -1);
        for (size_t mi = 0; mi < ra; ++mi) {
            const int m = t.la[mi];
            for (size_t rj = 0; rj < rb; ++rj) {
                const int r = t.lb[rj];
                double bc = std::numeric_limits<double>::max();
                int barg = -1;
                for (int m2 : t.lb) {
                    const double cb = child_cost(b, m2, r);
                    if (cb == std::numeric_limits<double>::max()) continue;
                    const double c = d(m, m2) + cb;
                    if (c < bc) {
                        bc = c;
                        barg = m2;
                    }
                }
                bridge[mi * rb + rj] = bc;
                bridge_arg[mi * rb + rj] = barg;
            }
        }
        for (size_t li = 0; li < ra; ++li) {
            const int l = t.la[li];
            for (size_t rj = 0; rj < rb; ++rj) {
                double bc = std::numeric_limits<double>::max();
                int ma = -1, mb = -1;
                for (size_t mi = 0; mi < ra; ++mi) {
                    const double ca = child_cost(a, l, t.la[mi]);
                    if (ca == std::numeric_limits<double>::max()) continue;
                    const double br = bridge[mi * rb + rj];
                    if (br == std::numeric_limits<double>::max()) continue;
                    const double c = ca + br;
                    if (c < bc) {
                        bc = c;
                        ma = t.la[mi];
                        mb = bridge_arg[mi * rb + rj];
                    }
                }
                t.cost[li * rb + rj] = bc;
                t.meet_a[li * rb + rj] = ma;
                t.meet_b[li * rb + rj] = mb;
            }
        }

        std::vector<int> all(t.la);
        all.insert(all.end(), t.lb.begin(), t.lb.end());
        std::sort(all.begin(), all.end());
        leaves_[node] = std::move(all);
        tables_[node] = std::move(t);
    }

    // Emit the layout of `node` that starts at leaf l and ends at leaf r.
    void emit(size_t node, int l, int r, std::vector<int>& out) const {
        if (node < n_) {
            out.push_back(static_cast<int>(node));
            return;
        }
        const Table& t = tables_[node];
        const size_t cols = t.lb.size();
        const bool forward = std::binary_search(t.la.begin(), t.la.end(), l);
        const int ll = forward ? l : r;
        const int rr = forward ? r : l;
        const size_t li = static_cast<size_t>(
            std::lower_bound(t.la.begin(), t.la.end(), ll) - t.la.begin());
        const size_t rj = static_cast<size_t>(
            std::lower_bound(t.lb.begin(), t.lb.end(), rr) - t.lb.begin());
        const int ma = t.meet_a[li * cols + rj];
        const int mb = t.meet_b[li * cols + rj];
        if (forward) {
            emit(t.child_a, ll, ma, out);
            emit(t.child_b, mb, rr, out);
        } else {
            std::vector<int> tmp;
            emit(t.child_a, ll, ma, tmp);
            emit(t.child_b, mb, rr, tmp);
            out.insert(out.end(), tmp.rbegin(), tmp.rend());
        }
    }

    const Dendrogram& dendro_;
    const std::vector<double>& dist_;
    size_t n_;
    std::vector<std::vector<int>> leaves_;
    std::vector<Table> tables_;
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Clustering after the first `merge_count` merges, cluster ids assigned
// left to right along the layout.
ClusteringComposition composition_after(const Dendrogram& dendro,
                                        const std::vector<int>& layout, size_t merge_count) {
    const size_t n = dendro.n;
    UnionFind leaf_uf(n);
    std::vector<int> node_leaf(n + dendro.merges.size(), -1); // one representative leaf per node
    for (size_t i = 0; i < n; ++i) node_leaf[i] = static_cast<int>(i);
    for (size_t t = 0; t < dendro.merges.size(); ++t) {
        const auto& m = dendro.merges[t];
        node_leaf[n + t] = node_leaf[static_cast<size_t>(m.left)];
        if (t < merge_count)
            leaf_uf.unite(node_leaf[static_cast<size_t>(m.left)],
                          node_leaf[static_cast<size_t>(m.right)]);
    }

    ClusteringComposition comp;
    comp.assignment.assign(n, -1);
    std::vector<int> root_cluster(n, -1);
    int next = 0;
    for (int leaf : layout) {
        const int root = leaf_uf.find(leaf);
        if (root_cluster[static_cast<size_t>(root)] < 0)
            root_cluster[static_cast<size_t>(root)] = next++;
        comp.assignment[static_cast<size_t>(leaf)] = root_cluster[static_cast<size_t>(root)];
    }
    comp.k = next;
    return comp;
}

} // namespace

std::vector<std::vector<int>> ClusteringComposition::members() const {
    std::vector<std::vector<int>> out(static_cast<size_t>(k));
    for (size_t i = 0; i < assignment.size(); ++i)
        out[static_cast<size_t>(assignment[i])].push_back(static_cast<int>(i));
    return out;
}

std::vector<int> ClusteringComposition::sizes() const {
    std::vector<int> out(static_cast<size_t>(k), 0);
    for (int a : assignment) out[static_cast<size_t>(a)]++;
    return out;
}

double UltrametricTree::tree_distance(int i, int j) const {
    if (i == j) return 0.0;
    for (size_t lvl = 0; lvl < levels.size(); ++lvl)
        if (levels[lvl].assignment[static_cast<size_t>(i)] ==
            levels[lvl].assignment[static_cast<size_t>(j)])
            return merge_heights[lvl];
    return merge_heights.empty() ? 0.0 : merge_heights.back();
}

UltrametricTree build_ultrametric_tree(const std::vector<double>& dist, size_t n,
                                       int scale_count, uint64_t seed) {
    (void)seed; // the agglomerative builder is deterministic without it
    if (n == 0) raise(ErrorKind::EmptyInput, "tree over zero leaves");
    if (dist.size() != n * n)
        raise(ErrorKind::LengthMismatch, "distance matrix size does not match leaf count");
    if (scale_count < 1) raise(ErrorKind::ConfigError, "scale_count must be >= 1");
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const double v = dist[i * n + j];
            if (v < 0.0) raise(ErrorKind::NegativeDistance, "distance matrix has negative entries");
            const double w = dist[j * n + i];
            if (std::abs(v - w) > 1e-9 * std::max(1.0, std::max(std::abs(v), std::abs(w))))
                raise(ErrorKind::AsymmetricInput, "distance matrix is not symmetric");
        }
    }

    UltrametricTree tree;
    if (n == 1) {
        tree.leaves = {0};
        tree.levels.push_back({{0}, 1});
        tree.merge_heights.push_back(0.0);
        return tree;
    }

    Dendrogram dendro = average_linkage(dist, n);
    std::stable_sort(dendro.merges.begin(), dendro.merges.end(),
                     [](const TreeMerge& a, const TreeMerge& b) { return a.height < b.height; });
    LeafOrderer orderer(dendro, dist);
    tree.leaves = orderer.order();
    tree.merges = dendro.merges;

    // Scales: states t = 0..n-2 (after t merges, n-t clusters) scored by
    // the height interval they occupy; keep the scale_count widest.
    std::vector<double> h(n - 1);
    for (size_t t = 0; t + 1 < n; ++t) h[t] = dendro.merges[t].height;
    struct Gap {
        double width;
        size_t state;
    };
    std::vector<Gap> gaps;
    for (size_t t = 0; t + 1 < n; ++t) {
        const double lo = t == 0 ? 0.0 : h[t - 1];
        const double width = h[t] - lo;
        if (width > 0.0) gaps.push_back({width, t});
    }
    std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
        if (a.width != b.width) return a.width > b.width;
        return a.state > b.state; // equal widths: prefer the coarser scale
    });
    std::vector<size_t> states;
    for (size_t g = 0; g < gaps.size() && g < static_cast<size_t>(scale_count); ++g)
        states.push_back(gaps[g].state);
    std::sort(states.begin(), states.end()); // finest (small t) first

    for (size_t t : states) {
        tree.levels.push_back(composition_after(dendro, tree.leaves, t));
        tree.merge_heights.push_back(t == 0 ? 0.0 : h[t - 1]);
    }
    // root level always present
    tree.levels.push_back(composition_after(dendro, tree.leaves, n - 1));
    tree.merge_heights.push_back(h[n - 2]);
    return tree;
}

ClusteringComposition composition_at(const UltrametricTree& tree, int k) {
    const int n = static_cast<int>(tree.leaf_count());
    if (k > n)
        raise(ErrorKind::KTooLarge,
              "requested " + std::to_string(k) + " clusters from a tree with " +
                  std::to_string(n) + " leaves");
    if (k < 1) raise(ErrorKind::ConfigError, "cluster count must be >= 1");
    for (const auto& level : tree.levels)
        if (level.k == k) return level;
    // fallback: finest stored level that does not exceed k
    for (const auto& level : tree.levels)
        if (level.k <= k) return level;
    return tree.levels.back();
}

std::vector<FeatureGroup> synergistic_groups(const EntropyMatrix& xi, const UltrametricTree& tree,
                                             double ce_threshold) {
    if (static_cast<size_t>(xi.m) != tree.leaf_count())
        raise(ErrorKind::LengthMismatch, "entropy matrix and tree disagree on feature count");

    auto groups_for = [&](const ClusteringComposition& comp) {
        std::vector<FeatureGroup> groups(static_cast<size_t>(comp.k));
        for (int c = 0; c < comp.k; ++c) groups[static_cast<size_t>(c)].group_id = c + 1;
        for (int leaf : tree.leaves) {
            const int c = comp.assignment[static_cast<size_t>(leaf)];
            groups[static_cast<size_t>(c)].members.push_back(
                xi.feature_names[static_cast<size_t>(leaf)]);
        }
        for (auto& g : groups) {
            double worst = 0.0;
            for (size_t a = 0; a < g.members.size(); ++a) {
                for (size_t b = a + 1; b < g.members.size(); ++b) {
                    int ia = -1, ib = -1;
                    for (size_t f = 0; f < xi.feature_names.size(); ++f) {
                        if (xi.feature_names[f] == g.members[a]) ia = static_cast<int>(f);
                        if (xi.feature_names[f] == g.members[b]) ib = static_cast<int>(f);
                    }
                    worst = std::max(worst, xi.at(ia, ib));
                }
            }
            g.max_internal_ce = worst;
        }
        return groups;
    };

    // coarsest qualifying level wins
    for (auto it = tree.levels.rbegin(); it != tree.levels.rend(); ++it) {
        auto groups = groups_for(*it);
        bool ok = true;
        for (const auto& g : groups)
            if (g.max_internal_ce > ce_threshold) ok = false;
        if (ok) return groups;
    }
    // singletons always satisfy the threshold
    ClusteringComposition singles;
    singles.k = xi.m;
    singles.assignment.resize(static_cast<size_t>(xi.m));
    for (size_t pos = 0; pos < tree.leaves.size(); ++pos)
        singles.assignment[static_cast<size_t>(tree.leaves[pos])] = static_cast<int>(pos);
    return groups_for(singles);
}

std::vector<double> l1_row_distances(const std::vector<std::vector<int>>& columns, size_t n_rows) {
    std::vector<double> d(n_rows * n_rows, 0.0);
    for (size_t r = 0; r < n_rows; ++r) {
        for (size_t s = r + 1; s < n_rows; ++s) {
            double acc = 0.0;
            for (const auto& col : columns)
                acc += std::abs(static_cast<double>(col[r]) - static_cast<double>(col[s]));
            d[r * n_rows + s] = acc;
            d[s * n_rows + r] = acc;
        }
    }
    return d;
}

} // namespace infoflow
