#include "gpexperts/partition.hpp"

#include "gpexperts/rng.hpp"

#include <algorithm>
#include <cmath>

namespace gpexperts {

Scheme parse_scheme(const std::string& name) {
    if (name == "ds") return Scheme::DS;
    if (name == "sod-shared-hyp") return Scheme::SoDSharedHyp;
    if (name == "sod") return Scheme::SoD;
    if (name == "tree") return Scheme::Tree;
    if (name == "tree-rand-kern") return Scheme::TreeRandKern;
    throw InputError("parse_scheme: unknown scheme \"" + name + "\"");
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::DS: return "ds";
        case Scheme::SoDSharedHyp: return "sod-shared-hyp";
        case Scheme::SoD: return "sod";
        case Scheme::Tree: return "tree";
        case Scheme::TreeRandKern: return "tree-rand-kern";
    }
    return "?";
}

void SchemeConfig::validate() const {
    if (subset_size < 2) throw InputError("SchemeConfig: subset_size must be >= 2");
    if (n_experts < 1) throw InputError("SchemeConfig: n_experts must be >= 1");
}

std::vector<IndexSet> partition_disjoint(int n, int subset_size, std::uint64_t seed) {
    if (n < 1) throw InputError("partition_disjoint: n must be >= 1");
    if (subset_size < 1) throw InputError("partition_disjoint: subset_size must be >= 1");

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(seed, 0));
    rng.shuffle(order);

    std::vector<IndexSet> sets;
    for (int at = 0; at < n; at += subset_size) {
        int len = std::min(subset_size, n - at);
        sets.emplace_back(order.begin() + at, order.begin() + at + len);
    }
    return sets;
}

std::vector<IndexSet> sample_subsets(int n, int n_experts, int subset_size,
                                     std::uint64_t seed) {
    if (subset_size > n) {
        throw InputError("sample_subsets: subset_size exceeds dataset size");
    }
    if (n_experts < 1) throw InputError("sample_subsets: n_experts must be >= 1");

    std::vector<IndexSet> sets(n_experts);
    for (int e = 0; e < n_experts; ++e) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(e)));
        sets[e] = rng.sample_without_replacement(n, subset_size);
    }
    return sets;
}

namespace {

double sq_dist(const Matrix& X, int i, int j) {
    return (X.row(i) - X.row(j)).squaredNorm();
}

int farthest_from(const Matrix& X, const IndexSet& pts, int ref) {
    int best = pts[0];
    double best_d = -1.0;
    for (int p : pts) {
        double d = sq_dist(X, ref, p);
        if (d > best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

void set_bounds(const Matrix& X, BallTreeNode& node) {
    node.center = Vector::Zero(X.cols());
    for (int p : node.point_indices) node.center += X.row(p).transpose();
    node.center /= static_cast<double>(node.point_indices.size());
    double r2 = 0.0;
    for (int p : node.point_indices) {
        r2 = std::max(r2, (X.row(p).transpose() - node.center).squaredNorm());
    }
    node.radius = std::sqrt(r2);
}

}  // namespace

BallTree build_ball_tree(const Matrix& X, int leaf_size, std::uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    if (n < 1) throw InputError("build_ball_tree: need at least one point");
    if (leaf_size < 1) throw InputError("build_ball_tree: leaf_size must be >= 1");

    Rng rng(mix_seed(seed, 0));
    BallTree tree;

    BallTreeNode root;
    root.point_indices.resize(n);
    for (int i = 0; i < n; ++i) root.point_indices[i] = i;
    root.depth = 0;
    set_bounds(X, root);
    tree.nodes.push_back(std::move(root));

    // nodes vector doubles as the BFS work queue, so storage order is level order
    for (std::size_t at = 0; at < tree.nodes.size(); ++at) {
        const IndexSet pts = tree.nodes[at].point_indices;
        const int depth = tree.nodes[at].depth;
        if (static_cast<int>(pts.size()) <= leaf_size) continue;

        int anchor = pts[rng.uniform_index(pts.size())];
        int p1 = farthest_from(X, pts, anchor);
        int p2 = farthest_from(X, pts, p1);
        if (sq_dist(X, p1, p2) == 0.0) continue;  // all points coincide

        BallTreeNode left, right;
        for (int p : pts) {
            if (sq_dist(X, p, p1) <= sq_dist(X, p, p2)) {
                left.point_indices.push_back(p);
            } else {
                right.point_indices.push_back(p);
            }
        }
        left.depth = right.depth = depth + 1;
        set_bounds(X, left);
        set_bounds(X, right);
        tree.nodes[at].left = static_cast<int>(tree.nodes.size());
        tree.nodes[at].right = static_cast<int>(tree.nodes.size()) + 1;
        tree.nodes.push_back(std::move(left));
        tree.nodes.push_back(std::move(right));
    }
    return tree;
}

std::vector<IndexSet> tree_expert_subsets(const BallTree& tree, int n_experts,
                                          int subset_size, std::uint64_t seed) {
    if (tree.nodes.empty()) throw InputError("tree_expert_subsets: empty tree");
    if (n_experts < 1) throw InputError("tree_expert_subsets: n_experts must be >= 1");

    std::vector<int> leaves;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].is_leaf()) leaves.push_back(static_cast<int>(i));
    }

    std::vector<IndexSet> sets;
    sets.reserve(n_experts);
    auto draw_from = [&](int node_idx, int expert_idx) {
        const IndexSet& pts = tree.nodes[node_idx].point_indices;
        int take = std::min(subset_size, static_cast<int>(pts.size()));
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(expert_idx)));
        IndexSet subset;
        subset.reserve(take);
        for (int pos : rng.sample_without_replacement(static_cast<int>(pts.size()), take)) {
            subset.push_back(pts[pos]);
        }
        sets.push_back(std::move(subset));
    };

    // one subset per node in level order, then cycle over leaves
    for (std::size_t i = 0; i < tree.nodes.size() && static_cast<int>(sets.size()) < n_experts; ++i) {
        draw_from(static_cast<int>(i), static_cast<int>(sets.size()));
    }
    std::size_t cycle = 0;
    while (static_cast<int>(sets.size()) < n_experts) {
        draw_from(leaves[cycle % leaves.size()], static_cast<int>(sets.size()));
        ++cycle;
    }
    return sets;
}

std::vector<KernelSpec> assign_random_kernels(int n_experts, int input_dim,
                                              std::uint64_t seed) {
    if (n_experts < 1) throw InputError("assign_random_kernels: n_experts must be >= 1");

    using KF = KernelFamily;
    static const std::vector<std::vector<KF>> kCombos = {
        {KF::SEard},
        {KF::Matern32},
        {KF::Matern52},
        {KF::SEard, KF::Matern32},
        {KF::SEard, KF::Matern52},
        {KF::Matern32, KF::Matern52},
        {KF::SEard, KF::Matern32, KF::Matern52},
    };

    Rng rng(mix_seed(seed, 0x6b65726eULL));
    std::vector<KernelSpec> specs(n_experts);
    for (int e = 0; e < n_experts; ++e) {
        specs[e].members = kCombos[rng.uniform_index(kCombos.size())];
        specs[e].input_dim = input_dim;
    }
    return specs;
}

}  // namespace gpexperts
