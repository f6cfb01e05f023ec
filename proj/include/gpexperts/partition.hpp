#pragma once

#include "gpexperts/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gpexperts {

// The five subset-construction schemes.
enum class Scheme { DS, SoDSharedHyp, SoD, Tree, TreeRandKern };

Scheme parse_scheme(const std::string& name);  // "ds", "sod-shared-hyp", ...
std::string to_string(Scheme scheme);

struct SchemeConfig {
    Scheme scheme = Scheme::SoD;
    int subset_size = 512;
    int n_experts = 128;
    std::uint64_t seed = 0;

    void validate() const;
};

using IndexSet = std::vector<int>;

// Random partition of {0..n-1} into disjoint sets of subset_size (last one may
// be smaller).
std::vector<IndexSet> partition_disjoint(int n, int subset_size, std::uint64_t seed);

// n_experts sets of subset_size distinct indices each; sampling is without
// replacement within a set, with replacement across sets.
std::vector<IndexSet> sample_subsets(int n, int n_experts, int subset_size,
                                     std::uint64_t seed);

struct BallTreeNode {
    Vector center;            // centroid of the node's points
    double radius = 0.0;      // max distance from center to any node point
    IndexSet point_indices;
    int left = -1;            // child slots in BallTree::nodes, -1 = leaf
    int right = -1;
    int depth = 0;

    bool is_leaf() const { return left < 0; }
};

// Binary ball tree; nodes are stored in breadth-first order, nodes[0] = root.
struct BallTree {
    std::vector<BallTreeNode> nodes;
};

// Farthest-pair pivot splits, recursion stops at leaf_size points.
BallTree build_ball_tree(const Matrix& X, int leaf_size, std::uint64_t seed);

// One random subset per node in level order; cycles over leaves with fresh
// draws when the tree has fewer nodes than n_experts.
std::vector<IndexSet> tree_expert_subsets(const BallTree& tree, int n_experts,
                                          int subset_size, std::uint64_t seed);

// Uniform draw over the 7 nonempty combinations of {seard, matern32, matern52}.
std::vector<KernelSpec> assign_random_kernels(int n_experts, int input_dim,
                                              std::uint64_t seed);

}  // namespace gpexperts
