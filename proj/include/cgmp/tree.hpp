#pragma once

#include <cstdint>
#include <vector>

#include "cgmp/robot.hpp"

namespace cgmp {

// Exact nearest neighbour over 9-vectors under Euclidean distance, with ties
// resolved to the lowest insertion index. Points live in a logarithmic set of
// static balanced kd-trees (sizes are distinct powers of two); an insert
// merges equal-sized blocks, so inserts are amortized O(log^2 n).
class NearestIndex {
 public:
  std::size_t size() const { return points_.size(); }
  void insert(const Configuration& q);
  // Precondition: size() > 0.
  std::size_t nearest(const Configuration& q) const;

 private:
  struct Block {
    std::vector<std::uint32_t> ids;  // kd-ordered: median of [lo, hi) at (lo + hi) / 2
    std::vector<std::uint8_t> axis;  // split axis of the node at each position
  };

  void build(Block& block, std::size_t lo, std::size_t hi);
  void search(const Block& block, std::size_t lo, std::size_t hi, const Configuration& q,
              double& best_d2, std::uint32_t& best) const;

  std::vector<Configuration> points_;
  std::vector<Block> blocks_;
};

struct TreeNode {
  Configuration q;
  std::int64_t parent = -1;
  Transform gripper;  // cached forward kinematics
};

// RRT search tree. Node 0 is the root; parents always precede children.
class Tree {
 public:
  Tree(const Configuration& root, const Transform& root_gripper);

  std::size_t add(const Configuration& q, std::size_t parent, const Transform& gripper);
  std::size_t nearest(const Configuration& q) const { return index_.nearest(q); }

  std::size_t size() const { return nodes_.size(); }
  const TreeNode& operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  // Configurations from the root to node i, inclusive.
  std::vector<Configuration> path_from_root(std::size_t i) const;

 private:
  std::vector<TreeNode> nodes_;
  NearestIndex index_;
};

}  // namespace cgmp
