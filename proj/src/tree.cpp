#include "cgmp/tree.hpp"

#include <algorithm>
#include <limits>

namespace cgmp {

void NearestIndex::insert(const Configuration& q) {
  const auto id = static_cast<std::uint32_t>(points_.size());
  points_.push_back(q);
  Block fresh;
  fresh.ids.push_back(id);
  // Carry: merge while the last block is no larger than the new one.
  while (!blocks_.empty() && blocks_.back().ids.size() <= fresh.ids.size()) {
    auto& last = blocks_.back().ids;
    fresh.ids.insert(fresh.ids.end(), last.begin(), last.end());
    blocks_.pop_back();
  }
  fresh.axis.assign(fresh.ids.size(), 0);
  build(fresh, 0, fresh.ids.size());
  blocks_.push_back(std::move(fresh));
}

void NearestIndex::build(Block& block, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 1) return;
  Configuration mn = points_[block.ids[lo]], mx = mn;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    mn = mn.cwiseMin(points_[block.ids[i]]);
    mx = mx.cwiseMax(points_[block.ids[i]]);
  }
  int axis = 0;
  (mx - mn).maxCoeff(&axis);
  const std::size_t mid = (lo + hi) / 2;
  std::nth_element(block.ids.begin() + lo, block.ids.begin() + mid, block.ids.begin() + hi,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis] ||
                            (points_[a][axis] == points_[b][axis] && a < b);
                   });
  block.axis[mid] = static_cast<std::uint8_t>(axis);
  build(block, lo, mid);
  build(block, mid + 1, hi);
}

void NearestIndex::search(const Block& block, std::size_t lo, std::size_t hi,
                          const Configuration& q, double& best_d2, std::uint32_t& best) const {
  if (lo >= hi) return;
  const std::size_t mid = (lo + hi) / 2;
  const std::uint32_t id = block.ids[mid];
  const Configuration& p = points_[id];
  const double d2 = (p - q).squaredNorm();
  if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
    best_d2 = d2;
    best = id;
  }
  if (hi - lo == 1) return;
  const int axis = block.axis[mid];
  const double diff = q[axis] - p[axis];
  const bool left_first = diff < 0.0;
  if (left_first) {
    search(block, lo, mid, q, best_d2, best);
  } else {
    search(block, mid + 1, hi, q, best_d2, best);
  }
  // Equal-distance candidates on the far side may still win on index.
  if (diff * diff <= best_d2) {
    if (left_first) {
      search(block, mid + 1, hi, q, best_d2, best);
    } else {
      search(block, lo, mid, q, best_d2, best);
    }
  }
}

std::size_t NearestIndex::nearest(const Configuration& q) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  for (const Block& b : blocks_) search(b, 0, b.ids.size(), q, best_d2, best);
  return best;
}

Tree::Tree(const Configuration& root, const Transform& root_gripper) {
  nodes_.push_back({root, -1, root_gripper});
  index_.insert(root);
}

std::size_t Tree::add(const Configuration& q, std::size_t parent, const Transform& gripper) {
  nodes_.push_back({q, static_cast<std::int64_t>(parent), gripper});
  index_.insert(q);
  return nodes_.size() - 1;
}

std::vector<Configuration> Tree::path_from_root(std::size_t i) const {
  std::vector<Configuration> path;
  for (std::int64_t n = static_cast<std::int64_t>(i); n >= 0; n = nodes_[n].parent) {
    path.push_back(nodes_[n].q);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace cgmp
