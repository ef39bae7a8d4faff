// Copyright 2026 The Streamfit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STREAMFIT_ULTRAMETRIC_TREE_H_
#define STREAMFIT_ULTRAMETRIC_TREE_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "streamfit/fixed.h"
#include "streamfit/matrix.h"

namespace streamfit {

// Rooted level-labeled tree whose leaves are the points 0..n-1. The induced
// distance between two points is the level of their lowest common ancestor.
//
// Trees are always stored in canonical form: node ids 0..n-1 are the leaves
// (level 0), internal nodes follow in preorder, children are ordered by their
// smallest leaf, every internal node has at least two children and levels
// strictly decrease from the root to every leaf.
class UltrametricTree {
 public:
  struct Node {
    Fixed level;
    std::vector<int> children;
    int parent = -1;
  };

  // Single-leaf tree over one point.
  UltrametricTree();

  PointId num_points() const { return num_points_; }
  int root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  bool is_leaf(int node) const { return node < num_points_; }

  // Level of the lowest common ancestor; 0 for u == v. Throws DomainError
  // for an unknown point.
  Fixed Distance(PointId u, PointId v) const;

  // Levels of the internal nodes in node order.
  std::vector<Fixed> InternalLevels() const;

  // Full induced matrix.
  DenseMatrix ToMatrix() const;

  nlohmann::json ToJson() const;
  static UltrametricTree FromJson(const nlohmann::json& j);
  // Branch length is half the level difference between parent and child.
  std::string ToNewick() const;

  bool operator==(const UltrametricTree& o) const;

 private:
  friend class TreeBuilder;

  void BuildLcaIndex();
  int Lca(int a, int b) const;

  PointId num_points_ = 1;
  int root_ = 0;
  std::vector<Node> nodes_;
  // Euler tour with a sparse table over depths.
  std::vector<int> first_visit_;
  std::vector<int> euler_;
  std::vector<int> depth_;
  std::vector<std::vector<int>> sparse_;
};

// Accumulates nodes top-down or bottom-up, then normalizes them into a
// canonical UltrametricTree. Internal nodes whose level equals their
// parent's are merged into the parent and single-child nodes are spliced.
class TreeBuilder {
 public:
  explicit TreeBuilder(PointId num_points);

  int Leaf(PointId point) const { return point; }
  int Internal(Fixed level, std::vector<int> children);

  // Throws ContractError if the structure is not a valid ultrametric tree
  // (a leaf missing or repeated, a child level above its parent).
  UltrametricTree Build(int root) const;

 private:
  struct RawNode {
    Fixed level;
    std::vector<int> children;
  };

  PointId num_points_;
  std::vector<RawNode> nodes_;
};

// Replaces each internal level by the smallest value >= it (the largest
// value when none is), then renormalizes. values must be sorted ascending
// and non-empty.
UltrametricTree QuantizeLevels(const UltrametricTree& tree,
                               const std::vector<Fixed>& values);

// Adds delta to every internal level.
UltrametricTree ShiftLevels(const UltrametricTree& tree, Fixed delta);

}  // namespace streamfit

#endif  // STREAMFIT_ULTRAMETRIC_TREE_H_
