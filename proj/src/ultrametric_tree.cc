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

#include "streamfit/ultrametric_tree.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "streamfit/errors.h"

namespace streamfit {
namespace {

// Exact decimal text for d / 2 (11 fractional digits suffice).
std::string HalfToString(Fixed d) {
  if (d.raw() % 2 == 0) return d.Half().ToString();
  int64_t magnitude = d.raw() < 0 ? -d.raw() : d.raw();
  const int64_t denom = 2 * Fixed::kScale;
  int64_t integer_part = magnitude / denom;
  int64_t rest = (magnitude % denom) * 25;  // units of 1e-11
  std::string digits = std::to_string(rest);
  digits.insert(0, 11 - digits.size(), '0');
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  std::string out = d.raw() < 0 ? "-" : "";
  out += std::to_string(integer_part);
  if (!digits.empty()) out += "." + digits;
  return out;
}

}  // namespace

UltrametricTree::UltrametricTree() : num_points_(1), root_(0), nodes_(1) {
  BuildLcaIndex();
}

Fixed UltrametricTree::Distance(PointId u, PointId v) const {
  if (u < 0 || v < 0 || u >= num_points_ || v >= num_points_) {
    throw DomainError("unknown point id");
  }
  if (u == v) return Fixed();
  return nodes_[Lca(u, v)].level;
}

std::vector<Fixed> UltrametricTree::InternalLevels() const {
  std::vector<Fixed> out;
  for (size_t i = num_points_; i < nodes_.size(); ++i) {
    out.push_back(nodes_[i].level);
  }
  return out;
}

DenseMatrix UltrametricTree::ToMatrix() const {
  DenseMatrix m(num_points_);
  for (PointId u = 0; u < num_points_; ++u) {
    for (PointId v = u + 1; v < num_points_; ++v) m.set(u, v, Distance(u, v));
  }
  return m;
}

void UltrametricTree::BuildLcaIndex() {
  const int count = static_cast<int>(nodes_.size());
  first_visit_.assign(count, -1);
  euler_.clear();
  depth_.assign(count, 0);
  // Iterative DFS: (node, next child index).
  std::vector<std::pair<int, size_t>> stack{{root_, 0}};
  first_visit_[root_] = 0;
  euler_.push_back(root_);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < nodes_[node].children.size()) {
      int child = nodes_[node].children[next++];
      depth_[child] = depth_[node] + 1;
      first_visit_[child] = static_cast<int>(euler_.size());
      euler_.push_back(child);
      stack.emplace_back(child, 0);
    } else {
      stack.pop_back();
      if (!stack.empty()) euler_.push_back(stack.back().first);
    }
  }
  const size_t len = euler_.size();
  const int levels = std::bit_width(len);
  sparse_.assign(levels, {});
  sparse_[0] = euler_;
  for (int k = 1; k < levels; ++k) {
    const size_t span = size_t{1} << k;
    sparse_[k].resize(len - span + 1);
    for (size_t i = 0; i + span <= len; ++i) {
      int a = sparse_[k - 1][i];
      int b = sparse_[k - 1][i + span / 2];
      sparse_[k][i] = depth_[a] <= depth_[b] ? a : b;
    }
  }
}

int UltrametricTree::Lca(int a, int b) const {
  int l = first_visit_[a], r = first_visit_[b];
  if (l > r) std::swap(l, r);
  const int k = std::bit_width(static_cast<unsigned>(r - l + 1)) - 1;
  int x = sparse_[k][l];
  int y = sparse_[k][r - (1 << k) + 1];
  return depth_[x] <= depth_[y] ? x : y;
}

nlohmann::json UltrametricTree::ToJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (size_t i = 0; i < nodes_.size(); ++i) {
    nlohmann::json node;
    node["node_id"] = i;
    node["level"] = nodes_[i].level.ToString();
    node["children"] = nodes_[i].children;
    if (is_leaf(static_cast<int>(i))) node["leaf"] = i;
    nodes.push_back(std::move(node));
  }
  return {{"type", "ultrametric"},
          {"num_points", num_points_},
          {"root", root_},
          {"nodes", std::move(nodes)}};
}

UltrametricTree UltrametricTree::FromJson(const nlohmann::json& j) {
  const PointId n = j.at("num_points").get<PointId>();
  if (n < 1) throw DomainError("tree needs at least one point");
  std::unordered_map<int, const nlohmann::json*> by_id;
  for (const auto& node : j.at("nodes")) {
    by_id[node.at("node_id").get<int>()] = &node;
  }
  TreeBuilder builder(n);
  std::function<int(int, int)> convert = [&](int id, int depth) -> int {
    if (depth > static_cast<int>(by_id.size())) {
      throw DomainError("tree JSON contains a cycle");
    }
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DomainError("unknown node id in tree JSON");
    const nlohmann::json& node = *it->second;
    if (node.contains("leaf")) {
      PointId p = node.at("leaf").get<PointId>();
      if (p < 0 || p >= n) throw DomainError("leaf id out of range");
      return builder.Leaf(p);
    }
    std::optional<Fixed> level;
    if (node.at("level").is_string()) {
      level = Fixed::Parse(node.at("level").get<std::string>());
    } else {
      level = Fixed::FromDouble(node.at("level").get<double>());
    }
    if (!level) throw DomainError("malformed level in tree JSON");
    std::vector<int> children;
    for (const auto& c : node.at("children")) {
      children.push_back(convert(c.get<int>(), depth + 1));
    }
    return builder.Internal(*level, std::move(children));
  };
  return builder.Build(convert(j.at("root").get<int>(), 0));
}

std::string UltrametricTree::ToNewick() const {
  std::function<std::string(int)> render = [&](int node) -> std::string {
    if (is_leaf(node)) return std::to_string(node);
    std::string out = "(";
    bool first = true;
    for (int c : nodes_[node].children) {
      if (!first) out += ',';
      first = false;
      out += render(c) + ":" +
             HalfToString(nodes_[node].level - nodes_[c].level);
    }
    return out + ")";
  };
  return render(root_) + ";";
}

bool UltrametricTree::operator==(const UltrametricTree& o) const {
  if (num_points_ != o.num_points_ || root_ != o.root_ ||
      nodes_.size() != o.nodes_.size()) {
    return false;
  }
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].level != o.nodes_[i].level ||
        nodes_[i].children != o.nodes_[i].children) {
      return false;
    }
  }
  return true;
}

TreeBuilder::TreeBuilder(PointId num_points)
    : num_points_(num_points), nodes_(num_points) {}

int TreeBuilder::Internal(Fixed level, std::vector<int> children) {
  nodes_.push_back(RawNode{level, std::move(children)});
  return static_cast<int>(nodes_.size()) - 1;
}

UltrametricTree TreeBuilder::Build(int root) const {
  const int n = num_points_;
  auto is_leaf = [&](int id) { return id < n; };
  // Canonical (pre-renumbering) internal nodes.
  struct Canon {
    Fixed level;
    std::vector<int> children;  // >= 0 leaf, < 0 internal ~index
    int min_leaf = std::numeric_limits<int>::max();
  };
  std::vector<Canon> canon;
  std::vector<int> leaf_seen(n, 0);

  // Returns an encoded reference: leaf id, or ~index into canon.
  std::function<int(int)> normalize = [&](int id) -> int {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) {
      throw ContractError("tree builder: node id out of range");
    }
    if (is_leaf(id)) {
      ++leaf_seen[id];
      return id;
    }
    const Fixed level = nodes_[id].level;
    if (level <= Fixed()) {
      throw ContractError("tree builder: internal level must be positive");
    }
    // Flatten descendants that sit at the same level.
    std::vector<int> flat;
    std::vector<int> pending(nodes_[id].children.rbegin(),
                             nodes_[id].children.rend());
    while (!pending.empty()) {
      int c = pending.back();
      pending.pop_back();
      if (c < 0 || c >= static_cast<int>(nodes_.size())) {
        throw ContractError("tree builder: child id out of range");
      }
      if (!is_leaf(c) && nodes_[c].level == level) {
        pending.insert(pending.end(), nodes_[c].children.rbegin(),
                       nodes_[c].children.rend());
      } else if (!is_leaf(c) && nodes_[c].level > level) {
        throw ContractError("tree builder: child level " +
                            nodes_[c].level.ToString() + " above parent " +
                            level.ToString());
      } else {
        flat.push_back(c);
      }
    }
    if (flat.empty()) throw ContractError("tree builder: childless node");
    std::vector<int> kids;
    kids.reserve(flat.size());
    for (int c : flat) kids.push_back(normalize(c));
    if (kids.size() == 1) return kids[0];
    Canon node{level, std::move(kids)};
    for (int k : node.children) {
      int m = k >= 0 ? k : canon[~k].min_leaf;
      node.min_leaf = std::min(node.min_leaf, m);
    }
    canon.push_back(std::move(node));
    return ~static_cast<int>(canon.size() - 1);
  };
  int top = normalize(root);
  for (int p = 0; p < n; ++p) {
    if (leaf_seen[p] != 1) {
      throw ContractError("tree builder: point " + std::to_string(p) +
                          (leaf_seen[p] == 0 ? " missing" : " repeated"));
    }
  }

  UltrametricTree tree;
  tree.num_points_ = n;
  tree.nodes_.assign(n, UltrametricTree::Node{});
  auto min_leaf_of = [&](int ref) { return ref >= 0 ? ref : canon[~ref].min_leaf; };
  // Preorder renumbering with children sorted by smallest leaf.
  std::function<int(int, int)> emit = [&](int ref, int parent) -> int {
    if (ref >= 0) {
      tree.nodes_[ref].parent = parent;
      return ref;
    }
    const int id = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back(UltrametricTree::Node{canon[~ref].level, {}, parent});
    std::vector<int> kids = canon[~ref].children;
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      return min_leaf_of(a) < min_leaf_of(b);
    });
    std::vector<int> out;
    out.reserve(kids.size());
    for (int k : kids) out.push_back(emit(k, id));
    tree.nodes_[id].children = std::move(out);
    return id;
  };
  tree.root_ = emit(top, -1);
  tree.BuildLcaIndex();
  return tree;
}

UltrametricTree QuantizeLevels(const UltrametricTree& tree,
                               const std::vector<Fixed>& values) {
  if (values.empty()) throw DomainError("quantize_levels needs values");
  TreeBuilder builder(tree.num_points());
  const auto& nodes = tree.nodes();
  std::function<int(int)> copy = [&](int id) -> int {
    if (tree.is_leaf(id)) return builder.Leaf(id);
    auto it = std::lower_bound(values.begin(), values.end(), nodes[id].level);
    Fixed level = it == values.end() ? values.back() : *it;
    std::vector<int> kids;
    for (int c : nodes[id].children) kids.push_back(copy(c));
    return builder.Internal(level, std::move(kids));
  };
  // Rounding is monotone, so a child may now equal but never exceed its
  // parent; Build merges the equal ones.
  return builder.Build(copy(tree.root()));
}

UltrametricTree ShiftLevels(const UltrametricTree& tree, Fixed delta) {
  TreeBuilder builder(tree.num_points());
  const auto& nodes = tree.nodes();
  std::function<int(int)> copy = [&](int id) -> int {
    if (tree.is_leaf(id)) return builder.Leaf(id);
    std::vector<int> kids;
    for (int c : nodes[id].children) kids.push_back(copy(c));
    return builder.Internal(nodes[id].level + delta, std::move(kids));
  };
  return builder.Build(copy(tree.root()));
}

}  // namespace streamfit
