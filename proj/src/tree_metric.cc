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

#include "streamfit/tree_metric.h"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "streamfit/errors.h"

namespace streamfit {

PivotData PivotData::FromRow(PointId a, std::vector<Fixed> row) {
  if (a < 0 || a >= static_cast<PointId>(row.size())) {
    throw DomainError("pivot out of range");
  }
  if (row[a] != Fixed()) throw DomainError("pivot row must be 0 at the pivot");
  PivotData pd{a, std::move(row), Fixed()};
  pd.m_a = *std::max_element(pd.row.begin(), pd.row.end());
  return pd;
}

PivotData PivotData::FromMatrix(const DenseMatrix& d, PointId a) {
  std::vector<Fixed> row(d.n());
  for (PointId k = 0; k < d.n(); ++k) row[k] = d.at(a, k);
  return FromRow(a, std::move(row));
}

TreeMetricRep::TreeMetricRep(UltrametricTree base, PivotData pivot)
    : base_(std::move(base)), pivot_(std::move(pivot)) {
  if (static_cast<PointId>(pivot_.row.size()) != base_.num_points()) {
    throw DomainError("pivot row length differs from the tree size");
  }
}

DenseMatrix TreeMetricRep::ToMatrix() const {
  const PointId n = num_points();
  DenseMatrix m(n);
  for (PointId u = 0; u < n; ++u) {
    for (PointId v = u + 1; v < n; ++v) m.set(u, v, Distance(u, v));
  }
  return m;
}

nlohmann::json TreeMetricRep::ToJson() const {
  std::vector<std::string> row;
  row.reserve(pivot_.row.size());
  for (Fixed f : pivot_.row) row.push_back(f.ToString());
  return {{"type", "tree_metric"},
          {"pivot", pivot_.a},
          {"pivot_row", row},
          {"m_a", pivot_.m_a.ToString()},
          {"base", base_.ToJson()}};
}

TreeMetricRep TreeMetricRep::FromJson(const nlohmann::json& j) {
  std::vector<Fixed> row;
  for (const auto& v : j.at("pivot_row")) {
    auto f = Fixed::Parse(v.get<std::string>());
    if (!f) throw DomainError("malformed pivot row value");
    row.push_back(*f);
  }
  return TreeMetricRep(UltrametricTree::FromJson(j.at("base")),
                       PivotData::FromRow(j.at("pivot").get<PointId>(),
                                          std::move(row)));
}

void CentroidStream::DoReplay(int /*pass*/, const Visitor& visit) {
  inner_.Replay([&](const DistanceEntry& e) {
    visit(DistanceEntry{e.u, e.v, e.d + CentroidValue(pivot_, e.u, e.v)});
  });
}

}  // namespace streamfit
