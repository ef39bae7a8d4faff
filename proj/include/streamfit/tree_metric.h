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

#ifndef STREAMFIT_TREE_METRIC_H_
#define STREAMFIT_TREE_METRIC_H_

#include <vector>

#include "json.hpp"
#include "streamfit/fixed.h"
#include "streamfit/matrix.h"
#include "streamfit/stream.h"
#include "streamfit/ultrametric_tree.h"

namespace streamfit {

// The stored distance row of a pivot point a.
struct PivotData {
  PointId a = 0;
  std::vector<Fixed> row;  // row[a] == 0
  Fixed m_a;               // max of row

  static PivotData FromRow(PointId a, std::vector<Fixed> row);
  static PivotData FromMatrix(const DenseMatrix& d, PointId a);
};

// 2 m_a - row[i] - row[j] for i != j; 0 on the diagonal.
inline Fixed CentroidValue(const PivotData& pd, PointId i, PointId j) {
  if (i == j) return Fixed();
  return pd.m_a * 2 - pd.row[i] - pd.row[j];
}

// Implicit tree metric T(i, j) = U(i, j) - C^a(i, j).
class TreeMetricRep {
 public:
  TreeMetricRep(UltrametricTree base, PivotData pivot);

  const UltrametricTree& base() const { return base_; }
  const PivotData& pivot() const { return pivot_; }
  PointId num_points() const { return base_.num_points(); }

  Fixed Distance(PointId u, PointId v) const {
    if (u == v) {
      base_.Distance(u, v);  // range check
      return Fixed();
    }
    return base_.Distance(u, v) - CentroidValue(pivot_, u, v);
  }

  DenseMatrix ToMatrix() const;
  nlohmann::json ToJson() const;
  static TreeMetricRep FromJson(const nlohmann::json& j);

 private:
  UltrametricTree base_;
  PivotData pivot_;
};

// Streams D + C^a on the fly from an underlying source.
class CentroidStream : public StreamSource {
 public:
  CentroidStream(StreamSource& inner, const PivotData& pivot)
      : inner_(inner), pivot_(pivot) {}

  PointId n() const override { return inner_.n(); }

 protected:
  void DoReplay(int pass, const Visitor& visit) override;

 private:
  StreamSource& inner_;
  const PivotData& pivot_;
};

}  // namespace streamfit

#endif  // STREAMFIT_TREE_METRIC_H_
