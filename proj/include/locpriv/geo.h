// Copyright 2026 The Locpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Region discretization and the Manhattan distance between grid cells.

#ifndef LOCPRIV_GEO_H_
#define LOCPRIV_GEO_H_

#include <optional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "locpriv/common.h"

namespace locpriv {

inline constexpr double kKmPerDegreeLat = 111.32;

// Axis-aligned latitude/longitude box split into rows x cols cells. Rows span
// latitude (row 0 at lat_min), columns span longitude (column 0 at lon_min).
struct Region {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;
  int rows = 1;
  int cols = 1;

  absl::Status Validate() const;

  // The San Francisco box used for the check-in and cab datasets.
  static Region SanFrancisco();
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

// Immutable cell grid over a Region. Cell ids are row-major:
// id = row * cols + col.
class Grid {
 public:
  static absl::StatusOr<Grid> Create(const Region& region);

  const Region& region() const { return region_; }
  int rows() const { return region_.rows; }
  int cols() const { return region_.cols; }
  int num_cells() const { return region_.rows * region_.cols; }

  double cell_height_deg() const { return cell_height_deg_; }
  double cell_width_deg() const { return cell_width_deg_; }
  // Equirectangular conversion factors taken at the region's mid-latitude.
  double km_per_deg_lat() const { return km_per_deg_lat_; }
  double km_per_deg_lon() const { return km_per_deg_lon_; }

  int RowOf(CellId id) const { return id / region_.cols; }
  int ColOf(CellId id) const { return id % region_.cols; }
  bool Contains(CellId id) const { return id >= 0 && id < num_cells(); }

  LatLon CellCenter(CellId id) const;

  // Cell containing the point, or nullopt when it lies outside the region.
  // A point on an interior cell edge belongs to the lower-index cell.
  std::optional<CellId> Quantize(double lat, double lon) const;

  // |dlat| * km_per_deg_lat + |dlon| * km_per_deg_lon between cell centers.
  absl::StatusOr<double> ManhattanKm(CellId a, CellId b) const;

 private:
  explicit Grid(const Region& region);

  Region region_;
  double cell_height_deg_;
  double cell_width_deg_;
  double km_per_deg_lat_;
  double km_per_deg_lon_;
};

// Symmetric matrix of pairwise distances (km) over a cell alphabet.
//
// Matrices built from a Grid remember the per-axis factorization
// d(a, b) = row_dist(row(a), row(b)) + col_dist(col(a), col(b)), which lets
// ExpectedDistances run in O(n + rows^2 + cols^2) per weight vector instead of
// O(n^2). Matrices built from raw values always use the dense product.
class DistMatrix {
 public:
  // Validates zero diagonal, symmetry and nonnegativity.
  static absl::StatusOr<DistMatrix> Create(Matrix d);

  int size() const { return static_cast<int>(d_.rows()); }
  double operator()(CellId a, CellId b) const { return d_(a, b); }
  const Matrix& matrix() const { return d_; }
  bool separable() const { return axes_.has_value(); }

  // For each row w of `weights` (k x n) and each cell c, the entry
  // sum_i w(i) * d(i, c). Returns a k x n matrix.
  Matrix ExpectedDistances(const Matrix& weights) const;
  Vector ExpectedDistances(const Vector& weights) const;

 private:
  friend DistMatrix DistanceMatrix(const Grid& grid);

  struct AxisFactors {
    int rows;
    int cols;
    Matrix row_dist;
    Matrix col_dist;
  };

  DistMatrix(Matrix d, std::optional<AxisFactors> axes)
      : d_(std::move(d)), axes_(std::move(axes)) {}

  Matrix d_;
  std::optional<AxisFactors> axes_;
};

// Pairwise Manhattan-km matrix between all cell centers of `grid`.
DistMatrix DistanceMatrix(const Grid& grid);

}  // namespace locpriv

#endif  // LOCPRIV_GEO_H_
