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

#include "locpriv/geo.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace locpriv {
namespace {

// Maps a coordinate to its 0-based bin along one axis; values on an interior
// edge go to the lower bin.
int AxisBin(double value, double lo, double step, int bins) {
  const double t = (value - lo) / step;
  int bin = static_cast<int>(std::ceil(t)) - 1;
  if (bin < 0) bin = 0;
  if (bin >= bins) bin = bins - 1;
  return bin;
}

}  // namespace

absl::Status Region::Validate() const {
  if (!std::isfinite(lat_min) || !std::isfinite(lat_max) ||
      !std::isfinite(lon_min) || !std::isfinite(lon_max)) {
    return absl::InvalidArgumentError("region bounds must be finite");
  }
  if (!(lat_min < lat_max)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lat_min (", lat_min, ") must be below lat_max (",
                     lat_max, ")"));
  }
  if (!(lon_min < lon_max)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lon_min (", lon_min, ") must be below lon_max (",
                     lon_max, ")"));
  }
  if (lat_min < -90.0 || lat_max > 90.0) {
    return absl::InvalidArgumentError("latitude outside [-90, 90]");
  }
  if (rows < 1 || cols < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid needs at least one row and column, got ", rows,
                     "x", cols));
  }
  return absl::OkStatus();
}

Region Region::SanFrancisco() {
  return Region{.lat_min = 37.5500,
                .lat_max = 37.8010,
                .lon_min = -122.5153,
                .lon_max = -122.3789,
                .rows = 25,
                .cols = 10};
}

Grid::Grid(const Region& region)
    : region_(region),
      cell_height_deg_((region.lat_max - region.lat_min) / region.rows),
      cell_width_deg_((region.lon_max - region.lon_min) / region.cols),
      km_per_deg_lat_(kKmPerDegreeLat) {
  const double mid_lat = 0.5 * (region.lat_min + region.lat_max);
  km_per_deg_lon_ =
      kKmPerDegreeLat * std::cos(mid_lat * std::numbers::pi / 180.0);
}

absl::StatusOr<Grid> Grid::Create(const Region& region) {
  if (absl::Status s = region.Validate(); !s.ok()) return s;
  return Grid(region);
}

LatLon Grid::CellCenter(CellId id) const {
  return LatLon{
      .lat = region_.lat_min + (RowOf(id) + 0.5) * cell_height_deg_,
      .lon = region_.lon_min + (ColOf(id) + 0.5) * cell_width_deg_};
}

std::optional<CellId> Grid::Quantize(double lat, double lon) const {
  if (!(lat >= region_.lat_min && lat <= region_.lat_max)) return std::nullopt;
  if (!(lon >= region_.lon_min && lon <= region_.lon_max)) return std::nullopt;
  const int row = AxisBin(lat, region_.lat_min, cell_height_deg_, rows());
  const int col = AxisBin(lon, region_.lon_min, cell_width_deg_, cols());
  return row * cols() + col;
}

absl::StatusOr<double> Grid::ManhattanKm(CellId a, CellId b) const {
  if (!Contains(a) || !Contains(b)) {
    return absl::OutOfRangeError(absl::StrCat(
        "cell id out of range: ", a, ", ", b, " (grid has ", num_cells(),
        " cells)"));
  }
  const LatLon pa = CellCenter(a);
  const LatLon pb = CellCenter(b);
  return std::abs(pa.lat - pb.lat) * km_per_deg_lat_ +
         std::abs(pa.lon - pb.lon) * km_per_deg_lon_;
}

absl::StatusOr<DistMatrix> DistMatrix::Create(Matrix d) {
  if (d.rows() != d.cols() || d.rows() == 0) {
    return absl::InvalidArgumentError("distance matrix must be square");
  }
  const Eigen::Index n = d.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("nonzero diagonal at ", i));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("invalid distance at (", i, ", ", j, ")"));
      }
      if (d(i, j) != d(j, i)) {
        return absl::InvalidArgumentError(
            absl::StrCat("asymmetric distance at (", i, ", ", j, ")"));
      }
    }
  }
  return DistMatrix(std::move(d), std::nullopt);
}

Matrix DistMatrix::ExpectedDistances(const Matrix& weights) const {
  if (!axes_) return weights * d_;

  const int rows = axes_->rows;
  const int cols = axes_->cols;
  const Eigen::Index k = weights.rows();
  Matrix row_mass = Matrix::Zero(k, rows);
  Matrix col_mass = Matrix::Zero(k, cols);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double* w = weights.row(j).data();
    double* rm = row_mass.row(j).data();
    double* cm = col_mass.row(j).data();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double v = w[r * cols + c];
        rm[r] += v;
        cm[c] += v;
      }
    }
  }
  const Matrix row_cost = row_mass * axes_->row_dist;
  const Matrix col_cost = col_mass * axes_->col_dist;

  Matrix out(k, static_cast<Eigen::Index>(rows) * cols);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double* rc = row_cost.row(j).data();
    const double* cc = col_cost.row(j).data();
    double* o = out.row(j).data();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) o[r * cols + c] = rc[r] + cc[c];
    }
  }
  return out;
}

Vector DistMatrix::ExpectedDistances(const Vector& weights) const {
  Matrix as_row = weights.transpose();
  return ExpectedDistances(as_row).row(0).transpose();
}

DistMatrix DistanceMatrix(const Grid& grid) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  const double row_km = grid.cell_height_deg() * grid.km_per_deg_lat();
  const double col_km = grid.cell_width_deg() * grid.km_per_deg_lon();

  Matrix row_dist(rows, rows);
  for (int a = 0; a < rows; ++a) {
    for (int b = 0; b < rows; ++b) row_dist(a, b) = std::abs(a - b) * row_km;
  }
  Matrix col_dist(cols, cols);
  for (int a = 0; a < cols; ++a) {
    for (int b = 0; b < cols; ++b) col_dist(a, b) = std::abs(a - b) * col_km;
  }

  const int n = grid.num_cells();
  Matrix d(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      d(a, b) = row_dist(grid.RowOf(a), grid.RowOf(b)) +
                col_dist(grid.ColOf(a), grid.ColOf(b));
    }
  }
  return DistMatrix(std::move(d), DistMatrix::AxisFactors{
                                      .rows = rows,
                                      .cols = cols,
                                      .row_dist = std::move(row_dist),
                                      .col_dist = std::move(col_dist)});
}

}  // namespace locpriv
