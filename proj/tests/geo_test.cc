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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gtest/gtest.h"
#include "test_util.h"

namespace locpriv {
namespace {

using ::locpriv::testing::SanFranciscoGrid;

Region Box(double lat0, double lat1, double lon0, double lon1, int rows,
           int cols) {
  return Region{.lat_min = lat0,
                .lat_max = lat1,
                .lon_min = lon0,
                .lon_max = lon1,
                .rows = rows,
                .cols = cols};
}

TEST(GridTest, SanFranciscoHas250Cells) {
  const Grid grid = SanFranciscoGrid();
  EXPECT_EQ(grid.rows(), 25);
  EXPECT_EQ(grid.cols(), 10);
  EXPECT_EQ(grid.num_cells(), 250);
}

TEST(GridTest, SingleCellCenterIsRegionMidpoint) {
  ASSERT_OK_AND_ASSIGN(const Grid grid, Grid::Create(Box(10, 11, 20, 22, 1, 1)));
  const LatLon c = grid.CellCenter(0);
  EXPECT_DOUBLE_EQ(c.lat, 10.5);
  EXPECT_DOUBLE_EQ(c.lon, 21.0);
}

TEST(GridTest, TwoByTwoCentersAtQuarterPoints) {
  ASSERT_OK_AND_ASSIGN(const Grid grid,
                       Grid::Create(Box(0.0, 0.2, 0.0, 0.2, 2, 2)));
  EXPECT_NEAR(grid.CellCenter(0).lat, 0.05, 1e-15);
  EXPECT_NEAR(grid.CellCenter(0).lon, 0.05, 1e-15);
  EXPECT_NEAR(grid.CellCenter(1).lon, 0.15, 1e-15);
  EXPECT_NEAR(grid.CellCenter(2).lat, 0.15, 1e-15);
  EXPECT_NEAR(grid.CellCenter(3).lat, 0.15, 1e-15);
  EXPECT_NEAR(grid.CellCenter(3).lon, 0.15, 1e-15);
}

TEST(GridTest, RejectsInvalidRegions) {
  EXPECT_FALSE(Grid::Create(Box(1, 0, 0, 1, 1, 1)).ok());
  EXPECT_FALSE(Grid::Create(Box(0, 1, 1, 1, 1, 1)).ok());
  EXPECT_FALSE(Grid::Create(Box(0, 1, 0, 1, 0, 1)).ok());
  EXPECT_FALSE(Grid::Create(Box(0, 1, 0, 1, 1, 0)).ok());
  EXPECT_FALSE(
      Grid::Create(Box(0, std::numeric_limits<double>::quiet_NaN(), 0, 1, 1, 1))
          .ok());
}

TEST(GridTest, KmConversionAtMidLatitude) {
  const Grid grid = SanFranciscoGrid();
  const double mid = 0.5 * (37.55 + 37.801);
  EXPECT_DOUBLE_EQ(grid.km_per_deg_lat(), 111.32);
  EXPECT_NEAR(grid.km_per_deg_lon(),
              111.32 * std::cos(mid * std::numbers::pi / 180.0), 1e-12);
}

TEST(GridTest, CentersLieStrictlyInsideTheirCells) {
  const Grid grid = SanFranciscoGrid();
  const Region& r = grid.region();
  for (CellId id = 0; id < grid.num_cells(); ++id) {
    const LatLon c = grid.CellCenter(id);
    const double lat_lo = r.lat_min + grid.RowOf(id) * grid.cell_height_deg();
    const double lon_lo = r.lon_min + grid.ColOf(id) * grid.cell_width_deg();
    EXPECT_GT(c.lat, lat_lo);
    EXPECT_LT(c.lat, lat_lo + grid.cell_height_deg());
    EXPECT_GT(c.lon, lon_lo);
    EXPECT_LT(c.lon, lon_lo + grid.cell_width_deg());
  }
}

TEST(QuantizeTest, CenterRoundTrip) {
  const Grid grid = SanFranciscoGrid();
  for (CellId id = 0; id < grid.num_cells(); ++id) {
    const LatLon c = grid.CellCenter(id);
    EXPECT_EQ(grid.Quantize(c.lat, c.lon), id);
  }
}

TEST(QuantizeTest, OutsidePointsAreOutOfRegion) {
  const Grid grid = SanFranciscoGrid();
  const Region& r = grid.region();
  EXPECT_EQ(grid.Quantize(r.lat_max + 0.1, r.lon_min + 0.01), std::nullopt);
  EXPECT_EQ(grid.Quantize(r.lat_min - 1e-9, r.lon_min + 0.01), std::nullopt);
  EXPECT_EQ(grid.Quantize(r.lat_min + 0.01, r.lon_max + 1e-9), std::nullopt);
}

TEST(QuantizeTest, InteriorEdgeGoesToLowerCell) {
  ASSERT_OK_AND_ASSIGN(const Grid grid,
                       Grid::Create(Box(0.0, 2.0, 0.0, 2.0, 2, 2)));
  EXPECT_EQ(grid.Quantize(1.0, 0.5), 0);
  EXPECT_EQ(grid.Quantize(0.5, 1.0), 0);
  EXPECT_EQ(grid.Quantize(1.0, 1.0), 0);
  EXPECT_EQ(grid.Quantize(2.0, 2.0), 3);
  EXPECT_EQ(grid.Quantize(0.0, 0.0), 0);
}

// Brute-force reference: the nearest center under the per-axis metric that
// measures offsets in cell widths.
TEST(QuantizeTest, MatchesNearestCenterSearch) {
  const Grid grid = SanFranciscoGrid();
  const Region& r = grid.region();
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const double lat = r.lat_min + UniformUnit(rng) * (r.lat_max - r.lat_min);
    const double lon = r.lon_min + UniformUnit(rng) * (r.lon_max - r.lon_min);
    CellId best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (CellId id = 0; id < grid.num_cells(); ++id) {
      const LatLon c = grid.CellCenter(id);
      const double cost =
          std::max(std::abs(lat - c.lat) / grid.cell_height_deg(),
                   std::abs(lon - c.lon) / grid.cell_width_deg());
      if (cost < best_cost) {
        best_cost = cost;
        best = id;
      }
    }
    EXPECT_EQ(grid.Quantize(lat, lon), best) << lat << ", " << lon;
  }
}

TEST(ManhattanTest, IdentityAndSymmetry) {
  const Grid grid = SanFranciscoGrid();
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const CellId a = SampleIndex(std::vector<double>(250, 1.0), rng);
    const CellId b = SampleIndex(std::vector<double>(250, 1.0), rng);
    EXPECT_EQ(*grid.ManhattanKm(a, a), 0.0);
    EXPECT_EQ(*grid.ManhattanKm(a, b), *grid.ManhattanKm(b, a));
  }
}

TEST(ManhattanTest, HorizontalNeighborIsOneCellWidth) {
  const Grid grid = SanFranciscoGrid();
  const Region& r = grid.region();
  const double width_km = (r.lon_max - r.lon_min) * grid.km_per_deg_lon() / 10;
  EXPECT_NEAR(*grid.ManhattanKm(0, 1), width_km, 1e-12);
  EXPECT_NEAR(*grid.ManhattanKm(57, 58), width_km, 1e-12);
}

TEST(ManhattanTest, RejectsInvalidIds) {
  const Grid grid = SanFranciscoGrid();
  EXPECT_EQ(grid.ManhattanKm(-1, 0).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(grid.ManhattanKm(0, 250).status().code(),
            absl::StatusCode::kOutOfRange);
}

TEST(DistanceMatrixTest, SingleCellIsZero) {
  ASSERT_OK_AND_ASSIGN(const Grid grid, Grid::Create(Box(0, 1, 0, 1, 1, 1)));
  const DistMatrix d = DistanceMatrix(grid);
  ASSERT_EQ(d.size(), 1);
  EXPECT_EQ(d(0, 0), 0.0);
}

TEST(DistanceMatrixTest, EntriesMatchPairwiseManhattan) {
  const Grid grid = SanFranciscoGrid();
  const DistMatrix d = DistanceMatrix(grid);
  ASSERT_EQ(d.size(), 250);
  for (CellId a = 0; a < 250; ++a) {
    EXPECT_EQ(d(a, a), 0.0);
    for (CellId b = 0; b < 250; ++b) {
      // The matrix sums per-axis offsets in a different order.
      EXPECT_NEAR(d(a, b), *grid.ManhattanKm(a, b),
                  1e-12 * std::max(1.0, d(a, b)));
    }
  }
}

TEST(DistanceMatrixTest, MaxEntryIsCenterToCenterSpan) {
  const Grid grid = SanFranciscoGrid();
  const Region& r = grid.region();
  const DistMatrix d = DistanceMatrix(grid);
  // Opposite corner centers are one cell short of the full span per axis.
  const double lat_km =
      (r.lat_max - r.lat_min) * grid.km_per_deg_lat() * (24.0 / 25.0);
  const double lon_km =
      (r.lon_max - r.lon_min) * grid.km_per_deg_lon() * (9.0 / 10.0);
  EXPECT_NEAR(d.matrix().maxCoeff(), lat_km + lon_km, 1e-9);
  EXPECT_NEAR(d(0, 249), lat_km + lon_km, 1e-9);
}

TEST(DistanceMatrixTest, TriangleInequality) {
  ASSERT_OK_AND_ASSIGN(const Grid grid,
                       Grid::Create(Box(37.6, 37.7, -122.5, -122.4, 6, 5)));
  const DistMatrix d = DistanceMatrix(grid);
  const int n = d.size();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        EXPECT_LE(d(a, c), d(a, b) + d(b, c) + 1e-12);
      }
    }
  }
}

TEST(DistanceMatrixTest, ScalingBoundsScalesDistances) {
  // Scaling both spans about a fixed mid-latitude keeps the km conversion
  // factors, so every distance scales linearly.
  const double k = 2.5;
  const Region base = Box(-0.1, 0.1, 10.0, 10.3, 4, 3);
  const Region scaled = Box(-0.1 * k, 0.1 * k, 10.0, 10.0 + 0.3 * k, 4, 3);
  ASSERT_OK_AND_ASSIGN(const Grid g1, Grid::Create(base));
  ASSERT_OK_AND_ASSIGN(const Grid g2, Grid::Create(scaled));
  const DistMatrix d1 = DistanceMatrix(g1);
  const DistMatrix d2 = DistanceMatrix(g2);
  for (int a = 0; a < d1.size(); ++a) {
    for (int b = 0; b < d1.size(); ++b) {
      EXPECT_NEAR(d2(a, b), k * d1(a, b), 1e-9);
    }
  }
}

TEST(DistMatrixTest, CreateValidates) {
  Matrix ok(2, 2);
  ok << 0, 1, 1, 0;
  EXPECT_OK(DistMatrix::Create(ok));
  Matrix diag = ok;
  diag(1, 1) = 0.5;
  EXPECT_FALSE(DistMatrix::Create(diag).ok());
  Matrix asym = ok;
  asym(0, 1) = 2;
  EXPECT_FALSE(DistMatrix::Create(asym).ok());
  Matrix neg = ok;
  neg(0, 1) = neg(1, 0) = -1;
  EXPECT_FALSE(DistMatrix::Create(neg).ok());
  EXPECT_FALSE(DistMatrix::Create(Matrix(2, 3)).ok());
}

TEST(DistMatrixTest, SeparablePathMatchesDenseProduct) {
  const Grid grid = SanFranciscoGrid();
  const DistMatrix fast = DistanceMatrix(grid);
  ASSERT_TRUE(fast.separable());
  ASSERT_OK_AND_ASSIGN(const DistMatrix dense, DistMatrix::Create(fast.matrix()));
  ASSERT_FALSE(dense.separable());
  Rng rng(11);
  Matrix w(7, 250);
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) w(i, j) = UniformUnit(rng);
  }
  const Matrix a = fast.ExpectedDistances(w);
  const Matrix b = dense.ExpectedDistances(w);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
  const Vector v = w.row(3).transpose();
  EXPECT_LT((fast.ExpectedDistances(v) - b.row(3).transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

}  // namespace
}  // namespace locpriv
