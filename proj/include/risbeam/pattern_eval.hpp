// SPDX-License-Identifier: Apache-2.0
//
// risbeam - lookup-table constrained beam pattern synthesis for reflective RISs
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "risbeam/array_response.hpp"
#include "risbeam/beam_targets.hpp"
#include "risbeam/errors.hpp"
#include "risbeam/geometry.hpp"

namespace risbeam {

inline constexpr double kFloorDb = -200.0;

/// Amplitude dB, 20 log10 |v|, floored at -200 dB.
inline double magnitude_db(Complex v) {
  const double a = std::abs(v);
  if (a == 0.0) return kFloorDb;
  return std::max(kFloorDb, 20.0 * std::log10(a));
}

/// Realized pattern G(p_k) = omega^T b(p_k, tx) for every point. Points are
/// evaluated one at a time so large grids never materialize B.
inline ComplexVector evaluate(const ComplexVector& omega,
                              const ArrayGeometry& geom, const Position3& tx,
                              std::span<const Position3> points) {
  if (omega.size() != static_cast<Eigen::Index>(geom.size())) {
    throw InvalidArgumentError("omega length differs from element count");
  }
  const ComplexVector weighted = omega.cwiseProduct(steering(geom, tx));
  ComplexVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] =
        steering(geom, points[k]).transpose() * weighted;
  }
  return out;
}

struct PatternCut {
  CutCoordinate coordinate = CutCoordinate::phi;
  /// Radians for angle cuts, meters for rho cuts.
  std::vector<double> abscissa;
  std::vector<double> magnitude_db;
  ComplexVector samples;
};

struct PatternGrid {
  double rho = 0.0;
  std::vector<double> theta_axis;  // radians
  std::vector<double> phi_axis;    // radians
  /// |theta_axis| x |phi_axis|.
  Eigen::MatrixXd magnitude_db;
};

/// Peak and lobe figures of a cut or grid. Locations are in the abscissa
/// units of the cut, or (theta, phi) radians for grids. Absent secondary
/// peaks are -infinity; null depth is NaN unless requested.
struct PatternMetrics {
  double peak_db = kFloorDb;
  std::vector<double> peak_location;
  double null_depth_db = std::numeric_limits<double>::quiet_NaN();
  double secondary_peak_db = -std::numeric_limits<double>::infinity();
  std::vector<double> secondary_peak_location;
};

/// Pattern along one coordinate through `reference` (spherical about the
/// phase center); the other two coordinates stay at the reference values.
inline PatternCut evaluate_cut(const ComplexVector& omega,
                               const ArrayGeometry& geom, const Position3& tx,
                               const SphericalPoint& reference,
                               CutCoordinate coordinate,
                               std::vector<double> axis) {
  std::vector<Position3> points;
  points.reserve(axis.size());
  for (double v : axis) {
    SphericalPoint s = reference;
    switch (coordinate) {
      case CutCoordinate::rho: s.rho = v; break;
      case CutCoordinate::theta: s.theta = v; break;
      case CutCoordinate::phi: s.phi = v; break;
    }
    if (s.rho == 0.0) {
      throw DegeneratePointError("cut point coincides with the RIS center");
    }
    points.push_back(spherical_to_cartesian(s, geom.phase_center));
  }
  PatternCut cut;
  cut.coordinate = coordinate;
  cut.abscissa = std::move(axis);
  cut.samples = evaluate(omega, geom, tx, points);
  cut.magnitude_db.reserve(cut.abscissa.size());
  for (Eigen::Index k = 0; k < cut.samples.size(); ++k) {
    cut.magnitude_db.push_back(magnitude_db(cut.samples[k]));
  }
  return cut;
}

inline PatternGrid evaluate_grid(const ComplexVector& omega,
                                 const ArrayGeometry& geom, const Position3& tx,
                                 double rho, std::vector<double> theta_axis,
                                 std::vector<double> phi_axis) {
  if (!(rho > 0.0)) throw DegeneratePointError("grid radius must be positive");
  PatternGrid grid;
  grid.rho = rho;
  grid.theta_axis = std::move(theta_axis);
  grid.phi_axis = std::move(phi_axis);
  const auto nt = static_cast<Eigen::Index>(grid.theta_axis.size());
  const auto np = static_cast<Eigen::Index>(grid.phi_axis.size());
  grid.magnitude_db.resize(nt, np);
  std::vector<Position3> row(static_cast<std::size_t>(np));
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      row[static_cast<std::size_t>(j)] = spherical_to_cartesian(
          {rho, grid.theta_axis[static_cast<std::size_t>(i)],
           grid.phi_axis[static_cast<std::size_t>(j)]},
          geom.phase_center);
    }
    const ComplexVector g = evaluate(omega, geom, tx, row);
    for (Eigen::Index j = 0; j < np; ++j) grid.magnitude_db(i, j) = magnitude_db(g[j]);
  }
  return grid;
}

/// Great-circle angle between two (theta, phi) directions.
inline double angular_distance(double theta1, double phi1, double theta2,
                               double phi2) {
  const double c = dot(direction(theta1, phi1), direction(theta2, phi2));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// 1D metrics. The secondary peak is the largest sample separated from the
/// main peak by at least one local minimum. When `desired` is given the null
/// depth is peak_db minus the minimum within +-`null_window` of it.
inline PatternMetrics metrics(const PatternCut& cut,
                              std::optional<double> desired = std::nullopt,
                              double null_window = deg2rad(2.0)) {
  const auto& mag = cut.magnitude_db;
  const std::size_t n = mag.size();
  if (n < 2) throw InvalidArgumentError("metrics need at least two samples");
  PatternMetrics out;
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  out.peak_db = mag[peak];
  out.peak_location = {cut.abscissa[peak]};

  // Walk downhill from the peak on each side; everything past the first
  // valley belongs to another lobe.
  std::size_t right = peak;
  while (right + 1 < n && mag[right + 1] <= mag[right]) ++right;
  std::size_t left = peak;
  while (left > 0 && mag[left - 1] <= mag[left]) --left;
  auto consider = [&](std::size_t i) {
    if (mag[i] > out.secondary_peak_db) {
      out.secondary_peak_db = mag[i];
      out.secondary_peak_location = {cut.abscissa[i]};
    }
  };
  for (std::size_t i = right + 1; i < n; ++i) consider(i);
  for (std::size_t i = 0; i < left; ++i) consider(i);

  if (desired) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(cut.abscissa[i] - *desired) <= null_window + 1e-12) {
        lowest = std::min(lowest, mag[i]);
      }
    }
    if (std::isfinite(lowest)) out.null_depth_db = out.peak_db - lowest;
  }
  return out;
}

/// 2D metrics. The secondary peak is the largest sample farther than
/// `exclusion_radius` (great-circle, radians) from the main peak.
inline PatternMetrics metrics(const PatternGrid& grid,
                              double exclusion_radius = deg2rad(5.0)) {
  const auto& mag = grid.magnitude_db;
  if (mag.size() < 2) throw InvalidArgumentError("metrics need at least two samples");
  PatternMetrics out;
  Eigen::Index pi = 0, pj = 0;
  out.peak_db = mag.maxCoeff(&pi, &pj);
  const double pt = grid.theta_axis[static_cast<std::size_t>(pi)];
  const double pp = grid.phi_axis[static_cast<std::size_t>(pj)];
  out.peak_location = {pt, pp};
  for (Eigen::Index i = 0; i < mag.rows(); ++i) {
    for (Eigen::Index j = 0; j < mag.cols(); ++j) {
      const double t = grid.theta_axis[static_cast<std::size_t>(i)];
      const double p = grid.phi_axis[static_cast<std::size_t>(j)];
      if (mag(i, j) > out.secondary_peak_db &&
          angular_distance(t, p, pt, pp) > exclusion_radius) {
        out.secondary_peak_db = mag(i, j);
        out.secondary_peak_location = {t, p};
      }
    }
  }
  return out;
}

/// Lobes around the valley nearest to `location`: from the closest sample the
/// walk first descends to the valley floor, then climbs toward lower and
/// higher abscissa. `at_location_db` is the level at the closest sample.
struct AdjacentLobes {
  double at_location_db = kFloorDb;
  double valley_db = kFloorDb;
  double valley_location = 0.0;
  double left_db = kFloorDb;
  double left_location = 0.0;
  double right_db = kFloorDb;
  double right_location = 0.0;
};

inline AdjacentLobes adjacent_lobes(const PatternCut& cut, double location) {
  const auto& mag = cut.magnitude_db;
  const std::size_t n = mag.size();
  if (n < 2) throw InvalidArgumentError("cut needs at least two samples");
  std::size_t centre = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(cut.abscissa[i] - location) <
        std::abs(cut.abscissa[centre] - location)) {
      centre = i;
    }
  }
  AdjacentLobes out;
  out.at_location_db = mag[centre];
  std::size_t v = centre;
  while (true) {
    const bool down_left = v > 0 && mag[v - 1] < mag[v];
    const bool down_right = v + 1 < n && mag[v + 1] < mag[v];
    if (down_left && (!down_right || mag[v - 1] <= mag[v + 1])) --v;
    else if (down_right) ++v;
    else break;
  }
  out.valley_db = mag[v];
  out.valley_location = cut.abscissa[v];
  std::size_t l = v;
  while (l > 0 && mag[l - 1] >= mag[l]) --l;
  std::size_t r = v;
  while (r + 1 < n && mag[r + 1] >= mag[r]) ++r;
  out.left_db = mag[l];
  out.left_location = cut.abscissa[l];
  out.right_db = mag[r];
  out.right_location = cut.abscissa[r];
  return out;
}

/// Specular reflection direction (theta, phi) of a transmitter for an array
/// whose normal is `normal`: the arrival direction mirrored about the normal.
inline SphericalPoint specular_direction(const Position3& tx,
                                         const Position3& center,
                                         const Position3& normal = {0.0, 1.0, 0.0}) {
  const Position3 d = tx - center;
  const double n2 = dot(normal, normal);
  const Position3 along = (dot(d, normal) / n2) * normal;
  const Position3 mirrored = 2.0 * along - d;
  SphericalPoint s = cartesian_to_spherical(mirrored + center, center);
  s.rho = 1.0;
  return s;
}

}  // namespace risbeam
