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
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "risbeam/array_response.hpp"
#include "risbeam/errors.hpp"
#include "risbeam/geometry.hpp"

namespace risbeam {

enum class BeamKind { directional, derivative, multibeam };

inline BeamKind parse_beam_kind(std::string_view s) {
  if (s == "directional") return BeamKind::directional;
  if (s == "derivative") return BeamKind::derivative;
  if (s == "multibeam") return BeamKind::multibeam;
  throw InvalidArgumentError("unknown beam kind '" + std::string(s) + "'");
}

inline std::string_view to_string(BeamKind k) {
  switch (k) {
    case BeamKind::directional: return "directional";
    case BeamKind::derivative: return "derivative";
    case BeamKind::multibeam: return "multibeam";
  }
  return "?";
}

struct BeamSpec {
  BeamKind kind = BeamKind::directional;
  std::vector<Position3> desired_points;
  DerivativeVariable derivative_var = DerivativeVariable::phi;
  Position3 tx;

  void validate() const {
    if (desired_points.empty()) {
      throw InvalidArgumentError("beam needs at least one desired point");
    }
    if (kind != BeamKind::multibeam && desired_points.size() != 1) {
      throw InvalidArgumentError(std::string(to_string(kind)) +
                                 " beam takes exactly one desired point");
    }
  }
};

/// Discretized desired pattern g with the points it was sampled at.
struct TargetPattern {
  ComplexVector samples;
  std::vector<Position3> points;
};

enum class CutCoordinate { rho, theta, phi };

inline std::string_view to_string(CutCoordinate c) {
  switch (c) {
    case CutCoordinate::rho: return "rho";
    case CutCoordinate::theta: return "theta";
    case CutCoordinate::phi: return "phi";
  }
  return "?";
}

/// Reference points and the discretization sets of rho, theta and phi
/// (meters / radians) that define the spherical cuts through each of them.
struct CutSpec {
  std::vector<SphericalPoint> reference_points;
  std::vector<double> rho_set;
  std::vector<double> theta_set;
  std::vector<double> phi_set;

  void validate() const {
    if (reference_points.empty()) {
      throw InvalidArgumentError("cut spec needs at least one reference point");
    }
    auto check = [](const std::vector<double>& set, const char* name) {
      if (set.empty()) {
        throw InvalidArgumentError(std::string(name) + " set is empty");
      }
      for (std::size_t i = 1; i < set.size(); ++i) {
        if (!(set[i] > set[i - 1])) {
          throw InvalidArgumentError(std::string(name) +
                                     " set must be strictly increasing");
        }
      }
    };
    check(rho_set, "rho");
    check(theta_set, "theta");
    check(phi_set, "phi");
  }
};

/// The three cuts through one reference point.
struct ReferenceCuts {
  std::vector<Position3> rho;
  std::vector<Position3> theta;
  std::vector<Position3> phi;

  const std::vector<Position3>& along(CutCoordinate c) const {
    switch (c) {
      case CutCoordinate::rho: return rho;
      case CutCoordinate::theta: return theta;
      default: return phi;
    }
  }
};

/// start, start + step, ... up to and including `stop` (to rounding).
inline std::vector<double> uniform_axis(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw InvalidArgumentError("axis needs step > 0 and stop >= start");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = start + step * i;
  return axis;
}

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Cuts through every desired point: rho set = the distinct reference radii,
/// theta over [0, 180] deg (front half-space of an x-z array), phi over
/// [-90, 90] deg, both every `step_deg`.
inline CutSpec default_cuts(std::span<const Position3> desired,
                            const Position3& center, double step_deg = 0.5) {
  CutSpec cut;
  for (const auto& p : desired) {
    cut.reference_points.push_back(cartesian_to_spherical(p, center));
    cut.rho_set.push_back(cut.reference_points.back().rho);
  }
  std::sort(cut.rho_set.begin(), cut.rho_set.end());
  cut.rho_set.erase(std::unique(cut.rho_set.begin(), cut.rho_set.end()),
                    cut.rho_set.end());
  std::vector<double> theta = uniform_axis(0.0, 180.0, step_deg);
  std::vector<double> phi = uniform_axis(-90.0, 90.0, step_deg);
  for (auto& t : theta) t = deg2rad(t);
  for (auto& p : phi) p = deg2rad(p);
  cut.theta_set = std::move(theta);
  cut.phi_set = std::move(phi);
  return cut;
}

/// Cartesian points of the rho-, theta- and phi-cut through every reference
/// point, about `ris_center`.
inline std::vector<ReferenceCuts> cut_points(const CutSpec& cut,
                                             const Position3& ris_center) {
  cut.validate();
  std::vector<ReferenceCuts> out;
  out.reserve(cut.reference_points.size());
  auto emit = [&](std::vector<Position3>& dst, SphericalPoint s) {
    if (s.rho == 0.0) {
      throw DegeneratePointError("cut point coincides with the RIS center");
    }
    dst.push_back(spherical_to_cartesian(s, ris_center));
  };
  for (const auto& ref : cut.reference_points) {
    ReferenceCuts rc;
    for (double rho : cut.rho_set) emit(rc.rho, {rho, ref.theta, ref.phi});
    for (double theta : cut.theta_set) emit(rc.theta, {ref.rho, theta, ref.phi});
    for (double phi : cut.phi_set) emit(rc.phi, {ref.rho, ref.theta, phi});
    out.push_back(std::move(rc));
  }
  return out;
}

/// Unconstrained weight w whose pattern w^T b(p, p_TX) is the target beam,
/// with the proportionality constant taken as 1.
inline ComplexVector target_weight(const BeamSpec& spec,
                                   const ArrayGeometry& geom) {
  spec.validate();
  switch (spec.kind) {
    case BeamKind::directional:
      return cascade(geom, spec.desired_points.front(), spec.tx).conjugate();
    case BeamKind::derivative:
      return cascade_derivative(geom, spec.desired_points.front(), spec.tx,
                                spec.derivative_var)
          .conjugate();
    case BeamKind::multibeam: {
      ComplexVector w = ComplexVector::Zero(static_cast<Eigen::Index>(geom.size()));
      for (const auto& p : spec.desired_points) {
        w += cascade(geom, p, spec.tx).conjugate();
      }
      return w;
    }
  }
  throw InvalidArgumentError("unknown beam kind");
}

/// g_k = weight^T b(p_k, tx).
inline TargetPattern sample_pattern(const ComplexVector& weight,
                                    const ArrayGeometry& geom,
                                    const Position3& tx,
                                    std::span<const Position3> points) {
  if (weight.size() != static_cast<Eigen::Index>(geom.size())) {
    throw InvalidArgumentError("weight length differs from element count");
  }
  TargetPattern t;
  t.points.assign(points.begin(), points.end());
  t.samples = response_matrix(geom, points, tx) * weight;
  return t;
}

}  // namespace risbeam
