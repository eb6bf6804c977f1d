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

#include <complex>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "risbeam/errors.hpp"
#include "risbeam/geometry.hpp"

namespace risbeam {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
/// Rows are cascade vectors b^T(p_k, p_TX).
using ResponseMatrix = Eigen::MatrixXcd;

/// Coordinate of the receive point a derivative is taken with respect to.
/// Spherical variables are measured about the array phase center.
enum class DerivativeVariable { x, y, z, rho, theta, phi };

inline std::string_view to_string(DerivativeVariable v) {
  switch (v) {
    case DerivativeVariable::x: return "x";
    case DerivativeVariable::y: return "y";
    case DerivativeVariable::z: return "z";
    case DerivativeVariable::rho: return "rho";
    case DerivativeVariable::theta: return "theta";
    case DerivativeVariable::phi: return "phi";
  }
  return "?";
}

inline DerivativeVariable parse_derivative_variable(std::string_view s) {
  for (auto v : {DerivativeVariable::x, DerivativeVariable::y,
                 DerivativeVariable::z, DerivativeVariable::rho,
                 DerivativeVariable::theta, DerivativeVariable::phi}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidArgumentError("unknown derivative variable '" + std::string(s) +
                             "'");
}

namespace detail {

inline void check_not_coincident(const ArrayGeometry& geom, const Position3& p) {
  if (p == geom.phase_center) {
    throw DegeneratePointError("point coincides with the array phase center");
  }
  for (const auto& e : geom.elements) {
    if (p == e) {
      throw DegeneratePointError("point coincides with an array element");
    }
  }
}

/// Partial derivative of the point p = center + rho * u(theta, phi) (or of
/// p itself for Cartesian variables) with respect to `var`.
inline Position3 point_tangent(const ArrayGeometry& geom, const Position3& p,
                               DerivativeVariable var) {
  switch (var) {
    case DerivativeVariable::x: return {1.0, 0.0, 0.0};
    case DerivativeVariable::y: return {0.0, 1.0, 0.0};
    case DerivativeVariable::z: return {0.0, 0.0, 1.0};
    default: break;
  }
  const SphericalPoint s = cartesian_to_spherical(p, geom.phase_center);
  const double ct = std::cos(s.theta), st = std::sin(s.theta);
  const double cp = std::cos(s.phi), sp = std::sin(s.phi);
  switch (var) {
    case DerivativeVariable::rho: return {cp * ct, cp * st, sp};
    case DerivativeVariable::theta: return {-s.rho * cp * st, s.rho * cp * ct, 0.0};
    default: return {-s.rho * sp * ct, -s.rho * sp * st, s.rho * cp};
  }
}

}  // namespace detail

/// Near-field RIS response a(p): entry m is
/// exp(-j k (|p - p_m| - |p - p_RIS|)).
inline ComplexVector steering(const ArrayGeometry& geom, const Position3& p) {
  detail::check_not_coincident(geom, p);
  const double k = geom.wavenumber();
  const Position3& c = geom.phase_center;
  const double ref = distance(p, c);
  ComplexVector a(static_cast<Eigen::Index>(geom.size()));
  for (std::size_t m = 0; m < geom.size(); ++m) {
    const Position3& e = geom.elements[m];
    // |p-e| - |p-c| without cancellation at long range.
    const double diff = dot(e - c, e + c - 2.0 * p) / (distance(p, e) + ref);
    a[static_cast<Eigen::Index>(m)] = std::polar(1.0, -k * diff);
  }
  return a;
}

/// Cascaded vector b(p_rx, p_tx) = a(p_rx) .* a(p_tx).
inline ComplexVector cascade(const ArrayGeometry& geom, const Position3& p_rx,
                             const Position3& p_tx) {
  return steering(geom, p_rx).cwiseProduct(steering(geom, p_tx));
}

/// Analytic partial derivative of b(p_rx, p_tx) with respect to one
/// coordinate of p_rx.
inline ComplexVector cascade_derivative(const ArrayGeometry& geom,
                                        const Position3& p_rx,
                                        const Position3& p_tx,
                                        DerivativeVariable var) {
  ComplexVector b = cascade(geom, p_rx, p_tx);
  const Position3 tangent = detail::point_tangent(geom, p_rx, var);
  const double k = geom.wavenumber();
  const Position3 to_center = p_rx - geom.phase_center;
  const double center_rate = dot(to_center, tangent) / norm(to_center);
  for (std::size_t m = 0; m < geom.size(); ++m) {
    const Position3 to_elem = p_rx - geom.elements[m];
    const double rate = dot(to_elem, tangent) / norm(to_elem) - center_rate;
    const auto i = static_cast<Eigen::Index>(m);
    b[i] *= Complex(0.0, -k * rate);
  }
  return b;
}

/// Stacks b^T(p_k, p_tx) for every point into an N x M matrix.
inline ResponseMatrix response_matrix(const ArrayGeometry& geom,
                                      std::span<const Position3> points,
                                      const Position3& p_tx) {
  const ComplexVector a_tx = steering(geom, p_tx);
  ResponseMatrix B(static_cast<Eigen::Index>(points.size()),
                   static_cast<Eigen::Index>(geom.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    B.row(static_cast<Eigen::Index>(k)) =
        steering(geom, points[k]).cwiseProduct(a_tx).transpose();
  }
  return B;
}

}  // namespace risbeam
