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

#include <cmath>
#include <numbers>
#include <vector>

#include "risbeam/errors.hpp"

namespace risbeam {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Cartesian point in meters.
struct Position3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Position3 operator+(const Position3& a, const Position3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Position3 operator-(const Position3& a, const Position3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Position3 operator*(double k, const Position3& a) {
    return {k * a.x, k * a.y, k * a.z};
  }
  friend bool operator==(const Position3&, const Position3&) = default;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double dot(const Position3& a, const Position3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Position3& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Position3& a, const Position3& b) {
  return norm(a - b);
}

/// Spherical coordinates about some origin. theta is the azimuth in the
/// x-y plane measured from +x, phi the elevation from the x-y plane toward +z.
struct SphericalPoint {
  double rho = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Unit direction for azimuth `theta` and elevation `phi`.
inline Position3 direction(double theta, double phi) {
  const double cp = std::cos(phi);
  return {cp * std::cos(theta), cp * std::sin(theta), std::sin(phi)};
}

inline Position3 spherical_to_cartesian(const SphericalPoint& s,
                                        const Position3& origin) {
  return origin + s.rho * direction(s.theta, s.phi);
}

/// Inverse of spherical_to_cartesian. At the poles theta is set to 0.
inline SphericalPoint cartesian_to_spherical(const Position3& p,
                                             const Position3& origin) {
  const Position3 d = p - origin;
  const double rho = norm(d);
  if (rho == 0.0) {
    throw DegeneratePointError("cartesian_to_spherical: point equals origin");
  }
  const double horizontal = std::hypot(d.x, d.y);
  const double phi = std::atan2(d.z, horizontal);
  double theta = horizontal == 0.0 ? 0.0 : std::atan2(d.y, d.x);
  // atan2 returns (-pi, pi]; fold pi onto -pi to keep theta in [-pi, pi).
  if (theta >= std::numbers::pi) theta -= 2.0 * std::numbers::pi;
  return {rho, theta, phi};
}

inline double wavelength_for(double frequency_hz) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw InvalidArgumentError("frequency must be positive and finite");
  }
  return kSpeedOfLight / frequency_hz;
}

/// Element positions p_m, phase center p_RIS and carrier wavelength.
struct ArrayGeometry {
  std::vector<Position3> elements;
  Position3 phase_center;
  double wavelength = 1.0;

  std::size_t size() const { return elements.size(); }
  double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }
};

/// Regular rows x cols grid in the x-z plane (boresight +y) centered on
/// `center`. Element m = r * cols + c sits at column offset c along x and row
/// offset r along z.
inline ArrayGeometry planar_array(int rows, int cols, double spacing,
                                  const Position3& center, double wavelength) {
  if (rows < 1 || cols < 1) {
    throw InvalidArgumentError("planar_array: rows and cols must be >= 1");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgumentError("planar_array: spacing must be positive");
  }
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw InvalidArgumentError("planar_array: wavelength must be positive");
  }
  ArrayGeometry geom;
  geom.phase_center = center;
  geom.wavelength = wavelength;
  geom.elements.reserve(static_cast<std::size_t>(rows) * cols);
  const double row_mid = 0.5 * (rows - 1);
  const double col_mid = 0.5 * (cols - 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      geom.elements.push_back({center.x + (c - col_mid) * spacing, center.y,
                               center.z + (r - row_mid) * spacing});
    }
  }
  return geom;
}

}  // namespace risbeam
