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


#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles/reference_oracles.hpp"
#include "risbeam/array_response.hpp"
#include "risbeam/beam_targets.hpp"

namespace risbeam {
namespace {

constexpr double kPi = std::numbers::pi;

ArrayGeometry random_array(std::mt19937_64& rng, int max_side = 6, int min_side = 1) {
  std::uniform_int_distribution<int> side(min_side, max_side);
  std::uniform_real_distribution<double> freq(1e9, 40e9);
  const double lambda = wavelength_for(freq(rng));
  return planar_array(side(rng), side(rng), lambda / 2, {}, lambda);
}

Position3 random_point(std::mt19937_64& rng, double rmin, double rmax) {
  std::uniform_real_distribution<double> r(rmin, rmax), t(0.05, kPi - 0.05),
      p(-1.4, 1.4);
  return spherical_to_cartesian({r(rng), t(rng), p(rng)}, {});
}

TEST(Steering, SingleElementAtCenterIsOne) {
  const auto g = planar_array(1, 1, 0.1, {}, 0.1);
  const auto a = steering(g, {1.0, 2.0, 3.0});
  ASSERT_EQ(a.size(), 1);
  EXPECT_EQ(a[0], Complex(1.0, 0.0));
}

TEST(Steering, EquidistantElementHasZeroPhase) {
  ArrayGeometry g;
  g.wavelength = 0.01;
  g.elements = {{0.1, 0.0, 0.0}};
  const auto a = steering(g, {0.05, 3.0, 0.0});
  EXPECT_NEAR(a[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(a[0].imag(), 0.0, 1e-15);
}

TEST(Steering, FarFieldMatchesPlaneWave) {
  const double lambda = 0.01, d = lambda / 2;
  ArrayGeometry g;
  g.wavelength = lambda;
  g.elements = {{-d / 2, 0.0, 0.0}, {d / 2, 0.0, 0.0}};
  const double theta = deg2rad(60.0);
  const Position3 far = spherical_to_cartesian({1e6, theta, 0.0}, {});
  const auto a = steering(g, far);
  const double k = g.wavenumber();
  for (int m = 0; m < 2; ++m) {
    const double x = g.elements[static_cast<std::size_t>(m)].x;
    const Complex plane = std::polar(1.0, k * x * std::cos(theta));
    EXPECT_LE(std::abs(a[m] - plane), 1e-5);
  }
}

TEST(Steering, FarFieldPhasesAgreeAtLargeRange) {
  const double lambda = wavelength_for(28e9);
  const auto g = planar_array(8, 8, lambda / 2, {}, lambda);
  const double aperture = 7 * lambda / 2 * std::sqrt(2.0);
  const Position3 u = direction(deg2rad(70.0), deg2rad(20.0));
  const auto a = steering(g, 1e4 * aperture * u);
  const double k = g.wavenumber();
  for (std::size_t m = 0; m < g.size(); ++m) {
    const Complex plane = std::polar(1.0, k * dot(g.elements[m], u));
    EXPECT_LE(std::abs(std::arg(a[static_cast<Eigen::Index>(m)] / plane)), 1e-3);
  }
}

TEST(Steering, CoincidentPointThrows) {
  const auto g = planar_array(2, 2, 0.1, {}, 0.2);
  EXPECT_THROW(steering(g, g.elements[0]), DegeneratePointError);
  EXPECT_THROW(steering(g, g.phase_center), DegeneratePointError);
}

TEST(Cascade, SamePointSquaresSteering) {
  const auto g = planar_array(2, 2, 0.05, {}, 0.1);
  const Position3 p{1.0, 2.0, 0.5};
  const auto a = steering(g, p);
  const auto b = cascade(g, p, p);
  for (Eigen::Index m = 0; m < 4; ++m) EXPECT_EQ(b[m], a[m] * a[m]);
}

TEST(Cascade, IsSymmetricInItsArguments) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto g = random_array(rng);
    const Position3 p = random_point(rng, 0.5, 10.0);
    const Position3 q = random_point(rng, 0.5, 10.0);
    EXPECT_EQ(cascade(g, p, q), cascade(g, q, p));
  }
}

TEST(ArrayResponseProperties, UnitModulus) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const auto g = random_array(rng);
    const auto b = cascade(g, random_point(rng, 0.2, 50.0), random_point(rng, 0.2, 50.0));
    for (Eigen::Index m = 0; m < b.size(); ++m) EXPECT_NEAR(std::abs(b[m]), 1.0, 1e-12);
  }
}

TEST(CascadeDerivative, SingleElementIsZero) {
  const auto g = planar_array(1, 1, 0.1, {}, 0.1);
  for (int v = 0; v < 6; ++v) {
    const auto d = cascade_derivative(g, {1.0, 2.0, 0.3}, {4.0, 4.0, 0.0},
                                      static_cast<DerivativeVariable>(v));
    EXPECT_EQ(std::abs(d[0]), 0.0);
  }
}

TEST(CascadeDerivative, MirrorElementsAreAntisymmetricOnBoresight) {
  const double lambda = 0.01;
  ArrayGeometry g;
  g.wavelength = lambda;
  g.elements = {{-0.02, 0.0, 0.0}, {0.02, 0.0, 0.0}};
  const Position3 p{0.0, 2.0, 0.0};
  const auto d = cascade_derivative(g, p, p, DerivativeVariable::x);
  const auto b = cascade(g, p, p);
  // b is symmetric here, so the phase rates must cancel pairwise.
  EXPECT_EQ(b[0], b[1]);
  EXPECT_NEAR(std::abs(d[0] + d[1]), 0.0, 1e-12 * std::abs(d[0]));
  EXPECT_GT(std::abs(d[0]), 0.0);
}

TEST(CascadeDerivative, MatchesFiniteDifferenceOn16Elements) {
  const double lambda = wavelength_for(5.15e9);
  const auto g = planar_array(4, 4, lambda / 2, {}, lambda);
  const Position3 rx{2.0, 3.0, 2.0}, tx{5.0, 5.0, 0.0};
  const auto analytic = cascade_derivative(g, rx, tx, DerivativeVariable::phi);
  const auto fd = oracle::finite_difference_cascade(g, rx, tx, 5);
  EXPECT_LE((analytic - fd).norm() / fd.norm(), 1e-5);
}

TEST(CascadeDerivative, EveryVariableMatchesFiniteDifference) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    // Planar (at least 2 x 2) so no variable has an identically zero derivative.
    const auto g = random_array(rng, 4, 2);
    const Position3 rx = random_point(rng, 1.0, 8.0);
    const Position3 tx = random_point(rng, 1.0, 8.0);
    for (int v = 0; v < 6; ++v) {
      const auto analytic = cascade_derivative(g, rx, tx, static_cast<DerivativeVariable>(v));
      const auto fd = oracle::finite_difference_cascade(g, rx, tx, v);
      EXPECT_LE((analytic - fd).norm() / fd.norm(), 1e-5) << "variable " << v;
    }
  }
}

TEST(DerivativeVariable, ParsesNames) {
  EXPECT_EQ(parse_derivative_variable("theta"), DerivativeVariable::theta);
  EXPECT_EQ(to_string(DerivativeVariable::rho), "rho");
  EXPECT_THROW(parse_derivative_variable("psi"), InvalidArgumentError);
}

TEST(ResponseMatrix, RowsAreCascadeVectors) {
  const auto g = planar_array(3, 2, 0.02, {}, 0.04);
  const Position3 tx{3.0, 3.0, 0.0};
  const std::vector<Position3> pts{{1.0, 1.0, 0.0}, {0.0, 2.0, 1.0}, {-1.0, 1.0, -1.0}};
  const auto B = response_matrix(g, pts, tx);
  ASSERT_EQ(B.rows(), 3);
  ASSERT_EQ(B.cols(), 6);
  for (int k = 0; k < 3; ++k) {
    const ComplexVector b = cascade(g, pts[static_cast<std::size_t>(k)], tx);
    EXPECT_LE((B.row(k).transpose() - b).norm(), 1e-15);
  }
}

}  // namespace
}  // namespace risbeam
