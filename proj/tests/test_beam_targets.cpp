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
#include "risbeam/beam_targets.hpp"

namespace risbeam {
namespace {

constexpr double kPi = std::numbers::pi;

ArrayGeometry array_5ghz(int side) {
  const double lambda = wavelength_for(5.15e9);
  return planar_array(side, side, lambda / 2, {}, lambda);
}

BeamSpec directional(const Position3& p, const Position3& tx = {5.0, 5.0, 0.0}) {
  return BeamSpec{BeamKind::directional, {p}, DerivativeVariable::phi, tx};
}

TEST(TargetWeight, SingleElementDirectional) {
  const auto g = planar_array(1, 1, 0.1, {}, 0.1);
  const auto w = target_weight(directional({2.0, 3.0, 2.0}), g);
  ASSERT_EQ(w.size(), 1);
  EXPECT_EQ(w[0], Complex(1.0, 0.0));
}

TEST(TargetWeight, MultibeamOfOneIsDirectional) {
  const auto g = array_5ghz(4);
  BeamSpec multi = directional({2.0, 3.0, 2.0});
  multi.kind = BeamKind::multibeam;
  EXPECT_EQ(target_weight(multi, g), target_weight(directional({2.0, 3.0, 2.0}), g));
}

TEST(TargetWeight, DirectionalGainIsElementCount) {
  const auto g = array_5ghz(8);
  const Position3 p{2.0, 3.0, 2.0};
  const BeamSpec spec = directional(p);
  const auto w = target_weight(spec, g);
  const Complex v = w.transpose() * cascade(g, p, spec.tx);
  EXPECT_NEAR(v.real(), 64.0, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(TargetWeight, DerivativeIsConjugateOfCascadeDerivative) {
  const auto g = array_5ghz(4);
  BeamSpec spec = directional({2.0, 3.0, 2.0});
  spec.kind = BeamKind::derivative;
  spec.derivative_var = DerivativeVariable::theta;
  EXPECT_EQ(target_weight(spec, g),
            cascade_derivative(g, {2.0, 3.0, 2.0}, spec.tx, DerivativeVariable::theta)
                .conjugate());
}

TEST(BeamSpecValidation, PointCounts) {
  BeamSpec none{BeamKind::multibeam, {}, DerivativeVariable::phi, {}};
  EXPECT_THROW(none.validate(), InvalidArgumentError);
  BeamSpec two{BeamKind::derivative, {{1, 1, 0}, {1, 2, 0}}, DerivativeVariable::phi, {}};
  EXPECT_THROW(two.validate(), InvalidArgumentError);
  two.kind = BeamKind::multibeam;
  EXPECT_NO_THROW(two.validate());
  EXPECT_EQ(parse_beam_kind("multibeam"), BeamKind::multibeam);
  EXPECT_THROW(parse_beam_kind("sum"), InvalidArgumentError);
}

TEST(SamplePattern, PeakAtDesiredPoint) {
  const auto g = array_5ghz(4);
  const Position3 p{2.0, 3.0, 2.0};
  const BeamSpec spec = directional(p);
  const std::vector<Position3> pts{p};
  const auto t = sample_pattern(target_weight(spec, g), g, spec.tx, pts);
  ASSERT_EQ(t.samples.size(), 1);
  EXPECT_NEAR(t.samples[0].real(), 16.0, 1e-12);
  EXPECT_NEAR(t.samples[0].imag(), 0.0, 1e-12);
  EXPECT_EQ(t.points, pts);
}

TEST(SamplePattern, ZeroWeight) {
  const auto g = array_5ghz(3);
  const std::vector<Position3> pts{{1, 1, 0}, {0, 2, 1}};
  const auto t = sample_pattern(ComplexVector::Zero(9), g, {4, 4, 0}, pts);
  EXPECT_EQ(t.samples.norm(), 0.0);
  EXPECT_THROW(sample_pattern(ComplexVector::Zero(8), g, {4, 4, 0}, pts),
               InvalidArgumentError);
}

TEST(SamplePattern, MatchesNaiveSummation) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0), y(0.5, 4.0);
  const double lambda = wavelength_for(10e9);
  const auto g = planar_array(2, 4, 0.6 * lambda, {0.1, 0.0, -0.2}, lambda);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector w = oracle::random_vector(8, rng);
    std::vector<Position3> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({u(rng), y(rng), u(rng)});
    const Position3 tx{u(rng), y(rng), u(rng)};
    const auto t = sample_pattern(w, g, tx, pts);
    const auto ref = oracle::naive_pattern(w, g, tx, pts);
    EXPECT_LE((t.samples - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CutPoints, SingletonSetsHitTheReference) {
  const Position3 center{0.0, 0.0, 0.0};
  const SphericalPoint ref{4.0, 0.6, 0.3};
  CutSpec cut{{ref}, {ref.rho}, {ref.theta}, {ref.phi}};
  const auto cuts = cut_points(cut, center);
  ASSERT_EQ(cuts.size(), 1u);
  const Position3 p = spherical_to_cartesian(ref, center);
  for (auto c : {CutCoordinate::rho, CutCoordinate::theta, CutCoordinate::phi}) {
    ASSERT_EQ(cuts[0].along(c).size(), 1u);
    EXPECT_EQ(cuts[0].along(c)[0], p);
  }
}

TEST(CutPoints, ThetaCutHoldsRadiusAndElevation) {
  const Position3 center{0.5, 0.0, 0.2};
  CutSpec cut;
  cut.reference_points = {{3.0, 1.0, 0.4}};
  cut.rho_set = {3.0};
  cut.theta_set = uniform_axis(-kPi / 2, kPi / 2, kPi / 180);
  cut.phi_set = {0.4};
  ASSERT_EQ(cut.theta_set.size(), 181u);
  const auto cuts = cut_points(cut, center);
  ASSERT_EQ(cuts[0].theta.size(), 181u);
  for (const auto& p : cuts[0].theta) {
    const auto s = cartesian_to_spherical(p, center);
    EXPECT_NEAR(s.rho, 3.0, 1e-12);
    EXPECT_NEAR(s.phi, 0.4, 1e-12);
  }
}

TEST(CutPoints, TotalCountIsSumOfSets) {
  const std::vector<Position3> desired{{0.0, 4.0, 2.0}, {0.0, 4.0, 4.0}};
  const auto cut = default_cuts(desired, {}, 0.5);
  EXPECT_EQ(cut.rho_set.size(), 2u);
  EXPECT_EQ(cut.theta_set.size(), 361u);
  EXPECT_EQ(cut.phi_set.size(), 361u);
  const auto cuts = cut_points(cut, {});
  std::size_t total = 0;
  for (const auto& c : cuts) total += c.rho.size() + c.theta.size() + c.phi.size();
  EXPECT_EQ(total, 2u * (2 + 361 + 361));
  EXPECT_LT(total, 2u * 361 * 361);
}

TEST(CutPoints, ErrorsOnInvalidSpecs) {
  CutSpec empty;
  EXPECT_THROW(cut_points(empty, {}), InvalidArgumentError);
  CutSpec unordered{{{1.0, 0.0, 0.0}}, {1.0}, {0.2, 0.1}, {0.0}};
  EXPECT_THROW(cut_points(unordered, {}), InvalidArgumentError);
  CutSpec at_center{{{1.0, 0.0, 0.0}}, {0.0, 1.0}, {0.0}, {0.0}};
  EXPECT_THROW(cut_points(at_center, {}), DegeneratePointError);
  EXPECT_THROW(uniform_axis(1.0, 0.0, 0.5), InvalidArgumentError);
  EXPECT_THROW(uniform_axis(0.0, 1.0, 0.0), InvalidArgumentError);
}

TEST(DefaultCuts, ReferencesAreDesiredPoints) {
  const Position3 p{2.0, 3.0, 2.0};
  const auto cut = default_cuts(std::vector<Position3>{p}, {}, 1.0);
  ASSERT_EQ(cut.reference_points.size(), 1u);
  EXPECT_NEAR(cut.reference_points[0].rho, std::sqrt(17.0), 1e-12);
  EXPECT_EQ(cut.rho_set, std::vector<double>{cut.reference_points[0].rho});
  EXPECT_EQ(cut.theta_set.size(), 181u);
  EXPECT_DOUBLE_EQ(cut.theta_set.back(), kPi);
  EXPECT_DOUBLE_EQ(cut.phi_set.front(), -kPi / 2);
}

TEST(BeamTargetProperties, DirectionalIsBoundedByElementCount) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-5.0, 5.0), y(0.3, 6.0);
  const auto g = array_5ghz(6);
  const BeamSpec spec = directional({1.0, 2.0, -1.0});
  const auto w = target_weight(spec, g);
  std::vector<Position3> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({u(rng), y(rng), u(rng)});
  const auto t = sample_pattern(w, g, spec.tx, pts);
  EXPECT_LE(t.samples.cwiseAbs().maxCoeff(), 36.0 + 1e-12);
}

TEST(BeamTargetProperties, DerivativeHasNullAtDesiredCoordinate) {
  const auto g = array_5ghz(8);
  const Position3 p{2.0, 3.0, 2.0};
  BeamSpec spec = directional(p);
  spec.kind = BeamKind::derivative;
  const auto w = target_weight(spec, g);
  const auto ref = cartesian_to_spherical(p, g.phase_center);
  std::vector<Position3> pts;
  for (int i = -20; i <= 20; ++i) {
    pts.push_back(spherical_to_cartesian({ref.rho, ref.theta, ref.phi + deg2rad(0.1 * i)},
                                         g.phase_center));
  }
  const auto t = sample_pattern(w, g, spec.tx, pts);
  const double at = std::abs(t.samples[20]);
  EXPECT_LT(at, std::abs(t.samples[19]));
  EXPECT_LT(at, std::abs(t.samples[21]));
  EXPECT_LT(at, 0.05 * t.samples.cwiseAbs().maxCoeff());
}

TEST(BeamTargetProperties, CoincidentMultibeamScalesDirectional) {
  const auto g = array_5ghz(5);
  const Position3 p{1.0, 3.0, 0.5};
  BeamSpec multi = directional(p);
  multi.kind = BeamKind::multibeam;
  multi.desired_points = {p, p};
  EXPECT_EQ(target_weight(multi, g), 2.0 * target_weight(directional(p), g));
}

TEST(BeamTargetProperties, SamplingIsLinear) {
  std::mt19937_64 rng(23);
  const auto g = array_5ghz(4);
  const std::vector<Position3> pts{{1, 2, 0}, {0, 3, 1}, {-2, 2, -1}};
  for (int i = 0; i < 20; ++i) {
    const ComplexVector w1 = oracle::random_vector(16, rng);
    const ComplexVector w2 = oracle::random_vector(16, rng);
    const auto sum = sample_pattern(w1 + w2, g, {4, 4, 0}, pts).samples;
    const auto sep = (sample_pattern(w1, g, {4, 4, 0}, pts).samples +
                      sample_pattern(w2, g, {4, 4, 0}, pts).samples)
                         .eval();
    EXPECT_LE((sum - sep).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
}  // namespace risbeam
