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
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "risbeam/array_response.hpp"
#include "risbeam/beam_targets.hpp"
#include "risbeam/errors.hpp"
#include "risbeam/lookup_tables.hpp"

namespace risbeam {

/// How the complex scale s is chosen each iteration when several cuts are
/// fitted at once.
///  - stacked: joint least-squares s over all cuts concatenated.
///  - sum_of_ratios: sum over cuts of each cut's own least-squares ratio.
/// Both coincide for a single cut.
enum class ScaleMode { stacked, sum_of_ratios };

inline ScaleMode parse_scale_mode(std::string_view s) {
  if (s == "stacked") return ScaleMode::stacked;
  if (s == "sum_of_ratios") return ScaleMode::sum_of_ratios;
  throw InvalidArgumentError("unknown scale mode '" + std::string(s) + "'");
}

inline std::string_view to_string(ScaleMode m) {
  return m == ScaleMode::stacked ? "stacked" : "sum_of_ratios";
}

struct SolverOptions {
  double beta = 0.5;
  int max_iterations = 200;
  double rel_tolerance = 1e-6;
  /// Multiply the gradient by conj(s), which makes it the true gradient of
  /// |g - s B w|^2 in w. Off reproduces the unscaled update.
  bool conjugate_scaling = true;
  ScaleMode scale_mode = ScaleMode::stacked;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) {
      throw InvalidArgumentError("beta must lie in the open interval (0, 1)");
    }
    if (max_iterations < 1) {
      throw InvalidArgumentError("max_iterations must be >= 1");
    }
    if (!(rel_tolerance > 0.0)) {
      throw InvalidArgumentError("rel_tolerance must be > 0");
    }
  }
};

/// One least-squares block: a response matrix and the target samples it
/// should reproduce.
struct CutProblem {
  ResponseMatrix B;
  ComplexVector g;
  std::size_t reference = 0;
  CutCoordinate coordinate = CutCoordinate::phi;
};

struct SynthesisResult {
  RISConfiguration config;
  Complex s;
  double objective = 0.0;
  /// Objective of the iterate entering each iteration, scored with its
  /// optimal s.
  std::vector<double> objective_trace;
  std::vector<Complex> scale_trace;
  int iterations_run = 0;
  bool converged = false;
};

struct EigenEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Closed-form minimizer over complex s of |g - s B w|^2.
inline Complex optimal_scale(const ResponseMatrix& B, const ComplexVector& g,
                             const ComplexVector& omega) {
  const ComplexVector Bw = B * omega;
  const double den = Bw.squaredNorm();
  if (den == 0.0) throw SolverError("optimal_scale: B * omega is zero");
  return Bw.dot(g) / den;
}

inline double residual_objective(const ResponseMatrix& B,
                                 const ComplexVector& g, Complex s,
                                 const ComplexVector& omega) {
  return (g - s * (B * omega)).squaredNorm();
}

namespace detail {

inline EigenEstimate power_iteration(const Eigen::MatrixXcd& H,
                                     ComplexVector v, int max_iterations) {
  EigenEstimate est;
  v.normalize();
  for (int it = 1; it <= max_iterations; ++it) {
    const ComplexVector w = H * v;
    const double lambda = v.dot(w).real();
    est.value = lambda;
    est.iterations = it;
    const double wn = w.norm();
    if (wn == 0.0) {
      est.converged = true;
      return est;
    }
    const double residual = (w - lambda * v).norm();
    if (residual <= 1e-9 * std::abs(lambda)) {
      est.converged = true;
      return est;
    }
    v = w / wn;
  }
  return est;
}

}  // namespace detail

/// Largest eigenvalue of a Hermitian positive semidefinite matrix by power
/// iteration. The run starts from the normalized all-ones vector and is
/// repeated from a seeded random vector, since a start orthogonal to the
/// dominant eigenvector converges to a smaller eigenvalue; the larger of the
/// two estimates is returned. `converged` is false when either run hit the
/// iteration cap.
inline EigenEstimate largest_eigenvalue(const Eigen::MatrixXcd& H,
                                        std::uint64_t seed = 0,
                                        int max_iterations = 5000) {
  if (H.rows() != H.cols() || H.rows() == 0) {
    throw InvalidArgumentError("largest_eigenvalue: matrix must be square");
  }
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgumentError("largest_eigenvalue: matrix is not Hermitian");
  }
  const Eigen::Index n = H.rows();
  EigenEstimate first =
      detail::power_iteration(H, ComplexVector::Ones(n), max_iterations);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexVector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = Complex(normal(rng), normal(rng));
  EigenEstimate second = detail::power_iteration(H, start, max_iterations);

  EigenEstimate out = first.value >= second.value ? first : second;
  out.converged = first.converged && second.converged;
  out.iterations = first.iterations + second.iterations;
  return out;
}

/// lambda_max(B^H B), computed on whichever Gram matrix is smaller.
inline double gram_largest_eigenvalue(const ResponseMatrix& B,
                                      std::uint64_t seed = 0) {
  const Eigen::MatrixXcd gram =
      B.rows() < B.cols() ? Eigen::MatrixXcd(B * B.adjoint())
                          : Eigen::MatrixXcd(B.adjoint() * B);
  // Symmetrize away rounding so the Hermitian check sees an exact match.
  const Eigen::MatrixXcd H = 0.5 * (gram + gram.adjoint());
  return largest_eigenvalue(H, seed).value;
}

/// Minimum-norm least-squares solution B^+ g; singular values below 1e-10
/// times the largest are treated as zero.
inline ComplexVector min_norm_solution(const ResponseMatrix& B,
                                       const ComplexVector& g) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  return svd.solve(g);
}

/// conj-scaled (or plain) gradient direction for one block, normalized by
/// lambda_max = lambda_max(|s|^2 B^H B).
inline ComplexVector descent_direction(const ComplexVector& omega, Complex s,
                                       const ResponseMatrix& B,
                                       const ComplexVector& g,
                                       double lambda_max,
                                       bool conjugate_scaling) {
  if (!(lambda_max > 0.0)) {
    throw InvalidArgumentError("gradient step needs lambda_max > 0");
  }
  if (B.cols() != omega.size() || B.rows() != g.size()) {
    throw InvalidArgumentError("gradient step: dimension mismatch");
  }
  const Complex c = conjugate_scaling ? std::conj(s) : Complex(1.0, 0.0);
  return (c / lambda_max) * (B.adjoint() * (g - s * (B * omega)));
}

/// Unconstrained update w_u = w + beta * c * B^H (g - s B w) / lambda_max.
inline ComplexVector gradient_step(const ComplexVector& omega_prev, Complex s,
                                   const ResponseMatrix& B,
                                   const ComplexVector& g, double beta,
                                   double lambda_max, bool conjugate_scaling) {
  return omega_prev +
         beta * descent_direction(omega_prev, s, B, g, lambda_max,
                                  conjugate_scaling);
}

namespace detail {

inline Complex combined_scale(std::span<const CutProblem> problems,
                              const std::vector<ComplexVector>& Bw,
                              ScaleMode mode) {
  Complex num(0.0, 0.0);
  double den = 0.0;
  Complex sum(0.0, 0.0);
  for (std::size_t c = 0; c < problems.size(); ++c) {
    const Complex n = Bw[c].dot(problems[c].g);
    const double d = Bw[c].squaredNorm();
    if (mode == ScaleMode::stacked) {
      num += n;
      den += d;
    } else {
      if (d == 0.0) throw SolverError("a cut has B * omega equal to zero");
      sum += n / d;
    }
  }
  if (mode == ScaleMode::sum_of_ratios) return sum;
  if (den == 0.0) throw SolverError("B * omega is zero on every cut");
  return num / den;
}

}  // namespace detail

/// Projected gradient descent over all blocks jointly. With a single block
/// this is the full-grid solver; with one block per (reference, coordinate)
/// cut it is the reduced-complexity solver.
inline SynthesisResult synthesize_blocks(std::span<const CutProblem> problems,
                                         const LookupTable& table,
                                         const SolverOptions& opts) {
  opts.validate();
  if (problems.empty()) throw InvalidArgumentError("no cut problems given");
  const Eigen::Index M = problems.front().B.cols();
  bool any_target = false;
  for (const auto& p : problems) {
    if (p.B.cols() != M || p.B.rows() != p.g.size() || p.B.rows() == 0) {
      throw InvalidArgumentError("inconsistent cut problem dimensions");
    }
    any_target = any_target || p.g.cwiseAbs().maxCoeff() > 0.0;
  }
  if (!any_target) throw SolverError("target pattern is identically zero");

  std::vector<double> lambdas;
  lambdas.reserve(problems.size());
  ComplexVector unconstrained = ComplexVector::Zero(M);
  for (const auto& p : problems) {
    lambdas.push_back(gram_largest_eigenvalue(p.B, opts.seed));
    unconstrained += min_norm_solution(p.B, p.g);
  }

  RISConfiguration current = project(unconstrained, table);
  SynthesisResult result;
  result.objective = std::numeric_limits<double>::infinity();
  std::vector<ComplexVector> Bw(problems.size());
  double previous = 0.0;

  for (int r = 0; r < opts.max_iterations; ++r) {
    for (std::size_t c = 0; c < problems.size(); ++c) {
      Bw[c] = problems[c].B * current.omega;
    }
    const Complex s = detail::combined_scale(problems, Bw, opts.scale_mode);
    double objective = 0.0;
    for (std::size_t c = 0; c < problems.size(); ++c) {
      objective += (problems[c].g - s * Bw[c]).squaredNorm();
    }
    result.objective_trace.push_back(objective);
    result.scale_trace.push_back(s);
    if (objective < result.objective) {
      result.objective = objective;
      result.s = s;
      result.config = current;
    }
    if (objective == 0.0 ||
        (r > 0 && std::abs(previous - objective) <= opts.rel_tolerance * previous)) {
      result.converged = true;
      break;
    }
    previous = objective;
    if (r + 1 == opts.max_iterations) break;
    const double s2 = std::norm(s);
    if (s2 == 0.0) break;  // no descent direction is defined

    ComplexVector step = ComplexVector::Zero(M);
    for (std::size_t c = 0; c < problems.size(); ++c) {
      step += descent_direction(current.omega, s, problems[c].B, problems[c].g,
                                s2 * lambdas[c], opts.conjugate_scaling);
    }
    current = project(current.omega + opts.beta * step, table);
  }
  result.iterations_run = static_cast<int>(result.objective_trace.size());
  return result;
}

/// Full-grid solver for min |g - s B w|^2 over w in table^M.
inline SynthesisResult synthesize_full(const ResponseMatrix& B,
                                       const ComplexVector& g,
                                       const LookupTable& table,
                                       const SolverOptions& opts) {
  const CutProblem block{B, g};
  return synthesize_blocks(std::span<const CutProblem>(&block, 1), table, opts);
}

/// Reduced-complexity solver over spherical cuts.
inline SynthesisResult synthesize_cuts(std::span<const CutProblem> cuts,
                                       const LookupTable& table,
                                       const SolverOptions& opts) {
  return synthesize_blocks(cuts, table, opts);
}

/// Builds one block per (reference point, coordinate) with target samples
/// g = B * weight.
inline std::vector<CutProblem> make_cut_problems(const ArrayGeometry& geom,
                                                 const Position3& tx,
                                                 const ComplexVector& weight,
                                                 const CutSpec& cut) {
  std::vector<CutProblem> problems;
  const auto refs = cut_points(cut, geom.phase_center);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (auto coord : {CutCoordinate::rho, CutCoordinate::theta, CutCoordinate::phi}) {
      CutProblem p;
      p.B = response_matrix(geom, refs[i].along(coord), tx);
      p.g = p.B * weight;
      p.reference = i;
      p.coordinate = coord;
      problems.push_back(std::move(p));
    }
  }
  return problems;
}

/// Summed objective of a configuration and scale over a set of blocks.
inline double total_objective(std::span<const CutProblem> problems, Complex s,
                              const ComplexVector& omega) {
  double total = 0.0;
  for (const auto& p : problems) total += residual_objective(p.B, p.g, s, omega);
  return total;
}

}  // namespace risbeam
