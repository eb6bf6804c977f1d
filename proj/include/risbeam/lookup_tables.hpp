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
#include <complex>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "risbeam/array_response.hpp"
#include "risbeam/csv.hpp"
#include "risbeam/errors.hpp"

namespace risbeam {

inline constexpr double kModulusTolerance = 1e-9;

/// Finite set of admissible reflection coefficients shared by all elements.
class LookupTable {
 public:
  LookupTable(std::string name, std::vector<Complex> coefficients)
      : name_(std::move(name)), coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) throw TableError("lookup table is empty");
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
      const Complex c = coefficients_[i];
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw TableError("entry " + std::to_string(i) + " is not finite");
      }
      if (std::abs(c) > 1.0 + kModulusTolerance) {
        throw TableError("entry " + std::to_string(i) +
                         " has modulus above 1 (active element)");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (coefficients_[j] == c) {
          throw TableError("entry " + std::to_string(i) + " duplicates entry " +
                           std::to_string(j));
        }
      }
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<Complex>& coefficients() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }
  Complex operator[](std::size_t i) const { return coefficients_[i]; }

  /// Index of the nearest entry; the lowest index wins ties.
  std::size_t nearest(Complex v) const {
    std::size_t best = 0;
    double best_d = std::norm(v - coefficients_[0]);
    for (std::size_t i = 1; i < coefficients_.size(); ++i) {
      const double d = std::norm(v - coefficients_[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  friend bool operator==(const LookupTable&, const LookupTable&) = default;

 private:
  std::string name_;
  std::vector<Complex> coefficients_;
};

/// Configuration omega together with the table index of every entry.
struct RISConfiguration {
  ComplexVector omega;
  std::vector<std::size_t> indices;
};

enum class TableId { V, K1, K2, UNIT, SUNIT2 };

inline TableId parse_table_id(std::string_view s) {
  if (s == "V") return TableId::V;
  if (s == "K1") return TableId::K1;
  if (s == "K2") return TableId::K2;
  if (s == "UNIT") return TableId::UNIT;
  if (s == "SUNIT2") return TableId::SUNIT2;
  throw TableError("unknown table id '" + std::string(s) + "'");
}

inline bool table_is_parametric(TableId id) {
  return id == TableId::UNIT || id == TableId::SUNIT2;
}

namespace detail {

// Measured 14-state element response (5.15 GHz prototype).
inline const std::vector<Complex>& measured_set_v() {
  static const std::vector<Complex> v = {
      {0.705881663503301, 0.454874816836335},
      {0.614312562634405, 0.531271558748285},
      {0.475934107814557, 0.506942448025792},
      {0.312209976375841, 0.42259048294233},
      {0.111822453204272, 0.312651838583432},
      {-0.0913794808614622, -0.0208313626559627},
      {0.135183293840408, -0.446930997789427},
      {0.457051113855161, -0.537546263774266},
      {0.646418002339778, -0.46806616159338},
      {0.830757906262032, -0.357145071975791},
      {0.881458766139799, -0.254203355481816},
      {0.924391111031014, -0.207693362330688},
      {0.926939342567385, -0.162193617949656},
      {0.943816578371453, -0.114314640581941},
  };
  return v;
}

inline constexpr double kDiodeAmplitude = 0.891250938133746;

}  // namespace detail

/// Built-in tables. `levels` is used by UNIT (points e^{j psi}) and SUNIT2
/// (points 0.5 (1 + e^{j psi})), psi uniform on [0, 2 pi) starting at 0.
inline LookupTable builtin_table(TableId id, int levels = 0) {
  using detail::kDiodeAmplitude;
  switch (id) {
    case TableId::V:
      return LookupTable("V", detail::measured_set_v());
    case TableId::K1:
      return LookupTable("K1", {{kDiodeAmplitude, 0.0}, {-kDiodeAmplitude, 0.0}});
    case TableId::K2:
      return LookupTable("K2", {{kDiodeAmplitude, 0.0},
                                {0.0, kDiodeAmplitude},
                                {-kDiodeAmplitude, 0.0},
                                {0.0, -kDiodeAmplitude}});
    case TableId::UNIT:
    case TableId::SUNIT2: {
      if (levels < 2) throw TableError("parametric tables need levels >= 2");
      std::vector<Complex> c;
      c.reserve(static_cast<std::size_t>(levels));
      for (int k = 0; k < levels; ++k) {
        const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * k / levels);
        c.push_back(id == TableId::UNIT ? e : 0.5 * (1.0 + e));
      }
      return LookupTable((id == TableId::UNIT ? "UNIT" : "SUNIT2") +
                             std::to_string(levels),
                         std::move(c));
    }
  }
  throw TableError("unknown table id");
}

inline LookupTable builtin_table(std::string_view id, int levels = 0) {
  return builtin_table(parse_table_id(id), levels);
}

/// Same table with every entry multiplied by `factor`.
inline LookupTable scaled(const LookupTable& table, double factor) {
  if (factor == 1.0) return table;
  std::vector<Complex> c = table.coefficients();
  for (auto& v : c) v *= factor;
  return LookupTable(table.name(), std::move(c));
}

/// Reads `re,im` CSV: optional `re,im` header, `#` comments, blank lines.
inline LookupTable parse_table(std::istream& in, std::string name) {
  std::vector<Complex> coeffs;
  std::string raw;
  int line_no = 0;
  bool seen_data = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = csv::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!seen_data && line == "re,im") {
      seen_data = true;
      continue;
    }
    seen_data = true;
    const auto parts = csv::split(line);
    if (parts.size() != 2) {
      throw TableError("expected two comma-separated values", line_no);
    }
    double re = 0.0, im = 0.0;
    if (!csv::parse_double(parts[0], re) || !csv::parse_double(parts[1], im)) {
      throw TableError("malformed number", line_no);
    }
    const Complex c(re, im);
    if (std::abs(c) > 1.0 + kModulusTolerance) {
      throw TableError("coefficient modulus exceeds 1", line_no);
    }
    coeffs.push_back(c);
  }
  if (coeffs.empty()) throw TableError("lookup table is empty");
  return LookupTable(std::move(name), std::move(coeffs));
}

inline LookupTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lookup table '" + path + "'");
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  return parse_table(in, name);
}

inline void write_table(std::ostream& out, const LookupTable& table) {
  out << "re,im\n";
  for (const auto& c : table.coefficients()) {
    out << csv::format_double(c.real()) << ',' << csv::format_double(c.imag())
        << '\n';
  }
}

inline void save_table(const std::string& path, const LookupTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write lookup table '" + path + "'");
  write_table(out, table);
}

/// Element-wise nearest-point projection onto the table.
inline RISConfiguration project(const ComplexVector& in,
                                const LookupTable& table) {
  RISConfiguration out;
  out.omega.resize(in.size());
  out.indices.resize(static_cast<std::size_t>(in.size()));
  for (Eigen::Index m = 0; m < in.size(); ++m) {
    const std::size_t k = table.nearest(in[m]);
    out.indices[static_cast<std::size_t>(m)] = k;
    out.omega[m] = table[k];
  }
  return out;
}

}  // namespace risbeam
