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
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "risbeam/array_response.hpp"
#include "risbeam/beam_targets.hpp"
#include "risbeam/csv.hpp"
#include "risbeam/errors.hpp"
#include "risbeam/geometry.hpp"
#include "risbeam/lookup_tables.hpp"
#include "risbeam/pattern_eval.hpp"
#include "risbeam/synthesis.hpp"

namespace risbeam::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSolverError = 3,
  kIoError = 4,
  kInfeasible = 5,
};

/// Invalid or missing configuration field; the message starts with the
/// dotted path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct TableRef {
  std::optional<std::string> id;
  int levels = 0;
  std::optional<std::string> path;
  double amplitude_scale = 1.0;
};

struct AngleAxis {
  double start_deg = 0.0;
  double stop_deg = 0.0;
};

struct CutConfig {
  double step_deg = 0.5;
  AngleAxis theta{0.0, 180.0};
  AngleAxis phi{-90.0, 90.0};
  std::vector<double> rho_set;                  // empty: reference radii
  std::vector<Position3> reference_points;      // empty: desired points
};

struct GridConfig {
  double step_deg = 1.0;
  AngleAxis theta{0.0, 180.0};
  AngleAxis phi{-90.0, 90.0};
  std::optional<double> rho;                    // default: |p_des,1 - center|
  double exclusion_deg = 5.0;
};

enum class SolverMode { cuts, full };

struct Scenario {
  double frequency_hz = 5.15e9;
  Position3 ris_center{0.0, 0.0, 0.0};
  int rows = 32;
  int cols = 32;
  double spacing_wavelengths = 0.5;
  Position3 tx{5.0, 5.0, 0.0};
  BeamSpec beam;
  TableRef table;
  CutConfig cuts;
  GridConfig grid;
  SolverMode mode = SolverMode::cuts;
  SolverOptions solver;
  std::string output_prefix = "risbeam";
  /// Directory relative table paths are resolved against.
  fs::path base_dir = ".";
};

namespace detail {

inline const Json* child(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline int read_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

inline Position3 read_position(const Json& j, const std::string& path) {
  if (j.is_array() && j.size() == 3) {
    return {read_number(j[0], path + "[0]"), read_number(j[1], path + "[1]"),
            read_number(j[2], path + "[2]")};
  }
  if (j.is_object() && j.contains("rho")) {
    const double rho = read_number(j.at("rho"), path + ".rho");
    const double theta = read_number(j.value("theta_deg", Json(0.0)), path + ".theta_deg");
    const double phi = read_number(j.value("phi_deg", Json(0.0)), path + ".phi_deg");
    if (!(rho > 0.0)) throw ConfigError(path + ".rho", "must be > 0");
    return spherical_to_cartesian({rho, deg2rad(theta), deg2rad(phi)}, {});
  }
  throw ConfigError(path, "expected [x, y, z] or {rho, theta_deg, phi_deg}");
}

inline AngleAxis read_range(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [start, stop]");
  AngleAxis a{read_number(j[0], path + "[0]"), read_number(j[1], path + "[1]")};
  if (!(a.stop_deg >= a.start_deg)) throw ConfigError(path, "stop must be >= start");
  return a;
}

}  // namespace detail

/// Parses and validates a scenario document. Scenario positions are
/// absolute; spherical desired points are taken about the RIS center.
inline Scenario parse_scenario(const Json& doc, fs::path base_dir = ".") {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  Scenario sc;
  sc.base_dir = std::move(base_dir);

  if (auto* f = child(doc, "frequency_hz")) sc.frequency_hz = read_number(*f, "frequency_hz");
  if (!(sc.frequency_hz > 0.0)) throw ConfigError("frequency_hz", "must be > 0");

  if (auto* ris = child(doc, "ris")) {
    if (!ris->is_object()) throw ConfigError("ris", "expected an object");
    if (auto* c = child(*ris, "center")) sc.ris_center = read_position(*c, "ris.center");
    if (auto* r = child(*ris, "rows")) sc.rows = read_int(*r, "ris.rows");
    if (auto* c = child(*ris, "cols")) sc.cols = read_int(*c, "ris.cols");
    if (auto* s = child(*ris, "spacing_wavelengths")) {
      sc.spacing_wavelengths = read_number(*s, "ris.spacing_wavelengths");
    }
  }
  if (sc.rows < 1) throw ConfigError("ris.rows", "must be >= 1");
  if (sc.cols < 1) throw ConfigError("ris.cols", "must be >= 1");
  if (!(sc.spacing_wavelengths > 0.0)) {
    throw ConfigError("ris.spacing_wavelengths", "must be > 0");
  }

  if (auto* t = child(doc, "tx")) sc.tx = read_position(*t, "tx");
  sc.beam.tx = sc.tx;

  const Json* beam = child(doc, "beam");
  if (!beam || !beam->is_object()) throw ConfigError("beam", "required object missing");
  try {
    sc.beam.kind = parse_beam_kind(beam->value("kind", std::string("directional")));
  } catch (const InvalidArgumentError& e) {
    throw ConfigError("beam.kind", e.what());
  } catch (const Json::type_error&) {
    throw ConfigError("beam.kind", "expected a string");
  }
  const Json* pts = child(*beam, "desired_points");
  if (!pts || !pts->is_array() || pts->empty()) {
    throw ConfigError("beam.desired_points", "expected a nonempty array of points");
  }
  for (std::size_t i = 0; i < pts->size(); ++i) {
    Position3 p = read_position((*pts)[i], "beam.desired_points[" + std::to_string(i) + "]");
    if (!(*pts)[i].is_array()) p = p + sc.ris_center;
    sc.beam.desired_points.push_back(p);
  }
  if (sc.beam.kind != BeamKind::multibeam && sc.beam.desired_points.size() != 1) {
    throw ConfigError("beam.desired_points",
                      std::string(to_string(sc.beam.kind)) + " beams take exactly one point");
  }
  if (auto* v = child(*beam, "derivative_var")) {
    if (!v->is_string()) throw ConfigError("beam.derivative_var", "expected a string");
    try {
      sc.beam.derivative_var = parse_derivative_variable(v->get<std::string>());
    } catch (const InvalidArgumentError& e) {
      throw ConfigError("beam.derivative_var", e.what());
    }
  }

  const Json* table = child(doc, "table");
  if (!table || !table->is_object()) throw ConfigError("table", "required object missing");
  if (auto* id = child(*table, "id")) {
    if (!id->is_string()) throw ConfigError("table.id", "expected a string");
    sc.table.id = id->get<std::string>();
    try {
      const TableId tid = parse_table_id(*sc.table.id);
      if (table_is_parametric(tid)) {
        const Json* lv = child(*table, "levels");
        if (!lv) throw ConfigError("table.levels", "required for " + *sc.table.id);
        sc.table.levels = read_int(*lv, "table.levels");
        if (sc.table.levels < 2) throw ConfigError("table.levels", "must be >= 2");
      }
    } catch (const TableError& e) {
      throw ConfigError("table.id", e.what());
    }
  }
  if (auto* p = child(*table, "path")) {
    if (!p->is_string()) throw ConfigError("table.path", "expected a string");
    sc.table.path = p->get<std::string>();
  }
  if (sc.table.id.has_value() == sc.table.path.has_value()) {
    throw ConfigError("table", "give exactly one of 'id' or 'path'");
  }
  if (auto* a = child(*table, "amplitude_scale")) {
    sc.table.amplitude_scale = read_number(*a, "table.amplitude_scale");
    if (!(sc.table.amplitude_scale > 0.0)) {
      throw ConfigError("table.amplitude_scale", "must be > 0");
    }
  }

  if (auto* cuts = child(doc, "cuts")) {
    if (!cuts->is_object()) throw ConfigError("cuts", "expected an object");
    if (auto* s = child(*cuts, "step_deg")) sc.cuts.step_deg = read_number(*s, "cuts.step_deg");
    if (auto* t = child(*cuts, "theta_range_deg")) sc.cuts.theta = read_range(*t, "cuts.theta_range_deg");
    if (auto* p = child(*cuts, "phi_range_deg")) sc.cuts.phi = read_range(*p, "cuts.phi_range_deg");
    if (auto* r = child(*cuts, "rho_set")) {
      if (!r->is_array() || r->empty()) throw ConfigError("cuts.rho_set", "expected a nonempty array");
      for (std::size_t i = 0; i < r->size(); ++i) {
        const std::string path = "cuts.rho_set[" + std::to_string(i) + "]";
        const double v = read_number((*r)[i], path);
        if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
        if (!sc.cuts.rho_set.empty() && !(v > sc.cuts.rho_set.back())) {
          throw ConfigError(path, "rho_set must be strictly increasing");
        }
        sc.cuts.rho_set.push_back(v);
      }
    }
    if (auto* refs = child(*cuts, "reference_points")) {
      if (!refs->is_array() || refs->empty()) {
        throw ConfigError("cuts.reference_points", "expected a nonempty array");
      }
      for (std::size_t i = 0; i < refs->size(); ++i) {
        Position3 p = read_position((*refs)[i], "cuts.reference_points[" + std::to_string(i) + "]");
        if (!(*refs)[i].is_array()) p = p + sc.ris_center;
        sc.cuts.reference_points.push_back(p);
      }
    }
  }
  if (!(sc.cuts.step_deg > 0.0)) throw ConfigError("cuts.step_deg", "must be > 0");

  if (auto* grid = child(doc, "grid")) {
    if (!grid->is_object()) throw ConfigError("grid", "expected an object");
    if (auto* s = child(*grid, "step_deg")) sc.grid.step_deg = read_number(*s, "grid.step_deg");
    if (auto* t = child(*grid, "theta_range_deg")) sc.grid.theta = read_range(*t, "grid.theta_range_deg");
    if (auto* p = child(*grid, "phi_range_deg")) sc.grid.phi = read_range(*p, "grid.phi_range_deg");
    if (auto* r = child(*grid, "rho")) {
      sc.grid.rho = read_number(*r, "grid.rho");
      if (!(*sc.grid.rho > 0.0)) throw ConfigError("grid.rho", "must be > 0");
    }
    if (auto* e = child(*grid, "exclusion_deg")) {
      sc.grid.exclusion_deg = read_number(*e, "grid.exclusion_deg");
      if (!(sc.grid.exclusion_deg >= 0.0)) throw ConfigError("grid.exclusion_deg", "must be >= 0");
    }
  }
  if (!(sc.grid.step_deg > 0.0)) throw ConfigError("grid.step_deg", "must be > 0");

  if (auto* solver = child(doc, "solver")) {
    if (!solver->is_object()) throw ConfigError("solver", "expected an object");
    if (auto* m = child(*solver, "mode")) {
      const std::string mode = m->is_string() ? m->get<std::string>() : "";
      if (mode == "cuts") sc.mode = SolverMode::cuts;
      else if (mode == "full") sc.mode = SolverMode::full;
      else throw ConfigError("solver.mode", "expected \"cuts\" or \"full\"");
    }
    if (auto* b = child(*solver, "beta")) sc.solver.beta = read_number(*b, "solver.beta");
    if (auto* it = child(*solver, "max_iterations")) {
      sc.solver.max_iterations = read_int(*it, "solver.max_iterations");
    }
    if (auto* t = child(*solver, "rel_tolerance")) {
      sc.solver.rel_tolerance = read_number(*t, "solver.rel_tolerance");
    }
    if (auto* c = child(*solver, "conjugate_scaling")) {
      if (!c->is_boolean()) throw ConfigError("solver.conjugate_scaling", "expected true or false");
      sc.solver.conjugate_scaling = c->get<bool>();
    }
    if (auto* m = child(*solver, "scale_mode")) {
      try {
        sc.solver.scale_mode = parse_scale_mode(m->is_string() ? m->get<std::string>() : "");
      } catch (const InvalidArgumentError&) {
        throw ConfigError("solver.scale_mode", "expected \"stacked\" or \"sum_of_ratios\"");
      }
    }
    if (auto* s = child(*solver, "seed")) {
      if (!s->is_number_unsigned()) throw ConfigError("solver.seed", "expected a nonnegative integer");
      sc.solver.seed = s->get<std::uint64_t>();
    }
  }
  if (!(sc.solver.beta > 0.0 && sc.solver.beta < 1.0)) {
    throw ConfigError("solver.beta", "must lie in the open interval (0, 1), got " +
                                         csv::format_double(sc.solver.beta));
  }
  if (sc.solver.max_iterations < 1) throw ConfigError("solver.max_iterations", "must be >= 1");
  if (!(sc.solver.rel_tolerance > 0.0)) throw ConfigError("solver.rel_tolerance", "must be > 0");

  if (auto* out = child(doc, "output")) {
    if (auto* p = child(*out, "prefix")) {
      if (!p->is_string()) throw ConfigError("output.prefix", "expected a string");
      sc.output_prefix = p->get<std::string>();
    }
  }
  return sc;
}

inline Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

inline ArrayGeometry make_geometry(const Scenario& sc) {
  const double lambda = wavelength_for(sc.frequency_hz);
  return planar_array(sc.rows, sc.cols, sc.spacing_wavelengths * lambda,
                      sc.ris_center, lambda);
}

inline LookupTable make_table(const Scenario& sc) {
  LookupTable table = [&] {
    if (sc.table.id) return builtin_table(*sc.table.id, sc.table.levels);
    fs::path p = *sc.table.path;
    if (p.is_relative()) p = sc.base_dir / p;
    return load_table(p.string());
  }();
  return scaled(table, sc.table.amplitude_scale);
}

inline CutSpec make_cut_spec(const Scenario& sc) {
  const auto& refs = sc.cuts.reference_points.empty() ? sc.beam.desired_points
                                                      : sc.cuts.reference_points;
  CutSpec cut = default_cuts(refs, sc.ris_center, sc.cuts.step_deg);
  if (!sc.cuts.rho_set.empty()) cut.rho_set = sc.cuts.rho_set;
  cut.theta_set = uniform_axis(sc.cuts.theta.start_deg, sc.cuts.theta.stop_deg, sc.cuts.step_deg);
  cut.phi_set = uniform_axis(sc.cuts.phi.start_deg, sc.cuts.phi.stop_deg, sc.cuts.step_deg);
  for (auto& t : cut.theta_set) t = deg2rad(t);
  for (auto& p : cut.phi_set) p = deg2rad(p);
  return cut;
}

/// Cut coordinate the summary metrics are read from: the derivative
/// coordinate for derivative beams, elevation otherwise.
inline CutCoordinate metrics_coordinate(const BeamSpec& beam) {
  if (beam.kind == BeamKind::derivative) {
    if (beam.derivative_var == DerivativeVariable::theta) return CutCoordinate::theta;
    if (beam.derivative_var == DerivativeVariable::rho) return CutCoordinate::rho;
  }
  return CutCoordinate::phi;
}

struct ExportedCut {
  std::size_t reference = 0;
  PatternCut cut;
};

/// Everything produced by one synthesis run.
struct SynthesisRun {
  ArrayGeometry geometry;
  LookupTable table;
  ComplexVector weight;
  CutSpec cuts;
  SynthesisResult result;
  std::vector<ExportedCut> exported;
  PatternMetrics metrics;
  CutCoordinate metrics_cut = CutCoordinate::phi;
};

inline std::vector<CutProblem> make_problems(const Scenario& sc,
                                             const ArrayGeometry& geom,
                                             const ComplexVector& weight,
                                             const CutSpec& cut) {
  if (sc.mode == SolverMode::cuts) return make_cut_problems(geom, sc.tx, weight, cut);
  const std::size_t rows = cut.rho_set.size() * cut.theta_set.size() * cut.phi_set.size();
  if (rows * geom.size() > std::size_t{200'000'000}) {
    throw ConfigError("solver.mode", "full grid too large (" + std::to_string(rows) +
                                         " points x " + std::to_string(geom.size()) +
                                         " elements); use \"cuts\"");
  }
  std::vector<Position3> points;
  points.reserve(rows);
  for (double rho : cut.rho_set)
    for (double t : cut.theta_set)
      for (double p : cut.phi_set)
        points.push_back(spherical_to_cartesian({rho, t, p}, geom.phase_center));
  CutProblem block;
  block.B = response_matrix(geom, points, sc.tx);
  block.g = block.B * weight;
  return {std::move(block)};
}

inline SynthesisRun run_scenario(const Scenario& sc) {
  SynthesisRun run{make_geometry(sc), make_table(sc), {}, {}, {}, {}, {}, {}};
  run.weight = target_weight(sc.beam, run.geometry);
  run.cuts = make_cut_spec(sc);
  const auto problems = make_problems(sc, run.geometry, run.weight, run.cuts);
  run.result = synthesize_blocks(problems, run.table, sc.solver);

  run.metrics_cut = metrics_coordinate(sc.beam);
  for (std::size_t i = 0; i < run.cuts.reference_points.size(); ++i) {
    const SphericalPoint& ref = run.cuts.reference_points[i];
    for (auto coord : {CutCoordinate::rho, CutCoordinate::theta, CutCoordinate::phi}) {
      const std::vector<double>& axis = coord == CutCoordinate::rho     ? run.cuts.rho_set
                                        : coord == CutCoordinate::theta ? run.cuts.theta_set
                                                                        : run.cuts.phi_set;
      run.exported.push_back({i, evaluate_cut(run.result.config.omega, run.geometry,
                                              sc.tx, ref, coord, axis)});
    }
  }
  for (const auto& e : run.exported) {
    if (e.reference != 0 || e.cut.coordinate != run.metrics_cut) continue;
    if (e.cut.abscissa.size() < 2) break;
    std::optional<double> desired;
    if (sc.beam.kind == BeamKind::derivative) {
      const SphericalPoint& ref = run.cuts.reference_points[0];
      desired = run.metrics_cut == CutCoordinate::rho     ? ref.rho
                : run.metrics_cut == CutCoordinate::theta ? ref.theta
                                                          : ref.phi;
    }
    run.metrics = metrics(e.cut, desired);
  }
  return run;
}

// ---------------------------------------------------------------- output

inline std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

inline void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string cut_file_stem(const std::string& prefix, CutCoordinate c,
                                 std::size_t reference, std::size_t references) {
  std::string s = prefix + "_cut_" + std::string(to_string(c));
  if (references > 1) s += "_" + std::to_string(reference + 1);
  return s;
}

/// Abscissa in file units: degrees for angles, meters for rho.
inline double file_coordinate(CutCoordinate c, double v) {
  return c == CutCoordinate::rho ? v : rad2deg(v);
}

inline void write_omega(std::ostream& out, const RISConfiguration& config) {
  out << "m,re,im,table_index\n";
  for (Eigen::Index m = 0; m < config.omega.size(); ++m) {
    out << m << ',' << csv::format_double(config.omega[m].real()) << ','
        << csv::format_double(config.omega[m].imag()) << ','
        << config.indices[static_cast<std::size_t>(m)] << '\n';
  }
}

inline void write_trace(std::ostream& out, const SynthesisResult& r) {
  out << "iter,objective,s_re,s_im\n";
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    out << i << ',' << csv::format_double(r.objective_trace[i]) << ','
        << csv::format_double(r.scale_trace[i].real()) << ','
        << csv::format_double(r.scale_trace[i].imag()) << '\n';
  }
}

inline void write_cut(std::ostream& out, const PatternCut& cut) {
  out << "coord_deg_or_m,mag_db,re,im\n";
  for (std::size_t k = 0; k < cut.abscissa.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << csv::format_double(file_coordinate(cut.coordinate, cut.abscissa[k])) << ','
        << csv::format_double(cut.magnitude_db[k]) << ','
        << csv::format_double(cut.samples[i].real()) << ','
        << csv::format_double(cut.samples[i].imag()) << '\n';
  }
}

inline void write_grid(std::ostream& out, const PatternGrid& grid) {
  out << "theta_deg,phi_deg,mag_db\n";
  for (std::size_t i = 0; i < grid.theta_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.phi_axis.size(); ++j) {
      out << csv::format_double(rad2deg(grid.theta_axis[i])) << ','
          << csv::format_double(rad2deg(grid.phi_axis[j])) << ','
          << csv::format_double(grid.magnitude_db(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j)))
          << '\n';
    }
  }
}

inline Json number_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

/// PatternMetrics as flat JSON; locations are converted with `to_file`.
template <typename Convert>
Json metrics_json(const PatternMetrics& m, Convert to_file) {
  Json j;
  j["peak_db"] = m.peak_db;
  Json loc = Json::array();
  for (double v : m.peak_location) loc.push_back(to_file(v));
  j["peak_location"] = loc;
  j["null_depth_db"] = number_or_null(m.null_depth_db);
  j["secondary_peak_db"] = number_or_null(m.secondary_peak_db);
  Json sec = Json::array();
  for (double v : m.secondary_peak_location) sec.push_back(to_file(v));
  j["secondary_peak_location"] = sec;
  return j;
}

inline void write_json(const fs::path& path, const Json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  close_output(out, path);
}

inline void write_cut_plot(const fs::path& path, const std::string& csv_name,
                           CutCoordinate c) {
  auto out = open_output(path);
  out << "# gnuplot script for " << csv_name << "\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set grid\n"
      << "set xlabel '" << to_string(c) << (c == CutCoordinate::rho ? " [m]" : " [deg]") << "'\n"
      << "set ylabel '|G| [dB]'\n"
      << "plot '" << csv_name << "' using 1:2 with lines title 'realized'\n";
  close_output(out, path);
}

inline void write_grid_plot(const fs::path& path, const std::string& csv_name) {
  auto out = open_output(path);
  out << "# gnuplot script for " << csv_name << "\n"
      << "set datafile separator ','\n"
      << "set view map\n"
      << "set xlabel 'phi [deg]'\n"
      << "set ylabel 'theta [deg]'\n"
      << "set cblabel '|G| [dB]'\n"
      << "splot '" << csv_name << "' using 2:1:3 skip 1 with image notitle\n";
  close_output(out, path);
}

inline std::string file_name(const fs::path& p) { return p.filename().string(); }

/// Writes omega, trace, cut CSVs (with plot scripts) and metrics JSON.
inline std::vector<fs::path> write_synthesis_outputs(const SynthesisRun& run,
                                                     const std::string& prefix) {
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& p, auto&& writer) {
    auto out = open_output(p);
    writer(out);
    close_output(out, p);
    written.push_back(p);
  };
  emit(prefix + "_omega.csv", [&](std::ostream& o) { write_omega(o, run.result.config); });
  emit(prefix + "_trace.csv", [&](std::ostream& o) { write_trace(o, run.result); });
  const std::size_t refs = run.cuts.reference_points.size();
  for (const auto& e : run.exported) {
    const std::string stem = cut_file_stem(prefix, e.cut.coordinate, e.reference, refs);
    emit(stem + ".csv", [&](std::ostream& o) { write_cut(o, e.cut); });
    write_cut_plot(stem + ".gp", file_name(stem + ".csv"), e.cut.coordinate);
    written.push_back(stem + ".gp");
  }
  const CutCoordinate mc = run.metrics_cut;
  Json j = metrics_json(run.metrics, [&](double v) { return file_coordinate(mc, v); });
  j["metrics_source"] = file_name(cut_file_stem(prefix, mc, 0, refs) + ".csv");
  j["objective"] = run.result.objective;
  j["s_re"] = run.result.s.real();
  j["s_im"] = run.result.s.imag();
  j["iterations_run"] = run.result.iterations_run;
  j["converged"] = run.result.converged;
  j["table"] = run.table.name();
  write_json(prefix + "_metrics.json", j);
  written.push_back(prefix + "_metrics.json");
  return written;
}

// ----------------------------------------------------------------- omega io

/// Reads complex values from `m,re,im[,table_index]` or `re,im` CSV, with an
/// optional header line.
inline ComplexVector read_complex_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<Complex> values;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = csv::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto parts = csv::split(line);
    double first = 0.0;
    if (!csv::parse_double(parts[0], first)) {
      if (values.empty()) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(line_no), "malformed number");
    }
    double re = 0.0, im = 0.0;
    bool ok = false;
    if (parts.size() == 2) {
      ok = csv::parse_double(parts[0], re) && csv::parse_double(parts[1], im);
    } else if (parts.size() == 3 || parts.size() == 4) {
      ok = csv::parse_double(parts[1], re) && csv::parse_double(parts[2], im);
    }
    if (!ok) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no),
                        "expected re,im or m,re,im[,table_index]");
    }
    values.emplace_back(re, im);
  }
  if (values.empty()) throw ConfigError(path.string(), "no complex values found");
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

/// Indices of entries that are not bit-identical to a table member.
inline std::vector<std::size_t> infeasible_entries(const ComplexVector& omega,
                                                   const LookupTable& table) {
  std::vector<std::size_t> bad;
  for (Eigen::Index m = 0; m < omega.size(); ++m) {
    const auto& c = table.coefficients();
    if (std::find(c.begin(), c.end(), omega[m]) == c.end()) {
      bad.push_back(static_cast<std::size_t>(m));
    }
  }
  return bad;
}

// ----------------------------------------------------------------- commands

struct CommonFlags {
  std::optional<std::string> out_prefix;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const TableError& e) {
    err << "table error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const DegeneratePointError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgumentError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

inline Scenario scenario_with_flags(const fs::path& config, const CommonFlags& flags) {
  Scenario sc = load_scenario(config);
  if (flags.out_prefix) sc.output_prefix = *flags.out_prefix;
  if (flags.seed) sc.solver.seed = *flags.seed;
  return sc;
}

inline int run_synthesize(const fs::path& config, const CommonFlags& flags,
                          std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = scenario_with_flags(config, flags);
    const SynthesisRun run = run_scenario(sc);
    write_synthesis_outputs(run, sc.output_prefix);
    if (!flags.quiet) {
      log << "table " << run.table.name() << ", M = " << run.geometry.size()
          << ", iterations " << run.result.iterations_run
          << (run.result.converged ? " (converged)" : "") << '\n'
          << "objective " << csv::format_double(run.result.objective) << '\n'
          << "peak " << csv::format_double(run.metrics.peak_db) << " dB\n"
          << "outputs " << sc.output_prefix << "_*\n";
    }
    return int{kOk};
  });
}

struct GridFlags {
  std::optional<double> step_deg;
  bool check_feasible = false;
};

inline PatternGrid grid_for(const Scenario& sc, const ArrayGeometry& geom,
                            const ComplexVector& omega) {
  const double rho = sc.grid.rho ? *sc.grid.rho
                                 : distance(sc.beam.desired_points.front(), sc.ris_center);
  auto axis = [&](const AngleAxis& a) {
    auto v = uniform_axis(a.start_deg, a.stop_deg, sc.grid.step_deg);
    for (auto& x : v) x = deg2rad(x);
    return v;
  };
  return evaluate_grid(omega, geom, sc.tx, rho, axis(sc.grid.theta), axis(sc.grid.phi));
}

inline int run_evaluate(const fs::path& omega_path, const fs::path& config,
                        const CommonFlags& flags, const GridFlags& grid_flags,
                        std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    Scenario sc = scenario_with_flags(config, flags);
    if (grid_flags.step_deg) {
      if (!(*grid_flags.step_deg > 0.0)) throw ConfigError("--grid-step", "must be > 0");
      sc.grid.step_deg = *grid_flags.step_deg;
    }
    const ArrayGeometry geom = make_geometry(sc);
    const ComplexVector omega = read_complex_csv(omega_path);
    if (omega.size() != static_cast<Eigen::Index>(geom.size())) {
      throw ConfigError(omega_path.string(), "has " + std::to_string(omega.size()) +
                                                 " entries, array has " +
                                                 std::to_string(geom.size()));
    }
    if (grid_flags.check_feasible) {
      const auto bad = infeasible_entries(omega, make_table(sc));
      if (!bad.empty()) {
        err << "infeasible entries:";
        for (auto m : bad) err << ' ' << m;
        err << '\n';
        return int{kInfeasible};
      }
    }
    const PatternGrid grid = grid_for(sc, geom, omega);
    const PatternMetrics m = metrics(grid, deg2rad(sc.grid.exclusion_deg));

    const std::string grid_csv = sc.output_prefix + "_grid.csv";
    {
      auto out = open_output(grid_csv);
      write_grid(out, grid);
      close_output(out, grid_csv);
    }
    write_grid_plot(sc.output_prefix + "_grid.gp", file_name(grid_csv));
    Json j = metrics_json(m, [](double v) { return rad2deg(v); });
    j["metrics_source"] = file_name(grid_csv);
    j["grid_rho_m"] = grid.rho;
    const SphericalPoint spec = specular_direction(sc.tx, sc.ris_center);
    j["specular_location"] = Json::array({rad2deg(spec.theta), rad2deg(spec.phi)});
    if (!m.secondary_peak_location.empty()) {
      j["secondary_to_specular_deg"] = rad2deg(angular_distance(
          m.secondary_peak_location[0], m.secondary_peak_location[1], spec.theta, spec.phi));
    } else {
      j["secondary_to_specular_deg"] = nullptr;
    }
    write_json(sc.output_prefix + "_metrics.json", j);
    if (!flags.quiet) {
      log << "grid " << grid.theta_axis.size() << " x " << grid.phi_axis.size()
          << ", peak " << csv::format_double(m.peak_db) << " dB, outputs "
          << sc.output_prefix << "_grid.csv\n";
    }
    return int{kOk};
  });
}

/// Resolves a table given as a built-in id (optionally `UNIT:64`) or a path.
inline LookupTable table_from_spec(const std::string& spec, int levels) {
  std::string id = spec;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    id = spec.substr(0, colon);
    double lv = 0.0;
    if (!csv::parse_double(spec.substr(colon + 1), lv) || lv != std::floor(lv)) {
      throw ConfigError("--table", "malformed level count in '" + spec + "'");
    }
    levels = static_cast<int>(lv);
  }
  try {
    const TableId tid = parse_table_id(id);
    if (table_is_parametric(tid) && levels < 2) {
      throw ConfigError("--levels", "required (>= 2) for table " + id);
    }
    return builtin_table(tid, levels);
  } catch (const TableError&) {
    if (!fs::exists(spec)) throw ConfigError("--table", "unknown table '" + spec + "'");
    return load_table(spec);
  }
}

inline int run_project(const fs::path& input, const std::string& table_spec, int levels,
                       const fs::path& output, const CommonFlags& flags,
                       std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const LookupTable table = table_from_spec(table_spec, levels);
    const RISConfiguration config = project(read_complex_csv(input), table);
    auto out = open_output(output);
    write_omega(out, config);
    close_output(out, output);
    if (!flags.quiet) {
      log << "projected " << config.omega.size() << " values onto " << table.name()
          << " -> " << output.string() << '\n';
    }
    return int{kOk};
  });
}

inline void list_tables(std::ostream& out) {
  out << "V       14 measured states of a 5.15 GHz prototype\n"
      << "K1      1-bit: +-0.891250938133746\n"
      << "K2      2-bit: 0.891250938133746 * {1, j, -1, -j}\n"
      << "UNIT    unit circle e^{j psi}, --levels uniform phases\n"
      << "SUNIT2  scaled-shifted circle 0.5 (1 + e^{j psi}), --levels phases\n";
}

inline int show_table(const std::string& spec, int levels, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&] {
    write_table(out, table_from_spec(spec, levels));
    return int{kOk};
  });
}

}  // namespace risbeam::cli
