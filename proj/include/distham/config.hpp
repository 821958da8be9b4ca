#pragma once

// Line-oriented system configs:
//
//   [system]       name, coordinates, q_ref, pivots, periodic
//   [parameters]   name = number
//   [metric]       row = e, e, ...   (n rows)  or  diag = e, ...
//   [potential]    V = e
//   [constraints]  row = e, ...      (k rows, may be absent)
//   [action:NAME]  generator_name = e, ...   (one per generator)
//   [chart:NAME]   coordinates, project, section, reference, action
//   [simulation]   t_final, dt, method, q, u
//
// '#' starts a comment. Chart projections see the coordinates and the
// momenta p_<coordinate>; sections and references see the reduced names.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "distham/dynamics.hpp"
#include "distham/expression.hpp"
#include "distham/reduction.hpp"

namespace distham {

struct SimulationSettings {
  double t_final = 1.0;
  double dt = 1e-3;
  Method method = Method::rk4;
  std::optional<Vector> q;
  std::optional<Vector> u;
};

struct SystemConfig {
  std::string source;  // path or "<string>"
  MechanicalSystem system;
  std::map<std::string, double> parameters;
  std::map<std::string, CotangentLiftedAction> actions;
  std::map<std::string, QuotientChart> charts;
  SimulationSettings simulation;
};

SystemConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Reads the file; a bare name that does not exist is looked up among the
/// bundled configs.
SystemConfig load_config(const std::string& path);

/// Directory holding the bundled configs.
std::string bundled_config_dir();

struct BundledConfig {
  std::string name;
  std::string path;
  std::string description;  // first comment line
};

std::vector<BundledConfig> bundled_configs();

/// Parse "a, b, c" into a vector of numbers; throws ArgumentError.
Vector parse_number_list(const std::string& text, const std::string& what);

/// Chart from the config, else a built-in chart of that name.
QuotientChart find_chart(const SystemConfig& cfg, const std::string& name);

}  // namespace distham
