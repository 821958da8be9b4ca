#include "distham/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "distham/calculus.hpp"
#include "distham/config.hpp"
#include "distham/hamilton_jacobi.hpp"
#include "distham/reduction.hpp"

namespace distham::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kReportTol = 1e-8;
constexpr double kPiRelatedTol = 1e-10;

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

Vector wrapped(const MechanicalSystem& sys, const Vector& q) {
  Vector w = q;
  for (int i = 0; i < sys.n; ++i)
    if (static_cast<std::size_t>(i) < sys.periodic.size() && sys.periodic[i])
      w[i] = wrap_angle(q[i]);
  return w;
}

bool any_periodic(const MechanicalSystem& sys) {
  for (bool b : sys.periodic)
    if (b) return true;
  return false;
}

Vector sized(const std::string& text, int n, const std::string& what) {
  Vector v = parse_number_list(text, what);
  if (v.size() != n)
    throw ArgumentError(what + " needs " + std::to_string(n) + " values, got " +
                        std::to_string(v.size()));
  return v;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
  return s;
}

std::vector<ExprPtr> parse_list_arg(const std::string& text, const Scope& scope,
                                    const std::string& what) {
  std::vector<ExprPtr> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      const std::string piece = text.substr(start, i - start);
      try {
        out.push_back(parse_expression(piece, scope));
      } catch (const ConfigError& e) {
        const std::size_t at = start + e.offset().value_or(0);
        std::string msg = e.what();
        if (auto p = msg.rfind(" at offset "); p != std::string::npos) msg.resize(p);
        throw ConfigError(what + ": " + msg + " at offset " + std::to_string(at), at);
      }
      start = i + 1;
    }
  }
  return out;
}

ConstrainedChartPoint start_point(const SystemConfig& cfg, const std::string& q_text,
                                  const std::string& u_text, const std::string& p_text) {
  const auto& sys = cfg.system;
  const Vector q = !q_text.empty() ? sized(q_text, sys.n, "--q")
                   : cfg.simulation.q ? *cfg.simulation.q
                                      : sys.q_ref;
  if (!p_text.empty()) {
    if (!u_text.empty()) throw ArgumentError("give either --u or --p, not both");
    const Vector p = sized(p_text, sys.n, "--p");
    const double off = m_residual(sys, {q, p}).norm();
    if (off > kMembershipTol)
      throw ArgumentError("--p is off the constraint submanifold (|A G^-1 p| = " +
                          std::to_string(off) + ")");
    return chart_of(sys, {q, p});
  }
  const Vector u = !u_text.empty() ? sized(u_text, sys.m(), "--u")
                   : cfg.simulation.u ? *cfg.simulation.u
                                      : Vector(Vector::Zero(sys.m()));
  return {q, u};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const MechanicalSystem& sys, const Trajectory& traj,
               const CotangentLiftedAction* action) {
  os << "t";
  for (const auto& c : sys.coordinates) os << ',' << c;
  for (int j = 0; j < sys.m(); ++j) os << ",u" << j + 1;
  for (const auto& c : sys.coordinates) os << ",p_" << c;
  os << ",H,constraint_residual";
  if (action)
    for (const auto& g : action->names) os << ",J_" << g;
  os << '\n';
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    os << fmt(traj.times[s]);
    const auto& x = traj.states[s];
    for (int i = 0; i < sys.n; ++i) os << ',' << fmt(x.q[i]);
    for (int j = 0; j < sys.m(); ++j) os << ',' << fmt(x.u[j]);
    for (int i = 0; i < sys.n; ++i) os << ',' << fmt(traj.phase[s].p[i]);
    os << ',' << fmt(traj.energy[s]) << ',' << fmt(traj.constraint_residual[s]);
    if (action && traj.momentum_series)
      for (Eigen::Index g = 0; g < traj.momentum_series->rows(); ++g)
        os << ',' << fmt((*traj.momentum_series)(g, static_cast<Eigen::Index>(s)));
    os << '\n';
  }
}

struct Check {
  explicit Check(std::string n, double t = kReportTol) : name(std::move(n)), tol(t) {}

  std::string name;
  double tol;
  bool informational = false;
  double max = 0.0;
  int samples = 0;
  int errors = 0;
  std::string first_error;

  void add(double r) {
    max = std::max(max, std::isfinite(r) ? r : INFINITY);
    ++samples;
  }
  void error(const std::string& what) {
    if (errors++ == 0) first_error = what;
  }
  bool pass() const { return errors == 0 && samples > 0 && max <= tol; }

  json to_json() const {
    json j{{"check", name}, {"max_residual", max}, {"tolerance", tol}, {"pass", pass()},
           {"samples", samples}};
    if (informational) j["informational"] = true;
    if (errors) {
      j["errors"] = errors;
      j["error"] = first_error;
    }
    return j;
  }
};

Vector uniform(int n, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-r, r);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

// --- subcommands -----------------------------------------------------------

struct SimulateArgs {
  std::string config, q, u, p, method, csv = "trajectory.csv", json_path, action;
  std::optional<double> t, dt;
};

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const SystemConfig cfg = load_config(a.config);
  const auto& sys = cfg.system;
  const auto start = start_point(cfg, a.q, a.u, a.p);
  const double t = a.t.value_or(cfg.simulation.t_final);
  const double dt = a.dt.value_or(cfg.simulation.dt);
  const Method method = a.method.empty() ? cfg.simulation.method : parse_method(a.method);
  const CotangentLiftedAction* action = nullptr;
  if (!a.action.empty()) {
    auto it = cfg.actions.find(a.action);
    if (it == cfg.actions.end()) throw ArgumentError("unknown action '" + a.action + "'");
    action = &it->second;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = integrate(sys, start, t, dt, method, action);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  {
    std::ofstream csv(a.csv);
    if (!csv) throw ArgumentError("cannot write '" + a.csv + "'");
    write_csv(csv, sys, traj, action);
  }

  const Diagnostics d = diagnostics(traj);
  const auto& last = traj.states.back();
  json final_state{{"t", traj.times.back()}, {"q", to_json(last.q)}};
  if (any_periodic(sys)) final_state["q_wrapped"] = to_json(wrapped(sys, last.q));
  final_state["u"] = to_json(last.u);
  final_state["p"] = to_json(traj.phase.back().p);
  final_state["H"] = traj.energy.back();
  json report{{"system", sys.name},
              {"method", method_name(method)},
              {"t_final", t},
              {"dt", dt},
              {"steps", traj.times.size() - 1},
              {"csv", a.csv},
              {"final", final_state},
              {"energy_drift", d.energy_drift},
              {"constraint_max", d.constraint_max}};
  if (action && d.momentum_drift) {
    json j;
    for (std::size_t g = 0; g < action->names.size(); ++g)
      j[action->names[g]] = (*d.momentum_drift)[static_cast<Eigen::Index>(g)];
    report["momentum_drift"] = j;
    json jf;
    const Vector jend = momentum_map(*action, traj.phase.back());
    for (std::size_t g = 0; g < action->names.size(); ++g)
      jf[action->names[g]] = jend[static_cast<Eigen::Index>(g)];
    report["momentum_final"] = jf;
  }
  report["seconds"] = seconds;
  if (traj.failure) report["failure"] = *traj.failure;

  const std::string text = report.dump(2);
  out << text << '\n';
  if (!a.json_path.empty()) {
    std::ofstream js(a.json_path);
    if (!js) throw ArgumentError("cannot write '" + a.json_path + "'");
    js << text << '\n';
  }
  if (traj.failure) {
    err << json{{"error",
                 {{"type", "NumericalError"}, {"message", *traj.failure}, {"exit_code", kNumerical}}}}
               .dump()
        << '\n';
    return kNumerical;
  }
  return kOk;
}

int field(const std::string& config, const std::string& q, const std::string& u,
          const std::string& p, std::ostream& out) {
  const SystemConfig cfg = load_config(config);
  const auto& sys = cfg.system;
  const auto x = start_point(cfg, q, u, p);
  const FieldResult f = nonholonomic_field(sys, x);
  const PhasePoint z = embed(sys, x);
  json report{{"system", sys.name},
              {"q", to_json(x.q)},
              {"u", to_json(x.u)},
              {"p", to_json(z.p)},
              {"H", hamiltonian(sys, z)},
              {"chart", {{"qdot", to_json(f.chart.head(sys.n))}, {"udot", to_json(f.chart.tail(sys.m()))}}},
              {"ambient", {{"qdot", to_json(f.ambient.head(sys.n))}, {"pdot", to_json(f.ambient.tail(sys.n))}}},
              {"coefficients", to_json(f.coefficients)}};
  out << report.dump(2) << '\n';
  return kOk;
}

struct CheckArgs {
  std::string config;
  std::vector<std::string> gamma, eps;
  int points = 50;
  std::uint64_t seed = 1;
  double radius = 1.0;
};

int check_hj(const CheckArgs& a, std::ostream& out) {
  const SystemConfig cfg = load_config(a.config);
  const auto& sys = cfg.system;
  const int n = sys.n;
  if (a.points < 1) throw ArgumentError("--points must be positive");
  Scope qscope;
  qscope.variables = sys.coordinates;
  qscope.parameters = cfg.parameters;
  const auto gexprs = parse_list_arg(join(a.gamma), qscope, "--gamma");
  if (static_cast<int>(gexprs.size()) != n)
    throw ArgumentError("--gamma needs " + std::to_string(n) + " components");
  const OneFormSection g{compile(gexprs, n, "gamma")};
  std::optional<PhaseMap> eps;
  if (!a.eps.empty()) {
    Scope zscope = qscope;
    for (const auto& c : sys.coordinates) zscope.variables.push_back("p_" + c);
    const auto e = parse_list_arg(join(a.eps), zscope, "--eps");
    if (static_cast<int>(e.size()) != 2 * n)
      throw ArgumentError("--eps needs " + std::to_string(2 * n) + " components");
    eps = PhaseMap{compile(e, 2 * n, "eps")};
  }

  Check closed{"closedness"}, member{"membership"}, type1{"type1"}, lemma{"lemma33"},
      lemma_m{"lemma33_membership"}, classical{"classical"};
  classical.informational = true;
  Check sympl{"symplecticity"}, type2{"type2"}, type2_eq{"type2_equivalence"};

  std::mt19937_64 rng(a.seed);
  for (int s = 0; s < a.points; ++s) {
    const Vector q = uniform(n, a.radius, rng);
    const Vector v = uniform(2 * n, 1.0, rng);
    const Vector w = uniform(2 * n, 1.0, rng);
    closed.add(closedness_on_D(sys, g, q));
    const double off = gamma_into_M(sys, g, q).norm();
    member.add(off);
    try {
      type1.add(type1_residual(sys, g, q));
    } catch (const HypothesisError& e) {
      type1.error(e.what());
    }
    try {
      classical.add(classical_hj_residual(sys, g, q));
    } catch (const Error& e) {
      classical.error(e.what());
    }
    const PhasePoint zq{q, g(q)};
    const Lemma33 r = lemma33_residuals(sys, g, zq, v, w);
    lemma.add(std::max(r.r_i, r.r_ii));
    if (off <= kMembershipTol) lemma_m.add(r.r_iii);
    // Type II is sampled on Im γ, where ε = id reduces it to Type I.
    if (eps) {
      try {
        const Type2Equivalence t2 = type2_equivalence_residual(sys, g, *eps, zq);
        sympl.add(t2.symplecticity);
        type2.add(t2.hj_gap);
        type2_eq.add(t2.lhs_rhs_gap);
      } catch (const HypothesisError& e) {
        type2.error(e.what());
        type2_eq.error(e.what());
      }
    }
  }

  json checks = json::array();
  bool verdict = true;
  std::vector<const Check*> all = {&closed, &member, &type1, &lemma};
  if (lemma_m.samples > 0) all.push_back(&lemma_m);
  if (eps) {
    all.push_back(&sympl);
    all.push_back(&type2);
    all.push_back(&type2_eq);
  }
  all.push_back(&classical);
  for (const Check* c : all) {
    checks.push_back(c->to_json());
    if (!c->informational && !c->pass()) verdict = false;
  }
  json report{{"system", sys.name},
              {"gamma", json::array()},
              {"points", a.points},
              {"seed", a.seed},
              {"checks", checks},
              {"verdict", verdict ? "PASS" : "FAIL"}};
  for (const auto& e : gexprs) report["gamma"].push_back(print_expression(*e));
  out << report.dump(2) << '\n';
  return kOk;
}

struct ReduceArgs {
  std::string config, chart;
  int samples = 20;
  int points = 100;
  std::uint64_t seed = 1;
};

json report_json(const ReduceReport& r) {
  return json{{"samples", r.samples},
              {"projection_variance", r.projection_variance},
              {"fiber_variance", r.fiber_variance},
              {"energy_variance", r.energy_variance},
              {"membership", r.membership},
              {"section_residual", r.section_residual},
              {"hamiltonian_residual", r.hamiltonian_residual},
              {"submersion_sigma_min", r.submersion_sigma_min},
              {"reference_gap", r.reference_gap},
              {"passed", r.passed},
              {"failure", r.failure}};
}

int reduce_cmd(const ReduceArgs& a, std::ostream& out) {
  const SystemConfig cfg = load_config(a.config);
  const auto& sys = cfg.system;
  if (a.points < 1 || a.samples < 1) throw ArgumentError("--points and --samples must be positive");
  const QuotientChart chart0 = find_chart(cfg, a.chart);
  const ReduceReport audit = audit_reduction(sys, chart0, a.samples, a.seed);
  if (!audit.passed) throw HypothesisError("reduction audit failed: " + audit.failure);
  const QuotientChart chart = reduce(sys, chart0, nullptr, a.samples, a.seed);

  json conflicts = json::array();
  for (const auto& c : audit.conflicts)
    conflicts.push_back({{"component", c.component},
                         {"coordinate", c.coordinate},
                         {"at", to_json(c.at)},
                         {"pushed", c.pushed},
                         {"printed", c.printed}});

  std::mt19937_64 rng(a.seed);
  Check pi{"pi_relatedness", kPiRelatedTol};
  json fields = json::array();
  for (int s = 0; s < a.points; ++s) {
    const ConstrainedChartPoint x{uniform(sys.n, 1.0, rng), uniform(sys.m(), 1.0, rng)};
    pi.add(pi_relatedness_residual(sys, chart, x));
    if (s < 5) {
      const Vector xbar = project_chart(sys, chart, x);
      json f{{"x", to_json(xbar)}, {"pushed", to_json(chart.reduced_field(xbar))}};
      if (!chart.reference.empty()) f["printed"] = to_json(chart.reference(xbar));
      fields.push_back(f);
    }
  }
  json report{{"system", sys.name},
              {"chart", chart.name},
              {"coordinates", chart.coordinates},
              {"audit", report_json(audit)},
              {"conflicts", conflicts},
              {"fields", fields},
              {"pi_relatedness", pi.to_json()}};
  out << report.dump(2) << '\n';
  return kOk;
}

int analyze(const std::string& config, const std::string& q_text, const std::string& u_text,
            int depth, std::ostream& out) {
  const SystemConfig cfg = load_config(config);
  const auto& sys = cfg.system;
  const Vector q = q_text.empty() ? sys.q_ref : sized(q_text, sys.n, "--q");
  const Vector u = u_text.empty() ? Vector(Vector::Zero(sys.m())) : sized(u_text, sys.m(), "--u");
  const BracketReport b = bracket_generating(d_frame_fields(sys), q, depth);
  const ConditionsReport c = conditions_check(sys, {q, u});
  json report{{"system", sys.name},
              {"q", to_json(q)},
              {"u", to_json(u)},
              {"bracket_generating",
               {{"generating", b.generating},
                {"rank", b.rank},
                {"depth", b.depth},
                {"max_depth", depth},
                {"clamped", b.clamped}}},
              {"d_regular",
               {{"pass", d_regularity(sys, q)}, {"ratio", d_regularity_ratio(sys, q)}}},
              {"conditions",
               {{"admissible", c.admissible},
                {"compatible", c.compatible},
                {"omega_K_condition", c.omega_K_condition},
                {"nondegeneracy", c.nondegeneracy},
                {"rank_F", c.rank_F},
                {"dim_M", c.dim_M},
                {"rank_TM_plus_Fperp", c.rank_TM_plus_Fperp}}}};
  out << report.dump(2) << '\n';
  return kOk;
}

int examples(std::ostream& out) {
  json list = json::array();
  for (const auto& b : bundled_configs())
    list.push_back({{"name", b.name}, {"path", b.path}, {"description", b.description}});
  out << list.dump(2) << '\n';
  return kOk;
}

int fail(std::ostream& err, const char* type, const std::string& message, int code,
         json extra = json::object()) {
  json e{{"type", type}, {"message", message}, {"exit_code", code}};
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  err << json{{"error", e}}.dump() << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonholonomic Hamiltonian systems: simulation, Hamilton-Jacobi checks, reduction"};
  app.name("distham");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Integrate X_K and write a trajectory CSV");
  s->add_option("config", sim.config, "Config file or bundled name")->required();
  s->add_option("--q", sim.q, "Initial configuration, comma separated");
  s->add_option("--u", sim.u, "Initial velocity coefficients in the D-frame");
  s->add_option("--p", sim.p, "Initial momenta on M (instead of --u)");
  s->add_option("--t", sim.t, "Final time");
  s->add_option("--dt", sim.dt, "Largest step");
  s->add_option("--method", sim.method, "rk4 | midpoint");
  s->add_option("--csv", sim.csv, "Trajectory output")->capture_default_str();
  s->add_option("--json", sim.json_path, "Also write the diagnostics here");
  s->add_option("--action", sim.action, "Action whose momentum map is recorded");

  std::string fcfg, fq, fu, fp;
  auto* f = app.add_subcommand("field", "Print X_K at a point of M");
  f->add_option("config", fcfg)->required();
  f->add_option("--q", fq);
  f->add_option("--u", fu);
  f->add_option("--p", fp);

  CheckArgs chk;
  auto* c = app.add_subcommand("check-hj", "Residual report for a one-form section");
  c->add_option("config", chk.config)->required();
  c->add_option("--gamma", chk.gamma, "n expressions in the coordinates")->required();
  c->add_option("--eps", chk.eps, "2n expressions in the coordinates and p_<name>");
  c->add_option("--points", chk.points)->capture_default_str();
  c->add_option("--seed", chk.seed)->capture_default_str();
  c->add_option("--radius", chk.radius, "Sample box half-width")->capture_default_str();

  ReduceArgs red;
  auto* r = app.add_subcommand("reduce", "Audit a quotient chart and sample the reduced field");
  r->add_option("config", red.config)->required();
  r->add_option("--chart", red.chart)->required();
  r->add_option("--samples", red.samples, "Audit samples")->capture_default_str();
  r->add_option("--points", red.points, "pi-relatedness points")->capture_default_str();
  r->add_option("--seed", red.seed)->capture_default_str();

  std::string acfg, aq, au;
  int adepth = 2;
  auto* an = app.add_subcommand("analyze", "Bracket generation, D-regularity, compatibility");
  an->add_option("config", acfg)->required();
  an->add_option("--q", aq);
  an->add_option("--u", au);
  an->add_option("--depth", adepth)->capture_default_str();

  app.add_subcommand("examples", "List bundled configs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, "UsageError", e.what(), kUsage);
  }

  try {
    if (*s) return simulate(sim, out, err);
    if (*f) return field(fcfg, fq, fu, fp, out);
    if (*c) return check_hj(chk, out);
    if (*r) return reduce_cmd(red, out);
    if (*an) return analyze(acfg, aq, au, adepth, out);
    return examples(out);
  } catch (const ConfigError& e) {
    json extra = json::object();
    if (e.line()) extra["line"] = *e.line();
    if (e.offset()) extra["offset"] = *e.offset();
    return fail(err, "ConfigError", e.what(), kConfig, extra);
  } catch (const NumericalError& e) {
    return fail(err, "NumericalError", e.what(), kNumerical, {{"condition", e.condition()}});
  } catch (const HypothesisError& e) {
    return fail(err, "HypothesisError", e.what(), kNumerical);
  } catch (const DimensionError& e) {
    return fail(err, "DimensionError", e.what(), kUsage);
  } catch (const ArgumentError& e) {
    return fail(err, "ArgumentError", e.what(), kUsage);
  } catch (const std::exception& e) {
    return fail(err, "Error", e.what(), kUsage);
  }
}

}  // namespace distham::cli
