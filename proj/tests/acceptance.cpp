// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "distham/builtin.hpp"
#include "distham/calculus.hpp"
#include "distham/cli.hpp"
#include "distham/config.hpp"
#include "distham/dynamics.hpp"
#include "distham/expression.hpp"
#include "distham/hamilton_jacobi.hpp"
#include "distham/reduction.hpp"
#include "random_expr.hpp"
#include "support.hpp"

using namespace distham;
using namespace distham::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ConstrainedChartPoint> sample_points(const MechanicalSystem& sys, int count,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ConstrainedChartPoint> pts;
  for (int i = 0; i < count; ++i) pts.push_back(random_chart_point(sys, 2.0, 2.0, rng));
  return pts;
}

const MechanicalSystem& particle() {
  static const MechanicalSystem s = particle_system();
  return s;
}

const MechanicalSystem& disk() {
  static const MechanicalSystem s = disk_system();
  return s;
}

// Component-wise gap of X_K against a printed field; returns the worst gap
// and the index of the worst component.
std::pair<double, int> golden_gap(const MechanicalSystem& sys,
                                  const std::vector<ConstrainedChartPoint>& pts,
                                  const std::function<Vector(const PhasePoint&)>& printed,
                                  const std::vector<int>& components) {
  double worst = 0.0;
  int at = -1;
  for (const auto& x : pts) {
    const Vector got = nonholonomic_field(sys, x).ambient;
    const Vector want = printed(embed(sys, x));
    for (int c : components) {
      const double gap = std::abs(got[c] - want[c]);
      if (gap > worst) {
        worst = gap;
        at = c;
      }
    }
  }
  return {worst, at};
}

const char* kParticleNames[] = {"xdot", "ydot", "zdot", "pxdot", "pydot", "pzdot"};
const char* kDiskNames[] = {"xdot", "ydot", "thetadot", "phidot",
                            "pxdot", "pydot", "pthetadot", "pphidot"};

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = sample_points(particle(), 200, 101);
  // ẋ = p_x, ẏ = p_y, ż = σ(y)p_x, ṗ_x = 0, ṗ_y = 0 with σ(y) = y.
  const auto [gap, at] = golden_gap(
      particle(), pts,
      [](const PhasePoint& z) {
        Vector f = Vector::Zero(6);
        f << z.p[0], z.p[1], z.q[1] * z.p[0], 0.0, 0.0, 0.0;
        return f;
      },
      {0, 1, 2, 3, 4});
  const double secs = elapsed(t0);
  std::string d = "200 points, max gap " + sci(gap);
  if (at >= 0 && gap > 1e-9) d += std::string(" in ") + kParticleNames[at];
  return {gap <= 1e-9 && secs < 1.0, d};
}

Outcome c2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = sample_points(disk(), 200, 102);
  const double I = 2.0, J = 1.0, R = 1.0;
  const auto [gap, at] = golden_gap(
      disk(), pts,
      [=](const PhasePoint& z) {
        const double phi = z.q[3], pt = z.p[2], pp = z.p[3];
        Vector f = Vector::Zero(8);
        f << R * std::cos(phi) / I * pt, R * std::sin(phi) / I * pt, pt / I, pp / J, 0.0, 0.0,
            0.0, 0.0;
        return f;
      },
      {0, 1, 2, 3, 6, 7});
  const double secs = elapsed(t0);
  std::string d = "200 points, max gap " + sci(gap);
  if (at >= 0 && gap > 1e-9) d += std::string(" in ") + kDiskNames[at];
  return {gap <= 1e-9 && secs < 1.0, d};
}

Outcome c3() {
  double worst = 0.0;
  const std::pair<const MechanicalSystem*, std::uint64_t> sets[] = {{&particle(), 101},
                                                                   {&disk(), 102}};
  for (const auto& [sys, seed] : sets)
    for (const auto& x : sample_points(*sys, 200, seed)) {
      const Vector a = nonholonomic_field(*sys, x).ambient;
      const Vector b = projection_field(*sys, x);
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  return {worst <= 1e-9, "400 points, max |X_K - P(X_H)| " + sci(worst)};
}

Outcome c4() {
  struct Run {
    const MechanicalSystem* sys;
    ConstrainedChartPoint start;
    const char* label;
  };
  const Run runs[] = {{&particle(), {vec({0, 0, 0}), vec({2, 3})}, "particle"},
                      {&disk(), {vec({0, 0, 0, 0}), vec({1, 3})}, "disk"}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& r : runs) {
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = integrate(*r.sys, r.start, 10.0, 1e-3, Method::rk4);
    const double secs = elapsed(t0);
    const Diagnostics diag = diagnostics(traj);
    const bool pass = !traj.failure && diag.energy_drift <= 1e-7 &&
                      diag.constraint_max <= 1e-12 && secs < 5.0;
    ok = ok && pass;
    d << r.label << ": drift " << sci(diag.energy_drift) << ", constraint "
      << sci(diag.constraint_max) << ", " << sci(secs) << " s; ";
  }
  return {ok, d.str()};
}

Outcome c5() {
  std::mt19937_64 rng(105);
  // γ = 2dx + 3dy + 2σ(y)dz
  const OneFormSection g{SmoothMap::from(3, 3, [](const auto& q) {
    using T = typename std::decay_t<decltype(q)>::Scalar;
    Vec<T> r(3);
    r << T(2.0), T(3.0), T(2.0) * q[1];
    return r;
  })};
  double closed = 0.0, member = 0.0, type1 = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vector q = random_vector(3, -2, 2, rng);
    closed = std::max(closed, closedness_on_D(particle(), g, q));
    member = std::max(member, gamma_into_M(particle(), g, q).cwiseAbs().maxCoeff());
    type1 = std::max(type1, type1_residual(particle(), g, q));
  }
  const bool particle_ok = closed <= 1e-10 && member <= 1e-12 && type1 <= 1e-8;

  const OneFormSection gd = disk_section(DiskParameters{}, 1.5, -0.5);
  double dclosed = 0.0, dmember = 0.0, dtype1 = 0.0;
  int used = 0;
  for (int i = 0; i < 50; ++i) {
    const Vector q = random_vector(4, -2, 2, rng);
    const double c = closedness_on_D(disk(), gd, q);
    dclosed = std::max(dclosed, c);
    if (c > 1e-10) continue;
    ++used;
    dmember = std::max(dmember, gamma_into_M(disk(), gd, q).cwiseAbs().maxCoeff());
    dtype1 = std::max(dtype1, type1_residual(disk(), gd, q));
  }
  const bool disk_ok = used > 0 && dmember <= 1e-12 && dtype1 <= 1e-8;
  std::ostringstream d;
  d << "particle closedness " << sci(closed) << ", membership " << sci(member) << ", type1 "
    << sci(type1) << (particle_ok ? " ok" : " FAIL") << "; disk closed at " << used
    << "/50, membership " << sci(dmember) << ", type1 " << sci(dtype1)
    << (disk_ok ? " ok" : " FAIL");
  return {particle_ok && disk_ok, d.str()};
}

Outcome c6() {
  std::mt19937_64 rng(106);
  const OneFormSection g = particle_section(1.3, -0.4);
  const PhaseMap ident = identity_map(3);
  const PhaseMap shift = base_translation(vec({0.7, 0.0, -1.2}));
  double worst = 0.0, gap = 0.0;
  bool covanish = true;
  for (int i = 0; i < 50; ++i) {
    const Vector q = random_vector(3, -2, 2, rng);
    const PhasePoint z{q, g(q)};
    for (const PhaseMap* e : {&ident, &shift}) {
      worst = std::max(worst, type2_residual(particle(), g, *e, z));
      const auto eq = type2_equivalence_residual(particle(), g, *e, z);
      gap = std::max({gap, eq.lhs_rhs_gap, eq.hj_gap});
      covanish = covanish && eq.symplectic && ((eq.lhs_rhs_gap <= 1e-8) == (eq.hj_gap <= 1e-8));
    }
  }
  const PhaseMap scale = momentum_scaling(3, 2.0);
  const Vector q0 = vec({0.2, 0.9, -0.4});
  bool rejected = false;
  try {
    type2_residual(particle(), g, scale, {q0, g(q0)});
  } catch (const HypothesisError&) {
    rejected = true;
  }
  const auto flagged = type2_equivalence_residual(particle(), g, scale, {q0, g(q0)});
  rejected = rejected && !flagged.symplectic;
  std::ostringstream d;
  d << "type2 max " << sci(worst) << ", equivalence gaps max " << sci(gap)
    << (covanish ? ", co-vanish" : ", do NOT co-vanish") << ", scaling "
    << (rejected ? "rejected" : "NOT rejected") << " (symplecticity "
    << sci(flagged.symplecticity) << ")";
  return {worst <= 1e-8 && gap <= 1e-8 && covanish && rejected, d.str()};
}

Outcome c7() {
  bool ok = true;
  std::ostringstream d;
  const std::pair<const MechanicalSystem*, const char*> charts[] = {
      {&particle(), "particle-R2"}, {&disk(), "disk-R2"}, {&disk(), "disk-SE2"}};
  std::uint64_t seed = 107;
  for (const auto& [sys, name] : charts) {
    ReduceReport rep;
    const QuotientChart c = reduce(*sys, builtin_chart(name, *sys), &rep);
    const auto pts = sample_points(*sys, 100, seed++);
    double pi = 0.0;
    std::vector<double> gaps(static_cast<std::size_t>(c.reduced_dim), 0.0);
    for (const auto& x : pts) {
      pi = std::max(pi, pi_relatedness_residual(*sys, c, x));
      const Vector xbar = project_chart(*sys, c, x);
      const Vector diff = c.reduced_field(xbar) - c.reference(xbar);
      for (int i = 0; i < c.reduced_dim; ++i)
        gaps[static_cast<std::size_t>(i)] = std::max(gaps[static_cast<std::size_t>(i)], std::abs(diff[i]));
    }
    bool chart_ok = rep.passed && pi <= 1e-10;
    double agree = 0.0;
    std::string recorded;
    for (int i = 0; i < c.reduced_dim; ++i) {
      bool in_report = false;
      for (const auto& cf : rep.conflicts) in_report = in_report || cf.component == i;
      const double gi = gaps[static_cast<std::size_t>(i)];
      if (gi <= 1e-9) {
        agree = std::max(agree, gi);
        chart_ok = chart_ok && !in_report;
      } else {
        chart_ok = chart_ok && in_report;
        recorded += (recorded.empty() ? "" : ",") + c.coordinates[static_cast<std::size_t>(i)] + "dot";
      }
    }
    ok = ok && chart_ok;
    d << name << ": pi " << sci(pi) << ", printed gap " << sci(agree);
    if (!recorded.empty()) d << ", conflicts recorded [" << recorded << "]";
    d << "; ";
  }
  return {ok, d.str()};
}

Outcome c8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(108);
  const MechanicalSystem curved = curved_constrained_system();
  double ri = 0.0, rii = 0.0, riii = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vector v = random_vector(6, -1, 1, rng);
    const Vector w = random_vector(6, -1, 1, rng);
    const PhasePoint z{random_vector(3, -1.5, 1.5, rng), random_vector(3, -2, 2, rng)};
    if (t % 2 == 0) {
      const OneFormSection g{Poly::random_field(3, 3, 4, rng)};
      const Lemma33 r = lemma33_residuals(curved, g, z, v, w);
      ri = std::max(ri, r.r_i);
      rii = std::max(rii, r.r_ii);
    } else {
      // M-valued on the particle: γ = (a, b, y·a).
      const Poly a = Poly::random(3, 3, 4, rng);
      const Poly b = Poly::random(3, 3, 4, rng);
      const OneFormSection g{SmoothMap::from(3, 3, [a, b](const auto& q) {
        using T = typename std::decay_t<decltype(q)>::Scalar;
        const T av = a.eval<T>(q);
        Vec<T> r(3);
        r << av, b.eval<T>(q), q[1] * av;
        return r;
      })};
      const Lemma33 r = lemma33_residuals(particle(), g, z, v, w);
      ri = std::max(ri, r.r_i);
      rii = std::max(rii, r.r_ii);
      riii = std::max(riii, r.r_iii);
    }
  }
  const double secs = elapsed(t0);
  std::ostringstream d;
  d << "1000 instances: r_i " << sci(ri) << ", r_ii " << sci(rii) << ", r_iii " << sci(riii)
    << ", " << sci(secs) << " s";
  return {ri <= 1e-9 && rii <= 1e-9 && riii <= 1e-10 && secs < 5.0, d.str()};
}

Outcome c9() {
  const CotangentLiftedAction action = particle_translation_action();
  const ConstrainedChartPoint start = chart_of(particle(), {vec({0, 0, 0}), vec({2, 3, 0})});
  const Trajectory traj = integrate(particle(), start, 1.0, 1e-3, Method::rk4, &action);
  const Vector drift = momentum_drift(traj, action);
  const Vector jend = momentum_map(action, traj.phase.back());
  const bool ok = !traj.failure && drift[0] <= 1e-10 && std::abs(jend[1] - 6.0) <= 1e-6;
  std::ostringstream d;
  d << "p_x drift " << sci(drift[0]) << " (want <= 1e-10), p_z(1) = " << jend[1]
    << " (want 6)";
  return {ok, d.str()};
}

Outcome c10() {
  std::mt19937_64 rng(110);
  bool brackets = true, regular = true, admissible = true, compatible = true;
  int worst_rank_depth = 0;
  for (const MechanicalSystem* sys : {&particle(), &disk()}) {
    const auto fields = d_frame_fields(*sys);
    for (int i = 0; i < 20; ++i) {
      const auto x = random_chart_point(*sys, 2.0, 2.0, rng);
      const BracketReport b = bracket_generating(fields, x.q, 2);
      brackets = brackets && b.generating;
      worst_rank_depth = std::max(worst_rank_depth, b.depth);
      regular = regular && d_regularity(*sys, x.q);
      const ConditionsReport c = conditions_check(*sys, x);
      admissible = admissible && c.admissible;
      compatible = compatible && c.compatible;
    }
  }
  double k0 = 0.0;
  const MechanicalSystem h = harmonic_system(3);
  const MechanicalSystem cf = curved_free_system();
  for (const MechanicalSystem* sys : {&h, &cf})
    for (int i = 0; i < 50; ++i) {
      const auto x = random_chart_point(*sys, 2.0, 2.0, rng);
      const Vector xk = nonholonomic_field(*sys, x).ambient;
      const Vector xh = hamiltonian_field_vector(*sys, to_phase_vector(embed(*sys, x)));
      k0 = std::max(k0, (xk - xh).cwiseAbs().maxCoeff());
    }
  std::ostringstream d;
  d << "bracket-generating " << (brackets ? "yes" : "NO") << " (depth " << worst_rank_depth
    << "), D-regular " << (regular ? "yes" : "NO") << ", admissible "
    << (admissible ? "yes" : "NO") << ", compatible " << (compatible ? "yes" : "NO")
    << ", k=0 gap " << sci(k0);
  return {brackets && regular && admissible && compatible && k0 <= 1e-12, d.str()};
}

Outcome c11() {
  std::mt19937_64 rng(111);
  const std::vector<std::string> vars = {"x", "y", "z"};
  Scope s;
  s.variables = vars;
  int round_trips = 0;
  for (int t = 0; t < 1000; ++t) {
    const ExprPtr e = random_expr(5, vars, rng);
    if (structurally_equal(*e, *parse_expression(print_expression(*e), s))) ++round_trips;
  }

  Scope ys;
  ys.variables = {"y"};
  Scope ps;
  ps.variables = {"phi"};
  ps.parameters = {{"R", 1.0}};
  const bool precedence =
      evaluate<double>(*parse_expression("y", ys), vec({1.0})) == 1.0 &&
      evaluate<double>(*parse_expression("-sin(phi)*R", ps), vec({0.0})) == 0.0 &&
      evaluate<double>(*parse_expression("-sin(phi)*R", ps), vec({std::acos(0.0)})) == -1.0 &&
      evaluate<double>(*parse_expression("1 + 2*3^2", Scope{}), Vector()) == 19.0;

  int positioned = 0;
  const char* malformed[] = {"1 +", "2*(x", "x^1.5", "foo(y)", "x $ y"};
  for (const char* text : malformed) {
    std::ostringstream out, err;
    const int code = cli::run({"check-hj", "particle", "--gamma", std::string("0,0,") + text},
                              out, err);
    if (code == 2 && err.str().find("\"offset\"") != std::string::npos) ++positioned;
  }
  std::ostringstream d;
  d << round_trips << "/1000 round trips, precedence " << (precedence ? "exact" : "WRONG")
    << ", " << positioned << "/5 malformed inputs give positioned errors with exit 2";
  return {round_trips == 1000 && precedence && positioned == 5, d.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"C1 golden field, particle", c1},      {"C2 golden field, disk", c2},
      {"C3 two-construction oracle", c3},     {"C4 conservation", c4},
      {"C5 Type I HJ", c5},                   {"C6 Type II HJ", c6},
      {"C7 reduction", c7},                   {"C8 lemma identities", c8},
      {"C9 momentum diagnostics", c9},        {"C10 structure checks", c10},
      {"C11 parser", c11}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double ms = 1e3 * elapsed(t0);
    if (!o.pass) ++failed;
    std::printf("%s %s: %s [%.0f ms]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), ms);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
