#include "distham/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "distham/builtin.hpp"

#ifndef DISTHAM_CONFIG_DIR
#define DISTHAM_CONFIG_DIR "configs"
#endif

namespace distham {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t offset = 0;  // byte offset of value in the whole text
};

struct Section {
  std::string name;
  std::string label;  // text after ':' for action/chart
  std::size_t line = 0;
  std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail_at(const std::string& what, std::size_t line,
                          std::optional<std::size_t> offset = std::nullopt) {
  throw ConfigError("line " + std::to_string(line) + ": " + what, offset, line);
}

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> out;
  std::size_t pos = 0, line = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line;
    std::string raw = text.substr(pos, end - pos);
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string body = trim(raw);
    if (!body.empty()) {
      if (body.front() == '[') {
        if (body.back() != ']') fail_at("unterminated section header", line, pos);
        const std::string head = trim(body.substr(1, body.size() - 2));
        Section s;
        s.line = line;
        if (auto colon = head.find(':'); colon != std::string::npos) {
          s.name = trim(head.substr(0, colon));
          s.label = trim(head.substr(colon + 1));
          if (s.label.empty()) fail_at("section [" + s.name + ":] needs a name", line, pos);
        } else {
          s.name = head;
        }
        out.push_back(std::move(s));
      } else {
        const auto eq = raw.find('=');
        if (eq == std::string::npos) fail_at("expected 'key = value'", line, pos);
        if (out.empty()) fail_at("entry outside of any section", line, pos);
        Entry e;
        e.key = trim(raw.substr(0, eq));
        std::size_t v = eq + 1;
        while (v < raw.size() && std::isspace(static_cast<unsigned char>(raw[v]))) ++v;
        e.value = trim(raw.substr(v));
        e.line = line;
        e.offset = pos + v;
        if (e.key.empty()) fail_at("missing key", line, pos);
        out.back().entries.push_back(std::move(e));
      }
    }
    pos = end + 1;
  }
  return out;
}

// Top-level comma split, keeping the offset of each piece relative to the value.
std::vector<std::pair<std::string, std::size_t>> split_list(const std::string& s) {
  std::vector<std::pair<std::string, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] == '(') ++depth;
    if (i < s.size() && s[i] == ')') --depth;
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      std::string piece = s.substr(start, i - start);
      std::size_t lead = 0;
      while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
      out.emplace_back(trim(piece), start + lead);
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> split_names(const Entry& e) {
  std::vector<std::string> names;
  for (const auto& [name, off] : split_list(e.value)) {
    if (name.empty()) fail_at("empty name in '" + e.key + "'", e.line, e.offset + off);
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        fail_at("invalid name '" + name + "'", e.line, e.offset + off);
    names.push_back(name);
  }
  return names;
}

std::vector<ExprPtr> parse_list(const Entry& e, const Scope& scope) {
  std::vector<ExprPtr> out;
  for (const auto& [piece, off] : split_list(e.value)) {
    try {
      out.push_back(parse_expression(piece, scope));
    } catch (const ConfigError& err) {
      const std::size_t inner = err.offset().value_or(0);
      std::string msg = err.what();
      if (auto at = msg.rfind(" at offset "); at != std::string::npos) msg.resize(at);
      fail_at(msg + " in '" + e.key + "' (column " + std::to_string(off + inner + 1) + ")",
              e.line, e.offset + off + inner);
    }
  }
  return out;
}

std::optional<std::size_t> index_of(const std::vector<std::string>& v, const std::string& s) {
  auto it = std::find(v.begin(), v.end(), s);
  if (it == v.end()) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

class Builder {
 public:
  Builder(std::vector<Section> sections, std::string source)
      : sections_(std::move(sections)) {
    cfg_.source = std::move(source);
  }

  SystemConfig build() {
    static const std::set<std::string> known = {"system",      "parameters", "metric",
                                                 "potential",   "constraints", "action",
                                                 "chart",       "simulation"};
    std::set<std::string> seen;
    for (const auto& s : sections_) {
      if (!known.count(s.name)) fail_at("unknown section [" + s.name + "]", s.line);
      const bool labelled = s.name == "action" || s.name == "chart";
      if (labelled && s.label.empty()) fail_at("[" + s.name + "] needs a name", s.line);
      if (!labelled && !s.label.empty())
        fail_at("[" + s.name + "] does not take a name", s.line);
      const std::string id = s.name + ":" + s.label;
      if (!seen.insert(id).second) fail_at("duplicate section [" + id + "]", s.line);
    }
    system_section();
    parameters();
    scope_.variables = coords_;
    scope_.parameters = cfg_.parameters;
    assemble_system();
    for (const auto& s : sections_)
      if (s.name == "action") action(s);
    for (const auto& s : sections_)
      if (s.name == "chart") chart(s);
    if (const Section* s = find("simulation")) simulation(*s);
    return std::move(cfg_);
  }

 private:
  std::vector<Section> sections_;
  SystemConfig cfg_;
  Scope scope_;
  std::string name_ = "system";
  std::vector<std::string> coords_;
  std::optional<Vector> q_ref_;
  std::optional<std::vector<int>> pivots_;
  std::vector<bool> periodic_;

  const Section* find(const std::string& name) const {
    for (const auto& s : sections_)
      if (s.name == name) return &s;
    return nullptr;
  }

  const Section& require(const std::string& name) const {
    const Section* s = find(name);
    if (!s) throw ConfigError("missing section [" + name + "]");
    return *s;
  }

  static void only_keys(const Section& s, const std::set<std::string>& keys) {
    std::set<std::string> seen;
    for (const auto& e : s.entries) {
      if (!keys.count(e.key)) fail_at("unknown key '" + e.key + "' in [" + s.name + "]", e.line);
      if (e.key != "row" && !seen.insert(e.key).second)
        fail_at("duplicate key '" + e.key + "'", e.line);
    }
  }

  Vector numbers(const Entry& e, std::size_t expected) const {
    Scope consts;
    consts.parameters = cfg_.parameters;
    const auto exprs = parse_list(e, consts);
    if (exprs.size() != expected)
      fail_at("'" + e.key + "' needs " + std::to_string(expected) + " values, got " +
                  std::to_string(exprs.size()),
              e.line);
    Vector v(static_cast<Eigen::Index>(expected));
    for (std::size_t i = 0; i < expected; ++i)
      v[static_cast<Eigen::Index>(i)] = evaluate<double>(*exprs[i], Vector());
    return v;
  }

  void system_section() {
    const Section& s = require("system");
    only_keys(s, {"name", "coordinates", "q_ref", "pivots", "periodic"});
    const Entry* coords = nullptr;
    for (const auto& e : s.entries)
      if (e.key == "coordinates") coords = &e;
    if (!coords) fail_at("[system] needs 'coordinates'", s.line);
    coords_ = split_names(*coords);
    for (std::size_t i = 0; i < coords_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (coords_[i] == coords_[j])
          fail_at("duplicate coordinate '" + coords_[i] + "'", coords->line);
    periodic_.assign(coords_.size(), false);
    for (const auto& e : s.entries) {
      if (e.key == "name") {
        name_ = e.value;
      } else if (e.key == "pivots" || e.key == "periodic") {
        std::vector<int> idx;
        for (const auto& nm : split_names(e)) {
          const auto i = index_of(coords_, nm);
          if (!i) fail_at("'" + nm + "' is not a coordinate", e.line, e.offset);
          idx.push_back(static_cast<int>(*i));
        }
        if (e.key == "pivots")
          pivots_ = idx;
        else
          for (int i : idx) periodic_[static_cast<std::size_t>(i)] = true;
      }
    }
  }

  void parameters() {
    const Section* s = find("parameters");
    if (!s) return;
    for (const auto& e : s->entries) {
      if (index_of(coords_, e.key)) fail_at("parameter '" + e.key + "' shadows a coordinate", e.line);
      if (cfg_.parameters.count(e.key)) fail_at("duplicate parameter '" + e.key + "'", e.line);
      cfg_.parameters[e.key] = numbers(e, 1)[0];
    }
  }

  void assemble_system() {
    const int n = static_cast<int>(coords_.size());
    const Section& sys = require("system");
    for (const auto& e : sys.entries)
      if (e.key == "q_ref") q_ref_ = numbers(e, coords_.size());

    // metric
    const Section& ms = require("metric");
    only_keys(ms, {"row", "diag"});
    std::vector<std::vector<ExprPtr>> g;
    bool diag = false;
    for (const auto& e : ms.entries) {
      if (e.key == "diag") {
        if (ms.entries.size() != 1) fail_at("'diag' cannot be mixed with rows", e.line);
        auto d = parse_list(e, scope_);
        if (static_cast<int>(d.size()) != n)
          fail_at("diag needs " + std::to_string(n) + " entries", e.line);
        g.assign(n, std::vector<ExprPtr>(n, Expr::constant(0.0)));
        for (int i = 0; i < n; ++i) g[i][i] = d[i];
        diag = true;
      } else {
        auto row = parse_list(e, scope_);
        if (static_cast<int>(row.size()) != n)
          fail_at("metric row needs " + std::to_string(n) + " entries", e.line);
        g.push_back(std::move(row));
      }
    }
    if (static_cast<int>(g.size()) != n)
      fail_at("metric needs " + std::to_string(n) + " rows, got " + std::to_string(g.size()),
              ms.line);
    if (!diag)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
          if (!structurally_equal(*g[i][j], *g[j][i]))
            fail_at("metric is not symmetric as written at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")",
                    ms.entries[static_cast<std::size_t>(i)].line);
    std::vector<ExprPtr> gflat;
    for (const auto& row : g) gflat.insert(gflat.end(), row.begin(), row.end());

    // potential
    ExprPtr v = Expr::constant(0.0);
    if (const Section* ps = find("potential")) {
      only_keys(*ps, {"V"});
      if (ps->entries.size() == 1) {
        auto list = parse_list(ps->entries[0], scope_);
        if (list.size() != 1) fail_at("V must be a single expression", ps->entries[0].line);
        v = list[0];
      }
    }

    // constraints
    std::vector<ExprPtr> aflat;
    int k = 0;
    if (const Section* cs = find("constraints")) {
      only_keys(*cs, {"row"});
      for (const auto& e : cs->entries) {
        auto row = parse_list(e, scope_);
        if (static_cast<int>(row.size()) != n)
          fail_at("constraint row needs " + std::to_string(n) + " entries", e.line);
        aflat.insert(aflat.end(), row.begin(), row.end());
        ++k;
      }
      if (k >= n)
        fail_at(std::to_string(k) + " constraint rows need fewer than " + std::to_string(n) +
                    " coordinates",
                cs->line);
    }

    const Vector qref = q_ref_.value_or(Vector::Zero(n));
    try {
      cfg_.system = make_system(name_, coords_, compile(gflat, n, "G"), compile({v}, n, "V"),
                                k > 0 ? compile(aflat, n, "A") : SmoothMap(), qref, pivots_);
    } catch (const NumericalError& err) {
      throw ConfigError(std::string("system is degenerate at q_ref: ") + err.what());
    }
    cfg_.system.periodic = periodic_;
  }

  void action(const Section& s) {
    CotangentLiftedAction a;
    const int n = static_cast<int>(coords_.size());
    for (const auto& e : s.entries) {
      auto xi = parse_list(e, scope_);
      if (static_cast<int>(xi.size()) != n)
        fail_at("generator '" + e.key + "' needs " + std::to_string(n) + " components", e.line);
      a.names.push_back(e.key);
      a.generators.push_back(compile(xi, n, e.key));
    }
    if (a.generators.empty()) fail_at("[action:" + s.label + "] has no generators", s.line);
    cfg_.actions[s.label] = std::move(a);
  }

  void chart(const Section& s) {
    only_keys(s, {"coordinates", "project", "section", "reference", "action"});
    const int n = static_cast<int>(coords_.size());
    const int m = cfg_.system.m();
    QuotientChart c;
    c.name = s.label;
    const Entry* coords = nullptr;
    for (const auto& e : s.entries)
      if (e.key == "coordinates") coords = &e;
    if (!coords) fail_at("[chart:" + s.label + "] needs 'coordinates'", s.line);
    c.coordinates = split_names(*coords);
    c.reduced_dim = static_cast<int>(c.coordinates.size());

    Scope phase = scope_;
    for (const auto& q : coords_) phase.variables.push_back("p_" + q);
    Scope reduced;
    reduced.variables = c.coordinates;
    reduced.parameters = cfg_.parameters;

    bool have_project = false, have_action = false;
    for (const auto& e : s.entries) {
      if (e.key == "project") {
        auto f = parse_list(e, phase);
        if (static_cast<int>(f.size()) != c.reduced_dim)
          fail_at("project needs " + std::to_string(c.reduced_dim) + " components", e.line);
        c.project = compile(f, 2 * n, "project");
        have_project = true;
      } else if (e.key == "section") {
        auto f = parse_list(e, reduced);
        if (static_cast<int>(f.size()) != n + m)
          fail_at("section needs n + m = " + std::to_string(n + m) + " components (q, u)",
                  e.line);
        c.section = compile(f, c.reduced_dim, "section");
      } else if (e.key == "reference") {
        auto f = parse_list(e, reduced);
        if (static_cast<int>(f.size()) != c.reduced_dim)
          fail_at("reference needs " + std::to_string(c.reduced_dim) + " components", e.line);
        c.reference = compile(f, c.reduced_dim, "reference");
      } else if (e.key == "action") {
        auto it = cfg_.actions.find(e.value);
        if (it == cfg_.actions.end()) fail_at("unknown action '" + e.value + "'", e.line, e.offset);
        c.action = it->second;
        have_action = true;
      }
    }
    if (!have_project) fail_at("[chart:" + s.label + "] needs 'project'", s.line);
    if (!have_action) fail_at("[chart:" + s.label + "] needs 'action'", s.line);
    cfg_.charts[s.label] = std::move(c);
  }

  void simulation(const Section& s) {
    only_keys(s, {"t_final", "dt", "method", "q", "u"});
    auto& sim = cfg_.simulation;
    for (const auto& e : s.entries) {
      if (e.key == "t_final") {
        sim.t_final = numbers(e, 1)[0];
      } else if (e.key == "dt") {
        sim.dt = numbers(e, 1)[0];
      } else if (e.key == "method") {
        try {
          sim.method = parse_method(e.value);
        } catch (const ArgumentError& err) {
          fail_at(err.what(), e.line, e.offset);
        }
      } else if (e.key == "q") {
        sim.q = numbers(e, coords_.size());
      } else if (e.key == "u") {
        sim.u = numbers(e, static_cast<std::size_t>(cfg_.system.m()));
      }
    }
    if (!(sim.t_final >= 0.0)) fail_at("t_final must be non-negative", s.line);
    if (!(sim.dt > 0.0)) fail_at("dt must be positive", s.line);
  }
};

}  // namespace

SystemConfig parse_config(const std::string& text, const std::string& source) {
  return Builder(split_sections(text), source).build();
}

std::string bundled_config_dir() {
  if (const char* env = std::getenv("DISTHAM_CONFIG_DIR")) return env;
  return DISTHAM_CONFIG_DIR;
}

SystemConfig load_config(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (!fs::exists(p)) {
    fs::path bundled = fs::path(bundled_config_dir()) / p;
    if (bundled.extension().empty()) bundled += ".cfg";
    if (p.parent_path().empty() && fs::exists(bundled))
      p = bundled;
    else
      throw ConfigError("cannot open config '" + path + "'");
  }
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + p.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), p.string());
}

std::vector<BundledConfig> bundled_configs() {
  namespace fs = std::filesystem;
  std::vector<BundledConfig> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(bundled_config_dir(), ec)) {
    if (entry.path().extension() != ".cfg") continue;
    BundledConfig b;
    b.name = entry.path().filename().string();
    b.path = entry.path().string();
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '#') b.description = trim(t.substr(1));
      break;
    }
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(),
            [](const BundledConfig& a, const BundledConfig& b) { return a.name < b.name; });
  return out;
}

Vector parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  for (const auto& [piece, off] : split_list(text)) {
    (void)off;
    Scope consts;
    try {
      vals.push_back(evaluate<double>(*parse_expression(piece, consts), Vector()));
    } catch (const ConfigError&) {
      throw ArgumentError(what + ": '" + piece + "' is not a number");
    }
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

QuotientChart find_chart(const SystemConfig& cfg, const std::string& name) {
  if (auto it = cfg.charts.find(name); it != cfg.charts.end()) return it->second;
  return builtin_chart(name, cfg.system);
}

}  // namespace distham
