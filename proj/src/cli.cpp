#include "ks/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "ks/errors.hpp"
#include "ks/hilbert.hpp"
#include "ks/krein.hpp"
#include "ks/parallel.hpp"

namespace ks::cli {

using json = nlohmann::ordered_json;

namespace {

class Logger {
 public:
  Logger(LogLevel level, std::ostream& err) : level_(level), err_(err) {}
  void info(const std::string& m) const {
    if (level_ != LogLevel::Off) err_ << "[info] " << m << '\n';
  }
  void debug(const std::string& m) const {
    if (level_ == LogLevel::Debug) err_ << "[debug] " << m << '\n';
  }

 private:
  LogLevel level_;
  std::ostream& err_;
};

double parse_number(const std::string& s, const char* what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError(std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + *path + "'");
  f << text;
  f.flush();
  if (!f) throw ConfigError("write failed for '" + *path + "'");
}

// Non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void check_fields(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return item.key() == a; }) == allowed.end()) {
      throw ConfigError("unknown field '" + item.key() + "' in " + where);
    }
  }
}

double get_double(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string family_name(const Density& d) {
  switch (d.family().kind) {
    case FamilyKind::OddNormalPower:
      return "odd-normal-power";
    case FamilyKind::AbsNormalPower:
      return "abs-normal-power";
    case FamilyKind::Custom:
      break;
  }
  return "custom";
}

json describe_density(const Density& d) {
  json j;
  j["family"] = family_name(d);
  if (d.family().kind == FamilyKind::OddNormalPower) j["n"] = static_cast<int>(d.family().parameter);
  if (d.family().kind == FamilyKind::AbsNormalPower) j["r"] = d.family().parameter;
  j["support"] = d.support() == Support::RealLine ? "real" : "positive";
  return j;
}

Density resolve_density(const RunConfig& c) {
  if (c.density_spec) {
    if (c.family) throw ConfigError("--spec and --family are mutually exclusive");
    const auto first = c.density_spec->find_first_not_of(" \t\r\n");
    const bool inline_json = first != std::string::npos && (*c.density_spec)[first] == '{';
    return parse_density_spec(inline_json ? *c.density_spec : read_text(*c.density_spec));
  }
  if (!c.family) throw ConfigError("a density is required: --spec or --family");
  if (*c.family == "odd-normal-power") {
    if (!c.n) throw ConfigError("--family odd-normal-power needs --n");
    if (*c.n < 1) throw ConfigError("--n must be >= 1");
    return make_odd_normal_power(*c.n);
  }
  if (*c.family == "abs-normal-power") {
    if (!c.r) throw ConfigError("--family abs-normal-power needs --r");
    if (!(*c.r > 0.0)) throw ConfigError("--r must be positive");
    return make_abs_normal_power(*c.r);
  }
  throw ConfigError("unknown family '" + *c.family + "'");
}

GridSpec default_grid() { return GridSpec{}; }

std::vector<double> resolve_grid(const RunConfig& c, Support s) {
  return make_grid(c.grid ? *c.grid : default_grid(), s);
}

json verdict_json(const KreinVerdict& v) {
  json j;
  j["status"] = to_string(v.status);
  j["value"] = v.value ? number(*v.value) : json(nullptr);
  j["error_estimate"] = number(v.error_estimate);
  j["method"] = v.method == KreinMethod::Symbolic ? "symbolic" : "numeric";
  j["diagnostics"] = v.diagnostics;
  return j;
}

KreinVerdict krein_for(const Density& f, bool numeric) {
  const KreinMethod m = numeric ? KreinMethod::Numeric : KreinMethod::Auto;
  return f.support() == Support::RealLine ? krein_check_real(f, m) : krein_check_halfline(f, m);
}

json hilbert_expr_json(const HilbertExpr& e) {
  json j;
  j["constant"] = number(e.constant);
  j["sgn_coeff"] = number(e.sgn_coeff);
  json terms = json::array();
  for (const auto& t : e.terms) {
    terms.push_back(json{{"coeff", number(t.coeff)},
                         {"exponent", number(t.exponent)},
                         {"parity", t.parity == Parity::Even ? "even" : "odd"}});
  }
  j["terms"] = terms;
  return j;
}

json report_json(const MomentReport& r) {
  json j;
  j["orders"] = r.orders;
  j["center_moments"] = numbers(r.center_moments);
  j["perturbation_integrals"] = numbers(r.perturbation_integrals);
  j["errors"] = numbers(r.error_estimates);
  j["pass"] = r.pass;
  j["tolerance"] = number(r.tolerance);
  j["absolute_scales"] = numbers(r.absolute_scales);
  j["methods"] = r.methods;
  json st = json::array();
  for (auto s : r.statuses) st.push_back(to_string(s));
  j["statuses"] = st;
  j["member_epsilons"] = numbers(r.member_epsilons);
  json mm = json::array();
  for (const auto& row : r.member_moments) mm.push_back(numbers(row));
  j["member_moments"] = mm;
  json ok = json::array();
  for (bool b : r.member_ok) ok.push_back(b);
  j["member_ok"] = ok;
  return j;
}

StieltjesClass build_class(const Density& f, const RunConfig& c) {
  if (f.support() == Support::PositiveHalfLine) return build_class_halfline(f, c.max_order);
  return build_class_real(f, c.kind, c.max_order);
}

std::string members_csv(const StieltjesClass& cls, const std::vector<double>& grid) {
  static constexpr double kEps[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<Density> members;
  for (double e : kEps) members.push_back(cls.member(e));
  std::string s = "x,eps_-1,eps_-0.5,eps_0,eps_0.5,eps_1\n";
  for (double x : grid) {
    s += format_double(x);
    for (const auto& m : members) s += "," + format_double(m.eval(x));
    s += "\n";
  }
  return s;
}

std::optional<std::string> members_path(const RunConfig& c) {
  if (!c.output) return std::nullopt;
  return *c.output + ".members.csv";
}

// --- transform -------------------------------------------------------------

struct PhaseRow {
  double t = 0.0;
  double phase = 0.0;
  std::string method;
  double error = 0.0;
};

std::vector<PhaseRow> compute_phase(const Density& f, const std::vector<double>& grid, bool force_numeric,
                                    const Logger& log) {
  const bool real = f.support() == Support::RealLine;
  std::optional<HilbertExpr> sym;
  if (!force_numeric && f.log_expr()) {
    try {
      sym = real ? hilbert_symbolic(*f.log_expr()) : hilbert_e_symbolic(*f.log_expr());
    } catch (const UnsupportedTerm& e) {
      log.info(std::string("no closed-form transform, using quadrature: ") + e.what());
    }
  }
  if (sym) {
    std::vector<PhaseRow> rows;
    for (double t : grid) rows.push_back({t, (*sym)(t), "symbolic", 0.0});
    return rows;
  }

  std::function<double(double)> u = [f](double x) { return f.log_density(x); };
  HilbertOptions opts;
  opts.parity = real && f.symmetric() ? InputParity::Even : InputParity::General;
  if (real) {
    opts.check_integrability = false;
    const auto li = log_integrability(u, opts.parity == InputParity::Even);
    if (li.diverged) throw PreconditionError("ln f is not integrable against 1/(1+x^2)");
  } else {
    for (double t : grid) {
      if (!(t > 0.0)) throw ConfigError("half-line transform needs a grid with t > 0");
    }
  }
  return indexed_map(grid.size(), [&](std::size_t i) {
    const double t = grid[i];
    try {
      const auto r = real ? hilbert_numeric(u, t, opts) : hilbert_e_numeric(u, t, opts);
      return PhaseRow{t, r.value, "numeric", r.abs_error};
    } catch (const AccuracyError& e) {
      return PhaseRow{t, e.best_estimate(), "numeric-unconverged", e.error_estimate()};
    }
  });
}

int run_transform(const RunConfig& c, std::ostream& out, const Logger& log) {
  const Density f = resolve_density(c);
  const auto grid = resolve_grid(c, f.support());
  log.info("transform on " + std::to_string(grid.size()) + " points");
  const auto rows = compute_phase(f, grid, c.force_numeric, log);
  bool all_ok = true;
  std::string text;
  if (c.format.value_or(Format::CSV) == Format::CSV) {
    text = "t,phase,cos_phase,sin_phase,method,error_estimate\n";
    for (const auto& r : rows) {
      text += format_double(r.t) + "," + format_double(r.phase) + "," + format_double(std::cos(r.phase)) +
              "," + format_double(std::sin(r.phase)) + "," + r.method + "," + format_double(r.error) + "\n";
    }
  } else {
    json a = json::array();
    for (const auto& r : rows) {
      a.push_back(json{{"t", number(r.t)},
                       {"phase", number(r.phase)},
                       {"cos_phase", number(std::cos(r.phase))},
                       {"sin_phase", number(std::sin(r.phase))},
                       {"method", r.method},
                       {"error_estimate", number(r.error)}});
    }
    text = dump(a);
  }
  for (const auto& r : rows) all_ok = all_ok && r.method != "numeric-unconverged";
  write_text(c.output, text, out);
  return all_ok ? kOk : kVerificationFailed;
}

// --- krein-check -----------------------------------------------------------

int krein_exit(KreinStatus s) {
  switch (s) {
    case KreinStatus::Finite:
      return kOk;
    case KreinStatus::Divergent:
      return kPrecondition;
    case KreinStatus::Inconclusive:
      break;
  }
  return kVerificationFailed;
}

int run_krein(const RunConfig& c, std::ostream& out, const Logger& log) {
  const Density f = resolve_density(c);
  const KreinVerdict v = krein_for(f, c.force_numeric);
  log.info("krein verdict: " + to_string(v.status));
  log.debug(v.diagnostics);
  json j;
  j["density"] = describe_density(f);
  j["verdict"] = verdict_json(v);
  write_text(c.output, dump(j), out);
  return krein_exit(v.status);
}

// --- class build / verify --------------------------------------------------

int run_class(const RunConfig& c, std::ostream& out, const Logger& log, bool verify) {
  const Density f = resolve_density(c);
  const KreinVerdict v = krein_for(f, c.force_numeric);
  log.info("krein verdict: " + to_string(v.status));
  const StieltjesClass cls = build_class(f, c);
  const auto grid = resolve_grid(c, f.support());
  const std::string csv = members_csv(cls, grid);

  json j;
  j["density"] = describe_density(f);
  j["kind"] = to_string(cls.perturbation().kind());
  int code = kOk;
  if (verify) {
    VerifyOptions opts;
    opts.tolerance = c.tolerance;
    const MomentReport rep = verify_moments(cls, c.max_order, opts);
    for (std::size_t k = 0; k < rep.orders.size(); ++k) {
      log.debug("order " + std::to_string(rep.orders[k]) + ": " + format_double(rep.perturbation_integrals[k]) +
                " +- " + format_double(rep.error_estimates[k]) + " (" + rep.methods[k] + ", " +
                to_string(rep.statuses[k]) + ")");
    }
    j["report"] = report_json(rep);
    if (!rep.pass) code = kVerificationFailed;
  } else {
    j["krein"] = verdict_json(v);
    const auto& sym = cls.perturbation().symbolic_phase();
    j["phase"] = sym ? hilbert_expr_json(*sym) : json(nullptr);
    j["phase_method"] = sym ? "symbolic" : "numeric";
    j["nonzero"] = verify_nonzero(cls);
  }

  if (c.output) {
    write_text(c.output, dump(j), out);
    write_text(members_path(c), csv, out);
  } else {
    write_text(std::nullopt, c.format.value_or(Format::JSON) == Format::CSV ? csv : dump(j), out);
  }
  return code;
}

// --- example ---------------------------------------------------------------

struct Line {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<double> phase_grid(Support s) {
  GridSpec g;
  g.t_min = 1e-2;
  g.t_max = 1e2;
  g.count = 20;
  g.spacing = Spacing::LogSymmetric;
  return make_grid(g, s);
}

double max_ratio(const MomentReport& r) {
  double worst = 0.0;
  for (std::size_t k = 0; k < r.orders.size(); ++k) {
    const double bound = r.tolerance * std::max(1.0, std::abs(r.center_moments[k]));
    worst = std::max(worst, (std::abs(r.perturbation_integrals[k]) + r.error_estimates[k]) / bound);
  }
  return worst;
}

Line moment_line(const std::string& name, const MomentReport& r) {
  std::string d = "orders 0.." + std::to_string(r.orders.empty() ? -1 : r.orders.back()) +
                  " worst |integral|/bound " + format_double(max_ratio(r));
  return {name, r.pass, d};
}

Line mass_line(const StieltjesClass& cls, double tol) {
  bool ok = true;
  double worst = 0.0;
  for (double e : {-1.0, -0.5, 0.5, 1.0}) {
    const auto m = total_mass(cls.member(e), 1e-10);
    ok = ok && m.converged;
    worst = std::max(worst, std::abs(m.value - 1.0) + m.abs_error);
  }
  ok = ok && worst <= tol;
  return {"member masses " + to_string(cls.perturbation().kind()), ok, "max |mass - 1| " + format_double(worst)};
}

Line nonneg_line(const StieltjesClass& cls, const std::vector<double>& grid) {
  bool ok = true;
  for (double e : {-1.0, 1.0}) {
    const Density m = cls.member(e);
    for (double x : grid) ok = ok && m.eval(x) >= 0.0;
  }
  return {"member nonnegativity " + to_string(cls.perturbation().kind()), ok,
          std::to_string(grid.size()) + " points"};
}

int run_example(const RunConfig& c, std::ostream& out, const Logger& log) {
  if (!c.family) throw ConfigError("example needs --family");
  if (c.density_spec) throw ConfigError("example takes --family, not --spec");
  const Density f = resolve_density(c);
  const bool real = f.support() == Support::RealLine;
  std::vector<Line> lines;

  const KreinVerdict v = krein_for(f, c.force_numeric);
  lines.push_back({"krein", v.status == KreinStatus::Finite,
                   to_string(v.status) + (v.value ? " value " + format_double(*v.value) : std::string())});
  log.info("krein: " + to_string(v.status));
  const bool divergent = v.status == KreinStatus::Divergent;
  if (!divergent) {
    const auto grid = phase_grid(f.support());
    const auto cv = cross_validate(*f.log_expr(), grid, 1e-6, real ? Transform::H : Transform::He);
    lines.push_back({"phase cross-validation", cv.pass,
                     std::to_string(cv.entries.size()) + " points, max discrepancy " +
                         format_double(cv.max_discrepancy)});
    log.info("phase cross-validation done");

    VerifyOptions opts;
    opts.tolerance = c.tolerance;
    std::vector<StieltjesClass> classes;
    if (real) {
      classes.push_back(build_class_real(f, PerturbationKind::CosH, c.max_order));
      classes.push_back(build_class_real(f, PerturbationKind::SinH, c.max_order));
    } else {
      classes.push_back(build_class_halfline(f, c.max_order));
    }
    const auto member_grid = make_grid(GridSpec{1e-4, 1e4, 2000, Spacing::LogSymmetric}, f.support());
    for (const auto& cls : classes) {
      const std::string kind = to_string(cls.perturbation().kind());
      const auto rep = verify_moments(cls, c.max_order, opts);
      lines.push_back(moment_line("vanishing moments " + kind, rep));
      log.info("moments verified for " + kind);
      lines.push_back({"nonzero perturbation " + kind, verify_nonzero(cls), ""});
      lines.push_back(nonneg_line(cls, member_grid));
      lines.push_back(mass_line(cls, c.tolerance));
    }
    if (!real) {
      const auto comp = verify_unbounded_companion(f, c.max_order, opts);
      lines.push_back(moment_line("unbounded companion", comp));
    }
  }

  bool all = true;
  for (const auto& l : lines) all = all && l.pass;

  std::string text;
  if (c.format.value_or(Format::CSV) == Format::JSON) {
    json j;
    j["density"] = describe_density(f);
    json checks = json::array();
    for (const auto& l : lines) checks.push_back(json{{"check", l.name}, {"pass", l.pass}, {"detail", l.detail}});
    j["checks"] = checks;
    j["pass"] = all;
    text = dump(j);
  } else {
    const json d = describe_density(f);
    text = "density: " + d["family"].get<std::string>();
    if (d.contains("n")) text += " n=" + std::to_string(d["n"].get<int>());
    if (d.contains("r")) text += " r=" + format_double(d["r"].get<double>());
    text += "\n";
    for (const auto& l : lines) {
      text += l.name + ": " + (l.pass ? "pass" : "fail");
      if (!l.detail.empty()) text += " (" + l.detail + ")";
      text += "\n";
    }
    text += std::string("overall: ") + (all ? "pass" : "fail") + "\n";
  }
  write_text(c.output, text, out);
  if (divergent) return kPrecondition;
  return all ? kOk : kVerificationFailed;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  // Plain shortest form prints large integers in full; cap at 17 digits.
  if (std::abs(v) >= 1e17 && std::memchr(buf, 'e', p - buf) == nullptr) {
    p = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific).ptr;
  }
  return std::string(buf, p);
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) throw ConfigError("grid must be tmin,tmax,count[,log]");
  GridSpec g;
  g.t_min = parse_number(parts[0], "grid t_min");
  g.t_max = parse_number(parts[1], "grid t_max");
  const double count = parse_number(parts[2], "grid count");
  if (count != std::floor(count) || count > 1e7) throw ConfigError("grid count must be an integer");
  g.count = static_cast<int>(count);
  g.spacing = Spacing::Linear;
  if (parts.size() == 4) {
    if (parts[3] != "log") throw ConfigError("grid spacing must be 'log'");
    g.spacing = Spacing::LogSymmetric;
  }
  return g;
}

std::vector<double> make_grid(const GridSpec& g, Support support) {
  if (g.count < 2) throw ConfigError("grid needs at least 2 points");
  if (!(std::isfinite(g.t_min) && std::isfinite(g.t_max) && g.t_min < g.t_max)) {
    throw ConfigError("grid needs finite t_min < t_max");
  }
  std::vector<double> out;
  if (g.spacing == Spacing::Linear) {
    for (int i = 0; i < g.count; ++i) {
      out.push_back(i + 1 == g.count ? g.t_max : g.t_min + (g.t_max - g.t_min) * i / (g.count - 1));
    }
    return out;
  }
  if (!(g.t_min > 0.0)) throw ConfigError("log grid needs t_min > 0");
  const bool mirrored = support == Support::RealLine;
  if (mirrored && g.count % 2 != 0) throw ConfigError("log-symmetric grid needs an even count");
  const int half = mirrored ? g.count / 2 : g.count;
  std::vector<double> mags;
  const double l0 = std::log10(g.t_min), l1 = std::log10(g.t_max);
  for (int i = 0; i < half; ++i) {
    mags.push_back(half == 1 ? g.t_min : (i + 1 == half ? g.t_max : std::pow(10.0, l0 + (l1 - l0) * i / (half - 1))));
  }
  if (mirrored) {
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) out.push_back(-*it);
  }
  out.insert(out.end(), mags.begin(), mags.end());
  return out;
}

Density parse_density_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("density spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("density spec must be a JSON object");
  check_fields(j, {"family", "n", "r", "support", "log_expr"}, "density spec");
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("density spec needs a string 'family'");
  std::string fam = j["family"].get<std::string>();
  std::replace(fam.begin(), fam.end(), '_', '-');

  auto support_is = [&](const char* expected) {
    if (j.contains("support") && j["support"] != expected) {
      throw ConfigError(std::string("family ") + fam + " has support '" + expected + "'");
    }
  };

  if (fam == "odd-normal-power") {
    check_fields(j, {"family", "n", "support"}, "odd-normal-power spec");
    support_is("real");
    const double n = get_double(j, "n");
    if (n != std::floor(n) || n < 1 || n > 1000) throw ConfigError("'n' must be an integer >= 1");
    return make_odd_normal_power(static_cast<int>(n));
  }
  if (fam == "abs-normal-power") {
    check_fields(j, {"family", "r", "support"}, "abs-normal-power spec");
    support_is("positive");
    const double r = get_double(j, "r");
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("'r' must be positive");
    return make_abs_normal_power(r);
  }
  if (fam != "custom") throw ConfigError("unknown family '" + j["family"].get<std::string>() + "'");

  check_fields(j, {"family", "support", "log_expr"}, "custom spec");
  if (!j.contains("support") || !j["support"].is_string()) throw ConfigError("custom spec needs 'support'");
  const std::string s = j["support"].get<std::string>();
  Support support;
  if (s == "real") {
    support = Support::RealLine;
  } else if (s == "positive") {
    support = Support::PositiveHalfLine;
  } else {
    throw ConfigError("support must be 'real' or 'positive'");
  }
  if (!j.contains("log_expr") || !j["log_expr"].is_object()) throw ConfigError("custom spec needs 'log_expr'");
  const json& le = j["log_expr"];
  check_fields(le, {"constant", "log_coeff", "powers"}, "log_expr");
  const double constant = le.contains("constant") ? get_double(le, "constant") : 0.0;
  const double log_coeff = le.contains("log_coeff") ? get_double(le, "log_coeff") : 0.0;
  std::vector<PowerTerm> powers;
  if (le.contains("powers")) {
    if (!le["powers"].is_array()) throw ConfigError("'powers' must be an array of [coeff, exponent]");
    for (const auto& p : le["powers"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ConfigError("each power must be [coeff, exponent]");
      }
      powers.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  try {
    return make_from_log_expr(support, LogDensityExpr(constant, log_coeff, powers));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("custom density rejected: ") + e.what());
  } catch (const AccuracyError& e) {
    throw ConfigError(std::string("custom density mass could not be computed: ") + e.what());
  }
}

LogLevel log_level_from_env() {
  const char* v = std::getenv("KS_LOG");
  if (!v) return LogLevel::Off;
  const std::string s(v);
  if (s == "debug") return LogLevel::Debug;
  if (s == "info") return LogLevel::Info;
  return LogLevel::Off;
}

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out, int* exit_code) {
  CLI::App app{"Moment-indeterminate densities: transforms, Krein checks, Stieltjes classes", "ks"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string spec, family, grid, kind, format, output;
  int n = 0;
  double r = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--spec", spec, "density spec: JSON file path or inline JSON");
    sub->add_option("--family", family, "odd-normal-power | abs-normal-power")
        ->check(CLI::IsMember({"odd-normal-power", "abs-normal-power"}));
    sub->add_option("--n", n, "odd-normal-power parameter (>= 1)");
    sub->add_option("--r", r, "abs-normal-power parameter (> 0)");
    sub->add_option("--kind", kind, "perturbation on the real line: cos | sin")
        ->check(CLI::IsMember({"cos", "sin"}));
    sub->add_option("--grid", grid, "tmin,tmax,count[,log]");
    sub->add_option("--max-order", cfg.max_order, "highest moment order K")->check(CLI::Range(0, 16));
    sub->add_option("--tol", cfg.tolerance, "moment tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", output, "output path (stdout when absent)");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--numeric", cfg.force_numeric, "skip closed forms, use quadrature");
  };

  auto* transform = app.add_subcommand("transform", "phase (transform of ln f) on a grid");
  auto* krein = app.add_subcommand("krein-check", "logarithmic integral verdict");
  auto* cls = app.add_subcommand("class", "Stieltjes class commands");
  cls->require_subcommand(1);
  auto* build = cls->add_subcommand("build", "construct the class and sample its members");
  auto* verify = cls->add_subcommand("verify", "vanishing-moment report");
  auto* example = app.add_subcommand("example", "end-to-end run for a built-in family");
  for (auto* s : {transform, krein, build, verify, example}) common(s);

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    *exit_code = kOk;
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  if (transform->parsed()) cfg.command = Command::Transform;
  if (krein->parsed()) cfg.command = Command::KreinCheck;
  if (build->parsed()) cfg.command = Command::ClassBuild;
  if (verify->parsed()) cfg.command = Command::ClassVerify;
  if (example->parsed()) cfg.command = Command::Example;

  auto given = [&](const char* name) {
    for (auto* s : {transform, krein, build, verify, example}) {
      if (s->parsed() && s->count(name) > 0) return true;
    }
    return false;
  };
  if (given("--spec")) cfg.density_spec = spec;
  if (given("--family")) cfg.family = family;
  if (given("--n")) cfg.n = n;
  if (given("--r")) cfg.r = r;
  if (given("--kind")) cfg.kind = kind == "sin" ? PerturbationKind::SinH : PerturbationKind::CosH;
  if (given("--grid")) cfg.grid = parse_grid(grid);
  if (given("--out")) cfg.output = output;
  if (given("--format")) cfg.format = format == "json" ? Format::JSON : Format::CSV;
  cfg.log_level = log_level_from_env();
  return cfg;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Logger log(config.log_level, err);
  try {
    switch (config.command) {
      case Command::Transform:
        return run_transform(config, out, log);
      case Command::KreinCheck:
        return run_krein(config, out, log);
      case Command::ClassBuild:
        return run_class(config, out, log, false);
      case Command::ClassVerify:
        return run_class(config, out, log, true);
      case Command::Example:
        return run_example(config, out, log);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kIoOrParse;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const AccuracyError& e) {
    err << "accuracy not reached: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kVerificationFailed;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  int code = kOk;
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(args, out, &code);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kIoOrParse;
  }
  if (!cfg) return code;
  return run(*cfg, out, err);
}

}  // namespace ks::cli
