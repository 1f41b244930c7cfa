#include "pmlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pmlab/errors.hpp"
#include "pmlab/report.hpp"

namespace pmlab {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += fmt(vs[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

const char* kSections[] = {"scenario", "grid", "cap", "drift", "source", "initial", "solver"};

bool known_section(const std::string& s) {
  for (const char* k : kSections)
    if (s == k) return true;
  return false;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawScenario {
  std::string origin;
  std::map<std::string, std::map<std::string, Entry>> sections;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(origin + ": " + msg); }

  bool has(const std::string& sec) const { return sections.count(sec) != 0; }

  Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  Entry& require(const std::string& sec, const std::string& key) {
    Entry* e = find(sec, key);
    if (!e) fail("missing required key '" + key + "' in [" + sec + "]");
    return *e;
  }

  double as_double(const Entry& e, const std::string& key) const {
    std::size_t idx = 0;
    double v = 0.0;
    bool ok = true;
    try {
      v = std::stod(e.value, &idx);
    } catch (...) {
      ok = false;
    }
    if (!ok || idx != e.value.size())
      fail(e.line, "key '" + key + "': expected a number, got '" + e.value + "'");
    return v;
  }

  long as_long(const Entry& e, const std::string& key) const {
    std::size_t idx = 0;
    long v = 0;
    bool ok = true;
    try {
      v = std::stol(e.value, &idx);
    } catch (...) {
      ok = false;
    }
    if (!ok || idx != e.value.size())
      fail(e.line, "key '" + key + "': expected an integer, got '" + e.value + "'");
    return v;
  }

  bool as_bool(const Entry& e, const std::string& key) const {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e.line, "key '" + key + "': expected true or false, got '" + e.value + "'");
  }

  std::vector<double> as_list(const Entry& e, const std::string& key) const {
    std::vector<double> out;
    std::string item;
    std::istringstream in(e.value);
    while (std::getline(in, item, ',')) {
      item = trim(item);
      std::size_t idx = 0;
      bool ok = !item.empty();
      double v = 0.0;
      if (ok) {
        try {
          v = std::stod(item, &idx);
        } catch (...) {
          ok = false;
        }
      }
      if (!ok || idx != item.size())
        fail(e.line, "key '" + key + "': expected comma-separated numbers");
      out.push_back(v);
    }
    if (out.empty()) fail(e.line, "key '" + key + "': empty list");
    return out;
  }

  double get_double(const std::string& sec, const std::string& key) {
    return as_double(require(sec, key), key);
  }
  double get_double_or(const std::string& sec, const std::string& key, double def) {
    Entry* e = find(sec, key);
    return e ? as_double(*e, key) : def;
  }
  long get_long(const std::string& sec, const std::string& key) {
    return as_long(require(sec, key), key);
  }
  long get_long_or(const std::string& sec, const std::string& key, long def) {
    Entry* e = find(sec, key);
    return e ? as_long(*e, key) : def;
  }
  bool get_bool_or(const std::string& sec, const std::string& key, bool def) {
    Entry* e = find(sec, key);
    return e ? as_bool(*e, key) : def;
  }
  std::string get_string(const std::string& sec, const std::string& key) {
    return require(sec, key).value;
  }

  void finish() const {
    for (const auto& [sec, entries] : sections) {
      const Entry* worst = nullptr;
      std::string worst_key;
      for (const auto& [key, e] : entries) {
        if (!e.used && (!worst || e.line < worst->line)) {
          worst = &e;
          worst_key = key;
        }
      }
      if (worst) fail(worst->line, "unknown key '" + worst_key + "' in [" + sec + "]");
    }
  }
};

RawScenario tokenize(const std::string& text, const std::string& origin) {
  RawScenario raw;
  raw.origin = origin;
  std::istringstream in(text);
  std::string linebuf, section;
  int line_no = 0;
  while (std::getline(in, linebuf)) {
    ++line_no;
    std::string s = trim(linebuf);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') raw.fail(line_no, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (!known_section(section)) raw.fail(line_no, "unknown section [" + section + "]");
      if (raw.sections.count(section)) raw.fail(line_no, "duplicate section [" + section + "]");
      raw.sections[section];
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) raw.fail(line_no, "expected 'key = value', got '" + s + "'");
    if (section.empty()) raw.fail(line_no, "key outside any section");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) raw.fail(line_no, "empty key");
    auto& sec = raw.sections[section];
    if (sec.count(key)) raw.fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
    sec[key] = Entry{value, line_no, false};
  }
  return raw;
}

ScalarCoeff parse_coeff(RawScenario& raw, const std::string& sec) {
  if (!raw.has(sec)) return ScalarCoeff::constant(0.0);
  Entry& fam = raw.require(sec, "family");
  const std::string& family = fam.value;
  if (family == "constant") return ScalarCoeff::constant(raw.get_double(sec, "c"));
  if (family == "gauss_decay")
    return ScalarCoeff::gauss_decay(raw.get_double(sec, "amp"), raw.get_double(sec, "ax"),
                                    raw.get_double(sec, "at"));
  if (family == "linear")
    return ScalarCoeff::linear(raw.get_double(sec, "c0"), raw.get_double(sec, "cx"));
  if (family == "sine")
    return ScalarCoeff::sine(raw.get_double(sec, "amp"), raw.get_double(sec, "omega"));
  if (family == "tabulated") {
    Entry& ex = raw.require(sec, "xs");
    std::vector<double> xs = raw.as_list(ex, "xs");
    std::vector<double> vs = raw.as_list(raw.require(sec, "vs"), "vs");
    if (xs.size() != vs.size() || xs.size() < 2)
      raw.fail(ex.line, "tabulated family needs xs and vs of equal length >= 2");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) raw.fail(ex.line, "tabulated xs must be strictly increasing");
    return ScalarCoeff::tabulated(xs, vs);
  }
  raw.fail(fam.line, "unknown coefficient family '" + family + "'");
}

InitialData parse_initial(RawScenario& raw, const std::string& origin) {
  InitialData init;
  Entry& kind = raw.require("initial", "kind");
  if (kind.value == "patch") {
    init.kind = InitialData::Kind::patch;
    init.v0 = raw.get_double("initial", "v0");
    init.lo = raw.get_double("initial", "lo");
    init.hi = raw.get_double("initial", "hi");
    if (!(init.v0 >= 0.0)) raw.fail(kind.line, "patch v0 must be nonnegative");
    if (!(init.lo < init.hi)) raw.fail(kind.line, "patch needs lo < hi");
  } else if (kind.value == "barenblatt") {
    init.kind = InitialData::Kind::barenblatt;
    init.c = raw.get_double("initial", "c");
    init.t0 = raw.get_double("initial", "t0");
    if (!(init.c > 0.0)) raw.fail(kind.line, "barenblatt c must be positive");
    if (!(init.t0 > 0.0)) raw.fail(kind.line, "barenblatt t0 must be positive");
  } else if (kind.value == "gaussian") {
    init.kind = InitialData::Kind::gaussian;
    init.amp = raw.get_double("initial", "amp");
    init.sigma = raw.get_double("initial", "sigma");
    init.center = raw.get_double_or("initial", "center", 0.0);
    init.cut = raw.get_double_or("initial", "cut", 4.0);
    if (!(init.amp >= 0.0)) raw.fail(kind.line, "gaussian amp must be nonnegative");
    if (!(init.sigma > 0.0)) raw.fail(kind.line, "gaussian sigma must be positive");
    if (!(init.cut > 0.0)) raw.fail(kind.line, "gaussian cut must be positive");
  } else if (kind.value == "file") {
    init.kind = InitialData::Kind::file;
    init.path = raw.get_string("initial", "path");
    std::ifstream in(init.path);
    if (!in)
      throw ParseError(origin + ": initial data file '" + init.path + "' is not readable");
    std::string linebuf;
    int line_no = 0;
    while (std::getline(in, linebuf)) {
      ++line_no;
      std::string s = trim(linebuf);
      if (s.empty() || s[0] == '#') continue;
      std::size_t comma = s.find(',');
      if (comma == std::string::npos)
        throw ParseError(init.path + ":" + std::to_string(line_no) + ": expected 'x,density'");
      std::string xs = trim(s.substr(0, comma));
      std::string vs = trim(s.substr(comma + 1));
      std::size_t ix = 0, iv = 0;
      double x = 0.0, v = 0.0;
      bool ok = true;
      try {
        x = std::stod(xs, &ix);
        v = std::stod(vs, &iv);
      } catch (...) {
        ok = false;
      }
      if (!ok || ix != xs.size() || iv != vs.size())
        throw ParseError(init.path + ":" + std::to_string(line_no) + ": expected 'x,density'");
      init.tab_x.push_back(x);
      init.tab_v.push_back(v);
    }
    if (init.tab_x.size() < 2)
      throw ParseError(init.path + ": needs at least two rows of initial data");
    for (std::size_t i = 1; i < init.tab_x.size(); ++i)
      if (!(init.tab_x[i] > init.tab_x[i - 1]))
        throw ParseError(init.path + ": x column must be strictly increasing");
  } else {
    raw.fail(kind.line, "unknown initial kind '" + kind.value + "'");
  }
  return init;
}

void write_coeff(std::ostringstream& out, const char* sec, const ScalarCoeff& c) {
  out << "\n[" << sec << "]\n";
  switch (c.family) {
    case CoeffFamily::constant:
      out << "family = constant\n"
          << "c = " << fmt(c.c0) << "\n";
      break;
    case CoeffFamily::gauss_decay:
      out << "family = gauss_decay\n"
          << "amp = " << fmt(c.amp) << "\n"
          << "ax = " << fmt(c.ax) << "\n"
          << "at = " << fmt(c.at) << "\n";
      break;
    case CoeffFamily::linear:
      out << "family = linear\n"
          << "c0 = " << fmt(c.c0) << "\n"
          << "cx = " << fmt(c.cx) << "\n";
      break;
    case CoeffFamily::sine:
      out << "family = sine\n"
          << "amp = " << fmt(c.amp) << "\n"
          << "omega = " << fmt(c.omega) << "\n";
      break;
    case CoeffFamily::tabulated:
      out << "family = tabulated\n"
          << "xs = " << fmt_list(c.tab_x) << "\n"
          << "vs = " << fmt_list(c.tab_v) << "\n";
      break;
  }
}

}  // namespace

double barenblatt_density(double x, double t, double c) {
  if (!(t > 0.0)) throw ValidationError("self-similar profile needs t > 0");
  double t13 = std::cbrt(t);
  double val = c - x * x / (12.0 * t13 * t13);
  return val > 0.0 ? val / t13 : 0.0;
}

double barenblatt_pressure(double x, double t, double c) {
  return 2.0 * barenblatt_density(x, t, c);
}

double barenblatt_mass(double c) {
  return (4.0 / 3.0) * std::sqrt(12.0) * std::pow(c, 1.5);
}

std::function<double(double)> Scenario::rho0_fn() const {
  switch (init.kind) {
    case InitialData::Kind::patch: {
      ScalarCoeff cap = coeffs.cap;
      double v0 = init.v0, lo = init.lo, hi = init.hi;
      return [cap, v0, lo, hi](double x) {
        return (x >= lo && x <= hi) ? v0 * cap.value(x, 0.0) : 0.0;
      };
    }
    case InitialData::Kind::barenblatt: {
      double c = init.c, t0 = init.t0;
      return [c, t0](double x) { return barenblatt_density(x, t0, c); };
    }
    case InitialData::Kind::gaussian: {
      double amp = init.amp, sig = init.sigma, ctr = init.center, cut = init.cut;
      return [amp, sig, ctr, cut](double x) {
        double d = x - ctr;
        if (std::abs(d) > cut * sig) return 0.0;
        return amp * std::exp(-d * d / (2.0 * sig * sig));
      };
    }
    case InitialData::Kind::file: {
      std::vector<double> xs = init.tab_x, vs = init.tab_v;
      return [xs, vs](double x) {
        if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.begin()) return vs.front();
        if (it == xs.end()) return vs.back();
        std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
        double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
        return (1.0 - w) * vs[j] + w * vs[j + 1];
      };
    }
  }
  throw ValidationError("initial data kind is unset");
}

ScalarField Scenario::rho0() const { return make_field(grid, 0.0, rho0_fn()); }

std::function<double(double, double)> Scenario::source_fn() const {
  ScalarCoeff f = coeffs.source;
  return [f](double x, double t) { return f.value(x, t); };
}

std::function<double(double, double)> Scenario::div_drift_fn() const {
  ScalarCoeff b = coeffs.drift;
  if (coeffs.dim == 2) {
    return [b](double r, double t) {
      double slope = b.dx(r, t);
      if (r <= 1e-9) return 2.0 * slope;
      return slope + b.value(r, t) / r;
    };
  }
  return [b](double x, double t) { return b.dx(x, t); };
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  RawScenario raw = tokenize(text, origin);
  Scenario s;

  s.id = raw.get_string("scenario", "id");
  if (s.id.empty()) raw.fail("scenario id must not be empty");
  s.congested = raw.get_bool_or("scenario", "congested", false);
  s.coeffs.delta = raw.get_double_or("scenario", "delta", 1e-6);
  if (!(s.coeffs.delta > 0.0)) raw.fail("delta must be positive");
  s.coeffs.gradient_decay_declared =
      raw.get_bool_or("scenario", "declare_gradient_decay", false);

  long dim = raw.get_long("grid", "dim");
  long n = raw.get_long("grid", "n");
  double x_lo = raw.get_double("grid", "x_lo");
  double x_hi = raw.get_double("grid", "x_hi");
  {
    Entry& e = raw.require("grid", "dim");
    if (dim != 1 && dim != 2) raw.fail(e.line, "dim must be 1 or 2");
    if (n < 8) raw.fail(e.line, "n must be at least 8");
    if (!(x_hi > x_lo)) raw.fail(e.line, "x_hi must exceed x_lo");
    if (dim == 2 && x_lo != 0.0) raw.fail(e.line, "a radial grid must start at r = 0");
  }
  s.grid = Grid(static_cast<int>(dim), static_cast<int>(n), x_lo, x_hi);
  s.coeffs.dim = s.grid.dim;

  s.coeffs.cap = parse_coeff(raw, "cap");
  if (!raw.has("cap")) raw.fail("missing required section [cap]");
  s.coeffs.drift = parse_coeff(raw, "drift");
  s.coeffs.source = parse_coeff(raw, "source");

  s.init = parse_initial(raw, origin);

  s.solver.k = raw.get_double("solver", "k");
  if (!(s.solver.k > 1.0)) raw.fail("solver k must exceed 1");
  s.solver.t_end = raw.get_double("solver", "t_end");
  if (!(s.solver.t_end > 0.0)) raw.fail("solver t_end must be positive");

  Entry* explicit_times = raw.find("solver", "output_times");
  if (explicit_times) {
    if (raw.find("solver", "outputs"))
      raw.fail(explicit_times->line, "give either outputs or output_times, not both");
    std::vector<double> times = raw.as_list(*explicit_times, "output_times");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        raw.fail(explicit_times->line, "output_times must be strictly increasing");
    if (times.front() < 0.0 || times.back() > s.solver.t_end + 1e-12)
      raw.fail(explicit_times->line, "output_times must lie in [0, t_end]");
    s.solver.output_times = times;
  } else {
    long outputs = raw.get_long_or("solver", "outputs", 10);
    if (outputs < 1) raw.fail("outputs must be at least 1");
    s.solver.output_times = linspace_times(0.0, s.solver.t_end, static_cast<int>(outputs));
  }

  s.solver.cfl_safety = raw.get_double_or("solver", "cfl_safety", 0.4);
  if (!(s.solver.cfl_safety > 0.0 && s.solver.cfl_safety <= 1.0))
    raw.fail("cfl_safety must lie in (0, 1]");
  s.solver.v_cap = raw.get_double_or("solver", "v_cap", 3.0);
  if (!(s.solver.v_cap > 1.0)) raw.fail("v_cap must exceed 1");
  s.solver.max_steps = raw.get_long_or("solver", "max_steps", 20'000'000);
  if (s.solver.max_steps < 1) raw.fail("max_steps must be positive");
  if (Entry* e = raw.find("solver", "regularization_n")) {
    long rn = raw.as_long(*e, "regularization_n");
    if (rn < 2) raw.fail(e->line, "regularization_n must be at least 2");
    s.solver.regularization_n = rn;
  }

  raw.finish();
  return s;
}

std::string write_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\n"
      << "id = " << s.id << "\n"
      << "congested = " << (s.congested ? "true" : "false") << "\n"
      << "delta = " << fmt(s.coeffs.delta) << "\n"
      << "declare_gradient_decay = " << (s.coeffs.gradient_decay_declared ? "true" : "false")
      << "\n";

  out << "\n[grid]\n"
      << "dim = " << s.grid.dim << "\n"
      << "n = " << s.grid.n_cells << "\n"
      << "x_lo = " << fmt(s.grid.x_lo) << "\n"
      << "x_hi = " << fmt(s.grid.x_hi) << "\n";

  write_coeff(out, "cap", s.coeffs.cap);
  write_coeff(out, "drift", s.coeffs.drift);
  write_coeff(out, "source", s.coeffs.source);

  out << "\n[initial]\n";
  switch (s.init.kind) {
    case InitialData::Kind::patch:
      out << "kind = patch\n"
          << "v0 = " << fmt(s.init.v0) << "\n"
          << "lo = " << fmt(s.init.lo) << "\n"
          << "hi = " << fmt(s.init.hi) << "\n";
      break;
    case InitialData::Kind::barenblatt:
      out << "kind = barenblatt\n"
          << "c = " << fmt(s.init.c) << "\n"
          << "t0 = " << fmt(s.init.t0) << "\n";
      break;
    case InitialData::Kind::gaussian:
      out << "kind = gaussian\n"
          << "amp = " << fmt(s.init.amp) << "\n"
          << "sigma = " << fmt(s.init.sigma) << "\n"
          << "center = " << fmt(s.init.center) << "\n"
          << "cut = " << fmt(s.init.cut) << "\n";
      break;
    case InitialData::Kind::file:
      out << "kind = file\n"
          << "path = " << s.init.path << "\n";
      break;
  }

  out << "\n[solver]\n"
      << "k = " << fmt(s.solver.k) << "\n"
      << "t_end = " << fmt(s.solver.t_end) << "\n";
  const std::vector<double>& times = s.solver.output_times;
  int intervals = static_cast<int>(times.size()) - 1;
  if (times.size() >= 2 && times == linspace_times(0.0, s.solver.t_end, intervals))
    out << "outputs = " << intervals << "\n";
  else
    out << "output_times = " << fmt_list(times) << "\n";
  out << "cfl_safety = " << fmt(s.solver.cfl_safety) << "\n"
      << "v_cap = " << fmt(s.solver.v_cap) << "\n"
      << "max_steps = " << s.solver.max_steps << "\n";
  if (s.solver.regularization_n)
    out << "regularization_n = " << *s.solver.regularization_n << "\n";
  return out.str();
}

namespace {

Scenario make_fig1() {
  Scenario s;
  s.id = "fig1";
  s.coeffs.cap = ScalarCoeff::gauss_decay(1.0, 0.1, 1.0 / 6.0);
  s.coeffs.drift = ScalarCoeff::constant(0.0);
  s.coeffs.source = ScalarCoeff::constant(0.0);
  s.coeffs.dim = 1;
  s.grid = Grid(1, 160, -3.0, 3.0);
  s.init.kind = InitialData::Kind::patch;
  s.init.v0 = 0.9;
  s.init.lo = -1.0;
  s.init.hi = 1.0;
  s.solver.k = 40.0;
  s.solver.t_end = 1.0;
  s.solver.output_times = linspace_times(0.0, 1.0, 50);
  s.congested = true;
  return s;
}

Scenario make_fig1_saturated() {
  Scenario s = make_fig1();
  s.id = "fig1-saturated";
  s.init.v0 = 1.0;
  s.grid = Grid(1, 96, -3.0, 3.0);
  s.solver.k = 80.0;
  return s;
}

Scenario make_pme_barenblatt() {
  Scenario s;
  s.id = "pme-barenblatt";
  s.coeffs.cap = ScalarCoeff::constant(1.0);
  s.coeffs.drift = ScalarCoeff::constant(0.0);
  s.coeffs.source = ScalarCoeff::constant(0.0);
  s.coeffs.dim = 1;
  s.grid = Grid(1, 400, -5.0, 5.0);
  s.init.kind = InitialData::Kind::barenblatt;
  s.init.c = 1.0;
  s.init.t0 = 1.0;
  s.solver.k = 2.0;
  s.solver.t_end = 0.25;
  s.solver.output_times = linspace_times(0.0, 0.25, 50);
  s.congested = false;
  return s;
}

Scenario make_radial_source() {
  Scenario s;
  s.id = "radial-source";
  s.coeffs.cap = ScalarCoeff::constant(1.0);
  s.coeffs.drift = ScalarCoeff::constant(0.0);
  s.coeffs.source = ScalarCoeff::constant(0.5);
  s.coeffs.dim = 2;
  s.grid = Grid(2, 256, 0.0, 4.0);
  s.init.kind = InitialData::Kind::patch;
  s.init.v0 = 1.0;
  s.init.lo = 0.0;
  s.init.hi = 1.0;
  s.solver.k = 80.0;
  s.solver.t_end = 0.6;
  s.solver.output_times = linspace_times(0.0, 0.6, 6);
  s.congested = true;
  return s;
}

Scenario make_expander() {
  Scenario s;
  s.id = "expander";
  s.coeffs.cap = ScalarCoeff::constant(1.0);
  s.coeffs.drift = ScalarCoeff::linear(0.0, -0.5);
  s.coeffs.source = ScalarCoeff::constant(0.25);
  // the outward drift advects the tail to ~4.6 and upwind smearing adds a
  // numerical-diffusion skirt several widths beyond it, so the domain needs
  // generous clearance from the 5-cell boundary guard
  s.coeffs.dim = 1;
  s.grid = Grid(1, 280, -14.0, 14.0);
  s.init.kind = InitialData::Kind::gaussian;
  s.init.amp = 0.7;
  s.init.sigma = 0.7;
  s.init.center = 0.0;
  s.init.cut = 4.0;
  s.solver.k = 20.0;
  s.solver.t_end = 1.0;
  s.solver.output_times = linspace_times(0.0, 1.0, 50);
  s.congested = false;
  return s;
}

Scenario make_transport() {
  Scenario s;
  s.id = "transport";
  s.coeffs.cap = ScalarCoeff::constant(1.0);
  s.coeffs.drift = ScalarCoeff::constant(-0.4);
  s.coeffs.source = ScalarCoeff::constant(0.0);
  s.coeffs.dim = 1;
  s.grid = Grid(1, 160, -3.0, 3.0);
  s.init.kind = InitialData::Kind::patch;
  s.init.v0 = 0.3;
  s.init.lo = -1.0;
  s.init.hi = 1.0;
  s.solver.k = 80.0;
  s.solver.t_end = 1.0;
  s.solver.output_times = linspace_times(0.0, 1.0, 20);
  s.congested = false;
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"fig1", "fig1-saturated", "pme-barenblatt", "radial-source", "expander", "transport"};
}

Scenario builtin_scenario(const std::string& id) {
  if (id == "fig1") return make_fig1();
  if (id == "fig1-saturated") return make_fig1_saturated();
  if (id == "pme-barenblatt") return make_pme_barenblatt();
  if (id == "radial-source") return make_radial_source();
  if (id == "expander") return make_expander();
  if (id == "transport") return make_transport();
  throw ParseError("unknown built-in scenario '" + id + "'");
}

void validate_scenario(const Scenario& s) {
  if (s.grid.dim != s.coeffs.dim)
    throw ValidationError("scenario '" + s.id + "': grid and coefficient dimensions disagree");
  ScalarField r0 = s.rho0();
  DiagnosticsReport rep =
      validate_assumptions(s.coeffs, s.grid, r0, {s.solver.k}, s.solver.t_end);
  if (!rep.all_pass()) {
    std::string failed;
    for (const CheckResult& c : rep.checks)
      if (!c.pass) {
        if (!failed.empty()) failed += ", ";
        failed += c.name;
      }
    throw ValidationError("scenario '" + s.id + "' failed assumption checks: " + failed);
  }
}

Scenario load_scenario(const std::string& name_or_path) {
  for (const std::string& n : builtin_scenario_names())
    if (n == name_or_path) {
      Scenario s = builtin_scenario(n);
      validate_scenario(s);
      return s;
    }
  std::ifstream in(name_or_path);
  if (!in)
    throw ParseError("scenario '" + name_or_path +
                     "' is neither a built-in name nor a readable file");
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), name_or_path);
  validate_scenario(s);
  return s;
}

}  // namespace pmlab
