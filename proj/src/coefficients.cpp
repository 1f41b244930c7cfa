#include "pmlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmlab/operators.hpp"

namespace pmlab {
namespace {

double tab_eval(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  if (x <= xs.front()) return vs.front();
  if (x >= xs.back()) return vs.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t j = static_cast<size_t>(it - xs.begin());
  double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return (1.0 - w) * vs[j - 1] + w * vs[j];
}

}  // namespace

double ScalarCoeff::value(double x, double t) const {
  switch (family) {
    case CoeffFamily::constant:
      return c0;
    case CoeffFamily::gauss_decay:
      return amp * std::exp(-at * t - ax * x * x);
    case CoeffFamily::linear:
      return c0 + cx * x;
    case CoeffFamily::sine:
      return amp * std::sin(omega * x);
    case CoeffFamily::tabulated:
      return tab_eval(tab_x, tab_v, x);
  }
  return 0.0;
}

double ScalarCoeff::dx(double x, double t) const {
  switch (family) {
    case CoeffFamily::constant:
      return 0.0;
    case CoeffFamily::gauss_decay:
      return -2.0 * ax * x * value(x, t);
    case CoeffFamily::linear:
      return cx;
    case CoeffFamily::sine:
      return amp * omega * std::cos(omega * x);
    case CoeffFamily::tabulated: {
      // 4th-order central fallback; spacing chosen by the caller via eval_frame
      double h = tab_x.size() > 1 ? (tab_x[1] - tab_x[0]) : 1e-3;
      return (-value(x + 2 * h, t) + 8 * value(x + h, t) - 8 * value(x - h, t) +
              value(x - 2 * h, t)) /
             (12 * h);
    }
  }
  return 0.0;
}

double ScalarCoeff::dxx(double x, double t) const {
  switch (family) {
    case CoeffFamily::constant:
      return 0.0;
    case CoeffFamily::gauss_decay:
      return (4.0 * ax * ax * x * x - 2.0 * ax) * value(x, t);
    case CoeffFamily::linear:
      return 0.0;
    case CoeffFamily::sine:
      return -amp * omega * omega * std::sin(omega * x);
    case CoeffFamily::tabulated: {
      double h = tab_x.size() > 1 ? (tab_x[1] - tab_x[0]) : 1e-3;
      return (-value(x + 2 * h, t) + 16 * value(x + h, t) - 30 * value(x, t) +
              16 * value(x - h, t) - value(x - 2 * h, t)) /
             (12 * h * h);
    }
  }
  return 0.0;
}

double ScalarCoeff::dt(double x, double t) const {
  switch (family) {
    case CoeffFamily::gauss_decay:
      return -at * value(x, t);
    default:
      return 0.0;  // remaining families are static in t
  }
}

bool ScalarCoeff::time_dependent() const {
  return family == CoeffFamily::gauss_decay && at != 0.0;
}

ScalarCoeff ScalarCoeff::constant(double c) {
  ScalarCoeff s;
  s.family = CoeffFamily::constant;
  s.c0 = c;
  return s;
}
ScalarCoeff ScalarCoeff::gauss_decay(double amp, double ax, double at) {
  ScalarCoeff s;
  s.family = CoeffFamily::gauss_decay;
  s.amp = amp;
  s.ax = ax;
  s.at = at;
  return s;
}
ScalarCoeff ScalarCoeff::linear(double c0, double cx) {
  ScalarCoeff s;
  s.family = CoeffFamily::linear;
  s.c0 = c0;
  s.cx = cx;
  return s;
}
ScalarCoeff ScalarCoeff::sine(double amp, double omega) {
  ScalarCoeff s;
  s.family = CoeffFamily::sine;
  s.amp = amp;
  s.omega = omega;
  return s;
}
ScalarCoeff ScalarCoeff::tabulated(std::vector<double> xs, std::vector<double> vs) {
  if (xs.size() != vs.size() || xs.size() < 2)
    throw ValidationError("tabulated coefficient needs matching samples");
  ScalarCoeff s;
  s.family = CoeffFamily::tabulated;
  s.tab_x = std::move(xs);
  s.tab_v = std::move(vs);
  return s;
}

CoefficientFrame eval_frame(const CoefficientSpec& spec, const Grid& grid, double t) {
  CoefficientFrame fr;
  fr.t = t;
  fr.cap = ScalarField(grid, t);
  fr.drift = ScalarField(grid, t);
  fr.source = ScalarField(grid, t);
  fr.forcing = ScalarField(grid, t);
  fr.log_cap = ScalarField(grid, t);
  fr.cap_dt = ScalarField(grid, t);
  fr.div_cap_drift = ScalarField(grid, t);
  fr.fd_fallback = !(spec.cap.analytic() && spec.drift.analytic() && spec.source.analytic());

  const bool analytic = !fr.fd_fallback;
  const double h = grid.h;
  for (int i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    const double m = spec.cap.value(x, t);
    if (!(m >= spec.delta))
      throw EvalDomainError("eval_frame: cap fell below its declared lower bound delta");
    const double b = spec.drift.value(x, t);
    const double f = spec.source.value(x, t);
    double mt, div_mb;
    if (analytic) {
      mt = spec.cap.dt(x, t);
      // div(m b): 1d product rule; radial adds the m*b/r curvature term
      div_mb = spec.cap.dx(x, t) * b + m * spec.drift.dx(x, t);
      if (spec.dim == 2) div_mb += m * b / x;
    } else {
      // 4th-order central differences at grid spacing
      if (spec.dim == 2) {
        auto rmb = [&](double y) {
          return y * spec.cap.value(y, t) * spec.drift.value(y, t);
        };
        div_mb = (-rmb(x + 2 * h) + 8 * rmb(x + h) - 8 * rmb(x - h) + rmb(x - 2 * h)) /
                 (12 * h * x);
      } else {
        auto mb = [&](double y) { return spec.cap.value(y, t) * spec.drift.value(y, t); };
        div_mb = (-mb(x + 2 * h) + 8 * mb(x + h) - 8 * mb(x - h) + mb(x - 2 * h)) / (12 * h);
      }
      double dth = 1e-4 * std::max(1.0, std::fabs(t));
      mt = (spec.cap.value(x, t + dth) - spec.cap.value(x, t - dth)) / (2 * dth);
    }
    fr.cap[i] = m;
    fr.drift[i] = b;
    fr.source[i] = f;
    fr.cap_dt[i] = mt;
    fr.div_cap_drift[i] = div_mb;
    fr.log_cap[i] = std::log(m);
    fr.forcing[i] = (div_mb + m * f - mt) / m;
  }
  return fr;
}

double congestion_margin(const CoefficientFrame& frame, const std::vector<char>& region) {
  double eps = std::numeric_limits<double>::infinity();
  const int n = frame.cap.grid.n_cells;
  for (int i = 0; i < n; ++i) {
    if (!region.empty() && !region[i]) continue;
    double v = frame.cap[i] * frame.source[i] + frame.div_cap_drift[i] - frame.cap_dt[i];
    eps = std::min(eps, v);
  }
  return eps;
}

double congestion_margin(const CoefficientFrame& frame) {
  return congestion_margin(frame, {});
}

DiagnosticsReport validate_assumptions(const CoefficientSpec& spec, const Grid& grid,
                                       const ScalarField& rho0,
                                       const std::vector<double>& k_list, double t_end) {
  DiagnosticsReport rep;

  // cap lower bound over a space-time lattice
  double m_min = std::numeric_limits<double>::infinity();
  const int nt = 33;
  for (int j = 0; j < nt; ++j) {
    double t = t_end * j / (nt - 1);
    for (int i = 0; i < grid.n_cells; ++i)
      m_min = std::min(m_min, spec.cap.value(grid.center(i), t));
  }
  rep.add({"cap_lower_bound", m_min, spec.delta, m_min - spec.delta, m_min >= spec.delta, ""});

  // compact initial support, strictly inside (5-cell margin, matching the
  // solver's runtime guard)
  {
    bool ok = true;
    double gap = 0;
    try {
      Support s = support(rho0, 0.0);
      // for radial grids the inner edge r=0 is the symmetry axis, not a boundary
      int margin = grid.dim == 2 ? grid.n_cells - 1 - s.last
                                 : std::min(s.first, grid.n_cells - 1 - s.last);
      gap = margin;
      ok = margin >= 5;
    } catch (const EmptySupportError&) {
      ok = false;
    }
    rep.add({"initial_support_inside", gap, 5.0, gap - 5.0, ok, ""});
  }

  double r_min = *std::min_element(rho0.values.begin(), rho0.values.end());
  rep.add({"initial_nonnegative", r_min, 0.0, r_min, r_min >= 0.0, ""});

  Norms nr = norms(rho0);
  rep.add({"initial_linf_finite", nr.linf, 0.0, 0.0, std::isfinite(nr.linf), ""});
  double bv = bv_seminorm(rho0);
  rep.add({"initial_bv_finite", bv, 0.0, 0.0, std::isfinite(bv), ""});

  // initial pressure bound over the requested exponents
  double p_sup = 0;
  for (double k : k_list) {
    for (int i = 0; i < grid.n_cells; ++i) {
      double m0 = spec.cap.value(grid.center(i), 0.0);
      double v = rho0[i] / m0;
      p_sup = std::max(p_sup, k / (k - 1.0) * std::pow(v, k - 1.0));
    }
  }
  rep.add({"initial_pressure_bound", p_sup, 0.0, 0.0, std::isfinite(p_sup), ""});

  // geometry assumption: 1d, radial, or an explicitly declared decay flag
  bool geom_ok = grid.dim == 1 || grid.dim == 2 || spec.gradient_decay_declared;
  rep.add({"geometry_assumption", grid.dim == 2 ? 2.0 : 1.0, 0.0, 0.0, geom_ok,
           spec.gradient_decay_declared ? "accepted by declared flag" : ""});

  return rep;
}

FrameProvider::FrameProvider(CoefficientSpec spec, Grid grid)
    : spec_(std::move(spec)), grid_(grid) {
  static_coeffs_ = !(spec_.cap.time_dependent() || spec_.drift.time_dependent() ||
                     spec_.source.time_dependent());
}

const CoefficientFrame& FrameProvider::at(double t) {
  if (have_frame_ && (frame_.t == t || static_coeffs_)) {
    frame_.t = t;
    return frame_;
  }
  frame_ = eval_frame(spec_, grid_, t);
  have_frame_ = true;
  return frame_;
}

}  // namespace pmlab
