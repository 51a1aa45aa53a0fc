#pragma once

// Adaptive Gauss-Kronrod panels over finite intervals, with forced split
// points so that integrands with known kinks or jumps are never sampled
// across a discontinuity. Infinite upper limits are reduced to finite
// integrals by the callers (closed forms, substitutions, or certified
// truncation); this file never sees them.

#include "common.hpp"

#include <queue>

namespace oscilla {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_panels = 20000;
};

struct QuadResult {
  double value = 0;
  double error = 0;  // estimated absolute error
  int panels = 0;
  bool converged = true;
};

namespace detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule on [-1,1].
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
  double kronrod, gauss, resabs;
};

template <class F>
PanelEstimate gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  PanelEstimate e{0, 0, 0};
  const double fc = f(c);
  e.kronrod = gk_wk[7] * fc;
  e.gauss = gk_wg[3] * fc;
  e.resabs = gk_wk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * gk_x[j];
    const double f1 = f(c - dx), f2 = f(c + dx);
    e.kronrod += gk_wk[j] * (f1 + f2);
    e.resabs += gk_wk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) e.gauss += gk_wg[j / 2] * (f1 + f2);
  }
  e.kronrod *= h;
  e.gauss *= h;
  e.resabs *= std::abs(h);
  return e;
}

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace detail

// Integrate f over [a,b]. `splits` lists abscissae where the integrand may be
// discontinuous or kinked; panels never straddle them.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     const std::vector<double>& splits = {}) {
  QuadResult res;
  if (a == b) return res;
  if (!(a < b)) throw parameter_error("integrate: requires a < b");
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : splits)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel> heap;
  double total = 0, toterr = 0;
  auto push_panel = [&](double lo, double hi) {
    auto e = detail::gk15(f, lo, hi);
    const double err = std::abs(e.kronrod - e.gauss);
    heap.push({lo, hi, e.kronrod, err});
    total += e.kronrod;
    toterr += err;
    ++res.panels;
  };
  for (size_t i = 0; i + 1 < cuts.size(); ++i) push_panel(cuts[i], cuts[i + 1]);

  while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) &&
         res.panels < opt.max_panels) {
    detail::Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    toterr -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at rounding limit
      total += worst.value;
      toterr += worst.err;
      break;
    }
    push_panel(worst.a, mid);
    push_panel(mid, worst.b);
  }
  res.value = total;
  res.error = toterr;
  res.converged = toterr <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) * 1.0001 ||
                  toterr <= opt.abs_tol;
  return res;
}

// Running integral F(t) = int_lo^t g over [lo, hi], accumulated once on a
// geometric grid (plus forced split points) and evaluated anywhere in range
// by one extra panel from the nearest node. Suited to sweeps that need many
// values of the same running quantity.
class CumulativeTable {
 public:
  template <class F>
  CumulativeTable(F&& g, double lo, double hi, int nodes,
                  const std::vector<double>& splits = {}, QuadOptions opt = {})
      : opt_(opt), g_(std::forward<F>(g)) {
    if (!(lo < hi)) throw parameter_error("CumulativeTable: requires lo < hi");
    grid_ = lo > 0 ? geomspace(lo, hi, nodes + 1) : linspace(lo, hi, nodes + 1);
    for (double s : splits)
      if (s > lo && s < hi) grid_.push_back(s);
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
    cum_.assign(grid_.size(), 0.0);
    err_.assign(grid_.size(), 0.0);
    for (size_t i = 0; i + 1 < grid_.size(); ++i) {
      const auto r = integrate(g_, grid_[i], grid_[i + 1], opt_);
      cum_[i + 1] = cum_[i] + r.value;
      err_[i + 1] = err_[i] + r.error;
    }
  }

  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }

  double operator()(double t) const {
    if (!(t >= grid_.front() && t <= grid_.back()))
      throw domain_error("CumulativeTable: t outside tabulated range");
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    size_t i = (it == grid_.begin()) ? 0 : static_cast<size_t>(it - grid_.begin()) - 1;
    if (i + 1 >= grid_.size()) i = grid_.size() - 2;
    if (t == grid_[i]) return cum_[i];
    return cum_[i] + integrate(g_, grid_[i], t, opt_).value;
  }

  double error_at(double t) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    size_t i = (it == grid_.begin()) ? 0 : static_cast<size_t>(it - grid_.begin()) - 1;
    if (i + 1 >= grid_.size()) i = grid_.size() - 2;
    return err_[i + 1];
  }

 private:
  QuadOptions opt_;
  std::function<double(double)> g_;
  std::vector<double> grid_, cum_, err_;
};

}  // namespace oscilla
