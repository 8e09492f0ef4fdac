#include "exflow/transport.hpp"

#include <algorithm>
#include <cmath>

namespace exflow {

namespace {

// Integral over [a, b] of the Lagrange factor (x - p)(x - q).
double lagrange_integral(double p, double q, double a, double b) {
  auto antiderivative = [&](double x) {
    return x * x * x / 3.0 - (p + q) * x * x / 2.0 + p * q * x;
  };
  return antiderivative(b) - antiderivative(a);
}

// Cumulative quadrature of H_u(S(u)) along the grid, added to the initial
// value a.  Each step integrates the quadratic through three neighboring
// nodes (cumulative Simpson), falling back to the trapezoid on two nodes.
std::vector<AlgebraElement> picard_step(const ExpectationPath& ep,
                                        const AlgebraElement& a,
                                        const std::vector<double>& grid,
                                        const std::vector<AlgebraElement>& s) {
  const std::size_t m = grid.size();
  std::vector<AlgebraElement> h_vals(m);
  for (std::size_t j = 0; j < m; ++j)
    h_vals[j] = ep.commutator_field(grid[j], s[j]);
  std::vector<AlgebraElement> out(m);
  out[0] = a;
  AlgebraElement acc = ep.algebra().zero();
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double lo = grid[j], hi = grid[j + 1];
    if (m == 2) {
      acc += 0.5 * (hi - lo) * (h_vals[j] + h_vals[j + 1]);
    } else {
      const std::size_t k = j == 0 ? 0 : j - 1;  // stencil {k, k+1, k+2}
      // Shift times to the panel start; the cubic antiderivative would lose
      // most of its precision to cancellation for absolute times near 1.
      const double t0 = grid[k] - lo, t1 = grid[k + 1] - lo,
                   t2 = grid[k + 2] - lo;
      const double w0 =
          lagrange_integral(t1, t2, 0.0, hi - lo) / ((t0 - t1) * (t0 - t2));
      const double w1 =
          lagrange_integral(t0, t2, 0.0, hi - lo) / ((t1 - t0) * (t1 - t2));
      const double w2 =
          lagrange_integral(t0, t1, 0.0, hi - lo) / ((t2 - t0) * (t2 - t1));
      acc += w0 * h_vals[k] + w1 * h_vals[k + 1] + w2 * h_vals[k + 2];
    }
    out[j + 1] = a + acc;
  }
  return out;
}

double sup_diff(const TracialAlgebra& alg,
                const std::vector<AlgebraElement>& x,
                const std::vector<AlgebraElement>& y) {
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    d = std::max(d, alg.two_norm(x[j] - y[j]));
  return d;
}

std::vector<double> uniform_grid(double from, double to, int nodes) {
  std::vector<double> g(nodes);
  for (int j = 0; j < nodes; ++j)
    g[j] = from + (to - from) * j / (nodes - 1);
  g.back() = to;
  return g;
}

}  // namespace

std::vector<std::vector<AlgebraElement>> picard_sequence(
    const ExpectationPath& ep, double s0, const AlgebraElement& a,
    const std::vector<double>& grid, int n_max) {
  ep.algebra().check(a);
  if (grid.size() < 2 || grid.front() != s0)
    throw std::invalid_argument("grid must start at s0 and have >= 2 nodes");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (grid[j] <= grid[j - 1])
      throw std::invalid_argument("grid must be strictly increasing");

  std::vector<std::vector<AlgebraElement>> iterates;
  iterates.emplace_back(grid.size(), a);  // S_0 = a
  for (int n = 0; n < n_max; ++n)
    iterates.push_back(picard_step(ep, a, grid, iterates.back()));
  return iterates;
}

AlgebraElement picard_solve(const ExpectationPath& ep, double s,
                            const AlgebraElement& a, double t,
                            const PicardConfig& config,
                            PicardDiagnostics* diag) {
  ep.algebra().check(a);
  if (config.contraction_target <= 0.0 || config.contraction_target >= 1.0)
    throw std::invalid_argument("contraction target must be in (0, 1)");
  if (config.tol <= 0.0) throw std::invalid_argument("tolerance must be > 0");
  if (t == s) return a;

  const double lo = std::min(s, t), hi = std::max(s, t);
  double c;
  if (config.empirical_c) {
    c = *config.empirical_c;
  } else {
    c = ep.estimate_hypothesis_constant(lo, hi, config.hypothesis_samples,
                                        config.hypothesis_grid,
                                        config.hypothesis_seed)
            .empirical;
  }
  if (diag) {
    diag->empirical_c = c;
    diag->sub_intervals.clear();
  }

  const double span = hi - lo;
  const double k0 = config.contraction_target;
  double max_len = c > 0.0 ? k0 * k0 / c : span;
  max_len = std::min(max_len, span);
  const int pieces = std::max(1, static_cast<int>(std::ceil(span / max_len)));

  AlgebraElement value = a;
  double from = s;
  const double dir = t > s ? 1.0 : -1.0;
  for (int piece = 0; piece < pieces; ++piece) {
    const double to = piece + 1 == pieces ? t : s + dir * span * (piece + 1) / pieces;
    const std::vector<double> grid = uniform_grid(from, to, config.grid);
    std::vector<AlgebraElement> cur(grid.size(), value);
    PicardDiagnostics::SubInterval info;
    info.from = from;
    info.to = to;
    double prev_diff = -1.0;
    bool converged = false;
    for (int it = 0; it < config.max_iterations; ++it) {
      std::vector<AlgebraElement> next = picard_step(ep, value, grid, cur);
      const double diff = sup_diff(ep.algebra(), next, cur);
      if (prev_diff > 0.0)
        info.contraction_ratios.push_back(diff / prev_diff);
      prev_diff = diff;
      cur = std::move(next);
      info.iterations = it + 1;
      if (diff < config.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      const double last_ratio = info.contraction_ratios.empty()
                                    ? 0.0
                                    : info.contraction_ratios.back();
      throw SolverFailure(
          "Picard iteration budget exhausted on [" + std::to_string(from) +
          ", " + std::to_string(to) + "], last contraction ratio " +
          std::to_string(last_ratio));
    }
    if (diag) diag->sub_intervals.push_back(std::move(info));
    value = cur.back();
    from = to;
  }
  return value;
}

AlgebraElement rk4_solve(const ExpectationPath& ep, double s,
                         const AlgebraElement& a, double t, double step) {
  ep.algebra().check(a);
  if (step <= 0.0) throw std::invalid_argument("step must be positive");
  if (t == s) return a;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t - s) / step)));
  const double h = (t - s) / steps;
  AlgebraElement y = a;
  for (int i = 0; i < steps; ++i) {
    const double u = s + i * h;
    const AlgebraElement k1 = ep.commutator_field(u, y);
    const AlgebraElement k2 = ep.commutator_field(u + 0.5 * h, y + 0.5 * h * k1);
    const AlgebraElement k3 = ep.commutator_field(u + 0.5 * h, y + 0.5 * h * k2);
    const AlgebraElement k4 = ep.commutator_field(u + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

Propagator::Propagator(std::shared_ptr<const ExpectationPath> ep,
                       Backend backend, double rk4_step, PicardConfig picard)
    : ep_(std::move(ep)),
      backend_(backend),
      rk4_step_(rk4_step),
      picard_(picard) {
  if (!ep_) throw std::invalid_argument("null expectation path");
}

AlgebraElement Propagator::apply(double t, double s,
                                 const AlgebraElement& a) const {
  if (backend_ == Backend::Rk4) return rk4_solve(*ep_, s, a, t, rk4_step_);
  PicardConfig cfg = picard_;
  if (!cfg.empirical_c) {
    if (!empirical_c_) {
      empirical_c_ = ep_->estimate_hypothesis_constant(
                            ep_->t_min(), ep_->t_max(), cfg.hypothesis_samples,
                            cfg.hypothesis_grid, cfg.hypothesis_seed)
                         .empirical;
    }
    cfg.empirical_c = empirical_c_;
  }
  return picard_solve(*ep_, s, a, t, cfg);
}

AlgebraElement Propagator::forward(double t, const AlgebraElement& a) const {
  return apply(t, 0.0, a);
}

AlgebraElement Propagator::inverse(double t, const AlgebraElement& a) const {
  return apply(0.0, t, a);
}

Eigen::MatrixXcd Propagator::matrix(double t, double s) const {
  SuperOperator g{[this, t, s](const AlgebraElement& x) {
                    return apply(t, s, x);
                  },
                  ep_->algebra().dim()};
  return superop_matrix(g);
}

}  // namespace exflow
