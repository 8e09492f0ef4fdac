#include "exflow/expectation.hpp"

#include <cmath>

namespace exflow {

ExpectationPath::ExpectationPath(std::shared_ptr<const ProjectionPath> path)
    : path_(std::move(path)) {
  if (!path_) throw std::invalid_argument("null projection path");
}

AlgebraElement ExpectationPath::expectation(double t,
                                            const AlgebraElement& x) const {
  algebra().check(x);
  const ProjectionSystem sys = path_->evaluate(t);
  AlgebraElement out = algebra().zero();
  for (int i = 0; i < sys.size(); ++i) out += sys[i] * x * sys[i];
  return out;
}

AlgebraElement ExpectationPath::d_expectation(double t,
                                              const AlgebraElement& x) const {
  algebra().check(x);
  const ProjectionSystem sys = path_->evaluate(t);
  const PathDerivative d = path_->derivative(t);
  AlgebraElement out = algebra().zero();
  for (int i = 0; i < sys.size(); ++i)
    out += d.dots[i] * x * sys[i] + sys[i] * x * d.dots[i];
  return out;
}

AlgebraElement ExpectationPath::commutator_field(
    double t, const AlgebraElement& x) const {
  algebra().check(x);
  const ProjectionSystem sys = path_->evaluate(t);
  const PathDerivative d = path_->derivative(t);
  auto pinch = [&](const AlgebraElement& y) {
    AlgebraElement out = algebra().zero();
    for (int i = 0; i < sys.size(); ++i) out += sys[i] * y * sys[i];
    return out;
  };
  auto dpinch = [&](const AlgebraElement& y) {
    AlgebraElement out = algebra().zero();
    for (int i = 0; i < sys.size(); ++i)
      out += d.dots[i] * y * sys[i] + sys[i] * y * d.dots[i];
    return out;
  };
  return dpinch(pinch(x)) - pinch(dpinch(x));
}

SuperOperator ExpectationPath::at(double t) const {
  return {[this, t](const AlgebraElement& x) { return expectation(t, x); },
          algebra().dim()};
}

SuperOperator ExpectationPath::d_at(double t) const {
  return {[this, t](const AlgebraElement& x) { return d_expectation(t, x); },
          algebra().dim()};
}

SuperOperator ExpectationPath::h_at(double t) const {
  return {[this, t](const AlgebraElement& x) { return commutator_field(t, x); },
          algebra().dim()};
}

ExpectationPath::CodiagonalResiduals ExpectationPath::verify_codiagonal(
    double t, const AlgebraElement& x) const {
  const AlgebraElement ex = expectation(t, x);
  const AlgebraElement dex = d_expectation(t, x);
  CodiagonalResiduals r;
  r.codiagonal = algebra().two_norm(d_expectation(t, ex) +
                                    expectation(t, dex) - dex);
  r.corollary = algebra().two_norm(expectation(t, d_expectation(t, ex)));
  return r;
}

ExpectationPath::HypothesisEstimate
ExpectationPath::estimate_hypothesis_constant(double a, double b, int samples,
                                              int grid,
                                              std::uint64_t seed) const {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (grid < 2) throw std::invalid_argument("grid must be >= 2");
  if (b <= a) throw std::invalid_argument("empty interval");
  const int n = algebra().dim();

  std::vector<AlgebraElement> probes;
  for (int s = 0; s < samples; ++s) {
    AlgebraElement x = random_element(algebra(), Rng::derive(seed, "probe") + s);
    probes.push_back(x / algebra().two_norm(x));
  }
  if (n <= 6) {
    const double scale = std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) probes.push_back(scale * algebra().unit(i, j));
  }

  auto integral = [&](const AlgebraElement& x, int m) {
    // composite trapezoid of t -> ||dE_t(x)||_2^2 over [a, b]
    const double h = (b - a) / (m - 1);
    double acc = 0.0;
    for (int g = 0; g < m; ++g) {
      const double t = a + g * h;
      const double v = algebra().two_norm(d_expectation(t, x));
      acc += (g == 0 || g == m - 1 ? 0.5 : 1.0) * v * v;
    }
    return acc * h;
  };

  HypothesisEstimate out;
  out.grid = grid;
  out.samples = static_cast<int>(probes.size());
  double coarse_max = 0.0;
  for (const auto& x : probes) {
    const double fine = integral(x, 2 * grid - 1);
    out.empirical = std::max(out.empirical, fine);
    coarse_max = std::max(coarse_max, integral(x, grid));
  }
  out.quadrature_error = std::abs(out.empirical - coarse_max);

  for (int g = 0; g < grid; ++g) {
    const double t = a + (b - a) * g / (grid - 1);
    out.de_norm_sup = std::max(out.de_norm_sup, superop_2to2_norm(d_at(t)).value);
  }
  out.bound = 4.0 * (b - a) * out.de_norm_sup * out.de_norm_sup;

  const double slack = out.quadrature_error + 1e-9 * (1.0 + out.bound);
  out.certificate_ok = out.empirical <= out.bound + slack;
  if (!out.certificate_ok)
    throw CertificateError("hypothesis certificate violated: empirical " +
                           std::to_string(out.empirical) + " > bound " +
                           std::to_string(out.bound));
  return out;
}

}  // namespace exflow
