#include "exflow/projection_path.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace exflow {

ProjectionSystem::ProjectionSystem(TracialAlgebra algebra,
                                   std::vector<AlgebraElement> ps, double tol)
    : algebra_(algebra), ps_(std::move(ps)) {
  if (ps_.empty()) throw std::invalid_argument("empty projection system");
  for (const auto& p : ps_) algebra_.check(p);
  const double r = validation_residual();
  if (r > tol)
    throw std::invalid_argument("projection system residual " +
                                std::to_string(r) + " exceeds tolerance");
}

ProjectionSystem ProjectionSystem::block_diagonal(
    const TracialAlgebra& algebra, const std::vector<int>& ranks) {
  int total = 0;
  for (const int r : ranks) {
    if (r < 1) throw std::invalid_argument("ranks must be positive");
    total += r;
  }
  if (total != algebra.dim())
    throw std::invalid_argument("ranks sum to " + std::to_string(total) +
                                ", algebra dim is " +
                                std::to_string(algebra.dim()));
  std::vector<AlgebraElement> ps;
  int offset = 0;
  for (const int r : ranks) {
    AlgebraElement p = algebra.zero();
    for (int i = 0; i < r; ++i) p(offset + i, offset + i) = 1.0;
    ps.push_back(std::move(p));
    offset += r;
  }
  return ProjectionSystem(algebra, std::move(ps));
}

double ProjectionSystem::validation_residual() const {
  double r = 0.0;
  AlgebraElement sum = algebra_.zero();
  for (std::size_t i = 0; i < ps_.size(); ++i) {
    const auto& p = ps_[i];
    r = std::max(r, algebra_.two_norm(p - p.adjoint()));
    r = std::max(r, algebra_.two_norm(p * p - p));
    for (std::size_t j = i + 1; j < ps_.size(); ++j)
      r = std::max(r, algebra_.two_norm(p * ps_[j]));
    sum += p;
  }
  r = std::max(r, algebra_.two_norm(sum - algebra_.identity()));
  return r;
}

namespace {

GeneratorFn interpolated_generator(std::vector<double> times,
                                   std::vector<AlgebraElement> gens) {
  if (times.size() != gens.size() || times.size() < 2)
    throw std::invalid_argument("generator table needs >= 2 samples");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("generator table times must be increasing");
  return [times = std::move(times),
          gens = std::move(gens)](double t) -> AlgebraElement {
    if (t <= times.front()) return gens.front();
    if (t >= times.back()) return gens.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
    return (1.0 - w) * gens[j - 1] + w * gens[j];
  };
}

void require_anti_hermitian(const TracialAlgebra& alg, const GeneratorFn& k,
                            double t_min, double t_max) {
  for (const double t : {t_min, 0.5 * (t_min + t_max), t_max}) {
    const AlgebraElement kt = k(t);
    alg.check(kt);
    if (alg.two_norm(kt + kt.adjoint()) > 1e-9 * (1.0 + alg.two_norm(kt)))
      throw std::invalid_argument(
          "generator is not anti-Hermitian at t = " + std::to_string(t));
  }
}

}  // namespace

AlgebraElement magnus4_step(const std::function<AlgebraElement(double)>& a,
                            const AlgebraElement& u, double t, double h) {
  static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const AlgebraElement a1 = a(t + c1 * h);
  const AlgebraElement a2 = a(t + c2 * h);
  const AlgebraElement omega =
      0.5 * h * (a1 + a2) +
      (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
  return omega.exp() * u;
}

AlgebraElement central_difference(
    const std::function<AlgebraElement(double)>& f, double t, double h,
    int order) {
  if (order == 2) return (f(t + h) - f(t - h)) / (2.0 * h);
  if (order == 4)
    return (-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) /
           (12.0 * h);
  throw std::invalid_argument("central_difference: order must be 2 or 4");
}

ProjectionPath::ProjectionPath(ProjectionSystem base, GeneratorFn generator,
                               double t_min, double t_max, double step)
    : base_(std::move(base)),
      gen_(std::move(generator)),
      t_min_(t_min),
      t_max_(t_max),
      step_(step) {
  if (!(t_min <= 0.0 && 0.0 <= t_max) || t_min >= t_max)
    throw std::invalid_argument("interval must contain 0 and be nonempty");
  if (step <= 0.0) throw std::invalid_argument("step must be positive");
  require_anti_hermitian(algebra(), gen_, t_min_, t_max_);
  build_cache();
}

ProjectionPath::ProjectionPath(ProjectionSystem base,
                               std::vector<double> times,
                               std::vector<AlgebraElement> generators,
                               double t_min, double t_max, double step)
    : ProjectionPath(std::move(base),
                     interpolated_generator(std::move(times),
                                            std::move(generators)),
                     t_min, t_max, step) {}

void ProjectionPath::build_cache() {
  // Anchor the grid at 0 so u_0 = 1 exactly; extend to both endpoints.
  const int fwd = static_cast<int>(std::ceil(t_max_ / step_ - 1e-12));
  const int bwd = static_cast<int>(std::ceil(-t_min_ / step_ - 1e-12));
  base_index_ = bwd;
  cache_.assign(static_cast<std::size_t>(fwd + bwd + 1), AlgebraElement());
  cache_[base_index_] = algebra().identity();
  for (int j = 1; j <= fwd; ++j) {
    const double t0 = (j - 1) * step_;
    const double h = std::min(step_, t_max_ - t0);
    cache_[base_index_ + j] = magnus4_step(gen_, cache_[base_index_ + j - 1],
                                           t0, h);
  }
  for (int j = 1; j <= bwd; ++j) {
    const double t0 = -(j - 1) * step_;
    const double h = -std::min(step_, t0 - t_min_);
    cache_[base_index_ - j] = magnus4_step(gen_, cache_[base_index_ - j + 1],
                                           t0, h);
  }
}

void ProjectionPath::check_time(double t) const {
  if (t < t_min_ - 1e-12 || t > t_max_ + 1e-12)
    throw std::invalid_argument("t = " + std::to_string(t) +
                                " outside path interval");
}

AlgebraElement ProjectionPath::generator(double t) const {
  check_time(t);
  return gen_(t);
}

AlgebraElement ProjectionPath::unitary(double t) const {
  check_time(t);
  t = std::clamp(t, t_min_, t_max_);
  int j = base_index_ + static_cast<int>(std::floor(t / step_ + 1e-12));
  j = std::clamp(j, 0, static_cast<int>(cache_.size()) - 1);
  const double tj = (j - base_index_) * step_;
  const double h = t - tj;
  if (std::abs(h) < 1e-14) return cache_[j];
  return magnus4_step(gen_, cache_[j], tj, h);
}

ProjectionSystem ProjectionPath::evaluate(double t) const {
  const AlgebraElement u = unitary(t);
  std::vector<AlgebraElement> ps;
  ps.reserve(base_.size());
  for (const auto& p : base_.projections()) ps.push_back(u * p * u.adjoint());
  return ProjectionSystem(algebra(), std::move(ps));
}

PathDerivative ProjectionPath::derivative(double t) const {
  const AlgebraElement k = generator(t);
  const ProjectionSystem sys = evaluate(t);
  PathDerivative d;
  d.dots.reserve(sys.size());
  for (int i = 0; i < sys.size(); ++i)
    d.dots.push_back(k * sys[i] - sys[i] * k);
  return d;
}

double ProjectionPath::square_summable_constant(double a, double b,
                                                int grid) const {
  check_time(a);
  check_time(b);
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  double best = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double t = grid == 1 ? a : a + (b - a) * g / (grid - 1);
    const PathDerivative d = derivative(t);
    AlgebraElement s = algebra().zero();
    for (const auto& dot : d.dots) s += dot.adjoint() * dot;
    Eigen::SelfAdjointEigenSolver<AlgebraElement> es(s,
                                                     Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

double ProjectionPath::generator_sup_norm(double a, double b, int grid) const {
  check_time(a);
  check_time(b);
  double best = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double t = grid == 1 ? a : a + (b - a) * g / (grid - 1);
    best = std::max(best, algebra().op_norm(gen_(t)));
  }
  return best;
}

}  // namespace exflow
