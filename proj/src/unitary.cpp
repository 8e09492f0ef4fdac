#include "exflow/unitary.hpp"

#include <algorithm>
#include <cmath>

namespace exflow {

AlgebraElement delta_field(const ProjectionPath& path, double t) {
  const ProjectionSystem sys = path.evaluate(t);
  const PathDerivative d = path.derivative(t);
  AlgebraElement out = path.algebra().zero();
  for (int i = 0; i < sys.size(); ++i) out += sys[i] * d.dots[i];
  return out;
}

UnitaryPath::UnitaryPath(std::shared_ptr<const ProjectionPath> path,
                         double step)
    : path_(std::move(path)), step_(step) {
  if (!path_) throw std::invalid_argument("null projection path");
  if (step <= 0.0) throw std::invalid_argument("step must be positive");
  const auto minus_delta = [this](double t) {
    return (-delta_field(*path_, t)).eval();
  };
  const double t_min = path_->t_min(), t_max = path_->t_max();
  const int fwd = static_cast<int>(std::ceil(t_max / step_ - 1e-12));
  const int bwd = static_cast<int>(std::ceil(-t_min / step_ - 1e-12));
  base_index_ = bwd;
  cache_.assign(static_cast<std::size_t>(fwd + bwd + 1), AlgebraElement());
  times_.assign(cache_.size(), 0.0);
  cache_[base_index_] = algebra().identity();
  for (int j = 1; j <= fwd; ++j) {
    const double t0 = (j - 1) * step_;
    const double h = std::min(step_, t_max - t0);
    cache_[base_index_ + j] =
        magnus4_step(minus_delta, cache_[base_index_ + j - 1], t0, h);
    times_[base_index_ + j] = t0 + h;
  }
  for (int j = 1; j <= bwd; ++j) {
    const double t0 = -(j - 1) * step_;
    const double h = -std::min(step_, t0 - t_min);
    cache_[base_index_ - j] =
        magnus4_step(minus_delta, cache_[base_index_ - j + 1], t0, h);
    times_[base_index_ - j] = t0 + h;
  }
}

AlgebraElement UnitaryPath::unitary(double t) const {
  if (t < path_->t_min() - 1e-12 || t > path_->t_max() + 1e-12)
    throw std::invalid_argument("t outside path interval");
  t = std::clamp(t, path_->t_min(), path_->t_max());
  int j = base_index_ + static_cast<int>(std::floor(t / step_ + 1e-12));
  j = std::clamp(j, 0, static_cast<int>(cache_.size()) - 1);
  const double tj = (j - base_index_) * step_;
  const double h = t - tj;
  if (std::abs(h) < 1e-14) return cache_[j];
  const auto minus_delta = [this](double u) {
    return (-delta_field(*path_, u)).eval();
  };
  return magnus4_step(minus_delta, cache_[j], tj, h);
}

AlgebraElement UnitaryPath::omega(double t, const AlgebraElement& x) const {
  algebra().check(x);
  const AlgebraElement u = unitary(t);
  return u * x * u.adjoint();
}

AlgebraElement UnitaryPath::omega_inverse(double t,
                                          const AlgebraElement& x) const {
  algebra().check(x);
  const AlgebraElement u = unitary(t);
  return u.adjoint() * x * u;
}

UnitaryPath::Certificate UnitaryPath::certify(double tol) const {
  Certificate cert;
  const auto& base = path_->base();
  const AlgebraElement id = algebra().identity();
  for (std::size_t j = 0; j < cache_.size(); ++j) {
    const double t = times_[j];
    const AlgebraElement& u = cache_[j];
    cert.max_unitarity =
        std::max(cert.max_unitarity, algebra().two_norm(u.adjoint() * u - id));
    const ProjectionSystem sys = path_->evaluate(t);
    for (int i = 0; i < base.size(); ++i) {
      const double r =
          algebra().two_norm(u * base[i] * u.adjoint() - sys[i]);
      if (r > cert.max_intertwining) {
        cert.max_intertwining = r;
        cert.worst_t = t;
        cert.worst_i = i;
      }
    }
  }
  if (cert.max_intertwining > tol)
    throw SolverFailure("unitary intertwining residual " +
                        std::to_string(cert.max_intertwining) + " at t = " +
                        std::to_string(cert.worst_t) + ", projection " +
                        std::to_string(cert.worst_i));
  return cert;
}

PropagatorComparison compare_with_transport(const UnitaryPath& up,
                                            const Propagator& prop, double t,
                                            int samples, std::uint64_t seed) {
  const TracialAlgebra& alg = up.algebra();
  const ExpectationPath& ep = prop.expectation_path();
  PropagatorComparison out;
  out.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const AlgebraElement x =
        random_element(alg, Rng::derive(seed, "compare") + s);
    const AlgebraElement b = ep.expectation(0.0, x);  // x pinched into B_0
    out.general = std::max(
        out.general, alg.two_norm(up.omega(t, x) - prop.forward(t, x)));
    out.on_base_subalgebra = std::max(
        out.on_base_subalgebra,
        alg.two_norm(up.omega(t, b) - prop.forward(t, b)));
  }
  return out;
}

}  // namespace exflow
