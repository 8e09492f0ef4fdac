#ifndef EXFLOW_PROJECTION_PATH_HPP
#define EXFLOW_PROJECTION_PATH_HPP

#include <functional>
#include <memory>
#include <vector>

#include "exflow/algebra.hpp"

namespace exflow {

/// Pairwise-orthogonal projections summing to 1.
class ProjectionSystem {
 public:
  ProjectionSystem(TracialAlgebra algebra, std::vector<AlgebraElement> ps,
                   double tol = 1e-9);

  // Block-diagonal system with the given ranks (sum = n).
  static ProjectionSystem block_diagonal(const TracialAlgebra& algebra,
                                         const std::vector<int>& ranks);

  const TracialAlgebra& algebra() const { return algebra_; }
  int size() const { return static_cast<int>(ps_.size()); }
  const AlgebraElement& operator[](int i) const { return ps_[i]; }
  const std::vector<AlgebraElement>& projections() const { return ps_; }

  // Largest of the hermiticity / idempotency / orthogonality / sum residuals.
  double validation_residual() const;

 private:
  TracialAlgebra algebra_;
  std::vector<AlgebraElement> ps_;
};

using GeneratorFn = std::function<AlgebraElement(double)>;

struct PathDerivative {
  std::vector<AlgebraElement> dots;
};

/// Smooth curve p_i(t) = u_t p_i(0) u_t*, with u' = K(t) u, u_0 = 1, driven
/// by an anti-Hermitian generator K.  The unitary is integrated with a
/// 4th-order Gauss-Magnus stepper (each step an exact exponential, so
/// unitarity holds to machine precision) and cached on a uniform grid.
class ProjectionPath {
 public:
  ProjectionPath(ProjectionSystem base, GeneratorFn generator, double t_min,
                 double t_max, double step = 1e-3);

  // Tabulated generator: K(t) linearly interpolated between samples.
  ProjectionPath(ProjectionSystem base, std::vector<double> times,
                 std::vector<AlgebraElement> generators, double t_min,
                 double t_max, double step = 1e-3);

  const ProjectionSystem& base() const { return base_; }
  const TracialAlgebra& algebra() const { return base_.algebra(); }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int size() const { return base_.size(); }

  AlgebraElement generator(double t) const;  // K(t)
  AlgebraElement unitary(double t) const;    // u_t
  ProjectionSystem evaluate(double t) const;
  // Analytic derivative p_i-dot(t) = [K(t), p_i(t)].
  PathDerivative derivative(double t) const;

  // Empirical D_J for sum_i ||p_i-dot(t) xi||_2^2 <= D_J ||xi||_2^2 on [a,b]:
  // max over the grid of the top eigenvalue of sum_i p_i-dot(t)^2.
  double square_summable_constant(double a, double b, int grid) const;

  // K_J for this path: sup over the grid of ||K(t)||_inf.
  double generator_sup_norm(double a, double b, int grid) const;

 private:
  void check_time(double t) const;
  void build_cache();
  AlgebraElement step_from(const AlgebraElement& u, double t, double h) const;

  ProjectionSystem base_;
  GeneratorFn gen_;
  double t_min_, t_max_, step_;
  int base_index_ = 0;                  // cache index of t = 0
  std::vector<AlgebraElement> cache_;   // u at t_min + j*step
};

// One Magnus step for u' = A(t) u over [t, t+h] (4th order, two Gauss nodes).
AlgebraElement magnus4_step(const std::function<AlgebraElement(double)>& a,
                            const AlgebraElement& u, double t, double h);

// Central finite difference of a matrix-valued curve, order 2 or 4.
AlgebraElement central_difference(
    const std::function<AlgebraElement(double)>& f, double t, double h,
    int order = 2);

}  // namespace exflow

#endif
