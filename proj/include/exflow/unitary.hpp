#ifndef EXFLOW_UNITARY_HPP
#define EXFLOW_UNITARY_HPP

#include <memory>
#include <vector>

#include "exflow/transport.hpp"

namespace exflow {

// Delta_t = sum_i p_i(t) p_i-dot(t); anti-Hermitian.
AlgebraElement delta_field(const ProjectionPath& path, double t);

/// Unitary curve solving u' = -Delta_t u, u_0 = 1, on a uniform step grid.
/// The defining property u_t p_i(0) u_t* = p_i(t) is checked on demand.
class UnitaryPath {
 public:
  explicit UnitaryPath(std::shared_ptr<const ProjectionPath> path,
                       double step = 1e-3);

  const ProjectionPath& path() const { return *path_; }
  const TracialAlgebra& algebra() const { return path_->algebra(); }
  double step() const { return step_; }

  AlgebraElement unitary(double t) const;  // u_t
  AlgebraElement omega(double t, const AlgebraElement& x) const;  // u x u*
  AlgebraElement omega_inverse(double t, const AlgebraElement& x) const;

  struct Certificate {
    double max_intertwining = 0.0;  // ||u_t p_i(0) u_t* - p_i(t)||_2
    double max_unitarity = 0.0;     // ||u_t* u_t - 1||_2
    double worst_t = 0.0;
    int worst_i = 0;
  };
  // Residuals over every cached grid time; throws SolverFailure when the
  // intertwining residual exceeds the tolerance.
  Certificate certify(double tol = 1e-8) const;

 private:
  std::shared_ptr<const ProjectionPath> path_;
  double step_;
  int base_index_ = 0;
  std::vector<AlgebraElement> cache_;
  std::vector<double> times_;
};

struct PropagatorComparison {
  double on_base_subalgebra = 0.0;  // max over E_0-pinched samples
  double general = 0.0;             // max over unrestricted samples
  int samples = 0;
};

// max_x ||Omega_t(x) - G_t(x)||_2, separately for x in B_0 and general x.
PropagatorComparison compare_with_transport(const UnitaryPath& up,
                                            const Propagator& prop, double t,
                                            int samples, std::uint64_t seed);

}  // namespace exflow

#endif
