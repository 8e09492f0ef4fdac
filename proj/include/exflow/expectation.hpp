#ifndef EXFLOW_EXPECTATION_HPP
#define EXFLOW_EXPECTATION_HPP

#include <memory>

#include "exflow/projection_path.hpp"

namespace exflow {

struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The curve of pinching expectations E_t(x) = sum_i p_i(t) x p_i(t) induced
/// by a projection path, with its derivative dE_t and the commutator field
/// H_t = [dE_t, E_t] driving the transport equation.
class ExpectationPath {
 public:
  explicit ExpectationPath(std::shared_ptr<const ProjectionPath> path);

  const ProjectionPath& path() const { return *path_; }
  const TracialAlgebra& algebra() const { return path_->algebra(); }
  double t_min() const { return path_->t_min(); }
  double t_max() const { return path_->t_max(); }

  AlgebraElement expectation(double t, const AlgebraElement& x) const;
  // Product rule: sum_i p_i-dot x p_i + p_i x p_i-dot.
  AlgebraElement d_expectation(double t, const AlgebraElement& x) const;
  // H_t(x) = dE_t(E_t(x)) - E_t(dE_t(x)), equal to (1 - 2E_t)(dE_t(x)).
  AlgebraElement commutator_field(double t, const AlgebraElement& x) const;

  SuperOperator at(double t) const;
  SuperOperator d_at(double t) const;
  SuperOperator h_at(double t) const;

  struct CodiagonalResiduals {
    double codiagonal;  // ||dE(E(x)) + E(dE(x)) - dE(x)||_2
    double corollary;   // ||E(dE(E(x)))||_2
  };
  CodiagonalResiduals verify_codiagonal(double t, const AlgebraElement& x) const;

  struct HypothesisEstimate {
    double empirical = 0.0;         // max_a int_J ||dE_t(a)||_2^2 dt, ||a||_2=1
    double bound = 0.0;             // 4 |J| D^2
    double de_norm_sup = 0.0;       // D = max over grid of ||dE_t||_{2->2}
    double quadrature_error = 0.0;  // grid-doubling difference
    int grid = 0;
    int samples = 0;
    bool certificate_ok = false;    // empirical <= bound + tolerance
  };
  // Throws CertificateError if the empirical value exceeds the analytic
  // bound beyond quadrature tolerance (that would indicate a bug, the bound
  // is proved).  Samples are random unit elements plus, for n <= 6, the
  // full matrix-unit basis.
  HypothesisEstimate estimate_hypothesis_constant(double a, double b,
                                                  int samples, int grid,
                                                  std::uint64_t seed) const;

 private:
  std::shared_ptr<const ProjectionPath> path_;
};

}  // namespace exflow

#endif
