#ifndef EXFLOW_TRANSPORT_HPP
#define EXFLOW_TRANSPORT_HPP

#include <memory>
#include <optional>
#include <vector>

#include "exflow/expectation.hpp"

namespace exflow {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PicardConfig {
  double contraction_target = 0.5;  // k0, must be < 1
  int max_iterations = 80;
  double tol = 1e-12;               // 2-norm sup over quadrature nodes
  int grid = 257;                   // quadrature nodes per sub-interval
  // Settings for the empirical C_J estimate backing the sub-interval length.
  int hypothesis_samples = 8;
  int hypothesis_grid = 129;
  std::uint64_t hypothesis_seed = 0x5eedULL;
  // When set, skips the estimate (e.g. a Propagator reusing a cached value).
  std::optional<double> empirical_c;
};

struct PicardDiagnostics {
  struct SubInterval {
    double from = 0.0, to = 0.0;
    int iterations = 0;
    std::vector<double> contraction_ratios;
  };
  double empirical_c = 0.0;
  std::vector<SubInterval> sub_intervals;
};

// Successive approximations on a fixed time grid:
// S_0 = a, S_{n+1}(t) = a + int_{s0}^t H_u(S_n(u)) du (trapezoid on the grid).
// Returns iterates S_0..S_{n_max}, each a value per grid node.
std::vector<std::vector<AlgebraElement>> picard_sequence(
    const ExpectationPath& ep, double s0, const AlgebraElement& a,
    const std::vector<double>& grid, int n_max);

// Solve the transport equation alpha' = H_t(alpha), alpha(s) = a, by Picard
// iteration on sub-intervals of length k0^2 / C_empirical, glued.
AlgebraElement picard_solve(const ExpectationPath& ep, double s,
                            const AlgebraElement& a, double t,
                            const PicardConfig& config = {},
                            PicardDiagnostics* diag = nullptr);

// Independent classical RK4 integrator, used for cross-validation.
AlgebraElement rk4_solve(const ExpectationPath& ep, double s,
                         const AlgebraElement& a, double t,
                         double step = 1e-3);

enum class Backend { Rk4, Picard };

/// Two-parameter propagator G_{t,s} of the transport equation.
class Propagator {
 public:
  Propagator(std::shared_ptr<const ExpectationPath> ep,
             Backend backend = Backend::Rk4, double rk4_step = 1e-3,
             PicardConfig picard = {});

  const ExpectationPath& expectation_path() const { return *ep_; }
  Backend backend() const { return backend_; }

  AlgebraElement apply(double t, double s, const AlgebraElement& a) const;
  AlgebraElement forward(double t, const AlgebraElement& a) const;  // G_t
  AlgebraElement inverse(double t, const AlgebraElement& a) const;  // G_t^-1

  // Dense superoperator matrix of G_{t,s} on the matrix-unit basis.
  Eigen::MatrixXcd matrix(double t, double s) const;

 private:
  std::shared_ptr<const ExpectationPath> ep_;
  Backend backend_;
  double rk4_step_;
  PicardConfig picard_;
  mutable std::optional<double> empirical_c_;  // cached over the full interval
};

}  // namespace exflow

#endif
