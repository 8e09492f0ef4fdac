#ifndef EXFLOW_ALGEBRA_HPP
#define EXFLOW_ALGEBRA_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace exflow {

using Complex = std::complex<double>;

// Elements of the algebra M_n, doubling as vectors of the Hilbert-Schmidt
// space L^2(M_n, tau) with tau = (1/n) Tr.
using AlgebraElement = Eigen::MatrixXcd;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finite tracial *-algebra M_n with normalized trace tau = (1/n) Tr,
/// so tau(1) = 1 and ||x||_2 <= ||x||_inf.
class TracialAlgebra {
 public:
  explicit TracialAlgebra(int dim);

  int dim() const { return dim_; }

  Complex trace(const AlgebraElement& x) const;
  // tau(y* x); conjugate-symmetric, positive-definite
  Complex inner(const AlgebraElement& x, const AlgebraElement& y) const;
  double two_norm(const AlgebraElement& x) const;   // sqrt(tau(x* x))
  double op_norm(const AlgebraElement& x) const;    // largest singular value

  AlgebraElement identity() const;
  AlgebraElement zero() const;
  AlgebraElement unit(int i, int j) const;  // matrix unit e_ij, 0-based

  void check(const AlgebraElement& x) const;

 private:
  int dim_;
};

/// Linear map on the algebra, applied matrix-free.
struct SuperOperator {
  std::function<AlgebraElement(const AlgebraElement&)> apply;
  int dim = 0;
};

// Dense n^2 x n^2 matrix of F with respect to column-stacked matrix units.
// The vec inner product is n times the HS one, a uniform scaling, so
// singular values and unitarity of this matrix agree with the HS picture.
Eigen::MatrixXcd superop_matrix(const SuperOperator& f);

enum class NormMethod { Exact, PowerIteration };

struct SuperOpNorm {
  double value = 0.0;
  NormMethod method = NormMethod::Exact;
  int iterations = 0;
  double residual = 0.0;
};

// sup{ ||F(a)||_2 : ||a||_2 = 1 }
SuperOpNorm superop_2to2_norm(const SuperOperator& f,
                              NormMethod method = NormMethod::Exact,
                              int max_iterations = 500, double tol = 1e-12);

// Deterministic splitmix64-based generator; gaussians via Box-Muller so the
// stream does not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double uniform();   // [0, 1)
  double gaussian();  // N(0, 1)

  // Named sub-stream seed, for fanning one scenario seed out to independent
  // consumers (path, samples, suite, ...).
  static std::uint64_t derive(std::uint64_t seed, std::string_view stream);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

enum class ElementKind { General, Selfadjoint };

// Entries i.i.d. standard complex Gaussian (E|z|^2 = 1); Selfadjoint returns
// (g + g*)/2. Deterministic per seed.
AlgebraElement random_element(const TracialAlgebra& alg, std::uint64_t seed,
                              ElementKind kind = ElementKind::General);

}  // namespace exflow

#endif
