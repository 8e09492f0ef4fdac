#include "exflow/algebra.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace exflow {

TracialAlgebra::TracialAlgebra(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("algebra dimension must be >= 1");
}

Complex TracialAlgebra::trace(const AlgebraElement& x) const {
  check(x);
  return x.trace() / static_cast<double>(dim_);
}

Complex TracialAlgebra::inner(const AlgebraElement& x,
                              const AlgebraElement& y) const {
  check(x);
  check(y);
  // tau(y* x) without forming the product
  return (y.adjoint().cwiseProduct(x.transpose())).sum() /
         static_cast<double>(dim_);
}

double TracialAlgebra::two_norm(const AlgebraElement& x) const {
  check(x);
  return x.norm() / std::sqrt(static_cast<double>(dim_));
}

double TracialAlgebra::op_norm(const AlgebraElement& x) const {
  check(x);
  return x.jacobiSvd().singularValues()(0);
}

AlgebraElement TracialAlgebra::identity() const {
  return AlgebraElement::Identity(dim_, dim_);
}

AlgebraElement TracialAlgebra::zero() const {
  return AlgebraElement::Zero(dim_, dim_);
}

AlgebraElement TracialAlgebra::unit(int i, int j) const {
  AlgebraElement e = zero();
  e(i, j) = 1.0;
  return e;
}

void TracialAlgebra::check(const AlgebraElement& x) const {
  if (x.rows() != dim_ || x.cols() != dim_)
    throw DimensionMismatch("element is " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + ", algebra dim is " +
                            std::to_string(dim_));
}

Eigen::MatrixXcd superop_matrix(const SuperOperator& f) {
  const int n = f.dim;
  Eigen::MatrixXcd m(n * n, n * n);
  AlgebraElement e = AlgebraElement::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      e(i, j) = 1.0;
      AlgebraElement fe = f.apply(e);
      e(i, j) = 0.0;
      m.col(j * n + i) = Eigen::Map<const Eigen::VectorXcd>(fe.data(), n * n);
    }
  }
  return m;
}

SuperOpNorm superop_2to2_norm(const SuperOperator& f, NormMethod method,
                              int max_iterations, double tol) {
  const Eigen::MatrixXcd m = superop_matrix(f);
  SuperOpNorm out;
  out.method = method;
  if (method == NormMethod::Exact) {
    out.value = m.jacobiSvd().singularValues()(0);
    return out;
  }
  // power iteration on F*F
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(d);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXcd w = m.adjoint() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) {
      out.value = 0.0;
      out.iterations = it + 1;
      return out;
    }
    w /= nw;
    const double next = std::sqrt(nw);
    out.iterations = it + 1;
    out.residual = std::abs(next - lambda);
    lambda = next;
    v = w;
    if (it > 0 && out.residual < tol * (1.0 + lambda)) {
      out.value = lambda;
      return out;
    }
  }
  throw NumericalFailure("power iteration did not converge, last residual " +
                         std::to_string(out.residual));
}

std::uint64_t Rng::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the stream name, mixed into the seed
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  Rng mix(seed ^ h);
  return mix.next_u64();
}

AlgebraElement random_element(const TracialAlgebra& alg, std::uint64_t seed,
                              ElementKind kind) {
  Rng rng(seed);
  const int n = alg.dim();
  AlgebraElement g(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = Complex(s * rng.gaussian(), s * rng.gaussian());
  if (kind == ElementKind::Selfadjoint) return 0.5 * (g + g.adjoint()).eval();
  return g;
}

}  // namespace exflow
