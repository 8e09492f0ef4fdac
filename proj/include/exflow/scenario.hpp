#ifndef EXFLOW_SCENARIO_HPP
#define EXFLOW_SCENARIO_HPP

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "exflow/transport.hpp"
#include "exflow/unitary.hpp"

namespace exflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeneratorSpec {
  enum class Kind { Zero, Rotation, Random, Constant };
  Kind kind = Kind::Zero;
  int i = 1, j = 2;        // rotation plane, 1-based
  double speed = 1.0;      // rotation speed / random scale
  std::vector<double> entries;  // constant: row-major re,im pairs, 2n^2 reals
};

/// Fully-resolved experiment description; everything an experiment needs,
/// all randomness derived from the single seed.
struct Scenario {
  int dimension = 2;
  std::vector<int> ranks = {1, 1};
  GeneratorSpec generator;
  double t_min = 0.0;
  double t_max = 1.0;

  Backend backend = Backend::Rk4;
  double rk4_step = 1e-3;
  double path_step = 1e-3;
  double unitary_step = 1e-3;
  PicardConfig picard;

  int samples = 50;
  int grid = 101;
  double tol_integrated = 1e-7;
  double tol_algebraic = 1e-10;
  std::uint64_t seed = 0;

  // Parse the flat `[section]` / `key = value` config format; every key is
  // validated, `seed` is mandatory.
  static Scenario parse(std::istream& in);
  static Scenario load(const std::string& path);
  // Re-emit the resolved scenario including defaults.
  std::string dump() const;

  std::shared_ptr<const ProjectionPath> make_path() const;
};

// 17-significant-digit float formatting used by all CSV / report output.
std::string format_value(double v);

}  // namespace exflow

#endif
