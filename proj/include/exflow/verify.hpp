#ifndef EXFLOW_VERIFY_HPP
#define EXFLOW_VERIFY_HPP

#include <string>
#include <vector>

#include "exflow/scenario.hpp"

namespace exflow {

struct ResidualReport {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool thresholded = true;  // informational reports carry no pass/fail
  bool pass = true;
  std::string context;
};

ResidualReport make_report(std::string name, double residual, double threshold,
                           std::string context);
ResidualReport make_info(std::string name, double residual,
                         std::string context);

// ||G_t(E_0(G_t^-1(x))) - E_t(x)||_2, maxed over samples.
ResidualReport check_intertwining(const Propagator& prop, double t,
                                  int samples, std::uint64_t seed,
                                  double threshold);

// ||G_t(ab) - G_t(a) G_t(b)||_2 over pinched pairs a, b in B_0, plus the
// range residual ||E_t(G_t(a)) - G_t(a)||_2.
ResidualReport check_multiplicativity(const Propagator& prop, double t,
                                      int samples, std::uint64_t seed,
                                      double threshold);

// E(alpha) is again a solution; beta-dot by 4th-order finite differences on
// fresh solves.  Also the membership residual when a starts in B_s.
struct ProjectedSolutionReports {
  ResidualReport ode;         // ||beta-dot - H(beta)||_2 over the grid
  ResidualReport membership;  // ||E_t(alpha) - alpha||_2 when E_s(a) = a
};
ProjectedSolutionReports check_projected_solution(
    const Propagator& prop, double s, const AlgebraElement& a,
    const std::vector<double>& grid, double threshold);

// For b in B_s and E_s(z) = 0: ||E_t(beta-dot)||_2 and ||E_t(z-dot) - z-dot||_2
// along the grid, derivatives via the exact right-hand side H_t, with a
// finite-difference cross-check folded into the context string.
struct OrthogonalityReports {
  ResidualReport range_derivative;   // E_t(beta-dot) = 0
  ResidualReport kernel_derivative;  // z-dot in B_t
};
OrthogonalityReports check_derivative_orthogonality(
    const Propagator& prop, double s, const AlgebraElement& b,
    const AlgebraElement& z, const std::vector<double>& grid,
    double threshold);

// One named check per stated identity; deterministic given the scenario seed.
std::vector<ResidualReport> run_full_suite(const Scenario& scenario);

std::vector<std::string> suite_check_names();

}  // namespace exflow

#endif
