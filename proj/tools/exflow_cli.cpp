// Scenario-driven experiment runner for the expectation-transport library.
//
// Subcommands: simulate | verify | estimate-constants | compare-propagators
// Exit codes: 0 ok, 1 check failure, 2 malformed config, 3 solver failure,
//             4 I/O failure, 5 certificate violation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "exflow/verify.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;
constexpr int kExitCertificate = 5;

exflow::Scenario load_scenario(const std::string& config_path,
                               const std::optional<std::uint64_t>& seed) {
  exflow::Scenario sc = exflow::Scenario::load(config_path);
  if (seed) sc.seed = *seed;
  return sc;
}

int cmd_simulate(const exflow::Scenario& sc, const std::string& output_path) {
  using namespace exflow;
  const auto path = sc.make_path();
  const auto ep = std::make_shared<ExpectationPath>(path);
  const TracialAlgebra& alg = ep->algebra();
  const Propagator prop(ep, sc.backend, sc.rk4_step, sc.picard);
  const UnitaryPath up(path, sc.unitary_step);

  const AlgebraElement a =
      random_element(alg, Rng::derive(sc.seed, "simulate"));
  const AlgebraElement id = alg.identity();

  std::ofstream out(output_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output file: " << output_path << "\n";
    return kExitIo;
  }
  out << "t,quantity,value\n";
  auto row = [&](double t, const char* quantity, double value) {
    out << format_value(t) << "," << quantity << "," << format_value(value)
        << "\n";
  };
  for (int g = 0; g < sc.grid; ++g) {
    const double t = sc.t_min + (sc.t_max - sc.t_min) * g / (sc.grid - 1);
    const AlgebraElement alpha = prop.apply(t, 0.0, a);
    row(t, "solution_norm", alg.two_norm(alpha));
    row(t, "isometry_residual",
        std::abs(alg.two_norm(alpha) - alg.two_norm(a)));
    row(t, "intertwining_residual",
        alg.two_norm(prop.forward(t, ep->expectation(0.0, prop.inverse(t, a))) -
                     ep->expectation(t, a)));
    const auto cr = ep->verify_codiagonal(t, a);
    row(t, "codiagonal_residual", cr.codiagonal);
    const AlgebraElement u = up.unitary(t);
    row(t, "unitarity_residual", alg.two_norm(u.adjoint() * u - id));
  }
  if (!out) {
    std::cerr << "write failure on " << output_path << "\n";
    return kExitIo;
  }
  return 0;
}

int cmd_verify(const exflow::Scenario& sc) {
  const auto reports = exflow::run_full_suite(sc);
  bool all_pass = true;
  for (const auto& r : reports) {
    const char* status =
        r.thresholded ? (r.pass ? "pass" : "FAIL") : "info";
    std::cout << r.name << " " << status << " "
              << exflow::format_value(r.residual) << " "
              << (r.thresholded ? exflow::format_value(r.threshold) : "-")
              << "\n";
    if (r.thresholded && !r.pass) all_pass = false;
  }
  return all_pass ? 0 : kExitCheckFailed;
}

int cmd_estimate_constants(const exflow::Scenario& sc) {
  using namespace exflow;
  const auto path = sc.make_path();
  const ExpectationPath ep(path);
  const int grid = 129;
  const auto est = ep.estimate_hypothesis_constant(
      sc.t_min, sc.t_max, std::min(sc.samples, 16), grid,
      Rng::derive(sc.seed, "constants"));
  const auto est_fine = ep.estimate_hypothesis_constant(
      sc.t_min, sc.t_max, std::min(sc.samples, 16), 2 * grid - 1,
      Rng::derive(sc.seed, "constants"));
  const double d_sq = path->square_summable_constant(sc.t_min, sc.t_max, grid);
  const double k_j = path->generator_sup_norm(sc.t_min, sc.t_max, grid);
  const double delta = est.empirical == 0.0
                           ? 0.0
                           : std::abs(est_fine.empirical - est.empirical) /
                                 est.empirical;
  std::cout << "C_J_empirical " << format_value(est.empirical) << " grid "
            << grid << "\n";
  std::cout << "C_J_bound " << format_value(est.bound) << " (4|J|D^2, D=sup||dE||_2to2)\n";
  std::cout << "dE_norm_sup " << format_value(est.de_norm_sup) << "\n";
  std::cout << "D_J " << format_value(d_sq)
            << " (square-summable-derivatives constant)\n";
  std::cout << "K_J " << format_value(k_j) << " (sup||K(t)||_inf)\n";
  std::cout << "grid_refinement_delta " << format_value(delta) << "\n";
  return 0;
}

int cmd_compare_propagators(const exflow::Scenario& sc) {
  using namespace exflow;
  const auto path = sc.make_path();
  const auto ep = std::make_shared<ExpectationPath>(path);
  const Propagator prop(ep, sc.backend, sc.rk4_step, sc.picard);
  const UnitaryPath up(path, sc.unitary_step);
  const auto cmp = compare_with_transport(up, prop, sc.t_max, sc.samples,
                                          Rng::derive(sc.seed, "omega"));
  const bool base_ok = cmp.on_base_subalgebra <= sc.tol_integrated;
  std::cout << "omega_vs_g_on_B0 " << (base_ok ? "pass" : "FAIL") << " "
            << format_value(cmp.on_base_subalgebra) << " "
            << format_value(sc.tol_integrated) << "\n";
  if (path->size() == 2) {
    const bool global_ok = cmp.general <= sc.tol_integrated;
    std::cout << "omega_vs_g_global " << (global_ok ? "pass" : "FAIL") << " "
              << format_value(cmp.general) << " "
              << format_value(sc.tol_integrated) << "\n";
    return base_ok && global_ok ? 0 : kExitCheckFailed;
  }
  std::cout << "omega_vs_g_global info " << format_value(cmp.general)
            << " -\n";
  return base_ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transport propagators for smooth paths of pinching expectations"};
  app.require_subcommand(1);

  std::string config_path, output_path;
  std::optional<std::uint64_t> seed_override;
  bool list_only = false, dump_config = false;

  auto add_common = [&](CLI::App* cmd, bool needs_output) {
    cmd->add_option("--config", config_path, "scenario config file")
        ->required();
    cmd->add_option("--seed", seed_override, "override the scenario seed");
    cmd->add_flag("--dump-config", dump_config,
                  "print the resolved scenario and exit");
    if (needs_output)
      cmd->add_option("--output", output_path, "output CSV path")->required();
  };

  auto* simulate = app.add_subcommand("simulate", "residual traces to CSV");
  add_common(simulate, true);
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify, false);
  verify->add_flag("--list", list_only, "list check names without running");
  auto* estimate =
      app.add_subcommand("estimate-constants", "Hypothesis constants");
  add_common(estimate, false);
  auto* compare =
      app.add_subcommand("compare-propagators", "Omega_t vs G_t");
  add_common(compare, false);

  CLI11_PARSE(app, argc, argv);

  if (list_only) {
    for (const auto& name : exflow::suite_check_names())
      std::cout << name << "\n";
    return 0;
  }

  try {
    const exflow::Scenario sc = load_scenario(config_path, seed_override);
    if (dump_config) {
      std::cout << sc.dump();
      return 0;
    }
    if (*simulate) return cmd_simulate(sc, output_path);
    if (*verify) return cmd_verify(sc);
    if (*estimate) return cmd_estimate_constants(sc);
    if (*compare) return cmd_compare_propagators(sc);
  } catch (const exflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const exflow::CertificateError& e) {
    std::cerr << "certificate violation: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const exflow::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
