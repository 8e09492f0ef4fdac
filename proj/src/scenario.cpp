#include "exflow/scenario.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace exflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

using KeyMap = std::map<std::string, std::string>;

KeyMap parse_flat(std::istream& in) {
  KeyMap out;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key =
        (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("field `" + key + "`: not a number: " + v);
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("field `" + key + "`: not an integer: " + v);
  }
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

GeneratorSpec parse_generator(const std::string& v, const KeyMap& keys) {
  GeneratorSpec g;
  if (v == "zero") {
    g.kind = GeneratorSpec::Kind::Zero;
    return g;
  }
  if (v.rfind("rotation(", 0) == 0 && v.back() == ')') {
    const auto args = to_doubles("path.generator", v.substr(9, v.size() - 10));
    if (args.size() != 3)
      throw ConfigError("field `path.generator`: rotation needs (i,j,speed)");
    g.kind = GeneratorSpec::Kind::Rotation;
    g.i = static_cast<int>(args[0]);
    g.j = static_cast<int>(args[1]);
    g.speed = args[2];
    return g;
  }
  if (v.rfind("random(", 0) == 0 && v.back() == ')') {
    g.kind = GeneratorSpec::Kind::Random;
    g.speed = to_double("path.generator", v.substr(7, v.size() - 8));
    return g;
  }
  if (v == "constant") {
    g.kind = GeneratorSpec::Kind::Constant;
    const auto it = keys.find("path.entries");
    if (it == keys.end())
      throw ConfigError(
          "field `path.entries` is required for a constant generator");
    g.entries = to_doubles("path.entries", it->second);
    return g;
  }
  throw ConfigError("field `path.generator`: unknown form: " + v);
}

}  // namespace

Scenario Scenario::parse(std::istream& in) {
  const KeyMap keys = parse_flat(in);
  Scenario sc;
  std::map<std::string, bool> seen;
  auto get = [&](const std::string& key) -> const std::string* {
    seen[key] = true;
    const auto it = keys.find(key);
    return it == keys.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("algebra.dimension"))
    sc.dimension = static_cast<int>(to_long("algebra.dimension", *v));
  if (sc.dimension < 1) throw ConfigError("field `algebra.dimension`: must be >= 1");
  if (const auto* v = get("algebra.ranks")) {
    sc.ranks.clear();
    for (const double r : to_doubles("algebra.ranks", *v))
      sc.ranks.push_back(static_cast<int>(r));
  }
  int rank_sum = 0;
  for (const int r : sc.ranks) rank_sum += r;
  if (rank_sum != sc.dimension)
    throw ConfigError("field `algebra.ranks`: must sum to the dimension");

  if (const auto* v = get("path.generator"))
    sc.generator = parse_generator(*v, keys);
  seen["path.entries"] = true;
  if (const auto* v = get("path.t_min")) sc.t_min = to_double("path.t_min", *v);
  if (const auto* v = get("path.t_max")) sc.t_max = to_double("path.t_max", *v);
  if (!(sc.t_min <= 0.0 && 0.0 <= sc.t_max) || sc.t_min >= sc.t_max)
    throw ConfigError("fields `path.t_min`/`path.t_max`: interval must contain 0");
  if (const auto* v = get("path.step")) sc.path_step = to_double("path.step", *v);

  if (const auto* v = get("solver.backend")) {
    if (*v == "rk4")
      sc.backend = Backend::Rk4;
    else if (*v == "picard")
      sc.backend = Backend::Picard;
    else
      throw ConfigError("field `solver.backend`: must be rk4 or picard");
  }
  if (const auto* v = get("solver.step")) sc.rk4_step = to_double("solver.step", *v);
  if (sc.rk4_step <= 0.0) throw ConfigError("field `solver.step`: must be > 0");
  if (const auto* v = get("solver.unitary_step"))
    sc.unitary_step = to_double("solver.unitary_step", *v);
  if (const auto* v = get("solver.picard_k0"))
    sc.picard.contraction_target = to_double("solver.picard_k0", *v);
  if (const auto* v = get("solver.picard_tol"))
    sc.picard.tol = to_double("solver.picard_tol", *v);
  if (const auto* v = get("solver.picard_max_iterations"))
    sc.picard.max_iterations =
        static_cast<int>(to_long("solver.picard_max_iterations", *v));
  if (const auto* v = get("solver.picard_grid"))
    sc.picard.grid = static_cast<int>(to_long("solver.picard_grid", *v));

  if (const auto* v = get("run.samples"))
    sc.samples = static_cast<int>(to_long("run.samples", *v));
  if (sc.samples < 1) throw ConfigError("field `run.samples`: must be >= 1");
  if (const auto* v = get("run.grid"))
    sc.grid = static_cast<int>(to_long("run.grid", *v));
  if (sc.grid < 2) throw ConfigError("field `run.grid`: must be >= 2");
  if (const auto* v = get("run.tol_integrated"))
    sc.tol_integrated = to_double("run.tol_integrated", *v);
  if (const auto* v = get("run.tol_algebraic"))
    sc.tol_algebraic = to_double("run.tol_algebraic", *v);
  if (const auto* v = get("run.seed"))
    sc.seed = static_cast<std::uint64_t>(to_long("run.seed", *v));
  else
    throw ConfigError("field `run.seed` is required");

  for (const auto& [key, value] : keys)
    if (!seen.count(key)) throw ConfigError("unknown field `" + key + "`");
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in);
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string Scenario::dump() const {
  std::ostringstream out;
  out << "[algebra]\n";
  out << "dimension = " << dimension << "\n";
  out << "ranks = ";
  for (std::size_t i = 0; i < ranks.size(); ++i)
    out << (i ? "," : "") << ranks[i];
  out << "\n\n[path]\n";
  switch (generator.kind) {
    case GeneratorSpec::Kind::Zero:
      out << "generator = zero\n";
      break;
    case GeneratorSpec::Kind::Rotation:
      out << "generator = rotation(" << generator.i << "," << generator.j
          << "," << format_value(generator.speed) << ")\n";
      break;
    case GeneratorSpec::Kind::Random:
      out << "generator = random(" << format_value(generator.speed) << ")\n";
      break;
    case GeneratorSpec::Kind::Constant:
      out << "generator = constant\n";
      out << "entries = ";
      for (std::size_t i = 0; i < generator.entries.size(); ++i)
        out << (i ? "," : "") << format_value(generator.entries[i]);
      out << "\n";
      break;
  }
  out << "t_min = " << format_value(t_min) << "\n";
  out << "t_max = " << format_value(t_max) << "\n";
  out << "step = " << format_value(path_step) << "\n";
  out << "\n[solver]\n";
  out << "backend = " << (backend == Backend::Rk4 ? "rk4" : "picard") << "\n";
  out << "step = " << format_value(rk4_step) << "\n";
  out << "unitary_step = " << format_value(unitary_step) << "\n";
  out << "picard_k0 = " << format_value(picard.contraction_target) << "\n";
  out << "picard_tol = " << format_value(picard.tol) << "\n";
  out << "picard_max_iterations = " << picard.max_iterations << "\n";
  out << "picard_grid = " << picard.grid << "\n";
  out << "\n[run]\n";
  out << "samples = " << samples << "\n";
  out << "grid = " << grid << "\n";
  out << "tol_integrated = " << format_value(tol_integrated) << "\n";
  out << "tol_algebraic = " << format_value(tol_algebraic) << "\n";
  out << "seed = " << seed << "\n";
  return out.str();
}

std::shared_ptr<const ProjectionPath> Scenario::make_path() const {
  const TracialAlgebra alg(dimension);
  ProjectionSystem base = ProjectionSystem::block_diagonal(alg, ranks);
  AlgebraElement k = alg.zero();
  switch (generator.kind) {
    case GeneratorSpec::Kind::Zero:
      break;
    case GeneratorSpec::Kind::Rotation: {
      if (generator.i < 1 || generator.j < 1 || generator.i > dimension ||
          generator.j > dimension || generator.i == generator.j)
        throw ConfigError("field `path.generator`: rotation plane out of range");
      k(generator.i - 1, generator.j - 1) = -generator.speed;
      k(generator.j - 1, generator.i - 1) = generator.speed;
      break;
    }
    case GeneratorSpec::Kind::Random: {
      const AlgebraElement g =
          random_element(alg, Rng::derive(seed, "path"));
      k = 0.5 * generator.speed * (g - g.adjoint());
      break;
    }
    case GeneratorSpec::Kind::Constant: {
      const std::size_t need = 2 * static_cast<std::size_t>(dimension) *
                               static_cast<std::size_t>(dimension);
      if (generator.entries.size() != need)
        throw ConfigError("field `path.entries`: expected " +
                          std::to_string(need) + " reals (re,im row-major)");
      for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j) {
          const std::size_t idx = 2 * (i * dimension + j);
          k(i, j) = Complex(generator.entries[idx], generator.entries[idx + 1]);
        }
      if (alg.two_norm(k + k.adjoint()) > 1e-9 * (1.0 + alg.two_norm(k)))
        throw ConfigError("field `path.entries`: matrix is not anti-Hermitian");
      break;
    }
  }
  const AlgebraElement kc = k;
  return std::make_shared<ProjectionPath>(
      std::move(base), [kc](double) { return kc; }, t_min, t_max, path_step);
}

}  // namespace exflow
