#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace bsopt::cli {

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string join(const std::string& path, size_t i) { return path + "/" + std::to_string(i); }

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  expect_object(j, path);
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) throw ConfigError(join(path, k), "unknown key");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double number(const json& j, const std::string& path, const std::string& key, std::optional<double> dflt = {}) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    throw ConfigError(join(path, key), "missing required number");
  }
  return number(j.at(key), join(path, key));
}

long integer(const json& j, const std::string& path, const std::string& key, long dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<long>();
}

std::string string(const json& j, const std::string& path, const std::string& key, std::optional<std::string> dflt = {}) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    throw ConfigError(join(path, key), "missing required string");
  }
  if (!j.at(key).is_string()) throw ConfigError(join(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

Vec vector(const json& j, const std::string& path, long size = -1) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  if (size >= 0 && static_cast<long>(j.size()) != size)
    throw ConfigError(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  Vec v;
  for (size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], join(path, i)));
  return v;
}

Vec vector(const json& j, const std::string& path, const std::string& key, long size = -1) {
  if (!j.contains(key)) throw ConfigError(join(path, key), "missing required array");
  return vector(j.at(key), join(path, key), size);
}

// DomainErrors raised while building an object are attributed to its path
template <class F>
auto at(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

json load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot open '" + file + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

Generator parse_generator(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string fam = string(j, path, "family");
  auto keys = [&](std::set<std::string> k) {
    k.insert("family");
    check_keys(j, path, k);
  };
  auto sc = [&] { return number(j, path, "scale", 1.0); };
  return at(path, [&]() -> Generator {
    if (fam == "power") {
      keys({"gamma", "scale"});
      return Generator(PowerGamma{number(j, path, "gamma"), sc()});
    }
    if (fam == "kl") {
      keys({"scale"});
      return Generator(PowerGamma{1.0, sc()});
    }
    if (fam == "generalized_kl") {
      keys({"alpha", "scale"});
      return Generator(GeneralizedKL{number(j, path, "alpha", 1.0), sc()});
    }
    if (fam == "jensen_shannon") {
      keys({"scale"});
      return Generator(GeneralizedKL{1.0, sc()});
    }
    if (fam == "anchored_kl") {
      keys({"anchor", "scale"});
      return Generator(AnchoredKL{number(j, path, "anchor"), sc()});
    }
    if (fam == "blended_chi2") {
      keys({"beta", "scale"});
      return Generator(BlendedWeightChiSq{number(j, path, "beta"), sc()});
    }
    if (fam == "two_point") {
      keys({"z1", "z2", "scale"});
      return Generator(TwoPoint{number(j, path, "z1"), number(j, path, "z2"), sc()});
    }
    if (fam == "asym_laplace") {
      keys({"alpha", "beta1", "beta2", "scale"});
      return Generator(GenAsymLaplace{number(j, path, "alpha"), number(j, path, "beta1"), number(j, path, "beta2"), sc()});
    }
    throw ConfigError(join(path, "family"), "unknown generator family '" + fam + "'");
  });
}

ConstraintSet parse_constraint(const json& j, const std::string& path, int K) {
  expect_object(j, path);
  const std::string type = string(j, path, "type");
  auto keys = [&](std::set<std::string> k) {
    k.insert({"type", "A"});
    check_keys(j, path, k);
  };
  ConstraintSet c = at(path, [&]() -> ConstraintSet {
    if (type == "everything") {
      keys({});
      return ConstraintSet::everything();
    }
    if (type == "nothing") {
      keys({});
      return ConstraintSet::nothing();
    }
    if (type == "halfspace") {
      keys({"a", "b"});
      return ConstraintSet::halfspace(vector(j, path, "a", K), number(j, path, "b"));
    }
    if (type == "box") {
      keys({"lo", "hi"});
      return ConstraintSet::box(vector(j, path, "lo", K), vector(j, path, "hi", K));
    }
    if (type == "equality") {
      keys({"a", "b"});
      return ConstraintSet::equality(vector(j, path, "a", K), number(j, path, "b"));
    }
    if (type == "simplex") {
      keys({});
      return ConstraintSet::simplex(K, number(j, path, "A", 1.0));
    }
    if (type == "coordinate_at_least" || type == "coordinate_at_most") {
      keys({"index", "value"});
      const long i = integer(j, path, "index", -1);
      if (i < 0 || i >= K) throw ConfigError(join(path, "index"), "index out of range 0.." + std::to_string(K - 1));
      Vec a(K, 0.0);
      const double v = number(j, path, "value");
      a[i] = type == "coordinate_at_least" ? 1.0 : -1.0;
      return ConstraintSet::halfspace(a, type == "coordinate_at_least" ? v : -v);
    }
    if (type == "ball") {
      keys({"center", "radius"});
      const Vec ctr = vector(j, path, "center", K);
      const double r = number(j, path, "radius");
      if (!(r > 0.0)) throw ConfigError(join(path, "radius"), "radius must be > 0");
      return ConstraintSet::from_predicate(
          [ctr, r](const Vec& q) {
            double s = 0.0;
            for (size_t k = 0; k < q.size(); ++k) s += (q[k] - ctr[k]) * (q[k] - ctr[k]);
            return s <= r * r;
          },
          "ball of radius " + std::to_string(r));
    }
    if (type == "all" || type == "any") {
      keys({"of"});
      if (!j.contains("of") || !j.at("of").is_array() || j.at("of").empty())
        throw ConfigError(join(path, "of"), "expected a non-empty array of constraints");
      const json& parts = j.at("of");
      ConstraintSet acc = parse_constraint(parts[0], join(join(path, "of"), size_t{0}), K);
      for (size_t i = 1; i < parts.size(); ++i) {
        ConstraintSet next = parse_constraint(parts[i], join(join(path, "of"), i), K);
        acc = type == "all" ? (acc & next) : (acc | next);
      }
      return acc;
    }
    throw ConfigError(join(path, "type"), "unknown constraint type '" + type + "'");
  });
  if (j.contains("A")) {
    const double A = number(j, path, "A");
    if (A == 0.0) throw ConfigError(join(path, "A"), "A must be nonzero");
    c = c.with_scale(A);
  }
  return c;
}

EstimatorConfig parse_estimator(const json& j, const std::string& path, int K, double* slab) {
  EstimatorConfig cfg;
  if (j.is_null()) return cfg;
  check_keys(j, path, {"n", "L", "seed", "batches", "threads", "slab", "proxy", "eta_rel"});
  cfg.n = integer(j, path, "n", cfg.n);
  cfg.L = integer(j, path, "L", cfg.L);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError(join(path, "seed"), "expected a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.batches = static_cast<int>(integer(j, path, "batches", cfg.batches));
  cfg.threads = static_cast<int>(integer(j, path, "threads", cfg.threads));
  cfg.eta_rel = number(j, path, "eta_rel", cfg.eta_rel);
  if (cfg.n < 1) throw ConfigError(join(path, "n"), "n must be >= 1");
  if (cfg.L < 1) throw ConfigError(join(path, "L"), "L must be >= 1");
  if (cfg.batches < 2) throw ConfigError(join(path, "batches"), "batches must be >= 2");
  if (cfg.threads < 1) throw ConfigError(join(path, "threads"), "threads must be >= 1");
  if (slab) {
    *slab = number(j, path, "slab", *slab);
    if (!(*slab >= 0.0)) throw ConfigError(join(path, "slab"), "slab must be >= 0");
  }
  if (j.contains("proxy")) {
    const std::string pp = join(path, "proxy");
    const json& p = j.at("proxy");
    check_keys(p, pp, {"method", "q_star", "M", "budget", "refine"});
    const std::string m = string(p, pp, "method", "hit_run");
    if (m == "hit_run") cfg.proxy = ProxyMethod::HitRun;
    else if (m == "divergence_density") cfg.proxy = ProxyMethod::DivergenceDensity;
    else if (m == "given") cfg.proxy = ProxyMethod::Given;
    else throw ConfigError(join(pp, "method"), "expected hit_run, divergence_density or given");
    if (cfg.proxy == ProxyMethod::Given) cfg.q_star = vector(p, pp, "q_star", K);
    cfg.proxy_M = integer(p, pp, "M", 0);
    cfg.proxy_budget = integer(p, pp, "budget", cfg.proxy_budget);
    if (cfg.proxy_M < 0) throw ConfigError(join(pp, "M"), "M must be >= 0");
    if (cfg.proxy_budget < 1) throw ConfigError(join(pp, "budget"), "budget must be >= 1");
    if (p.contains("refine")) {
      if (!p.at("refine").is_boolean()) throw ConfigError(join(pp, "refine"), "expected true or false");
      cfg.refine_proxy = p.at("refine").get<bool>();
    }
  }
  return cfg;
}

EntropySpec parse_entropy(const json& j, const std::string& path) {
  check_keys(j, path, {"name", "gamma", "s", "c1", "c2", "c3", "c4", "fprime0"});
  const std::string name = string(j, path, "name");
  const double g = number(j, path, "gamma", 2.0), s = number(j, path, "s", 2.0);
  EntropySpec e;
  if (name == "general" || name == "renyi-class") {
    e.kind = name == "general" ? EntropyKind::General : EntropyKind::RenyiClass;
    e.gamma = g;
    e.c1 = number(j, path, "c1", 1.0);
    e.c2 = number(j, path, "c2", 1.0);
    e.c3 = number(j, path, "c3", 0.0);
    e.c4 = number(j, path, "c4", 1.0);
    e.fprime0 = number(j, path, "fprime0", 1.0);
  } else {
    e = at(join(path, "name"), [&] { return entropy_preset(name, g, s); });
  }
  at(path, [&] { return entropy_form(e); });
  return e;
}

ProblemSpec parse_problem(const json& cfg, const std::string& base_dir) {
  check_keys(cfg, "", {"generator", "reference_vector", "data_file", "categories", "mode", "constraint", "estimator",
                       "output"});
  if (!cfg.contains("generator")) throw ConfigError("/generator", "missing required section");
  const Generator gen = parse_generator(cfg.at("generator"), "/generator");
  const bool has_ref = cfg.contains("reference_vector"), has_data = cfg.contains("data_file");
  if (has_ref == has_data) throw ConfigError("", "give exactly one of reference_vector and data_file");

  std::optional<BlockPartition> sample;
  Vec P;
  if (has_ref) {
    P = vector(cfg.at("reference_vector"), "/reference_vector");
    if (P.empty()) throw ConfigError("/reference_vector", "expected at least one entry");
    for (size_t i = 0; i < P.size(); ++i)
      if (!(P[i] > 0.0)) throw ConfigError(join("/reference_vector", i), "entries must be > 0");
  } else {
    std::filesystem::path f = string(cfg, "", "data_file");
    if (f.is_relative() && !base_dir.empty()) f = std::filesystem::path(base_dir) / f;
    std::ifstream in(f);
    if (!in) throw ConfigError("/data_file", "cannot open '" + f.string() + "'");
    std::vector<std::string> obs;
    for (std::string line; std::getline(in, line);) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
      if (!line.empty()) obs.push_back(line);
    }
    std::vector<std::string> cats;
    if (cfg.contains("categories")) {
      const json& c = cfg.at("categories");
      if (!c.is_array()) throw ConfigError("/categories", "expected an array of strings");
      for (size_t i = 0; i < c.size(); ++i) {
        if (!c[i].is_string()) throw ConfigError(join("/categories", i), "expected a string");
        cats.push_back(c[i].get<std::string>());
      }
    }
    sample = at("/data_file", [&] { return ingest_sample(obs, cats); });
    P = sample->p;
  }
  const int K = static_cast<int>(P.size());

  Mode mode = Mode::Simplex;
  if (cfg.contains("mode")) {
    const std::string m = string(cfg, "", "mode");
    if (m == "deterministic") mode = Mode::Deterministic;
    else if (m != "simplex") throw ConfigError("/mode", "expected deterministic or simplex");
    if (sample && mode == Mode::Deterministic) throw ConfigError("/mode", "a data file needs simplex mode");
  }
  if (!cfg.contains("constraint")) throw ConfigError("/constraint", "missing required section");
  ConstraintSet omega = parse_constraint(cfg.at("constraint"), "/constraint", K);
  if (mode == Mode::Simplex) {
    const double A = omega.scale();
    omega = (ConstraintSet::simplex(K, A) & omega).with_scale(A);
  }
  double slab = 0.01;
  EstimatorConfig est = parse_estimator(cfg.value("estimator", json()), "/estimator", K, &slab);
  BsProblem prob = at("/generator", [&] {
    return sample ? BsProblem(gen, *sample, omega) : BsProblem(gen, P, omega, mode);
  });
  return {std::move(prob), est, slab};
}

SolveOptions parse_solve_options(const json& cfg, int K) {
  SolveOptions opt;
  opt.estimator = parse_estimator(cfg.value("estimator", json()), "/estimator", K, &opt.slab);
  return opt;
}

TransportInstance parse_transport(const json& cfg) {
  check_keys(cfg, "", {"mu", "nu", "side", "estimator", "output"});
  TransportInstance t;
  t.mu = vector(cfg, "", "mu");
  t.nu = vector(cfg, "", "nu");
  if (cfg.contains("side"))
    t.side = parse_constraint(cfg.at("side"), "/side", static_cast<int>(t.mu.size() * t.nu.size()));
  at("", [&] { return reduce_transport(t); });
  return t;
}

AssignmentInstance parse_assignment(const json& cfg) {
  check_keys(cfg, "", {"cost", "eps1", "eps2", "gamma", "side", "estimator", "output"});
  AssignmentInstance a;
  if (!cfg.contains("cost") || !cfg.at("cost").is_array() || cfg.at("cost").empty())
    throw ConfigError("/cost", "expected a square matrix (array of rows)");
  const json& c = cfg.at("cost");
  for (size_t i = 0; i < c.size(); ++i) a.cost.push_back(vector(c[i], join("/cost", i), static_cast<long>(c.size())));
  a.eps1 = number(cfg, "", "eps1", a.eps1);
  a.eps2 = number(cfg, "", "eps2", a.eps2);
  a.gamma = number(cfg, "", "gamma", a.gamma);
  if (cfg.contains("side"))
    a.side = parse_constraint(cfg.at("side"), "/side", static_cast<int>(a.cost.size() * a.cost.size()));
  at("", [&] { return reduce_assignment(a); });
  return a;
}

QuadraticInstance parse_quadratic(const json& cfg) {
  check_keys(cfg, "", {"c1", "c2", "c3", "constraint", "total", "estimator", "output"});
  QuadraticInstance q;
  q.c1 = vector(cfg, "", "c1");
  const long K = static_cast<long>(q.c1.size());
  q.c2 = vector(cfg, "", "c2", K);
  q.c3 = vector(cfg, "", "c3", K);
  if (cfg.contains("constraint")) q.omega = parse_constraint(cfg.at("constraint"), "/constraint", static_cast<int>(K));
  if (cfg.contains("total")) {
    q.total = number(cfg, "", "total");
    q.omega = q.omega & ConstraintSet::equality(Vec(K, 1.0), *q.total);
  }
  at("", [&] { return reduce_quadratic(q); });
  return q;
}

EntropyMaxInstance parse_entropy_max(const json& cfg) {
  check_keys(cfg, "", {"entropy", "K", "constraint", "estimator", "output"});
  EntropyMaxInstance e;
  if (!cfg.contains("entropy")) throw ConfigError("/entropy", "missing required section");
  e.entropy = parse_entropy(cfg.at("entropy"), "/entropy");
  e.K = static_cast<int>(integer(cfg, "", "K", 0));
  if (e.K < 2) throw ConfigError("/K", "K must be an integer >= 2");
  if (cfg.contains("constraint")) e.omega = parse_constraint(cfg.at("constraint"), "/constraint", e.K);
  return e;
}

}  // namespace bsopt::cli
