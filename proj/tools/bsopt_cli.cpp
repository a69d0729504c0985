// bsopt command-line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 zero hits or a failed
// inversion, 4 validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "bsopt/validation.hpp"
#include "config.hpp"

using namespace bsopt;
using namespace bsopt::cli;

namespace {

constexpr int kOk = 0, kConfig = 2, kRare = 3, kValidation = 4;

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<long> n, L;
  std::string out;
};

struct Output {
  std::string path, trace_csv;
};

Output parse_output(const json& cfg, const Flags& f) {
  Output o;
  if (cfg.contains("output")) {
    const json& j = cfg.at("output");
    if (!j.is_object()) throw ConfigError("/output", "expected an object");
    for (const auto& [k, v] : j.items()) {
      if (k != "path" && k != "trace_csv") throw ConfigError("/output/" + k, "unknown key");
      if (!v.is_string()) throw ConfigError("/output/" + k, "expected a string");
    }
    o.path = j.value("path", "");
    o.trace_csv = j.value("trace_csv", "");
  }
  if (!f.out.empty()) o.path = f.out;
  return o;
}

void apply_flags(EstimatorConfig& cfg, const Flags& f) {
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.n) cfg.n = *f.n;
  if (f.L) cfg.L = *f.L;
  if (cfg.n < 1 || cfg.L < 1 || cfg.threads < 1) throw ConfigError("", "--n, --L and --threads must be >= 1");
}

json vec_json(const Vec& v) { return json(v); }

json estimate_json(const Estimate& e) {
  return {{"value", e.value},
          {"log_pi_hat", e.log_pi_hat},
          {"hits", e.hits},
          {"stderr", e.stderr},
          {"stderr_log_pi", e.stderr_log},
          {"seed", e.seed},
          {"n", e.n},
          {"L", e.L},
          {"hit_rate", e.hit_rate()},
          {"q_star", vec_json(e.q_star)},
          {"tau", vec_json(e.tau)},
          {"warnings", e.warnings}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("/output/path", "cannot write '" + path + "'");
  out << text;
}

// cumulative estimate after each batch
void write_trace(const std::string& path, const Estimate& e, const std::function<double(double)>& to_value) {
  std::ofstream out(path);
  if (!out) throw ConfigError("/output/trace_csv", "cannot write '" + path + "'");
  out << "batch,replicates,log_pi_hat,value\n";
  const long B = static_cast<long>(e.trace.size());
  char buf[128];
  for (long b = 0; b < B; ++b) {
    double v = kNaN;
    try {
      v = to_value(e.trace[b]);
    } catch (const std::exception&) {
    }
    const long reps = e.L * (b + 1) / B;
    std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", b + 1, reps, e.trace[b], v);
    out << buf;
  }
}

int finish(json result, const Output& o, const Estimate& e) {
  write_text(o.path, result.dump(2) + "\n");
  for (const auto& w : e.warnings) std::cerr << "warning: " << w << "\n";
  if (e.hits == 0) {
    std::cerr << "error: no replicate hit the constraint set\n";
    return kRare;
  }
  if (!std::isfinite(e.value)) {
    std::cerr << "error: the estimate could not be inverted\n";
    return kRare;
  }
  return kOk;
}

std::string dir_of(const std::string& file) { return std::filesystem::path(file).parent_path().string(); }

int cmd_estimate(const std::string& file, const Flags& f, bool bounds) {
  const json cfg = load_config(file);
  ProblemSpec spec = parse_problem(cfg, dir_of(file));
  const Output o = parse_output(cfg, f);
  apply_flags(spec.estimator, f);
  spec.estimator.trace = !o.trace_csv.empty();
  const BsProblem& prob = spec.problem;
  json r = {{"command", bounds ? "bounds" : "estimate"},
            {"generator", prob.generator().name()},
            {"constraint", prob.omega().description()},
            {"reference_vector", vec_json(prob.P())}};
  Estimate e;
  if (bounds) {
    const Bounds b = bounds_general(prob.with_omega(prob.omega().relaxed(spec.slab)), spec.estimator);
    e = b.estimate;
    r.update(estimate_json(e));
    r["lower"] = b.lower;
    r["upper"] = b.upper;
    r["q_hat"] = vec_json(b.q_hat);
    r["warnings"] = b.warnings;
  } else {
    const SlabEstimate se = estimate_slab_limit(prob, spec.estimator, spec.slab);
    e = se.estimate;
    r.update(estimate_json(e));
    if (se.extrapolated) r["slab_values"] = {{"width", se.width}, {"wide", se.wide_value}, {"narrow", se.narrow_value}};
  }
  r["exact_inversion"] = prob.exact_inversion();
  if (prob.sample()) {
    r["categories"] = prob.sample()->categories;
    r["sample_size"] = prob.sample()->n;
  }
  if (!o.trace_csv.empty())
    write_trace(o.trace_csv, e, [&](double lp) { return prob.invert(lp, e.n); });
  return finish(r, o, e);
}

template <class Inst>
int cmd_problem(const std::string& file, const Flags& f, Inst (*parse)(const json&), int K_of(const Inst&),
                const std::function<void(json&, const Inst&)>& extra = nullptr) {
  const json cfg = load_config(file);
  const Inst inst = parse(cfg);
  SolveOptions opt = parse_solve_options(cfg, K_of(inst));
  const Output o = parse_output(cfg, f);
  apply_flags(opt.estimator, f);
  opt.estimator.trace = !o.trace_csv.empty();
  const Report rep = solve(inst, opt);
  json r = {{"command", rep.problem}};
  r.update(estimate_json(rep.estimate));
  r["value"] = rep.value;
  r["divergence"] = rep.divergence;
  r["offset"] = rep.offset;
  r["warnings"] = rep.warnings;
  if (extra) extra(r, inst);
  if (!o.trace_csv.empty()) {
    // the trace reports the rate and its divergence; the offset is constant
    Estimate e = rep.estimate;
    write_trace(o.trace_csv, e, [&](double lp) { return -lp / static_cast<double>(e.n); });
  }
  return finish(r, o, rep.estimate);
}

int cmd_sample_law(const std::string& file, const Flags& f, long count, long block, double tilt) {
  const json cfg = load_config(file);
  if (!cfg.is_object() || !cfg.contains("generator")) throw ConfigError("/generator", "missing required section");
  const Generator g = parse_generator(cfg.at("generator"), "/generator");
  const WeightLaw law = law_for(g);
  if (count < 1 || block < 1) throw ConfigError("", "--count and --block must be >= 1");
  const BlockSampler s = law.block_sampler(tilt, block);
  Rng rng(f.seed.value_or(1), 0);
  Vec draws(count);
  double m = 0.0, m2 = 0.0;
  for (long i = 0; i < count; ++i) {
    const double x = draws[i] = s(rng);
    const double d = x - m;
    m += d / static_cast<double>(i + 1);
    m2 += d * (x - m);
  }
  const json r = {{"command", "sample-law"},
                  {"law", law.name()},
                  {"block", block},
                  {"tilt", tilt},
                  {"seed", f.seed.value_or(1)},
                  {"count", count},
                  {"mean", m},
                  {"variance", count > 1 ? m2 / static_cast<double>(count - 1) : 0.0},
                  {"exact_mean", static_cast<double>(block) * law.log_mgf_prime(tilt)},
                  {"draws", draws}};
  write_text(parse_output(cfg, f).path, r.dump(2) + "\n");
  return kOk;
}

int cmd_validate(const Flags& f, const std::vector<int>& only) {
  ValidationOptions opt;
  if (f.seed) opt.seed = *f.seed;
  if (f.threads) opt.threads = *f.threads;
  opt.only.insert(only.begin(), only.end());
  opt.on_result = [](const CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
  };
  const auto res = run_acceptance(opt);
  json j = json::array();
  int failed = 0;
  for (const auto& r : res) {
    failed += !r.pass;
    j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  if (!f.out.empty()) write_text(f.out, j.dump(2) + "\n");
  std::cout << (failed ? "FAIL" : "PASS") << ": " << failed << " criterion(s) failed" << std::endl;
  return failed ? kValidation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bare-simulation estimates of constrained divergence minima"};
  app.require_subcommand(1);
  Flags f;
  std::uint64_t seed = 0;
  int threads = 0;
  long n = 0, L = 0;
  auto* o_seed = app.add_option("--seed", seed, "random seed (overrides the config)");
  auto* o_threads = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* o_n = app.add_option("--n", n, "sample size n")->check(CLI::PositiveNumber);
  auto* o_L = app.add_option("--L", L, "number of replicates")->check(CLI::PositiveNumber);
  app.add_option("--out", f.out, "result file (default: stdout)");

  std::string config;
  auto with_config = [&](CLI::App* s) {
    s->add_option("config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    s->fallthrough();
    return s;
  };
  auto* est = with_config(app.add_subcommand("estimate", "estimate inf D(Q,P) over the constraint set"));
  auto* bnd = with_config(app.add_subcommand("bounds", "lower and upper bounds for non-power generators"));
  auto* ent = with_config(app.add_subcommand("entropy-max", "extremum of an entropy over a constraint set"));
  auto* trn = with_config(app.add_subcommand("transport", "discrete optimal transport relaxation"));
  auto* asg = with_config(app.add_subcommand("assignment", "assignment problem relaxation"));
  auto* qdr = with_config(app.add_subcommand("quadratic", "separable quadratic minimization"));
  auto* sml = with_config(app.add_subcommand("sample-law", "diagnostic draws from a weight law"));
  long count = 10, block = 1;
  double tilt = 0.0;
  sml->add_option("--count", count, "number of draws");
  sml->add_option("--block", block, "block size (draws are n-fold sums)");
  sml->add_option("--tilt", tilt, "exponential tilt tau");
  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  val->fallthrough();
  std::vector<int> only;
  val->add_option("--only", only, "criterion ids")->delimiter(',')->check(CLI::Range(1, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (*o_seed) f.seed = seed;
  if (*o_threads) f.threads = threads;
  if (*o_n) f.n = n;
  if (*o_L) f.L = L;

  try {
    if (*est) return cmd_estimate(config, f, false);
    if (*bnd) return cmd_estimate(config, f, true);
    if (*ent)
      return cmd_problem<EntropyMaxInstance>(config, f, parse_entropy_max,
                                             [](const EntropyMaxInstance& i) { return i.K; });
    if (*trn)
      return cmd_problem<TransportInstance>(
          config, f, parse_transport, [](const TransportInstance& i) { return int(i.mu.size() * i.nu.size()); });
    if (*asg)
      return cmd_problem<AssignmentInstance>(
          config, f, parse_assignment, [](const AssignmentInstance& i) { return int(i.cost.size() * i.cost.size()); },
          [](json& r, const AssignmentInstance& i) {
            if (i.cost.size() <= 8) {
              std::vector<int> perm;
              r["brute_force"] = assignment_brute_force(i, &perm);
              r["brute_force_permutation"] = perm;
            }
          });
    if (*qdr)
      return cmd_problem<QuadraticInstance>(config, f, parse_quadratic,
                                            [](const QuadraticInstance& i) { return int(i.c1.size()); });
    if (*sml) return cmd_sample_law(config, f, count, block, tilt);
    if (*val) return cmd_validate(f, only);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRare;
  }
  return kConfig;
}
