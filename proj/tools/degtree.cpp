// degtree: sample, enumerate, census, limit, bounds, verify for the
// degree-factorial-weighted random tree model.

#include "degtree/census.hpp"
#include "degtree/io.hpp"
#include "degtree/limit.hpp"
#include "degtree/oracle.hpp"
#include "degtree/sampler.hpp"
#include "degtree/verify.hpp"
#include "degtree/weights.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

namespace {

constexpr const char* kVersion = "1.0.0";

int default_threads() {
  if (const char* env = std::getenv("DEGTREE_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

struct ManifestWriter {
  std::string subcommand;
  degtree::json params = degtree::json::object();
  std::string input, output;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  ~ManifestWriter() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const degtree::json m{{"subcommand", subcommand}, {"params", params},
                          {"version", kVersion},     {"input", input},
                          {"output", output},        {"wall_time_s", wall}};
    std::cerr << m.dump() << "\n";
    if (!output.empty() && output != "-") {
      std::ofstream f(output + ".manifest.json");
      f << m.dump(2) << "\n";
    }
  }
};

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output file: " + path);
  return file;
}

// --- sample -------------------------------------------------------------

int cmd_sample(const std::string& mode, degtree::SamplerConfig cfg, const std::string& out_path) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "sample " + mode;
  mf.output = out_path;
  cfg.method = mode == "mcmc" ? SampleMethod::chain : SampleMethod::direct;
  mf.params = config_to_json(cfg);
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  if (cfg.method == SampleMethod::direct) {
    os << json{{"type", "degtree-batch"}, {"config", config_to_json(cfg)}}.dump() << "\n";
    sample_direct_stream(cfg, [&](std::uint64_t, const LabeledTree& t) {
      os << tree_to_json(t).dump() << "\n";
    });
  } else {
    write_batch_jsonl(os, sample_chain(cfg));
  }
  return 0;
}

// --- enumerate ----------------------------------------------------------

int cmd_enumerate(int n, const std::string& stat, const std::string& out_path) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "enumerate";
  mf.params = {{"n", n}, {"stat", stat}};
  mf.output = out_path;
  const ExactEnsemble e = enumerate_all(n);
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  if (stat == "maxdeg") {
    std::map<int, Int> weight_by_maxdeg;
    for (std::uint64_t r = 0; r < e.weights.size(); ++r) {
      const LabeledTree t = prufer_decode(rank_to_code(n, r));
      int mx = 0;
      for (int v = 0; v < n; ++v) mx = std::max(mx, t.degree(v));
      weight_by_maxdeg[mx] += e.weights[r];
    }
    os << "max_degree,probability,decimal\n";
    for (auto& [k, w] : weight_by_maxdeg) {
      const ExactQ p(w, e.total);
      os << k << "," << exactq_to_string(p) << "," << to_double(p) << "\n";
    }
  } else if (stat == "degree-hist") {
    os << "degree,probability,decimal\n";
    for (int d = 1; d <= n - 1; ++d) {
      const ExactQ p = joint_degree_probability(n, {{0, d}});
      os << d << "," << exactq_to_string(p) << "," << to_double(p) << "\n";
    }
  } else if (stat == "class-dist") {
    // classes: sorted degree sequences
    std::map<std::vector<int>, Int> weight_by_class;
    for (std::uint64_t r = 0; r < e.weights.size(); ++r) {
      const LabeledTree t = prufer_decode(rank_to_code(n, r));
      std::vector<int> d = degree_sequence(t);
      std::sort(d.begin(), d.end());
      weight_by_class[d] += e.weights[r];
    }
    os << "degree_sequence,probability,decimal\n";
    for (auto& [cls, w] : weight_by_class) {
      const ExactQ p(w, e.total);
      std::string key;
      for (std::size_t i = 0; i < cls.size(); ++i)
        key += (i ? " " : "") + std::to_string(cls[i]);
      os << "\"" << key << "\"," << exactq_to_string(p) << "," << to_double(p) << "\n";
    }
  } else {
    throw std::invalid_argument("enumerate: unknown stat " + stat);
  }
  return 0;
}

// --- census -------------------------------------------------------------

std::string level_description(const degtree::RootedBall& b) {
  std::string d = "levels=(";
  for (int l = 0; l <= b.max_depth(); ++l) d += (l ? "," : "") + std::to_string(b.level_size(l));
  return d + ")";
}

int cmd_census(int radius, const std::string& in_path, const std::string& out_path) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "census";
  mf.params = {{"radius", radius}};
  mf.input = in_path;
  mf.output = out_path;
  std::ifstream in(in_path);
  if (!in) throw std::invalid_argument("cannot open input file: " + in_path);
  BallCensus census;
  census.radius = radius;
  std::map<std::string, RootedBall> reps;
  read_batch_jsonl(in, [&](const LabeledTree& t) {
    for (int v = 0; v < t.n; ++v) {
      RootedBall b = extract_ball(t, v, radius);
      reps.emplace(b.key, b);
      ++census.counts[b.key];
    }
    census.total += static_cast<std::uint64_t>(t.n);
    ++census.trees;
  });
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "key,description,count,frequency,limit_probability,z_score\n";
  for (auto& [key, count] : census.counts) {
    const RootedBall& b = reps.at(key);
    const double freq = static_cast<double>(count) / static_cast<double>(census.total);
    const ExactQ p = limit_ball_probability(b);
    const double pd = to_double(p);
    os << hex_key(key) << "," << level_description(b) << "," << count << "," << freq << ","
       << exactq_to_string(p) << ",";
    if (pd > 0 && pd < 1)
      os << (freq - pd) * std::sqrt(static_cast<double>(census.total)) / std::sqrt(pd * (1 - pd));
    os << "\n";
  }
  return 0;
}

// --- limit --------------------------------------------------------------

int cmd_limit_table(int l, int max_degree, const std::string& out_path) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "limit table";
  mf.params = {{"l", l}, {"max_degree", max_degree}};
  mf.output = out_path;
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "key,description,probability,decimal\n";
  for (const auto& b : enumerate_balls(l, max_degree)) {
    const ExactQ p = limit_ball_probability(b);
    os << hex_key(b.key) << "," << level_description(b) << "," << exactq_to_string(p) << ","
       << to_double(p) << "\n";
  }
  return 0;
}

int cmd_limit_check(int l, int max_degree) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "limit check";
  mf.params = {{"l", l}, {"max_degree", max_degree}};
  bool ok = true;
  int checked = 0;
  ExactQ worst_resid = 0, worst_bound = 0;
  for (int radius = 1; radius <= l; ++radius)
    for (const auto& b : enumerate_balls(radius, 5)) {
      if (b.size() > 6) continue;
      const auto res = consistency_check(b, max_degree);
      const ExactQ resid = boost::multiprecision::abs(res.lhs - res.rhs);
      if (resid > worst_resid) {
        worst_resid = resid;
        worst_bound = res.tail_bound;
      }
      if (resid > res.tail_bound) ok = false;
      ++checked;
    }
  const ExactQ mass = normalization_mass(l, max_degree);
  std::cout << "balls_checked," << checked << "\n";
  std::cout << "worst_residual," << to_double(worst_resid) << "\n";
  std::cout << "worst_tail_bound," << to_double(worst_bound) << "\n";
  std::cout << "normalization_mass," << to_double(mass) << "\n";
  std::cout << "consistent," << (ok ? "yes" : "no") << "\n";
  return ok ? 0 : 1;
}

int cmd_limit_sample(int l, int max_degree, std::uint64_t count, std::uint64_t seed,
                     double mass_epsilon, const std::string& out_path) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "limit sample";
  mf.params = {{"l", l},       {"max_degree", max_degree},     {"count", count},
               {"seed", seed}, {"mass_epsilon", mass_epsilon}};
  mf.output = out_path;
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  Rng rng(seed);
  bool first = true;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto s = sample_limit_ball(l, max_degree, rng, mass_epsilon);
    if (first) {
      os << json{{"type", "degtree-limit-batch"},
                 {"config", json{{"l", l}, {"max_degree", max_degree}, {"count", count}, {"seed", seed}}},
                 {"truncated_mass", exactq_to_string(s.truncated_mass)}}
                .dump()
         << "\n";
      first = false;
    }
    os << ball_to_json(s.ball).dump() << "\n";
  }
  return 0;
}

// --- bounds -------------------------------------------------------------

int cmd_bounds(int n, int k, double delta) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "bounds";
  mf.params = {{"n", n}, {"k", k}, {"delta", delta}};
  std::cout << "n,k,delta,upper_tail_bound,lower_tail_bound\n";
  std::cout << n << "," << k << "," << delta << "," << max_degree_upper_tail_bound(n, k, delta)
            << "," << max_degree_lower_tail_bound(n, k) << "\n";
  return 0;
}

// --- verify -------------------------------------------------------------

int cmd_verify(const std::string& suite, const std::string& tier, std::uint64_t seed) {
  using namespace degtree;
  ManifestWriter mf;
  mf.subcommand = "verify";
  mf.params = {{"suite", suite}, {"tier", tier}, {"seed", seed}};
  const bool slow = tier == "slow";
  std::vector<CheckResult> results;
  if (suite == "exact" || suite == "all") {
    auto r = exact_suite(slow);
    results.insert(results.end(), r.begin(), r.end());
  }
  if (suite == "montecarlo" || suite == "all") {
    auto r = montecarlo_suite(seed, slow);
    results.insert(results.end(), r.begin(), r.end());
  }
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  expected=" << r.expected
              << "  got=" << r.got;
    if (r.tolerance > 0) std::cout << "  tol=" << r.tolerance;
    std::cout << "\n";
  }
  const bool ok = all_pass(results);
  std::cout << (ok ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << " (" << results.size()
            << " checks)\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degtree: degree-factorial-weighted random trees"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "draw trees (JSONL batch)");
  std::string sample_mode;
  degtree::SamplerConfig cfg;
  cfg.threads = default_threads();
  std::string sample_out;
  sample->add_option("mode", sample_mode, "mcmc or direct")
      ->required()
      ->check(CLI::IsMember({"mcmc", "direct"}));
  sample->add_option("--n", cfg.n, "number of vertices")->required()->check(CLI::Range(2, 1 << 24));
  sample->add_option("--count", cfg.count, "trees to draw (default 1)");
  sample->add_option("--seed", cfg.seed, "RNG seed (default 0)");
  sample->add_option("--steps", cfg.steps, "mcmc: total steps (default derived)");
  sample->add_option("--burnin", cfg.burnin, "mcmc: burn-in steps (default 50 n ln n)");
  sample->add_option("--thin", cfg.thin, "mcmc: keep every thin-th state (default 1)");
  std::string dm = "auto";
  sample->add_option("--direct-method", dm, "direct: auto, dp or rejection")
      ->check(CLI::IsMember({"auto", "dp", "rejection"}));
  sample->add_option("--threads", cfg.threads, "worker threads (default $DEGTREE_THREADS or 1)");
  sample->add_option("--out", sample_out, "output path (default stdout)");

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "exact statistics by exhaustive enumeration");
  int enum_n = 4;
  std::string enum_stat, enum_out;
  enumerate->add_option("--n", enum_n, "number of vertices (<= 8)")->required()->check(CLI::Range(2, 8));
  enumerate->add_option("--stat", enum_stat, "maxdeg, degree-hist or class-dist")
      ->required()
      ->check(CLI::IsMember({"maxdeg", "degree-hist", "class-dist"}));
  enumerate->add_option("--out", enum_out, "output CSV path (default stdout)");

  // census
  auto* census = app.add_subcommand("census", "empirical l-ball census of a sample batch");
  int census_radius = 1;
  std::string census_in, census_out;
  census->add_option("--radius", census_radius, "ball radius l")->required()->check(CLI::Range(0, 8));
  census->add_option("--input", census_in, "JSONL batch file")->required();
  census->add_option("--out", census_out, "output CSV path (default stdout)");

  // limit
  auto* limit = app.add_subcommand("limit", "local limit measure tools");
  limit->require_subcommand(1);
  int lim_l = 1, lim_D = 10;
  std::uint64_t lim_count = 1, lim_seed = 0;
  std::string lim_out;
  auto* lt = limit->add_subcommand("table", "exact class probabilities up to a degree cutoff");
  lt->add_option("--l", lim_l, "ball radius")->required()->check(CLI::Range(1, 6));
  lt->add_option("--max-degree", lim_D, "degree cutoff")->required()->check(CLI::Range(1, 64));
  lt->add_option("--out", lim_out, "output CSV path (default stdout)");
  auto* lc = limit->add_subcommand("check", "consistency and normalization checks");
  lc->add_option("--l", lim_l, "ball radius")->required()->check(CLI::Range(1, 6));
  lc->add_option("--max-degree", lim_D, "degree cutoff")->required()->check(CLI::Range(1, 64));
  auto* ls = limit->add_subcommand("sample", "draw balls from the truncated limit measure");
  ls->add_option("--l", lim_l, "ball radius")->required()->check(CLI::Range(1, 6));
  ls->add_option("--max-degree", lim_D, "degree cutoff")->required()->check(CLI::Range(1, 64));
  ls->add_option("--count", lim_count, "balls to draw (default 1)");
  ls->add_option("--seed", lim_seed, "RNG seed (default 0)");
  double lim_eps = 1e-3;
  ls->add_option("--mass-epsilon", lim_eps,
                 "largest tolerated truncated-mass deficit (default 1e-3)");
  ls->add_option("--out", lim_out, "output path (default stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "maximum-degree tail bound values");
  int b_n = 100, b_k = 5;
  double b_delta = 0.1;
  bounds->add_option("--n", b_n, "number of vertices")->required()->check(CLI::Range(2, 1 << 30));
  bounds->add_option("--k", b_k, "degree threshold")->required()->check(CLI::Range(1, 1 << 20));
  bounds->add_option("--delta", b_delta, "slack in the upper-tail bound (default 0.1)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the built-in check suites");
  std::string v_suite = "all", v_tier = "fast";
  std::uint64_t v_seed = 7;
  verify->add_option("--suite", v_suite, "exact, montecarlo or all (default all)")
      ->check(CLI::IsMember({"exact", "montecarlo", "all"}));
  verify->add_option("--tier", v_tier, "fast or slow (default fast)")
      ->check(CLI::IsMember({"fast", "slow"}));
  verify->add_option("--seed", v_seed, "seed for the montecarlo suite (default 7)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) {
      cfg.direct_method = dm == "dp"          ? degtree::DirectMethod::dp
                          : dm == "rejection" ? degtree::DirectMethod::rejection
                                              : degtree::DirectMethod::auto_select;
      return cmd_sample(sample_mode, cfg, sample_out);
    }
    if (enumerate->parsed()) return cmd_enumerate(enum_n, enum_stat, enum_out);
    if (census->parsed()) return cmd_census(census_radius, census_in, census_out);
    if (limit->parsed()) {
      if (lt->parsed()) return cmd_limit_table(lim_l, lim_D, lim_out);
      if (lc->parsed()) return cmd_limit_check(lim_l, lim_D);
      return cmd_limit_sample(lim_l, lim_D, lim_count, lim_seed, lim_eps, lim_out);
    }
    if (bounds->parsed()) return cmd_bounds(b_n, b_k, b_delta);
    if (verify->parsed()) return cmd_verify(v_suite, v_tier, v_seed);
  } catch (const std::length_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
