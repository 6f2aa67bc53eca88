#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "rwm/analysis.hpp"
#include "rwm/benchmark.hpp"
#include "rwm/chain.hpp"
#include "rwm/csv.hpp"
#include "rwm/format.hpp"
#include "rwm/identity_oracles.hpp"
#include "rwm/limit_process.hpp"
#include "rwm/moment_ode.hpp"
#include "rwm/potential.hpp"

namespace rwm {
namespace {

// Usage-level failure detected after parsing (bad values, unreadable inputs).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  std::ofstream file;
  std::ostream* stream = nullptr;

  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream = &fallback;
      return;
    }
    file.open(path);
    if (!file) throw UsageError("cannot open " + path + " for writing");
    stream = &file;
  }
};

std::vector<double> parse_times(const std::string& text) {
  if (text.empty()) return {};
  std::vector<double> times = parse_double_list(text);
  if (!std::is_sorted(times.begin(), times.end())) throw UsageError("--record times must be sorted");
  return times;
}

CsvData read_input(const std::string& path) {
  try {
    return read_csv(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

struct CommonOptions {
  unsigned threads = 0;
};

void add_threads(CLI::App* sub, CommonOptions& common) {
  sub->add_option("--threads", common.threads, "worker threads, 0 = all cores (never changes output)");
}

void add_config(CLI::App* sub, std::string& path) {
  sub->add_option("--config", path, "flat key=value file; flags given on the command line win");
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends "--key=value" for every file entry not already given as a flag.
// Blank lines and '#' comments are skipped.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ": expected key=value, got '" + line + "'");
    auto trim = [](std::string x) {
      const auto b = x.find_first_not_of(" \t\r");
      const auto e = x.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    if (!given_on_command_line(args, flag)) extra.push_back(flag + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

// --------------------------------------------------------------------------

struct VerifyOptions {
  std::size_t samples = 10'000'000;
  std::size_t draws = 20;
  std::uint64_t seed = 1;
  std::string out;
};

int verify_closed_forms_cmd(const VerifyOptions& o, const CommonOptions& c, std::ostream& out) {
  const auto checks = verify_closed_forms(o.draws, o.samples, o.seed, c.threads);
  RunManifest m;
  m.subcommand = "verify-closed-forms";
  m.set("samples", o.samples).set("draws", o.draws).set("seed", std::to_string(o.seed)).set("out", o.out);
  Output sink(o.out, out);
  CsvWriter csv(*sink.stream, m, {"identity", "params", "closed_form", "mc_mean", "mc_se", "z_score"});
  bool all = true;
  for (const auto& ch : checks) {
    csv << ch.identity << ch.params << ch.closed_form << ch.mc_mean << ch.mc_se << ch.z_score;
    csv.end_row();
    all = all && ch.pass();
  }
  return all ? kExitOk : kExitCriterionFailed;
}

// --------------------------------------------------------------------------

struct ChainOptions {
  std::size_t n = 100;
  double l = 2.38;
  std::optional<std::size_t> steps;
  std::optional<double> horizon;
  std::uint64_t seed = 1;
  std::string potential = "gaussian:1";
  std::string init = "stationary";
  std::string record;
  std::size_t replicas = 1;
  std::size_t components = 1;
  std::optional<std::size_t> window;
  std::string out;
};

int run_chain_cmd(const ChainOptions& o, const CommonOptions& c, std::ostream& out) {
  const Potential p = parse_potential(o.potential);
  ChainConfig cfg;
  cfg.n = o.n;
  cfg.l = o.l;
  cfg.seed = o.seed;
  cfg.init = parse_initial(o.init);
  if (o.steps && o.horizon) throw UsageError("give --steps or --horizon, not both");
  if (o.steps) {
    cfg.steps = *o.steps;
  } else {
    const double h = o.horizon.value_or(1.0);
    if (!(h >= 0)) throw UsageError("--horizon must be nonnegative");
    cfg.steps = snapshot_step(h, o.n);
  }
  cfg.validate();
  const double t_end = static_cast<double>(cfg.steps) / static_cast<double>(cfg.n);
  std::vector<double> record = parse_times(o.record);
  if (record.empty()) record = {0.0, t_end};
  const std::size_t window = o.window.value_or(acceptance_window(cfg.n));
  if (window == 0) throw UsageError("--window must be positive");
  const std::size_t keep = std::min(o.components, cfg.n);

  const auto runs = run_replicas(cfg, p, record, o.replicas, keep, c.threads);

  RunManifest m;
  m.subcommand = "run-chain";
  m.set("n", cfg.n).set("l", cfg.l).set("steps", cfg.steps).set("seed", std::to_string(cfg.seed));
  m.set("potential", o.potential).set("init", cfg.init.describe()).set("record", o.record.empty() ? format_double(0) + "," + format_double(t_end) : o.record);
  m.set("replicas", o.replicas).set("components", keep).set("window", window).set("out", o.out);
  Output sink(o.out, out);
  CsvWriter csv(*sink.stream, m,
                {"replica", "t", "component_index", "position", "accepted_rate_window", "a_emp", "b_emp"});
  for (const auto& run : runs) {
    for (const auto& snap : run.snapshots) {
      const double acc = run.window_acceptance(snap.k, window);
      for (Eigen::Index j = 0; j < snap.leading.size(); ++j) {
        csv << static_cast<std::size_t>(run.replica) << snap.t << static_cast<std::size_t>(j + 1)
            << snap.leading(j) << acc << snap.a_emp << snap.b_emp;
        csv.end_row();
      }
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------------------

struct LimitOptions {
  std::size_t particles = 100'000;
  double dt = 1e-3;
  double horizon = 1;
  double l = 2.38;
  std::uint64_t seed = 1;
  std::string potential = "gaussian:1";
  std::string init = "stationary";
  std::string record;
  std::string out;
  std::string marginals;
};

int run_limit_cmd(const LimitOptions& o, const CommonOptions& c, std::ostream& out) {
  const Potential p = parse_potential(o.potential);
  EnsembleConfig cfg;
  cfg.n_particles = o.particles;
  cfg.dt = o.dt;
  cfg.horizon = o.horizon;
  cfg.l = o.l;
  cfg.seed = o.seed;
  cfg.init = parse_initial(o.init);
  cfg.threads = c.threads;
  cfg.validate();
  std::vector<double> record = parse_times(o.record);
  if (record.empty()) record = {0.0, o.horizon};
  // open outputs before the run so a bad path fails fast
  Output sink(o.out, out);
  std::optional<Output> marg;
  if (!o.marginals.empty()) marg.emplace(o.marginals, out);

  const EnsembleRun run = run_ensemble(cfg, p, record);

  RunManifest m;
  m.subcommand = "run-limit";
  m.set("particles", cfg.n_particles).set("dt", cfg.dt).set("horizon", cfg.horizon).set("l", cfg.l);
  m.set("seed", std::to_string(cfg.seed)).set("potential", o.potential).set("init", cfg.init.describe());
  m.set("record", o.record.empty() ? format_double(0) + "," + format_double(o.horizon) : o.record);
  m.set("out", o.out).set("marginals", o.marginals);
  CsvWriter csv(*sink.stream, m, {"t", "a", "b"});
  for (const auto& s : run.curve) {
    csv << s.t << s.a << s.b;
    csv.end_row();
  }
  if (marg) {
    CsvWriter mcsv(*marg->stream, m, {"t", "particle_index", "position"});
    for (const auto& snap : run.snapshots) {
      for (Eigen::Index i = 0; i < snap.particles.size(); ++i) {
        mcsv << snap.t << static_cast<std::size_t>(i) << snap.particles(i);
        mcsv.end_row();
      }
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------------------

struct OdeOptions {
  double m0 = 1;
  double l = 2.38;
  double horizon = 5;
  double dt = 1e-3;
  std::string out;
};

int gaussian_ode_cmd(const OdeOptions& o, std::ostream& out) {
  if (!(o.m0 >= 0) || !(o.l > 0) || !(o.horizon >= 0) || !(o.dt > 0)) {
    throw UsageError("gaussian-ode needs m0 >= 0, l > 0, horizon >= 0, dt > 0");
  }
  const auto curve = integrate_moment_ode(o.m0, o.l, o.horizon, o.dt);
  RunManifest m;
  m.subcommand = "gaussian-ode";
  m.set("m0", o.m0).set("l", o.l).set("horizon", o.horizon).set("dt", o.dt);
  m.set("error_estimate", curve.error_estimate).set("out", o.out);
  Output sink(o.out, out);
  CsvWriter csv(*sink.stream, m, {"t", "m"});
  for (std::size_t k = 0; k < curve.t.size(); ++k) {
    csv << curve.t[k] << curve.m[k];
    csv.end_row();
  }
  return kExitOk;
}

// --------------------------------------------------------------------------

struct CompareOptions {
  std::string chain;
  std::string limit;
  std::string marginals;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 1;
  std::string out;
};

double meta_number(const CsvData& data, const std::string& key, const std::string& path) {
  try {
    return parse_double(data.meta_value(key));
  } catch (const std::exception&) {
    throw UsageError(path + ": missing or invalid '# " + key + "=' header");
  }
}

int compare_cmd(const CompareOptions& o, std::ostream& out) {
  const CsvData chain = read_input(o.chain);
  const CsvData limit = read_input(o.limit);
  const auto n = static_cast<std::size_t>(meta_number(chain, "n", o.chain));

  // chain rows -> one slice per record time, replicas in file order
  std::vector<ChainTimeSlice> slices;
  {
    const std::size_t ct = chain.column("t"), cj = chain.column("component_index"),
                      cx = chain.column("position"), ca = chain.column("accepted_rate_window"),
                      cae = chain.column("a_emp"), cbe = chain.column("b_emp");
    std::map<double, ChainTimeSlice> by_time;
    for (std::size_t r = 0; r < chain.rows.size(); ++r) {
      if (chain.number(r, cj) != 1) continue;
      const double t = chain.number(r, ct);
      ChainTimeSlice& s = by_time[t];
      s.t = t;
      s.component1.push_back(chain.number(r, cx));
      s.acc_window.push_back(chain.number(r, ca));
      s.a_emp.push_back(chain.number(r, cae));
      s.b_emp.push_back(chain.number(r, cbe));
    }
    for (auto& [t, s] : by_time) slices.push_back(std::move(s));
  }

  LimitView view;
  view.l = meta_number(limit, "l", o.limit);
  {
    const std::size_t ct = limit.column("t"), ca = limit.column("a"), cb = limit.column("b");
    for (std::size_t r = 0; r < limit.rows.size(); ++r) {
      view.curve.push_back({limit.number(r, ct), limit.number(r, ca), limit.number(r, cb)});
    }
  }
  if (!o.marginals.empty()) {
    const CsvData marg = read_input(o.marginals);
    const std::size_t ct = marg.column("t"), cx = marg.column("position");
    std::map<double, std::vector<double>> by_time;
    for (std::size_t r = 0; r < marg.rows.size(); ++r) by_time[marg.number(r, ct)].push_back(marg.number(r, cx));
    for (auto& [t, xs] : by_time) {
      view.marginal_times.push_back(t);
      view.marginals.push_back(Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }
  }
  if (view.curve.empty()) throw UsageError(o.limit + ": no moment rows");

  const ComparisonReport report = compare_chain_to_limit(slices, view, n, o.bootstrap, o.seed);
  RunManifest m;
  m.subcommand = "compare";
  m.set("chain", o.chain).set("limit", o.limit).set("marginals", o.marginals);
  m.set("n", n).set("l", view.l).set("replicas", report.replicas);
  m.set("n_particles", view.marginals.empty() ? std::size_t{0} : static_cast<std::size_t>(view.marginals.front().size()));
  m.set("bootstrap", o.bootstrap).set("seed", std::to_string(o.seed)).set("out", o.out);
  Output sink(o.out, out);
  CsvWriter csv(*sink.stream, m,
                {"t", "w1_chain_vs_limit", "w1_se", "acc_emp", "acc_emp_se", "acc_pred", "a_chain",
                 "a_chain_se", "a_limit", "b_chain", "b_limit"});
  for (const auto& r : report.rows) {
    csv << r.t << r.w1_chain_vs_limit << r.w1_se << r.acc_emp << r.acc_emp_se << r.acc_pred << r.a_chain
        << r.a_chain_se << r.a_limit << r.b_chain << r.b_limit;
    csv.end_row();
  }
  return kExitOk;
}

// --------------------------------------------------------------------------

struct BenchOptions {
  BenchmarkConfig cfg;
  std::string dimensions = "10,50,200";
  bool check_determinism = false;
  unsigned rerun_threads = 1;
};

int full_benchmark_cmd(BenchOptions& o, const CommonOptions& c, std::ostream& out) {
  o.cfg.threads = c.threads;
  o.cfg.dimensions.clear();
  for (double d : parse_double_list(o.dimensions)) {
    if (!(d >= 1) || d != std::floor(d)) throw UsageError("--dimensions must be positive integers");
    o.cfg.dimensions.push_back(static_cast<std::size_t>(d));
  }
  const auto results = run_full_benchmark(o.cfg, &out);
  bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  if (o.check_determinism) {
    const CriterionResult det = check_determinism(o.cfg, o.rerun_threads, &out);
    out << format_result(det) << '\n';
    all = all && det.passed;
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  out << passed << "/" << results.size() << " criteria passed" << std::endl;
  return all ? kExitOk : kExitCriterionFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-walk Metropolis in high dimension: finite chains, their mean-field limit and checks",
               std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonOptions common;

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify-closed-forms", "Gaussian expectation identities against Monte Carlo");
  v->add_option("--samples", verify.samples, "MC samples per check")->capture_default_str();
  v->add_option("--draws", verify.draws, "random parameter sets per identity")->capture_default_str();
  v->add_option("--seed", verify.seed)->capture_default_str();
  v->add_option("--out", verify.out, "CSV path (stdout if omitted)");

  ChainOptions chain;
  auto* rc = app.add_subcommand("run-chain", "simulate replicas of the n-dimensional RWM chain");
  rc->add_option("--n", chain.n, "dimension")->capture_default_str();
  rc->add_option("--l", chain.l, "proposal scale")->capture_default_str();
  auto* steps = rc->add_option("--steps", chain.steps, "number of Metropolis steps");
  rc->add_option("--horizon", chain.horizon, "run to time t (floor(n t) steps)")->excludes(steps);
  rc->add_option("--seed", chain.seed)->capture_default_str();
  rc->add_option("--potential", chain.potential, "gaussian:s | logcosh | perturbed_gaussian:eps | flat")
      ->capture_default_str();
  rc->add_option("--init", chain.init, "normal:mu,sd | uniform:lo,hi | stationary[:burnin] | point:x0")
      ->capture_default_str();
  rc->add_option("--record", chain.record, "comma-separated record times");
  rc->add_option("--replicas", chain.replicas)->capture_default_str();
  rc->add_option("--components", chain.components, "leading coordinates stored per snapshot")
      ->capture_default_str();
  rc->add_option("--window", chain.window, "acceptance averaging window in steps (default ceil(n/10))");
  rc->add_option("--out", chain.out, "CSV path (stdout if omitted)");

  LimitOptions limit;
  auto* rl = app.add_subcommand("run-limit", "simulate the mean-field limit with a particle ensemble");
  rl->add_option("--particles", limit.particles)->capture_default_str();
  rl->add_option("--dt", limit.dt)->capture_default_str();
  rl->add_option("--horizon", limit.horizon)->capture_default_str();
  rl->add_option("--l", limit.l)->capture_default_str();
  rl->add_option("--seed", limit.seed)->capture_default_str();
  rl->add_option("--potential", limit.potential)->capture_default_str();
  rl->add_option("--init", limit.init)->capture_default_str();
  rl->add_option("--record", limit.record, "comma-separated snapshot times");
  rl->add_option("--out", limit.out, "moment curve CSV (stdout if omitted)");
  rl->add_option("--marginals", limit.marginals, "CSV of particle positions at the record times");

  OdeOptions ode;
  auto* go = app.add_subcommand("gaussian-ode", "integrate the second-moment ODE of the Gaussian target");
  go->add_option("--m0", ode.m0)->capture_default_str();
  go->add_option("--l", ode.l)->capture_default_str();
  go->add_option("--horizon", ode.horizon)->capture_default_str();
  go->add_option("--dt", ode.dt)->capture_default_str();
  go->add_option("--out", ode.out, "CSV path (stdout if omitted)");

  CompareOptions cmp;
  auto* co = app.add_subcommand("compare", "compare run-chain output with run-limit output");
  co->add_option("--chain", cmp.chain)->required();
  co->add_option("--limit", cmp.limit)->required();
  co->add_option("--marginals", cmp.marginals, "run-limit --marginals file, enables W1 columns");
  co->add_option("--bootstrap", cmp.bootstrap, "bootstrap resamples for W1 standard errors")->capture_default_str();
  co->add_option("--seed", cmp.seed)->capture_default_str();
  co->add_option("--out", cmp.out, "CSV path (stdout if omitted)");

  BenchOptions bench;
  auto* fb = app.add_subcommand("full-benchmark", "run every acceptance check and report pass/fail");
  fb->add_option("--seed", bench.cfg.seed)->capture_default_str();
  fb->add_option("--out-dir", bench.cfg.out_dir)->capture_default_str();
  fb->add_option("--dimensions", bench.dimensions)->capture_default_str();
  fb->add_option("--replicas", bench.cfg.replicas)->capture_default_str();
  fb->add_option("--particles", bench.cfg.particles)->capture_default_str();
  fb->add_option("--identity-samples", bench.cfg.identity_samples)->capture_default_str();
  fb->add_option("--identity-draws", bench.cfg.identity_draws)->capture_default_str();
  fb->add_option("--stationary-steps", bench.cfg.stationary_steps)->capture_default_str();
  fb->add_option("--stationary-replicas", bench.cfg.stationary_replicas)->capture_default_str();
  fb->add_option("--martingale-particles", bench.cfg.martingale_particles)->capture_default_str();
  fb->add_option("--bootstrap", bench.cfg.bootstrap_resamples)->capture_default_str();
  fb->add_flag("--check-determinism", bench.check_determinism,
               "rerun into <out-dir>_rerun and require identical CSV bytes");
  fb->add_option("--rerun-threads", bench.rerun_threads, "threads for the determinism rerun")
      ->capture_default_str();

  std::string config_path;
  for (CLI::App* sub : {v, rc, rl, go, co, fb}) add_config(sub, config_path);
  for (CLI::App* sub : {v, rc, rl, fb}) add_threads(sub, common);

  std::vector<std::string> merged;
  try {
    merged = merge_config_file(args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<std::string> reversed(merged.rbegin(), merged.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    if (*v) code = verify_closed_forms_cmd(verify, common, out);
    else if (*rc) code = run_chain_cmd(chain, common, out);
    else if (*rl) code = run_limit_cmd(limit, common, out);
    else if (*go) code = gaussian_ode_cmd(ode, out);
    else if (*co) code = compare_cmd(cmp, out);
    else if (*fb) code = full_benchmark_cmd(bench, common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << kToolName << ": finished in " << seconds << " s\n";
  return code;
}

}  // namespace rwm
