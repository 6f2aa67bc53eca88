#include "rwm/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rwm/analysis.hpp"
#include "rwm/chain.hpp"
#include "rwm/coefficients.hpp"
#include "rwm/csv.hpp"
#include "rwm/format.hpp"
#include "rwm/identity_oracles.hpp"
#include "rwm/limit_process.hpp"
#include "rwm/moment_ode.hpp"
#include "rwm/parallel.hpp"
#include "rwm/potential.hpp"

namespace fs = std::filesystem;

namespace rwm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

class Context {
 public:
  Context(const BenchmarkConfig& cfg, std::ostream* progress) : cfg_(cfg), progress_(progress) {
    fs::create_directories(cfg.out_dir);
  }

  const BenchmarkConfig& cfg() const { return cfg_; }

  void log(const std::string& line) const {
    if (progress_ != nullptr) *progress_ << "  " << line << std::endl;
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream out(fs::path(cfg_.out_dir) / name);
    if (!out) throw std::runtime_error("cannot write " + name);
    return out;
  }

  RunManifest manifest(std::string section) const {
    RunManifest m;
    m.subcommand = "full-benchmark";
    m.set("section", std::move(section));
    m.set("seed", std::to_string(cfg_.seed));
    return m;
  }

 private:
  const BenchmarkConfig& cfg_;
  std::ostream* progress_;
};

// ---------------------------------------------------------------------------
// 1. closed-form Gaussian identities vs Monte Carlo

CriterionResult closed_form_suite(const Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto start = Clock::now();
  const auto checks =
      verify_closed_forms(cfg.identity_draws, cfg.identity_samples, cfg.seed, cfg.threads);
  const double elapsed = seconds_since(start);

  auto out = ctx.open("closed_forms.csv");
  RunManifest m = ctx.manifest("closed_forms");
  m.set("draws", cfg.identity_draws).set("samples", cfg.identity_samples);
  CsvWriter csv(out, m, {"identity", "params", "closed_form", "mc_mean", "mc_se", "z_score"});
  std::size_t failures = 0;
  double worst = 0;
  for (const auto& c : checks) {
    csv << c.identity << c.params << c.closed_form << c.mc_mean << c.mc_se << c.z_score;
    csv.end_row();
    failures += c.pass() ? 0 : 1;
    worst = std::max(worst, std::abs(c.z_score));
  }
  const bool in_time = elapsed <= 120;
  return {1, "closed-form Gaussian identities vs 1e7-sample MC within 3 SE, <= 2 min",
          failures == 0 && in_time,
          std::to_string(checks.size()) + " checks, " + std::to_string(failures) +
              " with |z| > 3, max |z| = " + fmt(worst) + (in_time ? "" : ", over time budget")};
}

// ---------------------------------------------------------------------------
// 2. coefficient identities and bounds

CriterionResult coefficient_identities(const Context& ctx) {
  const double ls[] = {0.5, 1.0, 2.38, 5.0};
  const double fishers[] = {0.25, 1.0, 4.0};
  auto out = ctx.open("coefficient_identities.csv");
  CsvWriter csv(out, ctx.manifest("coefficient_identities"),
                {"l", "I", "gamma_II", "two_gee_II", "h"});
  double worst_identity = 0;
  for (double l : ls) {
    for (double fisher : fishers) {
      const ScalingParams<double> s(l);
      const MomentPair<double> p(fisher, fisher);
      const double g = gamma_coef(p, s), two_gee = 2 * gee_coef(p, s), h = h_of_l(l, fisher);
      worst_identity = std::max({worst_identity, std::abs(g - h), std::abs(two_gee - h)});
      csv << l << fisher << g << two_gee << h;
      csv.end_row();
    }
  }

  // 100 a-values (0, +inf and 98 log-spaced in [1e-6, 1e6]) x 100 b-values in [-50, 50]
  std::vector<double> as{0.0, HUGE_VAL};
  for (int i = 0; i < 98; ++i) as.push_back(std::pow(10.0, -6.0 + 12.0 * i / 97.0));
  std::size_t points = 0, violations = 0;
  constexpr double kSlack = 1e-12;
  for (double l : ls) {
    const ScalingParams<double> s(l);
    for (double a : as) {
      for (int j = 0; j < 100; ++j) {
        const double b = -50.0 + 100.0 * j / 99.0;
        const MomentPair<double> p(a, b);
        const double g = gamma_coef(p, s), gee = gee_coef(p, s);
        ++points;
        if (!(gee >= -kSlack && gee <= g + kSlack && g <= s.l2() + kSlack)) ++violations;
      }
    }
  }
  return {2, "Gamma(I,I) = 2G(I,I) = h(l) to 1e-12; 0 <= G <= Gamma <= l^2 on the grid",
          worst_identity <= 1e-12 && violations == 0,
          "max identity error " + fmt(worst_identity) + ", " + std::to_string(violations) +
              " bound violations over " + std::to_string(points) + " points"};
}

// ---------------------------------------------------------------------------
// 3. optimal scaling

CriterionResult optimal_scaling(const Context& ctx) {
  const auto start = Clock::now();
  const double l_star = optimal_scale(1.0);
  const double acc = acc_rate(MomentPair<double>(1, 1), ScalingParams<double>(2.38));
  const double elapsed = seconds_since(start);
  auto out = ctx.open("optimal_scaling.csv");
  CsvWriter csv(out, ctx.manifest("optimal_scaling"), {"l_star", "acc_at_2.38"});
  csv << l_star << acc;
  csv.end_row();
  return {3, "argmax h = 2.38 +- 0.01 and acc(1,1; 2.38) = 0.2340 +- 0.0005, <= 1 s",
          std::abs(l_star - 2.38) <= 0.01 && std::abs(acc - 0.2340) <= 0.0005 && elapsed <= 1,
          "l* = " + fmt(l_star, 6) + ", acc = " + fmt(acc, 6)};
}

// ---------------------------------------------------------------------------
// 4. stationary chain

CriterionResult stationary_chain(const Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto start = Clock::now();
  const Potential p = builtin_potential("gaussian", std::vector<double>{1.0});
  ChainConfig chain;
  chain.n = cfg.stationary_n;
  chain.l = 2.38;
  chain.steps = cfg.stationary_steps;
  chain.seed = mix64(cfg.seed ^ 0x5354415449ULL);
  chain.init = InitialDistribution::stationary();
  const double horizon = static_cast<double>(chain.steps) / static_cast<double>(chain.n);
  std::vector<double> times;
  for (int i = 0; i < 6; ++i) times.push_back(horizon * i / 5.0);
  const auto runs = run_replicas(chain, p, times, cfg.stationary_replicas, 1, cfg.threads);
  const double elapsed = seconds_since(start);

  double acc = 0;
  for (const auto& r : runs) acc += r.mean_acceptance();
  acc /= static_cast<double>(runs.size());

  const auto slices = slice_replicas(runs, acceptance_window(chain.n));
  auto out = ctx.open("stationary_chain.csv");
  RunManifest m = ctx.manifest("stationary_chain");
  m.set("n", chain.n).set("steps", chain.steps).set("replicas", cfg.stationary_replicas);
  m.set("mean_acceptance", acc);
  CsvWriter csv(out, m, {"t", "ks_statistic", "ks_p_value"});
  const double level = 0.01 / static_cast<double>(times.size());
  double min_p = 1;
  for (const auto& slice : slices) {
    const KsResult ks = ks_test_normal(slice.component1);
    min_p = std::min(min_p, ks.p_value);
    csv << slice.t << ks.statistic << ks.p_value;
    csv.end_row();
  }
  const bool pass = std::abs(acc - 0.234) <= 0.02 && min_p >= level && elapsed <= 300;
  return {4, "stationary chain n=100: acceptance 0.234 +- 0.02, KS vs N(0,1) at 0.01 (Bonferroni)",
          pass, "mean acceptance " + fmt(acc) + ", min KS p-value " + fmt(min_p) + " (level " + fmt(level) + ")"};
}

// ---------------------------------------------------------------------------
// 5-8. Gaussian transient regime

struct Ladder {
  std::size_t n = 0;
  std::vector<TrajectoryTable> runs;
  ComparisonReport report;
  std::vector<ChaosRow> chaos;
  // sup_t |replica mean of (1/n) sum x^2 - m(t)| and its SE at the argmax
  double moment_error = 0;
  double moment_error_se = 0;
  double acc_error = 0;
  double acc_error_se = 0;
};

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

struct Transient {
  MomentCurve<double> ode;
  EnsembleRun limit;
  std::vector<Ladder> ladder;
  double seconds = 0;
};

Transient run_transient(const Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto start = Clock::now();
  const Potential p = builtin_potential("gaussian", std::vector<double>{1.0});
  Transient tr;
  tr.ode = integrate_moment_ode(cfg.init_sd * cfg.init_sd, cfg.l, cfg.horizon, cfg.dt);
  ctx.log("moment ODE done");

  EnsembleConfig ens;
  ens.n_particles = cfg.particles;
  ens.dt = cfg.dt;
  ens.horizon = cfg.horizon;
  ens.l = cfg.l;
  ens.seed = mix64(cfg.seed ^ 0x4c494d4954ULL);
  ens.init = InitialDistribution::normal(0, cfg.init_sd);
  ens.threads = cfg.threads;
  std::vector<double> marginal_times{0.0, 0.5, 1.0, 2.0, cfg.horizon};
  tr.limit = run_ensemble(ens, p, marginal_times);
  ctx.log("limit ensemble done");

  std::vector<double> record;
  const auto count = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.record_spacing));
  for (std::size_t i = 0; i <= count; ++i) record.push_back(cfg.record_spacing * static_cast<double>(i));
  const LimitView view = LimitView::from_run(tr.limit);

  for (std::size_t n : cfg.dimensions) {
    Ladder rung;
    rung.n = n;
    ChainConfig chain;
    chain.n = n;
    chain.l = cfg.l;
    chain.steps = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * cfg.horizon - 1e-9));
    chain.seed = mix64(cfg.seed ^ mix64(0x4348414953ULL + n));
    chain.init = InitialDistribution::normal(0, cfg.init_sd);
    rung.runs = run_replicas(chain, p, record, cfg.replicas, cfg.stored_components, cfg.threads);
    const auto slices = slice_replicas(rung.runs, acceptance_window(n));
    rung.report = compare_chain_to_limit(slices, view, n, cfg.bootstrap_resamples,
                                         mix64(cfg.seed ^ 0x57310000ULL ^ n));
    rung.chaos = chaos_diagnostic(rung.runs, std::min<std::size_t>(cfg.stored_components, n),
                                  cfg.bootstrap_resamples, mix64(cfg.seed ^ 0xC4A05ULL ^ n));
    for (std::size_t s = 0; s < slices.size(); ++s) {
      const auto& m2 = slices[s].second_moment;
      double mean = 0;
      for (double x : m2) mean += x;
      mean /= static_cast<double>(m2.size());
      double ss = 0;
      for (double x : m2) ss += (x - mean) * (x - mean);
      const double se = std::sqrt(ss / static_cast<double>(m2.size() - 1) / static_cast<double>(m2.size()));
      const double err = std::abs(mean - evaluate(tr.ode, slices[s].t));
      if (err > rung.moment_error) {
        rung.moment_error = err;
        rung.moment_error_se = se;
      }
      const ComparisonRow& row = rung.report.rows[s];
      const double acc_err = std::abs(row.acc_emp - row.acc_pred);
      if (acc_err > rung.acc_error) {
        rung.acc_error = acc_err;
        rung.acc_error_se = row.acc_emp_se;
      }
    }
    ctx.log("chain ladder n = " + std::to_string(n) + " done");
    tr.ladder.push_back(std::move(rung));
  }
  tr.seconds = seconds_since(start);

  {
    auto out = ctx.open("transient_ode.csv");
    RunManifest m = ctx.manifest("transient_ode");
    m.set("m0", cfg.init_sd * cfg.init_sd).set("l", cfg.l).set("dt", cfg.dt);
    m.set("error_estimate", tr.ode.error_estimate);
    CsvWriter csv(out, m, {"t", "m"});
    for (std::size_t k = 0; k < tr.ode.t.size(); k += 10) {
      csv << tr.ode.t[k] << tr.ode.m[k];
      csv.end_row();
    }
  }
  {
    auto out = ctx.open("transient_limit.csv");
    RunManifest m = ctx.manifest("transient_limit");
    m.set("particles", cfg.particles).set("dt", cfg.dt).set("l", cfg.l);
    CsvWriter csv(out, m, {"t", "a", "b", "m_ode"});
    for (std::size_t k = 0; k < tr.limit.curve.size(); k += 10) {
      const auto& c = tr.limit.curve[k];
      csv << c.t << c.a << c.b << tr.ode.m.at(k);
      csv.end_row();
    }
  }
  for (const Ladder& rung : tr.ladder) {
    auto out = ctx.open("transient_report_n" + std::to_string(rung.n) + ".csv");
    RunManifest m = ctx.manifest("transient_report");
    m.set("n", rung.n).set("replicas", cfg.replicas).set("n_particles", cfg.particles);
    CsvWriter csv(out, m,
                  {"t", "w1_chain_vs_limit", "w1_se", "acc_emp", "acc_emp_se", "acc_pred",
                   "a_chain", "a_limit", "b_chain", "b_limit", "m_ode", "corr_12",
                   "mean_square_corr", "mean_square_corr_se", "copula_deviation"});
    for (std::size_t s = 0; s < rung.report.rows.size(); ++s) {
      const ComparisonRow& r = rung.report.rows[s];
      const ChaosRow& c = rung.chaos[s];
      csv << r.t << r.w1_chain_vs_limit << r.w1_se << r.acc_emp << r.acc_emp_se << r.acc_pred
          << r.a_chain << r.a_limit << r.b_chain << r.b_limit << evaluate(tr.ode, r.t)
          << (c.correlation.rows() > 1 ? c.correlation(0, 1) : 0.0) << c.mean_square_correlation
          << c.mean_square_correlation_se << c.copula_deviation;
      csv.end_row();
    }
  }
  return tr;
}

const ComparisonRow* row_at(const Ladder& rung, double t) {
  for (const auto& r : rung.report.rows) {
    if (std::abs(r.t - t) < 1e-9) return &r;
  }
  return nullptr;
}

const ChaosRow* chaos_at(const Ladder& rung, double t) {
  for (const auto& r : rung.chaos) {
    if (std::abs(r.t - t) < 1e-9) return &r;
  }
  return nullptr;
}

CriterionResult transient_moments(const Context& ctx, const Transient& tr) {
  const auto& cfg = ctx.cfg();
  std::string detail;
  // (a) ODE shape
  bool monotone = true, above = true;
  for (std::size_t k = 1; k < tr.ode.m.size(); ++k) {
    monotone = monotone && tr.ode.m[k] <= tr.ode.m[k - 1];
    above = above && tr.ode.m[k] > 1;
  }
  const double rhs_at_one = gaussian_rhs(1.0, cfg.l);
  const bool ode_ok = tr.ode.m.front() == cfg.init_sd * cfg.init_sd && std::abs(rhs_at_one) <= 1e-12 &&
                      monotone && above && tr.ode.error_estimate <= 1e-8;
  detail += "(a) m(0)=" + fmt(tr.ode.m.front()) + " m(T)=" + fmt(tr.ode.m.back(), 6) +
            (monotone ? " monotone" : " NOT monotone") + " rk4 err " + fmt(tr.ode.error_estimate, 2);

  // (b) limit ensemble vs ODE on every step
  double limit_err = 0;
  for (std::size_t k = 0; k < tr.limit.curve.size() && k < tr.ode.m.size(); ++k) {
    limit_err = std::max(limit_err, std::abs(tr.limit.curve[k].a - tr.ode.m[k]));
  }
  const bool limit_ok = limit_err <= 0.03 && tr.limit.curve.size() == tr.ode.m.size();
  detail += "; (b) sup|a-m| = " + fmt(limit_err);

  // (c) chain ladder
  bool chain_ok = !tr.ladder.empty() && tr.ladder.back().moment_error <= 0.05;
  detail += "; (c) sup|chain-m| =";
  for (std::size_t i = 0; i < tr.ladder.size(); ++i) {
    const Ladder& r = tr.ladder[i];
    detail += " n" + std::to_string(r.n) + ":" + fmt(r.moment_error) + "(se " + fmt(r.moment_error_se, 2) + ")";
    if (i > 0) {
      const Ladder& q = tr.ladder[i - 1];
      chain_ok = chain_ok && r.moment_error <= q.moment_error + 2 * combined(r.moment_error_se, q.moment_error_se);
    }
  }
  const bool in_time = tr.seconds <= 1200;
  return {5, "Gaussian transient: ODE shape, ensemble vs ODE <= 0.03, chain n=200 vs ODE <= 0.05 and non-increasing in n",
          ode_ok && limit_ok && chain_ok && in_time, detail + (in_time ? "" : "; over time budget")};
}

CriterionResult propagation_of_chaos(const Context& ctx, const Transient& tr) {
  (void)ctx;
  bool ok = tr.ladder.size() >= 2;
  std::string detail = "W1:";
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    detail += " t=" + fmt(t) + "[";
    for (std::size_t i = 0; i < tr.ladder.size(); ++i) {
      const ComparisonRow* r = row_at(tr.ladder[i], t);
      if (r == nullptr || std::isnan(r->w1_chain_vs_limit)) {
        ok = false;
        continue;
      }
      detail += (i ? " " : "") + fmt(r->w1_chain_vs_limit, 3);
      if (i > 0) {
        const ComparisonRow* q = row_at(tr.ladder[i - 1], t);
        ok = ok && q != nullptr &&
             r->w1_chain_vs_limit <= q->w1_chain_vs_limit + 2 * combined(r->w1_se, q->w1_se);
      }
    }
    detail += "]";
  }
  // dependence between coordinates through the shared accept/reject, seen in
  // the correlation of squared coordinates at t = 1
  detail += "; corr of squares at t=1:";
  for (std::size_t i = 0; i < tr.ladder.size(); ++i) {
    const ChaosRow* c = chaos_at(tr.ladder[i], 1.0);
    if (c == nullptr) {
      ok = false;
      continue;
    }
    detail += " " + fmt(c->mean_square_correlation, 3) + "(se " + fmt(c->mean_square_correlation_se, 2) + ")";
    if (i > 0) {
      const ChaosRow* q = chaos_at(tr.ladder[i - 1], 1.0);
      ok = ok && c->mean_square_correlation <=
                     q->mean_square_correlation +
                         2 * combined(c->mean_square_correlation_se, q->mean_square_correlation_se);
    }
  }
  const ChaosRow* first = chaos_at(tr.ladder.front(), 1.0);
  const ChaosRow* last = chaos_at(tr.ladder.back(), 1.0);
  ok = ok && first && last && last->mean_square_correlation < first->mean_square_correlation;
  return {6, "propagation of chaos: W1 to the limit marginal and cross-component correlation shrink with n",
          ok, detail};
}

CriterionResult acceptance_curve_check(const Context& ctx, const Transient& tr) {
  (void)ctx;
  bool ok = !tr.ladder.empty() && tr.ladder.back().acc_error <= 0.03;
  std::string detail = "sup|acc_emp - acc_pred|:";
  for (std::size_t i = 0; i < tr.ladder.size(); ++i) {
    detail += " n" + std::to_string(tr.ladder[i].n) + ":" + fmt(tr.ladder[i].acc_error) + "(se " +
              fmt(tr.ladder[i].acc_error_se, 2) + ")";
    if (i > 0) ok = ok && tr.ladder[i].acc_error < tr.ladder[i - 1].acc_error;
  }
  return {7, "acceptance curve: sup_t |acc_emp(n=200) - acc(a(t),b(t))| <= 0.03, decreasing in n", ok,
          detail};
}

// ---------------------------------------------------------------------------
// 9. martingale defects (stationary Gaussian ensemble); its run also feeds 8

struct MartingaleOutcome {
  CriterionResult result;
  EnsembleRun run;
};

MartingaleOutcome martingale_suite(const Context& ctx) {
  const auto& cfg = ctx.cfg();
  const Potential p = builtin_potential("gaussian", std::vector<double>{1.0});
  EnsembleConfig ens;
  ens.n_particles = cfg.martingale_particles;
  ens.dt = cfg.dt;
  ens.horizon = cfg.martingale_horizon;
  ens.l = cfg.l;
  ens.seed = mix64(cfg.seed ^ 0x4d415254ULL);
  ens.init = InitialDistribution::stationary();
  ens.threads = cfg.threads;
  std::vector<double> times;
  const auto count = static_cast<std::size_t>(std::llround(cfg.martingale_horizon / cfg.martingale_spacing));
  for (std::size_t i = 0; i <= count; ++i) times.push_back(cfg.martingale_spacing * static_cast<double>(i));
  MartingaleOutcome outcome;
  outcome.run = run_ensemble(ens, p, times);

  const double radius = covering_radius(outcome.run.snapshots.front().particles, 0.999);
  const std::pair<const char*, TaperBase> bases[] = {
      {"taper_x", TaperBase::kIdentity}, {"taper_x2", TaperBase::kSquare}, {"taper_sin", TaperBase::kSine}};
  const double h = cfg.martingale_horizon;
  const std::pair<double, double> windows[] = {{0, h / 4}, {0, h / 2}, {0, h}, {h / 2, h}, {h / 4, 3 * h / 4}};

  auto out = ctx.open("martingale_defects.csv");
  RunManifest m = ctx.manifest("martingale_defects");
  m.set("particles", cfg.martingale_particles).set("dt", cfg.dt).set("taper_radius", radius);
  CsvWriter csv(out, m, {"test_function", "s", "t", "defect", "se", "tolerance"});
  bool ok = true;
  double worst_ratio = 0;
  for (const auto& [name, base] : bases) {
    const TestFunction phi = tapered_test_function(base, radius);
    for (const auto& [s, t] : windows) {
      const DefectEstimate d = martingale_defect(outcome.run, p, phi, s, t);
      const double tol = 3 * (d.standard_error + 5 * cfg.dt);
      ok = ok && std::abs(d.defect) <= tol;
      worst_ratio = std::max(worst_ratio, std::abs(d.defect) / tol);
      csv << std::string_view(name) << s << t << d.defect << d.standard_error << tol;
      csv.end_row();
    }
  }
  outcome.result = {9, "martingale defect of 3 taper test functions within 3 (SE + 5 dt) over [0, 2]", ok,
                    "max |defect| / tolerance = " + fmt(worst_ratio)};
  return outcome;
}

CriterionResult moment_bounds(const Context& ctx, const std::vector<std::pair<std::string, const EnsembleRun*>>& runs) {
  const Potential p = builtin_potential("gaussian", std::vector<double>{1.0});
  auto out = ctx.open("moment_bounds.csv");
  CsvWriter csv(out, ctx.manifest("moment_bounds"), {"run", "s", "t", "lhs", "lhs_se", "rhs", "pass"});
  std::size_t rows = 0, failures = 0;
  double worst = 0;
  for (const auto& [name, run] : runs) {
    // the dense martingale grid is thinned to every 10th snapshot
    EnsembleRun thinned;
    thinned.l = run->l;
    thinned.dt = run->dt;
    const std::size_t stride = run->snapshots.size() > 20 ? 10 : 1;
    for (std::size_t i = 0; i < run->snapshots.size(); i += stride) thinned.snapshots.push_back(run->snapshots[i]);
    for (const MomentBoundRow& r : moment_bound_check(thinned, p)) {
      ++rows;
      failures += r.pass ? 0 : 1;
      if (r.rhs > 0) worst = std::max(worst, r.lhs / r.rhs);
      csv << name << r.s << r.t << r.lhs << r.lhs_se << r.rhs << std::string_view(r.pass ? "1" : "0");
      csv.end_row();
    }
  }
  return {8, "increment moment bound E(X_t - X_s)^2 <= 2l^2[(t-s) + (l^2 sup V''+ v 2/pi)(t-s)^2] with 3-SE slack",
          failures == 0 && rows > 0,
          std::to_string(rows) + " (s,t) pairs, " + std::to_string(failures) + " failures, max lhs/rhs = " + fmt(worst)};
}

void write_summary(const Context& ctx, const std::vector<CriterionResult>& results) {
  auto out = ctx.open("summary.csv");
  CsvWriter csv(out, ctx.manifest("summary"), {"criterion", "passed", "detail"});
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    csv << static_cast<std::size_t>(r.id) << std::string_view(r.passed ? "1" : "0") << detail;
    csv.end_row();
  }
}

template <typename Fn>
auto timed(Fn&& fn) {
  const auto start = Clock::now();
  auto result = fn();
  result.seconds = seconds_since(start);
  return result;
}

}  // namespace

std::vector<CriterionResult> run_full_benchmark(const BenchmarkConfig& cfg, std::ostream* progress) {
  Context ctx(cfg, progress);
  std::vector<CriterionResult> results;
  auto record = [&](CriterionResult r) {
    if (progress != nullptr) *progress << format_result(r) << std::endl;
    results.push_back(std::move(r));
  };

  record(timed([&] { return closed_form_suite(ctx); }));
  record(timed([&] { return coefficient_identities(ctx); }));
  record(timed([&] { return optimal_scaling(ctx); }));
  record(timed([&] { return stationary_chain(ctx); }));

  const Transient tr = run_transient(ctx);
  CriterionResult c5 = transient_moments(ctx, tr);
  c5.seconds = tr.seconds;
  record(c5);
  record(timed([&] { return propagation_of_chaos(ctx, tr); }));
  record(timed([&] { return acceptance_curve_check(ctx, tr); }));

  const auto start9 = Clock::now();
  MartingaleOutcome mart = martingale_suite(ctx);
  mart.result.seconds = seconds_since(start9);
  record(timed([&] {
    return moment_bounds(ctx, {{"transient_limit", &tr.limit}, {"stationary_limit", &mart.run}});
  }));
  record(mart.result);

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  write_summary(ctx, results);
  return results;
}

std::vector<std::string> diff_output_dirs(const std::string& a, const std::string& b) {
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  auto names = [](const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) out.push_back(entry.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto na = names(a), nb = names(b);
  std::vector<std::string> all;
  std::set_union(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(all));
  std::vector<std::string> differing;
  for (const auto& name : all) {
    const fs::path pa = fs::path(a) / name, pb = fs::path(b) / name;
    if (!fs::exists(pa) || !fs::exists(pb) || slurp(pa) != slurp(pb)) differing.push_back(name);
  }
  return differing;
}

CriterionResult check_determinism(const BenchmarkConfig& cfg, unsigned rerun_threads, std::ostream* progress) {
  const auto start = Clock::now();
  BenchmarkConfig rerun = cfg;
  rerun.threads = rerun_threads;
  rerun.out_dir = cfg.out_dir + "_rerun";
  if (progress != nullptr) *progress << "  rerunning with " << rerun_threads << " thread(s)" << std::endl;
  run_full_benchmark(rerun, nullptr);
  const auto differing = diff_output_dirs(cfg.out_dir, rerun.out_dir);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(cfg.out_dir)) ++files;
  std::string detail = std::to_string(files) + " CSVs compared (threads " + std::to_string(resolve_threads(cfg.threads)) +
                       " vs " + std::to_string(rerun_threads) + ")";
  if (!differing.empty()) {
    detail += "; differing:";
    for (const auto& d : differing) detail += " " + d;
  }
  CriterionResult r{10, "full benchmark CSVs byte-identical across runs and thread counts",
                    differing.empty() && files > 0, detail, seconds_since(start)};
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS]" : "[FAIL]") << " criterion " << r.id << ": " << r.name << " | " << r.detail;
  os.precision(3);
  os << " (" << r.seconds << " s)";
  return os.str();
}

}  // namespace rwm
