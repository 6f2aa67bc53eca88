#include "rwm/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwm/parallel.hpp"

namespace rwm {

void EnsembleConfig::validate() const {
  if (n_particles < 1) throw std::invalid_argument("ensemble needs at least one particle");
  if (!(dt > 0) || !(dt <= 0.01)) throw std::invalid_argument("dt must lie in (0, 0.01]");
  if (!(horizon >= 0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be finite and >= 0");
  }
  ScalingParams<double> check(l);
  (void)check;
}

std::size_t EnsembleConfig::total_steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

namespace {

std::size_t block_count(std::size_t n) {
  return (n + ParticleEnsemble::kBlockSize - 1) / ParticleEnsemble::kBlockSize;
}

Eigen::Index block_begin(std::size_t b) {
  return static_cast<Eigen::Index>(b * ParticleEnsemble::kBlockSize);
}

Eigen::Index block_length(std::size_t b, Eigen::Index total) {
  return std::min<Eigen::Index>(ParticleEnsemble::kBlockSize, total - block_begin(b));
}

}  // namespace

ParticleEnsemble make_ensemble(const EnsembleConfig& cfg, const Potential& p) {
  cfg.validate();
  ParticleEnsemble e;
  const auto total = static_cast<Eigen::Index>(cfg.n_particles);
  e.particles.resize(total);
  const std::size_t blocks = block_count(cfg.n_particles);
  e.streams.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    e.streams.emplace_back(cfg.seed, std::initializer_list<std::uint64_t>{
                                         tag(StreamTag::kEnsembleBlock), b});
  }
  parallel_for(blocks, cfg.threads, [&](std::size_t b) {
    const Eigen::Index begin = block_begin(b), len = block_length(b, total);
    for (Eigen::Index i = begin; i < begin + len; ++i) e.particles(i) = cfg.init.draw(p, e.streams[b]);
  });
  const MomentPair<double> m = ensemble_moments(e.particles, p, cfg.threads);
  e.moment_history.push_back({0.0, m.a, m.b});
  return e;
}

MomentPair<double> ensemble_moments(const Eigen::ArrayXd& particles, const Potential& p,
                                    unsigned threads) {
  if (particles.size() == 0) throw std::invalid_argument("empty ensemble");
  const std::size_t blocks = block_count(static_cast<std::size_t>(particles.size()));
  std::vector<double> sum_a(blocks), sum_b(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const Eigen::Index begin = block_begin(b), len = block_length(b, particles.size());
    double a = 0, v = 0;
    for (Eigen::Index i = begin; i < begin + len; ++i) {
      const double d = p.v1(particles(i));
      a += d * d;
      v += p.v2(particles(i));
    }
    sum_a[b] = a;
    sum_b[b] = v;
  });
  double a = 0, b = 0;
  for (std::size_t k = 0; k < blocks; ++k) {
    a += sum_a[k];
    b += sum_b[k];
  }
  const double n = static_cast<double>(particles.size());
  return {a / n, b / n};
}

StepCoefficients mean_field_coefficients(const MomentPair<double>& m, double l) {
  const ScalingParams<double> s(l);
  return {gamma_coef(m, s), gee_coef(m, s)};
}

void ensemble_step_with(ParticleEnsemble& e, const Potential& p, const EnsembleConfig& cfg,
                        const StepCoefficients& coef) {
  const double noise_scale = std::sqrt(coef.gamma * cfg.dt);
  const double drift_scale = coef.gee * cfg.dt;
  const Eigen::Index total = e.particles.size();
  parallel_for(e.streams.size(), cfg.threads, [&](std::size_t b) {
    Stream& rng = e.streams[b];
    const Eigen::Index begin = block_begin(b), len = block_length(b, total);
    for (Eigen::Index i = begin; i < begin + len; ++i) {
      const double x = e.particles(i);
      e.particles(i) = x + noise_scale * rng.gaussian() - drift_scale * p.v1(x);
    }
  });
  ++e.step;
  e.t = static_cast<double>(e.step) * cfg.dt;
  const MomentPair<double> m = ensemble_moments(e.particles, p, cfg.threads);
  e.moment_history.push_back({e.t, m.a, m.b});
}

void ensemble_step(ParticleEnsemble& e, const Potential& p, const EnsembleConfig& cfg) {
  const MomentSample& last = e.moment_history.back();
  ensemble_step_with(e, p, cfg, mean_field_coefficients({last.a, last.b}, cfg.l));
}

namespace {

std::size_t grid_step(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

}  // namespace

const EnsembleSnapshot& EnsembleRun::snapshot_at(double t) const {
  const std::size_t k = grid_step(t, dt);
  for (const auto& s : snapshots) {
    if (s.step == k) return s;
  }
  throw std::out_of_range("no snapshot recorded at t = " + std::to_string(t));
}

const MomentSample& EnsembleRun::curve_at(double t) const {
  const std::size_t k = grid_step(t, dt);
  if (!(t >= 0) || k >= curve.size()) {
    throw std::out_of_range("time outside the moment curve");
  }
  return curve[k];
}

EnsembleRun run_ensemble(const EnsembleConfig& cfg, const Potential& p,
                         std::span<const double> record_times) {
  ParticleEnsemble e = make_ensemble(cfg, p);
  const std::size_t steps = cfg.total_steps();
  std::vector<std::size_t> wanted;
  for (double t : record_times) {
    if (!(t >= 0) || t > cfg.horizon + 1e-12) {
      throw std::invalid_argument("record time outside [0, horizon]");
    }
    wanted.push_back(grid_step(t, cfg.dt));
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  EnsembleRun run;
  run.l = cfg.l;
  run.dt = cfg.dt;
  std::size_t next = 0;
  for (std::size_t k = 0;; ++k) {
    if (next < wanted.size() && wanted[next] == k) {
      run.snapshots.push_back({static_cast<double>(k) * cfg.dt, k, e.particles});
      ++next;
    }
    if (k == steps) break;
    ensemble_step(e, p, cfg);
  }
  run.curve = std::move(e.moment_history);
  return run;
}

TestFunction constant_test_function(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

namespace {

// Taper psi(x) = 1 - S((|x| - R) / R) on [R, 2R], S the quintic smoothstep;
// returns (psi, psi', psi'').
struct TaperValue {
  double v, d1, d2;
};

TaperValue taper(double x, double radius) {
  const double ax = std::abs(x);
  if (ax <= radius) return {1, 0, 0};
  if (ax >= 2 * radius) return {0, 0, 0};
  const double u = (ax - radius) / radius;
  const double s = u * u * u * (10 - 15 * u + 6 * u * u);
  const double ds = 30 * u * u * (1 - u) * (1 - u);
  const double dds = 60 * u * (1 - u) * (1 - 2 * u);
  const double sign = x < 0 ? -1.0 : 1.0;
  return {1 - s, -sign * ds / radius, -dds / (radius * radius)};
}

}  // namespace

TestFunction tapered_test_function(TaperBase base, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("taper radius must be positive");
  auto q = [base](double x) -> TaperValue {
    switch (base) {
      case TaperBase::kIdentity:
        return {x, 1, 0};
      case TaperBase::kSquare:
        return {x * x, 2 * x, 2};
      case TaperBase::kSine:
        return {std::sin(x), std::cos(x), -std::sin(x)};
    }
    return {0, 0, 0};
  };
  TestFunction phi;
  phi.f = [=](double x) { return taper(x, radius).v * q(x).v; };
  phi.d1 = [=](double x) {
    const TaperValue w = taper(x, radius), g = q(x);
    return w.d1 * g.v + w.v * g.d1;
  };
  phi.d2 = [=](double x) {
    const TaperValue w = taper(x, radius), g = q(x);
    return w.d2 * g.v + 2 * w.d1 * g.d1 + w.v * g.d2;
  };
  return phi;
}

double covering_radius(const Eigen::ArrayXd& particles, double mass) {
  if (particles.size() == 0) throw std::invalid_argument("empty ensemble");
  std::vector<double> abs(particles.size());
  for (Eigen::Index i = 0; i < particles.size(); ++i) abs[i] = std::abs(particles(i));
  const auto k = static_cast<std::size_t>(
      std::min<double>(std::ceil(mass * static_cast<double>(abs.size())), abs.size()) - 1);
  std::nth_element(abs.begin(), abs.begin() + static_cast<std::ptrdiff_t>(k), abs.end());
  return std::max(abs[k], 1e-12);
}

DefectEstimate martingale_defect(const EnsembleRun& run, const Potential& p,
                                 const TestFunction& phi, double s, double t) {
  if (!(s < t)) throw std::invalid_argument("martingale_defect needs s < t");
  const EnsembleSnapshot& start = run.snapshot_at(s);
  const EnsembleSnapshot& stop = run.snapshot_at(t);
  std::vector<const EnsembleSnapshot*> grid;
  for (const auto& snap : run.snapshots) {
    if (snap.step >= start.step && snap.step <= stop.step) grid.push_back(&snap);
  }
  const Eigen::Index n = start.particles.size();
  Eigen::ArrayXd per_particle(n);
  for (Eigen::Index i = 0; i < n; ++i) per_particle(i) = phi.f(stop.particles(i)) - phi.f(start.particles(i));

  auto generator = [&](const EnsembleSnapshot& snap) {
    const MomentSample& m = run.curve.at(snap.step);
    const StepCoefficients c = mean_field_coefficients({m.a, m.b}, run.l);
    Eigen::ArrayXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = snap.particles(i);
      out(i) = 0.5 * c.gamma * phi.d2(x) - c.gee * p.v1(x) * phi.d1(x);
    }
    return out;
  };

  Eigen::ArrayXd previous = generator(*grid.front());
  for (std::size_t j = 1; j < grid.size(); ++j) {
    Eigen::ArrayXd current = generator(*grid[j]);
    const double h = grid[j]->t - grid[j - 1]->t;
    per_particle -= 0.5 * h * (previous + current);
    previous = std::move(current);
  }

  DefectEstimate out;
  out.defect = per_particle.mean();
  if (n > 1) {
    const double var = (per_particle - out.defect).square().sum() / static_cast<double>(n - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

}  // namespace rwm
