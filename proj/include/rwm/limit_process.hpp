#pragma once

// Interacting-particle Euler-Maruyama scheme for the McKean nonlinear SDE
//   dX = Gamma^{1/2}(E V'(X)^2, E V''(X)) dB - G(E V'(X)^2, E V''(X)) V'(X) dt,
// with the law replaced by the empirical measure of the ensemble.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rwm/coefficients.hpp"
#include "rwm/initial.hpp"
#include "rwm/potential.hpp"
#include "rwm/random.hpp"

namespace rwm {

struct EnsembleConfig {
  std::size_t n_particles = 100000;
  double dt = 1e-3;
  double horizon = 1;
  double l = 2.38;
  std::uint64_t seed = 0;
  InitialDistribution init;
  unsigned threads = 0;  // execution detail only, never changes results

  void validate() const;
  std::size_t total_steps() const;
};

struct MomentSample {
  double t = 0;
  double a = 0;
  double b = 0;
};

/// Diffusion and drift coefficients frozen over one step.
struct StepCoefficients {
  double gamma = 0;
  double gee = 0;
};

/// Particles are split into fixed blocks of kBlockSize, each with its own
/// stream, so parallel stepping reproduces the serial draws bit for bit.
struct ParticleEnsemble {
  static constexpr std::size_t kBlockSize = 4096;

  Eigen::ArrayXd particles;
  double t = 0;
  std::size_t step = 0;
  std::vector<MomentSample> moment_history;
  std::vector<Stream> streams;
};

/// Initial ensemble: block b draws its particles from stream (seed, {block, b}).
ParticleEnsemble make_ensemble(const EnsembleConfig& cfg, const Potential& p);

/// Block-ordered empirical moments, identical for every thread count.
MomentPair<double> ensemble_moments(const Eigen::ArrayXd& particles, const Potential& p,
                                    unsigned threads = 1);

/// Coefficients (Gamma, G) at the ensemble's current empirical moments.
StepCoefficients mean_field_coefficients(const MomentPair<double>& m, double l);

/// One Euler step with the coefficients frozen from the pre-step ensemble:
/// x <- x + sqrt(Gamma dt) xi - G V'(x) dt.
void ensemble_step(ParticleEnsemble& e, const Potential& p, const EnsembleConfig& cfg);

/// Same step with externally imposed coefficients.
void ensemble_step_with(ParticleEnsemble& e, const Potential& p, const EnsembleConfig& cfg,
                        const StepCoefficients& coef);

struct EnsembleSnapshot {
  double t = 0;
  std::size_t step = 0;
  Eigen::ArrayXd particles;
};

struct EnsembleRun {
  double l = 0;
  double dt = 0;
  std::vector<EnsembleSnapshot> snapshots;
  std::vector<MomentSample> curve;  // every step, starting at t = 0

  const EnsembleSnapshot& snapshot_at(double t) const;
  const MomentSample& curve_at(double t) const;
};

/// Steps to cfg.horizon, snapshotting at the record times (each rounded to the
/// step grid, within [0, horizon]).
EnsembleRun run_ensemble(const EnsembleConfig& cfg, const Potential& p,
                         std::span<const double> record_times);

/// C^2 test function with derivatives.
struct TestFunction {
  std::function<double(double)> f, d1, d2;
};

TestFunction constant_test_function(double c);

enum class TaperBase { kIdentity, kSquare, kSine };

/// psi_R(x) q(x): q in {x, x^2, sin x} times a C^2 taper equal to 1 on
/// [-R, R], vanishing outside [-2R, 2R] (quintic smoothstep in between).
TestFunction tapered_test_function(TaperBase base, double radius);

/// Radius covering `mass` of the particles in |x|.
double covering_radius(const Eigen::ArrayXd& particles, double mass = 0.999);

struct DefectEstimate {
  double defect = 0;
  double standard_error = 0;
};

/// Ensemble estimate of E[phi(X_t) - phi(X_s) - int_s^t L_{P_r} phi(X_r) dr],
/// with the integral done by the trapezoid rule over the snapshots in [s, t]
/// and L_mu phi = Gamma/2 phi'' - G V' phi'. s and t must be snapshot times.
DefectEstimate martingale_defect(const EnsembleRun& run, const Potential& p,
                                 const TestFunction& phi, double s, double t);

}  // namespace rwm
