#pragma once

#include "holotomo/processing.hpp"
#include "holotomo/propagation.hpp"
#include "holotomo/tv.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace holotomo {

namespace detail {

// Deterministic complex Gaussian source (Box-Muller over mt19937_64);
// E|z|^2 = 1 for complex_normal().
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }

  std::complex<double> complex_normal() {
    const double r = std::sqrt(-std::log(uniform()));
    const double a = 2.0 * kPi * uniform();
    return {r * std::cos(a), r * std::sin(a)};
  }

  double normal() { return std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * kPi * uniform()); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace detail

// Squared Frobenius mismatch between the detector data and the forward
// projection of the guess volume.
template <class Scalar>
Scalar c1_value(const FieldVolume<Scalar>& guess, const Field2D<Scalar>& v,
                const BoxKernels<Scalar>& kernels) {
  if (guess.grid != v.grid) throw DataError("c1: guess and data grids differ");
  const Field2D<Scalar> est = forward_A(guess, kernels);
  return squared_norm(ComplexArray<Scalar>(v.values - est.values));
}

template <class Scalar>
Scalar c1_value(const FieldVolume<Scalar>& guess, const Field2D<Scalar>& v) {
  return c1_value(guess, v, make_box_kernels<Scalar>(guess.grid, guess.box));
}

// Gradient of the data mismatch with respect to the conjugate field:
// minus the back-propagated residual.
template <class Scalar>
FieldVolume<Scalar> c1_gradient(const FieldVolume<Scalar>& guess, const Field2D<Scalar>& v,
                                const BoxKernels<Scalar>& kernels) {
  if (guess.grid != v.grid) throw DataError("c1 gradient: guess and data grids differ");
  const Field2D<Scalar> est = forward_A(guess, kernels);
  const Field2D<Scalar> residual{v.grid, v.values - est.values};
  FieldVolume<Scalar> g = adjoint_A(residual, kernels);
  for (auto& s : g.slices) s = -s;
  return g;
}

template <class Scalar>
FieldVolume<Scalar> c1_gradient(const FieldVolume<Scalar>& guess, const Field2D<Scalar>& v) {
  return c1_gradient(guess, v, make_box_kernels<Scalar>(guess.grid, guess.box));
}

// Frobenius-normalized copy of a gradient volume.
template <class Scalar>
FieldVolume<Scalar> unit_direction(const FieldVolume<Scalar>& g) {
  const Scalar n = norm(g);
  if (!(n > Scalar(0))) throw NumericalError("stationary objective");
  FieldVolume<Scalar> d = g;
  const Scalar inv = Scalar(1) / n;
  for (auto& s : d.slices) s *= inv;
  return d;
}

// Angle between the steepest-descent directions -d1 and -d2, using the
// real part of the complex inner product.
template <class Scalar>
Scalar angle_theta(const FieldVolume<Scalar>& d1_hat, const FieldVolume<Scalar>& d2_hat) {
  const Scalar tol = Scalar(1e-6);
  if (std::abs(norm(d1_hat) - Scalar(1)) > tol || std::abs(norm(d2_hat) - Scalar(1)) > tol)
    throw ConfigError("angle: directions must be unit norm");
  Scalar c = dot(d1_hat, d2_hat).real();
  c = std::clamp(c, Scalar(-1), Scalar(1));
  return std::acos(c);
}

// Back-propagated field divided by the slice count, plus seeded complex
// Gaussian noise scaled relative to the RMS voxel magnitude. With a zero
// noise amplitude this initial guess reproduces band-limited data under
// the forward operator exactly.
template <class Scalar>
FieldVolume<Scalar> make_initial_guess(const Field2D<Scalar>& v, const AxialBox& box,
                                       Scalar noise_amplitude, std::uint64_t seed) {
  FieldVolume<Scalar> u = adjoint_A(v, box);
  const Scalar inv_nz = Scalar(1) / Scalar(box.nz);
  for (auto& s : u.slices) s *= inv_nz;
  if (noise_amplitude > Scalar(0)) {
    const Scalar rms =
        std::sqrt(squared_norm(u) / Scalar(static_cast<double>(u.grid.nx) * u.grid.ny * box.nz));
    const Scalar sigma = noise_amplitude * rms;
    detail::GaussianRng rng(seed);
    for (auto& s : u.slices) {
      auto* p = s.data();
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        const std::complex<double> z = rng.complex_normal();
        p[k] += std::complex<Scalar>(Scalar(z.real()), Scalar(z.imag())) * sigma;
      }
    }
  }
  return u;
}

// Data mismatch normalized by the data energy.
template <class Scalar>
Scalar relative_data_error(const FieldVolume<Scalar>& guess, const Field2D<Scalar>& v,
                           const BoxKernels<Scalar>& kernels) {
  const Scalar denom = squared_norm(v.values);
  if (!(denom > Scalar(0))) throw DataError("relative data error: zero detector field");
  return c1_value(guess, v, kernels) / denom;
}

template <class Scalar>
Scalar relative_data_error(const FieldVolume<Scalar>& guess, const Field2D<Scalar>& v) {
  return relative_data_error(guess, v, make_box_kernels<Scalar>(guess.grid, guess.box));
}

// guess -= t * (d1 + d2) / 2. Opposed unit directions cancel exactly.
template <class Scalar>
void apply_mgd_update(FieldVolume<Scalar>& guess, const FieldVolume<Scalar>& d1,
                      const FieldVolume<Scalar>& d2, Scalar t) {
  const Scalar half_t = t / Scalar(2);
  for (int j = 0; j < guess.nz(); ++j)
    guess.slices[j] -= half_t * (d1.slices[j] + d2.slices[j]);
}

template <class Scalar>
void apply_slice_weights(FieldVolume<Scalar>& u, const WeightVector<Scalar>& w) {
  if (w.weights.size() != u.nz()) throw ConfigError("weights: length does not match the box");
  for (int j = 0; j < u.nz(); ++j) u.slices[j] *= w.weights[j];
}

enum class StepSchedule {
  kStallWindow,          // halve t when c1 sets no new best for stall_window iterations
  kConsecutiveIncrease,  // halve t after stall_window consecutive c1 increases
};

// With per-slice weights the data mismatch rises while energy transfers
// between slices, so any stall trigger would collapse the step size and
// freeze the run; weighted runs default to a fixed step (stall_window 0).

template <class Scalar>
struct MgdConfig {
  int max_iters = 500;
  Scalar theta_stop = Scalar(2.8);
  int theta_patience = 20;
  Scalar t_init = Scalar(0);  // <= 0: use t_init_rel * norm of the initial guess
  Scalar t_init_rel = Scalar(0.01);
  Scalar t_decay = Scalar(0.5);
  int stall_window = 10;  // 0 disables step decay
  StepSchedule schedule = StepSchedule::kStallWindow;
  Scalar t_floor_rel = Scalar(1e-6);
  Scalar noise_amplitude = Scalar(1e-2);
  std::optional<WeightVector<Scalar>> weights;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (max_iters < 1) throw ConfigError("mgd: max_iters must be >= 1");
    if (!(theta_stop > Scalar(0.5 * kPi)) || !(theta_stop < Scalar(kPi)))
      throw ConfigError("mgd: theta_stop must lie in (pi/2, pi)");
    if (theta_patience < 1) throw ConfigError("mgd: theta_patience must be >= 1");
    if (!(t_init > Scalar(0)) && !(t_init_rel > Scalar(0)))
      throw ConfigError("mgd: step size must be positive");
    if (!(t_decay > Scalar(0)) || !(t_decay < Scalar(1)))
      throw ConfigError("mgd: t_decay must lie in (0, 1)");
    if (stall_window < 0) throw ConfigError("mgd: stall_window must be >= 0");
    if (!(noise_amplitude >= Scalar(0))) throw ConfigError("mgd: noise amplitude must be >= 0");
    if (weights) weights->validate();
  }
};

template <class Scalar>
struct MgdHistoryRow {
  int iter = 0;
  Scalar c1 = 0, c2 = 0, theta = 0, e_d = 0, t = 0;
};

// Optimizer iterate. The stored directions, objective values and angle
// always correspond to the stored guess.
template <class Scalar>
struct MgdState {
  FieldVolume<Scalar> guess;
  int iter = 0;
  Scalar c1 = 0;
  Scalar c2 = 0;
  FieldVolume<Scalar> d1_hat;
  FieldVolume<Scalar> d2_hat;
  Scalar t = 0;
  Scalar theta = 0;
  Scalar e_d = 0;
  bool d1_zero = false;
  bool d2_zero = false;
  // step-size schedule bookkeeping
  Scalar t_floor = 0;
  Scalar best_c1 = 0;
  int since_best = 0;
  int increase_streak = 0;
  std::vector<MgdHistoryRow<Scalar>> history;

  bool stationary() const { return d1_zero && d2_zero; }
};

namespace detail {

template <class Scalar>
void evaluate_state(MgdState<Scalar>& st, const Field2D<Scalar>& v, const TvConfig<Scalar>& tv,
                    const BoxKernels<Scalar>& kernels, Scalar v_energy) {
  const Field2D<Scalar> est = forward_A(st.guess, kernels);
  const Field2D<Scalar> residual{v.grid, v.values - est.values};
  st.c1 = squared_norm(residual.values);
  st.e_d = st.c1 / v_energy;
  st.c2 = tv_value(st.guess, tv);

  FieldVolume<Scalar> g1 = adjoint_A(residual, kernels);
  for (auto& s : g1.slices) s = -s;
  FieldVolume<Scalar> g2 = tv_gradient(st.guess, tv);

  const Scalar n1 = norm(g1);
  const Scalar n2 = norm(g2);
  st.d1_zero = !(n1 > Scalar(0));
  st.d2_zero = !(n2 > Scalar(0));
  if (!st.d1_zero) {
    const Scalar inv = Scalar(1) / n1;
    for (auto& s : g1.slices) s *= inv;
  } else {
    for (auto& s : g1.slices) s.setZero();
  }
  if (!st.d2_zero) {
    const Scalar inv = Scalar(1) / n2;
    for (auto& s : g2.slices) s *= inv;
  } else {
    for (auto& s : g2.slices) s.setZero();
  }
  st.d1_hat = std::move(g1);
  st.d2_hat = std::move(g2);
  st.theta = (st.d1_zero || st.d2_zero)
                 ? Scalar(0)
                 : std::acos(std::clamp(dot(st.d1_hat, st.d2_hat).real(), Scalar(-1), Scalar(1)));
}

template <class Scalar>
void record_history(MgdState<Scalar>& st) {
  st.history.push_back({st.iter, st.c1, st.c2, st.theta, st.e_d, st.t});
}

template <class Scalar>
void update_schedule(MgdState<Scalar>& st, const MgdConfig<Scalar>& cfg, Scalar prev_c1) {
  if (st.c1 > prev_c1)
    ++st.increase_streak;
  else
    st.increase_streak = 0;
  if (st.c1 < st.best_c1) {
    st.best_c1 = st.c1;
    st.since_best = 0;
  } else {
    ++st.since_best;
  }
  if (cfg.stall_window == 0) return;
  const bool stalled = cfg.schedule == StepSchedule::kStallWindow
                           ? st.since_best >= cfg.stall_window
                           : st.increase_streak >= cfg.stall_window;
  if (stalled) {
    st.t = std::max(st.t * cfg.t_decay, st.t_floor);
    st.since_best = 0;
    st.increase_streak = 0;
  }
}

template <class Scalar>
void mgd_step_impl(MgdState<Scalar>& st, const Field2D<Scalar>& v, const TvConfig<Scalar>& tv,
                   const MgdConfig<Scalar>& cfg, const BoxKernels<Scalar>& kernels,
                   Scalar v_energy) {
  const Scalar prev_c1 = st.c1;
  apply_mgd_update(st.guess, st.d1_hat, st.d2_hat, st.t);
  if (cfg.weights) apply_slice_weights(st.guess, *cfg.weights);
  ++st.iter;
  evaluate_state(st, v, tv, kernels, v_energy);
  update_schedule(st, cfg, prev_c1);
  record_history(st);
}

}  // namespace detail

// Initial optimizer state: seeded initial guess, objective values,
// unit directions and angle, with history row 0 recorded.
template <class Scalar>
MgdState<Scalar> mgd_init(const Field2D<Scalar>& v, const AxialBox& box, const TvConfig<Scalar>& tv,
                          const MgdConfig<Scalar>& cfg, const BoxKernels<Scalar>& kernels) {
  v.validate();
  tv.validate();
  cfg.validate();
  const Scalar v_energy = squared_norm(v.values);
  if (!(v_energy > Scalar(0))) throw DataError("mgd: zero detector field");
  MgdState<Scalar> st;
  st.guess = make_initial_guess(v, box, cfg.noise_amplitude, cfg.rng_seed);
  st.t = cfg.t_init > Scalar(0) ? cfg.t_init : cfg.t_init_rel * norm(st.guess);
  if (!(st.t > Scalar(0))) throw NumericalError("mgd: zero initial step size");
  st.t_floor = cfg.t_floor_rel * st.t;
  detail::evaluate_state(st, v, tv, kernels, v_energy);
  st.best_c1 = st.c1;
  detail::record_history(st);
  return st;
}

// One update: move along the bisector of the unit descent directions,
// apply the per-slice weights if configured, then re-evaluate.
template <class Scalar>
MgdState<Scalar> mgd_step(const MgdState<Scalar>& state, const Field2D<Scalar>& v,
                          const TvConfig<Scalar>& tv, const MgdConfig<Scalar>& cfg) {
  const auto kernels = make_box_kernels<Scalar>(state.guess.grid, state.guess.box);
  const Scalar v_energy = squared_norm(v.values);
  if (!(v_energy > Scalar(0))) throw DataError("mgd: zero detector field");
  MgdState<Scalar> next = state;
  detail::mgd_step_impl(next, v, tv, cfg, kernels, v_energy);
  return next;
}

// Full run: iterates until max_iters, until the angle stays above
// theta_stop for theta_patience consecutive iterations, or until both
// gradients vanish.
template <class Scalar>
MgdState<Scalar> run_mgd(const Field2D<Scalar>& v, const AxialBox& box, const TvConfig<Scalar>& tv,
                         const MgdConfig<Scalar>& cfg) {
  const auto kernels = make_box_kernels<Scalar>(v.grid, box);
  const Scalar v_energy = squared_norm(v.values);
  if (!(v_energy > Scalar(0))) throw DataError("mgd: zero detector field");
  MgdState<Scalar> st = mgd_init(v, box, tv, cfg, kernels);
  int obtuse_streak = 0;
  while (st.iter < cfg.max_iters && !st.stationary()) {
    detail::mgd_step_impl(st, v, tv, cfg, kernels, v_energy);
    if (st.theta >= cfg.theta_stop) {
      if (++obtuse_streak >= cfg.theta_patience) break;
    } else {
      obtuse_streak = 0;
    }
  }
  return st;
}

}  // namespace holotomo
