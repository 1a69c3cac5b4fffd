#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "styler/tensor.hpp"

namespace styler {

// Precomputed beta/alpha/alpha-bar tables for the forward diffusion process.
// alpha_bars is a float32 running product, so the cumulative-product identity
// alpha_bars[i] == alpha_bars[i-1] * alphas[i] holds bit-exactly at every
// index by construction.
struct NoiseSchedule {
  int t_train = 0;
  std::vector<float> betas;
  std::vector<float> alphas;
  std::vector<float> alpha_bars;

  // Sentinel timestep -1 denotes alpha_bar = 1 (the fully clean state).
  float alpha_bar_at(int t) const {
    if (t < 0) return 1.0f;
    require(t < t_train, ErrorKind::kConfig, "timestep out of range");
    return alpha_bars[size_t(t)];
  }
};

// Linear beta interpolation from beta_start to beta_end over t_train steps.
NoiseSchedule make_schedule(int t_train, double beta_start, double beta_end);

// Evenly spaced strictly decreasing timestep subsequence ending at 0:
// timesteps[u] = floor((S-1-u) * t_train / S).
std::vector<int> subsample_timesteps(int t_train, int num_steps);

// The deterministic sampling trajectory: which training timesteps the S
// performed denoising steps visit, plus the seed identifying the run.
struct SamplingPlan {
  int num_steps = 0;
  std::vector<int> timesteps;
  uint64_t seed = 0;

  static SamplingPlan make(const NoiseSchedule& s, int num_steps, uint64_t seed);

  // t for performed step u, and the step's target timestep (sentinel -1 on
  // the final step).
  int t_at(int u) const { return timesteps[size_t(u)]; }
  int t_prev_at(int u) const {
    return (u + 1 < num_steps) ? timesteps[size_t(u) + 1] : -1;
  }

  void validate(const NoiseSchedule& s) const;
};

namespace detail {

template <typename T>
TensorT<T> add_noise_with(const TensorT<T>& z0, const TensorT<T>& eps, T alpha_bar) {
  require(z0.shape == eps.shape, ErrorKind::kShape, "add_noise: z0/eps shape mismatch");
  T sa = std::sqrt(alpha_bar);
  T sb = std::sqrt(T(1) - alpha_bar);
  TensorT<T> out = z0;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = sa * z0.data[i] + sb * eps.data[i];
  return out;
}

template <typename T>
TensorT<T> ddim_step_with(const TensorT<T>& z, const TensorT<T>& eps_hat, T ab_from, T ab_to) {
  require(z.shape == eps_hat.shape, ErrorKind::kShape, "ddim step: shape mismatch");
  require(ab_from > T(0), ErrorKind::kNumeric, "ddim step: alpha_bar must be positive");
  T sa = std::sqrt(ab_from);
  T sb = std::sqrt(T(1) - ab_from);
  T sa_to = std::sqrt(ab_to);
  T sb_to = std::sqrt(T(1) - ab_to);
  TensorT<T> out = z;
  for (size_t i = 0; i < out.data.size(); ++i) {
    T z0_hat = (z.data[i] - sb * eps_hat.data[i]) / sa;
    out.data[i] = sa_to * z0_hat + sb_to * eps_hat.data[i];
  }
  return out;
}

}  // namespace detail

// Forward diffusion: sqrt(ab_t) z0 + sqrt(1 - ab_t) eps.
Tensor add_noise(const Tensor& z0, int t, const Tensor& eps, const NoiseSchedule& s);

// Deterministic DDIM update from timestep t to t_prev (t_prev == -1 is the
// final clean-sample step with alpha_bar 1). eta is fixed at 0.
Tensor ddim_denoise_step(const Tensor& z_t, const Tensor& eps_hat, int t, int t_prev,
                         const NoiseSchedule& s);

// Exact algebraic inverse of ddim_denoise_step under a fixed eps_hat.
Tensor ddim_invert_step(const Tensor& z_prev, const Tensor& eps_hat, int t_prev, int t,
                        const NoiseSchedule& s);

}  // namespace styler
