#include "styler/schedule.hpp"

#include <string>

namespace styler {

NoiseSchedule make_schedule(int t_train, double beta_start, double beta_end) {
  require(t_train >= 2, ErrorKind::kConfig, "make_schedule: t_train must be >= 2");
  require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0, ErrorKind::kConfig,
          "make_schedule: need 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.t_train = t_train;
  s.betas.resize(size_t(t_train));
  s.alphas.resize(size_t(t_train));
  s.alpha_bars.resize(size_t(t_train));
  for (int i = 0; i < t_train; ++i) {
    double b = beta_start + (beta_end - beta_start) * double(i) / double(t_train - 1);
    s.betas[size_t(i)] = float(b);
    s.alphas[size_t(i)] = 1.0f - s.betas[size_t(i)];
  }
  float prod = 1.0f;
  for (int i = 0; i < t_train; ++i) {
    prod *= s.alphas[size_t(i)];
    s.alpha_bars[size_t(i)] = prod;
    require(prod > 0.0f, ErrorKind::kNumeric, "make_schedule: alpha_bar underflowed to zero");
  }
  return s;
}

std::vector<int> subsample_timesteps(int t_train, int num_steps) {
  require(num_steps >= 2 && num_steps <= t_train, ErrorKind::kConfig,
          "subsample_timesteps: need 2 <= S <= t_train");
  std::vector<int> ts(size_t(num_steps));
  for (int u = 0; u < num_steps; ++u) {
    ts[size_t(u)] = int((int64_t(num_steps) - 1 - u) * int64_t(t_train) / num_steps);
  }
  return ts;
}

SamplingPlan SamplingPlan::make(const NoiseSchedule& s, int num_steps, uint64_t seed) {
  SamplingPlan plan;
  plan.num_steps = num_steps;
  plan.timesteps = subsample_timesteps(s.t_train, num_steps);
  plan.seed = seed;
  plan.validate(s);
  return plan;
}

void SamplingPlan::validate(const NoiseSchedule& s) const {
  require(num_steps >= 2, ErrorKind::kConfig, "sampling plan: need S >= 2");
  require(int(timesteps.size()) == num_steps, ErrorKind::kConfig,
          "sampling plan: timesteps length != num_steps");
  for (int u = 0; u < num_steps; ++u) {
    int t = timesteps[size_t(u)];
    require(t >= 0 && t < s.t_train, ErrorKind::kConfig,
            "sampling plan: timestep " + std::to_string(t) + " out of range");
    if (u > 0) {
      require(timesteps[size_t(u) - 1] > t, ErrorKind::kConfig,
              "sampling plan: timesteps must be strictly decreasing");
    }
  }
}

Tensor add_noise(const Tensor& z0, int t, const Tensor& eps, const NoiseSchedule& s) {
  require(t >= 0 && t < s.t_train, ErrorKind::kConfig, "add_noise: timestep out of range");
  return detail::add_noise_with(z0, eps, s.alpha_bars[size_t(t)]);
}

Tensor ddim_denoise_step(const Tensor& z_t, const Tensor& eps_hat, int t, int t_prev,
                         const NoiseSchedule& s) {
  require(t >= 0 && t < s.t_train, ErrorKind::kConfig, "ddim_denoise_step: t out of range");
  if (t == t_prev) return z_t;
  require(t_prev == -1 || t > t_prev, ErrorKind::kConfig,
          "ddim_denoise_step: need t > t_prev (or sentinel -1)");
  return detail::ddim_step_with(z_t, eps_hat, s.alpha_bar_at(t), s.alpha_bar_at(t_prev));
}

Tensor ddim_invert_step(const Tensor& z_prev, const Tensor& eps_hat, int t_prev, int t,
                        const NoiseSchedule& s) {
  require(t >= 0 && t < s.t_train, ErrorKind::kConfig, "ddim_invert_step: t out of range");
  require(t > t_prev, ErrorKind::kConfig, "ddim_invert_step: need t > t_prev");
  return detail::ddim_step_with(z_prev, eps_hat, s.alpha_bar_at(t_prev), s.alpha_bar_at(t));
}

}  // namespace styler
