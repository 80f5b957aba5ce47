#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace pacnav {

/// Forward: reward and value taken at the start of the interval (default).
/// Backward: taken at the end, which matches the discrete TD form.
enum class TdScheme { Forward, Backward };

std::string_view td_scheme_name(TdScheme scheme);
TdScheme parse_td_scheme(std::string_view name);

struct TdConfig {
  double tau_g = 2.0;
  double dt = 0.1;
  TdScheme scheme = TdScheme::Forward;

  double alpha() const { return dt / tau_g; }
  double gamma() const { return 1.0 - alpha(); }

  friend bool operator==(const TdConfig&, const TdConfig&) = default;
};

/// Continuous TD error discretized over one step.
/// forward:  r_prev + (v_now - (1 + a) v_prev) / dt
/// backward: r_now  + ((1 - a) v_now - v_prev) / dt
double td_error(const TdConfig& cfg, double r_prev, double r_now, double v_prev, double v_now);

struct LearningRates {
  double eta_critic = 0.0;
  double eta_actor = 0.0;
  bool plasticity_enabled = true;

  friend bool operator==(const LearningRates&, const LearningRates&) = default;
};

/// Two-factor rule: W += dt * eta_critic * r_pre * delta.
void update_critic(Eigen::Ref<Eigen::VectorXd> w, const Eigen::VectorXd& r_pre, double delta,
                   const LearningRates& rates, double dt);

/// Three-factor rule on the actor weights, stored actor-major (M x n):
/// W(k, j) += dt * eta_actor * delta * rho_k * r_j.
/// Columns with r_j == 0 are skipped, which is exact.
void update_actor(Eigen::Ref<Eigen::MatrixXd> w, const Eigen::VectorXd& r_pre,
                  const Eigen::VectorXd& rho_post, double delta, const LearningRates& rates,
                  double dt);

}  // namespace pacnav
