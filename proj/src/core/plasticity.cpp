#include "core/plasticity.hpp"

#include <string>

#include "core/common.hpp"

namespace pacnav {

std::string_view td_scheme_name(TdScheme scheme) {
  return scheme == TdScheme::Forward ? "forward" : "backward";
}

TdScheme parse_td_scheme(std::string_view name) {
  if (name == "forward") return TdScheme::Forward;
  if (name == "backward") return TdScheme::Backward;
  throw ConfigError("unknown TD scheme '" + std::string(name) + "' (forward|backward)");
}

double td_error(const TdConfig& cfg, double r_prev, double r_now, double v_prev, double v_now) {
  const double a = cfg.alpha();
  if (cfg.scheme == TdScheme::Forward) {
    return r_prev + (v_now - (1.0 + a) * v_prev) / cfg.dt;
  }
  return r_now + ((1.0 - a) * v_now - v_prev) / cfg.dt;
}

void update_critic(Eigen::Ref<Eigen::VectorXd> w, const Eigen::VectorXd& r_pre, double delta,
                   const LearningRates& rates, double dt) {
  if (!rates.plasticity_enabled || delta == 0.0) return;
  w.noalias() += (dt * rates.eta_critic * delta) * r_pre;
}

void update_actor(Eigen::Ref<Eigen::MatrixXd> w, const Eigen::VectorXd& r_pre,
                  const Eigen::VectorXd& rho_post, double delta, const LearningRates& rates,
                  double dt) {
  if (!rates.plasticity_enabled || delta == 0.0) return;
  const Eigen::VectorXd post = (dt * rates.eta_actor * delta) * rho_post;
  if (post.isZero(0.0)) return;
  for (Eigen::Index j = 0; j < r_pre.size(); ++j) {
    const double pre = r_pre[j];
    if (pre != 0.0) w.col(j).noalias() += pre * post;
  }
}

}  // namespace pacnav
