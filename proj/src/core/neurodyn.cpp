#include "core/neurodyn.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace pacnav {

double omega(double x) {
  if (x <= 0.0) return 0.0;
  if (x <= 0.5) return x * x;
  return std::sqrt(2.0 * x - 0.5);
}

double activate(const Activation& act, double x) {
  switch (act.kind) {
    case ActivationKind::Relu:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::LeakyRelu:
      return x > 0.0 ? x : kLeakySlope * x;
    case ActivationKind::Elu:
      return x > 0.0 ? x : std::expm1(x);
    case ActivationKind::Softplus:
      return x > 30.0 ? x : std::log1p(std::exp(x));
    case ActivationKind::Tanh:
      return std::tanh(x);
    case ActivationKind::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::Linear:
      return act.gain * x;
    case ActivationKind::PhiA:
      return x > act.theta ? x : 0.0;
    case ActivationKind::PhiB:
      return x > act.theta ? x : act.theta;
    case ActivationKind::Omega:
      return omega(x);
  }
  return x;
}

void activate_inplace(const Activation& act, Eigen::Ref<Eigen::VectorXd> x) {
  switch (act.kind) {
    case ActivationKind::Relu:
      x = x.cwiseMax(0.0);
      return;
    case ActivationKind::Linear:
      x *= act.gain;
      return;
    case ActivationKind::PhiA:
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = x[i] > act.theta ? x[i] : 0.0;
      return;
    default:
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = activate(act, x[i]);
  }
}

namespace {
struct NamedKind {
  std::string_view name;
  ActivationKind kind;
};
constexpr NamedKind kKinds[] = {
    {"relu", ActivationKind::Relu},       {"lrelu", ActivationKind::LeakyRelu},
    {"elu", ActivationKind::Elu},         {"softplus", ActivationKind::Softplus},
    {"tanh", ActivationKind::Tanh},       {"sigmoid", ActivationKind::Sigmoid},
    {"linear", ActivationKind::Linear},   {"phiA", ActivationKind::PhiA},
    {"phiB", ActivationKind::PhiB},       {"omega", ActivationKind::Omega},
};
}  // namespace

std::string_view activation_name(ActivationKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ActivationKind parse_activation_kind(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Eigen::MatrixXd ring_weights(int m, double w_minus, double w_plus, double phi, bool exclude_self) {
  if (m < 2) throw ConfigError("ring needs at least 2 units");
  if (phi < 0.0) throw ConfigError("ring concentration phi must be >= 0");

  // kernel as a function of ring distance d = (h - k) mod m
  std::vector<double> exponent(static_cast<std::size_t>(m));
  for (int d = 0; d < m; ++d) {
    const int dd = std::min(d, m - d);
    exponent[static_cast<std::size_t>(d)] = phi * std::cos(2.0 * std::numbers::pi * dd / m);
  }
  const int first = exclude_self ? 1 : 0;
  const double shift = *std::max_element(exponent.begin() + first, exponent.end());
  std::vector<double> kernel(static_cast<std::size_t>(m), 0.0);
  for (int d = first; d < m; ++d) {
    kernel[static_cast<std::size_t>(d)] = std::exp(exponent[static_cast<std::size_t>(d)] - shift);
  }
  const double total = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (auto& k : kernel) k /= total;

  Eigen::MatrixXd w(m, m);
  for (int k = 0; k < m; ++k) {
    for (int h = 0; h < m; ++h) {
      const int d = ((h - k) % m + m) % m;
      w(k, h) = w_minus / m + w_plus * kernel[static_cast<std::size_t>(d)];
    }
  }
  return w;
}

Eigen::MatrixXd bump_ring_weights(int n, double w_minus, double phi) {
  return ring_weights(n, w_minus, 1.0, phi, /*exclude_self=*/false);
}

void check_time_step(double dt, double tau, std::string_view population) {
  if (!(dt > 0.0) || dt > tau / 1.5 + 1e-12) {
    throw ConfigError("time step " + std::to_string(dt) + " s is unstable for " +
                      std::string(population) + " (tau " + std::to_string(tau) +
                      " s); need 0 < dt <= tau / 1.5");
  }
}

namespace {
void require_finite(const Eigen::VectorXd& v, std::string_view population) {
  if (!v.allFinite()) {
    throw NumericalError("non-finite state in " + std::string(population));
  }
}
}  // namespace

// ---------------------------------------------------------------------------

ActorRing::ActorRing(ActorParams params)
    : params_(params),
      lateral_(ring_weights(params.m, params.w_minus, params.w_plus, params.phi)),
      sin_(params.m),
      cos_(params.m) {
  for (int k = 0; k < params_.m; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / params_.m;
    sin_[k] = std::sin(theta);
    cos_[k] = std::cos(theta);
  }
}

ActorState ActorRing::initial_state(Noise& noise) const {
  ActorState s;
  s.q.resize(params_.m);
  for (int k = 0; k < params_.m; ++k) s.q[k] = params_.sigma * noise.draw();
  s.rho = s.q.cwiseMax(0.0);
  return s;
}

Vec2 ActorRing::step(ActorState& state, const Eigen::VectorXd& drive, double dt, Noise& noise) const {
  const double alpha = dt / params_.tau;
  const Eigen::VectorXd lateral_in = lateral_ * state.rho;
  for (int k = 0; k < params_.m; ++k) {
    state.q[k] = em_update(state.q[k], drive[k] + lateral_in[k], alpha, params_.sigma, noise);
  }
  require_finite(state.q, "actor");
  state.rho = state.q.cwiseMax(0.0);
  return output(state.rho);
}

Vec2 ActorRing::output(const Eigen::VectorXd& rho) const {
  const double scale = params_.a0 / params_.m;
  return {scale * rho.dot(sin_), scale * rho.dot(cos_)};
}

// ---------------------------------------------------------------------------

CriticState CriticUnit::initial_state(Noise& noise) const {
  CriticState s;
  s.zeta = params_.sigma * noise.draw();
  s.v = std::max(s.zeta, 0.0);
  return s;
}

double CriticUnit::step(CriticState& state, double drive, double dt, Noise& noise) const {
  state.zeta = em_update(state.zeta, drive, dt / params_.tau, params_.sigma, noise);
  if (!std::isfinite(state.zeta)) throw NumericalError("non-finite state in critic");
  state.v = std::max(state.zeta, 0.0);
  return state.v;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd sample_input_weights(int n_out, int n_in, HiddenInit init, int k, Rng& rng) {
  if (n_out < 1 || n_in < 1) throw ConfigError("input weights need positive dimensions");
  Eigen::MatrixXd w(n_out, n_in);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (init == HiddenInit::Uniform) {
    for (int i = 0; i < n_out; ++i) {
      for (int j = 0; j < n_in; ++j) w(i, j) = 2.0 * unit(rng) - 1.0;
    }
    return w;
  }
  if (k < 0 || k > n_in) {
    throw ConfigError("K = " + std::to_string(k) + " outside [0, " + std::to_string(n_in) + "]");
  }
  std::vector<int> order(static_cast<std::size_t>(n_in));
  for (int i = 0; i < n_out; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int j = 0; j < n_in; ++j) {
      const double mag = unit(rng);
      w(i, order[static_cast<std::size_t>(j)]) = j < k ? mag : -mag;
    }
  }
  return w;
}

HiddenLayer::HiddenLayer(Eigen::MatrixXd w_in, Activation activation)
    : w_in_(std::move(w_in)), activation_(activation) {}

HiddenLayer HiddenLayer::sample(const HiddenInitSpec& spec, int n_in, Rng& rng) {
  return HiddenLayer(sample_input_weights(spec.n_hidden, n_in, spec.init, spec.k, rng),
                     spec.activation);
}

Eigen::VectorXd HiddenLayer::forward(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out;
  forward_into(u, out);
  return out;
}

void HiddenLayer::forward_into(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
  if (u.size() != w_in_.cols()) {
    throw ConfigError("hidden layer expects " + std::to_string(w_in_.cols()) + " inputs, got " +
                      std::to_string(u.size()));
  }
  out.noalias() = w_in_ * u;
  activate_inplace(activation_, out);
}

// ---------------------------------------------------------------------------

Reservoir::Reservoir(ReservoirParams params, Eigen::MatrixXd w_in, Eigen::MatrixXd w_rec)
    : params_(params), w_in_(std::move(w_in)), w_rec_(std::move(w_rec)) {
  if (w_in_.rows() != params_.n || w_rec_.rows() != params_.n || w_rec_.cols() != params_.n) {
    throw ConfigError("reservoir weight shapes do not match n = " + std::to_string(params_.n));
  }
}

Reservoir Reservoir::sample(const ReservoirParams& params, int n_in, Rng& rng) {
  if (params.n < 1) throw ConfigError("reservoir needs at least one unit");
  if (!(params.p > 0.0 && params.p <= 1.0)) throw ConfigError("reservoir p must be in (0, 1]");
  Eigen::MatrixXd w_in = sample_input_weights(params.n, n_in, HiddenInit::Uniform, 0, rng);
  std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / (params.p * params.n)));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Eigen::MatrixXd w_rec(params.n, params.n);
  for (int i = 0; i < params.n; ++i) {
    for (int j = 0; j < params.n; ++j) {
      const bool connected = params.p >= 1.0 || coin(rng) < params.p;
      w_rec(i, j) = connected ? normal(rng) : 0.0;
    }
  }
  return Reservoir(params, std::move(w_in), std::move(w_rec));
}

ReservoirState Reservoir::initial_state(Noise& noise) const {
  ReservoirState s;
  s.x.resize(params_.n);
  for (int i = 0; i < params_.n; ++i) s.x[i] = params_.sigma * noise.draw();
  s.rates = s.x;
  activate_inplace(params_.readout, s.rates);
  return s;
}

void Reservoir::step(ReservoirState& state, const Eigen::VectorXd& u, double dt, Noise& noise) const {
  const double alpha = dt / params_.tau;
  Eigen::VectorXd drive = w_in_ * u;
  drive.noalias() += params_.lambda * (w_rec_ * state.x.array().tanh().matrix());
  for (int i = 0; i < params_.n; ++i) {
    state.x[i] = em_update(state.x[i], drive[i], alpha, params_.sigma, noise);
  }
  require_finite(state.x, "reservoir");
  state.rates = state.x;
  activate_inplace(params_.readout, state.rates);
}

// ---------------------------------------------------------------------------

BumpAttractor::BumpAttractor(BumpParams params)
    : params_(params), ring_(bump_ring_weights(params.n, params.w_minus, params.phi)) {
  const int cues = params_.n / params_.units_per_cue;
  cue_in_ = Eigen::MatrixXd::Zero(params_.n, cues);
  for (int c = 0; c < cues; ++c) {
    for (int j = 0; j < params_.units_per_cue; ++j) {
      cue_in_(c * params_.units_per_cue + j, c) = 1.0 / params_.units_per_cue;
    }
  }
}

BumpState BumpAttractor::zero_state() const {
  return {Eigen::VectorXd::Zero(params_.n), Eigen::VectorXd::Zero(params_.n)};
}

void BumpAttractor::step(BumpState& state, const Eigen::VectorXd& cue, double dt, Noise& noise) const {
  const double alpha = dt / params_.tau;
  Eigen::VectorXd w = state.x.unaryExpr([](double v) { return omega(v); });
  Eigen::VectorXd drive = cue_in_ * cue;
  drive.noalias() += ring_ * w;
  for (int i = 0; i < params_.n; ++i) {
    state.x[i] = em_update(state.x[i], drive[i], alpha, params_.sigma, noise);
  }
  require_finite(state.x, "bump attractor");
  state.rates = state.x.cwiseMax(0.0);
}

}  // namespace pacnav
