#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "core/common.hpp"

namespace pacnav {

// ---------------------------------------------------------------------------
// Activation functions
// ---------------------------------------------------------------------------

enum class ActivationKind {
  Relu,
  LeakyRelu,
  Elu,
  Softplus,
  Tanh,
  Sigmoid,
  Linear,  // gain * x
  PhiA,    // 0 below theta, identity above
  PhiB,    // theta below theta, identity above
  Omega,   // bump-attractor transfer function
};

struct Activation {
  ActivationKind kind = ActivationKind::Relu;
  double theta = 0.0;  // PhiA / PhiB threshold
  double gain = 1.0;   // Linear gain

  friend bool operator==(const Activation&, const Activation&) = default;
};

inline constexpr double kLeakySlope = 0.01;

double omega(double x);
double activate(const Activation& act, double x);
void activate_inplace(const Activation& act, Eigen::Ref<Eigen::VectorXd> x);

std::string_view activation_name(ActivationKind kind);
ActivationKind parse_activation_kind(std::string_view name);

// ---------------------------------------------------------------------------
// Fixed ring connectivity
// ---------------------------------------------------------------------------

/// W_kh = w_minus / M + w_plus * f(k,h) / sum_h f(k,h), f = exp(phi cos(theta_k - theta_h)).
/// With exclude_self the kernel has a zero diagonal. The exponent is shifted by
/// its row maximum before exponentiation, which the normalization cancels, so
/// large phi does not overflow. Rows are exact rotations of one kernel, giving
/// bit-exact symmetry and identical row sums.
Eigen::MatrixXd ring_weights(int m, double w_minus, double w_plus, double phi,
                             bool exclude_self = true);

/// Bump-attractor ring: unit excitation gain and no self-exclusion.
Eigen::MatrixXd bump_ring_weights(int n, double w_minus, double phi);

/// Explicit-Euler stability guard: dt must not exceed tau / 1.5.
void check_time_step(double dt, double tau, std::string_view population);

/// One Euler-Maruyama step of tau dx = (-x + drive) dt + sqrt(tau sigma^2) dW:
/// x <- (1 - a) x + a (drive + sqrt(sigma^2 / a) N(0,1)), a = dt / tau.
inline double em_update(double x, double drive, double alpha, double sigma, Noise& noise) {
  const double kick = noise.enabled() ? std::sqrt(sigma * sigma / alpha) * noise.draw() : 0.0;
  return (1.0 - alpha) * x + alpha * (drive + kick);
}

// ---------------------------------------------------------------------------
// Actor ring
// ---------------------------------------------------------------------------

struct ActorParams {
  int m = 40;
  double tau = 0.150;
  double sigma = 0.25;
  double a0 = 0.03;
  double w_minus = -1.0;
  double w_plus = 1.0;
  double phi = 20.0;

  friend bool operator==(const ActorParams&, const ActorParams&) = default;
};

struct ActorState {
  Eigen::VectorXd q;    // membrane potentials
  Eigen::VectorXd rho;  // rates, relu(q)
};

class ActorRing {
 public:
  explicit ActorRing(ActorParams params = {});

  const ActorParams& params() const { return params_; }
  const Eigen::MatrixXd& lateral() const { return lateral_; }

  /// Membranes drawn from Normal(0, sigma^2).
  ActorState initial_state(Noise& noise) const;

  /// Advances membranes with the external drive (W_actor r, computed by the
  /// caller) and the lateral input from the previous rates. Returns the ring
  /// output (a0 / M) sum_k rho_k [sin theta_k, cos theta_k].
  Vec2 step(ActorState& state, const Eigen::VectorXd& drive, double dt, Noise& noise) const;

  Vec2 output(const Eigen::VectorXd& rho) const;

 private:
  ActorParams params_;
  Eigen::MatrixXd lateral_;
  Eigen::VectorXd sin_;
  Eigen::VectorXd cos_;
};

// ---------------------------------------------------------------------------
// Critic
// ---------------------------------------------------------------------------

struct CriticParams {
  double tau = 0.150;
  double sigma = 0.0005;

  friend bool operator==(const CriticParams&, const CriticParams&) = default;
};

struct CriticState {
  double zeta = 0.0;
  double v = 0.0;
};

class CriticUnit {
 public:
  explicit CriticUnit(CriticParams params = {}) : params_(params) {}

  const CriticParams& params() const { return params_; }
  CriticState initial_state(Noise& noise) const;
  double step(CriticState& state, double drive, double dt, Noise& noise) const;

 private:
  CriticParams params_;
};

// ---------------------------------------------------------------------------
// Feedforward hidden layer
// ---------------------------------------------------------------------------

enum class HiddenInit { Uniform, KSplit };

struct HiddenInitSpec {
  int n_hidden = 1024;
  Activation activation{};
  HiddenInit init = HiddenInit::Uniform;
  int k = 0;  // excitatory inputs per unit under KSplit

  friend bool operator==(const HiddenInitSpec&, const HiddenInitSpec&) = default;
};

/// Uniform: every weight ~ U[-1, 1]. KSplit: per row, k randomly chosen
/// weights ~ U[0, 1] and the rest ~ U[-1, 0].
Eigen::MatrixXd sample_input_weights(int n_out, int n_in, HiddenInit init, int k, Rng& rng);

class HiddenLayer {
 public:
  HiddenLayer(Eigen::MatrixXd w_in, Activation activation);
  static HiddenLayer sample(const HiddenInitSpec& spec, int n_in, Rng& rng);

  int width() const { return static_cast<int>(w_in_.rows()); }
  int inputs() const { return static_cast<int>(w_in_.cols()); }
  const Eigen::MatrixXd& input_weights() const { return w_in_; }
  const Activation& activation() const { return activation_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& u) const;
  void forward_into(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;

 private:
  Eigen::MatrixXd w_in_;
  Activation activation_;
};

// ---------------------------------------------------------------------------
// Recurrent reservoir
// ---------------------------------------------------------------------------

struct ReservoirParams {
  int n = 1024;
  double lambda = 1.5;
  double tau = 0.150;
  double sigma = 0.025;
  double p = 1.0;
  Activation readout{ActivationKind::PhiA, 3.0, 1.0};

  friend bool operator==(const ReservoirParams&, const ReservoirParams&) = default;
};

struct ReservoirState {
  Eigen::VectorXd x;
  Eigen::VectorXd rates;
};

class Reservoir {
 public:
  Reservoir(ReservoirParams params, Eigen::MatrixXd w_in, Eigen::MatrixXd w_rec);

  /// W_in ~ U[-1, 1]; W_rec entries present with probability p, ~ Normal(0, 1 / (p n)).
  static Reservoir sample(const ReservoirParams& params, int n_in, Rng& rng);

  const ReservoirParams& params() const { return params_; }
  const Eigen::MatrixXd& input_weights() const { return w_in_; }
  const Eigen::MatrixXd& recurrent_weights() const { return w_rec_; }

  ReservoirState initial_state(Noise& noise) const;

  /// x <- (1 - a) x + a (W_in u + lambda W_rec tanh(x) + sqrt(sigma^2 / a) N);
  /// rates = readout(x).
  void step(ReservoirState& state, const Eigen::VectorXd& u, double dt, Noise& noise) const;

 private:
  ReservoirParams params_;
  Eigen::MatrixXd w_in_;
  Eigen::MatrixXd w_rec_;
};

// ---------------------------------------------------------------------------
// Working-memory bump attractor
// ---------------------------------------------------------------------------

struct BumpParams {
  int n = 54;
  double tau = 0.150;
  double sigma = 0.1;
  double w_minus = -0.75;
  double phi = 300.0;
  int units_per_cue = 3;

  friend bool operator==(const BumpParams&, const BumpParams&) = default;
};

struct BumpState {
  Eigen::VectorXd x;
  Eigen::VectorXd rates;
};

class BumpAttractor {
 public:
  explicit BumpAttractor(BumpParams params = {});

  const BumpParams& params() const { return params_; }
  const Eigen::MatrixXd& ring() const { return ring_; }
  /// n x 18; cue c drives units [3(c-1), 3(c-1)+2] with weight 1/3 each.
  const Eigen::MatrixXd& cue_weights() const { return cue_in_; }

  BumpState zero_state() const;

  /// x <- (1 - a) x + a (W_inwm cue + W_bump omega(x) + sqrt(sigma^2 / a) N); rates = relu(x).
  void step(BumpState& state, const Eigen::VectorXd& cue, double dt, Noise& noise) const;

 private:
  BumpParams params_;
  Eigen::MatrixXd ring_;
  Eigen::MatrixXd cue_in_;
};

}  // namespace pacnav
