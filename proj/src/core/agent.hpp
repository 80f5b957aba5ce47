#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "core/common.hpp"
#include "core/encoding.hpp"
#include "core/neurodyn.hpp"
#include "core/plasticity.hpp"

namespace pacnav {

enum class Architecture { Classic, ExpandedClassic, LinearHidden, NonlinearHidden, Reservoir };

std::string_view architecture_name(Architecture a);
Architecture parse_architecture(std::string_view name);

struct AgentConfig {
  Architecture architecture = Architecture::Classic;
  int n_hidden = 1024;        // hidden or reservoir width
  int expanded_copies = 16;   // ExpandedClassic only
  Activation activation{};    // NonlinearHidden transfer function
  double linear_gain = 0.2;   // LinearHidden gain A
  HiddenInit hidden_init = HiddenInit::Uniform;
  int k_excitatory = 0;       // HiddenInit::KSplit only
  bool working_memory = false;
  double dt = 0.1;
  double tau_g = 2.0;
  TdScheme td_scheme = TdScheme::Forward;
  LearningRates rates{0.015, 0.015, true};
  std::uint64_t seed = 0;
  bool noise = true;
  /// The ring output (a0/M) sum rho dir is a displacement per millisecond;
  /// multiplying by 1000 gives m/s (a0 = 0.03 -> roughly 0.7 m/s).
  double velocity_scale = 1000.0;
  ActorParams actor{};
  CriticParams critic{};
  ReservoirParams reservoir{};  // reservoir.n is taken from n_hidden
  BumpParams bump{};

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;

  TdConfig td() const { return {tau_g, dt, td_scheme}; }
  HiddenInitSpec hidden_spec() const;
  int input_width() const { return working_memory ? kInputWidthWm : kInputWidth; }
  /// Length of the vector that feeds the actor and critic.
  int agent_width() const;
  /// (actor units + critic) * agent width.
  std::int64_t trainable_parameters() const;
  /// Throws ConfigError when counts are non-positive or dt is unstable.
  void validate() const;
};

/// Presets matching the published agent sizes and learning rates.
/// task is "single" (single reward location) or "multi" (paired associations).
AgentConfig preset_agent(Architecture a, std::string_view task);

/// Plastic weights. actor is stored actor-major, M x n, so drive = actor * r.
struct WeightStore {
  Eigen::MatrixXd actor;
  Eigen::VectorXd critic;

  friend bool operator==(const WeightStore& a, const WeightStore& b) {
    return a.actor.rows() == b.actor.rows() && a.actor.cols() == b.actor.cols() &&
           a.critic.size() == b.critic.size() && a.actor == b.actor && a.critic == b.critic;
  }
};

struct NetworkState {
  ActorState actor;
  CriticState critic;
  std::optional<ReservoirState> reservoir;
  std::optional<BumpState> bump;
  double v_prev = 0.0;
  double r_prev = 0.0;
  bool first_step = true;
};

struct Observation {
  Vec2 position;
  int cue_id = 1;
  bool cue_active = true;
  bool place_silenced = false;
};

struct StepTelemetry {
  double value = 0.0;
  double td_error = 0.0;
  Vec2 action;  // m/s
};

class Agent {
 public:
  /// Samples frozen weights from the seed; trainable weights start at zero.
  explicit Agent(AgentConfig config);

  const AgentConfig& config() const { return config_; }
  std::int64_t trainable_parameters() const { return config_.trainable_parameters(); }

  const WeightStore& weights() const { return weights_; }
  WeightStore& mutable_weights() { return weights_; }
  const NetworkState& state() const { return state_; }

  const ActorRing& actor() const { return actor_; }
  const std::optional<HiddenLayer>& hidden() const { return hidden_; }
  const std::optional<Reservoir>& reservoir() const { return reservoir_; }
  const std::optional<BumpAttractor>& bump() const { return bump_; }

  /// Redraws membranes from the agent's own dynamics stream and clears bump,
  /// TD memory and reward bookkeeping.
  void reset_trial();
  void reset_trial(Noise& noise);

  /// One time step: encode, bump, architecture forward, critic and actor
  /// dynamics, TD error and (when learn is true and plasticity is enabled)
  /// weight updates. reward_rate is r(t) delivered over the current step.
  StepTelemetry step(const Observation& obs, double reward_rate, bool learn = true);

  /// Input vector and actor/critic presynaptic rates from the last step.
  const Eigen::VectorXd& last_input() const { return input_; }
  const Eigen::VectorXd& last_agent_rates() const { return rates_; }

  /// Presynaptic rates for a feedforward architecture, without touching state.
  /// Throws for the reservoir architecture.
  Eigen::VectorXd feedforward_rates(const Eigen::VectorXd& input) const;

 private:
  void encode(const Observation& obs);

  AgentConfig config_;
  ActorRing actor_;
  CriticUnit critic_;
  std::optional<HiddenLayer> hidden_;
  std::optional<Reservoir> reservoir_;
  std::optional<BumpAttractor> bump_;
  WeightStore weights_;
  NetworkState state_;
  Noise noise_;
  Eigen::VectorXd input_;
  Eigen::VectorXd rates_;
  Eigen::VectorXd drive_;
};

}  // namespace pacnav
