#include "core/agent.hpp"

#include <string>

namespace pacnav {

namespace {
struct NamedArch {
  std::string_view name;
  Architecture arch;
};
constexpr NamedArch kArchitectures[] = {
    {"classic", Architecture::Classic},
    {"expanded_classic", Architecture::ExpandedClassic},
    {"linear_hidden", Architecture::LinearHidden},
    {"nonlinear_hidden", Architecture::NonlinearHidden},
    {"reservoir", Architecture::Reservoir},
};
}  // namespace

std::string_view architecture_name(Architecture a) {
  for (const auto& n : kArchitectures) {
    if (n.arch == a) return n.name;
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  for (const auto& n : kArchitectures) {
    if (n.name == name) return n.arch;
  }
  throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

HiddenInitSpec AgentConfig::hidden_spec() const {
  HiddenInitSpec spec;
  spec.n_hidden = n_hidden;
  spec.activation = architecture == Architecture::LinearHidden
                        ? Activation{ActivationKind::Linear, 0.0, linear_gain}
                        : activation;
  spec.init = hidden_init;
  spec.k = k_excitatory;
  return spec;
}

int AgentConfig::agent_width() const {
  switch (architecture) {
    case Architecture::Classic:
      return input_width();
    case Architecture::ExpandedClassic:
      return expanded_copies * input_width();
    case Architecture::LinearHidden:
    case Architecture::NonlinearHidden:
    case Architecture::Reservoir:
      return n_hidden;
  }
  return 0;
}

std::int64_t AgentConfig::trainable_parameters() const {
  return static_cast<std::int64_t>(actor.m + 1) * agent_width();
}

void AgentConfig::validate() const {
  if (n_hidden < 1) throw ConfigError("n_hidden must be positive");
  if (expanded_copies < 1) throw ConfigError("expanded_copies must be positive");
  if (actor.m < 2) throw ConfigError("actor ring needs at least 2 units");
  if (!(tau_g > dt)) throw ConfigError("tau_g must exceed dt");
  if (rates.eta_actor < 0.0 || rates.eta_critic < 0.0) {
    throw ConfigError("learning rates must be non-negative");
  }
  if (hidden_init == HiddenInit::KSplit && (k_excitatory < 0 || k_excitatory > input_width())) {
    throw ConfigError("k_excitatory must lie in [0, input width]");
  }
  if (bump.n % bump.units_per_cue != 0 || bump.n / bump.units_per_cue != kCueLength) {
    throw ConfigError("bump attractor must dedicate units_per_cue units to each of 18 cues");
  }
  if (!(velocity_scale > 0.0)) throw ConfigError("velocity_scale must be positive");
  check_time_step(dt, actor.tau, "actor");
  check_time_step(dt, critic.tau, "critic");
  if (architecture == Architecture::Reservoir) check_time_step(dt, reservoir.tau, "reservoir");
  if (working_memory) check_time_step(dt, bump.tau, "bump attractor");
}

AgentConfig preset_agent(Architecture a, std::string_view task) {
  const bool multi = task == "multi";
  if (!multi && task != "single") {
    throw ConfigError("preset task must be 'single' or 'multi'");
  }
  AgentConfig cfg;
  cfg.architecture = a;
  double eta = 0.0;
  switch (a) {
    case Architecture::Classic:
      eta = multi ? 0.001 : 0.015;
      break;
    case Architecture::ExpandedClassic:
      cfg.expanded_copies = multi ? 123 : 16;
      eta = multi ? 1e-5 : 0.0005;
      break;
    case Architecture::LinearHidden:
      cfg.n_hidden = multi ? 8192 : 1024;
      eta = multi ? 1e-5 : 0.0005;
      break;
    case Architecture::NonlinearHidden:
      cfg.n_hidden = multi ? 8192 : 1024;
      eta = multi ? 1e-5 : 0.0001;
      break;
    case Architecture::Reservoir:
      cfg.n_hidden = 1024;
      eta = multi ? 1e-5 : 0.0001;
      break;
  }
  cfg.rates = {eta, eta, true};
  cfg.reservoir.n = cfg.n_hidden;
  return cfg;
}

// ---------------------------------------------------------------------------

Agent::Agent(AgentConfig config)
    : config_(std::move(config)),
      actor_(config_.actor),
      critic_(config_.critic),
      noise_(config_.noise ? Noise(make_stream(config_.seed, Stream::Dynamics)) : Noise::off()) {
  config_.validate();
  config_.reservoir.n = config_.n_hidden;

  Rng weight_rng = make_stream(config_.seed, Stream::Weights);
  switch (config_.architecture) {
    case Architecture::LinearHidden:
    case Architecture::NonlinearHidden:
      hidden_ = HiddenLayer::sample(config_.hidden_spec(), config_.input_width(), weight_rng);
      break;
    case Architecture::Reservoir:
      reservoir_ = Reservoir::sample(config_.reservoir, config_.input_width(), weight_rng);
      break;
    default:
      break;
  }
  if (config_.working_memory) bump_ = BumpAttractor(config_.bump);

  const int width = config_.agent_width();
  weights_.actor = Eigen::MatrixXd::Zero(config_.actor.m, width);
  weights_.critic = Eigen::VectorXd::Zero(width);
  input_ = Eigen::VectorXd::Zero(config_.input_width());
  rates_ = Eigen::VectorXd::Zero(width);
  drive_ = Eigen::VectorXd::Zero(config_.actor.m);
  reset_trial();
}

void Agent::reset_trial() { reset_trial(noise_); }

void Agent::reset_trial(Noise& noise) {
  state_.actor = actor_.initial_state(noise);
  state_.critic = critic_.initial_state(noise);
  if (reservoir_) {
    state_.reservoir = reservoir_->initial_state(noise);
  } else {
    state_.reservoir.reset();
  }
  if (bump_) {
    state_.bump = bump_->zero_state();
  } else {
    state_.bump.reset();
  }
  state_.v_prev = 0.0;
  state_.r_prev = 0.0;
  state_.first_step = true;
}

void Agent::encode(const Observation& obs) {
  if (obs.place_silenced) {
    input_.head(kPlaceCells).setZero();
  } else {
    PlaceField::standard().rates_into(obs.position, input_.head(kPlaceCells));
  }
  input_.segment(kPlaceCells, kCueLength) = cue_vector(obs.cue_id, obs.cue_active);
  if (bump_) {
    bump_->step(*state_.bump, input_.segment(kPlaceCells, kCueLength), config_.dt, noise_);
    input_.tail(kBumpUnits) = state_.bump->rates;
  }
}

Eigen::VectorXd Agent::feedforward_rates(const Eigen::VectorXd& input) const {
  switch (config_.architecture) {
    case Architecture::Classic:
      return input;
    case Architecture::ExpandedClassic:
      return input.replicate(config_.expanded_copies, 1);
    case Architecture::LinearHidden:
    case Architecture::NonlinearHidden:
      return hidden_->forward(input);
    case Architecture::Reservoir:
      break;
  }
  throw ConfigError("reservoir rates depend on the recurrent state");
}

StepTelemetry Agent::step(const Observation& obs, double reward_rate, bool learn) {
  encode(obs);

  switch (config_.architecture) {
    case Architecture::Classic:
      rates_ = input_;
      break;
    case Architecture::ExpandedClassic:
      for (int c = 0; c < config_.expanded_copies; ++c) {
        rates_.segment(static_cast<Eigen::Index>(c) * input_.size(), input_.size()) = input_;
      }
      break;
    case Architecture::LinearHidden:
    case Architecture::NonlinearHidden:
      hidden_->forward_into(input_, rates_);
      break;
    case Architecture::Reservoir:
      reservoir_->step(*state_.reservoir, input_, config_.dt, noise_);
      rates_ = state_.reservoir->rates;
      break;
  }

  const double v = critic_.step(state_.critic, weights_.critic.dot(rates_), config_.dt, noise_);

  // rates are often sparse (relu, phiA, one-hot cue): accumulate by column
  drive_.setZero();
  for (Eigen::Index j = 0; j < rates_.size(); ++j) {
    const double r = rates_[j];
    if (r != 0.0) drive_.noalias() += r * weights_.actor.col(j);
  }
  const Vec2 ring_out = actor_.step(state_.actor, drive_, config_.dt, noise_);

  StepTelemetry out;
  out.value = v;
  out.action = ring_out * config_.velocity_scale;
  out.td_error = state_.first_step
                     ? 0.0
                     : td_error(config_.td(), state_.r_prev, reward_rate, state_.v_prev, v);

  if (learn && config_.rates.plasticity_enabled) {
    update_critic(weights_.critic, rates_, out.td_error, config_.rates, config_.dt);
    update_actor(weights_.actor, rates_, state_.actor.rho, out.td_error, config_.rates, config_.dt);
  }

  state_.v_prev = v;
  state_.r_prev = reward_rate;
  state_.first_step = false;
  return out;
}

}  // namespace pacnav
