#pragma once

#include <array>
#include <optional>

#include "core/common.hpp"

namespace pacnav {

/// Square arena centred on the origin.
struct Arena {
  double half_width = 0.8;
  double boundary_inset = 0.01;
  double reward_radius = 0.03;

  /// The 49 candidate reward centres: a 7x7 lattice at 0.2 m spacing,
  /// coordinates in {-0.6, -0.4, ..., 0.6}. Index = row * 7 + column with
  /// row running over x.
  static const std::array<Vec2, 49>& reward_grid();

  bool contains(Vec2 p) const {
    return std::abs(p.x) <= half_width && std::abs(p.y) <= half_width;
  }
};

/// Double-exponential reward delivery. Both states jump by R on acquisition
/// and decay independently; the emitted rate integrates to R.
struct RewardKernel {
  double rise = 0.0;
  double decay = 0.0;
  double tau_rise = 0.120;
  double tau_decay = 0.250;
  double total = 1.0;

  /// Instantaneous rate (r_decay - r_rise) / (tau_decay - tau_rise).
  double rate() const { return (decay - rise) / (tau_decay - tau_rise); }

  /// Reward still to be delivered, i.e. the integral of rate() from now on.
  double remaining() const {
    return (decay * tau_decay - rise * tau_rise) / (tau_decay - tau_rise);
  }
};

struct RewardStep {
  RewardKernel kernel;
  double rate = 0.0;  // mean rate over [t, t + dt]
};

/// Advance the kernel by dt. On acquisition both states are incremented by R
/// first. The returned rate is the exact mean of the continuous rate over the
/// step, so sum(rate * dt) equals the delivered reward for any dt.
RewardStep reward_step(const RewardKernel& kernel, double dt, bool acquired_now);

struct TrialState {
  Vec2 position;
  double elapsed = 0.0;
  std::optional<double> reward_found_at;
  double consumed_fraction = 0.0;
  bool terminated = false;
  double t_max = 300.0;
};

inline constexpr double kConsumedThreshold = 0.9999;

/// Euler position update with the boundary rule: a coordinate that would leave
/// the arena is placed boundary_inset inside the violated wall. Once the reward
/// has been found the agent stays put and the action is ignored.
/// Throws NumericalError for non-finite actions.
TrialState step_position(const TrialState& state, Vec2 action, double dt,
                         const Arena& arena = {});

/// Closed disc test: distance <= radius, with 1e-12 m slack so that points
/// placed exactly on the rim by decimal arithmetic count as inside.
inline bool at_reward(Vec2 position, Vec2 center, double radius = 0.03) {
  return distance(position, center) <= radius + 1e-12;
}

/// The four wall midpoints used as start positions.
const std::array<Vec2, 4>& start_positions();

}  // namespace pacnav
