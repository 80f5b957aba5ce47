#include "core/env.hpp"

#include <cmath>
#include <string>

namespace pacnav {

const std::array<Vec2, 49>& Arena::reward_grid() {
  static const std::array<Vec2, 49> grid = [] {
    std::array<Vec2, 49> g{};
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < 7; ++j) {
        g[static_cast<std::size_t>(i * 7 + j)] = {-0.6 + 0.2 * i, -0.6 + 0.2 * j};
      }
    }
    return g;
  }();
  return grid;
}

const std::array<Vec2, 4>& start_positions() {
  static const std::array<Vec2, 4> starts{{{0.0, 0.8}, {0.0, -0.8}, {0.8, 0.0}, {-0.8, 0.0}}};
  return starts;
}

RewardStep reward_step(const RewardKernel& kernel, double dt, bool acquired_now) {
  RewardKernel k = kernel;
  if (acquired_now) {
    k.rise += k.total;
    k.decay += k.total;
  }
  const double e_rise = std::exp(-dt / k.tau_rise);
  const double e_decay = std::exp(-dt / k.tau_decay);
  // integral over the step of each exponential, divided by dt
  const double mean_decay = k.decay * k.tau_decay * (1.0 - e_decay) / dt;
  const double mean_rise = k.rise * k.tau_rise * (1.0 - e_rise) / dt;
  const double rate = (mean_decay - mean_rise) / (k.tau_decay - k.tau_rise);
  k.rise *= e_rise;
  k.decay *= e_decay;
  return {k, rate};
}

TrialState step_position(const TrialState& state, Vec2 action, double dt, const Arena& arena) {
  if (!action.finite()) {
    throw NumericalError("non-finite action (" + std::to_string(action.x) + ", " +
                         std::to_string(action.y) + ")");
  }
  TrialState next = state;
  next.elapsed += dt;
  if (state.reward_found_at) {
    return next;
  }
  Vec2 p = state.position + action * dt;
  const double wall = arena.half_width - arena.boundary_inset;
  if (std::abs(p.x) > arena.half_width) p.x = std::copysign(wall, p.x);
  if (std::abs(p.y) > arena.half_width) p.y = std::copysign(wall, p.y);
  next.position = p;
  return next;
}

}  // namespace pacnav
