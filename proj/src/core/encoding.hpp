#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "core/common.hpp"

namespace pacnav {

inline constexpr int kPlaceCells = 49;
inline constexpr int kCueLength = 18;
inline constexpr double kCueGain = 3.0;
inline constexpr int kBumpUnits = 54;
inline constexpr int kInputWidth = kPlaceCells + kCueLength;          // 67
inline constexpr int kInputWidthWm = kInputWidth + kBumpUnits;        // 121

/// Gaussian place fields on a regular 7x7 lattice at 0.267 m spacing centred
/// on the arena. Center index = ix * 7 + iy.
struct PlaceField {
  std::array<Vec2, kPlaceCells> centers{};
  double sigma = 0.267;

  static const PlaceField& standard();

  Eigen::VectorXd rates(Vec2 position) const;
  void rates_into(Vec2 position, Eigen::Ref<Eigen::VectorXd> out) const;
};

Eigen::VectorXd place_rates(Vec2 position);

/// One-hot cue code with gain 3. cue_id is 1-based.
Eigen::VectorXd cue_vector(int cue_id, bool active);

/// [place, cue] or [place, cue, bump], no rescaling.
Eigen::VectorXd compose_input(const Eigen::VectorXd& place, const Eigen::VectorXd& cue,
                              const std::optional<Eigen::VectorXd>& bump = std::nullopt);

/// Index permutation of the place lattice under x -> -x.
std::array<int, kPlaceCells> mirror_x_permutation();

}  // namespace pacnav
