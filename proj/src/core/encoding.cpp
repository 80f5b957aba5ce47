#include "core/encoding.hpp"

#include <string>

namespace pacnav {

namespace {
constexpr double kSpacing = 0.267;
}

const PlaceField& PlaceField::standard() {
  static const PlaceField field = [] {
    PlaceField f;
    for (int ix = 0; ix < 7; ++ix) {
      for (int iy = 0; iy < 7; ++iy) {
        f.centers[static_cast<std::size_t>(ix * 7 + iy)] = {(ix - 3) * kSpacing, (iy - 3) * kSpacing};
      }
    }
    return f;
  }();
  return field;
}

void PlaceField::rates_into(Vec2 position, Eigen::Ref<Eigen::VectorXd> out) const {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int i = 0; i < kPlaceCells; ++i) {
    const Vec2 d = position - centers[static_cast<std::size_t>(i)];
    out[i] = std::exp(-(d.x * d.x + d.y * d.y) * inv);
  }
}

Eigen::VectorXd PlaceField::rates(Vec2 position) const {
  Eigen::VectorXd out(kPlaceCells);
  rates_into(position, out);
  return out;
}

Eigen::VectorXd place_rates(Vec2 position) { return PlaceField::standard().rates(position); }

Eigen::VectorXd cue_vector(int cue_id, bool active) {
  if (cue_id < 1 || cue_id > kCueLength) {
    throw ConfigError("cue id " + std::to_string(cue_id) + " outside [1, 18]");
  }
  Eigen::VectorXd cue = Eigen::VectorXd::Zero(kCueLength);
  if (active) cue[cue_id - 1] = kCueGain;
  return cue;
}

Eigen::VectorXd compose_input(const Eigen::VectorXd& place, const Eigen::VectorXd& cue,
                              const std::optional<Eigen::VectorXd>& bump) {
  if (place.size() != kPlaceCells || cue.size() != kCueLength ||
      (bump && bump->size() != kBumpUnits)) {
    throw ConfigError("compose_input: component lengths must be 49, 18 and optionally 54");
  }
  Eigen::VectorXd u(bump ? kInputWidthWm : kInputWidth);
  u.head(kPlaceCells) = place;
  u.segment(kPlaceCells, kCueLength) = cue;
  if (bump) u.tail(kBumpUnits) = *bump;
  return u;
}

std::array<int, kPlaceCells> mirror_x_permutation() {
  std::array<int, kPlaceCells> perm{};
  for (int ix = 0; ix < 7; ++ix) {
    for (int iy = 0; iy < 7; ++iy) {
      perm[static_cast<std::size_t>(ix * 7 + iy)] = (6 - ix) * 7 + iy;
    }
  }
  return perm;
}

}  // namespace pacnav
