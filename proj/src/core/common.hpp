#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace pacnav {

/// Invalid configuration or argument supplied by the caller.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state inside the dynamics; the current trial cannot continue.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing result files failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Named random streams derived from one seed.
enum class Stream : std::uint64_t {
  Weights = 1,   // frozen input/recurrent weights
  Dynamics = 2,  // membrane initialization and process noise
  Task = 3,      // start positions and cue order
  Analysis = 4,  // sampling for dimensionality estimates
};

/// Deterministic (master seed, seed index) -> per-simulation seed. Serial and
/// parallel runs use the same derivation, so results agree bit-exactly.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed, Stream s) {
  return Rng(mix64(seed ^ mix64(static_cast<std::uint64_t>(s))));
}

/// Gaussian noise stream that owns its generator. Noise::off() yields zeros
/// for deterministic tests.
class Noise {
 public:
  Noise() = default;
  explicit Noise(Rng rng) : rng_(std::move(rng)), enabled_(true) {}
  explicit Noise(std::uint64_t seed) : Noise(Rng(seed)) {}

  static Noise off() { return Noise(); }

  bool enabled() const { return enabled_; }
  double draw() { return enabled_ ? normal_(rng_) : 0.0; }

 private:
  Rng rng_;
  bool enabled_ = false;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pacnav
