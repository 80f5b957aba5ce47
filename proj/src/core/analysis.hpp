#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "core/agent.hpp"
#include "core/protocols.hpp"

namespace pacnav {

// --- spatial maps --------------------------------------------------------------

enum class MapKind { Value, TdError, Policy };

std::string_view map_kind_name(MapKind kind);
MapKind parse_map_kind(std::string_view name);

/// bins x bins partition of [-h, h]^2. Cell (ix, iy) is stored at ix * bins + iy,
/// ix along x. Empty cells have count 0 and are not to be read as zero.
struct SpatialMap {
  MapKind kind = MapKind::Value;
  int bins = 15;
  double half_width = 0.8;
  std::vector<double> scalar;  // mean per cell (value / td maps)
  std::vector<Vec2> vector;    // vector sum per cell (policy maps)
  std::vector<long> count;

  SpatialMap() = default;
  SpatialMap(MapKind kind, int bins, double half_width);

  int cells() const { return bins * bins; }
  bool empty(int cell) const { return count[static_cast<std::size_t>(cell)] == 0; }
  double edge(int i) const { return -half_width + 2.0 * half_width * i / bins; }
  /// Cell containing p; points on the outer edge go to the last cell.
  int cell_of(Vec2 p) const;
  long total_samples() const;
};

SpatialMap value_map(std::span<const TrialRecord> records, int bins = 15);
SpatialMap td_map(std::span<const TrialRecord> records, int bins = 15);
SpatialMap policy_map(std::span<const TrialRecord> records, int bins = 15);
SpatialMap make_map(MapKind kind, std::span<const TrialRecord> records, int bins = 15);

// --- dimensionality --------------------------------------------------------------

struct DimReport {
  int n_samples = 0;
  int width = 0;
  double variance_threshold = 0.95;
  int n_components = 0;
  std::vector<double> explained;  // cumulative explained variance fraction
  bool degenerate = false;
};

/// PCA on the rows of samples (n_samples x width): centre, take singular
/// values, count components to reach the threshold. All-constant data gives
/// n_components = 0 and degenerate = true.
DimReport pca_dimensionality(const Eigen::MatrixXd& samples, double threshold = 0.95);

/// n_samples agent inputs: positions on a 50 x 50 lattice of cell centres
/// over the arena and a uniformly drawn active cue, independently per sample.
Eigen::MatrixXd sample_inputs(int n_samples, Rng& rng, int grid = 50);

/// Rates of the agent's plastic layer for a random input sequence. Hidden
/// layers and the reservoir are built exactly as Agent builds them from
/// cfg.seed; the reservoir is driven through the sequence without noise.
Eigen::MatrixXd layer_rates(const AgentConfig& cfg, const Eigen::MatrixXd& inputs);

DimReport hidden_dimensionality(const AgentConfig& cfg, Rng& rng, int n_samples = 500,
                                double threshold = 0.95);

// --- statistics --------------------------------------------------------------

struct Summary {
  int n = 0;
  double mean = 0.0;
  double std = 0.0;     // sample (n - 1)
  double stderr_ = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double t = 0.0;       // one-sample t against mu0
  double p = 1.0;       // two-sided
  double p_greater = 0.5;  // one-sided, mean > mu0
  bool degenerate = false;  // n < 2 or zero variance
};

/// Quantiles use linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);
Summary summarize(std::span<const double> values, double mu0 = 0.0);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p = 1.0;          // two-sided
  double p_greater = 0.5;  // one-sided, a > b
  bool degenerate = false;
};

/// Unequal-variance two-sample t test.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Paired sign test on a[i] - b[i]; ties dropped. statistic = positive count,
/// df = number of non-tied pairs.
TestResult sign_test(std::span<const double> a, std::span<const double> b);

}  // namespace pacnav
