#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "core/encoding.hpp"

namespace pacnav {

std::string_view map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::Value:
      return "value";
    case MapKind::TdError:
      return "td";
    case MapKind::Policy:
      return "policy";
  }
  return "unknown";
}

MapKind parse_map_kind(std::string_view name) {
  if (name == "value") return MapKind::Value;
  if (name == "td") return MapKind::TdError;
  if (name == "policy") return MapKind::Policy;
  throw ConfigError("unknown map kind '" + std::string(name) + "'");
}

SpatialMap::SpatialMap(MapKind k, int b, double h) : kind(k), bins(b), half_width(h) {
  if (b < 1) throw ConfigError("map needs at least one bin");
  const auto n = static_cast<std::size_t>(b) * static_cast<std::size_t>(b);
  scalar.assign(n, 0.0);
  vector.assign(n, Vec2{});
  count.assign(n, 0);
}

int SpatialMap::cell_of(Vec2 p) const {
  auto axis = [&](double v) {
    const int i = static_cast<int>(std::floor((v + half_width) / (2.0 * half_width) * bins));
    return std::clamp(i, 0, bins - 1);
  };
  return axis(p.x) * bins + axis(p.y);
}

long SpatialMap::total_samples() const { return std::accumulate(count.begin(), count.end(), 0L); }

SpatialMap make_map(MapKind kind, std::span<const TrialRecord> records, int bins) {
  SpatialMap map(kind, bins, Arena{}.half_width);
  for (const TrialRecord& rec : records) {
    for (std::size_t i = 0; i < rec.positions.size(); ++i) {
      const auto c = static_cast<std::size_t>(map.cell_of(rec.positions[i]));
      ++map.count[c];
      switch (kind) {
        case MapKind::Value:
          map.scalar[c] += rec.values[i];
          break;
        case MapKind::TdError:
          map.scalar[c] += rec.td_errors[i];
          break;
        case MapKind::Policy:
          map.vector[c] += rec.actions[i];
          break;
      }
    }
  }
  if (kind != MapKind::Policy) {
    for (std::size_t c = 0; c < map.scalar.size(); ++c) {
      if (map.count[c] > 0) map.scalar[c] /= static_cast<double>(map.count[c]);
    }
  }
  return map;
}

SpatialMap value_map(std::span<const TrialRecord> records, int bins) {
  return make_map(MapKind::Value, records, bins);
}
SpatialMap td_map(std::span<const TrialRecord> records, int bins) {
  return make_map(MapKind::TdError, records, bins);
}
SpatialMap policy_map(std::span<const TrialRecord> records, int bins) {
  return make_map(MapKind::Policy, records, bins);
}

// ---------------------------------------------------------------------------

DimReport pca_dimensionality(const Eigen::MatrixXd& samples, double threshold) {
  DimReport rep;
  rep.n_samples = static_cast<int>(samples.rows());
  rep.width = static_cast<int>(samples.cols());
  rep.variance_threshold = threshold;
  if (samples.rows() < 2 || samples.cols() < 1) {
    rep.degenerate = true;
    return rep;
  }
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centred = samples.rowwise() - mean;
  // singular values of the short side are the same either way
  Eigen::VectorXd sv;
  if (centred.rows() <= centred.cols()) {
    sv = Eigen::BDCSVD<Eigen::MatrixXd>(centred.transpose()).singularValues();
  } else {
    sv = Eigen::BDCSVD<Eigen::MatrixXd>(centred).singularValues();
  }
  const Eigen::VectorXd var = sv.array().square();
  const double total = var.sum();
  const double scale = samples.cwiseAbs().maxCoeff();
  if (!(total > 1e-24 * std::max(1.0, scale * scale) * static_cast<double>(samples.size()))) {
    rep.degenerate = true;
    return rep;
  }
  double acc = 0.0;
  rep.explained.reserve(static_cast<std::size_t>(var.size()));
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    acc += var[i];
    rep.explained.push_back(std::min(1.0, acc / total));
    if (rep.n_components == 0 && acc / total >= threshold - 1e-12) {
      rep.n_components = static_cast<int>(i) + 1;
    }
  }
  rep.explained.back() = 1.0;
  return rep;
}

Eigen::MatrixXd sample_inputs(int n_samples, Rng& rng, int grid) {
  const double h = Arena{}.half_width;
  std::uniform_int_distribution<int> cell(0, grid - 1);
  std::uniform_int_distribution<int> cue(1, kCueLength);
  Eigen::MatrixXd out(n_samples, kInputWidth);
  const PlaceField& field = PlaceField::standard();
  Eigen::VectorXd place(kPlaceCells);
  for (int s = 0; s < n_samples; ++s) {
    const int ix = cell(rng);
    const int iy = cell(rng);
    const Vec2 p{-h + (ix + 0.5) * 2.0 * h / grid, -h + (iy + 0.5) * 2.0 * h / grid};
    field.rates_into(p, place);
    out.row(s).head(kPlaceCells) = place.transpose();
    out.row(s).tail(kCueLength) = cue_vector(cue(rng), true).transpose();
  }
  return out;
}

Eigen::MatrixXd layer_rates(const AgentConfig& cfg_in, const Eigen::MatrixXd& inputs) {
  AgentConfig cfg = cfg_in;
  cfg.reservoir.n = cfg.n_hidden;
  const int n_in = cfg.input_width();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(inputs.rows(), n_in);
  const Eigen::Index cols = std::min<Eigen::Index>(inputs.cols(), n_in);
  u.leftCols(cols) = inputs.leftCols(cols);

  Rng weight_rng = make_stream(cfg.seed, Stream::Weights);
  switch (cfg.architecture) {
    case Architecture::Classic:
      return u;
    case Architecture::ExpandedClassic:
      return u.replicate(1, cfg.expanded_copies);
    case Architecture::LinearHidden:
    case Architecture::NonlinearHidden: {
      const HiddenLayer layer = HiddenLayer::sample(cfg.hidden_spec(), n_in, weight_rng);
      Eigen::MatrixXd pre = u * layer.input_weights().transpose();
      const Activation act = layer.activation();
      for (Eigen::Index r = 0; r < pre.rows(); ++r) {
        Eigen::VectorXd row = pre.row(r).transpose();
        activate_inplace(act, row);
        pre.row(r) = row.transpose();
      }
      return pre;
    }
    case Architecture::Reservoir: {
      const Reservoir res = Reservoir::sample(cfg.reservoir, n_in, weight_rng);
      Noise quiet = Noise::off();
      ReservoirState state = res.initial_state(quiet);
      Eigen::MatrixXd out(u.rows(), cfg.n_hidden);
      for (Eigen::Index r = 0; r < u.rows(); ++r) {
        res.step(state, u.row(r).transpose(), cfg.dt, quiet);
        out.row(r) = state.rates.transpose();
      }
      return out;
    }
  }
  return u;
}

DimReport hidden_dimensionality(const AgentConfig& cfg, Rng& rng, int n_samples, double threshold) {
  if (n_samples < 2) throw ConfigError("dimensionality needs at least 2 samples");
  return pca_dimensionality(layer_rates(cfg, sample_inputs(n_samples, rng)), threshold);
}

// ---------------------------------------------------------------------------

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

double t_two_sided(double t, double df) {
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double t_upper(double t, double df) {
  boost::math::students_t dist(df);
  return boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace

Summary summarize(std::span<const double> values, double mu0) {
  Summary s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) {
    s.degenerate = true;
    s.mean = s.median = s.q25 = s.q75 = std::nan("");
    return s;
  }
  std::vector<double> v(values.begin(), values.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / s.n;
  s.median = quantile(v, 0.5);
  s.q25 = quantile(v, 0.25);
  s.q75 = quantile(v, 0.75);
  if (s.n < 2) {
    s.degenerate = true;
    s.std = s.stderr_ = std::nan("");
    return s;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / (s.n - 1));
  s.stderr_ = s.std / std::sqrt(static_cast<double>(s.n));
  if (s.stderr_ == 0.0) {
    s.degenerate = true;
    s.t = 0.0;
    s.p = 1.0;
    s.p_greater = s.mean > mu0 ? 0.0 : 1.0;
    if (s.mean != mu0) s.p = 0.0;
    return s;
  }
  s.t = (s.mean - mu0) / s.stderr_;
  s.p = t_two_sided(s.t, s.n - 1);
  s.p_greater = t_upper(s.t, s.n - 1);
  return s;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  TestResult r;
  const Summary sa = summarize(a);
  const Summary sb = summarize(b);
  if (sa.n < 2 || sb.n < 2) {
    r.degenerate = true;
    return r;
  }
  const double va = sa.std * sa.std / sa.n;
  const double vb = sb.std * sb.std / sb.n;
  const double se = std::sqrt(va + vb);
  const double diff = sa.mean - sb.mean;
  if (se == 0.0) {
    r.degenerate = true;
    r.p = diff == 0.0 ? 1.0 : 0.0;
    r.p_greater = diff > 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.statistic = diff / se;
  r.df = (va + vb) * (va + vb) / (va * va / (sa.n - 1) + vb * vb / (sb.n - 1));
  r.p = t_two_sided(r.statistic, r.df);
  r.p_greater = t_upper(r.statistic, r.df);
  return r;
}

TestResult sign_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("sign test needs paired samples");
  int pos = 0;
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++n;
    if (a[i] > b[i]) ++pos;
  }
  TestResult r;
  r.statistic = pos;
  r.df = n;
  if (n == 0) {
    r.degenerate = true;
    return r;
  }
  boost::math::binomial dist(n, 0.5);
  // P(X >= pos)
  r.p_greater = pos == 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, pos - 1));
  const double p_less = boost::math::cdf(dist, pos);
  r.p = std::min(1.0, 2.0 * std::min(r.p_greater, p_less));
  return r;
}

}  // namespace pacnav
