#include <doctest.h>

#include <cmath>
#include <random>

#include "core/analysis.hpp"

using namespace pacnav;

namespace {

TrialRecord record(const std::vector<Vec2>& pos, const std::vector<Vec2>& act, double v) {
  TrialRecord r;
  r.positions = pos;
  r.actions = act;
  r.values.assign(pos.size(), v);
  r.td_errors.assign(pos.size(), -v);
  r.reward_rates.assign(pos.size(), 0.0);
  return r;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("map cells partition the arena") {
  const SpatialMap m(MapKind::Value, 15, 0.8);
  CHECK(m.cells() == 225);
  CHECK(m.edge(0) == -0.8);
  CHECK(m.edge(15) == doctest::Approx(0.8).epsilon(1e-15));
  for (int i = 0; i < 15; ++i) CHECK(m.edge(i + 1) - m.edge(i) == doctest::Approx(1.6 / 15));
  CHECK(m.cell_of({-0.8, -0.8}) == 0);
  CHECK(m.cell_of({0.8, 0.8}) == 224);
  CHECK(m.cell_of({0.0, 0.0}) == 7 * 15 + 7);
  CHECK(m.cell_of({m.edge(3), m.edge(5)}) == 3 * 15 + 5);
}

TEST_CASE("value map averages samples and leaves unvisited cells empty") {
  const std::vector<Vec2> pos{{0.0, 0.0}, {0.01, 0.0}, {0.5, 0.5}, {-0.5, 0.2}};
  const TrialRecord r = record(pos, std::vector<Vec2>(pos.size()), 0.7);
  const std::vector<TrialRecord> recs{r};
  const SpatialMap v = value_map(recs);
  int visited = 0;
  for (int c = 0; c < v.cells(); ++c) {
    if (!v.empty(c)) {
      ++visited;
      CHECK(v.scalar[static_cast<std::size_t>(c)] == doctest::Approx(0.7));
    }
  }
  CHECK(visited == 3);
  CHECK(v.total_samples() == 4);
  CHECK(v.count[static_cast<std::size_t>(v.cell_of({0.0, 0.0}))] == 2);

  const SpatialMap td = td_map(recs);
  CHECK(td.scalar[static_cast<std::size_t>(td.cell_of({0.5, 0.5}))] == doctest::Approx(-0.7));
}

TEST_CASE("policy map is the raw vector sum") {
  const std::vector<Vec2> pos{{0.1, 0.1}, {0.1, 0.1}, {-0.3, 0.0}, {-0.3, 0.0}};
  const std::vector<Vec2> act{{0.2, -0.1}, {-0.2, 0.1}, {0.1, 0.0}, {0.3, 0.4}};
  const std::vector<TrialRecord> recs{record(pos, act, 0.0)};
  const SpatialMap p = policy_map(recs);
  const Vec2 zero = p.vector[static_cast<std::size_t>(p.cell_of({0.1, 0.1}))];
  CHECK(zero.x == doctest::Approx(0.0));
  CHECK(zero.y == doctest::Approx(0.0));
  const Vec2 sum = p.vector[static_cast<std::size_t>(p.cell_of({-0.3, 0.0}))];
  CHECK(sum.x == doctest::Approx(0.4));
  CHECK(sum.y == doctest::Approx(0.4));
}

TEST_CASE("map sample count equals total steps") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<TrialRecord> recs;
  long steps = 0;
  for (int t = 0; t < 5; ++t) {
    std::vector<Vec2> pos;
    for (int i = 0; i < 300 + t; ++i) pos.push_back({u(rng), u(rng)});
    steps += static_cast<long>(pos.size());
    recs.push_back(record(pos, std::vector<Vec2>(pos.size(), Vec2{1.0, 0.0}), 0.1));
  }
  CHECK(value_map(recs).total_samples() == steps);
  CHECK(policy_map(recs).total_samples() == steps);
}

TEST_CASE("pca recovers the rank of synthetic data") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k : {1, 3, 10, 25}) {
    Eigen::MatrixXd z(500, k);
    Eigen::MatrixXd g(200, k);
    for (int i = 0; i < z.size(); ++i) z.data()[i] = n(rng);
    for (int i = 0; i < g.size(); ++i) g.data()[i] = n(rng);
    // orthonormal directions, equal variance per direction
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                              Eigen::MatrixXd::Identity(200, k);
    const DimReport rep = pca_dimensionality(z * q.transpose());
    CHECK(rep.n_components >= k - 1);
    CHECK(rep.n_components <= k);
    CHECK(rep.explained.back() == 1.0);
    CHECK(std::is_sorted(rep.explained.begin(), rep.explained.end()));
  }
}

TEST_CASE("constant data is degenerate") {
  const DimReport rep = pca_dimensionality(Eigen::MatrixXd::Constant(500, 30, 2.5));
  CHECK(rep.degenerate);
  CHECK(rep.n_components == 0);
}

TEST_CASE("sampled inputs use lattice positions and an active cue") {
  Rng rng(3);
  const Eigen::MatrixXd u = sample_inputs(500, rng);
  CHECK(u.rows() == 500);
  CHECK(u.cols() == 67);
  for (int i = 0; i < 500; ++i) {
    CHECK(u.row(i).tail(18).sum() == 3.0);
    CHECK(u.row(i).head(49).minCoeff() > 0.0);
  }
}

TEST_CASE("linear readouts never exceed the input rank") {
  for (int width : {1, 64, 2048, 16384}) {
    AgentConfig cfg = preset_agent(Architecture::LinearHidden, "single");
    cfg.n_hidden = width;
    cfg.seed = 100 + static_cast<std::uint64_t>(width);
    Rng rng(4);
    const DimReport rep = hidden_dimensionality(cfg, rng);
    CHECK(rep.n_components <= std::min(67, width));
    CHECK(rep.n_components >= 1);
    CHECK(rep.width == width);
  }
}

TEST_CASE("relu layers are higher dimensional than linear ones") {
  AgentConfig relu = preset_agent(Architecture::NonlinearHidden, "single");
  relu.n_hidden = 2048;
  AgentConfig lin = relu;
  lin.architecture = Architecture::LinearHidden;
  Rng r1(5);
  Rng r2(5);
  CHECK(hidden_dimensionality(relu, r1).n_components > hidden_dimensionality(lin, r2).n_components);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const Summary s = summarize(v);
  CHECK(s.mean == 2.0);
  CHECK(s.std == doctest::Approx(1.0));
  CHECK(s.stderr_ == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(s.median == 2.0);
  CHECK(s.q25 == 1.5);
  CHECK(s.q75 == 2.5);

  const std::vector<double> flat(10, 0.167);
  const Summary f = summarize(flat, 0.167);
  CHECK(f.t == 0.0);
  CHECK(f.p == 1.0);
  CHECK(f.degenerate);

  const std::vector<double> one{4.0};
  CHECK(summarize(one).degenerate);
  CHECK(std::isnan(summarize(one).stderr_));
}

TEST_CASE("one-sample t test against a reference") {
  // t = 2.0 with 9 degrees of freedom: two-sided p = 0.07652
  std::vector<double> v(10);
  for (int i = 0; i < 10; ++i) v[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
  const Summary base = summarize(v);
  const double shift = 2.0 * base.stderr_;
  for (double& x : v) x += shift;
  const Summary s = summarize(v, 0.0);
  CHECK(s.t == doctest::Approx(2.0));
  CHECK(s.p == doctest::Approx(0.07652).epsilon(1e-3));
  CHECK(s.p_greater == doctest::Approx(0.07652 / 2).epsilon(1e-3));
}

TEST_CASE("t test power above chance") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.3, 0.1);
  int significant = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(40);
    for (double& x : v) x = n(rng);
    significant += summarize(v, 0.167).p < 0.001;
  }
  CHECK(significant >= 198);
}

TEST_CASE("welch and sign tests") {
  const std::vector<double> a{5.1, 4.9, 5.3, 5.0, 5.2};
  const std::vector<double> b{4.0, 4.2, 3.9, 4.1, 4.3};
  const TestResult w = welch_t_test(a, b);
  CHECK(w.statistic > 0.0);
  CHECK(w.p < 0.001);
  CHECK(w.p_greater < w.p);
  CHECK(w.df > 4.0);
  CHECK(w.df <= 8.0);

  std::vector<double> hi(10, 2.0);
  std::vector<double> lo(10, 1.0);
  const TestResult s = sign_test(hi, lo);
  CHECK(s.statistic == 10);
  CHECK(s.p_greater == doctest::Approx(1.0 / 1024));
  CHECK(s.p == doctest::Approx(2.0 / 1024));
  const TestResult rev = sign_test(lo, hi);
  CHECK(rev.p_greater == 1.0);

  lo[0] = 2.0;  // tie is dropped
  CHECK(sign_test(hi, lo).df == 9);
}

}

TEST_SUITE("analysis") {

TEST_CASE("value maps of trained agents peak near the reward") {
  const TaskSpec task = default_task(TaskKind::SingleReward);
  const Vec2 reward = task.associations.front().location;
  ExperimentOptions opts;
  opts.n_seeds = 20;
  opts.master_seed = 11;
  const auto seeds = run_experiment(task, preset_agent(Architecture::Classic, "single"), opts);
  int close = 0;
  for (const SeedResult& s : seeds) {
    std::vector<TrialRecord> last;
    for (const TrialRecord& r : s.trials) {
      if (r.meta.probe && r.meta.probe_block == 3) last.push_back(r);
    }
    REQUIRE_FALSE(last.empty());
    const SpatialMap v = value_map(last);
    int best = -1;
    for (int c = 0; c < v.cells(); ++c) {
      if (!v.empty(c) && (best < 0 || v.scalar[static_cast<std::size_t>(c)] >
                                          v.scalar[static_cast<std::size_t>(best)])) {
        best = c;
      }
    }
    const Vec2 centre{0.5 * (v.edge(best / 15) + v.edge(best / 15 + 1)),
                      0.5 * (v.edge(best % 15) + v.edge(best % 15 + 1))};
    close += distance(centre, reward) <= 0.3;
  }
  CHECK(close >= 16);
}

}
