#include <doctest.h>

#include <random>

#include "core/common.hpp"
#include "core/plasticity.hpp"

using namespace pacnav;

TEST_SUITE("plasticity") {

TEST_CASE("td config derived quantities") {
  const TdConfig cfg{2.0, 0.1, TdScheme::Forward};
  CHECK(cfg.alpha() == doctest::Approx(0.05));
  CHECK(cfg.gamma() == 1.0 - cfg.alpha());
  CHECK(parse_td_scheme(td_scheme_name(TdScheme::Backward)) == TdScheme::Backward);
  CHECK(parse_td_scheme("forward") == TdScheme::Forward);
  CHECK_THROWS_AS(parse_td_scheme("central"), ConfigError);
}

TEST_CASE("forward td error examples") {
  const TdConfig cfg{2.0, 0.1, TdScheme::Forward};
  CHECK(td_error(cfg, 0.0, 0.0, 1.0, 1.0) == doctest::Approx(-0.5));
  CHECK(td_error(cfg, 2.0, 0.0, 0.0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("backward td error equals the discrete form") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double dt : {0.1, 0.02, 0.005}) {
    const TdConfig cfg{2.0, dt, TdScheme::Backward};
    const double gamma = 1.0 - dt / cfg.tau_g;
    for (int i = 0; i < 10000; ++i) {
      const double r = u(rng);
      const double v_prev = u(rng);
      const double v_now = u(rng);
      const double discrete = r + (gamma * v_now / dt - v_prev / dt);
      REQUIRE(std::abs(td_error(cfg, 0.0, r, v_prev, v_now) - discrete) <= 1e-12 * (1.0 + std::abs(discrete)));
    }
  }
}

TEST_CASE("forward and backward schemes converge as dt shrinks") {
  // smooth trace r(t) = sin t, v(t) = 1 + 0.5 cos t
  auto max_gap = [](double dt) {
    const TdConfig fwd{2.0, dt, TdScheme::Forward};
    const TdConfig bwd{2.0, dt, TdScheme::Backward};
    double gap = 0.0;
    for (double t = dt; t < 10.0; t += dt) {
      const double r0 = std::sin(t - dt);
      const double r1 = std::sin(t);
      const double v0 = 1.0 + 0.5 * std::cos(t - dt);
      const double v1 = 1.0 + 0.5 * std::cos(t);
      gap = std::max(gap, std::abs(td_error(fwd, r0, r1, v0, v1) - td_error(bwd, r0, r1, v0, v1)));
    }
    return gap;
  };
  const double g1 = max_gap(0.01);
  const double g2 = max_gap(0.005);
  CHECK(g2 < g1);
  CHECK(g2 / g1 == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("critic update") {
  const LearningRates rates{1e-4, 1e-4, true};
  Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
  update_critic(w, Eigen::VectorXd::Ones(3), 0.0, rates, 0.1);
  CHECK(w.isZero());
  update_critic(w, Eigen::VectorXd::Zero(3), 2.0, rates, 0.1);
  CHECK(w.isZero());
  update_critic(w, Eigen::VectorXd::Ones(3), 2.0, rates, 0.1);
  CHECK(w[0] == doctest::Approx(2e-5));
}

TEST_CASE("actor update") {
  const LearningRates unit{1.0, 1.0, true};
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(40, 5);
  update_actor(w, Eigen::VectorXd::Ones(5), Eigen::VectorXd::Zero(40), 1.0, unit, 1.0);
  CHECK(w.isZero());

  Eigen::VectorXd pre = Eigen::VectorXd::Zero(5);
  pre[2] = 1.0;
  Eigen::VectorXd post = Eigen::VectorXd::Zero(40);
  post[7] = 1.0;
  update_actor(w, pre, post, 1.0, unit, 1.0);
  CHECK(w(7, 2) == 1.0);
  CHECK(w.sum() == 1.0);

  update_actor(w, pre, post, -0.5, unit, 1.0);
  CHECK(w(7, 2) == 0.5);
}

TEST_CASE("updates are linear in delta") {
  const LearningRates rates{0.01, 0.02, true};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd pre(20);
  Eigen::VectorXd post(40);
  for (auto& x : pre) x = u(rng);
  for (auto& x : post) x = u(rng);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(40, 20);
  Eigen::MatrixXd b = a;
  Eigen::VectorXd ca = Eigen::VectorXd::Zero(20);
  Eigen::VectorXd cb = ca;
  update_actor(a, pre, post, 0.3, rates, 0.1);
  update_actor(a, pre, post, -1.1, rates, 0.1);
  update_actor(b, pre, post, 0.3 - 1.1, rates, 0.1);
  update_critic(ca, pre, 0.3, rates, 0.1);
  update_critic(ca, pre, -1.1, rates, 0.1);
  update_critic(cb, pre, 0.3 - 1.1, rates, 0.1);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ca - cb).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("disabled plasticity leaves weights untouched") {
  const LearningRates off{1.0, 1.0, false};
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(40, 3, 0.5);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(3, 0.5);
  const Eigen::MatrixXd w0 = w;
  const Eigen::VectorXd c0 = c;
  update_actor(w, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(40), 5.0, off, 0.1);
  update_critic(c, Eigen::VectorXd::Ones(3), 5.0, off, 0.1);
  CHECK(w == w0);
  CHECK(c == c0);
}

}
