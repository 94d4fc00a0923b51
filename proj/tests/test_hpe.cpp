#include "rhpe/error.hpp"
#include "rhpe/hpe.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace rhpe;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

HpeCertificate cert_1d(double y, double v, double eps, double lambda) {
  HpeCertificate c;
  c.y = vec({y});
  c.v = vec({v});
  c.b = vec({v});
  c.eps = eps;
  c.lambda = lambda;
  return c;
}

}  // namespace

TEST_CASE("verify_hpe_condition") {
  const Vector x = vec({1.0});
  SUBCASE("exact proximal step with sigma 0") {
    const auto r = verify_hpe_condition(x, cert_1d(0.5, 0.5, 0.0, 1.0), 0.0);
    CHECK(r.holds);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
  }
  SUBCASE("inexact step within sigma 0.5") {
    const auto r = verify_hpe_condition(x, cert_1d(0.5, 0.6, 0.0, 1.0), 0.5);
    CHECK(r.holds);
    CHECK(r.lhs == doctest::Approx(0.01));
    CHECK(r.rhs == doctest::Approx(0.0625));
  }
  SUBCASE("same step fails sigma 0.1") {
    const auto r = verify_hpe_condition(x, cert_1d(0.5, 0.6, 0.0, 1.0), 0.1);
    CHECK_FALSE(r.holds);
    CHECK(r.lhs == doctest::Approx(0.01));
    CHECK(r.rhs == doctest::Approx(0.0025));
  }
  SUBCASE("eps enters with weight 2 lambda") {
    const auto r = verify_hpe_condition(x, cert_1d(0.5, 0.5, 0.1, 2.0), 0.9);
    CHECK(r.lhs == doctest::Approx(0.25 * 0.25 * 4 + 0.4).epsilon(1e-12));
  }
}

TEST_CASE("extragradient_update") {
  CHECK(extragradient_update(vec({1, 0}), 0.5, vec({2, 0})) == vec({0, 0}));
  CHECK(extragradient_update(vec({3, -2}), 0.7, vec({0, 0})) == vec({3, -2}));
  CHECK(extragradient_update(vec({1}), 1.0, vec({0.5})) == vec({0.5}));
}

TEST_CASE("theta") {
  CHECK(theta(1.0, 0.5, 0.0) == doctest::Approx(0.5));
  CHECK(theta(1.0, 1.0, std::sqrt(0.5)) == doctest::Approx(0.4));
  CHECK(theta(1e12, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  try {
    (void)theta(1.0, 0.0, 0.5);
    FAIL("expected degenerate_regularization");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_regularization);
  }
  const auto rc = RateConstants::make(1.0, 0.5, 0.0);
  CHECK(rc.theta == doctest::Approx(0.5));
}

TEST_CASE("pointwise_rate_bounds") {
  SUBCASE("sigma 0 kills the eps bound") {
    for (long k = 1; k < 10; ++k) CHECK(pointwise_rate_bounds(k, 3.0, 0.7, 0.2, 0.0).eps_bound == 0.0);
  }
  SUBCASE("k = 1 plug-in") {
    const auto b = pointwise_rate_bounds(1, 1.0, 1.0, 0.5, 0.0);
    CHECK(b.v_bound == doctest::Approx(1.0));
    CHECK(b.x_bound == doctest::Approx(std::sqrt(0.5)));
  }
  SUBCASE("k = 3 plug-in") {
    CHECK(pointwise_rate_bounds(3, 1.0, 1.0, 0.5, 0.0).v_bound == doctest::Approx(0.5));
  }
  SUBCASE("general sigma against the closed forms") {
    const double lam = 0.4;
    const double mu = 0.3;
    const double s = 0.6;
    const double th = 1.0 / (1.0 / (2 * lam * mu) + 1.0 / (1 - s * s));
    for (long k = 1; k <= 5; ++k) {
      const auto b = pointwise_rate_bounds(k, 2.0, lam, mu, s);
      CHECK(b.v_bound == doctest::Approx(std::sqrt((1 + s) / (1 - s)) *
                                         std::pow(1 - th, 0.5 * (k - 1)) / lam * 2.0));
      CHECK(b.eps_bound ==
            doctest::Approx(s * s / (2 * (1 - s * s)) * std::pow(1 - th, k - 1) / lam * 4.0));
      CHECK(b.x_bound == doctest::Approx(std::pow(1 - th, 0.5 * k) * 2.0));
    }
  }
  CHECK_THROWS_AS(pointwise_rate_bounds(0, 1.0, 1.0, 0.5, 0.0), Error);
}

TEST_CASE("gamma_sequence") {
  SUBCASE("two halves") {
    const std::vector<double> th{0.5, 0.5};
    const auto g = gamma_sequence(th);
    CHECK(g[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(g[1] == doctest::Approx(0.5));
  }
  SUBCASE("constant theta gives (1-theta)^(k/2)") {
    for (double t : {0.01, 0.2, 0.5, 0.93}) {
      const std::vector<double> th(60, t);
      const auto g = gamma_sequence(th);
      for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(g[k] - std::pow(1 - t, 0.5 * static_cast<double>(k + 1))) <= 1e-14);
      }
    }
  }
  SUBCASE("theta from lambda, mu") {
    const double t1 = theta(1.0, 0.1, 0.0);
    CHECK(t1 == doctest::Approx(1.0 / 6.0));
    const std::vector<double> th{t1};
    CHECK(gamma_sequence(th)[0] == doctest::Approx(0.9128709291752769));
  }
  SUBCASE("theta outside (0,1) rejected") {
    const std::vector<double> bad{0.5, 1.0};
    CHECK_THROWS_AS(gamma_sequence(bad), Error);
    const std::vector<double> bad2{0.0};
    CHECK_THROWS_AS(gamma_sequence(bad2), Error);
  }
}

TEST_CASE("step-length bracket follows from the HPE inequality") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int accepted = 0;
  for (int t = 0; t < 2000; ++t) {
    HpeCertificate c;
    const Vector x = Vector::NullaryExpr(3, [&] { return u(g); });
    c.y = Vector::NullaryExpr(3, [&] { return u(g); });
    c.lambda = 0.1 + std::abs(u(g));
    // λv = x − y + e with e small relative to ‖y − x‖
    const Vector e = 0.5 * (c.y - x).norm() * Vector::NullaryExpr(3, [&] { return u(g); }) / std::sqrt(3.0);
    c.v = (x - c.y + e) / c.lambda;
    c.b = c.v;
    c.eps = 0.01 * std::abs(u(g));
    const double sigma = 0.8;
    if (verify_hpe_condition(x, c, sigma).holds) {
      ++accepted;
      CHECK(step_length_bracket_holds(x, c, sigma));
    }
  }
  CHECK(accepted > 100);
}
