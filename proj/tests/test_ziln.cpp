// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hltv/error.hpp"
#include "hltv/ziln.hpp"

using namespace hltv;

namespace {

double logit(double p) { return std::log(p / (1 - p)); }
double sigma_raw_for(double s) { return std::log(std::expm1(s - kSigmaFloor)); }

ZilnParams make(double pi, double mu, double sigma) {
  return {logit(pi), mu, sigma_raw_for(sigma)};
}

// Integrates g(y) over y > 0 through the substitution y = exp(t).
template <class F>
double integrate_positive(F g, double mu, double sigma) {
  using boost::math::quadrature::gauss_kronrod;
  auto h = [&](double t) { return g(std::exp(t)) * std::exp(t); };
  return gauss_kronrod<double, 61>::integrate(h, mu - 40 * sigma, mu + 40 * sigma, 15, 1e-13);
}

}  // namespace

TEST_CASE("pdf at zero is the inflation probability") {
  CHECK(ziln_pdf(make(0.37, 1.0, 0.5), 0.0) == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("standard lognormal density at 1 with no inflation") {
  ZilnParams p{-60.0, 0.0, sigma_raw_for(1.0)};
  CHECK(ziln_pdf(p, 1.0) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(ziln_pdf(p, 1.0) == doctest::Approx(0.39894).epsilon(1e-5));
}

TEST_CASE("mass plus density integrates to one") {
  for (double pi : {0.1, 0.5, 0.9})
    for (double mu : {-1.0, 0.0, 2.0})
      for (double s : {0.3, 1.0, 2.0}) {
        const ZilnParams p = make(pi, mu, s);
        const double total = p.pi() + integrate_positive([&](double y) { return ziln_pdf(p, y); }, mu, s);
        CHECK(std::abs(total - 1.0) <= 1e-6);
      }
}

TEST_CASE("nll of a zero label at pi = 0.5 is ln 2") {
  CHECK(ziln_nll(ZilnParams{0.0, 0.3, 0.1}, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("exp(-nll) reproduces the pdf") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_real_distribution<double> yd(0.01, 20);
  for (int i = 0; i < 500; ++i) {
    ZilnParams p{u(rng), u(rng), u(rng)};
    const double y = (i % 5 == 0) ? 0.0 : yd(rng);
    CHECK(std::abs(std::exp(-ziln_nll(p, y)) - ziln_pdf(p, y)) <= 1e-12);
  }
}

TEST_CASE("negative labels are rejected") {
  CHECK_THROWS_AS(ziln_pdf(ZilnParams{}, -0.1), Error);
  CHECK_THROWS_AS(ziln_nll(ZilnParams{}, -1.0), Error);
}

TEST_CASE("expected value of the mixture matches numerical integration") {
  const ZilnParams p = make(0.3, 0.0, 1.0);
  const double quad = integrate_positive([&](double y) { return y * ziln_pdf(p, y); }, 0.0, 1.0);
  const auto pred = ziln_predict(p);
  CHECK(pred.expected_value == doctest::Approx(quad).epsilon(1e-8));
  CHECK(pred.expected_value == doctest::Approx(1.1541048894900896).epsilon(1e-9));
  CHECK(pred.purchase_prob == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("expected value vanishes as pi approaches one and stays non-negative") {
  CHECK(ziln_predict(ZilnParams{60.0, 1.0, 0.0}).expected_value < 1e-25);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) CHECK(ziln_predict(ZilnParams{u(rng), u(rng), u(rng)}).expected_value >= 0.0);
}

TEST_CASE("expected value is strictly increasing in mu") {
  double prev = -1;
  for (double mu = -3; mu <= 3; mu += 0.25) {
    const double ev = ziln_predict(ZilnParams{0.4, mu, -0.2}).expected_value;
    CHECK(ev > prev);
    prev = ev;
  }
}

TEST_CASE("batched tape loss matches the scalar nll and passes finite differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 1);
  for (int inst = 0; inst < 5; ++inst) {
    ParamStore p;
    std::vector<double> pr(6), mu(6), sr(6), y(6);
    for (int i = 0; i < 6; ++i) {
      pr[i] = n(rng);
      mu[i] = n(rng);
      sr[i] = n(rng);
      y[i] = (i % 3 == 0) ? 0.0 : std::exp(n(rng));
    }
    p.set("p", Tensor::matrix(6, 1, pr));
    p.set("m", Tensor::matrix(6, 1, mu));
    p.set("s", Tensor::matrix(6, 1, sr));
    BlockGraph g = [&](Tape& t) { return ziln_nll_loss(t, t.param("p"), t.param("m"), t.param("s"), y); };
    double ref = 0;
    for (int i = 0; i < 6; ++i) ref += ziln_nll(ZilnParams{pr[i], mu[i], sr[i]}, y[i]);
    CHECK(forward(g, p).item() == doctest::Approx(ref / 6).epsilon(1e-12));
    CHECK(finite_diff_check(g, p, 1e-6, 1e-4).pass);

    Tape t(p);
    Var ev = ziln_expected_value(t, t.param("p"), t.param("m"), t.param("s"));
    for (int i = 0; i < 6; ++i)
      CHECK(t.value(ev)[i] == doctest::Approx(ziln_predict(ZilnParams{pr[i], mu[i], sr[i]}).expected_value).epsilon(1e-12));
  }
}
