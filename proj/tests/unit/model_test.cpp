#include "doctest.h"
#include "qwalk/errors.hpp"
#include "qwalk/model.hpp"

using namespace qw;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const cplx I{0, 1};

double dist(const C2Matrix& x, const C2Matrix& y) { return (x - y).norm(); }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("coin invariants") {
  CHECK_THROWS_AS((void)Coin::make(std::sqrt(0.5), std::sqrt(0.4), 0.0), ValidationError);
  CHECK_THROWS_AS((void)Coin::make(0.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS((void)Coin::make(1.0, 0.0, std::nan("")), ValidationError);
  CHECK(Coin::make(1.0, 0.0, -kPi / 2).delta() == doctest::Approx(3 * kPi / 2));
  CHECK(Coin::make(1.0, 0.0, kTwoPi).delta() == 0.0);
  CHECK_NOTHROW((void)Coin::make(r2 * I, r2 * I, 3 * kPi / 2));
  try {
    (void)Coin::make(std::sqrt(0.5), std::sqrt(0.4), 0.0);
  } catch (const ValidationError& e) {
    CHECK(e.field() == "beta");
  }
}

TEST_CASE("coin_matrix") {
  CHECK(coin_matrix(Coin::make(1.0, 0.0, 0.0)) == C2Matrix::identity());
  CHECK(dist(coin_matrix(Coin::make(r2, r2, 0.0)), C2Matrix{r2, r2, -r2, r2}) < 1e-16);
  // wojcik2012 origin at phi = 1/4, 50-digit entrywise values
  const Coin o = preset("wojcik2012", std::vector<double>{0.25}).origin;
  CHECK(dist(coin_matrix(o), C2Matrix{r2 * I, r2 * I, r2 * I, -r2 * I}) < 1e-15);
}

TEST_CASE("pq_matrices") {
  const PQ id = pq_matrices(Coin::make(1.0, 0.0, 0.0));
  CHECK(id.p == C2Matrix::diag(1, 0));
  CHECK(id.q == C2Matrix::diag(0, 1));
  const PQ h = pq_matrices(Coin::make(r2, r2, 0.0));
  CHECK(dist(h.p, C2Matrix{r2, r2, 0, 0}) < 1e-16);
  const Coin c = Coin::make(std::polar(0.6, 1.0), std::polar(0.8, -2.0), 4.0);
  const PQ pq = pq_matrices(c);
  CHECK(dist(pq.p + pq.q, coin_matrix(c)) == 0.0);
}

TEST_CASE("presets store the parameterizations verbatim") {
  SUBCASE("ekst2014") {
    const ModelSpec m = preset("ekst2014", std::vector<double>{kPi / 6});
    CHECK(std::abs(m.origin.alpha() - I * std::cos(kPi / 6)) < 1e-16);
    CHECK(std::abs(m.origin.beta() - I * std::sin(kPi / 6)) < 1e-16);
    CHECK(m.origin.delta() == doctest::Approx(3 * kPi / 2));
    CHECK(std::abs(m.plus.alpha() - r2 * I) < 1e-16);
    CHECK(m.plus == m.minus);
  }
  SUBCASE("ekst2014 at xi = pi/4 is homogeneous") {
    const ModelSpec m = preset("ekst2014", std::vector<double>{kPi / 4});
    CHECK(std::abs(m.origin.alpha() - m.plus.alpha()) < 1e-15);
    CHECK(std::abs(m.origin.beta() - m.plus.beta()) < 1e-15);
  }
  SUBCASE("wojcik2012 phi = 1/4 wraps delta_o to 0") {
    const ModelSpec m = preset("wojcik2012", std::vector<double>{0.25});
    CHECK(angular_distance(m.origin.delta(), 0.0) < 1e-15);
  }
  SUBCASE("ekst2015") {
    const ModelSpec m = preset("ekst2015", std::vector<double>{0.0, 0.0});
    CHECK(std::abs(m.origin.alpha() - I) < 1e-16);
    CHECK(m.origin.beta() == cplx{0, 0});
    CHECK(m.origin.delta() == doctest::Approx(3 * kPi / 2));
    CHECK(std::abs(m.plus.beta() - r2 * I) < 1e-16);
    CHECK(m.plus.delta() == doctest::Approx(3 * kPi / 2));
  }
  SUBCASE("eko2015 takes sigma into beta") {
    const ModelSpec m = preset("eko2015", std::vector<double>{0.0, kPi});
    CHECK(std::abs(m.plus.beta() - r2 * I) < 1e-16);
    CHECK(std::abs(m.minus.beta() + r2 * I) < 1e-15);
    CHECK(m.origin == m.plus);
  }
  SUBCASE("hadamard") {
    const ModelSpec m = preset("hadamard", std::vector<double>{});
    CHECK(m == homogeneous(Coin::make(r2, r2, 0.0)));
  }
}

TEST_CASE("preset errors") {
  CHECK_THROWS_AS((void)preset("nope", std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS((void)preset("ekst2014", std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS((void)preset("ekst2014", ParamMap{{"phi", 0.1}}), ValidationError);
  CHECK_THROWS_AS((void)preset("ekst2014", std::vector<double>{0.0}), ValidationError);
  CHECK_THROWS_AS((void)preset("wojcik2012", std::vector<double>{1.0}), ValidationError);
  CHECK_NOTHROW((void)preset("eko2015", ParamMap{{"sigma_plus", 0.0}, {"sigma_minus", 1.0}}));
}

TEST_CASE("coin_at picks the phase by site") {
  const ModelSpec m = preset("ekst2015", std::vector<double>{0.0, 1.0});
  CHECK(m.coin_at(-3) == m.minus);
  CHECK(m.coin_at(0) == m.origin);
  CHECK(m.coin_at(7) == m.plus);
}

}
