#include <cmath>
#include <random>

#include "doctest.h"
#include "matukuma/classify.hpp"
#include "matukuma/errors.hpp"

using namespace matukuma;

namespace {
ProblemSpec pure(double p) { return ProblemSpec(3, -0.5, -0.5, p, WeightFunction(PurePower{-0.5})); }
ProblemSpec example3() { return ProblemSpec(3, -1.0, 0.0, 2.5, make_example_iii(3, -1.0, 2.5)); }
std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
  return v;
}
}  // namespace

TEST_CASE("trichotomy examples") {
  const Tolerances tol;
  for (double a : {0.1, 1.0, 10.0}) {
    const Shot r = shoot(pure(4.0), a, tol);
    CHECK(r.classification.label == Label::RapidDecay);
    CHECK(r.classification.D_limit > 0.0);
    const Shot c = shoot(pure(2.0), a, tol);
    CHECK(c.classification.label == Label::Crossing);
    CHECK(c.classification.crossing_radius.has_value());
  }
  const Shot s = shoot(example3(), 1.0, tol);
  CHECK(s.classification.label == Label::SlowDecay);
  CHECK(s.classification.fitted_decay_exponent == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  CHECK(s.classification.D_trend > 0.9);
}

TEST_CASE("classify on a plain trajectory") {
  const Tolerances tol;
  const Trajectory phi = integrate(pure(4.0), 1.0, tol, 1e6);
  const Classification c = classify(phi, tol);
  CHECK(c.label == Label::RapidDecay);
  CHECK(c.fitted_decay_exponent == doctest::Approx(1.0).epsilon(0.02));
  const Trajectory e3 = integrate(example3(), 1.0, tol, 1e6);
  CHECK(classify(e3, tol).label == Label::SlowDecay);
  const Trajectory cr = integrate(pure(2.0), 1.0, tol, 1e6);
  const Classification cc = classify(cr, tol);
  CHECK(cc.label == Label::Crossing);
  CHECK(cc.crossing_radius == cr.crossing_radius());
  CHECK(to_string(Label::SlowDecay) == "slow_decay");
  CHECK(to_char(Label::Undetermined) == 'U');
}

TEST_CASE("labels are exhaustive and consistent") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> la(-2.0, 2.0);
  std::uniform_real_distribution<double> pd(1.5, 6.0);
  const Tolerances tol;
  for (int i = 0; i < 12; ++i) {
    const double a = std::pow(10.0, la(rng));
    const Shot s = shoot(pure(pd(rng)), a, tol);
    const Label l = s.classification.label;
    CHECK((l == Label::Crossing || l == Label::SlowDecay || l == Label::RapidDecay ||
           l == Label::Undetermined));
    CHECK((l == Label::Crossing) == s.classification.crossing_radius.has_value());
    if (l == Label::SlowDecay) CHECK(s.classification.D_trend > 0.0);
  }
}

TEST_CASE("pure power at or above p* never crosses") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> la(-2.0, 2.0);
  for (double p : {4.0, 5.0})
    for (int i = 0; i < 5; ++i) {
      const Shot s = shoot(pure(p), std::pow(10.0, la(rng)), Tolerances{});
      CHECK(s.classification.label != Label::Crossing);
      CHECK(s.classification.label != Label::Undetermined);
    }
}

TEST_CASE("longer horizon never flips a crossing") {
  Tolerances tol;
  for (double a : {0.1, 1.0, 10.0}) {
    tol.class_horizon = 1e4;
    const Shot s1 = shoot(pure(2.0), a, tol);
    tol.class_horizon = 2e4;
    const Shot s2 = shoot(pure(2.0), a, tol);
    REQUIRE(s1.classification.label == Label::Crossing);
    CHECK(s2.classification.label == Label::Crossing);
  }
}

TEST_CASE("r_alpha scaling") {
  const Tolerances tol;
  const ScalingFit small = fit_r_alpha_scaling(pure(4.0), logspace(-3, -1, 11), 2.0, tol);
  CHECK(small.slope_all == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(small.slope_small == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(small.r2_all > 0.999);
  const ScalingFit large = fit_r_alpha_scaling(pure(4.0), logspace(1, 3, 11), 2.0, tol);
  CHECK(large.slope_small == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(large.slope_large == doctest::Approx(-2.0).epsilon(0.05));
  CHECK_THROWS_AS(fit_r_alpha_scaling(pure(4.0), {0.1, 1.0}, 2.0, tol), ValidationError);

  IntegrateOptions opts;
  opts.r_alpha_ks = {4.0};
  const auto r4 = [&](double a) {
    return integrate(pure(4.0), a, tol, 1e3 * estimate_r_alpha(pure(4.0), a), opts).r_alpha_k().at(4.0);
  };
  CHECK(r4(1e-3) > r4(1e-1));
}

TEST_CASE("a-priori bound") {
  const Tolerances tol;
  std::vector<Trajectory> base, ext;
  for (double a : {0.1, 1.0, 10.0}) base.push_back(integrate(pure(4.0), a, tol, 1e3));
  ext.push_back(integrate(pure(4.0), 100.0, tol, 1e3));
  const AprioriBound b = apriori_bound_check(base, ext, 1.0);
  CHECK(b.pass);
  // sup over r of r^(1/2) phi is (4c)^(-1/3) when the peak lies in range.
  CHECK(b.C_base == doctest::Approx(std::pow(1.6, -1.0 / 3.0)).epsilon(1e-6));
  const AprioriBound single = apriori_bound_check({base[1]}, {}, 1.0);
  CHECK(single.pass);
  const Trajectory e3 = integrate(example3(), 1.0, tol, 1e3);
  const double sup = apriori_sup({e3}, 1.0);
  CHECK(std::isfinite(sup));
  // r^(1/2) (1 + r^2)^(-1/3) peaks at r^2 = 3.
  CHECK(sup == doctest::Approx(std::pow(3.0, 0.25) * std::pow(4.0, -1.0 / 3.0)).epsilon(1e-6));
  const Trajectory cr = integrate(pure(2.0), 1.0, tol, 1e6);
  CHECK_THROWS_AS(apriori_sup({cr}, 1.0), DomainError);
}
