#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "matukuma/scan.hpp"

using namespace matukuma;

namespace {
ProblemSpec phi_spec() { return ProblemSpec(3, -0.5, -0.5, 4.0, WeightFunction(PurePower{-0.5})); }
ProblemSpec example3() { return ProblemSpec(3, -1.0, 0.0, 2.5, make_example_iii(3, -1.0, 2.5)); }
BumpFunction shipped_bump() { return BumpFunction::hermite(1, 2, 3, 2, {}); }
}  // namespace

TEST_CASE("phi closed form values") {
  const ProblemSpec s = phi_spec();
  CHECK(phi_closed_form(s, 1.0, 0.0) == 1.0);
  CHECK(phi_closed_form(s, 2.5, 0.0) == 2.5);
  CHECK(phi_closed_form(s, 1.0, 1.0) == doctest::Approx(std::pow(1.4, -2.0 / 3.0)).epsilon(1e-15));
  CHECK(phi_closed_form(s, 1.0, 1.0) == doctest::Approx(0.799064).epsilon(1e-6));
  const double a = phi_closed_form(s, 1.0, 1e6) * 1e6, b = phi_closed_form(s, 1.0, 1e7) * 1e7;
  CHECK(a == doctest::Approx(b).epsilon(1e-3));
  CHECK(a > 0.0);
  CHECK_THROWS_AS(phi_closed_form(s.with_p(3.0), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(phi_closed_form(example3(), 1.0, 1.0), DomainError);
}

TEST_CASE("phi exponent identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ld(-1.99, -0.01);
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + static_cast<int>(rng() % 5);
    const double l = ld(rng);
    const double ps = critical_exponent(n, l);
    CHECK((n - 2) * (ps - 1.0) / 2.0 == doctest::Approx(2.0 + l).epsilon(1e-12));
  }
}

TEST_CASE("phi satisfies the equation") {
  const ProblemSpec s = phi_spec();
  const double p = 4.0, l = -0.5, alpha = 1.3;
  const double c = 2.0 * std::pow(alpha, p - 1.0) / ((p + 1.0) * 1.0);
  const double q = -2.0 / (p - 1.0), e = 2.0 + l;
  for (double r : log_grid(1e-4, 1e4, 100)) {
    const double B = 1.0 + c * std::pow(r, e);
    const double g = c * e * std::pow(r, e - 1.0);
    const double u = alpha * std::pow(B, q);
    const double du = alpha * q * std::pow(B, q - 1.0) * g;
    const double d2u = alpha * q *
                       ((q - 1.0) * std::pow(B, q - 2.0) * g * g + std::pow(B, q - 1.0) * c * e * (e - 1.0) * std::pow(r, e - 2.0));
    CHECK(u == doctest::Approx(phi_closed_form(s, alpha, r)).epsilon(1e-13));
    const double t3 = std::pow(r, l) * std::pow(u, p);
    const double res = d2u + 2.0 / r * du + t3;
    CHECK(std::abs(res) <= 1e-10 * std::max({std::abs(d2u), std::abs(2.0 / r * du), t3}));
  }
}

TEST_CASE("phi with a scaled weight") {
  const ProblemSpec s = phi_spec().with_weight(WeightFunction(PurePower{-0.5}, 3.0));
  const Trajectory tr = integrate(s, 0.7, Tolerances{}, 100.0);
  for (double r : {0.5, 5.0, 50.0}) CHECK(tr.at(r).u == doctest::Approx(phi_closed_form(s, 0.7, r)).epsilon(1e-7));
}

TEST_CASE("example_iii closed-form solution") {
  CHECK(example_iii_solution(3, -1.0, 2.5, 0.0) == 1.0);
  CHECK(example_iii_solution(3, -1.0, 2.5, std::sqrt(3.0)) == doctest::Approx(std::pow(4.0, -1.0 / 3.0)).epsilon(1e-15));
  CHECK(example_iii_solution(3, -1.0, 2.5, std::sqrt(3.0)) == doctest::Approx(0.62996).epsilon(1e-5));
  CHECK_THROWS_AS(example_iii_solution(3, -1.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(example_iii_solution(3, -1.0, 3.5, 1.0), DomainError);

  const WeightFunction f = make_example_iii(3, -1.0, 2.5);
  const double k = 1.0 / 3.0;  // u = (1 + r^2)^-k
  for (double r : log_grid(1e-3, 1e3, 50)) {
    const double B = 1.0 + r * r;
    const double u = std::pow(B, -k);
    const double du = -2.0 * k * r * std::pow(B, -k - 1.0);
    const double d2u = -2.0 * k * std::pow(B, -k - 1.0) + 4.0 * k * (k + 1.0) * r * r * std::pow(B, -k - 2.0);
    CHECK(u == doctest::Approx(example_iii_solution(3, -1.0, 2.5, r)).epsilon(1e-14));
    const double t3 = f.f(r) * std::pow(u, 2.5);
    const double res = d2u + 2.0 / r * du + t3;
    CHECK(std::abs(res) <= 1e-10 * std::max({std::abs(d2u), std::abs(2.0 / r * du), t3}));
  }
}

TEST_CASE("oracles") {
  const auto res = run_oracles(Tolerances{});
  REQUIRE(res.size() == 4);
  for (const auto& o : res) {
    CHECK(o.max_rel_error <= 1e-6);
    CHECK(o.seconds < 1.0);
  }
  CHECK(res.back().name == "example_iii");
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-2, 1e2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1e-2);
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == 1e2);
  CHECK_THROWS_AS(log_grid(1.0, 1.0, 3), DomainError);
}

TEST_CASE("sweep input validation") {
  const Tolerances tol;
  CHECK_THROWS_AS(sweep(phi_spec(), {1.0}, tol), ValidationError);
  CHECK_THROWS_AS(sweep(phi_spec(), {1, 2, 3, 4, 5, 6, 8, 7}, tol), ValidationError);
  CHECK_THROWS_AS(sweep(phi_spec(), {-1, 2, 3, 4, 5, 6, 7, 8}, tol), ValidationError);
  try {
    sweep(phi_spec(), {1.0, 2.0}, tol);
  } catch (const ValidationError& e) {
    CHECK(e.clause() == "grid");
  }
}

TEST_CASE("pure power sweep is all rapid") {
  const StructureReport r = sweep(phi_spec(), log_grid(1e-2, 1e2, 9), Tolerances{}, {2});
  CHECK(r.pattern == "R");
  CHECK(r.boundaries.empty());
  CHECK(r.rapid_alphas.empty());
}

TEST_CASE("example_iii sweep") {
  const StructureReport r = sweep(example3(), log_grid(1e-2, 1e2, 17), Tolerances{}, {4});
  CHECK(r.grid.front().classification.label == Label::Crossing);
  CHECK(r.grid.back().classification.label == Label::Crossing);
  CHECK(r.grid[8].alpha == 1.0);
  CHECK(r.grid[8].classification.label == Label::SlowDecay);
  CHECK(r.pattern.front() == 'C');
  CHECK(r.pattern.back() == 'C');
  CHECK(r.pattern.find('S') != std::string::npos);
  for (std::size_t i = 1; i < r.boundaries.size(); ++i) CHECK(r.boundaries[i].lo >= r.boundaries[i - 1].hi);
}

TEST_CASE("constructed weight structure") {
  const Tolerances tol;
  const Theorem5Report rep = theorem5_pipeline(shipped_bump(), phi_spec(), Theorem5Config{}, tol, {4});
  CHECK(rep.pass);
  CHECK(rep.structure.pattern == "C|S|C");
  REQUIRE(rep.rapid_count >= 2);
  const auto& ra = rep.structure.rapid_alphas;
  CHECK(ra[1] - ra[0] > 1e-3);
  const ProblemSpec fs = phi_spec().with_weight(build_constructed_f(shipped_bump(), 0.1, phi_spec()));
  for (const Boundary& b : rep.structure.boundaries) {
    CHECK(b.width() < 1e-6 * b.lo);
    CHECK(shoot(fs, b.lo, tol).classification.label == b.left);
    CHECK(shoot(fs, b.hi, tol).classification.label == b.right);
  }
  for (const char* id : {"f4", "f6", "f7", "f9"}) CHECK(rep.hypotheses.holds(id));
  CHECK(rep.alpha_star_label == Label::SlowDecay);
}

TEST_CASE("periodic w just above the first rapid candidate is slow") {
  // At p* the tail of the constructed weight is a pure power, so slow solutions
  // have w periodic in ln r with pulses of equal height.
  const ProblemSpec fs = phi_spec().with_weight(build_constructed_f(shipped_bump(), 0.1, phi_spec()));
  for (double a : {0.73814, 0.7382, 0.73826, 0.7383}) {
    const Shot s = shoot(fs, a, Tolerances{});
    CHECK_MESSAGE(s.classification.label == Label::SlowDecay, a);
  }
}

TEST_CASE("constructed weight preconditions") {
  Theorem5Config bad;
  bad.delta = 1.0;
  try {
    theorem5_pipeline(shipped_bump(), phi_spec(), bad, Tolerances{});
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.clause() == "2.1d");
  }
  Theorem5Config big;
  big.epsilon = 5.0;
  CHECK_THROWS_AS(theorem5_pipeline(shipped_bump(), phi_spec(), big, Tolerances{}), ValidationError);
}

TEST_CASE("constructed weight tends to the pure power as epsilon shrinks") {
  const BumpFunction k = shipped_bump();
  const Tolerances tol;
  for (double a : {0.3, 3.0}) {
    double last = 0.0;
    for (double eps : {0.1, 0.05, 0.025}) {
      const ProblemSpec s = phi_spec().with_weight(build_constructed_f(k, eps, phi_spec()));
      const Shot sh = shoot(s, a, tol);
      REQUIRE(sh.classification.label == Label::Crossing);
      CHECK(*sh.classification.crossing_radius > last);
      last = *sh.classification.crossing_radius;
    }
  }
}

TEST_CASE("small-alpha positivity check") {
  const Tolerances tol;
  const ProblemSpec quarter(3, -0.5, 0.0, 4.0, WeightFunction(ShiftedPower{1, 1, -0.25, -0.25}));
  const SmallAlphaReport q = theorem1_2_smallalpha_check(quarter, tol);
  CHECK(q.theorem == 1);
  REQUIRE(q.alpha0);
  CHECK(q.samples.size() >= 3);
  CHECK(q.all_noncrossing);
  CHECK(*q.r_alpha_at_alpha0 >= q.r_required);
  CHECK(q.r1 > 0.0);
  CHECK(q.k > 0.0);
  for (const auto& s : q.samples) CHECK(s.alpha <= *q.alpha0);

  const ProblemSpec nine(3, -1.5, 0.0, 2.0, WeightFunction(ShiftedPower{9.0 / 8.0, 1, -0.75, -1}));
  const SmallAlphaReport n = theorem1_2_smallalpha_check(nine, tol);
  CHECK(n.theorem == 0);
  CHECK_FALSE(n.alpha0);
  CHECK(n.all_crossing);
  CHECK(n.samples.size() == 4);

  const SmallAlphaReport pp = theorem1_2_smallalpha_check(phi_spec(), tol);
  CHECK(pp.theorem == 0);
  CHECK(pp.gate.find("(f3) fails") != std::string::npos);
}

TEST_CASE("structure CSV") {
  StructureReport r;
  Classification c;
  c.label = Label::Crossing;
  c.crossing_radius = 0.1;
  c.fitted_decay_exponent = std::nan("");
  r.grid.push_back(GridPoint{1.0 / 3.0, c});
  std::ostringstream os;
  write_structure_csv(r, os);
  CHECK(os.str() == "alpha,label,decay_exponent,crossing_radius\n0.33333333333333331,crossing,nan,0.10000000000000001\n");
}
