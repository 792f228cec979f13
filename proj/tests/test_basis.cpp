#include "dmpkit/basis.hpp"
#include "dmpkit/error.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <vector>

using namespace dmpkit;

namespace {

const std::vector<BasisFamily> kAllFamilies = {
    BasisFamily::gaussian(),    BasisFamily::truncated_gaussian(), BasisFamily::mollifier(),
    BasisFamily::wendland(2),   BasisFamily::wendland(3),          BasisFamily::wendland(4),
    BasisFamily::wendland(5),   BasisFamily::wendland(6),          BasisFamily::wendland(7),
    BasisFamily::wendland(8)};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

// single basis i placed at c with width w (neighbors far away)
BasisSet lone(BasisFamily family, double c, double w) {
  return BasisSet(family, {1.0, c}, {w, w}, 1.0, false);
}

}  // namespace

TEST_CASE("centers") {
  const auto c1 = make_centers(1, 4.0, 1.0);
  REQUIRE(c1.size() == 2);
  CHECK(c1[0] == 1.0);
  CHECK(c1[1] == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));

  const auto c9 = make_centers(9, 4.0, 1.0);
  CHECK(c9[0] == 1.0);
  CHECK(std::abs(c9[1] - 0.64118038842995462) < 1e-15);  // exp(-4/9)
  CHECK(c9.back() == doctest::Approx(std::exp(-4.0)));
  for (std::size_t i = 1; i < c9.size(); ++i) {
    CHECK(c9[i] < c9[i - 1]);
    // equispaced in time
    CHECK(-std::log(c9[i]) / 4.0 == doctest::Approx(static_cast<double>(i) / 9.0));
  }

  CHECK(make_centers(0, 4.0, 1.0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(make_centers(5, 0.0, 1.0), Error);
  CHECK_THROWS_AS(make_centers(5, 4.0, -1.0), Error);
}

TEST_CASE("width rules") {
  const std::vector<double> c{1.0, 0.5, 0.25};
  const auto a = make_widths(BasisFamily::mollifier(), c, 1.0);
  CHECK(a == std::vector<double>{2.0, 2.0, 4.0});
  const auto h = make_widths(BasisFamily::gaussian(), c, 1.0);
  CHECK(h == std::vector<double>{4.0, 16.0, 16.0});
  CHECK(make_widths(BasisFamily::truncated_gaussian(), c, 1.0) == h);
  CHECK(make_widths(BasisFamily::wendland(5), c, 1.0) == a);

  const auto centers = make_centers(17, 4.0, 1.0);
  const auto hg = make_widths(BasisFamily::gaussian(), centers, 1.0);
  CHECK(hg[16] == hg[17]);
  const auto ac = make_widths(BasisFamily::mollifier(), centers, 1.0);
  CHECK(ac[0] == ac[1]);

  CHECK_THROWS_AS(make_widths(BasisFamily::gaussian(), std::vector<double>{1.0, 0.5, 0.5}, 1.0),
                  Error);
}

TEST_CASE("point values") {
  const auto moll = lone(BasisFamily::mollifier(), 0.5, 2.0);
  CHECK(moll.eval(1, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(moll.eval(1, 0.0) == 0.0);
  CHECK(moll.eval(1, 1.0) == 0.0);
  CHECK(moll.eval(1, -3.0) == 0.0);

  const auto w4 = lone(BasisFamily::wendland(4), 0.5, 2.0);
  CHECK(w4.eval(1, 0.75) == doctest::Approx(0.1875).epsilon(1e-14));  // r = 0.5
  CHECK(w4.eval(1, 0.25) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(w4.eval(1, 0.5) == doctest::Approx(1.0));

  const auto g = lone(BasisFamily::gaussian(), 0.5, 8.0);
  CHECK(g.eval(1, 0.5) == 1.0);
  CHECK(g.eval(1, 0.75) == doctest::Approx(std::exp(-8.0 * 0.0625)));
  CHECK(g.eval(1, -100.0) >= 0.0);

  const auto tg = lone(BasisFamily::truncated_gaussian(), 0.5, 8.0);
  CHECK(tg.eval(1, 0.6) == doctest::Approx(std::exp(-4.0 * 0.01)));
}

TEST_CASE("every family is a valid name round trip") {
  for (const auto& f : kAllFamilies) CHECK(BasisFamily::parse(f.label()) == f);
  CHECK(kind_of([] { BasisFamily::parse("wendland_9"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { BasisFamily::parse("cosine"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("support intervals") {
  const auto inf = std::numeric_limits<double>::infinity();
  const auto g = BasisSet::make(BasisFamily::gaussian(), 10, 4.0, 1.0);
  for (int i = 0; i < g.size(); ++i) {
    CHECK(g.support(i).lower == -inf);
    CHECK(g.support(i).upper == inf);
  }

  const auto moll = lone(BasisFamily::mollifier(), 0.5, 2.0);
  CHECK(moll.support(1).lower == doctest::Approx(0.0));
  CHECK(moll.support(1).upper == doctest::Approx(1.0));

  // theta = kappa / sqrt(h) = 0.3
  const auto tg = lone(BasisFamily::truncated_gaussian(3.0), 0.5, 100.0);
  CHECK(tg.theta(1) == doctest::Approx(0.3));
  const auto sup = tg.support(1);
  CHECK(sup.lower == -inf);
  CHECK(sup.upper == doctest::Approx(0.8));
  CHECK(sup.upper_closed);

  CHECK(kind_of([&] { moll.eval(2, 0.5); }) == ErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { moll.support(-1); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("compact families vanish exactly outside their support") {
  for (const auto& f : kAllFamilies) {
    if (!f.compact()) continue;
    const auto set = BasisSet::make(f, 12, 4.0, 1.0);
    for (int i = 0; i < set.size(); ++i) {
      const auto sup = set.support(i);
      for (int k = 0; k <= 4000; ++k) {
        const double s = -0.2 + 1.4 * k / 4000.0;
        const double v = set.eval(i, s);
        CHECK(v >= 0.0);
        const bool inside = s > sup.lower && s < sup.upper;
        if (!inside) CHECK(v == 0.0);
        // the mollifier underflows right at the edge, so positivity is checked with a margin
        const double margin = 1e-3 * (sup.upper - sup.lower);
        if (s > sup.lower + margin && s < sup.upper - margin) CHECK(v > 0.0);
      }
    }
  }
}

TEST_CASE("mollifier flattens at the support edge") {
  const auto set = lone(BasisFamily::mollifier(), 0.5, 2.0);
  const double edge = set.support(1).upper;
  const double e = 1e-6;
  for (double dist : {1e-4, 5e-5, 2e-5}) {
    const double s = edge - dist;
    const double d1 = (set.eval(1, s + e) - set.eval(1, s - e)) / (2 * e);
    const double d2 = (set.eval(1, s + e) - 2 * set.eval(1, s) + set.eval(1, s - e)) / (e * e);
    CHECK(std::abs(d1) < 1e-3);
    CHECK(std::abs(d2) < 1e-3);
  }
}

TEST_CASE("truncated Gaussian jumps at its cutoff") {
  const auto set = BasisSet::make(BasisFamily::truncated_gaussian(), 10, 4.0, 1.0);
  for (int i = 1; i < set.size(); ++i) {
    const double c = set.centers()[i];
    const double theta = set.theta(i);
    if (c + theta >= 1.0) continue;
    const double h = set.widths()[i];
    const double jump = std::exp(-(h / 2) * theta * theta);
    CHECK(jump > 0.0);
    CHECK(set.eval(i, c + theta * (1 - 1e-12)) == doctest::Approx(jump));
    CHECK(set.eval(i, c + theta * (1 + 1e-9)) == 0.0);
  }
}

TEST_CASE("denominator stays positive on the phase range") {
  for (const auto& f : kAllFamilies) {
    for (int n : {5, 10, 33, 100, 200}) {
      const auto set = BasisSet::make(f, n, 4.0, 1.0);
      const double lo = std::exp(-4.0);
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 5000; ++k) worst = std::min(worst, set.denominator(lo + (1 - lo) * k / 5000.0));
      CHECK_MESSAGE(worst > 0.0, f.label() << " N=" << n);
    }
  }
}

TEST_CASE("forcing rows") {
  const BasisSet one(BasisFamily::gaussian(), {1.0}, {1.0}, 1.0, false);
  CHECK(one.forcing_row(0.3)(0) == doctest::Approx(0.3));
  const BasisSet one_b(BasisFamily::gaussian(), {1.0}, {1.0}, 1.0, true);
  const auto rb = one_b.forcing_row(0.3);
  REQUIRE(rb.size() == 2);
  CHECK(rb(0) == doctest::Approx(0.3));
  CHECK(rb(1) == doctest::Approx(1.0));

  // two compact bases at equal distance, everything else out of reach
  const BasisSet pair(BasisFamily::mollifier(), {1.0, 0.6, 0.2}, {4.0, 4.0, 4.0}, 1.0, false);
  REQUIRE(pair.eval(0, 0.4) == 0.0);
  REQUIRE(pair.eval(1, 0.4) == doctest::Approx(pair.eval(2, 0.4)));
  const auto r = pair.forcing_row(0.4);
  CHECK(r(0) == 0.0);
  CHECK(r(1) == doctest::Approx(0.2));
  CHECK(r(2) == doctest::Approx(0.2));

  for (const auto& f : kAllFamilies) {
    const auto set = BasisSet::make(f, 20, 4.0, 1.0);
    for (double s : {1.0, 0.8, 0.31, 0.05, std::exp(-4.0)}) {
      CHECK(set.forcing_row(s).sum() == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("uncovered phases are reported") {
  // a large overlap parameter shrinks the supports until they leave gaps
  const auto sparse = BasisSet::make(BasisFamily::mollifier(), 4, 4.0, 1.0, 5.0);
  bool hit = false;
  for (int k = 0; k <= 1000 && !hit; ++k) {
    const double s = std::exp(-4.0) + (1 - std::exp(-4.0)) * k / 1000.0;
    if (sparse.denominator(s) == 0.0) {
      CHECK(kind_of([&] { sparse.forcing_row(s); }) == ErrorKind::DegenerateCoverage);
      hit = true;
    }
  }
  CHECK(hit);
}

TEST_CASE("structural bandwidth") {
  CHECK(BasisSet::make(BasisFamily::gaussian(), 20, 4.0, 1.0).structural_bandwidth() == 20);
  const auto m = BasisSet::make(BasisFamily::mollifier(), 128, 4.0, 1.0);
  CHECK(m.structural_bandwidth() <= 3);
  CHECK(m.structural_bandwidth() >= 1);
}
