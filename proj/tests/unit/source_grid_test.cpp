#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mkt/grid.hpp"
#include "mkt/source_field.hpp"

using namespace mkt;

TEST_CASE("primitive regions") {
  const Region d = Region::disk(Vec2(1, 0), 0.5);
  CHECK(d.contains(Vec2(1.5, 0)));
  CHECK_FALSE(d.contains(Vec2(1.51, 0)));
  CHECK(d.distance(Vec2(2, 0)) == doctest::Approx(0.5));

  const Region hp = Region::half_plane(Vec2(1, 0), 0.25);
  CHECK(hp.contains(Vec2(0.25, 7)));
  CHECK_FALSE(hp.contains(Vec2(0.26, 0)));
  CHECK(hp.distance(Vec2(1.25, 3)) == doctest::Approx(1.0));

  const Region box = Region::box(Vec2(-1, -1), Vec2(1, 2));
  CHECK(box.contains(Vec2(1, 2)));
  CHECK(box.distance(Vec2(4, 6)) == doctest::Approx(5.0));

  const Region tri = Region::polygon({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  CHECK(tri.contains(Vec2(0.2, 0.2)));
  CHECK_FALSE(tri.contains(Vec2(0.6, 0.6)));
  CHECK(tri.distance(Vec2(-1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("sectors, annuli and spirals") {
  const Region quarter = Region::sector(Vec2::Zero(), 0.0, std::numbers::pi / 2, 0.5, 1.0);
  CHECK(quarter.contains(Vec2(0.5, 0.5)));
  CHECK_FALSE(quarter.contains(Vec2(-0.5, 0.5)));
  CHECK_FALSE(quarter.contains(Vec2(0.2, 0.2)));

  const Region annulus = Region::sector(Vec2::Zero(), 0.0, kTwoPi, 1.0, 2.0);
  for (double a : {0.1, 2.0, 4.0, 6.2}) {
    CHECK(annulus.contains(1.5 * unit_direction(a)));
    CHECK_FALSE(annulus.contains(0.9 * unit_direction(a)));
  }
  CHECK(annulus.distance(Vec2::Zero()) == doctest::Approx(1.0).epsilon(1e-6));

  // r >= 1 + theta, theta in [0, 2 pi).
  const Region spiral = Region::spiral(Vec2::Zero(), 1.0, 1.0, 8.0);
  CHECK(spiral.contains(3.5 * unit_direction(2.0)));
  CHECK_FALSE(spiral.contains(2.5 * unit_direction(2.0)));
  CHECK(spiral.contains(7.5 * unit_direction(6.0)));
  CHECK_FALSE(spiral.contains(6.5 * unit_direction(6.0)));
}

TEST_CASE("ray crossings") {
  const Region d = Region::disk(Vec2::Zero(), 1.0);
  const auto c = d.crossings(Vec2(-3, 0), Vec2(1, 0), 0.0, 6.0);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(c[1] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(d.crossings(Vec2(-3, 2), Vec2(1, 0), 0.0, 6.0).empty());
}

TEST_CASE("source fields") {
  const DomainBoundary b = DomainBoundary::circle(2.0);
  const SourceField one = SourceField::constant(1.0, Region::domain(b));
  CHECK(one(Vec2(0.3, 1.2)) == 1.0);
  CHECK(one.sup_norm(b) == 1.0);
  CHECK(one.in_support(Vec2(1.9, 0)));

  const SourceField z = SourceField::zero();
  CHECK(z.is_zero());
  CHECK(z(Vec2(1, 1)) == 0.0);
  CHECK(z.sup_norm(b) == 0.0);

  const SourceField pw = SourceField::piecewise({{2.0, Region::disk(Vec2::Zero(), 1.0)}, {0.5, Region::half_plane(Vec2(1, 0), -1.5)}});
  CHECK(pw(Vec2::Zero()) == 2.0);
  CHECK(pw(Vec2(-1.8, 0)) == 0.5);
  CHECK(pw(Vec2(1.5, 0)) == 0.0);
  CHECK(pw.sup_norm(b) == 2.0);
  CHECK(pw.support_distance(Vec2(1.5, 0)) == doctest::Approx(0.5));
  CHECK(pw.scaled(2.0)(Vec2::Zero()) == 4.0);
  CHECK(pw.plus(one)(Vec2::Zero()) == 3.0);
  CHECK_THROWS(SourceField::constant(-1.0, Region::domain(b)));
}

TEST_CASE("grids") {
  const DomainBoundary b = DomainBoundary::circle(1.0);
  const Grid g = Grid::with_count(b, 128);
  CHECK(g.nx() == 128);
  CHECK(g.ny() == 128);
  CHECK(g.size() == 16384u);
  CHECK(g.spacing() == doctest::Approx(1.0 / 64));
  CHECK((g.node(0) - Vec2(-1 + 0.5 / 64, -1 + 0.5 / 64)).norm() <= 1e-12);

  // Active nodes approximate the disk area.
  CHECK(g.active_count() * g.spacing() * g.spacing() == doctest::Approx(std::numbers::pi).epsilon(2e-2));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.active(k) == b.contains(g.node(k)));

  const Grid padded = Grid::with_spacing(b, 1.0 / 64, 1);
  CHECK(padded.nx() == 130);

  const GridFunction lin = GridFunction::sample(g, [](const Vec2& x) { return 2 * x.x() - 3 * x.y(); });
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) {
      CHECK(lin.values[k] == 0.0);
      continue;
    }
    if (g.mask(k) != NodeMask::Inside) continue;
    CHECK((grid_gradient(lin, k) - Vec2(2, -3)).norm() <= 1e-9);
  }
}
