#include <semimeander/band.hpp>
#include <semimeander/gram.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace semimeander;

namespace {

Band random_band(std::mt19937& rng, int g, int d) {
  std::vector<int> pos(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) pos[static_cast<std::size_t>(i)] = i;
  std::shuffle(pos.begin(), pos.end(), rng);
  return Band(g, std::set<int>(pos.begin() + d, pos.end()));
}

Link random_link(std::mt19937& rng, const Band& a, const Band& b) {
  std::uniform_int_distribution<long> k(-3L * a.d(), 3L * a.d());
  return Link::rotation(a, b, k(rng));
}

}  // namespace

TEST(BandBasics, NodesAndPluses) {
  const Band b(7, {1, 4, 8});
  EXPECT_EQ(b.d(), 5);  // 8 reduces to 1
  EXPECT_EQ(b.nodes(), (std::vector<int>{0, 2, 3, 5, 6}));
  EXPECT_TRUE(b.is_plus(8));
  EXPECT_THROW(Band(0, {}), std::invalid_argument);
}

TEST(BandBasics, PositionsReducedModG) {
  EXPECT_EQ(Band(5, {6, -1}).plus(), (std::set<int>{1, 4}));
}

TEST(LinkDisplacement, IdentityIsZero) {
  for (int g = 1; g <= 6; ++g) EXPECT_EQ(Link::identity(Band(g, {0})).total_displacement(), 0);
}

TEST(LinkDisplacement, FrobeniusIsD) {
  const Band b(7, {1, 4});
  const Link s = Link::frobenius(b);
  EXPECT_EQ(s.total_displacement(), b.d());
  EXPECT_EQ(s.target(), Band(7, {2, 5}));
  EXPECT_EQ(s.inverse().total_displacement(), -b.d());
}

TEST(LinkDisplacement, FundamentalIsG) {
  for (int g = 1; g <= 7; ++g)
    for (unsigned mask = 0; mask + 1 < (1U << g); ++mask) {
      std::set<int> plus;
      for (int i = 0; i < g; ++i)
        if (mask & (1U << i)) plus.insert(i);
      EXPECT_EQ(Link::fundamental(Band(g, plus)).total_displacement(), g);
    }
}

TEST(FundamentalLink, WithPluses) {
  const Link eta = Link::fundamental(Band(4, {1, 3}));
  ASSERT_EQ(eta.curves().size(), 2U);
  EXPECT_EQ(eta.curves()[0], (Curve{0, 2}));
  EXPECT_EQ(eta.curves()[1], (Curve{2, 2}));
  EXPECT_EQ(eta.total_displacement(), 4);
}

TEST(FundamentalLink, FullBandIsCyclicShift) {
  const Link eta = Link::fundamental(Band::full(3));
  for (const auto& c : eta.curves()) EXPECT_EQ(c.disp, 1);
  EXPECT_EQ(eta.total_displacement(), 3);
}

TEST(FundamentalLink, SingleNodeWindsOnce) {
  const Link eta = Link::fundamental(Band(5, {0, 1, 2, 4}));
  EXPECT_EQ(eta.curves()[0], (Curve{3, 5}));
}

TEST(FundamentalLink, NoNodesRejected) { EXPECT_THROW(Link::fundamental(Band(3, {0, 1, 2})), std::invalid_argument); }

TEST(FundamentalLink, SelfCompositionOnTwoNodes) {
  const Band b = Band::full(2);
  const Link eta = Link::fundamental(b);
  const Link sq = eta.compose(eta);
  EXPECT_EQ(sq.total_displacement(), 4);
  EXPECT_EQ(sq, Link::frobenius(b).compose(Link::frobenius(b)));
}

TEST(FundamentalLink, PowerTwoD) {
  for (int g = 2; g <= 6; ++g) {
    const Band b(g, {0});
    const int d = b.d();
    const Link eta = Link::fundamental(b);
    Link acc = Link::identity(b);
    for (int i = 0; i < 2 * d; ++i) acc = acc.compose(eta);
    EXPECT_EQ(acc.total_displacement(), 2L * d * g);
    // Every curve travels twice around the band.
    for (const auto& c : acc.curves()) EXPECT_EQ(c.disp, 2L * g);
    EXPECT_EQ(acc, eta.power(2 * d));
  }
}

TEST(LinkAlgebra, IdentityLaws) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int g = 2 + trial % 6, d = 1 + trial % g;
    const Band a = random_band(rng, g, d), b = random_band(rng, g, d);
    const Link l = random_link(rng, a, b);
    EXPECT_EQ(l.compose(Link::identity(b)), l);
    EXPECT_EQ(Link::identity(a).compose(l), l);
    EXPECT_EQ(l.inverse().inverse(), l);
    EXPECT_EQ(l.compose(l.inverse()), Link::identity(a));
  }
  EXPECT_EQ(Link::identity(Band(4, {2})).inverse(), Link::identity(Band(4, {2})));
}

TEST(LinkAlgebra, AssociativeAndAdditive) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int g = 2 + trial % 7, d = 1 + trial % g;
    const Band a = random_band(rng, g, d), b = random_band(rng, g, d), c = random_band(rng, g, d),
               e = random_band(rng, g, d);
    const Link x = random_link(rng, a, b), y = random_link(rng, b, c), z = random_link(rng, c, e);
    EXPECT_EQ(x.compose(y).compose(z), x.compose(y.compose(z)));
    EXPECT_EQ(x.compose(y).total_displacement(), x.total_displacement() + y.total_displacement());
    EXPECT_EQ(x.inverse().total_displacement(), -x.total_displacement());
  }
}

TEST(LinkAlgebra, BandMismatchRejected) {
  const Band a(4, {0}), b(4, {1}), c(4, {2});
  EXPECT_THROW(Link::identity(a).compose(Link::identity(b)), std::invalid_argument);
  EXPECT_THROW(Link::rotation(a, Band(4, {0, 1}), 0), std::invalid_argument);
  EXPECT_NO_THROW(Link::rotation(a, b, 1).compose(Link::rotation(b, c, 0)));
}

TEST(LinkValidity, CrossingRejected) {
  const Band b = Band::full(3);
  // 0 -> 1 and 1 -> 0 without winding cross each other.
  EXPECT_THROW(Link(b, b, {{0, 1}, {1, -1}, {2, 0}}), std::invalid_argument);
  // Displacement inconsistent with a bijection.
  EXPECT_THROW(Link(b, b, {{0, 1}, {1, 0}, {2, 0}}), std::invalid_argument);
  // Lands on a plus position.
  EXPECT_THROW(Link(Band(3, {1}), Band(3, {1}), {{0, 1}, {2, 0}}), std::invalid_argument);
  EXPECT_NO_THROW(Link(b, b, {{0, 1}, {1, 1}, {2, 1}}));
  // Winding difference of a full turn between neighbours crosses.
  EXPECT_THROW(Link(b, b, {{0, 3}, {1, 0}, {2, 0}}), std::invalid_argument);
}

TEST(LinkValidity, EveryNonCrossingLinkIsARotation) {
  // Brute force: all displacement vectors in a window that form valid links.
  const Band a(4, {1}), b(4, {3});
  int found = 0;
  for (long x = -6; x <= 6; ++x)
    for (long y = -6; y <= 6; ++y)
      for (long z = -6; z <= 6; ++z) {
        try {
          const Link l(a, b, {{0, x}, {2, y}, {3, z}});
          ++found;
          bool match = false;
          for (long k = -9; k <= 9; ++k) match = match || Link::rotation(a, b, k) == l;
          EXPECT_TRUE(match);
        } catch (const std::invalid_argument&) {
        }
      }
  EXPECT_GT(found, 3);
}

TEST(LinkJson, RoundTrip) {
  const Link l = Link::rotation(Band(7, {1, 4}), Band(7, {0, 3}), 4);
  EXPECT_EQ(link_from_json(to_json(l)), l);
  EXPECT_EQ(to_json(Band(7, {1, 4})).dump(), R"({"g":7,"plus":[1,4]})");
  EXPECT_EQ(band_from_json(nlohmann::json::parse(R"({"g":7,"plus":[1,4]})")), Band(7, {1, 4}));
}

// Self-links obtained by composing reduction links around a cycle of
// meanders are integer powers of the fundamental link.
TEST(SelfLinks, ArePowersOfFundamental) {
  int checked = 0;
  for (int g = 1; g <= 6; ++g)
    for (unsigned mask = 0; mask < (1U << g); ++mask) {
      std::set<int> plus;
      for (int i = 0; i < g; ++i)
        if (mask & (1U << i)) plus.insert(i);
      const Band band(g, plus);
      for (int r = 0; 2 * r < band.d(); ++r) {
        if (band.d() - 2 * r > 4) continue;
        const auto ms = enumerate(band, r);
        for (const auto& a : ms)
          for (const auto& b : ms) {
            const auto tab = glue_and_trace(a, b), tba = glue_and_trace(b, a);
            if (tab.degenerate || tba.degenerate) continue;
            const Link self = reduction_link(a, b, tab).compose(reduction_link(b, a, tba));
            const Link eta = Link::fundamental(self.source());
            const long v = self.total_displacement();
            ASSERT_EQ(v % g, 0);
            EXPECT_EQ(self, eta.power(v / g));
            ++checked;
          }
      }
    }
  EXPECT_GT(checked, 1000);
}
