#include <semimeander/gram.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace semimeander;

namespace {

std::vector<Band> all_bands(int g) {
  std::vector<Band> out;
  for (unsigned mask = 0; mask < (1U << g); ++mask) {
    std::set<int> plus;
    for (int i = 0; i < g; ++i)
      if (mask & (1U << i)) plus.insert(i);
    out.emplace_back(g, plus);
  }
  return out;
}

LaurentPoly v(long e, long c = 1) { return LaurentPoly::monomial(c, e); }

// Gram example diagrams on ten positions.
const Band kPlus2(10, {2});
const Meander kEx1a(kPlus2, {{0, 8}, {1, 5}, {3, 4}, {6, 7}}, {9});
const Meander kEx1b(kPlus2, {{4, 7}, {1, 3}, {5, 6}, {8, 9}}, {0});
const Meander kEx2a(Band::full(10), {{1, 8}, {2, 5}, {3, 4}, {6, 7}}, {0, 9});
const Meander kEx2b(Band::full(10), {{1, 4}, {0, 5}, {2, 3}, {8, 9}}, {6, 7});
const Meander kEx3a(Band::full(10), {{9, 0}, {1, 2}, {4, 5}, {7, 8}, {3, 6}}, {});
const Meander kEx3b(Band::full(10), {{9, 0}, {1, 2}, {7, 8}, {6, 3}, {5, 4}}, {});

// Component structure by union-find, independent of the tracer.
struct Components {
  int loops = 0;
  bool degenerate = false;
};

Components oracle_components(const Meander& a, const Meander& b) {
  const int g = a.g();
  std::vector<int> parent(static_cast<std::size_t>(g));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  for (const auto* m : {&a, &b})
    for (const auto& arc : m->arcs()) parent[static_cast<std::size_t>(find(arc.left))] = find(arc.right);
  std::map<int, int> a_ends, b_ends;
  for (int s : a.semilines()) ++a_ends[find(s)];
  for (int s : b.semilines()) ++b_ends[find(s)];
  Components c;
  std::set<int> roots;
  for (int x : a.band().nodes()) roots.insert(find(x));
  for (int root : roots) {
    const int ea = a_ends.count(root) ? a_ends[root] : 0;
    const int eb = b_ends.count(root) ? b_ends[root] : 0;
    if (ea == 0 && eb == 0) ++c.loops;
    if (ea == 2 || eb == 2) c.degenerate = true;
  }
  return c;
}

}  // namespace

TEST(Trace, ExampleOne) {
  ASSERT_TRUE(kEx1a.validate());
  ASSERT_TRUE(kEx1b.validate());
  const auto t = glue_and_trace(kEx1a, kEx1b);
  EXPECT_FALSE(t.degenerate);
  EXPECT_EQ(t.m0, 1);
  EXPECT_EQ(t.mT, 0);
  ASSERT_EQ(t.paths.size(), 1U);
  EXPECT_EQ(t.paths[0].start, 9);
  EXPECT_EQ(t.paths[0].end, 0);
  EXPECT_EQ(t.mv(), -9);
}

TEST(Trace, ExampleTwoDegenerate) {
  ASSERT_TRUE(kEx2a.validate());
  ASSERT_TRUE(kEx2b.validate());
  EXPECT_TRUE(glue_and_trace(kEx2a, kEx2b).degenerate);
  EXPECT_TRUE(gram_product(kEx2a, kEx2b).is_zero());
}

TEST(Trace, ExampleThree) {
  ASSERT_TRUE(kEx3a.validate());
  ASSERT_TRUE(kEx3b.validate());
  const auto t = glue_and_trace(kEx3a, kEx3b);
  EXPECT_EQ(t.m0, 3);
  EXPECT_EQ(t.mT, 2);
}

TEST(Trace, TwoNodeWrap) {
  const Meander a(Band::full(2), {{0, 1}}, {}), b(Band::full(2), {{1, 0}}, {});
  const auto t = glue_and_trace(a, b);
  EXPECT_EQ(t.m0, 0);
  EXPECT_EQ(t.mT, 1);
  ASSERT_EQ(t.loop_windings.size(), 1U);
  EXPECT_EQ(std::abs(t.loop_windings[0]), 1);
}

TEST(Trace, SelfGluing) {
  for (int g = 1; g <= 8; ++g)
    for (const auto& band : all_bands(g))
      for (int r = 0; 2 * r <= band.d(); ++r)
        for (const auto& a : enumerate(band, r)) {
          const auto t = glue_and_trace(a, a);
          EXPECT_EQ(t.m0, r);
          EXPECT_EQ(t.mT, 0);
          EXPECT_FALSE(t.degenerate);
          for (const auto& p : t.paths) EXPECT_EQ(p.disp, 0);
        }
}

TEST(Trace, MatchesUnionFindOracle) {
  for (int g = 1; g <= 7; ++g)
    for (const auto& band : all_bands(g))
      for (int r = 0; 2 * r <= band.d(); ++r) {
        const auto ms = enumerate(band, r);
        for (const auto& a : ms)
          for (const auto& b : ms) {
            const auto t = glue_and_trace(a, b);
            const auto c = oracle_components(a, b);
            EXPECT_EQ(t.m0 + t.mT, c.loops);
            EXPECT_EQ(t.degenerate, c.degenerate);
            if (2 * r < band.d() && !t.degenerate) {
              EXPECT_EQ(t.mT, 0);
            }
          }
      }
}

TEST(Trace, Mismatch) {
  EXPECT_THROW(glue_and_trace(kEx1a, kEx2a), std::invalid_argument);
  EXPECT_THROW(glue_and_trace(Meander::all_semilines(Band::full(4)), Meander(Band::full(4), {{0, 1}}, {2, 3})),
               std::invalid_argument);
}

TEST(Reduction, SelfIsIdentity) {
  const auto ms = enumerate(Band(7, {1, 4}), 1);
  for (const auto& a : ms) {
    const Link l = reduction_link(a, a, glue_and_trace(a, a));
    EXPECT_EQ(l, Link::identity(semiline_band(a)));
    EXPECT_EQ(l.total_displacement(), 0);
  }
}

TEST(Reduction, ThreeNodes) {
  const Meander a(Band::full(3), {{0, 1}}, {2}), b(Band::full(3), {{1, 2}}, {0});
  const Link l = reduction_link(a, b, glue_and_trace(a, b));
  ASSERT_EQ(l.curves().size(), 1U);
  EXPECT_EQ(l.curves()[0], (Curve{2, -2}));
  EXPECT_EQ(l.image(2), 0);
  EXPECT_EQ(l.total_displacement(), -2);
}

TEST(Reduction, ExampleOne) {
  const Link l = reduction_link(kEx1a, kEx1b, glue_and_trace(kEx1a, kEx1b));
  EXPECT_EQ(l.total_displacement(), -9);
  EXPECT_EQ(l.source(), semiline_band(kEx1a));
  EXPECT_EQ(l.target(), semiline_band(kEx1b));
}

TEST(Reduction, Rejections) {
  EXPECT_THROW(reduction_link(kEx2a, kEx2b, glue_and_trace(kEx2a, kEx2b)), std::invalid_argument);
  EXPECT_THROW(reduction_link(kEx3a, kEx3b, glue_and_trace(kEx3a, kEx3b)), std::invalid_argument);
  EXPECT_TRUE(reduction_is_trivial(kEx3a));
}

TEST(GramProduct, WorkedExamples) {
  const GramValue one = gram_product(kEx1a, kEx1b);
  EXPECT_EQ(std::get<LaurentPoly>(one.to_ring()), v(-9, -2));
  EXPECT_EQ(one.to_string(), "(-2)^1*v^-9");
  EXPECT_TRUE(gram_product(kEx2a, kEx2b).is_zero());
  EXPECT_EQ(gram_product(kEx2a, kEx2b).to_string(), "0");
  const GramValue three = gram_product(kEx3a, kEx3b);
  EXPECT_EQ(std::get<TPoly>(three.to_ring()), TPoly::monomial(-8, 2));
}

TEST(GramMatrix, TwoNodes) {
  const auto gm = gram_matrix(Band::full(2), 1);
  ASSERT_EQ(gm.size(), 2U);
  const Matrix<GramValue> want{{{GramValue::Kind::T, 1, 0}, {GramValue::Kind::T, 0, 1}},
                               {{GramValue::Kind::T, 0, 1}, {GramValue::Kind::T, 1, 0}}};
  EXPECT_EQ(gm.entries, want);
}

TEST(GramMatrix, ThreeNodesCirculant) {
  const auto gm = gram_matrix(Band::full(3), 1);
  ASSERT_EQ(gm.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& e = gm.entries[i][j];
      ASSERT_EQ(e.kind, GramValue::Kind::V);
      if (i == j) {
        EXPECT_EQ(e.m0, 1);
        EXPECT_EQ(e.exponent, 0);
      } else {
        EXPECT_EQ(e.m0, 0);
        EXPECT_EQ(std::abs(e.exponent), 2);
        EXPECT_EQ(e.exponent, -gm.entries[j][i].exponent);
      }
    }
}

TEST(GramMatrix, ParallelAssemblyIsDeterministic) {
  const Band b(8, {3});
  EXPECT_EQ(gram_matrix(b, 3, 1).entries, gram_matrix(b, 3, 4).entries);
}

TEST(GramMatrix, CsvEntries) {
  const auto csv = to_csv(gram_matrix(Band::full(2), 1));
  EXPECT_EQ(csv, "(-2)^1*T^0,(-2)^0*T^1\r\n(-2)^0*T^1,(-2)^1*T^0\r\n");
}

TEST(Determinant, SmallClosedForms) {
  EXPECT_EQ(std::get<TPoly>(gram_determinant(Band::full(2), 1)), TPoly(4L) - TPoly::monomial(1, 2));
  EXPECT_EQ(std::get<LaurentPoly>(gram_determinant(Band::full(3), 1)), v(6) - LaurentPoly(2L) + v(-6));
  for (int g = 1; g <= 4; ++g) {
    const Band b(g, [g] {
      std::set<int> p;
      for (int i = 1; i < g; ++i) p.insert(i);
      return p;
    }());
    EXPECT_EQ(std::get<LaurentPoly>(gram_determinant(b, 0)), LaurentPoly(1L));
  }
}

TEST(Determinant, ScaledRouteMatchesRawMatrix) {
  for (int g = 2; g <= 7; ++g)
    for (const auto& band : all_bands(g)) {
      if (band.d() < 1) continue;
      for (int r = 0; 2 * r <= band.d(); ++r) {
        const auto gm = gram_matrix(band, r);
        if (gm.size() > 20) continue;
        Matrix<LaurentPoly> raw(gm.size(), std::vector<LaurentPoly>(gm.size()));
        for (std::size_t i = 0; i < gm.size(); ++i)
          for (std::size_t j = 0; j < gm.size(); ++j)
            if (!gm.entries[i][j].is_zero())
              raw[i][j] = LaurentPoly::monomial(gm.entries[i][j].coefficient(), gm.entries[i][j].exponent);
        const LaurentPoly direct = det_fraction_free(raw);
        const RingElement scaled = gram_determinant(gm);
        const RingElement modular = gram_determinant(gm, 0);
        if (gm.t_case()) {
          EXPECT_EQ(std::get<TPoly>(scaled), TPoly::from_laurent(direct));
        } else {
          EXPECT_EQ(std::get<LaurentPoly>(scaled), direct);
        }
        EXPECT_EQ(modular, scaled);
      }
    }
}

TEST(TCoefficient, Values) {
  EXPECT_EQ(t_coefficient(7, 0), 0);
  EXPECT_EQ(t_coefficient(2, 1), 1);
  EXPECT_EQ(t_coefficient(10, 5), 386);
  for (int d = 0; d <= 14; ++d)
    for (int r = 0; 2 * r <= d; ++r) {
      long sum = 0;
      for (int i = 0; i < r; ++i) sum += binomial(static_cast<unsigned long>(d), static_cast<unsigned long>(i)).get_si();
      EXPECT_EQ(t_coefficient(d, r), sum);
    }
  EXPECT_THROW(t_coefficient(3, 2), std::invalid_argument);
}

TEST(ClosedForm, AllBandsUpToEight) {
  for (int g = 1; g <= 8; ++g)
    for (const auto& band : all_bands(g)) {
      if (band.d() < 1) continue;
      for (int r = 0; 2 * r <= band.d(); ++r) {
        const auto rep = verify_closed_form(band, r);
        EXPECT_TRUE(rep.pass) << "g=" << g << " plus=" << band.to_string() << " r=" << r;
      }
    }
}

TEST(ClosedForm, SignAndExponents) {
  const auto two = verify_closed_form(Band::full(2), 1);
  EXPECT_EQ(two.sign, -1);
  EXPECT_EQ(two.form, "(T^2 - 4)^1");
  const auto three = verify_closed_form(Band::full(3), 1);
  EXPECT_EQ(three.sign, 1);
  EXPECT_EQ(three.form, "(v^3 - v^-3)^2");
  const auto seven = verify_closed_form(Band(7, {1, 4}), 2);
  EXPECT_TRUE(seven.exponents_multiple_of_g);
  EXPECT_TRUE(seven.pass);
  const auto j = to_json(seven);
  EXPECT_EQ(j.at("t"), "6");
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST(ClosedForm, WrongDeterminantFails) {
  const auto rep = verify_closed_form(Band::full(3), 1, RingElement(v(6) + v(-6)));
  EXPECT_EQ(rep.sign, 0);
  EXPECT_FALSE(rep.pass);
  const auto off = verify_closed_form(Band::full(3), 1, RingElement(v(6) - LaurentPoly(2L) + v(-6) + v(1) - v(1)));
  EXPECT_TRUE(off.pass);
}

// Diagonal, hermitian symmetry, zero pattern, loop windings, cycle sums.
TEST(GramProperties, ExhaustiveUpToEight) {
  std::mt19937 rng(23);
  for (int g = 1; g <= 8; ++g)
    for (const auto& band : all_bands(g)) {
      if (band.d() < 1) continue;
      for (int r = 0; 2 * r <= band.d(); ++r) {
        const auto ms = enumerate(band, r);
        const std::size_t n = ms.size();
        Matrix<GramValue> e(n, std::vector<GramValue>(n));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const auto t = glue_and_trace(ms[i], ms[j]);
            for (long w : t.loop_windings) ASSERT_LE(std::abs(w), 1);
            e[i][j] = gram_product(ms[i], ms[j], t);
          }
        for (std::size_t i = 0; i < n; ++i) {
          ASSERT_FALSE(e[i][i].is_zero());
          EXPECT_EQ(e[i][i].m0, r);
          EXPECT_EQ(e[i][i].exponent, 0);
          for (std::size_t j = 0; j < n; ++j) {
            EXPECT_EQ(e[i][j].is_zero(), e[j][i].is_zero());
            if (e[i][j].is_zero()) continue;
            EXPECT_EQ(e[i][j].m0, e[j][i].m0);
            if (2 * r < band.d()) {
              EXPECT_EQ(e[i][j].exponent, -e[j][i].exponent);
            } else {
              EXPECT_EQ(e[i][j].exponent, e[j][i].exponent);
            }
          }
        }
        if (2 * r == band.d() || n < 2) continue;
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::uniform_int_distribution<int> len(2, 6);
        for (int sample = 0; sample < 200; ++sample) {
          std::vector<std::size_t> cyc(static_cast<std::size_t>(len(rng)));
          for (auto& c : cyc) c = pick(rng);
          long sum = 0;
          bool nonzero = true;
          for (std::size_t k = 0; k < cyc.size(); ++k) {
            const auto& x = e[cyc[k]][cyc[(k + 1) % cyc.size()]];
            if (x.is_zero()) nonzero = false;
            sum += x.exponent;
          }
          if (nonzero) {
            EXPECT_EQ(mod(sum, g), 0);
          }
        }
      }
    }
}
