#include <gtest/gtest.h>

#include "support.hpp"

using namespace adelikit;

namespace {

const std::vector<std::string> XY{"x", "y"};
Poly P(const std::string& s) { return parse_poly(s, XY); }

}  // namespace

TEST(Groebner, Examples) {
  auto g1 = groebner_basis({P("x-y")}, 2);
  ASSERT_EQ(g1->gens.size(), 1u);
  EXPECT_EQ(g1->gens[0], P("x-y"));

  auto g2 = groebner_basis({P("y-x^2")}, 2);
  ASSERT_EQ(g2->gens.size(), 1u);
  EXPECT_EQ(g2->gens[0], P("x^2-y"));

  auto g3 = groebner_basis({P("x^2"), P("x*y")}, 2);
  ASSERT_EQ(g3->gens.size(), 2u);
  std::set<std::string> got;
  for (auto& g : g3->gens) got.insert(to_string(g, XY));
  EXPECT_EQ(got, (std::set<std::string>{to_string(P("x^2"), XY), to_string(P("x*y"), XY)}));
  EXPECT_TRUE(satisfies_buchberger_criterion(*g3));
}

TEST(Groebner, IntegerPrimitiveScaling) {
  auto gb = groebner_basis({P("3/2*x - 9/4*y")}, 2);
  ASSERT_EQ(gb->gens.size(), 1u);
  EXPECT_EQ(gb->gens[0], P("2*x-3*y"));
}

TEST(NormalForm, Examples) {
  auto gb = groebner_basis({P("x^2-y")}, 2);
  EXPECT_EQ(normal_form(P("x^2"), gb).rep, P("y"));
  EXPECT_EQ(normal_form(P("x+1"), gb).rep, P("x+1"));
  EXPECT_EQ(normal_form(P("x^3"), gb).rep, P("x*y"));
  EXPECT_TRUE(ideal_membership(P("x^2-y"), gb));
  EXPECT_FALSE(ideal_membership(P("x"), gb));
  EXPECT_TRUE(ideal_membership(P("x^3-x*y"), gb));
}

TEST(Groebner, PriorityPermutation) {
  MonomialOrder ord;
  ord.priority = {1, 0};  // y > x
  auto gb = groebner_basis({P("y-x^2")}, 2, ord);
  EXPECT_EQ(gb->gens[0].lead(ord).first, (Monomial{2, 0}));
  auto lin = groebner_basis({P("x-y")}, 2, ord);
  EXPECT_EQ(lin->gens[0].lead(ord).first, (Monomial{0, 1}));
}

TEST(Groebner, ArityMismatch) {
  EXPECT_THROW(groebner_basis({Poly::var(2, 0), Poly::var(3, 0)}, 2), DomainError);
}

// Lead monomials of a reduced basis divide no term of another generator.
TEST(GroebnerProperty, ReducedAndBuchberger) {
  testkit::Rng rng(201);
  for (int it = 0; it < 40; ++it) {
    size_t n = static_cast<size_t>(testkit::uniform(rng, 2, 3));
    std::vector<Poly> gens;
    for (int k = 0; k < 2; ++k) gens.push_back(testkit::random_poly(rng, n, 3, 3, 5, false));
    if (gens[0].is_zero() && gens[1].is_zero()) continue;
    std::vector<Poly> nz;
    for (auto& g : gens)
      if (!g.is_zero()) nz.push_back(g);
    auto gb = groebner_basis(nz, n);
    EXPECT_TRUE(satisfies_buchberger_criterion(*gb));
    auto lms = gb->lead_monomials();
    for (size_t i = 0; i < gb->gens.size(); ++i)
      for (auto& [m, c] : gb->gens[i].terms())
        for (size_t j = 0; j < lms.size(); ++j)
          if (j != i) EXPECT_FALSE(divides(lms[j], m));
    for (auto& g : nz) EXPECT_TRUE(ideal_membership(g, gb));
    for (auto& g : gb->gens) EXPECT_EQ(g.content(), 1);
  }
}

TEST(NormalFormProperty, SectionIdempotentDegree) {
  testkit::Rng rng(202);
  for (int it = 0; it < 60; ++it) {
    size_t n = static_cast<size_t>(testkit::uniform(rng, 2, 3));
    Poly g = testkit::random_poly(rng, n, 3, 3, 4, false);
    if (g.is_zero()) continue;
    auto gb = groebner_basis({g}, n);
    Poly f = testkit::random_poly(rng, n, 4, 5, 6, true, true);
    Poly h = testkit::random_poly(rng, n, 4, 5, 6, true, true);
    Poly nf = reduce_mod(f, *gb), nh = reduce_mod(h, *gb);
    EXPECT_EQ(reduce_mod(nf, *gb), nf);
    EXPECT_EQ(reduce_mod(f + h, *gb), reduce_mod(nf + nh, *gb));
    EXPECT_EQ(reduce_mod(f * h, *gb), reduce_mod(nf * nh, *gb));
    if (!nf.is_zero()) EXPECT_LE(nf.lead(gb->order).first.size() ? total_degree(nf.lead(gb->order).first) : 0,
                                 f.is_zero() ? 0u : total_degree(f.lead(gb->order).first));
    EXPECT_TRUE(ideal_membership(f - nf, gb));
  }
}

TEST(Parser, InfixForms) {
  EXPECT_EQ(P("(x+y)^2"), P("x^2+2*x*y+y^2"));
  EXPECT_EQ(P("-x*-y"), P("x*y"));
  EXPECT_EQ(P("x/2"), Poly::var(2, 0) * Rational(1, 2));
  EXPECT_THROW(P("x+"), DomainError);
  EXPECT_THROW(P("z"), DomainError);
}
