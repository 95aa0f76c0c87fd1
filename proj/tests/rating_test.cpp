#include <cmath>

#include <gtest/gtest.h>

#include "support/glicko_oracle.hpp"
#include "tcg/rating.hpp"

namespace tcg {
namespace {

using testing::Oracle;
using testing::oracle_update;

Rating R(double mu, double phi, double sigma = 0.06) {
    Rating r;
    r.mu = mu;
    r.phi = phi;
    r.sigma = sigma;
    return r;
}

TEST(ExpectedScore, LargeGapAgainstCertainOpponent) {
    EXPECT_NEAR(expected_score(R(2117, 0), R(1500, 0)), 0.972, 0.001);
}

TEST(ExpectedScore, EqualRatingsAreEven) {
    EXPECT_DOUBLE_EQ(expected_score(R(1500, 80), R(1500, 200)), 0.5);
}

TEST(ExpectedScore, UncertaintyPullsTowardsHalf) {
    const double sure = expected_score(R(1700, 50), R(1500, 0));
    const double unsure = expected_score(R(1700, 50), R(1500, 350));
    EXPECT_GT(unsure, 0.5);
    EXPECT_LT(unsure, sure);
}

TEST(ExpectedScore, Complementary) {
    const Rating a = R(1620, 90), b = R(1480, 90);
    EXPECT_NEAR(expected_score(a, b) + expected_score(b, a), 1.0, 1e-12);
}

TEST(Glicko2, G) {
    EXPECT_DOUBLE_EQ(glicko_g(0), 1.0);
    EXPECT_NEAR(glicko_g(30 / kGlickoScale), 0.9955, 1e-4);
    EXPECT_NEAR(glicko_g(300 / kGlickoScale), 0.7242, 1e-4);
}

TEST(Glicko2, WorkedExample) {
    const Rating p = R(1500, 200);
    const std::vector<RatedGame> games{{R(1400, 30), 1}, {R(1550, 100), 0}, {R(1700, 300), 0}};
    const Rating out = update_period(p, games, 0.5);
    EXPECT_NEAR(out.mu, 1464.05, 0.05);
    EXPECT_NEAR(out.phi, 151.52, 0.05);
    EXPECT_NEAR(out.sigma, 0.05999, 1e-5);
    EXPECT_EQ(out.games, 3);

    const Oracle o = oracle_update({1500, 200, 0.06}, {{1400, 30, 1}, {1550, 100, 0}, {1700, 300, 0}}, 0.5);
    EXPECT_NEAR(out.mu, o.mu, 1e-4);
    EXPECT_NEAR(out.phi, o.phi, 1e-4);
    EXPECT_NEAR(out.sigma, o.sigma, 1e-7);
}

TEST(Glicko2, AgreesWithOracleAcrossInputs) {
    // Includes upsets large enough to take the log(delta^2 - phi^2 - v) branch.
    const std::vector<std::pair<Rating, std::vector<RatedGame>>> cases{
        {R(1500, 350), {{R(1500, 350), 1}}},
        {R(1200, 40, 0.03), {{R(2200, 40), 1}, {R(2100, 40), 1}, {R(2300, 40), 1}}},
        {R(1900, 80, 0.09), {{R(1300, 60), 0}, {R(1400, 60), 0.5}}},
        {R(1500, 120), std::vector<RatedGame>(20, RatedGame{R(1500, 120), 0.5})},
    };
    for (const auto& [p, games] : cases) {
        std::vector<std::tuple<double, double, double>> og;
        for (const auto& g : games) og.emplace_back(g.opponent.mu, g.opponent.phi, g.score);
        for (double tau : {0.3, 0.5, 1.2}) {
            const Rating out = update_period(p, games, tau);
            const Oracle o = oracle_update({p.mu, p.phi, p.sigma}, og, tau);
            EXPECT_NEAR(out.mu, o.mu, 1e-4) << p.mu << " tau " << tau;
            EXPECT_NEAR(out.phi, o.phi, 1e-4);
            EXPECT_NEAR(out.sigma, o.sigma, 1e-7);
        }
    }
}

TEST(Glicko2, EmptyPeriodOnlyInflatesPhi) {
    const Rating p = R(1600, 100);
    const Rating out = update_period(p, {});
    EXPECT_EQ(out.mu, p.mu);
    EXPECT_EQ(out.sigma, p.sigma);
    EXPECT_NEAR(out.phi, std::sqrt(100.0 * 100 + std::pow(0.06 * kGlickoScale, 2)), 1e-9);
}

TEST(Glicko2, WinRaisesLossLowersPhiShrinks) {
    const Rating p = R(1500, 200);
    const Rating win = update_period(p, {{R(1500, 200), 1}});
    const Rating loss = update_period(p, {{R(1500, 200), 0}});
    const Rating draw = update_period(p, {{R(1500, 200), 0.5}});
    EXPECT_GT(win.mu, p.mu);
    EXPECT_LT(loss.mu, p.mu);
    EXPECT_NEAR(draw.mu, p.mu, 1e-9);
    EXPECT_NEAR(win.mu - p.mu, p.mu - loss.mu, 1e-9);
    EXPECT_LT(win.phi, p.phi);
}

TEST(Glicko2, FrozenIsUnchanged) {
    Rating p = R(1500, 200);
    p.frozen = true;
    EXPECT_EQ(update_period(p, {{R(1800, 50), 1}}), p);
    EXPECT_EQ(update_period(p, {}), p);
}

TEST(Glicko2, NonFiniteInputsDoNotConverge) {
    EXPECT_THROW(update_period(R(1500, 200, std::nan("")), {{R(1500, 200), 1}}), std::runtime_error);
}

TEST(RatingTable, PeriodUsesPrePeriodRatings) {
    RatingTable t;
    t.add("a");
    t.add("b");
    t.add("idle");
    Rating anchor = R(1500, 200);
    anchor.frozen = true;
    t.add("anchor", anchor);
    t.apply_period({{"a", "b", 1}, {"a", "anchor", 0}});
    // Each side computed independently from the starting ratings.
    const Rating a = update_period(Rating{}, {{Rating{}, 1}, {anchor, 0}});
    const Rating b = update_period(Rating{}, {{Rating{}, 0}});
    EXPECT_EQ(t.at("a"), a);
    EXPECT_EQ(t.at("b"), b);
    EXPECT_EQ(t.at("anchor"), anchor);
    EXPECT_EQ(t.at("idle"), update_period(Rating{}, {}));
    EXPECT_NEAR(t.at("a").mu - 1500, 1500 - t.at("b").mu, 200);  // roughly symmetric
}

TEST(RatingTable, InsertionOrderAndJson) {
    RatingTable t;
    t.add("z");
    t.add("a", R(1700, 50));
    ASSERT_EQ(t.entries().size(), 2u);
    EXPECT_EQ(t.entries()[0].id, "z");
    EXPECT_TRUE(t.contains("a"));
    EXPECT_FALSE(t.contains("q"));
    const RatingTable back = RatingTable::from_json(t.to_json());
    EXPECT_EQ(back.to_json().dump(), t.to_json().dump());
    EXPECT_EQ(rating_from_json(rating_to_json(R(1234.5, 67.8, 0.07))), R(1234.5, 67.8, 0.07));
    EXPECT_ANY_THROW(t.at("missing"));
    EXPECT_ANY_THROW(t.apply_period({{"z", "nobody", 1}}));
}

}  // namespace
}  // namespace tcg
