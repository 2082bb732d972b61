#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "decohere/efficiency.hpp"

using namespace decohere;
using namespace decohere::shor;

namespace {
const auto grid = geometric_n_grid(10.0, 1e12, 8);
}

TEST(Efficiency, ReciprocalLogLimitIsInverseE) {
    const auto v = classify_efficiency(EfficiencySpec(ReciprocalLog{3.0}, {0.0, 3.0}), grid);
    EXPECT_EQ(v.verdict, Efficiency::Efficient);
    EXPECT_NEAR(v.limit, std::exp(-1.0), 1e-4);
    EXPECT_FALSE(v.power_law_tail);
    EXPECT_EQ(v.trace.size(), grid.size());
    EXPECT_DOUBLE_EQ(v.trace.back().first, 1e12);
}

TEST(Efficiency, ReciprocalIsNotEfficientForLowDegreePolynomials) {
    const std::vector<std::vector<double>> polys = {
        {1.0}, {0.0, 1.0}, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0, 5.0}, {2.0, 0.0, 1.0, 0.0, 1.0},
        {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
        {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1000.0}};
    for (const auto& p : polys) {
        const auto v = classify_efficiency(EfficiencySpec(Reciprocal{}, p), grid);
        EXPECT_EQ(v.verdict, Efficiency::NotEfficient) << "degree " << p.size() - 1;
        EXPECT_DOUBLE_EQ(v.limit, 1.0);
        EXPECT_TRUE(v.power_law_tail);
    }
}

TEST(Efficiency, CertainSuccessIsTriviallyEfficient) {
    SampledSuccess ones{{10.0, 1e12}, {1.0, 1.0}};
    const auto v = classify_efficiency(EfficiencySpec(ones, {1.0}), grid);
    EXPECT_EQ(v.verdict, Efficiency::Efficient);
    EXPECT_TRUE(v.degenerate);
    EXPECT_EQ(v.limit, 0.0);
}

TEST(Efficiency, VerdictInvariantUnderPolynomialRescaling) {
    for (double alpha : {0.05, 0.5, 2.0, 20.0}) {
        const EfficiencySpec eff(ReciprocalLog{3.0}, {0.0, 3.0});
        const auto v = classify_efficiency(eff.scaled(alpha), grid);
        EXPECT_EQ(v.verdict, Efficiency::Efficient) << alpha;
        EXPECT_NEAR(v.limit, std::exp(-alpha), 1e-3 * std::exp(-alpha) + 1e-12);
        const EfficiencySpec not_eff(Reciprocal{}, {0.0, 0.0, 1.0});
        EXPECT_EQ(classify_efficiency(not_eff.scaled(alpha), grid).verdict, Efficiency::NotEfficient) << alpha;
    }
}

TEST(Efficiency, SampledSuccessMatchesClosedForm) {
    SampledSuccess s;
    for (double x = std::log(10.0); x <= std::log(1e12) + 1e-9; x += 0.05) {
        s.n.push_back(std::exp(x));
        s.f.push_back(1.0 / (3.0 * x));
    }
    s.n.back() = 1e12;
    s.f.back() = 1.0 / (3.0 * std::log(1e12));
    const auto v = classify_efficiency(EfficiencySpec(s, {0.0, 3.0}), grid);
    EXPECT_EQ(v.verdict, Efficiency::Efficient);
    EXPECT_NEAR(v.limit, std::exp(-1.0), 1e-3);
}

TEST(Efficiency, SlowerPolynomialThanFailureDecayIsInconclusiveOrNotEfficient) {
    // f = 1/(3 ln N) with p = sqrt-like growth: Lambda -> 0 slowly, limit 1.
    const auto v = classify_efficiency(EfficiencySpec(ReciprocalLog{3.0}, {1.0}), grid);
    EXPECT_NE(v.verdict, Efficiency::Efficient);
    // f = 1/(3 ln N) with p = x^2: Lambda diverges, limit 0.
    const auto w = classify_efficiency(EfficiencySpec(ReciprocalLog{3.0}, {0.0, 0.0, 1.0}), grid);
    EXPECT_EQ(w.verdict, Efficiency::Efficient);
    EXPECT_LT(w.limit, 1e-3);
}

TEST(Efficiency, Validation) {
    EXPECT_THROW(EfficiencySpec(Reciprocal{}, {}), domain_error);
    EXPECT_THROW(EfficiencySpec(ReciprocalLog{0.0}, {1.0}), domain_error);
    EXPECT_THROW(EfficiencySpec(SampledSuccess{{10.0}, {0.5}}, {1.0}), domain_error);
    EXPECT_THROW(EfficiencySpec(SampledSuccess{{10.0, 5.0}, {0.5, 0.4}}, {1.0}), domain_error);
    EXPECT_THROW(classify_efficiency(EfficiencySpec(Reciprocal{}, {-1.0}), grid), domain_error);
    EXPECT_THROW(classify_efficiency(EfficiencySpec(Reciprocal{}, {1.0}), geometric_n_grid(1e6, 1e12)), domain_error);
    EXPECT_THROW(classify_efficiency(EfficiencySpec(SampledSuccess{{100.0, 1e6}, {0.1, 0.01}}, {1.0}), grid),
                 domain_error);
    EXPECT_THROW(classify_efficiency(EfficiencySpec(Reciprocal{}, {1.0}), {10.0, 5.0, 100.0}), domain_error);
    EXPECT_THROW(geometric_n_grid(1.0, 10.0), domain_error);
}

TEST(Efficiency, GridShape) {
    const auto g = geometric_n_grid(10.0, 1e4, 4);
    ASSERT_EQ(g.size(), 13u);
    EXPECT_DOUBLE_EQ(g.front(), 10.0);
    EXPECT_DOUBLE_EQ(g.back(), 1e4);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, 0.25), 1e-12);
}
