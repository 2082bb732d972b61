#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "decohere/registers.hpp"

using namespace decohere;
using namespace decohere::registers;

TEST(Labels, FromIndexExamples) {
    EXPECT_EQ(label_from_index(0, 3).bits(), (std::vector<std::uint8_t>{0, 0, 0}));
    EXPECT_EQ(label_from_index(5, 3).bits(), (std::vector<std::uint8_t>{1, 0, 1}));
    EXPECT_EQ(label_from_index(15, 4).bits(), (std::vector<std::uint8_t>{1, 1, 1, 1}));
}

TEST(Labels, RoundTripAndRange) {
    for (std::size_t L = 1; L <= 10; ++L) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << L); ++i) EXPECT_EQ(label_from_index(i, L).index(), i);
    }
    EXPECT_THROW(label_from_index(8, 3), domain_error);
    EXPECT_THROW(BasisLabel({0, 2}), domain_error);
    EXPECT_EQ(label_from_index(6, 3).to_string().size(), 3u);
}

TEST(Xi, Examples) {
    const auto two = RegisterSpec::uniform(2);
    EXPECT_DOUBLE_EQ(xi(BasisLabel({1, 0}), two), 0.0);
    EXPECT_DOUBLE_EQ(xi(BasisLabel({1, 1}), two), 2.0);
    const RegisterSpec three({1, 2, 3}, {0, 0, 0});
    EXPECT_DOUBLE_EQ(xi(BasisLabel({1, 0, 1}), three), 2.0);
    EXPECT_THROW(xi(BasisLabel({1, 0, 1}), two), domain_error);
}

TEST(Xi, BoundAttainedOnlyBySignAlignedLabels) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t L = 1 + trial % 6;
        std::vector<double> lambdas(L);
        for (auto& l : lambdas) l = u(rng);
        const RegisterSpec spec(lambdas, std::vector<double>(L, 0.0));
        double bound = 0.0;
        for (double l : lambdas) bound += std::abs(l);
        for (std::uint64_t i = 0; i < spec.dimension(); ++i) {
            const auto label = label_from_index(i, L);
            const double x = xi(label, spec);
            EXPECT_LE(std::abs(x), bound + 1e-12);
            bool aligned_up = true, aligned_down = true;
            for (std::size_t k = 0; k < L; ++k) {
                aligned_up &= (label[k] == 1) == (lambdas[k] > 0);
                aligned_down &= (label[k] == 1) == (lambdas[k] < 0);
            }
            EXPECT_EQ(std::abs(std::abs(x) - bound) < 1e-12, aligned_up || aligned_down);
        }
    }
}

TEST(Dfs, Examples) {
    const auto two = RegisterSpec::uniform(2);
    auto null = dfs_members(two, 0.0, 1e-12);
    ASSERT_EQ(null.size(), 2u);
    EXPECT_EQ(null[0], BasisLabel({1, 0}));
    EXPECT_EQ(null[1], BasisLabel({0, 1}));
    auto top = dfs_members(two, 2.0, 1e-12);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0], BasisLabel({1, 1}));
    auto weight2 = dfs_members(RegisterSpec::uniform(3), 1.0, 1e-12);
    ASSERT_EQ(weight2.size(), 3u);
    for (const auto& l : weight2) EXPECT_EQ(std::count(l.bits().begin(), l.bits().end(), 1), 2);
}

TEST(Subspaces, ExtremeCases) {
    CouplingMatrix<double> same(std::vector<std::vector<double>>(5, {0.3, 0.7}));
    auto d = decompose_subspaces(same);
    ASSERT_EQ(d.groups.size(), 1u);
    EXPECT_EQ(d.groups[0].dimension(), 5u);

    CouplingMatrix<double> distinct({{1, 0}, {0, 1}, {1, 1}, {2, 0}});
    EXPECT_EQ(decompose_subspaces(distinct).groups.size(), 4u);
}

TEST(Subspaces, CollectiveTwoQubit) {
    const auto cm = collective_coupling(RegisterSpec::uniform(2), {0.1, 0.4, 0.9});
    const auto d = decompose_subspaces(cm);
    ASSERT_EQ(d.groups.size(), 3u);
    EXPECT_EQ(d.groups[0].members, (std::vector<std::size_t>{0}));
    EXPECT_EQ(d.groups[1].members, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(d.groups[2].members, (std::vector<std::size_t>{3}));
}

TEST(Subspaces, TokenEntriesCompareExactly) {
    CouplingMatrix<std::string> cm({{"a", "b"}, {"a", "c"}, {"a", "b"}});
    const auto d = decompose_subspaces(cm);
    ASSERT_EQ(d.groups.size(), 2u);
    EXPECT_EQ(d.groups[0].members, (std::vector<std::size_t>{0, 2}));
}

TEST(Subspaces, RandomPartitionProperty) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t M = 1 + trial % 17, N = 1 + trial % 3;
        std::vector<std::vector<double>> rows(M, std::vector<double>(N));
        for (auto& row : rows) {
            for (auto& v : row) v = 0.5 * pick(rng);
        }
        const auto d = decompose_subspaces(CouplingMatrix<double>(rows));
        std::set<std::vector<double>> distinct(rows.begin(), rows.end());
        EXPECT_EQ(d.groups.size(), distinct.size());
        std::vector<int> seen(M, 0);
        std::size_t total = 0, previous_first = 0;
        for (std::size_t g = 0; g < d.groups.size(); ++g) {
            const auto& grp = d.groups[g];
            if (g > 0) {
                EXPECT_GT(grp.members.front(), previous_first);
            }
            previous_first = grp.members.front();
            total += grp.dimension();
            for (auto m : grp.members) {
                ++seen[m];
                EXPECT_EQ(rows[m], rows[grp.members.front()]);
            }
            for (std::size_t h = 0; h < g; ++h) EXPECT_NE(rows[d.groups[h].members.front()], rows[grp.members.front()]);
        }
        EXPECT_EQ(total, M);
        for (int s : seen) EXPECT_EQ(s, 1);
    }
}

TEST(Subspaces, CollectiveCouplingGroupsByXi) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> lam(-2, 2);
    std::uniform_real_distribution<double> c(0.1, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t L = 1 + trial % 5;
        std::vector<double> lambdas(L);
        for (auto& l : lambdas) l = lam(rng);
        const RegisterSpec spec(lambdas, std::vector<double>(L, 0.0));
        std::vector<double> modes(1 + trial % 4);
        for (auto& m : modes) m = c(rng);
        const auto d = decompose_subspaces(collective_coupling(spec, modes));
        std::set<double> xis;
        for (std::uint64_t i = 0; i < spec.dimension(); ++i) xis.insert(xi(i, spec));
        EXPECT_EQ(d.groups.size(), xis.size());
        for (const auto& g : d.groups) {
            for (auto m : g.members) EXPECT_EQ(xi(m, spec), xi(g.members.front(), spec));
        }
    }
}

TEST(RegisterSpecValidation, RejectsBadInput) {
    EXPECT_THROW(RegisterSpec({}, {}), domain_error);
    EXPECT_THROW(RegisterSpec({1.0}, {}), domain_error);
    EXPECT_THROW(RegisterSpec({NAN}, {0.0}), domain_error);
    EXPECT_THROW(CouplingMatrix<double>({{1.0}, {1.0, 2.0}}), domain_error);
}

TEST(Energy, SumsSignedSplittings) {
    const RegisterSpec spec({1, 1}, {0.3, 0.5});
    EXPECT_DOUBLE_EQ(energy(BasisLabel({0, 0}), spec), -0.8);
    EXPECT_DOUBLE_EQ(energy(BasisLabel({1, 1}), spec), 0.8);
    EXPECT_DOUBLE_EQ(energy(BasisLabel({1, 0}), spec), -0.2);
}
