#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "decohere/shor.hpp"
#include "oracles.hpp"

using namespace decohere;
using namespace decohere::shor;
using complex = std::complex<double>;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(Arithmetic, Order) {
    EXPECT_EQ(multiplicative_order(7, 15), 4u);
    EXPECT_EQ(multiplicative_order(1, 15), 1u);
    EXPECT_EQ(multiplicative_order(2, 21), 6u);
    for (std::uint64_t n = 3; n < 60; ++n) {
        for (std::uint64_t x = 1; x < n; ++x) {
            if (std::gcd(x, n) != 1) {
                EXPECT_THROW(multiplicative_order(x, n), domain_error);
                continue;
            }
            std::uint64_t r = 1, y = x % n;
            while (y != 1) {
                y = y * x % n;
                ++r;
            }
            EXPECT_EQ(multiplicative_order(x, n), r);
        }
    }
    try {
        multiplicative_order(6, 15);
    } catch (const domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("gcd(6, 15) = 3"), std::string::npos);
    }
}

TEST(Arithmetic, TotientAndMulMod) {
    EXPECT_EQ(totient(1), 1u);
    EXPECT_EQ(totient(4), 2u);
    EXPECT_EQ(totient(12), 4u);
    for (std::uint64_t r = 1; r < 200; ++r) {
        std::uint64_t count = 0;
        for (std::uint64_t j = 1; j <= r; ++j) count += std::gcd(j, r) == 1;
        EXPECT_EQ(totient(r), count);
    }
    const std::uint64_t big = (std::uint64_t{1} << 62) + 57;
    EXPECT_EQ(mul_mod(big - 1, big - 1, big), 1u);
}

TEST(Instance, ValidationAndAssumptions) {
    EXPECT_THROW(ShorInstance(15, 0, 256), domain_error);
    EXPECT_THROW(ShorInstance(15, 15, 256), domain_error);
    EXPECT_THROW(ShorInstance(15, 7, 0), domain_error);
    EXPECT_THROW(ShorInstance(15, 5, 256), domain_error);
    const ShorInstance inst(15, 7, 256);
    EXPECT_EQ(inst.r(), 4u);
    EXPECT_TRUE(inst.assumptions().n_odd_composite);
    EXPECT_TRUE(inst.assumptions().q_at_least_n_squared);
    EXPECT_FALSE(ShorInstance(15, 7, 64).assumptions().q_at_least_n_squared);
    EXPECT_FALSE(ShorInstance(13, 2, 256).assumptions().n_odd_composite);
    for (std::uint64_t k = 0; k < 4; ++k) EXPECT_EQ(inst.residue_count(k), 64u);
    const ShorInstance odd(15, 7, 10);
    EXPECT_EQ(odd.residue_count(0), 3u);
    EXPECT_EQ(odd.residue_count(1), 3u);
    EXPECT_EQ(odd.residue_count(2), 2u);
}

TEST(Distribution, PeaksAtMultiplesOfQOverR) {
    const ShorInstance inst(15, 7, 256);
    const auto d = shor_distribution(inst);
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
    for (std::uint64_t c = 0; c < 256; ++c) {
        for (std::uint64_t k = 0; k < 4; ++k) {
            if (c % 64 == 0) {
                EXPECT_NEAR(d(c, k), 1.0 / 16.0, 1e-15);
            } else {
                EXPECT_NEAR(d(c, k), 0.0, 1e-15);
            }
        }
    }
}

TEST(Distribution, Degenerate) {
    const auto d = shor_distribution(ShorInstance(2, 1, 1));
    ASSERT_EQ(d.probabilities.size(), 1u);
    EXPECT_EQ(d(0, 0), 1.0);
}

TEST(Distribution, MatchesStateVectorSimulation) {
    for (auto [n, x] : {std::pair<std::uint64_t, std::uint64_t>{15, 7}, {15, 2}, {15, 4}, {21, 2}, {21, 5},
                        {35, 3}, {3, 2}, {33, 5}}) {
        for (std::uint64_t q : {1u, 4u, 16u, 17u, 30u, 50u, 64u}) {
            const ShorInstance inst(n, x, q);
            const auto fast = shor_distribution(inst);
            const auto brute = oracles::shor_state_vector(n, x, q);
            EXPECT_LE(max_diff(fast.probabilities, brute), 1e-10) << n << " " << x << " " << q;
            EXPECT_NEAR(fast.total(), 1.0, 1e-9);
        }
    }
}

TEST(Distribution, WorkCap) {
    EXPECT_THROW(shor_distribution(ShorInstance(15, 7, 1u << 20), 1e3), resource_error);
}

TEST(Decohered, IsolatedReproducesClosedForm) {
    for (std::uint64_t q : {16u, 50u, 256u}) {
        const ShorInstance inst(21, 2, q);
        EXPECT_LE(max_diff(shor_distribution_decohered(inst, Isolated{}).probabilities,
                           shor_distribution(inst).probabilities),
                  1e-12);
        const auto generic = shor_distribution_decohered(
            inst, [](std::uint64_t, std::uint64_t) { return complex{1.0, 0.0}; });
        EXPECT_LE(max_diff(generic.probabilities, shor_distribution(inst).probabilities), 1e-12);
    }
}

TEST(Decohered, CompleteDeltaCountsAndBound) {
    for (std::uint64_t q : {10u, 64u, 256u}) {
        const ShorInstance inst(15, 7, q);
        const auto d = shor_distribution_decohered(inst, CompleteDelta{});
        const auto generic = shor_distribution_decohered(
            inst, [](std::uint64_t a, std::uint64_t b) { return a == b ? complex{1.0, 0.0} : complex{0.0, 0.0}; });
        EXPECT_LE(max_diff(d.probabilities, generic.probabilities), 1e-15);
        EXPECT_NEAR(d.total(), 1.0, 1e-12);
        for (std::uint64_t c = 0; c < q; ++c) {
            for (std::uint64_t k = 0; k < 4; ++k) {
                EXPECT_EQ(d(c, k), static_cast<double>((q - 1 - k) / 4 + 1) / static_cast<double>(q * q));
                // The 1/(q r) ceiling needs r | q; otherwise the exact count can exceed q/r.
                if (q % 4 == 0) {
                    EXPECT_LE(d(c, k), 1.0 / static_cast<double>(q * 4) + 1e-12);
                }
            }
        }
    }
    const auto uneven = shor_distribution_decohered(ShorInstance(15, 7, 10), CompleteDelta{});
    EXPECT_GT(uneven(0, 0), 1.0 / 40.0);
}

TEST(Decohered, SpinBathKernelMatchesExplicitEnvironment) {
    // Environment vectors |e[a]> = prod_j U_j(xi(a)) |g_j> built explicitly,
    // then traced out of the full state.
    const auto bath = environment::DiscreteBath({{0.9, 0.3}, {1.4, 0.2}, {0.6, 0.4}});
    for (std::uint64_t q : {8u, 16u, 27u}) {
        const auto reg = unit_register_for(q);
        for (double t : {0.0, 0.8, 2.3}) {
            std::vector<Eigen::VectorXcd> env;
            for (std::uint64_t a = 0; a < q; ++a) env.push_back(oracles::spin_bath_state(bath, registers::xi(a, reg), t));
            const auto brute = oracles::shor_state_vector(15, 7, q, env);
            const ShorInstance inst(15, 7, q);
            const auto d = shor_distribution_decohered(inst, TwoLevelBath{reg, bath, t});
            EXPECT_LE(max_diff(d.probabilities, brute), 1e-12) << "q=" << q << " t=" << t;
            EXPECT_NEAR(d.total(), 1.0, 1e-9);
        }
    }
}

TEST(Decohered, GroupedAndDoubleSumAgree) {
    const ShorInstance inst(21, 2, 40);
    const auto reg = unit_register_for(40);
    const auto bath = environment::build_uniform_bath(6, 1.0, 0.25);
    const auto th = environment::ThermalState::gibbs(0.8);
    const double t = 1.7;
    const auto fast = shor_distribution_decohered(inst, TwoLevelBath{reg, bath, t, th});
    const auto slow = shor_distribution_decohered(inst, [&](std::uint64_t a, std::uint64_t b) {
        return decoherence::product_factor(bath, [&](const environment::BathMode& m) {
                   return decoherence::factor_two_level_thermal(m, registers::xi(a, reg), registers::xi(b, reg), t, th);
               })
            .value();
    });
    EXPECT_LE(max_diff(fast.probabilities, slow.probabilities), 1e-12);
}

TEST(Decohered, SandwichBetweenExtremes) {
    const ShorInstance inst(15, 7, 32);
    EXPECT_LE(max_diff(shor_distribution_decohered(inst, TwoLevelBath{unit_register_for(32),
                                                                       environment::build_uniform_bath(4, 1, 0.3), 0.0})
                           .probabilities,
                       shor_distribution(inst).probabilities),
              1e-12);
    // Distinct couplings 2^k give every label its own xi; a strong bath then
    // suppresses every off-diagonal kernel entry.
    std::vector<double> lambdas;
    for (int k = 0; k < 5; ++k) lambdas.push_back(std::ldexp(1.0, k));
    const registers::RegisterSpec reg(lambdas, std::vector<double>(5, 0.0));
    std::vector<environment::BathMode> modes;
    for (int j = 0; j < 400; ++j) modes.emplace_back(1.0 + 0.013 * j, 0.4);
    const auto strong = shor_distribution_decohered(inst, TwoLevelBath{reg, environment::DiscreteBath(modes), 3.3});
    EXPECT_LE(max_diff(strong.probabilities, shor_distribution_decohered(inst, CompleteDelta{}).probabilities), 1e-8);
}

TEST(Decohered, InvalidKernelRejected) {
    const ShorInstance inst(15, 7, 16);
    EXPECT_THROW(shor_distribution_decohered(inst, [](std::uint64_t a, std::uint64_t b) {
                     return a == b ? complex{1.0, 0.0} : complex{-1.0, 0.0};
                 }),
                 domain_error);
    EXPECT_THROW(shor_distribution_decohered(ShorInstance(15, 7, 1u << 17), CompleteDelta{}, 1.0), resource_error);
    EXPECT_THROW(shor_distribution_decohered(inst, TwoLevelBath{registers::RegisterSpec::uniform(3),
                                                               environment::build_uniform_bath(1, 1, 0.1), 1.0}),
                 domain_error);
}

TEST(Success, ExtremesForFifteen) {
    const ShorInstance inst(15, 7, 256);
    const auto iso = success_probability(shor_distribution(inst), inst);
    ASSERT_TRUE(iso.defined);
    EXPECT_EQ(iso.good_c, (std::vector<std::uint64_t>{64, 192}));
    EXPECT_DOUBLE_EQ(iso.success, 0.5);
    EXPECT_GE(iso.success, 1.0 / (3.0 * std::log(15.0)));
    EXPECT_DOUBLE_EQ(iso.lower_bound, 4.0 * 2.0 / 16.0);

    const auto dead = success_probability(shor_distribution_decohered(inst, CompleteDelta{}), inst);
    EXPECT_DOUBLE_EQ(dead.success, 8.0 / 1024.0);
    const auto ceiling = decohered_ceiling(inst);
    EXPECT_DOUBLE_EQ(ceiling.ceiling, 2.0 / 256.0);
    EXPECT_LE(dead.success, ceiling.ceiling + 1e-15);
    EXPECT_TRUE(ceiling.first_link);
    EXPECT_TRUE(ceiling.second_link);
    EXPECT_LE(ceiling.ceiling, ceiling.via_n2);
    EXPECT_LE(ceiling.via_n2, ceiling.via_n);
}

TEST(Success, UndefinedForTrivialOrder) {
    const ShorInstance inst(15, 1, 32);
    EXPECT_FALSE(success_probability(shor_distribution(inst), inst).defined);
}

TEST(Success, ToyInstanceByHand) {
    // n = 3, x = 2, q = 4: r = 2, a in {0, 2} for k = 0 and {1, 3} for k = 1.
    const ShorInstance inst(3, 2, 4);
    const auto d = shor_distribution(inst);
    const auto brute = oracles::shor_state_vector(3, 2, 4);
    EXPECT_LE(max_diff(d.probabilities, brute), 1e-15);
    for (std::uint64_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(d(0, k), 0.25, 1e-15);
        EXPECT_NEAR(d(1, k), 0.0, 1e-15);
        EXPECT_NEAR(d(2, k), 0.25, 1e-15);
        EXPECT_NEAR(d(3, k), 0.0, 1e-15);
    }
    const auto rep = success_probability(d, inst);
    EXPECT_EQ(rep.good_c, (std::vector<std::uint64_t>{2}));
    EXPECT_DOUBLE_EQ(rep.success, 0.5);
}

TEST(Success, GoodOutcomeRegion) {
    for (std::uint64_t q : {7u, 64u, 100u, 1000u}) {
        for (std::uint64_t r : {2u, 3u, 4u, 6u, 10u}) {
            const auto good = good_outcomes(q, r);
            for (std::uint64_t c = 0; c < q; ++c) {
                bool expected = false;
                for (std::uint64_t j = 1; j < r; ++j) {
                    if (std::gcd(j, r) == 1 && 2.0 * std::abs(double(r) * c - double(j) * q) <= double(r)) expected = true;
                }
                EXPECT_EQ(std::binary_search(good.begin(), good.end(), c), expected) << q << " " << r << " " << c;
            }
        }
    }
}

TEST(Decohered, SuccessDecaysWithInteractionTime) {
    const ShorInstance inst(15, 7, 64);
    const auto reg = unit_register_for(64);
    const auto bath = environment::build_uniform_bath(50, 1.0, 0.2);
    const double iso = success_probability(shor_distribution(inst), inst).success;
    for (double t : {0.1, 0.3, 0.6, 1.0}) {
        const auto d = shor_distribution_decohered(inst, TwoLevelBath{reg, bath, t});
        EXPECT_NEAR(d.total(), 1.0, 1e-9);
        const double s = success_probability(d, inst).success;
        EXPECT_LE(s, iso + 1e-12);
        EXPECT_GE(s, 0.0);
    }
}
