#pragma once

// Output statistics of Shor's period-finding measurement with and without an
// environment that records the first register.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "decohere/decoherence.hpp"
#include "decohere/environment.hpp"
#include "decohere/errors.hpp"
#include "decohere/registers.hpp"

namespace decohere::shor {

using complex = std::complex<double>;

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

/// Least r >= 1 with x^r = 1 (mod n).
inline std::uint64_t multiplicative_order(std::uint64_t x, std::uint64_t n) {
    detail::require(n >= 2, "multiplicative_order: n must be >= 2");
    const std::uint64_t g = std::gcd(x, n);
    if (g != 1) {
        throw domain_error("multiplicative_order: gcd(" + std::to_string(x) + ", " + std::to_string(n) +
                           ") = " + std::to_string(g) + " is a nontrivial factor");
    }
    const std::uint64_t base = x % n;
    std::uint64_t power = base;
    for (std::uint64_t r = 1; r <= n; ++r) {
        if (power == 1 % n) return r;
        power = mul_mod(power, base, n);
    }
    throw numeric_error("multiplicative_order: no order found");  // unreachable for gcd = 1
}

/// Euler's totient.
inline std::uint64_t totient(std::uint64_t r) {
    detail::require(r >= 1, "totient: r must be >= 1");
    std::uint64_t result = r, rest = r;
    for (std::uint64_t p = 2; p * p <= rest; ++p) {
        if (rest % p != 0) continue;
        while (rest % p == 0) rest /= p;
        result -= result / p;
    }
    if (rest > 1) result -= result / rest;
    return result;
}

/// One factoring run: n, a base x coprime to n, register size q, and the
/// order r of x mod n.
class ShorInstance {
public:
    ShorInstance(std::uint64_t n, std::uint64_t x, std::uint64_t q) : n_(n), x_(x), q_(q) {
        detail::require(n >= 2, "ShorInstance: n must be >= 2");
        detail::require(x >= 1 && x < n, "ShorInstance: x must satisfy 1 <= x < n");
        detail::require(q >= 1, "ShorInstance: q must be >= 1");
        r_ = multiplicative_order(x, n);
    }

    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t x() const noexcept { return x_; }
    std::uint64_t q() const noexcept { return q_; }
    std::uint64_t r() const noexcept { return r_; }

    /// |{a in [0, q) : a = k mod r}|.
    std::uint64_t residue_count(std::uint64_t k) const noexcept { return k < q_ ? (q_ - 1 - k) / r_ + 1 : 0; }

    /// Textbook assumptions that the instance may violate; reported, not enforced.
    struct Assumptions {
        bool n_odd_composite = false;
        bool q_at_least_n = false;
        bool q_at_least_n_squared = false;
    };

    Assumptions assumptions() const {
        bool composite = false;
        for (std::uint64_t d = 2; d * d <= n_; ++d) {
            if (n_ % d == 0) {
                composite = true;
                break;
            }
        }
        const auto n2 = static_cast<unsigned __int128>(n_) * n_;
        return {composite && (n_ % 2 == 1), q_ >= n_, static_cast<unsigned __int128>(q_) >= n2};
    }

private:
    std::uint64_t n_, x_, q_, r_ = 1;
};

/// p(c, k) for c in [0, q), k in [0, r), stored row-major by c.
struct ShorDistribution {
    std::uint64_t q = 0;
    std::uint64_t r = 0;
    std::vector<double> probabilities;
    std::size_t clipped = 0;  ///< entries in [-1e-12, 0) set to zero

    double operator()(std::uint64_t c, std::uint64_t k) const { return probabilities.at(c * r + k); }
    double total() const {
        return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    }
};

inline constexpr double default_work_cap = 4e9;

/// Isolated register: p(c, k) = |sum_{a = k mod r} exp(2 pi i a c / q)|^2 / q^2,
/// summed in closed form as a geometric series.
inline ShorDistribution shor_distribution(const ShorInstance& inst, double work_cap = default_work_cap) {
    const auto q = inst.q(), r = inst.r();
    if (static_cast<double>(q) * static_cast<double>(r) > work_cap) {
        throw resource_error("shor_distribution: q*r = " + std::to_string(static_cast<double>(q) * r) +
                             " exceeds the work cap");
    }
    ShorDistribution out{q, r, std::vector<double>(q * r, 0.0)};
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    for (std::uint64_t c = 0; c < q; ++c) {
        const std::uint64_t step = mul_mod(r, c, q);  // r c mod q
        for (std::uint64_t k = 0; k < r; ++k) {
            const std::uint64_t count = inst.residue_count(k);
            double magnitude = 0.0;
            if (count == 0) {
                magnitude = 0.0;
            } else if (step == 0) {
                magnitude = static_cast<double>(count);
            } else {
                const std::uint64_t wrapped = mul_mod(count, step, q);
                const double pi_over_q = std::numbers::pi / static_cast<double>(q);
                magnitude = std::abs(std::sin(pi_over_q * static_cast<double>(wrapped)) /
                                     std::sin(pi_over_q * static_cast<double>(step)));
            }
            out.probabilities[c * r + k] = magnitude * magnitude / q2;
        }
    }
    return out;
}

/// Decohering kernels F(a, a') = <e[a']|e[a]> for the first register.
struct Isolated {};
struct CompleteDelta {};
struct TwoLevelBath {
    registers::RegisterSpec first_register;  ///< label a -> xi(a) through these couplings
    environment::DiscreteBath bath;
    double t = 0.0;
    environment::ThermalState thermal = environment::ThermalState::ground();
};
using DecoherenceKernel = std::variant<Isolated, CompleteDelta, TwoLevelBath>;

/// First-register spec for a q-dimensional register with unit couplings.
inline registers::RegisterSpec unit_register_for(std::uint64_t q) {
    std::size_t bits = 1;
    while ((std::uint64_t{1} << bits) < q) ++bits;
    return registers::RegisterSpec::uniform(bits, 1.0, 0.0);
}

namespace detail {

using decohere::detail::require;

inline double finish_entry(double re, ShorDistribution& out) {
    constexpr double tol = 1e-12;
    if (re >= 0.0) return re;
    if (re >= -tol) {
        ++out.clipped;
        return 0.0;
    }
    throw domain_error("shor_distribution_decohered: negative probability " + std::to_string(re) +
                       "; the kernel is not a valid Gram matrix");
}

/// Grouped evaluation for kernels that depend on a only through group[a]:
/// p'(c,k) = sum_{g,g'} F(g,g') A_g(c) conj(A_g'(c)) / q^2 with
/// A_g(c) = sum_{a = k mod r, group(a) = g} exp(2 pi i a c / q).
template <typename GroupKernel>
ShorDistribution grouped(const ShorInstance& inst, const std::vector<std::size_t>& group, std::size_t groups,
                         GroupKernel&& kernel, double work_cap) {
    const auto q = inst.q(), r = inst.r();
    const double work = static_cast<double>(q) * static_cast<double>(q) +
                        static_cast<double>(q) * static_cast<double>(r) * static_cast<double>(groups * groups);
    if (q > (std::uint64_t{1} << 16) || work > work_cap) {
        throw resource_error("shor_distribution_decohered: q = " + std::to_string(q) + " with " +
                             std::to_string(groups) + " coupling groups exceeds the work cap");
    }
    std::vector<complex> roots(q);
    for (std::uint64_t m = 0; m < q; ++m) {
        roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(q));
    }
    std::vector<complex> F(groups * groups);
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t h = 0; h < groups; ++h) F[g * groups + h] = kernel(g, h);
    }

    ShorDistribution out{q, r, std::vector<double>(q * r, 0.0)};
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    std::vector<complex> amp(r * groups);
    for (std::uint64_t c = 0; c < q; ++c) {
        std::fill(amp.begin(), amp.end(), complex{0.0, 0.0});
        for (std::uint64_t a = 0; a < q; ++a) amp[(a % r) * groups + group[a]] += roots[mul_mod(a, c, q)];
        for (std::uint64_t k = 0; k < r; ++k) {
            const complex* A = &amp[k * groups];
            complex sum{0.0, 0.0};
            for (std::size_t g = 0; g < groups; ++g) {
                if (A[g] == complex{0.0, 0.0}) continue;
                for (std::size_t h = 0; h < groups; ++h) sum += F[g * groups + h] * A[g] * std::conj(A[h]);
            }
            out.probabilities[c * r + k] = finish_entry(sum.real() / q2, out);
        }
    }
    return out;
}

} // namespace detail

/// p'(c,k) = sum_{a, a' = k mod r} exp(2 pi i (a - a') c / q) F(a, a') / q^2
/// for an arbitrary kernel, by direct double summation.
inline ShorDistribution shor_distribution_decohered(const ShorInstance& inst,
                                                    const std::function<complex(std::uint64_t, std::uint64_t)>& kernel,
                                                    double work_cap = default_work_cap) {
    const auto q = inst.q(), r = inst.r();
    double work = 0.0;
    for (std::uint64_t k = 0; k < r && k < q; ++k) {
        const double m = static_cast<double>(inst.residue_count(k));
        work += m * m;
    }
    work *= static_cast<double>(q);
    if (q > (std::uint64_t{1} << 16) || work > work_cap) {
        throw resource_error("shor_distribution_decohered: double sum of " + std::to_string(work) +
                             " terms exceeds the work cap");
    }
    ShorDistribution out{q, r, std::vector<double>(q * r, 0.0)};
    const double q2 = static_cast<double>(q) * static_cast<double>(q);
    for (std::uint64_t c = 0; c < q; ++c) {
        for (std::uint64_t k = 0; k < r && k < q; ++k) {
            complex sum{0.0, 0.0};
            for (std::uint64_t a = k; a < q; a += r) {
                for (std::uint64_t b = k; b < q; b += r) {
                    // (a - b) c mod q, kept in integers
                    const std::uint64_t diff = (a >= b) ? mul_mod(a - b, c, q) : (q - mul_mod(b - a, c, q)) % q;
                    const complex phase =
                        std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(diff) / static_cast<double>(q));
                    sum += phase * kernel(a, b);
                }
            }
            out.probabilities[c * r + k] = detail::finish_entry(sum.real() / q2, out);
        }
    }
    return out;
}

/// Decohered distribution for the built-in kernels.
inline ShorDistribution shor_distribution_decohered(const ShorInstance& inst, const DecoherenceKernel& kernel,
                                                    double work_cap = default_work_cap) {
    const auto q = inst.q(), r = inst.r();
    if (std::holds_alternative<CompleteDelta>(kernel)) {
        // Only the a = a' terms survive, each contributing exactly 1.
        if (static_cast<double>(q) * static_cast<double>(r) > work_cap) {
            throw resource_error("shor_distribution_decohered: q*r exceeds the work cap");
        }
        ShorDistribution out{q, r, std::vector<double>(q * r, 0.0)};
        const double q2 = static_cast<double>(q) * static_cast<double>(q);
        for (std::uint64_t c = 0; c < q; ++c) {
            for (std::uint64_t k = 0; k < r; ++k) out.probabilities[c * r + k] = static_cast<double>(inst.residue_count(k)) / q2;
        }
        return out;
    }
    if (std::holds_alternative<Isolated>(kernel)) {
        std::vector<std::size_t> group(q, 0);
        return detail::grouped(inst, group, 1, [](std::size_t, std::size_t) { return complex{1.0, 0.0}; },
                               work_cap);
    }

    const auto& bath = std::get<TwoLevelBath>(kernel);
    detail::require(bath.t >= 0.0, "TwoLevelBath kernel: t must be >= 0");
    detail::require(q <= bath.first_register.dimension(),
                    "TwoLevelBath kernel: first register has fewer than q basis states");
    std::map<double, std::size_t> index_of;
    std::vector<double> xis;
    std::vector<std::size_t> group(q);
    for (std::uint64_t a = 0; a < q; ++a) {
        const double x = registers::xi(a, bath.first_register);
        auto [it, inserted] = index_of.try_emplace(x, xis.size());
        if (inserted) xis.push_back(x);
        group[a] = it->second;
    }
    return detail::grouped(
        inst, group, xis.size(),
        [&](std::size_t g, std::size_t h) {
            return decoherence::product_factor(bath.bath, [&](const environment::BathMode& m) {
                       return decoherence::factor_two_level_thermal(m, xis[g], xis[h], bath.t, bath.thermal);
                   })
                .value();
        },
        work_cap);
}

/// Register outcomes c within 1/2 of j q / r for some j coprime to r.
inline std::vector<std::uint64_t> good_outcomes(std::uint64_t q, std::uint64_t r) {
    std::vector<std::uint64_t> good;
    for (std::uint64_t j = 1; j < r; ++j) {
        if (std::gcd(j, r) != 1) continue;
        const auto target = static_cast<unsigned __int128>(j) * q;  // j q, compared as r c
        const std::uint64_t centre = static_cast<std::uint64_t>(target / r);
        for (std::uint64_t c = (centre > 0 ? centre - 1 : 0); c <= centre + 1 && c < q; ++c) {
            const auto rc = static_cast<unsigned __int128>(r) * c;
            const auto dist = rc > target ? rc - target : target - rc;
            if (2 * dist <= r && (good.empty() || good.back() != c)) good.push_back(c);
        }
    }
    return good;
}

struct SuccessReport {
    bool defined = false;           ///< false when r = 1
    double success = 0.0;           ///< sum of p(c, k) over good c and all k
    double lower_bound = 0.0;       ///< r phi(r) min_{good c, k} p(c, k)
    std::vector<std::uint64_t> good_c;
};

inline SuccessReport success_probability(const ShorDistribution& dist, const ShorInstance& inst) {
    detail::require(dist.q == inst.q() && dist.r == inst.r(), "success_probability: distribution/instance mismatch");
    SuccessReport rep;
    if (inst.r() == 1) return rep;
    rep.defined = true;
    rep.good_c = good_outcomes(inst.q(), inst.r());
    double min_p = rep.good_c.empty() ? 0.0 : 1.0;
    for (auto c : rep.good_c) {
        for (std::uint64_t k = 0; k < inst.r(); ++k) {
            rep.success += dist(c, k);
            min_p = std::min(min_p, dist(c, k));
        }
    }
    rep.lower_bound = static_cast<double>(inst.r()) * static_cast<double>(totient(inst.r())) * min_p;
    return rep;
}

/// Complete-decoherence ceiling phi(r)/q and the printed chain
/// phi(r)/q <= phi(r)/n^2 <= 1/n, whose links hold only for q >= n^2, phi(r) <= n.
struct DecoheredCeiling {
    double ceiling = 0.0;   ///< phi(r) / q
    double via_n2 = 0.0;    ///< phi(r) / n^2
    double via_n = 0.0;     ///< 1 / n
    bool first_link = false;
    bool second_link = false;
};

inline DecoheredCeiling decohered_ceiling(const ShorInstance& inst) {
    const double phi = static_cast<double>(totient(inst.r()));
    const double n = static_cast<double>(inst.n());
    DecoheredCeiling out{phi / static_cast<double>(inst.q()), phi / (n * n), 1.0 / n};
    out.first_link = inst.assumptions().q_at_least_n_squared;
    out.second_link = phi <= n;
    return out;
}

} // namespace decohere::shor
