#pragma once

// Numerical classifier for the limit of (1 - f(N))^{p(ln N)} as N grows,
// which separates efficient from inefficient randomized algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "decohere/errors.hpp"

namespace decohere::shor {

/// f(N) = 1 / (c ln N).
struct ReciprocalLog {
    double c = 3.0;
};
/// f(N) = 1 / N.
struct Reciprocal {};
/// f sampled at increasing N, interpolated linearly in ln N.
struct SampledSuccess {
    std::vector<double> n;
    std::vector<double> f;
};

class EfficiencySpec {
public:
    using Success = std::variant<ReciprocalLog, Reciprocal, SampledSuccess>;

    /// coefficients of p in ascending powers.
    EfficiencySpec(Success f, std::vector<double> coefficients)
        : f_(std::move(f)), coefficients_(std::move(coefficients)) {
        detail::require(!coefficients_.empty(), "EfficiencySpec: polynomial needs at least one coefficient");
        if (const auto* s = std::get_if<SampledSuccess>(&f_)) {
            detail::require(s->n.size() >= 2 && s->n.size() == s->f.size(),
                            "EfficiencySpec: sampled f needs >= 2 (N, f) pairs");
            for (std::size_t i = 0; i < s->n.size(); ++i) {
                detail::require(s->n[i] > 1.0, "EfficiencySpec: sampled N must exceed 1");
                if (i > 0) detail::require(s->n[i] > s->n[i - 1], "EfficiencySpec: sampled N must increase");
            }
        } else if (const auto* r = std::get_if<ReciprocalLog>(&f_)) {
            detail::require(r->c > 0.0, "EfficiencySpec: c must be > 0");
        }
    }

    double f(double n) const {
        return std::visit(
            [n](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, ReciprocalLog>) {
                    return 1.0 / (s.c * std::log(n));
                } else if constexpr (std::is_same_v<S, Reciprocal>) {
                    return 1.0 / n;
                } else {
                    detail::require(n >= s.n.front() * (1 - 1e-12) && n <= s.n.back() * (1 + 1e-12),
                                    "EfficiencySpec: N outside the sampled range");
                    const double x = std::log(n);
                    auto it = std::lower_bound(s.n.begin(), s.n.end(), n);
                    if (it == s.n.begin()) return s.f.front();
                    if (it == s.n.end()) return s.f.back();
                    const auto hi = static_cast<std::size_t>(it - s.n.begin());
                    const double x0 = std::log(s.n[hi - 1]), x1 = std::log(s.n[hi]);
                    return s.f[hi - 1] + (x - x0) / (x1 - x0) * (s.f[hi] - s.f[hi - 1]);
                }
            },
            f_);
    }

    /// p(x) by Horner's rule.
    double p(double x) const {
        double acc = 0.0;
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    /// ln[(1 - f(N))^{p(ln N)}].
    double log_failure(double n) const { return p(std::log(n)) * std::log1p(-f(n)); }

    const std::vector<double>& coefficients() const noexcept { return coefficients_; }

    EfficiencySpec scaled(double alpha) const {
        auto c = coefficients_;
        for (auto& v : c) v *= alpha;
        return {f_, std::move(c)};
    }

private:
    Success f_;
    std::vector<double> coefficients_;
};

inline std::vector<double> geometric_n_grid(double n_min, double n_max, std::size_t points_per_decade = 8) {
    detail::require(n_min > 1.0 && n_max > n_min && points_per_decade >= 1, "geometric_n_grid: need 1 < N_min < N_max");
    const double decades = std::log10(n_max / n_min);
    const auto steps = static_cast<std::size_t>(std::ceil(decades * static_cast<double>(points_per_decade)));
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        grid[i] = n_min * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(steps));
    }
    grid.back() = n_max;
    return grid;
}

enum class Efficiency { Efficient, NotEfficient, Inconclusive };

inline const char* to_string(Efficiency e) {
    switch (e) {
    case Efficiency::Efficient: return "Efficient";
    case Efficiency::NotEfficient: return "NotEfficient";
    case Efficiency::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct EfficiencyVerdict {
    Efficiency verdict = Efficiency::Inconclusive;
    double limit = std::numeric_limits<double>::quiet_NaN();  ///< estimate of lim (1-f)^{p(ln N)}
    bool degenerate = false;          ///< f >= 1 somewhere on the grid
    bool power_law_tail = false;      ///< -Lambda decays like a power of N
    double tail[3] = {0, 0, 0};       ///< Lambda at ln N = L/4, L/2, L
    double slopes[2] = {0, 0};        ///< d ln|Lambda| / d ln N over the two tail octaves
    double richardson[2] = {0, 0};    ///< first- and second-level extrapolants of Lambda
    std::vector<std::pair<double, double>> trace;  ///< (N, Lambda(N)) over the grid
};

struct ClassifierOptions {
    double margin = 1e-3;
    double decay_slope = -0.25;     ///< both tail slopes at or below this mean power-law decay
    double extrapolation_tol = 1e-2;
};

/// Evaluates Lambda(N) = p(ln N) ln(1 - f(N)) on the grid and estimates its
/// limit from the last octaves of ln N (L/4, L/2, L with L = ln N_max):
/// a tail decaying like a power of N has limit 0; otherwise Lambda is
/// extrapolated in u = 1/ln N by two levels of Richardson elimination.
inline EfficiencyVerdict classify_efficiency(const EfficiencySpec& es, const std::vector<double>& grid,
                                             const ClassifierOptions& opts = {}) {
    detail::require(grid.size() >= 3, "classify_efficiency: grid needs at least 3 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        detail::require(grid[i] > 1.0, "classify_efficiency: grid N must exceed 1");
        if (i > 0) detail::require(grid[i] > grid[i - 1], "classify_efficiency: grid must increase");
    }
    EfficiencyVerdict out;
    for (double n : grid) {
        const double f = es.f(n);
        detail::require(f > 0.0, "classify_efficiency: f(N) must be > 0 on the grid");
        if (f >= 1.0) out.degenerate = true;
        detail::require(es.p(std::log(n)) > 0.0, "classify_efficiency: p(ln N) must be > 0 on the grid");
        out.trace.emplace_back(n, es.log_failure(n));
    }
    if (out.degenerate) {
        out.verdict = Efficiency::Efficient;
        out.limit = 0.0;
        return out;
    }

    const double big_l = std::log(grid.back());
    detail::require(big_l / 4.0 >= std::log(grid.front()) * (1 - 1e-12),
                    "classify_efficiency: grid must span two octaves of ln N (N_min <= N_max^(1/4))");
    const double lnn[3] = {big_l / 4.0, big_l / 2.0, big_l};
    for (int i = 0; i < 3; ++i) out.tail[i] = es.log_failure(std::exp(lnn[i]));

    auto log_abs = [](double v) { return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v)); };
    out.slopes[0] = (log_abs(out.tail[1]) - log_abs(out.tail[0])) / (lnn[1] - lnn[0]);
    out.slopes[1] = (log_abs(out.tail[2]) - log_abs(out.tail[1])) / (lnn[2] - lnn[1]);
    if (out.tail[2] == 0.0 || (out.slopes[0] <= opts.decay_slope && out.slopes[1] <= opts.decay_slope)) {
        out.power_law_tail = true;
        out.limit = 1.0;
        out.verdict = Efficiency::NotEfficient;
        return out;
    }

    // u halves from one tail point to the next, so eliminate u and u^2 with ratio 2.
    const double r1_low = 2.0 * out.tail[1] - out.tail[0];
    const double r1_high = 2.0 * out.tail[2] - out.tail[1];
    const double r2 = (4.0 * r1_high - r1_low) / 3.0;
    out.richardson[0] = r1_high;
    out.richardson[1] = r2;
    out.limit = std::exp(std::min(r2, 0.0));

    const bool stable = std::abs(r2 - r1_high) <= opts.extrapolation_tol * std::max(1.0, std::abs(r2));
    const bool flat = std::abs(out.tail[2] - out.tail[1]) <= opts.margin;
    // A tail still falling caps the limit at exp(Lambda(N_max)) even when the
    // extrapolation has not settled.
    const bool falling = out.tail[2] < out.tail[1] && out.tail[1] < out.tail[0] &&
                         std::exp(out.tail[2]) < 1.0 - opts.margin;
    if (out.limit < 1.0 - opts.margin && (stable || falling)) {
        out.verdict = Efficiency::Efficient;
    } else if (out.limit >= 1.0 - opts.margin && flat) {
        out.verdict = Efficiency::NotEfficient;
    } else {
        out.verdict = Efficiency::Inconclusive;
    }
    return out;
}

} // namespace decohere::shor
