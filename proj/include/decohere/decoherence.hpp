#pragma once

// Decohering factors F = <env| U^dagger(second) U(first) |env> for two-level
// and oscillator baths, their N-mode products, dephasing exponents, the
// continuous-spectrum dephasing integral, decoherence-time fits and the
// register feasibility check.
//
// Two-level modes use the basis ordering (|g>, |e>) with
//   sigma3 = diag(-1, +1),  sigma2 = [[0, i], [-i, 0]],
// and the conditional propagator U(xi) = exp[-i (omega sigma3 + xi g sigma2) t].

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "decohere/environment.hpp"
#include "decohere/errors.hpp"
#include "decohere/parallel.hpp"
#include "decohere/registers.hpp"

namespace decohere::decoherence {

using complex = std::complex<double>;
using environment::BathMode;
using environment::DiscreteBath;
using environment::OscillatorCoupling;
using environment::SpectralDensity;
using environment::ThermalState;

inline constexpr double unitarity_slack = 1e-12;

/// Complex decohering factor, stored as (ln|F|, arg F) so that products over
/// many modes neither underflow nor lose the exponent.
class DecoherenceFactor {
public:
    DecoherenceFactor() = default;

    explicit DecoherenceFactor(complex value)
        : log_modulus_(std::log(std::abs(value))), phase_(std::arg(value)) {}

    static DecoherenceFactor from_log_polar(double log_modulus, double phase) {
        DecoherenceFactor f;
        f.log_modulus_ = log_modulus;
        f.phase_ = std::remainder(phase, 2.0 * std::numbers::pi);
        return f;
    }

    static DecoherenceFactor unity() { return {}; }

    complex value() const {
        if (log_modulus_ == 0.0 && phase_ == 0.0) return {1.0, 0.0};
        return std::polar(std::exp(log_modulus_), phase_);
    }
    double modulus() const { return std::exp(log_modulus_); }
    double log_modulus() const noexcept { return log_modulus_; }
    /// Delta = -ln|F| >= 0.
    double dephasing() const noexcept { return 0.0 - log_modulus_; }
    double phase() const noexcept { return phase_; }

    DecoherenceFactor& operator*=(const DecoherenceFactor& other) {
        log_modulus_ += other.log_modulus_;
        phase_ = std::remainder(phase_ + other.phase_, 2.0 * std::numbers::pi);
        return *this;
    }
    friend DecoherenceFactor operator*(DecoherenceFactor a, const DecoherenceFactor& b) { return a *= b; }

private:
    double log_modulus_ = 0.0;
    double phase_ = 0.0;
};

/// Dressed mode parameters: tan(theta) = xi g / omega, Omega = sqrt((g xi)^2 + omega^2).
struct ModeAngles {
    double sin_theta = 0.0;
    double cos_theta = 1.0;
    double Omega = 0.0;

    double theta() const { return std::atan2(sin_theta, cos_theta); }
};

inline ModeAngles mode_angles(const BathMode& mode, double xi) {
    const double coupling = xi * mode.g;
    const double Omega = std::hypot(coupling, mode.omega);
    return {coupling / Omega, mode.omega / Omega, Omega};
}

/// Closed-form propagator U(xi, t) = cos(Omega t) - i [sigma2 sin(theta) + sigma3 cos(theta)] sin(Omega t).
inline Eigen::Matrix2cd propagator_two_level(const BathMode& mode, double xi, double t) {
    const auto a = mode_angles(mode, xi);
    const double c = std::cos(a.Omega * t);
    const double s = std::sin(a.Omega * t);
    const complex i{0.0, 1.0};
    Eigen::Matrix2cd u;
    // sigma2 sin + sigma3 cos = [[-cos, i sin], [-i sin, cos]]
    u(0, 0) = c + i * a.cos_theta * s;
    u(0, 1) = s * a.sin_theta;  // -i * (i sin) * s
    u(1, 0) = -s * a.sin_theta;
    u(1, 1) = c - i * a.cos_theta * s;
    return u;
}

namespace detail {

using decohere::detail::require;

/// <g| U^dagger(xi_b) U(xi_a) |g>.
inline complex ground_overlap(const BathMode& mode, double xi_a, double xi_b, double t) {
    const auto a = mode_angles(mode, xi_a);
    const auto b = mode_angles(mode, xi_b);
    const double ca = std::cos(a.Omega * t), sa = std::sin(a.Omega * t);
    const double cb = std::cos(b.Omega * t), sb = std::sin(b.Omega * t);
    const complex left{cb, -b.cos_theta * sb};
    const complex right{ca, a.cos_theta * sa};
    return a.sin_theta * sa * b.sin_theta * sb + left * right;
}

} // namespace detail

/// Vacuum factor <g| U^dagger(xi_b) U(xi_a) |g>; exactly 1 when xi_a == xi_b.
inline DecoherenceFactor factor_two_level_exact(const BathMode& mode, double xi_a, double xi_b, double t) {
    detail::require(t >= 0.0, "factor_two_level_exact: t must be >= 0");
    if (xi_a == xi_b) return DecoherenceFactor::unity();
    return DecoherenceFactor(detail::ground_overlap(mode, xi_a, xi_b, t));
}

/// Gibbs-state factor Tr[rho_b U^dagger(xi_b) U(xi_a)]. The excited-state
/// matrix element is the complex conjugate of the ground-state one, so the
/// temperature enters only as tanh(beta omega) on the imaginary part.
inline DecoherenceFactor factor_two_level_thermal(const BathMode& mode, double xi_a, double xi_b, double t,
                                                  const ThermalState& th) {
    detail::require(t >= 0.0, "factor_two_level_thermal: t must be >= 0");
    if (xi_a == xi_b) return DecoherenceFactor::unity();
    const complex ground = detail::ground_overlap(mode, xi_a, xi_b, t);
    const auto [w_g, w_e] = th.weights(mode.omega);
    return DecoherenceFactor(w_g * ground + w_e * std::conj(ground));
}

/// Second-order weak-coupling factor
///   1 - (g^2 / 2 omega^2)(xi_a - xi_b)^2 sin^2(omega t)
///     + i (g^2 / 4 omega^2)(xi_a^2 - xi_b^2) tanh(beta omega) sin(2 omega t),
/// with tanh -> 1 for the vacuum.
inline DecoherenceFactor factor_weak_coupling(const BathMode& mode, double xi_a, double xi_b, double t,
                                              std::optional<double> beta = std::nullopt) {
    detail::require(t >= 0.0, "factor_weak_coupling: t must be >= 0");
    if (xi_a == xi_b) return DecoherenceFactor::unity();
    const double ratio = mode.g * mode.g / (mode.omega * mode.omega);
    const double diff = xi_a - xi_b;
    const double s = std::sin(mode.omega * t);
    const double thermal = beta ? std::tanh(*beta * mode.omega) : 1.0;
    const double re = 1.0 - 0.5 * ratio * diff * diff * s * s;
    const double im = 0.25 * ratio * (xi_a * xi_a - xi_b * xi_b) * thermal * std::sin(2.0 * mode.omega * t);
    return DecoherenceFactor(complex{re, im});
}

/// Oscillator-bath factor <0| U^dagger_b U_a |0> for H = omega a^dagger a + f g (a^dagger + a):
///   exp{-(f_a - f_b)^2 (2 g^2 / omega^2) sin^2(omega t / 2)}
///   * exp{-i (f_a^2 - f_b^2) (g^2 / omega) [sin(omega t) / omega - t]}.
/// The phase sign is the one reproduced by the truncated Fock-space propagator.
inline DecoherenceFactor factor_oscillator(const BathMode& mode, const OscillatorCoupling& oc, double t) {
    detail::require(t >= 0.0, "factor_oscillator: t must be >= 0");
    if (oc.f_a == oc.f_b) return DecoherenceFactor::unity();
    const double w = mode.omega;
    const double ratio = mode.g * mode.g / (w * w);
    const double df = oc.f_a - oc.f_b;
    const double half = std::sin(0.5 * w * t);
    const double log_modulus = -df * df * 2.0 * ratio * half * half;
    const double phase = -(oc.f_a * oc.f_a - oc.f_b * oc.f_b) * (mode.g * mode.g / w) * (std::sin(w * t) / w - t);
    return DecoherenceFactor::from_log_polar(log_modulus, phase);
}

/// prod_j F_j over the bath, accumulated in the log domain. per_mode is
/// called once per mode with the BathMode.
template <typename PerMode>
DecoherenceFactor product_factor(std::span<const BathMode> modes, PerMode&& per_mode) {
    DecoherenceFactor total;
    for (const auto& m : modes) total *= per_mode(m);
    return total;
}

template <typename PerMode>
DecoherenceFactor product_factor(const DiscreteBath& bath, PerMode&& per_mode) {
    return product_factor(bath.modes(), std::forward<PerMode>(per_mode));
}

/// Per-mode Delta_j = -ln|F_j|.
template <typename PerMode>
std::vector<double> mode_dephasings(const DiscreteBath& bath, PerMode&& per_mode) {
    std::vector<double> out;
    out.reserve(bath.size());
    for (const auto& m : bath.modes()) out.push_back(per_mode(m).dephasing());
    return out;
}

/// Weak-coupling exponent -ln|F_L| = (xi_a - xi_b)^2 / 2 * sum_j (g_j^2 / omega_j^2) sin^2(omega_j t).
inline double dephasing_exponent(const DiscreteBath& bath, double xi_a, double xi_b, double t) {
    double sum = 0.0;
    for (const auto& m : bath.modes()) {
        const double s = std::sin(m.omega * t);
        sum += m.g * m.g / (m.omega * m.omega) * s * s;
    }
    const double diff = xi_a - xi_b;
    return 0.5 * diff * diff * sum;
}

/// Discrete S(t) = sum_j 8 g_j^2 / omega_j^2 sin^2(omega_j t), the xi = +-2 exponent.
inline double discrete_s(const DiscreteBath& bath, double t) { return dephasing_exponent(bath, 2.0, -2.0, t); }

struct QuadratureOptions {
    double rel_tol = 1e-10;
    unsigned max_depth = 20;
    std::size_t max_panels = 1'000'000;
    double periods_per_panel = 4.0;
};

namespace detail {

/// sin(omega t) / omega, continuous at omega = 0.
inline double sin_over(double omega, double t) {
    const double x = omega * t;
    if (std::abs(x) < 1e-4) return t * (1.0 - x * x / 6.0);
    return std::sin(x) / omega;
}

} // namespace detail

/// S(t) = int_0^cutoff (8 / omega^2) rho(omega) g(omega)^2 sin^2(omega t) d omega,
/// by Gauss-Kronrod quadrature on panels a few oscillation periods wide.
inline double s_integral(const SpectralDensity& sd, double t, const QuadratureOptions& opts = {}) {
    detail::require(t >= 0.0 && std::isfinite(t), "s_integral: t must be finite and >= 0");
    if (t == 0.0) return 0.0;

    const double cutoff = sd.cutoff();
    const double panel_width = opts.periods_per_panel * std::numbers::pi / t;
    const double panel_count = std::ceil(cutoff / panel_width);
    if (panel_count > static_cast<double>(opts.max_panels)) {
        throw resource_error("s_integral: " + std::to_string(panel_count) + " panels exceed the cap of " +
                             std::to_string(opts.max_panels));
    }

    std::vector<double> edges;
    const auto panels = static_cast<std::size_t>(panel_count);
    edges.reserve(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) edges.push_back(std::min(cutoff, i * panel_width));
    for (double b : sd.breakpoints()) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    auto integrand = [&](double omega) {
        const double s = detail::sin_over(omega, t);
        return 8.0 * sd.weight(omega) * s * s;
    };

    double total = 0.0, total_error = 0.0, total_l1 = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double error = 0.0, l1 = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, edges[i], edges[i + 1], opts.max_depth, opts.rel_tol, &error, &l1);
        total_error += error;
        total_l1 += l1;
    }
    if (!std::isfinite(total) || total_error > 1e3 * opts.rel_tol * std::max(total_l1, 1e-300)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "s_integral: quadrature did not converge (t=" << t << ", estimate=" << total
            << ", error=" << total_error << ", panels=" << edges.size() - 1 << ")";
        throw numeric_error(msg.str());
    }
    return total;
}

/// (xi(q) - xi(q'))^2 / 2, the multiplier of sum_j (g_j^2/omega_j^2) sin^2(omega_j t) in -ln|F_L|.
inline double scaling_exponent(const registers::RegisterSpec& spec, const registers::BasisLabel& q,
                               const registers::BasisLabel& q2) {
    const double diff = registers::xi(q, spec) - registers::xi(q2, spec);
    return 0.5 * diff * diff;
}

struct DecoherenceTimeFit {
    double rate = 0.0;      ///< slope of -ln|F| against t
    double t_d = 0.0;       ///< 1 / rate
    double residual = 0.0;  ///< RMS deviation of -ln|F| from rate * t
};

/// Least-squares fit of -ln|F| = rate * t through the origin.
inline DecoherenceTimeFit estimate_decoherence_time(std::span<const double> times,
                                                    std::span<const double> moduli) {
    detail::require(times.size() == moduli.size(), "estimate_decoherence_time: length mismatch");
    detail::require(times.size() >= 3, "estimate_decoherence_time: need at least 3 samples");
    double sty = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        detail::require(moduli[i] > 0.0 && moduli[i] <= 1.0 + unitarity_slack,
                        "estimate_decoherence_time: |F| must lie in (0, 1]");
        const double y = -std::log(moduli[i]);
        sty += times[i] * y;
        stt += times[i] * times[i];
    }
    detail::require(stt > 0.0, "estimate_decoherence_time: all sample times are zero");
    const double rate = sty / stt;
    if (!(rate > 0.0)) throw numeric_error("estimate_decoherence_time: no decay detected");
    double ss = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double r = -std::log(moduli[i]) - rate * times[i];
        ss += r * r;
    }
    return {rate, 1.0 / rate, std::sqrt(ss / static_cast<double>(times.size()))};
}

struct FeasibilityInput {
    double qubits;  ///< L
    double tau;     ///< time per elementary step
    double steps;   ///< K
    double t_d;     ///< single-qubit decoherence time
};

struct FeasibilityVerdict {
    bool feasible = false;
    double margin = 0.0;    ///< t_d - L^2 tau K
    double required = 0.0;  ///< L^2 tau K
};

/// L^2 tau K < t_d.
inline FeasibilityVerdict feasibility(const FeasibilityInput& in) {
    detail::require(in.qubits > 0 && in.tau > 0 && in.steps > 0 && in.t_d > 0,
                    "feasibility: L, tau, K and t_d must all be positive");
    const double required = in.qubits * in.qubits * in.tau * in.steps;
    return {required < in.t_d, in.t_d - required, required};
}

/// Dephasing S(t) = -ln|F(t)| sampled on a time grid, with optional per-mode Delta_j.
struct DephasingCurve {
    std::vector<double> times;
    std::vector<double> s_values;
    std::vector<std::vector<double>> deltas;  ///< deltas[i][j] at times[i]; may be empty
};

inline std::vector<double> linear_grid(double t0, double t1, std::size_t points) {
    detail::require(points >= 2 && t1 > t0, "linear_grid: need t1 > t0 and >= 2 points");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) out[i] = t0 + (t1 - t0) * static_cast<double>(i) / (points - 1);
    return out;
}

inline std::vector<double> geometric_grid(double t0, double t1, std::size_t points) {
    detail::require(points >= 2 && t0 > 0.0 && t1 > t0, "geometric_grid: need 0 < t0 < t1 and >= 2 points");
    std::vector<double> out(points);
    const double ratio = std::log(t1 / t0);
    for (std::size_t i = 0; i < points; ++i) out[i] = t0 * std::exp(ratio * static_cast<double>(i) / (points - 1));
    out.back() = t1;
    return out;
}

/// Geometric grid from 1e-3 / omega_max to 10 / omega_min.
inline std::vector<double> default_time_grid(const DiscreteBath& bath, std::size_t points = 200) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& m : bath.modes()) {
        lo = std::min(lo, m.omega);
        hi = std::max(hi, m.omega);
    }
    return geometric_grid(1e-3 / hi, 10.0 / lo, points);
}

/// Thermal two-level dephasing curve for the pair (xi_a, xi_b).
inline DephasingCurve dephasing_curve(const DiscreteBath& bath, double xi_a, double xi_b,
                                      std::span<const double> times, const ThermalState& th = {},
                                      bool keep_deltas = false) {
    DephasingCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.s_values.resize(times.size());
    if (keep_deltas) curve.deltas.resize(times.size());
    parallel_for(times.size(), [&](std::size_t i) {
        auto per_mode = [&](const BathMode& m) { return factor_two_level_thermal(m, xi_a, xi_b, times[i], th); };
        curve.s_values[i] = product_factor(bath, per_mode).dephasing();
        if (keep_deltas) curve.deltas[i] = mode_dephasings(bath, per_mode);
    });
    return curve;
}

/// Continuous-spectrum dephasing curve from s_integral.
inline DephasingCurve dephasing_curve(const SpectralDensity& sd, std::span<const double> times,
                                      const QuadratureOptions& opts = {}) {
    DephasingCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.s_values.resize(times.size());
    parallel_for(times.size(), [&](std::size_t i) { curve.s_values[i] = s_integral(sd, times[i], opts); });
    return curve;
}

} // namespace decohere::decoherence
