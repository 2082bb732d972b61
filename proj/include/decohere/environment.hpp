#pragma once

// Environment models: discrete two-level baths, Gibbs states, linear
// oscillator couplings and continuous spectral densities. hbar = 1, all
// frequencies in rad/time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "decohere/errors.hpp"

namespace decohere::environment {

struct BathMode {
    double omega = 1.0;  ///< level splitting is 2*omega for a two-level mode
    double g = 0.0;      ///< coupling strength

    BathMode() = default;
    BathMode(double omega_, double g_) : omega(omega_), g(g_) {
        detail::require(std::isfinite(omega) && omega > 0.0, "BathMode: omega must be finite and > 0");
        detail::require(std::isfinite(g) && g >= 0.0, "BathMode: g must be finite and >= 0");
    }

    friend bool operator==(const BathMode&, const BathMode&) = default;
};

class DiscreteBath {
public:
    explicit DiscreteBath(std::vector<BathMode> modes) : modes_(std::move(modes)) {
        detail::require(!modes_.empty(), "DiscreteBath: need at least one mode");
        for (const auto& m : modes_) static_cast<void>(BathMode(m.omega, m.g));
    }

    std::size_t size() const noexcept { return modes_.size(); }
    std::span<const BathMode> modes() const noexcept { return modes_; }
    const BathMode& operator[](std::size_t j) const { return modes_.at(j); }

    friend bool operator==(const DiscreteBath&, const DiscreteBath&) = default;

private:
    std::vector<BathMode> modes_;
};

/// Initial bath state: Gibbs state at inverse temperature beta, or the
/// ground state on every mode (the beta -> infinity limit).
struct ThermalState {
    double beta = 0.0;
    bool vacuum = true;

    static ThermalState ground() { return {0.0, true}; }
    static ThermalState gibbs(double beta) {
        detail::require(beta >= 0.0 && !std::isnan(beta), "ThermalState: beta must be >= 0");
        if (std::isinf(beta)) return ground();
        return {beta, false};
    }

    /// Populations of |g> and |e> for a mode with Hamiltonian omega*sigma3.
    std::pair<double, double> weights(double omega) const {
        if (vacuum) return {1.0, 0.0};
        const double boltzmann = std::exp(-2.0 * beta * omega);  // w_e / w_g
        const double w_g = 1.0 / (1.0 + boltzmann);
        return {w_g, boltzmann * w_g};
    }
};

struct FlatGamma {
    double gamma;
};
struct Ohmic {
    double eta;
};
struct Tabulated {
    std::vector<double> omegas;   ///< strictly increasing
    std::vector<double> weights;  ///< rho(omega) g(omega)^2, >= 0
};

/// Continuous density rho(omega) g(omega)^2 on (0, cutoff].
class SpectralDensity {
public:
    using Kind = std::variant<FlatGamma, Ohmic, Tabulated>;

    SpectralDensity(Kind kind, double cutoff) : kind_(std::move(kind)), cutoff_(cutoff) {
        detail::require(std::isfinite(cutoff_) && cutoff_ > 0.0,
                        "SpectralDensity: cutoff must be finite and > 0");
        if (auto* flat = std::get_if<FlatGamma>(&kind_)) {
            detail::require(flat->gamma > 0.0 && std::isfinite(flat->gamma),
                            "SpectralDensity: gamma must be > 0");
        } else if (auto* ohm = std::get_if<Ohmic>(&kind_)) {
            detail::require(ohm->eta > 0.0 && std::isfinite(ohm->eta),
                            "SpectralDensity: eta must be > 0");
        } else {
            const auto& tab = std::get<Tabulated>(kind_);
            detail::require(!tab.omegas.empty() && tab.omegas.size() == tab.weights.size(),
                            "SpectralDensity: tabulated columns must be non-empty and equal length");
            for (std::size_t i = 0; i < tab.omegas.size(); ++i) {
                detail::require(std::isfinite(tab.omegas[i]) && tab.omegas[i] >= 0.0,
                                "SpectralDensity: tabulated omega must be finite and >= 0");
                detail::require(std::isfinite(tab.weights[i]) && tab.weights[i] >= 0.0,
                                "SpectralDensity: tabulated weights must be finite and >= 0");
                if (i > 0) {
                    detail::require(tab.omegas[i] > tab.omegas[i - 1],
                                    "SpectralDensity: tabulated omega must be strictly increasing");
                }
            }
        }
    }

    static SpectralDensity flat_gamma(double gamma, double cutoff) { return {FlatGamma{gamma}, cutoff}; }
    static SpectralDensity ohmic(double eta, double cutoff) { return {Ohmic{eta}, cutoff}; }
    static SpectralDensity tabulated(std::vector<double> omegas, std::vector<double> weights,
                                     double cutoff) {
        return {Tabulated{std::move(omegas), std::move(weights)}, cutoff};
    }

    const Kind& kind() const noexcept { return kind_; }
    double cutoff() const noexcept { return cutoff_; }

    /// rho(omega) g(omega)^2. Zero above the cutoff; tabulated data is
    /// interpolated linearly and vanishes outside the table.
    double weight(double omega) const {
        if (omega < 0.0 || omega > cutoff_) return 0.0;
        return std::visit(
            [omega](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, FlatGamma>) {
                    return k.gamma / std::numbers::pi;
                } else if constexpr (std::is_same_v<K, Ohmic>) {
                    return 2.0 * k.eta * omega * omega / std::numbers::pi;
                } else {
                    const auto& xs = k.omegas;
                    if (omega < xs.front() || omega > xs.back()) return 0.0;
                    if (xs.size() == 1) return k.weights.front();
                    auto it = std::upper_bound(xs.begin(), xs.end(), omega);
                    if (it == xs.end()) return k.weights.back();
                    const auto hi = static_cast<std::size_t>(it - xs.begin());
                    const auto lo = hi - 1;
                    const double frac = (omega - xs[lo]) / (xs[hi] - xs[lo]);
                    return k.weights[lo] + frac * (k.weights[hi] - k.weights[lo]);
                }
            },
            kind_);
    }

    /// Points inside (0, cutoff) where the weight is not smooth.
    std::vector<double> breakpoints() const {
        std::vector<double> pts;
        if (const auto* tab = std::get_if<Tabulated>(&kind_)) {
            for (double w : tab->omegas) {
                if (w > 0.0 && w < cutoff_) pts.push_back(w);
            }
        }
        return pts;
    }

private:
    Kind kind_;
    double cutoff_;
};

/// Linear coupling images f(alpha), f(beta) of the two system eigenvalues.
struct OscillatorCoupling {
    double f_a = 0.0;
    double f_b = 0.0;

    OscillatorCoupling() = default;
    OscillatorCoupling(double a, double b) : f_a(a), f_b(b) {
        detail::require(std::isfinite(a) && std::isfinite(b), "OscillatorCoupling: entries must be finite");
    }
};

inline DiscreteBath build_uniform_bath(std::size_t modes, double omega, double g) {
    detail::require(modes >= 1, "build_uniform_bath: N must be >= 1");
    return DiscreteBath(std::vector<BathMode>(modes, BathMode(omega, g)));
}

/// Midpoint-rule discretisation of a spectral density: N modes at
/// omega_j = (j - 1/2) * cutoff / N with g_j^2 = weight(omega_j) * cutoff / N,
/// so that sum_j 8 g_j^2 / omega_j^2 sin^2(omega_j t) is the midpoint rule of
/// the continuous dephasing integral.
inline DiscreteBath sample_bath(const SpectralDensity& sd, std::size_t modes) {
    detail::require(modes >= 1, "sample_bath: N must be >= 1");
    const double width = sd.cutoff() / static_cast<double>(modes);
    std::vector<BathMode> out;
    out.reserve(modes);
    for (std::size_t j = 0; j < modes; ++j) {
        const double omega = (static_cast<double>(j) + 0.5) * width;
        out.emplace_back(omega, std::sqrt(sd.weight(omega) * width));
    }
    return DiscreteBath(std::move(out));
}

} // namespace decohere::environment
