#pragma once

// Reduced density matrices of a qubit register dephased by a QND-coupled bath,
// plus a brute-force global-state oracle that traces out the environment.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "decohere/decoherence.hpp"
#include "decohere/environment.hpp"
#include "decohere/errors.hpp"
#include "decohere/oracle.hpp"
#include "decohere/registers.hpp"

namespace decohere::density {

using complex = std::complex<double>;

inline constexpr std::size_t max_dimension = std::size_t{1} << 12;
inline constexpr std::size_t max_oracle_modes = 12;

class DensityMatrix {
public:
    static constexpr double hermitian_tol = 1e-12;
    static constexpr double trace_tol = 1e-12;
    static constexpr double eigen_tol = 1e-10;

    explicit DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
        detail::require(entries_.rows() >= 1 && entries_.rows() == entries_.cols(),
                        "DensityMatrix: must be square and non-empty");
        detail::require((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= hermitian_tol,
                        "DensityMatrix: not Hermitian");
        detail::require(std::abs(entries_.trace() - complex{1.0, 0.0}) <= trace_tol,
                        "DensityMatrix: trace is not 1");
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    complex operator()(std::size_t r, std::size_t c) const {
        return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

    bool is_positive() const { return eigenvalues().minCoeff() >= -eigen_tol; }

private:
    Eigen::MatrixXcd entries_;
};

/// Normalised amplitudes C_q over the 2^L computational labels.
class SystemState {
public:
    explicit SystemState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
        detail::require(amplitudes_.size() >= 1, "SystemState: empty amplitude vector");
        detail::require(std::abs(amplitudes_.squaredNorm() - 1.0) <= 1e-12, "SystemState: not normalised");
    }

    /// Builds a state from (label index, amplitude) pairs and rescales it to unit norm.
    static SystemState superposition(std::size_t dimension, const std::vector<std::pair<std::size_t, complex>>& terms) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension));
        for (const auto& [index, amp] : terms) {
            detail::require(index < dimension, "SystemState: label index out of range");
            v(static_cast<Eigen::Index>(index)) += amp;
        }
        const double norm = v.norm();
        detail::require(norm > 0.0, "SystemState: zero vector");
        return SystemState(v / norm);
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    complex operator[](std::size_t q) const { return amplitudes_(static_cast<Eigen::Index>(q)); }

private:
    Eigen::VectorXcd amplitudes_;
};

/// Free energies E_q of the register basis states.
struct EnergyTable {
    std::vector<double> energies;

    static EnergyTable from_register(const registers::RegisterSpec& spec) {
        if (spec.dimension() > max_dimension) throw resource_error("EnergyTable: register too large");
        EnergyTable table;
        table.energies.reserve(spec.dimension());
        for (std::uint64_t q = 0; q < spec.dimension(); ++q) {
            table.energies.push_back(registers::energy(registers::label_from_index(q, spec.qubits()), spec));
        }
        return table;
    }
};

namespace detail {

using decohere::detail::require;

inline void check_dimensions(const SystemState& state, const registers::RegisterSpec& spec) {
    if (spec.dimension() > max_dimension) {
        throw resource_error("density: 2^L = " + std::to_string(spec.dimension()) + " exceeds the cap of " +
                             std::to_string(max_dimension));
    }
    decohere::detail::require(state.dim() == spec.dimension(),
                              "density: state dimension does not match 2^L of the register");
}

} // namespace detail

/// rho[q, q'] = C_q C_q'^* exp[i (E_q' - E_q) t] F(xi(q), xi(q'), t), where
/// pair_factor(xi_a, xi_b) returns the full-bath DecoherenceFactor.
template <typename PairFactor>
DensityMatrix evolve_reduced_with(const SystemState& state0, const registers::RegisterSpec& spec,
                                  const EnergyTable& energies, double t, PairFactor&& pair_factor) {
    detail::check_dimensions(state0, spec);
    decohere::detail::require(energies.energies.size() == state0.dim(),
                              "evolve_reduced: energy table does not match the register");
    decohere::detail::require(t >= 0.0, "evolve_reduced: t must be >= 0");

    const auto dim = state0.dim();
    std::vector<double> xis(dim);
    for (std::size_t q = 0; q < dim; ++q) xis[q] = registers::xi(q, spec);

    std::map<std::pair<double, double>, complex> cache;
    auto factor = [&](double a, double b) {
        auto [it, inserted] = cache.try_emplace({a, b});
        if (inserted) it->second = pair_factor(a, b).value();
        return it->second;
    };

    Eigen::MatrixXcd rho(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t q = 0; q < dim; ++q) {
        const auto iq = static_cast<Eigen::Index>(q);
        rho(iq, iq) = std::norm(state0[q]);
        for (std::size_t p = q + 1; p < dim; ++p) {
            const auto ip = static_cast<Eigen::Index>(p);
            const complex coherence = state0[q] * std::conj(state0[p]);
            complex value{0.0, 0.0};
            if (coherence != complex{0.0, 0.0}) {
                value = coherence * std::polar(1.0, (energies.energies[p] - energies.energies[q]) * t) *
                        factor(xis[q], xis[p]);
            }
            rho(iq, ip) = value;
            rho(ip, iq) = std::conj(value);
        }
    }
    return DensityMatrix(std::move(rho));
}

/// Reduced state under a two-level bath prepared in th (vacuum or Gibbs).
inline DensityMatrix evolve_reduced(const SystemState& state0, const registers::RegisterSpec& spec,
                                    const environment::DiscreteBath& bath, const environment::ThermalState& th,
                                    double t) {
    return evolve_reduced_with(state0, spec, EnergyTable::from_register(spec), t, [&](double a, double b) {
        return decoherence::product_factor(bath, [&](const environment::BathMode& m) {
            return decoherence::factor_two_level_thermal(m, a, b, t, th);
        });
    });
}

/// Same with an explicit energy table overriding the register splittings.
inline DensityMatrix evolve_reduced(const SystemState& state0, const registers::RegisterSpec& spec,
                                    const EnergyTable& energies, const environment::DiscreteBath& bath,
                                    const environment::ThermalState& th, double t) {
    return evolve_reduced_with(state0, spec, energies, t, [&](double a, double b) {
        return decoherence::product_factor(bath, [&](const environment::BathMode& m) {
            return decoherence::factor_two_level_thermal(m, a, b, t, th);
        });
    });
}

/// Tr(rho^2).
inline double purity(const DensityMatrix& rho) { return rho.entries().cwiseAbs2().sum(); }

/// Builds the global pure state sum_q C_q e^{-i E_q t} |q> (x) prod_j U_j(xi(q)) |g_j>
/// with numerically diagonalised per-mode propagators, then traces out the
/// environment. Only the vacuum bath state is supported.
inline DensityMatrix oracle_full_evolution(const SystemState& state0, const registers::RegisterSpec& spec,
                                           std::span<const environment::BathMode> modes, double t) {
    detail::check_dimensions(state0, spec);
    if (modes.size() > max_oracle_modes) {
        throw resource_error("oracle_full_evolution: " + std::to_string(modes.size()) +
                             " environment spins exceed the cap of " + std::to_string(max_oracle_modes));
    }
    if (spec.qubits() + modes.size() > 20) {
        throw resource_error("oracle_full_evolution: global state of 2^" +
                             std::to_string(spec.qubits() + modes.size()) + " amplitudes is too large");
    }
    decohere::detail::require(t >= 0.0, "oracle_full_evolution: t must be >= 0");

    const auto sys_dim = static_cast<Eigen::Index>(state0.dim());
    const auto env_dim = Eigen::Index{1} << modes.size();
    Eigen::MatrixXcd global(sys_dim, env_dim);

    // S3 eigenvalues of each qubit give both the free energy and the coupling.
    for (Eigen::Index q = 0; q < sys_dim; ++q) {
        double coupling = 0.0, energy = 0.0;
        for (std::size_t k = 0; k < spec.qubits(); ++k) {
            const double s3 = ((q >> k) & 1) ? 1.0 : -1.0;
            coupling += spec.lambdas()[k] * s3;
            energy += spec.etas()[k] * s3;
        }
        Eigen::VectorXcd env = Eigen::VectorXcd::Ones(1);
        for (const auto& mode : modes) {
            const Eigen::Vector2cd column = oracle::oracle_factor_unitary(mode, coupling, t).col(0);
            Eigen::VectorXcd next(env.size() * 2);
            for (Eigen::Index i = 0; i < env.size(); ++i) {
                next(2 * i) = env(i) * column(0);
                next(2 * i + 1) = env(i) * column(1);
            }
            env = std::move(next);
        }
        global.row(q) = (state0[static_cast<std::size_t>(q)] * std::polar(1.0, -energy * t)) * env.transpose();
    }
    Eigen::MatrixXcd rho = global * global.adjoint();
    return DensityMatrix(std::move(rho));
}

} // namespace decohere::density
