#pragma once

// Qubit register labelling, coupling-signature grouping and the xi(q) coupling
// eigenvalues that decide which basis states share a decoherence-free subspace.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "decohere/errors.hpp"

namespace decohere::registers {

inline constexpr std::size_t max_qubits = 62;

/// L qubits with coupling strengths lambda_k and level splittings eta_k.
class RegisterSpec {
public:
    RegisterSpec(std::vector<double> lambdas, std::vector<double> etas)
        : lambdas_(std::move(lambdas)), etas_(std::move(etas)) {
        detail::require(!lambdas_.empty(), "RegisterSpec: need at least one qubit");
        detail::require(lambdas_.size() <= max_qubits, "RegisterSpec: too many qubits");
        detail::require(lambdas_.size() == etas_.size(),
                        "RegisterSpec: lambdas and etas must have the same length");
        for (std::size_t k = 0; k < lambdas_.size(); ++k) {
            detail::require(std::isfinite(lambdas_[k]) && std::isfinite(etas_[k]),
                            "RegisterSpec: non-finite entry at qubit " + std::to_string(k));
        }
    }

    /// Identical couplings lambda, zero splittings.
    static RegisterSpec uniform(std::size_t qubits, double lambda = 1.0, double eta = 0.0) {
        return {std::vector<double>(qubits, lambda), std::vector<double>(qubits, eta)};
    }

    std::size_t qubits() const noexcept { return lambdas_.size(); }
    std::uint64_t dimension() const noexcept { return std::uint64_t{1} << qubits(); }
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    const std::vector<double>& etas() const noexcept { return etas_; }

private:
    std::vector<double> lambdas_;
    std::vector<double> etas_;
};

/// Computational basis label; bits[0] is the least significant digit.
class BasisLabel {
public:
    BasisLabel(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        detail::require(!bits_.empty() && bits_.size() <= max_qubits,
                        "BasisLabel: length must be in [1, 62]");
        for (auto b : bits_) detail::require(b <= 1, "BasisLabel: bits must be 0 or 1");
    }

    std::size_t size() const noexcept { return bits_.size(); }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    std::uint8_t operator[](std::size_t i) const { return bits_.at(i); }

    std::uint64_t index() const noexcept {
        std::uint64_t n = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i) n |= std::uint64_t{bits_[i]} << i;
        return n;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

inline BasisLabel label_from_index(std::uint64_t index, std::size_t qubits) {
    detail::require(qubits >= 1 && qubits <= max_qubits, "label_from_index: L must be in [1, 62]");
    detail::require(index < (std::uint64_t{1} << qubits),
                    "label_from_index: index " + std::to_string(index) + " out of range for L=" +
                        std::to_string(qubits));
    std::vector<std::uint8_t> bits(qubits);
    for (std::size_t i = 0; i < qubits; ++i) bits[i] = static_cast<std::uint8_t>((index >> i) & 1U);
    return BasisLabel(std::move(bits));
}

/// Eigenvalue of sum_k lambda_k S3(k) on |q>, with S3|1> = +|1>, S3|0> = -|0>.
inline double xi(const BasisLabel& label, const RegisterSpec& spec) {
    detail::require(label.size() == spec.qubits(), "xi: label length does not match register");
    double sum = 0.0;
    const auto& lambdas = spec.lambdas();
    for (std::size_t k = 0; k < label.size(); ++k) sum += label[k] ? lambdas[k] : -lambdas[k];
    return sum;
}

inline double xi(std::uint64_t index, const RegisterSpec& spec) {
    return xi(label_from_index(index, spec.qubits()), spec);
}

/// Free energy E_q = sum_k eta_k (-1)^{q_k+1}.
inline double energy(const BasisLabel& label, const RegisterSpec& spec) {
    detail::require(label.size() == spec.qubits(), "energy: label length does not match register");
    double sum = 0.0;
    const auto& etas = spec.etas();
    for (std::size_t k = 0; k < label.size(); ++k) sum += label[k] ? etas[k] : -etas[k];
    return sum;
}

/// Every basis label whose xi lies within tol of xi_value, in index order.
inline std::vector<BasisLabel> dfs_members(const RegisterSpec& spec, double xi_value, double tol) {
    detail::require(tol >= 0.0, "dfs_members: tol must be non-negative");
    detail::require(spec.qubits() <= 30, "dfs_members: enumeration limited to 30 qubits");
    std::vector<BasisLabel> members;
    for (std::uint64_t n = 0; n < spec.dimension(); ++n) {
        auto label = label_from_index(n, spec.qubits());
        if (std::abs(xi(label, spec) - xi_value) <= tol) members.push_back(std::move(label));
    }
    return members;
}

/// Coupling signature g_{n,j}: one row per system label, one column per
/// environment particle. Entry is either a real number or any
/// equality-comparable token type.
template <typename Entry>
class CouplingMatrix {
public:
    explicit CouplingMatrix(std::vector<std::vector<Entry>> rows) : rows_(std::move(rows)) {
        detail::require(!rows_.empty(), "CouplingMatrix: need at least one row");
        detail::require(!rows_.front().empty(), "CouplingMatrix: need at least one column");
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            detail::require(rows_[r].size() == rows_.front().size(),
                            "CouplingMatrix: row " + std::to_string(r) + " has a different length");
        }
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return rows_.front().size(); }
    const std::vector<Entry>& row(std::size_t r) const { return rows_.at(r); }

private:
    std::vector<std::vector<Entry>> rows_;
};

struct SubspaceGroup {
    std::size_t signature_row = 0;     ///< representative row holding kappa_{q,.}
    std::vector<std::size_t> members;  ///< system labels, ascending
    std::size_t dimension() const noexcept { return members.size(); }
};

struct SubspaceDecomposition {
    std::vector<SubspaceGroup> groups;  ///< ordered by smallest member
};

inline constexpr double default_signature_tol = 1e-12;

namespace impl {

template <typename Entry>
bool same_signature(const std::vector<Entry>& a, const std::vector<Entry>& b, double tol) {
    for (std::size_t j = 0; j < a.size(); ++j) {
        if constexpr (std::is_floating_point_v<Entry>) {
            if (!(std::abs(a[j] - b[j]) <= tol)) return false;
        } else {
            if (!(a[j] == b[j])) return false;
        }
    }
    return true;
}

} // namespace impl

/// Groups system labels whose coupling rows coincide. Real entries compare
/// within tol of the group's first row; token entries compare exactly.
template <typename Entry>
SubspaceDecomposition decompose_subspaces(const CouplingMatrix<Entry>& cm,
                                          double tol = default_signature_tol) {
    SubspaceDecomposition out;
    for (std::size_t n = 0; n < cm.rows(); ++n) {
        bool placed = false;
        for (auto& group : out.groups) {
            if (impl::same_signature(cm.row(group.signature_row), cm.row(n), tol)) {
                group.members.push_back(n);
                placed = true;
                break;
            }
        }
        if (!placed) out.groups.push_back(SubspaceGroup{n, {n}});
    }
    return out;
}

/// Coupling matrix g_{n,j} = xi(n) * c_j for the collective S3 coupling.
inline CouplingMatrix<double> collective_coupling(const RegisterSpec& spec,
                                                  const std::vector<double>& mode_couplings) {
    detail::require(!mode_couplings.empty(), "collective_coupling: need at least one mode");
    detail::require(spec.qubits() <= 20, "collective_coupling: at most 20 qubits");
    std::vector<std::vector<double>> rows;
    rows.reserve(spec.dimension());
    for (std::uint64_t n = 0; n < spec.dimension(); ++n) {
        const double x = xi(n, spec);
        std::vector<double> row(mode_couplings.size());
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = x * mode_couplings[j];
        rows.push_back(std::move(row));
    }
    return CouplingMatrix<double>(std::move(rows));
}

} // namespace decohere::registers
