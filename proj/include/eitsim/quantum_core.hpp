// Copyright 2026 The eitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * Composite Hilbert-space bookkeeping and dense operator construction.
 *
 * Composite basis ordering: subsystems are combined with the row-major
 * Kronecker convention, first subsystem most significant. For the cavity
 * EIT problem the subsystems are atom 1 ... atom N followed by the cavity,
 * so |a_1, ..., a_N, n> has index ((a_1 * L + a_2) * L + ...) * (n_max+1) + n.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eitsim/errors.hpp"

namespace eitsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Tensor-product space described by the dimensions of its factors.
class HilbertSpace {
public:
    explicit HilbertSpace(std::vector<std::size_t> subsystem_dims)
        : dims_(std::move(subsystem_dims)) {
        if (dims_.empty()) {
            throw InvalidArgument("HilbertSpace: at least one subsystem required");
        }
        for (std::size_t d : dims_) {
            if (d < 2) {
                throw InvalidArgument("HilbertSpace: subsystem dimension must be >= 2, got "
                                      + std::to_string(d));
            }
        }
        total_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                                 std::multiplies<>());
    }

    /// `n_atoms` atoms with `levels` internal states each, then a cavity
    /// mode truncated to photon numbers 0..n_max.
    static HilbertSpace atoms_and_cavity(std::size_t n_atoms, std::size_t levels,
                                         std::size_t n_max) {
        std::vector<std::size_t> dims(n_atoms, levels);
        dims.push_back(n_max + 1);
        return HilbertSpace(std::move(dims));
    }

    const std::vector<std::size_t>& subsystem_dims() const noexcept { return dims_; }
    std::size_t num_subsystems() const noexcept { return dims_.size(); }
    std::size_t total_dim() const noexcept { return total_; }

    std::size_t subsystem_dim(std::size_t subsystem) const {
        check_subsystem(subsystem);
        return dims_[subsystem];
    }

    void check_subsystem(std::size_t subsystem) const {
        if (subsystem >= dims_.size()) {
            throw InvalidArgument("subsystem index " + std::to_string(subsystem)
                                  + " out of range for " + std::to_string(dims_.size())
                                  + " subsystems");
        }
    }

    void check_level(std::size_t subsystem, std::size_t level) const {
        check_subsystem(subsystem);
        if (level >= dims_[subsystem]) {
            throw InvalidArgument("level " + std::to_string(level) + " out of range for subsystem "
                                  + std::to_string(subsystem) + " of dimension "
                                  + std::to_string(dims_[subsystem]));
        }
    }

    /// Composite index of a product basis state.
    std::size_t index_of(std::span<const std::size_t> levels) const {
        if (levels.size() != dims_.size()) {
            throw InvalidArgument("index_of: expected one level per subsystem");
        }
        std::size_t idx = 0;
        for (std::size_t s = 0; s < dims_.size(); ++s) {
            check_level(s, levels[s]);
            idx = idx * dims_[s] + levels[s];
        }
        return idx;
    }

    bool operator==(const HilbertSpace&) const = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 1;
};

/// Square complex matrix acting on a HilbertSpace.
class OperatorMatrix {
public:
    OperatorMatrix(HilbertSpace space, Matrix entries)
        : space_(std::move(space)), entries_(std::move(entries)) {
        const auto n = static_cast<Eigen::Index>(space_.total_dim());
        if (entries_.rows() != n || entries_.cols() != n) {
            throw InvalidArgument("OperatorMatrix: entries must be " + std::to_string(n) + "x"
                                  + std::to_string(n));
        }
    }

    static OperatorMatrix zero(const HilbertSpace& space) {
        const auto n = static_cast<Eigen::Index>(space.total_dim());
        return {space, Matrix::Zero(n, n)};
    }

    static OperatorMatrix identity(const HilbertSpace& space) {
        const auto n = static_cast<Eigen::Index>(space.total_dim());
        return {space, Matrix::Identity(n, n)};
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return entries_; }
    Eigen::Index dim() const noexcept { return entries_.rows(); }

    Complex operator()(Eigen::Index row, Eigen::Index col) const { return entries_(row, col); }

    OperatorMatrix dagger() const { return {space_, entries_.adjoint()}; }

    SparseMatrix sparse() const { return entries_.sparseView(0.0, 0.0); }

    /// max_ij |A_ij - conj(A_ji)|
    double hermiticity_error() const { return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff(); }

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
        check_same(a, b);
        return {a.space_, a.entries_ + b.entries_};
    }
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
        check_same(a, b);
        return {a.space_, a.entries_ - b.entries_};
    }
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
        check_same(a, b);
        return {a.space_, a.entries_ * b.entries_};
    }
    friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a) { return {a.space_, s * a.entries_}; }
    friend OperatorMatrix operator*(double s, const OperatorMatrix& a) { return {a.space_, s * a.entries_}; }

private:
    static void check_same(const OperatorMatrix& a, const OperatorMatrix& b) {
        if (a.space_ != b.space_) {
            throw InvalidArgument("OperatorMatrix: operands act on different spaces");
        }
    }

    HilbertSpace space_;
    Matrix entries_;
};

/// Row-major Kronecker product: (A (x) B)(i*p + k, j*q + l) = A(i,j) B(k,l).
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Kronecker product of single-subsystem factors, in subsystem order.
inline OperatorMatrix tensor(std::span<const OperatorMatrix> factors) {
    if (factors.empty()) {
        throw InvalidArgument("tensor: no factors");
    }
    std::vector<std::size_t> dims;
    dims.reserve(factors.size());
    Matrix acc = Matrix::Identity(1, 1);
    for (const auto& f : factors) {
        if (f.space().num_subsystems() != 1) {
            throw InvalidArgument("tensor: each factor must act on a single subsystem");
        }
        dims.push_back(f.space().total_dim());
        acc = kron(acc, f.matrix());
    }
    return {HilbertSpace(std::move(dims)), std::move(acc)};
}

inline OperatorMatrix tensor(std::initializer_list<OperatorMatrix> factors) {
    return tensor(std::span<const OperatorMatrix>(factors.begin(), factors.size()));
}

/// Lifts a local matrix on `subsystem` to the full space (identity elsewhere).
inline OperatorMatrix embed(const HilbertSpace& space, std::size_t subsystem, const Matrix& local) {
    space.check_subsystem(subsystem);
    const auto d = static_cast<Eigen::Index>(space.subsystem_dims()[subsystem]);
    if (local.rows() != d || local.cols() != d) {
        throw InvalidArgument("embed: local operator has wrong dimension for subsystem "
                              + std::to_string(subsystem));
    }
    std::size_t before = 1;
    std::size_t after = 1;
    for (std::size_t s = 0; s < subsystem; ++s) before *= space.subsystem_dims()[s];
    for (std::size_t s = subsystem + 1; s < space.num_subsystems(); ++s) after *= space.subsystem_dims()[s];
    const auto b = static_cast<Eigen::Index>(before);
    const auto a = static_cast<Eigen::Index>(after);
    Matrix full = kron(kron(Matrix::Identity(b, b), local), Matrix::Identity(a, a));
    return {space, std::move(full)};
}

/// |level><level| on `subsystem`.
inline OperatorMatrix basis_projector(const HilbertSpace& space, std::size_t subsystem, std::size_t level) {
    space.check_level(subsystem, level);
    const auto d = static_cast<Eigen::Index>(space.subsystem_dims()[subsystem]);
    Matrix local = Matrix::Zero(d, d);
    local(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
    return embed(space, subsystem, local);
}

/// |lower><upper| on `subsystem`; annihilates `upper`.
inline OperatorMatrix transition_operator(const HilbertSpace& space, std::size_t subsystem,
                                          std::size_t upper, std::size_t lower) {
    space.check_level(subsystem, upper);
    space.check_level(subsystem, lower);
    if (upper == lower) {
        throw InvalidArgument("transition_operator: upper and lower level coincide");
    }
    const auto d = static_cast<Eigen::Index>(space.subsystem_dims()[subsystem]);
    Matrix local = Matrix::Zero(d, d);
    local(static_cast<Eigen::Index>(lower), static_cast<Eigen::Index>(upper)) = 1.0;
    return embed(space, subsystem, local);
}

/// Truncated ladder operator, a|n> = sqrt(n)|n-1>, on `cavity_subsystem`.
inline OperatorMatrix annihilation_operator(const HilbertSpace& space, std::size_t cavity_subsystem) {
    const auto d = static_cast<Eigen::Index>(space.subsystem_dim(cavity_subsystem));
    Matrix local = Matrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) {
        local(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return embed(space, cavity_subsystem, local);
}

struct DensityTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double min_eigenvalue = -1e-8;
};

/// Hermitian, unit-trace, positive semidefinite state. Validated on construction.
class DensityMatrix {
public:
    DensityMatrix(HilbertSpace space, Matrix rho, const DensityTolerances& tol = {})
        : space_(std::move(space)), rho_(std::move(rho)) {
        const auto n = static_cast<Eigen::Index>(space_.total_dim());
        if (rho_.rows() != n || rho_.cols() != n) {
            throw InvalidArgument("DensityMatrix: wrong shape");
        }
        if (double h = hermiticity_error(); h > tol.hermiticity) {
            throw InvalidArgument("DensityMatrix: not Hermitian (max |rho - rho^H| = "
                                  + std::to_string(h) + ")");
        }
        if (double t = std::abs(trace() - 1.0); t > tol.trace) {
            throw InvalidArgument("DensityMatrix: trace differs from 1 by " + std::to_string(t));
        }
        if (double e = min_eigenvalue(); e < tol.min_eigenvalue) {
            throw InvalidArgument("DensityMatrix: negative eigenvalue " + std::to_string(e));
        }
    }

    /// |psi><psi| for the product basis state with the given index.
    static DensityMatrix basis_state(const HilbertSpace& space, std::size_t index) {
        const auto n = static_cast<Eigen::Index>(space.total_dim());
        if (index >= space.total_dim()) {
            throw InvalidArgument("basis_state: index out of range");
        }
        Matrix rho = Matrix::Zero(n, n);
        rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
        return {space, std::move(rho)};
    }

    static DensityMatrix maximally_mixed(const HilbertSpace& space) {
        const auto n = static_cast<Eigen::Index>(space.total_dim());
        return {space, Matrix::Identity(n, n) / static_cast<double>(n)};
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return rho_; }

    Complex trace() const { return rho_.trace(); }
    double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

private:
    HilbertSpace space_;
    Matrix rho_;
};

/// trace(op * rho)
inline Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
    if (rho.space() != op.space()) {
        throw InvalidArgument("expectation: operator and state act on different spaces");
    }
    return op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

/// Half the trace norm of (a - b).
inline double trace_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("trace_distance: shape mismatch");
    }
    const Matrix diff = a - b;
    const Matrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace eitsim
