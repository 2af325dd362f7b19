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
 * Lindblad master equation
 *
 *   d rho / dt = L(rho) = -i[H, rho] + sum_c ( c rho c^H - 1/2 {c^H c, rho} )
 *
 * Vectorization is column stacking: vec(rho)[i + j*d] = rho(i, j), so that
 * vec(A rho B) = (B^T (x) A) vec(rho).
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <umfpack.h>

#include "eitsim/errors.hpp"
#include "eitsim/quantum_core.hpp"

namespace eitsim {

/// Default cap on the superoperator dimension d^2.
inline constexpr std::size_t kDefaultSuperoperatorCap = 20000;

/// Hamiltonian (angular units) and sqrt(rate)-scaled collapse operators.
class LindbladModel {
public:
    LindbladModel(OperatorMatrix hamiltonian, std::vector<OperatorMatrix> collapse_ops)
        : space_(hamiltonian.space()),
          hamiltonian_(std::move(hamiltonian)),
          collapse_(std::move(collapse_ops)) {
        if (double h = hamiltonian_.hermiticity_error(); h > 1e-9) {
            throw InvalidArgument("LindbladModel: Hamiltonian not Hermitian (error "
                                  + std::to_string(h) + ")");
        }
        for (const auto& c : collapse_) {
            if (c.space() != space_) {
                throw InvalidArgument("LindbladModel: collapse operator acts on a different space");
            }
        }
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const OperatorMatrix& hamiltonian() const noexcept { return hamiltonian_; }
    const std::vector<OperatorMatrix>& collapse_ops() const noexcept { return collapse_; }
    Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(space_.total_dim()); }

private:
    HilbertSpace space_;
    OperatorMatrix hamiltonian_;
    std::vector<OperatorMatrix> collapse_;
};

/// Direct evaluation of L(rho) with dense matrix products.
inline Matrix liouvillian_apply(const LindbladModel& model, const Matrix& rho) {
    const Eigen::Index d = model.dim();
    if (rho.rows() != d || rho.cols() != d) {
        throw InvalidArgument("liouvillian_apply: rho has wrong shape");
    }
    const Complex I(0.0, 1.0);
    const Matrix& h = model.hamiltonian().matrix();
    Matrix out = -I * (h * rho - rho * h);
    for (const auto& op : model.collapse_ops()) {
        const Matrix& c = op.matrix();
        const Matrix cdc = c.adjoint() * c;
        out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
}

namespace detail {

inline SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
                    trips.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                       static_cast<int>(ia.col() * b.cols() + ib.col()),
                                       ia.value() * ib.value());
                }
            }
        }
    }
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline SparseMatrix sparse_identity(Eigen::Index n) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

inline void check_capacity(Eigen::Index d, std::size_t cap) {
    const auto d2 = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    if (d2 > cap) {
        throw CapacityError("superoperator dimension " + std::to_string(d2) + " (Hilbert dim "
                            + std::to_string(d) + ") exceeds cap " + std::to_string(cap));
    }
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

inline Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace detail

/// Sparse superoperator acting on column-stacked vec(rho). Throws
/// CapacityError if d^2 exceeds `cap`.
inline SparseMatrix build_superoperator(const LindbladModel& model,
                                        std::size_t cap = kDefaultSuperoperatorCap) {
    const Eigen::Index d = model.dim();
    detail::check_capacity(d, cap);
    using detail::sparse_kron;
    const Complex I(0.0, 1.0);
    const SparseMatrix id = detail::sparse_identity(d);
    const SparseMatrix h = model.hamiltonian().sparse();
    const SparseMatrix ht = SparseMatrix(h.transpose());

    SparseMatrix out = -I * sparse_kron(id, h) + I * sparse_kron(ht, id);
    for (const auto& op : model.collapse_ops()) {
        const SparseMatrix c = op.sparse();
        const SparseMatrix cconj = SparseMatrix(c.conjugate());
        const SparseMatrix cdc = SparseMatrix(SparseMatrix(c.adjoint()) * c);
        const SparseMatrix cdct = SparseMatrix(cdc.transpose());
        out += sparse_kron(cconj, c);
        out -= 0.5 * sparse_kron(id, cdc);
        out -= 0.5 * sparse_kron(cdct, id);
    }
    out.prune(Complex(0.0, 0.0));
    out.makeCompressed();
    return out;
}

struct SteadyStateOptions {
    double tol = 1e-9;
    std::size_t capacity = kDefaultSuperoperatorCap;
    /// Inverse-condition threshold below which the solve is flagged near-degenerate.
    double degeneracy_warning = 1e-6;
};

struct SolverDiagnostics {
    std::size_t liouvillian_dim = 0;
    std::size_t nonzeros = 0;
    /// 1 / (||A||_1 * est ||A^-1||_1) of the trace-bordered system.
    double inverse_condition = 0.0;
    bool near_degenerate = false;
    int condition_iterations = 0;
    /// min |U_ii| / max |U_ii| of the LU factors.
    double pivot_ratio = 0.0;
};

struct SteadyStateSolution {
    DensityMatrix rho;
    double residual_norm;
    SolverDiagnostics diagnostics;
};

namespace detail {

/// Sparse complex LU (UMFPACK) of a compressed column-major matrix, with
/// solves against A and A^H.
class SparseComplexLu {
public:
    explicit SparseComplexLu(const SparseMatrix& a) : a_(a) {
        a_.makeCompressed();
        umfpack_zi_defaults(control_);
        const int n = static_cast<int>(a_.rows());
        const auto* ax = reinterpret_cast<const double*>(a_.valuePtr());
        int status = umfpack_zi_symbolic(n, n, a_.outerIndexPtr(), a_.innerIndexPtr(), ax, nullptr,
                                         &symbolic_, control_, info_);
        if (status != UMFPACK_OK) {
            status_ = status;
            return;
        }
        status_ = umfpack_zi_numeric(a_.outerIndexPtr(), a_.innerIndexPtr(), ax, nullptr, symbolic_,
                                     &numeric_, control_, info_);
    }
    ~SparseComplexLu() {
        if (numeric_ != nullptr) umfpack_zi_free_numeric(&numeric_);
        if (symbolic_ != nullptr) umfpack_zi_free_symbolic(&symbolic_);
    }
    SparseComplexLu(const SparseComplexLu&) = delete;
    SparseComplexLu& operator=(const SparseComplexLu&) = delete;

    /// False if the factorization failed or hit an exactly singular pivot.
    bool ok() const noexcept { return status_ == UMFPACK_OK; }
    int status() const noexcept { return status_; }
    /// min |U_ii| / max |U_ii| as reported by UMFPACK.
    double pivot_ratio() const noexcept { return info_[UMFPACK_RCOND]; }

    Vector solve(const Vector& b) const { return run(UMFPACK_A, b); }
    Vector solve_adjoint(const Vector& b) const { return run(UMFPACK_At, b); }

private:
    Vector run(int sys, const Vector& b) const {
        Vector x(b.size());
        double info[UMFPACK_INFO];
        const int status = umfpack_zi_solve(sys, a_.outerIndexPtr(), a_.innerIndexPtr(),
                                            reinterpret_cast<const double*>(a_.valuePtr()), nullptr,
                                            reinterpret_cast<double*>(x.data()), nullptr,
                                            reinterpret_cast<const double*>(b.data()), nullptr, numeric_,
                                            control_, info);
        if (status != UMFPACK_OK) {
            x.setConstant(Complex(std::numeric_limits<double>::quiet_NaN(), 0.0));
        }
        return x;
    }

    SparseMatrix a_;
    void* symbolic_ = nullptr;
    void* numeric_ = nullptr;
    int status_ = UMFPACK_ERROR_internal_error;
    double control_[UMFPACK_CONTROL];
    double info_[UMFPACK_INFO];
};

/// Hager/Higham 1-norm estimate of A^{-1}, using the LU of A.
inline double inverse_one_norm_estimate(const SparseComplexLu& lu, Eigen::Index n, int& iterations) {
    Vector x = Vector::Constant(n, Complex(1.0 / static_cast<double>(n), 0.0));
    double est = 0.0;
    Eigen::Index last_j = -1;
    iterations = 0;
    for (int it = 0; it < 5; ++it) {
        ++iterations;
        const Vector y = lu.solve(x);
        est = y.cwiseAbs().sum();
        Vector xi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = std::abs(y(i));
            xi(i) = m > 0.0 ? y(i) / m : Complex(1.0, 0.0);
        }
        const Vector z = lu.solve_adjoint(xi);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= std::real(z.dot(x)) || j == last_j) {
            break;
        }
        x.setZero();
        x(j) = 1.0;
        last_j = j;
    }
    // Higham's alternating test vector guards against the rare underestimate.
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        b(i) = sign * (1.0 + static_cast<double>(i) / static_cast<double>(std::max<Eigen::Index>(n - 1, 1)));
    }
    const Vector yb = lu.solve(b);
    const double alt = 2.0 * yb.cwiseAbs().sum() / (3.0 * static_cast<double>(n));
    return std::max(est, alt);
}

inline double one_norm(const SparseMatrix& a) {
    double best = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

}  // namespace detail

/// Unique steady state of the model, found by replacing the first row of
/// the superoperator with the trace functional and solving the bordered
/// linear system with a sparse LU (UMFPACK).
inline SteadyStateSolution steady_state(const LindbladModel& model, const SteadyStateOptions& opts = {}) {
    const Eigen::Index d = model.dim();
    const SparseMatrix lv = build_superoperator(model, opts.capacity);
    const Eigen::Index n = lv.rows();

    double scale = 0.0;
    for (int k = 0; k < lv.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(lv, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    if (scale == 0.0) scale = 1.0;

    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(lv.nonZeros() + d));
    for (int k = 0; k < lv.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(lv, k); it; ++it) {
            if (it.row() != 0) trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        trips.emplace_back(0, static_cast<int>(i + i * d), Complex(scale, 0.0));
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();

    const detail::SparseComplexLu lu(a);
    if (!lu.ok()) {
        throw DegeneracyError("steady_state: bordered Liouvillian is singular (UMFPACK status "
                                  + std::to_string(lu.status()) + "); the steady state is not unique",
                              0.0);
    }
    Vector rhs = Vector::Zero(n);
    rhs(0) = scale;
    const Vector x = lu.solve(rhs);

    SolverDiagnostics diag;
    diag.liouvillian_dim = static_cast<std::size_t>(n);
    diag.nonzeros = static_cast<std::size_t>(lv.nonZeros());
    const double inv_norm = detail::inverse_one_norm_estimate(lu, n, diag.condition_iterations);
    diag.inverse_condition = 1.0 / (detail::one_norm(a) * inv_norm);
    diag.near_degenerate = diag.inverse_condition < opts.degeneracy_warning;
    diag.pivot_ratio = lu.pivot_ratio();

    if (!x.allFinite() || !(diag.inverse_condition > std::numeric_limits<double>::epsilon())) {
        throw DegeneracyError("steady_state: bordered Liouvillian is numerically singular (inverse condition "
                                  + std::to_string(diag.inverse_condition) + "); the steady state is not unique",
                              diag.inverse_condition);
    }

    Matrix rho = detail::unvec(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    const double residual = liouvillian_apply(model, rho).cwiseAbs().maxCoeff();
    if (!(residual < opts.tol)) {
        throw ConvergenceError("steady_state: residual " + std::to_string(residual) + " exceeds tolerance "
                                   + std::to_string(opts.tol),
                               residual);
    }
    try {
        return {DensityMatrix(model.space(), std::move(rho)), residual, diag};
    } catch (const InvalidArgument& e) {
        throw ConvergenceError(std::string("steady_state: solution violates state invariants: ") + e.what(), residual);
    }
}

/// Fixed-step RK4 integration of d rho/dt = L(rho), re-Hermitized and
/// trace-normalized after each step. Used as an independent check of
/// steady_state. The step is shrunk to t_final / ceil(t_final / dt).
inline DensityMatrix evolve(const LindbladModel& model, const DensityMatrix& rho0, double t_final, double dt,
                            std::size_t cap = kDefaultSuperoperatorCap) {
    if (!(dt > 0.0)) throw InvalidArgument("evolve: dt must be positive");
    if (!(t_final >= 0.0)) throw InvalidArgument("evolve: t_final must be non-negative");
    if (rho0.space() != model.space()) throw InvalidArgument("evolve: state and model spaces differ");
    if (t_final == 0.0) return rho0;

    const Eigen::Index d = model.dim();
    const SparseMatrix lv = build_superoperator(model, cap);
    const auto steps = static_cast<long>(std::ceil(t_final / dt));
    const double h = t_final / static_cast<double>(steps);

    Vector v = detail::vec(rho0.matrix());
    Vector k1, k2, k3, k4;
    for (long s = 0; s < steps; ++s) {
        k1 = lv * v;
        k2 = lv * (v + 0.5 * h * k1);
        k3 = lv * (v + 0.5 * h * k2);
        k4 = lv * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        Matrix rho = detail::unvec(v, d);
        const Complex tr = rho.trace();
        const double max_entry = rho.cwiseAbs().maxCoeff();
        if (!std::isfinite(max_entry) || std::abs(tr - 1.0) > 1e-6 || max_entry > 1.0 + 1e-6) {
            throw InstabilityError("evolve: integration unstable at step " + std::to_string(s)
                                   + " (trace drift " + std::to_string(std::abs(tr - 1.0))
                                   + "); use a smaller dt than " + std::to_string(h));
        }
        rho = 0.5 * (rho + rho.adjoint()).eval();
        rho /= tr.real();
        v = detail::vec(rho);
    }
    Matrix rho = detail::unvec(v, d);
    return {model.space(), std::move(rho)};
}

}  // namespace eitsim
