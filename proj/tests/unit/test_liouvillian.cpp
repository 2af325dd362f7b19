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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "eitsim/eit_model.hpp"
#include "eitsim/liouvillian.hpp"

namespace {

using eitsim::Complex;
using eitsim::HilbertSpace;
using eitsim::LindbladModel;
using eitsim::Matrix;
using eitsim::OperatorMatrix;

Matrix random_matrix(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> dist;
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    }
    return m;
}

Matrix random_density(std::mt19937& rng, Eigen::Index n) {
    Matrix m = random_matrix(rng, n);
    Matrix rho = m * m.adjoint();
    return rho / rho.trace();
}

// Driven, damped cavity with a two-level atom coupled to it: a generic
// non-trivial model with several collapse channels.
LindbladModel jc_model(std::mt19937& rng) {
    HilbertSpace s({2, 4});
    auto a = eitsim::annihilation_operator(s, 1);
    auto sm = eitsim::transition_operator(s, 0, 1, 0);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    OperatorMatrix h = u(rng) * (a.dagger() * a) + u(rng) * (sm.dagger() * sm) + u(rng) * (a.dagger() * sm + sm.dagger() * a)
                       + u(rng) * (a + a.dagger());
    return LindbladModel(h, {std::sqrt(u(rng)) * a, std::sqrt(u(rng)) * sm, std::sqrt(u(rng)) * (sm.dagger() * sm)});
}

LindbladModel qubit_decay(double kappa) {
    HilbertSpace s({2});
    return LindbladModel(OperatorMatrix::zero(s), {std::sqrt(2.0 * kappa) * eitsim::transition_operator(s, 0, 1, 0)});
}

}  // namespace

TEST(LindbladModel, RejectsNonHermitianHamiltonian) {
    HilbertSpace s({2});
    EXPECT_THROW(LindbladModel(eitsim::transition_operator(s, 0, 1, 0), {}), eitsim::InvalidArgument);
}

TEST(LindbladModel, RejectsForeignCollapseOperator) {
    HilbertSpace s({2});
    EXPECT_THROW(LindbladModel(OperatorMatrix::zero(s), {OperatorMatrix::identity(HilbertSpace({3}))}),
                 eitsim::InvalidArgument);
}

TEST(LiouvillianApply, ZeroModelGivesZero) {
    std::mt19937 rng(1);
    HilbertSpace s({3});
    LindbladModel m(OperatorMatrix::zero(s), {});
    EXPECT_EQ(eitsim::liouvillian_apply(m, random_density(rng, 3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LiouvillianApply, PhotonDecay) {
    const double kappa = 0.7;
    HilbertSpace s({3});
    LindbladModel m(OperatorMatrix::zero(s), {std::sqrt(2.0 * kappa) * eitsim::annihilation_operator(s, 0)});
    Matrix rho = eitsim::DensityMatrix::basis_state(s, 1).matrix();
    Matrix want = Matrix::Zero(3, 3);
    want(0, 0) = 2.0 * kappa;
    want(1, 1) = -2.0 * kappa;
    EXPECT_LT((eitsim::liouvillian_apply(m, rho) - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LiouvillianApply, RejectsShapeMismatch) {
    EXPECT_THROW(eitsim::liouvillian_apply(qubit_decay(1.0), Matrix::Identity(3, 3)), eitsim::InvalidArgument);
}

TEST(LiouvillianApply, PreservesTraceAndHermiticity) {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = jc_model(rng);
        Matrix h = random_matrix(rng, 8);
        h = (h + h.adjoint()).eval();
        const Matrix out = eitsim::liouvillian_apply(m, h);
        EXPECT_LT(std::abs(out.trace()), 1e-12);
        EXPECT_LT((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(std::abs(eitsim::liouvillian_apply(m, random_matrix(rng, 8)).trace()), 1e-12);
    }
}

TEST(Superoperator, MatchesDirectApply) {
    std::mt19937 rng(3);
    const auto m = jc_model(rng);
    const eitsim::SparseMatrix lv = eitsim::build_superoperator(m);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix rho = random_matrix(rng, 8);
        const eitsim::Vector lhs = lv * eitsim::detail::vec(rho);
        const eitsim::Vector rhs = eitsim::detail::vec(eitsim::liouvillian_apply(m, rho));
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Superoperator, MatchesDirectApplyOnFiveLevelModel) {
    std::mt19937 rng(4);
    eitsim::PhysicsParams p;
    p.delta = 0.3;
    const auto m = eitsim::build_model(p);
    const eitsim::SparseMatrix lv = eitsim::build_superoperator(m);
    const double scale = eitsim::detail::one_norm(lv);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix rho = random_density(rng, m.dim());
        const eitsim::Vector lhs = lv * eitsim::detail::vec(rho);
        const eitsim::Vector rhs = eitsim::detail::vec(eitsim::liouvillian_apply(m, rho));
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Superoperator, QubitDecaySpectrum) {
    const double kappa = 1.3;
    const Matrix lv = Matrix(eitsim::build_superoperator(qubit_decay(kappa)));
    Eigen::ComplexEigenSolver<Matrix> es(lv);
    std::vector<double> re;
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(es.eigenvalues()(i).imag(), 0.0, 1e-12);
        re.push_back(es.eigenvalues()(i).real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -2.0 * kappa, 1e-12);
    EXPECT_NEAR(re[1], -kappa, 1e-12);
    EXPECT_NEAR(re[2], -kappa, 1e-12);
    EXPECT_NEAR(re[3], 0.0, 1e-12);
}

TEST(Superoperator, CapacityGuard) {
    HilbertSpace s({5, 5, 5, 3});  // d = 375, d^2 = 140625
    LindbladModel m(OperatorMatrix::zero(s), {});
    EXPECT_THROW(eitsim::build_superoperator(m), eitsim::CapacityError);
    EXPECT_THROW(eitsim::build_superoperator(qubit_decay(1.0), 3), eitsim::CapacityError);
    EXPECT_NO_THROW(eitsim::build_superoperator(qubit_decay(1.0), 4));
}

TEST(SteadyState, QubitDecaysToGround) {
    const auto sol = eitsim::steady_state(qubit_decay(0.5));
    EXPECT_NEAR(sol.rho.matrix()(0, 0).real(), 1.0, 1e-12);
    EXPECT_LT(sol.residual_norm, 1e-9);
    EXPECT_EQ(sol.diagnostics.liouvillian_dim, 4u);
}

TEST(SteadyState, DrivenCavityMatchesCoherentState) {
    eitsim::PhysicsParams p;
    p.n_max = 20;
    for (double eta : {0.3, 1.0, 2.5}) {
        for (double dpc : {0.0, 0.4, -1.1}) {
            p.delta_p_cav = dpc;
            const auto sol = eitsim::steady_state(eitsim::build(eitsim::ModelKind::empty_cavity, p, eta));
            const double want = eitsim::empty_cavity_photon_number(eta, p.kappa, dpc);
            EXPECT_NEAR(eitsim::photon_number(sol.rho) / want, 1.0, 1e-6) << eta << " " << dpc;
            EXPECT_LT(sol.residual_norm, 1e-9);
        }
    }
}

TEST(SteadyState, DefaultDriveGivesTenthOfAPhoton) {
    eitsim::PhysicsParams p;
    p.n_max = 12;
    const auto sol = eitsim::steady_state(eitsim::empty_cavity_model(p));
    EXPECT_NEAR(eitsim::photon_number(sol.rho), 0.1, 1e-6);
}

TEST(SteadyState, ContractOnRandomModels) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = jc_model(rng);
        const auto sol = eitsim::steady_state(m);
        EXPECT_LT(sol.residual_norm, 1e-9);
        EXPECT_LT(sol.rho.hermiticity_error(), 1e-10);
        EXPECT_NEAR(sol.rho.trace().real(), 1.0, 1e-10);
        EXPECT_GT(sol.rho.min_eigenvalue(), -1e-8);
        EXPECT_GT(sol.diagnostics.inverse_condition, 0.0);
    }
}

TEST(SteadyState, DegenerateModelRejected) {
    HilbertSpace s({3});
    LindbladModel closed(OperatorMatrix::zero(s), {});
    try {
        eitsim::steady_state(closed);
        FAIL() << "expected DegeneracyError";
    } catch (const eitsim::DegeneracyError& e) {
        EXPECT_LE(e.inverse_condition(), 1e-15);
    }
    // Level 1 is untouched by the decay 2 -> 0, so |0> and |1> are both stationary.
    LindbladModel two_ground(OperatorMatrix::zero(s), {eitsim::transition_operator(s, 0, 2, 0)});
    EXPECT_THROW(eitsim::steady_state(two_ground), eitsim::DegeneracyError);
}

TEST(SteadyState, TightToleranceRaisesConvergenceError) {
    eitsim::SteadyStateOptions opts;
    opts.tol = 0.0;
    try {
        eitsim::steady_state(eitsim::build_model(eitsim::PhysicsParams{}), opts);
        FAIL() << "expected ConvergenceError";
    } catch (const eitsim::ConvergenceError& e) {
        EXPECT_GE(e.residual(), 0.0);
    }
}

TEST(Evolve, ZeroTimeIsIdentity) {
    std::mt19937 rng(5);
    const auto m = jc_model(rng);
    eitsim::DensityMatrix rho0(m.space(), random_density(rng, 8));
    EXPECT_EQ(eitsim::evolve(m, rho0, 0.0, 0.01).matrix(), rho0.matrix());
}

TEST(Evolve, RejectsBadArguments) {
    const auto m = qubit_decay(1.0);
    const auto rho0 = eitsim::DensityMatrix::basis_state(m.space(), 1);
    EXPECT_THROW(eitsim::evolve(m, rho0, 1.0, 0.0), eitsim::InvalidArgument);
    EXPECT_THROW(eitsim::evolve(m, rho0, -1.0, 0.1), eitsim::InvalidArgument);
}

TEST(Evolve, QubitDecayMatchesExponential) {
    const double kappa = 0.5;
    const auto m = qubit_decay(kappa);
    const auto rho = eitsim::evolve(m, eitsim::DensityMatrix::basis_state(m.space(), 1), 1.0, 1e-3);
    EXPECT_NEAR(rho.matrix()(1, 1).real(), std::exp(-2.0 * kappa), 1e-10);
}

TEST(Evolve, EmptyCavityFillsToAnalyticValue) {
    eitsim::PhysicsParams p;
    p.n_max = 10;
    p.delta_p_cav = 0.3;
    const auto m = eitsim::empty_cavity_model(p);
    const double kappa = eitsim::angular(p.kappa);
    const auto rho = eitsim::evolve(m, eitsim::prepared_state(eitsim::ModelKind::empty_cavity, p), 40.0 / kappa, 1e-3);
    const double want = eitsim::empty_cavity_photon_number(eitsim::probe_drive(p), p.kappa, p.delta_p_cav);
    EXPECT_NEAR(eitsim::photon_number(rho), want, 1e-6);
    EXPECT_NEAR(want, p.n_p, 1e-12);
}

TEST(Evolve, AgreesWithSteadyStateTwoLevel) {
    eitsim::PhysicsParams p;
    p.n_p = 0.001;
    const auto m = eitsim::two_level_model(p);
    const double t = 20.0 / eitsim::angular(p.kappa);
    const auto rho = eitsim::evolve(m, eitsim::prepared_state(eitsim::ModelKind::two_level, p), t, 2e-4);
    EXPECT_LT(eitsim::trace_distance(rho.matrix(), eitsim::steady_state(m).rho.matrix()), 1e-6);
}

TEST(Evolve, AgreesWithSteadyStateFiveLevelAtLongTimes) {
    // The slowest decay rate of this model is about 0.6 rad/us, so 20/kappa
    // is not enough; 50 us is.
    eitsim::PhysicsParams p;
    const auto m = eitsim::build_model(p);
    const auto rho = eitsim::evolve(m, eitsim::prepared_state(eitsim::ModelKind::five_level, p), 50.0, 4e-4);
    EXPECT_LT(eitsim::trace_distance(rho.matrix(), eitsim::steady_state(m).rho.matrix()), 1e-6);
}

TEST(Evolve, DetectsInstability) {
    eitsim::PhysicsParams p;
    const auto m = eitsim::build_model(p);
    EXPECT_THROW(eitsim::evolve(m, eitsim::prepared_state(eitsim::ModelKind::five_level, p), 1.0, 0.05),
                 eitsim::InstabilityError);
}
