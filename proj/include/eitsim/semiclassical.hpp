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
 * Closed-form linear response of a three-level (g1, g2, e) atom held in g2,
 * and the resulting input-output cavity transmission.
 *
 *   P(delta) = g^2 / D,   D = gamma + i D_p + (W^2 / 4) / (gamma_deph + i delta')
 *
 * with delta' = delta + light_shift, the same effective two-photon detuning
 * seen by g1 in the master-equation model. Re P is extra cavity loss
 * (absorption), Im P an extra cavity detuning (dispersion). The linear
 * susceptibility is proportional to i P: Im chi ~ Re P, Re chi ~ -Im P.
 */

#pragma once

#include <cmath>
#include <complex>

#include "eitsim/eit_model.hpp"
#include "eitsim/errors.hpp"

namespace eitsim {

struct AtomicResponse {
    double delta;          ///< two-photon detuning, rad/us
    Complex value;         ///< P(delta), rad/us
    double absorption_part() const { return value.real(); }
    double dispersion_part() const { return value.imag(); }
};

/// P(delta) for the g1/g2/e subsystem; `delta` in rad/us.
inline AtomicResponse atomic_response(const PhysicsParams& p, double delta) {
    if (!(p.gamma > 0.0)) throw InvalidArgument("atomic_response: gamma must be positive");
    const Complex I(0.0, 1.0);
    const double g = angular(p.g) * p.r_e;
    const double w = angular(p.omega_con) * p.c_e;
    const Complex optical = angular(p.gamma) + I * angular(p.delta_p);
    if (w == 0.0) {
        return {delta, g * g / optical};
    }
    // Multiplied through by (gamma_deph + i delta') so that the exact
    // transparency point gamma_deph = delta' = 0 is regular.
    const Complex ground = angular(p.gamma_deph) + I * (delta + angular(p.light_shift));
    return {delta, g * g * ground / (optical * ground + 0.25 * w * w)};
}

/// |kappa / (kappa + i D_pc + N P)|^2: transmission relative to the empty
/// cavity on resonance.
inline double cavity_transmission_semiclassical(const PhysicsParams& p, double delta, int n_atoms) {
    if (n_atoms < 0) throw InvalidArgument("transmission_semiclassical: n_atoms must be >= 0");
    const Complex I(0.0, 1.0);
    const double k = angular(p.kappa);
    const Complex resp = n_atoms == 0 ? Complex(0.0) : atomic_response(p, delta).value;
    return std::norm(k / (k + I * angular(p.delta_p_cav) + static_cast<double>(n_atoms) * resp));
}

/// Transmission relative to the empty cavity at the same probe-cavity detuning.
inline double transmission_semiclassical(const PhysicsParams& p, double delta, int n_atoms) {
    const double k = angular(p.kappa);
    const double dpc = angular(p.delta_p_cav);
    return cavity_transmission_semiclassical(p, delta, n_atoms) * (k * k + dpc * dpc) / (k * k);
}

namespace detail {
inline double control_detuning(const PhysicsParams& p) {
    if (p.delta_p == 0.0) {
        throw DomainError("dressed-state estimates need a nonzero control detuning");
    }
    return angular(p.delta_p);
}
}  // namespace detail

/// Position of the narrow absorption peak, W^2 / (4 D_con), rad/us.
/// Large-detuning estimate with D_con ~ D_p.
inline double delta_abs(const PhysicsParams& p) {
    const double w = angular(p.omega_con);
    return w * w / (4.0 * detail::control_detuning(p));
}

/// FWHM of the narrow absorption peak, gamma W^2 / (2 D_con^2), rad/us.
inline double linewidth_abs(const PhysicsParams& p) {
    const double w = angular(p.omega_con);
    const double dc = detail::control_detuning(p);
    return angular(p.gamma) * w * w / (2.0 * dc * dc);
}

/// Excited-state amplitude of the |+> dressed state, W / (2 D_con).
inline double epsilon_mixing(const PhysicsParams& p) {
    return angular(p.omega_con) / (2.0 * detail::control_detuning(p));
}

/// Principal square root of 1 + chi.
inline Complex refractive_index(Complex chi) {
    const Complex z = 1.0 + chi;
    if (z.imag() == 0.0 && z.real() < 0.0) {
        throw DomainError("refractive_index: 1 + chi lies on the branch cut");
    }
    return std::sqrt(z);
}

}  // namespace eitsim
