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
 * N five-level atoms in a probe-driven lossy cavity mode.
 *
 * Atomic levels (five-level scheme):
 *
 *        f  ------------   (omega_f above e)         cavity: g2 <-> d, e, f
 *        e  ------------                             control: g1 <-> d, e
 *        d  ------------   (omega_d relative to e)
 *
 *   g1 ----                ---- g2
 *
 * Frame: cavity and optical coherences rotate at the probe frequency, g1
 * at the control frequency. With all frequencies in angular units,
 *
 *   H = -D_pc a^H a + eta (a + a^H)
 *       + sum_j [ -(delta + LS) |g1><g1| - sum_k (D_p - w_k) |k><k|
 *                 + sum_k g r_k (a^H |g2><k| + a |k><g2|)
 *                 + sum_{k=d,e} (W c_k / 2)(|k><g1| + |g1><k|) ]
 *
 * and the dissipators are sqrt(2 gamma b_{k->g}) |g><k|, sqrt(2 kappa) a and
 * sqrt(2 gamma_deph) |g1><g1|. gamma and kappa are amplitude (HWHM) rates.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eitsim/errors.hpp"
#include "eitsim/liouvillian.hpp"
#include "eitsim/quantum_core.hpp"

namespace eitsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Linear frequency in MHz to angular frequency in rad/us.
constexpr double angular(double mhz) noexcept { return kTwoPi * mhz; }
/// Angular frequency in rad/us to linear frequency in MHz.
constexpr double linear(double rad_per_us) noexcept { return rad_per_us / kTwoPi; }

/// Decay branching of one excited level into the two ground states.
struct Branching {
    double to_g1 = 0.0;
    double to_g2 = 1.0;
    bool operator==(const Branching&) const = default;
};

/// Physical parameters. Frequencies and rates are linear (nu = omega / 2 pi)
/// in MHz; defaults are the fitted single-atom parameter set. Hyperfine
/// offsets and branching ratios are cesium D2 reference data.
struct PhysicsParams {
    double g = 3.0;             ///< cavity coupling on g2 <-> e
    double omega_con = 2.8;     ///< control Rabi frequency on g1 <-> e
    double gamma = 2.6;         ///< atomic dipole decay (HWHM)
    double kappa = 0.4;         ///< cavity field decay (HWHM)
    double gamma_deph = 0.15;   ///< ground-state dephasing
    double delta_p = 20.0;      ///< probe detuning from g2 <-> e
    double delta_p_cav = 0.0;   ///< probe detuning from the empty cavity
    double delta = 0.0;         ///< two-photon detuning D_p - D_con
    double n_p = 0.1;           ///< empty-cavity photon number set by the probe
    double light_shift = 0.1;   ///< differential shift of g1
    int n_max = 2;              ///< Fock truncation: photon numbers 0..n_max
    int n_atoms = 1;

    double omega_d = -201.2;    ///< d relative to e
    double omega_f = 251.0;     ///< f relative to e

    double r_d = 1.0, r_e = 1.0, r_f = 1.0;  ///< cavity coupling ratios
    double c_d = 1.0, c_e = 1.0;             ///< control coupling ratios

    Branching b_d{0.75, 0.25};
    Branching b_e{5.0 / 12.0, 7.0 / 12.0};
    Branching b_f{0.0, 1.0};

    bool operator==(const PhysicsParams&) const = default;
};

inline void validate(const PhysicsParams& p) {
    auto finite = [](const char* name, double v) {
        if (!std::isfinite(v)) throw InvalidArgument(std::string("PhysicsParams: ") + name + " is not finite");
    };
    auto nonneg = [&](const char* name, double v) {
        finite(name, v);
        if (v < 0.0) throw InvalidArgument(std::string("PhysicsParams: ") + name + " must be >= 0");
    };
    nonneg("g", p.g);
    nonneg("omega_con", p.omega_con);
    nonneg("gamma", p.gamma);
    nonneg("kappa", p.kappa);
    nonneg("gamma_deph", p.gamma_deph);
    nonneg("n_p", p.n_p);
    nonneg("r_d", p.r_d);
    nonneg("r_e", p.r_e);
    nonneg("r_f", p.r_f);
    nonneg("c_d", p.c_d);
    nonneg("c_e", p.c_e);
    finite("delta_p", p.delta_p);
    finite("delta_p_cav", p.delta_p_cav);
    finite("delta", p.delta);
    finite("light_shift", p.light_shift);
    finite("omega_d", p.omega_d);
    finite("omega_f", p.omega_f);
    if (p.n_max < 1) throw InvalidArgument("PhysicsParams: n_max must be >= 1");
    if (p.n_atoms < 1 || p.n_atoms > 2) throw InvalidArgument("PhysicsParams: n_atoms must be 1 or 2");
    auto branch = [&](const char* name, const Branching& b) {
        nonneg(name, b.to_g1);
        nonneg(name, b.to_g2);
        if (std::abs(b.to_g1 + b.to_g2 - 1.0) > 1e-12) {
            throw InvalidArgument(std::string("PhysicsParams: branching of ") + name + " must sum to 1");
        }
    };
    branch("d", p.b_d);
    branch("e", p.b_e);
    branch("f", p.b_f);
    if (p.b_f.to_g1 != 0.0) throw InvalidArgument("PhysicsParams: decay f -> g1 is dipole forbidden");
}

/// Which restriction of the atomic level scheme to build.
enum class ModelKind {
    five_level,    ///< g1, g2, d, e, f
    three_level,   ///< g1, g2, e
    two_level,     ///< g2, e with closed decay e -> g2; no control
    empty_cavity,  ///< no atoms
};

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::five_level: return "five_level";
        case ModelKind::three_level: return "three_level";
        case ModelKind::two_level: return "two_level";
        case ModelKind::empty_cavity: return "empty_cavity";
    }
    return "unknown";
}

/// Probe drive amplitude eta (rad/us) giving <a^H a> = n_p in the empty
/// cavity at the configured probe-cavity detuning.
inline double probe_drive(const PhysicsParams& p) {
    const double k = angular(p.kappa);
    const double dpc = angular(p.delta_p_cav);
    return std::sqrt(p.n_p * (k * k + dpc * dpc));
}

/// Analytic empty-cavity photon number eta^2 / (kappa^2 + D_pc^2).
inline double empty_cavity_photon_number(double eta, double kappa_mhz, double delta_p_cav_mhz) {
    const double k = angular(kappa_mhz);
    const double dpc = angular(delta_p_cav_mhz);
    return eta * eta / (k * k + dpc * dpc);
}

namespace detail {

struct ExcitedLevel {
    double offset;      // MHz, relative to e
    double cavity;      // coupling ratio r_k
    double control;     // control ratio c_k
    Branching decay;
};

struct LevelScheme {
    bool has_g1;
    std::vector<ExcitedLevel> excited;

    std::size_t size() const { return (has_g1 ? 2 : 1) + excited.size(); }
    std::size_t g1() const { return 0; }
    std::size_t g2() const { return has_g1 ? 1 : 0; }
    std::size_t excited_index(std::size_t k) const { return (has_g1 ? 2 : 1) + k; }
};

inline LevelScheme scheme_for(ModelKind kind, const PhysicsParams& p) {
    switch (kind) {
        case ModelKind::five_level:
            return {true,
                    {{p.omega_d, p.r_d, p.c_d, p.b_d}, {0.0, p.r_e, p.c_e, p.b_e}, {p.omega_f, p.r_f, 0.0, p.b_f}}};
        case ModelKind::three_level:
            return {true, {{0.0, p.r_e, p.c_e, p.b_e}}};
        case ModelKind::two_level:
            return {false, {{0.0, p.r_e, 0.0, Branching{0.0, 1.0}}}};
        case ModelKind::empty_cavity:
            return {false, {}};
    }
    throw InvalidArgument("unknown model kind");
}

}  // namespace detail

/// Level indices of the five-level scheme.
namespace level {
inline constexpr std::size_t g1 = 0;
inline constexpr std::size_t g2 = 1;
inline constexpr std::size_t d = 2;
inline constexpr std::size_t e = 3;
inline constexpr std::size_t f = 4;
}  // namespace level

/// Hilbert space of the chosen restriction: atoms first, cavity last.
inline HilbertSpace model_space(ModelKind kind, const PhysicsParams& p) {
    const auto nm = static_cast<std::size_t>(p.n_max);
    if (kind == ModelKind::empty_cavity) return HilbertSpace({nm + 1});
    const auto scheme = detail::scheme_for(kind, p);
    return HilbertSpace::atoms_and_cavity(static_cast<std::size_t>(p.n_atoms), scheme.size(), nm);
}

/// Assembles the Lindblad model for `kind`. `drive` overrides the probe
/// amplitude eta (rad/us); by default it is probe_drive(p).
inline LindbladModel build(ModelKind kind, const PhysicsParams& p, std::optional<double> drive = std::nullopt,
                           std::size_t cap = kDefaultSuperoperatorCap) {
    validate(p);
    const HilbertSpace space = model_space(kind, p);
    detail::check_capacity(static_cast<Eigen::Index>(space.total_dim()), cap);

    const std::size_t cav = space.num_subsystems() - 1;
    const OperatorMatrix a = annihilation_operator(space, cav);
    const OperatorMatrix ad = a.dagger();
    const double eta = drive.value_or(probe_drive(p));

    OperatorMatrix h = (-angular(p.delta_p_cav)) * (ad * a) + eta * (a + ad);
    std::vector<OperatorMatrix> collapse;
    if (p.kappa > 0.0) collapse.push_back(std::sqrt(2.0 * angular(p.kappa)) * a);

    if (kind != ModelKind::empty_cavity) {
        const auto scheme = detail::scheme_for(kind, p);
        const double dp = angular(p.delta_p);
        const double g = angular(p.g);
        const double w = angular(p.omega_con);
        const double gam = angular(p.gamma);
        for (std::size_t j = 0; j < static_cast<std::size_t>(p.n_atoms); ++j) {
            if (scheme.has_g1) {
                h = h + (-angular(p.delta + p.light_shift)) * basis_projector(space, j, scheme.g1());
                if (p.gamma_deph > 0.0) {
                    collapse.push_back(std::sqrt(2.0 * angular(p.gamma_deph)) * basis_projector(space, j, scheme.g1()));
                }
            }
            for (std::size_t k = 0; k < scheme.excited.size(); ++k) {
                const auto& lvl = scheme.excited[k];
                const std::size_t ik = scheme.excited_index(k);
                h = h + (-(dp - angular(lvl.offset))) * basis_projector(space, j, ik);

                const OperatorMatrix lower_g2 = transition_operator(space, j, ik, scheme.g2());
                if (lvl.cavity != 0.0) {
                    const OperatorMatrix coupling = ad * lower_g2;
                    h = h + (g * lvl.cavity) * (coupling + coupling.dagger());
                }
                if (lvl.decay.to_g2 > 0.0) {
                    collapse.push_back(std::sqrt(2.0 * gam * lvl.decay.to_g2) * lower_g2);
                }
                if (scheme.has_g1) {
                    const OperatorMatrix lower_g1 = transition_operator(space, j, ik, scheme.g1());
                    if (lvl.control != 0.0) {
                        h = h + (0.5 * w * lvl.control) * (lower_g1 + lower_g1.dagger());
                    }
                    if (lvl.decay.to_g1 > 0.0) {
                        collapse.push_back(std::sqrt(2.0 * gam * lvl.decay.to_g1) * lower_g1);
                    }
                }
            }
        }
    }
    return LindbladModel(std::move(h), std::move(collapse));
}

/// All atoms in g2, cavity in vacuum.
inline DensityMatrix prepared_state(ModelKind kind, const PhysicsParams& p) {
    const HilbertSpace space = model_space(kind, p);
    std::vector<std::size_t> levels(space.num_subsystems(), 0);
    if (kind != ModelKind::empty_cavity) {
        const auto g2 = detail::scheme_for(kind, p).g2();
        for (std::size_t j = 0; j + 1 < levels.size(); ++j) levels[j] = g2;
    }
    return DensityMatrix::basis_state(space, space.index_of(levels));
}

/// Full five-level model.
inline LindbladModel build_model(const PhysicsParams& p, std::size_t cap = kDefaultSuperoperatorCap) {
    return build(ModelKind::five_level, p, std::nullopt, cap);
}

/// {g1, g2, e} restriction (no coupling to d, f).
inline LindbladModel three_level_model(const PhysicsParams& p, std::size_t cap = kDefaultSuperoperatorCap) {
    return build(ModelKind::three_level, p, std::nullopt, cap);
}

/// Closed g2 <-> e transition, i.e. an atom held in g2 with no EIT.
inline LindbladModel two_level_model(const PhysicsParams& p, std::size_t cap = kDefaultSuperoperatorCap) {
    return build(ModelKind::two_level, p, std::nullopt, cap);
}

inline LindbladModel empty_cavity_model(const PhysicsParams& p, std::size_t cap = kDefaultSuperoperatorCap) {
    return build(ModelKind::empty_cavity, p, std::nullopt, cap);
}

/// <a^H a> in a state whose last subsystem is the cavity.
inline double photon_number(const DensityMatrix& rho) {
    const auto& space = rho.space();
    const OperatorMatrix a = annihilation_operator(space, space.num_subsystems() - 1);
    return expectation(rho, a.dagger() * a).real();
}

/// Photon number of the truncated empty cavity driven with amplitude
/// `eta` at probe-cavity detuning `delta_p_cav` (MHz). Converges to
/// empty_cavity_photon_number as n_max grows.
inline double empty_cavity_reference(const PhysicsParams& p, double eta, double delta_p_cav,
                                     const SteadyStateOptions& opts = {}) {
    PhysicsParams q = p;
    q.delta_p_cav = delta_p_cav;
    return photon_number(steady_state(build(ModelKind::empty_cavity, q, eta, opts.capacity), opts).rho);
}

/// Steady-state photon number relative to the empty cavity at the same
/// drive, probe-cavity detuning and Fock truncation.
inline double relative_transmission(const SteadyStateSolution& solution, const PhysicsParams& p,
                                    std::optional<double> drive = std::nullopt) {
    const double eta = drive.value_or(probe_drive(p));
    if (!(empty_cavity_photon_number(eta, p.kappa, p.delta_p_cav) >= 1e-15)) {
        throw InvalidArgument("relative_transmission: empty-cavity photon number is zero (n_p = 0?)");
    }
    return photon_number(solution.rho) / empty_cavity_reference(p, eta, p.delta_p_cav);
}

/// |<a>|^2 relative to the empty cavity: the elastically transmitted part
/// of relative_transmission.
inline double coherent_transmission(const SteadyStateSolution& solution, const PhysicsParams& p,
                                    std::optional<double> drive = std::nullopt) {
    const double eta = drive.value_or(probe_drive(p));
    const double ref = empty_cavity_photon_number(eta, p.kappa, p.delta_p_cav);
    if (!(ref >= 1e-15)) {
        throw InvalidArgument("coherent_transmission: empty-cavity photon number is zero (n_p = 0?)");
    }
    const auto& space = solution.rho.space();
    const OperatorMatrix a = annihilation_operator(space, space.num_subsystems() - 1);
    return std::norm(expectation(solution.rho, a)) / ref;
}

}  // namespace eitsim
