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
 * Quasi-static parameter sweeps: one independent steady state per grid point.
 *
 * Two sweep variables are supported:
 *
 *  - two_photon_delta: the control frequency is scanned (delta varies) with
 *    the probe and cavity fixed. T/T0 is relative to the empty cavity at the
 *    same probe-cavity detuning.
 *  - probe_cavity_detuning: the probe laser is scanned across the cavity at
 *    fixed probe power. D_pc, D_p and delta all move together; T/T0 is
 *    relative to the empty-cavity peak.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "eitsim/eit_model.hpp"
#include "eitsim/errors.hpp"
#include "eitsim/liouvillian.hpp"
#include "eitsim/semiclassical.hpp"

namespace eitsim {

enum class SweepVariable { two_photon_delta, probe_cavity_detuning };

enum class Engine { master_equation, semiclassical };

/// Short tag used in CSV output; also the tie-break order within a grid point.
inline const char* tag(Engine e) { return e == Engine::master_equation ? "me" : "sc"; }

struct SweepSpec {
    SweepVariable variable = SweepVariable::two_photon_delta;
    double start = -0.9;  ///< MHz
    double stop = 1.7;    ///< MHz
    int n_points = 261;
    PhysicsParams base_params;
    ModelKind model = ModelKind::five_level;
    std::vector<Engine> engines{Engine::master_equation};
    SteadyStateOptions solver;
    /// Worker threads; 0 means EIT_SIM_THREADS or the hardware concurrency.
    unsigned threads = 0;
};

struct SpectrumRecord {
    double sweep_value = 0.0;  ///< MHz
    double transmission_rel = 0.0;
    double photon_number = 0.0;
    double absorption_part = std::numeric_limits<double>::quiet_NaN();  ///< rad/us, semiclassical only
    double dispersion_part = std::numeric_limits<double>::quiet_NaN();  ///< rad/us, semiclassical only
    double residual_norm = 0.0;
    Engine engine = Engine::master_equation;
    bool converged = true;
};

/// Uniform grid of n points from start to stop inclusive.
inline std::vector<double> sweep_grid(double start, double stop, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double step = (stop - start) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EIT_SIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Exceptions are
/// collected per index and the lowest-index one is rethrown.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::min<std::size_t>(threads, std::max<std::size_t>(n, 1));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline void validate(const SweepSpec& spec) {
    if (!(spec.start < spec.stop)) throw InvalidArgument("SweepSpec: start must be below stop");
    if (spec.n_points < 2) throw InvalidArgument("SweepSpec: n_points must be >= 2");
    if (spec.engines.empty()) throw InvalidArgument("SweepSpec: no engine selected");
    validate(spec.base_params);
}

namespace detail {

/// Parameters for one grid point.
inline PhysicsParams point_params(const SweepSpec& spec, double value) {
    PhysicsParams p = spec.base_params;
    if (spec.variable == SweepVariable::two_photon_delta) {
        p.delta = value;
    } else {
        const double shift = value - spec.base_params.delta_p_cav;
        p.delta_p_cav = value;
        p.delta_p += shift;
        p.delta += shift;
    }
    return p;
}

inline int semiclassical_atoms(const SweepSpec& spec) {
    return spec.model == ModelKind::empty_cavity ? 0 : spec.base_params.n_atoms;
}

inline SpectrumRecord semiclassical_record(const SweepSpec& spec, double value, double eta) {
    PhysicsParams p = point_params(spec, value);
    if (spec.model == ModelKind::two_level) p.omega_con = 0.0;
    const int n = semiclassical_atoms(spec);
    SpectrumRecord r;
    r.sweep_value = value;
    r.engine = Engine::semiclassical;
    if (n > 0) {
        const auto resp = atomic_response(p, angular(p.delta));
        r.absorption_part = resp.absorption_part();
        r.dispersion_part = resp.dispersion_part();
    } else {
        r.absorption_part = 0.0;
        r.dispersion_part = 0.0;
    }
    const double k = angular(p.kappa);
    const double rel_peak = cavity_transmission_semiclassical(p, angular(p.delta), n);
    r.photon_number = rel_peak * eta * eta / (k * k);
    r.transmission_rel = spec.variable == SweepVariable::two_photon_delta
                             ? transmission_semiclassical(p, angular(p.delta), n)
                             : rel_peak;
    return r;
}

template <typename E>
[[noreturn]] inline void rethrow_at(const E& e, double value) {
    throw E(e.what() + std::string(" [sweep value ") + std::to_string(value) + " MHz]");
}

}  // namespace detail

/// One record per grid point and engine, ordered by sweep value then
/// engine tag. Master-equation points whose solve misses tolerance are
/// returned with converged = false and NaN observables.
inline std::vector<SpectrumRecord> run_sweep(const SweepSpec& spec) {
    validate(spec);
    std::vector<Engine> engines = spec.engines;
    std::sort(engines.begin(), engines.end(),
              [](Engine a, Engine b) { return std::string(tag(a)) < std::string(tag(b)); });
    engines.erase(std::unique(engines.begin(), engines.end()), engines.end());

    const bool use_me = std::find(engines.begin(), engines.end(), Engine::master_equation) != engines.end();
    const double eta = probe_drive(spec.base_params);
    const double ref_detuning =
        spec.variable == SweepVariable::two_photon_delta ? spec.base_params.delta_p_cav : 0.0;

    const auto grid = sweep_grid(spec.start, spec.stop, spec.n_points);
    double reference = 0.0;
    if (use_me) {
        try {
            detail::check_capacity(static_cast<Eigen::Index>(model_space(spec.model, spec.base_params).total_dim()),
                                   spec.solver.capacity);
        } catch (const CapacityError& err) {
            detail::rethrow_at(err, grid.front());
        }
        if (!(empty_cavity_photon_number(eta, spec.base_params.kappa, ref_detuning) >= 1e-15)) {
            throw InvalidArgument("run_sweep: probe photon number n_p must be positive");
        }
        reference = empty_cavity_reference(spec.base_params, eta, ref_detuning, spec.solver);
    }

    const std::size_t per_point = engines.size();
    std::vector<SpectrumRecord> out(grid.size() * per_point);

    parallel_for(grid.size(), resolve_threads(spec.threads), [&](std::size_t i) {
        const double value = grid[i];
        for (std::size_t e = 0; e < per_point; ++e) {
            SpectrumRecord& r = out[i * per_point + e];
            if (engines[e] == Engine::semiclassical) {
                r = detail::semiclassical_record(spec, value, eta);
                continue;
            }
            r.sweep_value = value;
            r.engine = Engine::master_equation;
            try {
                const PhysicsParams p = detail::point_params(spec, value);
                const auto sol = steady_state(build(spec.model, p, eta, spec.solver.capacity), spec.solver);
                r.photon_number = photon_number(sol.rho);
                r.transmission_rel = r.photon_number / reference;
                r.residual_norm = sol.residual_norm;
            } catch (const ConvergenceError& err) {
                r.converged = false;
                r.residual_norm = err.residual();
                r.photon_number = std::numeric_limits<double>::quiet_NaN();
                r.transmission_rel = std::numeric_limits<double>::quiet_NaN();
            } catch (const CapacityError& err) {
                detail::rethrow_at(err, value);
            } catch (const DegeneracyError& err) {
                throw DegeneracyError(err.what() + std::string(" [sweep value ") + std::to_string(value) + " MHz]",
                                      err.inverse_condition());
            }
        }
    });
    return out;
}

/// Records of one engine, in sweep order.
inline std::vector<SpectrumRecord> select(std::span<const SpectrumRecord> records, Engine engine) {
    std::vector<SpectrumRecord> out;
    for (const auto& r : records) {
        if (r.engine == engine) out.push_back(r);
    }
    return out;
}

struct Extrema {
    double delta_max;
    double t_max;
    double delta_min;
    double t_min;
};

namespace detail {

/// Vertex of the parabola through three points.
inline std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (a == 0.0) return {x1, y1};
    const double b = d01 - a * (x0 + x1);
    const double xv = -b / (2.0 * a);
    const double yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    return {xv, yv};
}

}  // namespace detail

namespace detail {

inline void check_samples(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("find_extrema: size mismatch");
    if (x.size() < 5) throw InvalidArgument("find_extrema: need at least 5 points");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw InvalidArgument("find_extrema: non-finite sample");
        }
        if (i > 0 && !(x[i] > x[i - 1])) throw InvalidArgument("find_extrema: abscissa not increasing");
    }
}

inline std::pair<double, double> refine_at(std::span<const double> x, std::span<const double> y, std::size_t i,
                                           const char* what) {
    if (i == 0 || i + 1 == x.size()) {
        throw EdgeExtremumError(std::string("find_extrema: ") + what + " at window edge x = " + std::to_string(x[i]));
    }
    return parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1]);
}

}  // namespace detail

/// Global maximum (x, y) of a sampled curve, refined by a parabola through
/// the grid maximum and its two neighbours.
inline std::pair<double, double> find_maximum(std::span<const double> x, std::span<const double> y) {
    detail::check_samples(x, y);
    const auto i = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    return detail::refine_at(x, y, i, "maximum");
}

inline std::pair<double, double> find_minimum(std::span<const double> x, std::span<const double> y) {
    detail::check_samples(x, y);
    const auto i = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
    return detail::refine_at(x, y, i, "minimum");
}

inline Extrema find_extrema(std::span<const double> x, std::span<const double> y) {
    const auto [xmax, ymax] = find_maximum(x, y);
    const auto [xmin, ymin] = find_minimum(x, y);
    return {xmax, ymax, xmin, ymin};
}

namespace detail {

inline std::pair<std::vector<double>, std::vector<double>> curve(std::span<const SpectrumRecord> records) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        if (r.engine != records.front().engine) {
            throw InvalidArgument("find_extrema: records from more than one engine");
        }
        x.push_back(r.sweep_value);
        y.push_back(r.transmission_rel);
    }
    return {x, y};
}

}  // namespace detail

/// Extrema of T/T0 for records from a single engine.
inline Extrema find_extrema(std::span<const SpectrumRecord> records) {
    const auto [x, y] = detail::curve(records);
    return find_extrema(x, y);
}

struct ConvergenceRow {
    int n_max;
    double delta;          ///< MHz
    double photon_number;
    double transmission_rel;  ///< NaN when n_p = 0
    double change;         ///< versus the previous truncation; NaN for the first
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  ///< ordered by n_max, then delta
    /// max |change| between the two largest truncations
    double last_change = 0.0;
    bool converged = true;
};

/// Steady-state T/T0 at each delta for every truncation in `n_max_list`.
/// Non-convergence is flagged when the two largest truncations differ by
/// more than `threshold`. With n_p = 0 the photon numbers are compared.
inline ConvergenceTable convergence_study(const PhysicsParams& params, std::span<const int> n_max_list,
                                          std::span<const double> deltas,
                                          ModelKind kind = ModelKind::five_level, double threshold = 0.01,
                                          const SteadyStateOptions& opts = {}) {
    if (n_max_list.empty() || deltas.empty()) throw InvalidArgument("convergence_study: empty input");
    for (std::size_t i = 1; i < n_max_list.size(); ++i) {
        if (!(n_max_list[i] > n_max_list[i - 1])) {
            throw InvalidArgument("convergence_study: n_max_list must be strictly ascending");
        }
    }
    const bool driven = params.n_p > 0.0;
    ConvergenceTable table;
    std::vector<double> previous(deltas.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t m = 0; m < n_max_list.size(); ++m) {
        PhysicsParams p = params;
        p.n_max = n_max_list[m];
        const double reference = driven ? empty_cavity_reference(p, probe_drive(p), p.delta_p_cav, opts) : 0.0;
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            p.delta = deltas[k];
            const auto sol = steady_state(build(kind, p, std::nullopt, opts.capacity), opts);
            ConvergenceRow row;
            row.n_max = p.n_max;
            row.delta = p.delta;
            row.photon_number = photon_number(sol.rho);
            row.transmission_rel = driven ? row.photon_number / reference : std::numeric_limits<double>::quiet_NaN();
            const double value = driven ? row.transmission_rel : row.photon_number;
            row.change = value - previous[k];
            previous[k] = value;
            table.rows.push_back(row);
            if (m + 1 == n_max_list.size() && m > 0) {
                table.last_change = std::max(table.last_change, std::abs(row.change));
            }
        }
    }
    table.converged = table.last_change <= threshold;
    return table;
}

}  // namespace eitsim
