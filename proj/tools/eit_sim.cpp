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
 * eit_sim: steady-state cavity EIT spectra from the command line.
 *
 *   eit_sim eit-sweep   [--config F] [--atoms N] [--engine me|sc|both] --out F
 *   eit_sim cavity-scan [--config F] [--atoms 0|1] [--engine me|sc|both] --out F
 *   eit_sim analyze     --in F [--out F]
 *   eit_sim converge    [--config F] --nmax-list 1,2,3 [--deltas ...] --out F
 *   eit_sim show-config [--config F]
 *
 * Exit status: 0 success, 1 unexpected failure, 2 library error (a JSON
 * record is written to stderr), 3 some sweep points missed tolerance.
 */

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eitsim/config.hpp"
#include "eitsim/io.hpp"
#include "eitsim/semiclassical.hpp"
#include "eitsim/sweep.hpp"

namespace {

using eitsim::Engine;
using nlohmann::ordered_json;

constexpr int kExitError = 2;
constexpr int kExitUnconverged = 3;

std::vector<Engine> parse_engines(const std::string& name) {
    if (name == "me") return {Engine::master_equation};
    if (name == "sc") return {Engine::semiclassical};
    return {Engine::master_equation, Engine::semiclassical};
}

eitsim::RunConfig load(const std::string& path) {
    return path.empty() ? eitsim::RunConfig{} : eitsim::load_config(path);
}

/// Output stream for `path`; "-" is stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw eitsim::InvalidArgument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int report_unconverged(const std::vector<eitsim::SpectrumRecord>& records) {
    ordered_json bad = ordered_json::array();
    for (const auto& r : records) {
        if (!r.converged) bad.push_back(r.sweep_value);
    }
    if (bad.empty()) return 0;
    ordered_json err;
    err["error"] = "convergence";
    err["message"] = "steady state missed tolerance at some sweep points";
    err["unconverged_points_MHz"] = bad;
    std::cerr << err.dump() << '\n';
    return kExitUnconverged;
}

int run_sweep_command(const eitsim::SweepSpec& spec, const std::string& abscissa, const std::string& out_path,
                      bool deterministic) {
    const auto records = eitsim::run_sweep(spec);
    Output out(out_path);
    eitsim::write_spectrum_csv(out.stream(), records, abscissa, deterministic);
    return report_unconverged(records);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state cavity EIT spectra for five-level atoms in a driven lossy cavity"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "-";
    std::string in_path;
    std::string engine = "both";
    std::optional<int> atoms;
    bool deterministic = false;
    std::vector<int> nmax_list;
    std::vector<double> deltas;

    auto* sweep = app.add_subcommand("eit-sweep", "Transmission versus two-photon detuning");
    sweep->add_option("--config", config_path, "Configuration file (key = value)");
    sweep->add_option("--atoms", atoms, "Number of atoms (1 or 2)")->check(CLI::Range(1, 2));
    sweep->add_option("--engine", engine, "me, sc or both")->check(CLI::IsMember({"me", "sc", "both"}));
    sweep->add_option("--out", out_path, "Output CSV ('-' for stdout)")->required();
    sweep->add_flag("--deterministic", deterministic, "Omit the timestamp header line");

    auto* scan = app.add_subcommand("cavity-scan", "Transmission versus probe-cavity detuning");
    scan->add_option("--config", config_path, "Configuration file (key = value)");
    scan->add_option("--atoms", atoms, "0 (empty cavity) or 1 (atom held in g2)")->check(CLI::Range(0, 1));
    scan->add_option("--engine", engine, "me, sc or both")->check(CLI::IsMember({"me", "sc", "both"}));
    scan->add_option("--out", out_path, "Output CSV ('-' for stdout)")->required();
    scan->add_flag("--deterministic", deterministic, "Omit the timestamp header line");

    auto* analyze = app.add_subcommand("analyze", "Extrema report (JSON) for a spectrum CSV");
    analyze->add_option("--in", in_path, "Spectrum CSV")->required();
    analyze->add_option("--out", out_path, "Output JSON ('-' for stdout)");

    auto* converge = app.add_subcommand("converge", "Fock truncation convergence table");
    converge->add_option("--config", config_path, "Configuration file (key = value)");
    converge->add_option("--nmax-list", nmax_list, "Ascending truncations, e.g. 1,2,3")
        ->required()
        ->delimiter(',');
    converge->add_option("--deltas", deltas, "Two-photon detunings in MHz (default: 0, delta_abs, 1.5)")
        ->delimiter(',');
    converge->add_option("--out", out_path, "Output CSV ('-' for stdout)")->required();
    converge->add_flag("--deterministic", deterministic, "Omit the timestamp header line");

    auto* show = app.add_subcommand("show-config", "Print the effective configuration");
    show->add_option("--config", config_path, "Configuration file (key = value)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            const auto cfg = load(config_path);
            eitsim::SweepSpec spec;
            spec.variable = eitsim::SweepVariable::two_photon_delta;
            spec.start = cfg.start;
            spec.stop = cfg.stop;
            spec.n_points = cfg.n_points;
            spec.base_params = cfg.physics;
            if (atoms) spec.base_params.n_atoms = *atoms;
            spec.model = cfg.model;
            spec.engines = parse_engines(engine);
            spec.solver.tol = cfg.tol;
            return run_sweep_command(spec, "delta_MHz", out_path, deterministic);
        }
        if (*scan) {
            const auto cfg = load(config_path);
            eitsim::SweepSpec spec;
            spec.variable = eitsim::SweepVariable::probe_cavity_detuning;
            spec.start = cfg.cavity_start;
            spec.stop = cfg.cavity_stop;
            spec.n_points = cfg.cavity_points;
            spec.base_params = cfg.physics;
            spec.base_params.n_atoms = 1;
            spec.model = atoms.value_or(1) == 0 ? eitsim::ModelKind::empty_cavity : eitsim::ModelKind::two_level;
            spec.engines = parse_engines(engine);
            spec.solver.tol = cfg.tol;
            return run_sweep_command(spec, "detuning_MHz", out_path, deterministic);
        }
        if (*analyze) {
            std::ifstream in(in_path);
            if (!in) throw eitsim::InvalidArgument("cannot read '" + in_path + "'");
            const auto records = eitsim::read_spectrum_csv(in);
            auto report = eitsim::extrema_report(records);
            report["input"] = in_path;
            Output out(out_path);
            out.stream() << report.dump(2) << '\n';
            int status = 0;
            for (const auto& e : report["engines"]) {
                if (!e.contains("errors")) continue;
                for (const auto& err : e["errors"]) std::cerr << err.dump() << '\n';
                status = kExitError;
            }
            return status;
        }
        if (*converge) {
            const auto cfg = load(config_path);
            if (deltas.empty()) deltas = {0.0, eitsim::linear(eitsim::delta_abs(cfg.physics)), 1.5};
            eitsim::SteadyStateOptions opts;
            opts.tol = cfg.tol;
            const auto table = eitsim::convergence_study(cfg.physics, nmax_list, deltas, cfg.model, 0.01, opts);
            Output out(out_path);
            eitsim::write_convergence_csv(out.stream(), table, deterministic);
            ordered_json summary;
            summary["last_change"] = table.last_change;
            summary["converged"] = table.converged;
            std::cout << summary.dump() << '\n';
            return 0;
        }
        if (*show) {
            std::cout << eitsim::serialize_config(load(config_path));
            return 0;
        }
    } catch (const eitsim::Error& e) {
        ordered_json err;
        err["error"] = e.kind();
        err["message"] = e.what();
        if (const auto* ce = dynamic_cast<const eitsim::ConfigError*>(&e)) {
            err["key"] = ce->key();
            err["line"] = ce->line();
        }
        std::cerr << err.dump() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << R"({"error":"internal","message":)" << ordered_json(e.what()).dump() << "}\n";
        return 1;
    }
    return 0;
}
