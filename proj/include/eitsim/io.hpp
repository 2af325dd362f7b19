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

// CSV serialization of spectra and convergence tables, and the JSON
// extrema report.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eitsim/errors.hpp"
#include "eitsim/sweep.hpp"

namespace eitsim {

/// 12 significant digits; NaN always prints as "nan".
inline std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// "# generated YYYY-MM-DDTHH:MM:SSZ"
inline std::string timestamp_line() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_spectrum_csv(std::ostream& out, std::span<const SpectrumRecord> records,
                               const std::string& abscissa, bool deterministic) {
    if (!deterministic) out << timestamp_line() << '\n';
    out << abscissa << ",T_rel,photon_number,absorption_part,dispersion_part,engine,residual\n";
    for (const auto& r : records) {
        out << format_value(r.sweep_value) << ',' << format_value(r.transmission_rel) << ','
            << format_value(r.photon_number) << ',' << format_value(r.absorption_part) << ','
            << format_value(r.dispersion_part) << ',' << tag(r.engine) << ',' << format_value(r.residual_norm)
            << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_cell(const std::string& s, int line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("spectrum CSV line " + std::to_string(line) + ": bad number '" + s + "'");
}

}  // namespace detail

/// Reads a file produced by write_spectrum_csv; '#' lines are skipped.
inline std::vector<SpectrumRecord> read_spectrum_csv(std::istream& in) {
    std::vector<SpectrumRecord> out;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = detail::split_csv(line);
        if (!header) {
            if (cells.size() != 7 || cells[1] != "T_rel" || cells[5] != "engine") {
                throw InvalidArgument("spectrum CSV: unexpected header '" + line + "'");
            }
            header = true;
            continue;
        }
        if (cells.size() != 7) {
            throw InvalidArgument("spectrum CSV line " + std::to_string(line_no) + ": expected 7 columns");
        }
        SpectrumRecord r;
        r.sweep_value = detail::parse_cell(cells[0], line_no);
        r.transmission_rel = detail::parse_cell(cells[1], line_no);
        r.photon_number = detail::parse_cell(cells[2], line_no);
        r.absorption_part = detail::parse_cell(cells[3], line_no);
        r.dispersion_part = detail::parse_cell(cells[4], line_no);
        if (cells[5] == "me") {
            r.engine = Engine::master_equation;
        } else if (cells[5] == "sc") {
            r.engine = Engine::semiclassical;
        } else {
            throw InvalidArgument("spectrum CSV line " + std::to_string(line_no) + ": unknown engine '" + cells[5]
                                  + "'");
        }
        r.residual_norm = detail::parse_cell(cells[6], line_no);
        r.converged = std::isfinite(r.transmission_rel);
        out.push_back(r);
    }
    if (!header) throw InvalidArgument("spectrum CSV: missing header");
    return out;
}

/// Per-engine extrema of T/T0. An extremum that cannot be located (for
/// example one on the window edge) is replaced by an error entry.
inline nlohmann::ordered_json extrema_report(std::span<const SpectrumRecord> records) {
    nlohmann::ordered_json report;
    report["engines"] = nlohmann::ordered_json::array();
    for (Engine engine : {Engine::master_equation, Engine::semiclassical}) {
        const auto rows = select(records, engine);
        if (rows.empty()) continue;
        nlohmann::ordered_json entry;
        entry["engine"] = tag(engine);
        entry["points"] = rows.size();
        nlohmann::ordered_json errors = nlohmann::ordered_json::array();
        auto locate = [&](auto finder, const char* x_key, const char* y_key) -> bool {
            try {
                const auto [x, y] = detail::curve(rows);
                const auto [xe, ye] = finder(x, y);
                entry[x_key] = xe;
                entry[y_key] = ye;
                return true;
            } catch (const Error& e) {
                errors.push_back({{"error", e.kind()}, {"message", e.what()}});
                return false;
            }
        };
        const bool has_max = locate([](const auto& x, const auto& y) { return find_maximum(x, y); },
                                    "delta_max_MHz", "T_max");
        const bool has_min = locate([](const auto& x, const auto& y) { return find_minimum(x, y); },
                                    "delta_min_MHz", "T_min");
        if (has_max && has_min) {
            entry["separation_MHz"] = entry["delta_min_MHz"].get<double>() - entry["delta_max_MHz"].get<double>();
        }
        if (!errors.empty()) entry["errors"] = errors;
        report["engines"].push_back(entry);
    }
    return report;
}

inline void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, bool deterministic) {
    if (!deterministic) out << timestamp_line() << '\n';
    out << "n_max,delta_MHz,photon_number,T_rel,change\n";
    for (const auto& r : table.rows) {
        out << r.n_max << ',' << format_value(r.delta) << ',' << format_value(r.photon_number) << ','
            << format_value(r.transmission_rel) << ',' << format_value(r.change) << '\n';
    }
}

}  // namespace eitsim
