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
 * Flat run configuration: one `key = value` per line, `#` starts a comment.
 * All frequencies are linear MHz. Unknown and repeated keys are rejected.
 */

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "eitsim/eit_model.hpp"
#include "eitsim/errors.hpp"

namespace eitsim {

struct RunConfig {
    PhysicsParams physics;
    ModelKind model = ModelKind::five_level;
    // two-photon detuning sweep window, MHz
    double start = -0.9;
    double stop = 1.7;
    int n_points = 261;
    // probe-cavity detuning scan window, MHz
    double cavity_start = -3.0;
    double cavity_stop = 3.0;
    int cavity_points = 121;
    double tol = 1e-9;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ConfigKey {
    const char* name;
    std::function<bool(RunConfig&, std::string_view)> parse;
    std::function<std::string(const RunConfig&)> format;
};

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

template <typename Field>
ConfigKey number_key(const char* name, Field field) {
    return {name,
            [field](RunConfig& c, std::string_view v) { return parse_number(v, field(c)); },
            [field](const RunConfig& c) {
                const auto& value = field(const_cast<RunConfig&>(c));
                if constexpr (std::is_same_v<std::decay_t<decltype(value)>, int>) {
                    return std::to_string(value);
                } else {
                    return format_double(value);
                }
            }};
}

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
#define EITSIM_PHYS(field) k.push_back(number_key(#field, [](RunConfig& c) -> auto& { return c.physics.field; }))
        EITSIM_PHYS(g);
        EITSIM_PHYS(omega_con);
        EITSIM_PHYS(gamma);
        EITSIM_PHYS(kappa);
        EITSIM_PHYS(gamma_deph);
        EITSIM_PHYS(delta_p);
        EITSIM_PHYS(delta_p_cav);
        EITSIM_PHYS(delta);
        EITSIM_PHYS(n_p);
        EITSIM_PHYS(light_shift);
        EITSIM_PHYS(n_max);
        EITSIM_PHYS(n_atoms);
        EITSIM_PHYS(omega_d);
        EITSIM_PHYS(omega_f);
        EITSIM_PHYS(r_d);
        EITSIM_PHYS(r_e);
        EITSIM_PHYS(r_f);
        EITSIM_PHYS(c_d);
        EITSIM_PHYS(c_e);
#undef EITSIM_PHYS
        k.push_back(number_key("b_d_g1", [](RunConfig& c) -> auto& { return c.physics.b_d.to_g1; }));
        k.push_back(number_key("b_d_g2", [](RunConfig& c) -> auto& { return c.physics.b_d.to_g2; }));
        k.push_back(number_key("b_e_g1", [](RunConfig& c) -> auto& { return c.physics.b_e.to_g1; }));
        k.push_back(number_key("b_e_g2", [](RunConfig& c) -> auto& { return c.physics.b_e.to_g2; }));
        k.push_back(number_key("b_f_g1", [](RunConfig& c) -> auto& { return c.physics.b_f.to_g1; }));
        k.push_back(number_key("b_f_g2", [](RunConfig& c) -> auto& { return c.physics.b_f.to_g2; }));
        k.push_back({"model",
                     [](RunConfig& c, std::string_view v) {
                         for (auto kind : {ModelKind::five_level, ModelKind::three_level, ModelKind::two_level}) {
                             if (v == to_string(kind)) {
                                 c.model = kind;
                                 return true;
                             }
                         }
                         return false;
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.model)); }});
        k.push_back(number_key("start", [](RunConfig& c) -> auto& { return c.start; }));
        k.push_back(number_key("stop", [](RunConfig& c) -> auto& { return c.stop; }));
        k.push_back(number_key("n_points", [](RunConfig& c) -> auto& { return c.n_points; }));
        k.push_back(number_key("cavity_start", [](RunConfig& c) -> auto& { return c.cavity_start; }));
        k.push_back(number_key("cavity_stop", [](RunConfig& c) -> auto& { return c.cavity_stop; }));
        k.push_back(number_key("cavity_points", [](RunConfig& c) -> auto& { return c.cavity_points; }));
        k.push_back(number_key("tol", [](RunConfig& c) -> auto& { return c.tol; }));
        return k;
    }();
    return keys;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
    validate(c.physics);
    if (!(c.start < c.stop)) throw InvalidArgument("start must be below stop");
    if (!(c.cavity_start < c.cavity_stop)) throw InvalidArgument("cavity_start must be below cavity_stop");
    if (c.n_points < 2 || c.cavity_points < 2) throw InvalidArgument("sweeps need at least 2 points");
    if (!(c.tol > 0.0)) throw InvalidArgument("tol must be positive");
}

/// Parses configuration text on top of the defaults. Throws ConfigError
/// naming the key and 1-based line of the first problem.
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", std::string(line),
                              line_no);
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        const auto& keys = detail::config_keys();
        const auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return key == k.name; });
        if (it == keys.end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", key, line_no);
        }
        if (!seen.insert(key).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", key, line_no);
        }
        if (!it->parse(cfg, value)) {
            throw ConfigError("line " + std::to_string(line_no) + ": bad value '" + std::string(value)
                                  + "' for key '" + key + "'",
                              key, line_no);
        }
    }
    try {
        validate(cfg);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what(), "", 0);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file '" + path + "'", "", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Every key, one per line, in a fixed order; parse_config inverts it exactly.
inline std::string serialize_config(const RunConfig& c) {
    std::string out;
    for (const auto& k : detail::config_keys()) {
        out += k.name;
        out += " = ";
        out += k.format(c);
        out += '\n';
    }
    return out;
}

}  // namespace eitsim
