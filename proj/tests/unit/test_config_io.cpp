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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "eitsim/config.hpp"
#include "eitsim/io.hpp"

namespace {

using eitsim::ConfigError;
using eitsim::RunConfig;

ConfigError parse_error(const std::string& text) {
    try {
        eitsim::parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no ConfigError for:\n" << text;
    return ConfigError("", "", 0);
}

RunConfig random_config(std::mt19937& rng) {
    std::uniform_real_distribution<double> rate(0.0, 10.0), det(-50.0, 50.0), unit(0.0, 1.0);
    std::uniform_int_distribution<int> nmax(1, 4), atoms(1, 2), pts(2, 500);
    RunConfig c;
    auto& p = c.physics;
    p.g = rate(rng);
    p.omega_con = rate(rng);
    p.gamma = rate(rng);
    p.kappa = rate(rng);
    p.gamma_deph = rate(rng);
    p.delta_p = det(rng);
    p.delta_p_cav = det(rng);
    p.delta = det(rng);
    p.n_p = unit(rng);
    p.light_shift = det(rng) / 100.0;
    p.n_max = nmax(rng);
    p.n_atoms = atoms(rng);
    p.omega_d = det(rng) * 5.0;
    p.omega_f = det(rng) * 5.0;
    p.r_d = unit(rng);
    p.r_e = unit(rng);
    p.r_f = unit(rng);
    p.c_d = unit(rng);
    p.c_e = unit(rng);
    const double bd = unit(rng), be = unit(rng);
    p.b_d = {bd, 1.0 - bd};
    p.b_e = {be, 1.0 - be};
    const eitsim::ModelKind kinds[] = {eitsim::ModelKind::five_level, eitsim::ModelKind::three_level,
                                       eitsim::ModelKind::two_level};
    c.model = kinds[std::uniform_int_distribution<int>(0, 2)(rng)];
    c.start = det(rng);
    c.stop = c.start + rate(rng) + 1e-3;
    c.n_points = pts(rng);
    c.cavity_start = det(rng);
    c.cavity_stop = c.cavity_start + rate(rng) + 1e-3;
    c.cavity_points = pts(rng);
    c.tol = std::pow(10.0, -det(rng) / 5.0);
    return c;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
    const auto c = eitsim::parse_config("");
    EXPECT_EQ(c, RunConfig{});
    EXPECT_EQ(c.physics, eitsim::PhysicsParams{});
    EXPECT_EQ(c.model, eitsim::ModelKind::five_level);
    EXPECT_EQ(c.n_points, 261);
    EXPECT_EQ(c.start, -0.9);
    EXPECT_EQ(c.stop, 1.7);
}

TEST(Config, ParsesKeysCommentsAndWhitespace) {
    const auto c = eitsim::parse_config(
        "# default set with two atoms\n"
        "\n"
        "  n_atoms = 2   # trailing comment\n"
        "gamma_deph=0\r\n"
        "delta_p = +18.5\n"
        "model = three_level\n"
        "b_e_g1 = 0\n"
        "b_e_g2 = 1\n"
        "n_points = 11");
    EXPECT_EQ(c.physics.n_atoms, 2);
    EXPECT_EQ(c.physics.gamma_deph, 0.0);
    EXPECT_EQ(c.physics.delta_p, 18.5);
    EXPECT_EQ(c.model, eitsim::ModelKind::three_level);
    EXPECT_EQ(c.physics.b_e, (eitsim::Branching{0.0, 1.0}));
    EXPECT_EQ(c.n_points, 11);
    EXPECT_EQ(c.physics.g, 3.0);
}

TEST(Config, UnknownKeyReportsKeyAndLine) {
    const auto e = parse_error("g = 3\n\nomega = 2.8\n");
    EXPECT_EQ(e.key(), "omega");
    EXPECT_EQ(e.line(), 3);
    EXPECT_STREQ(e.kind(), "config");
}

TEST(Config, DuplicateKey) {
    const auto e = parse_error("kappa = 0.4\nkappa = 0.5\n");
    EXPECT_EQ(e.key(), "kappa");
    EXPECT_EQ(e.line(), 2);
}

TEST(Config, BadValues) {
    EXPECT_EQ(parse_error("g = three\n").key(), "g");
    EXPECT_EQ(parse_error("g = 3.0x\n").key(), "g");
    EXPECT_EQ(parse_error("n_max = 2.5\n").key(), "n_max");
    EXPECT_EQ(parse_error("g =\n").key(), "g");
    EXPECT_EQ(parse_error("model = four_level\n").key(), "model");
    const auto e = parse_error("# header\njust some words\n");
    EXPECT_EQ(e.line(), 2);
}

TEST(Config, SemanticValidation) {
    for (const char* text : {"gamma = -1", "n_atoms = 3", "n_max = 0", "b_d_g1 = 0.5", "b_f_g1 = 0.1\nb_f_g2 = 0.9",
                             "start = 2", "n_points = 1", "tol = 0", "cavity_stop = -4", "kappa = nan"}) {
        const auto e = parse_error(text);
        EXPECT_NE(std::string(e.what()).find("invalid configuration"), std::string::npos) << text;
    }
}

TEST(Config, RoundTripIsLossless) {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const RunConfig c = random_config(rng);
        const std::string text = eitsim::serialize_config(c);
        const RunConfig back = eitsim::parse_config(text);
        EXPECT_EQ(back, c) << text;
        EXPECT_EQ(eitsim::serialize_config(back), text);
    }
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "eitsim_config_test.cfg";
    {
        std::ofstream out(path);
        out << "omega_con = 3.1\n";
    }
    EXPECT_EQ(eitsim::load_config(path.string()).physics.omega_con, 3.1);
    std::filesystem::remove(path);
    EXPECT_THROW(eitsim::load_config(path.string()), ConfigError);
}

TEST(Io, FormatValue) {
    EXPECT_EQ(eitsim::format_value(0.1), "0.1");
    EXPECT_EQ(eitsim::format_value(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(eitsim::format_value(-2.5e-13), "-2.5e-13");
    EXPECT_EQ(eitsim::format_value(std::nan("")), "nan");
    EXPECT_EQ(eitsim::format_value(-std::nan("")), "nan");
}

TEST(Io, SpectrumCsvRoundTrip) {
    eitsim::SweepSpec s;
    s.n_points = 9;
    s.engines = {eitsim::Engine::master_equation, eitsim::Engine::semiclassical};
    const auto rows = eitsim::run_sweep(s);
    std::stringstream ss;
    eitsim::write_spectrum_csv(ss, rows, "delta_MHz", true);
    const std::string text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "delta_MHz,T_rel,photon_number,absorption_part,dispersion_part,engine,residual");
    EXPECT_NE(text.find(",nan,nan,me,"), std::string::npos);
    const auto back = eitsim::read_spectrum_csv(ss);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].engine, rows[i].engine);
        EXPECT_NEAR(back[i].sweep_value, rows[i].sweep_value, 1e-12);
        EXPECT_NEAR(back[i].transmission_rel, rows[i].transmission_rel, 1e-11 * rows[i].transmission_rel);
        EXPECT_EQ(std::isnan(back[i].absorption_part), std::isnan(rows[i].absorption_part));
    }
}

TEST(Io, TimestampLineIsSkipped) {
    std::vector<eitsim::SpectrumRecord> rows(2);
    rows[1].sweep_value = 1.0;
    std::stringstream ss;
    eitsim::write_spectrum_csv(ss, rows, "detuning_MHz", false);
    EXPECT_EQ(ss.str().rfind("# generated ", 0), 0u);
    EXPECT_EQ(eitsim::read_spectrum_csv(ss).size(), 2u);
}

TEST(Io, RejectsMalformedCsv) {
    std::stringstream no_header("1,2,3\n");
    EXPECT_THROW(eitsim::read_spectrum_csv(no_header), eitsim::InvalidArgument);
    std::stringstream bad_engine(
        "delta_MHz,T_rel,photon_number,absorption_part,dispersion_part,engine,residual\n0,1,1,nan,nan,xx,0\n");
    EXPECT_THROW(eitsim::read_spectrum_csv(bad_engine), eitsim::InvalidArgument);
    std::stringstream bad_number(
        "delta_MHz,T_rel,photon_number,absorption_part,dispersion_part,engine,residual\n0,one,1,nan,nan,me,0\n");
    EXPECT_THROW(eitsim::read_spectrum_csv(bad_number), eitsim::InvalidArgument);
    std::stringstream empty("");
    EXPECT_THROW(eitsim::read_spectrum_csv(empty), eitsim::InvalidArgument);
}

TEST(Io, ExtremaReport) {
    eitsim::SweepSpec s;
    s.engines = {eitsim::Engine::master_equation, eitsim::Engine::semiclassical};
    const auto rows = eitsim::run_sweep(s);
    const auto report = eitsim::extrema_report(rows);
    ASSERT_EQ(report["engines"].size(), 2u);
    for (const auto& e : report["engines"]) {
        EXPECT_EQ(e["points"], 261);
        EXPECT_FALSE(e.contains("errors"));
        EXPECT_NEAR(e["separation_MHz"].get<double>(),
                    e["delta_min_MHz"].get<double>() - e["delta_max_MHz"].get<double>(), 1e-15);
    }
    EXPECT_EQ(report["engines"][0]["engine"], "me");
    const auto ex = eitsim::find_extrema(eitsim::select(rows, eitsim::Engine::master_equation));
    EXPECT_EQ(report["engines"][0]["T_max"].get<double>(), ex.t_max);
}

TEST(Io, ExtremaReportFlagsEdgeMinimum) {
    eitsim::SweepSpec s;
    s.variable = eitsim::SweepVariable::probe_cavity_detuning;
    s.start = -3.0;
    s.stop = 3.0;
    s.n_points = 61;
    s.model = eitsim::ModelKind::empty_cavity;
    s.engines = {eitsim::Engine::semiclassical};
    const auto report = eitsim::extrema_report(eitsim::run_sweep(s));
    const auto& e = report["engines"][0];
    EXPECT_NEAR(e["delta_max_MHz"].get<double>(), 0.0, 1e-9);
    ASSERT_TRUE(e.contains("errors"));
    EXPECT_EQ(e["errors"][0]["error"], "edge_extremum");
    EXPECT_FALSE(e.contains("separation_MHz"));
}

TEST(Io, ConvergenceCsv) {
    eitsim::ConvergenceTable t;
    t.rows.push_back({1, 0.0, 0.05, 0.5, std::nan("")});
    t.rows.push_back({2, 0.0, 0.051, 0.51, 0.01});
    std::stringstream ss;
    eitsim::write_convergence_csv(ss, t, true);
    EXPECT_EQ(ss.str(), "n_max,delta_MHz,photon_number,T_rel,change\n1,0,0.05,0.5,nan\n2,0,0.051,0.51,0.01\n");
}
