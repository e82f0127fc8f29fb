// Copyright 2026 The qdemon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdemon/program.hpp"

#include <numbers>

#include "fixtures.hpp"
#include "gtest/gtest.h"

using namespace qdemon;

TEST(program, empty_input_reports_missing_params) {
    try {
        parse_program("");
        FAIL() << "expected ParseError";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_NE(std::string(e.what()).find("missing PARAM block"), std::string::npos);
    }
    try {
        parse_program("# only a comment\n\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("missing PARAM block"), std::string::npos);
    }
}

TEST(program, parses_swap_program) {
    const auto prog = parse_program(qdemon_test::base_program_text());
    ASSERT_TRUE(prog.protocol.has_value());
    EXPECT_EQ(*prog.protocol, ProtocolKind::Swap);
    EXPECT_EQ(prog.params.spin.mu1, 2.0);
    EXPECT_EQ(prog.params.spin.T1, 8.0);
    ASSERT_EQ(prog.instructions.size(), 3u);
    const auto &c = std::get<op::Cnot>(prog.instructions[1]);
    EXPECT_EQ(c.control, Spin::Two);
    EXPECT_EQ(c.target, Spin::One);
    EXPECT_EQ(prog.lines, (std::vector<int>{9, 10, 11}));
}

TEST(program, comments_case_and_blank_lines) {
    const std::string text =
        "# header\n"
        "\n"
        "param MU1 2   # trailing\n"
        "Param mu2 1\nPARAM b 1\nPARAM t1 8\nPARAM T2 1\nPARAM Gamma 1\n"
        "init thermal\n"
        "\tcnot 1 2 pulsed\n"
        "pulse 2 pi/2 3pi/2\r\n"
        "ramp 1 tratio 10 adiabatic\n";
    const auto prog = parse_program(text);
    EXPECT_FALSE(prog.protocol.has_value());
    ASSERT_EQ(prog.instructions.size(), 3u);
    EXPECT_EQ(std::get<op::Cnot>(prog.instructions[0]).mode, CnotMode::Pulsed);
    EXPECT_EQ(std::get<op::Pulse>(prog.instructions[1]).phase.kind, Angle::Kind::ThreeHalfPi);
    EXPECT_EQ(std::get<op::Ramp>(prog.instructions[2]).field.kind, FieldRef::Kind::TRatio);
    EXPECT_EQ(prog.lines.front(), 10);
}

TEST(program, every_mutation_reports_its_line) {
    const auto mutations = qdemon_test::mutated_programs();
    EXPECT_EQ(mutations.size(), 50u);
    for (const auto &m : mutations) {
        try {
            parse_program(m.text);
            ADD_FAILURE() << m.name << ": parsed without error";
        } catch (const ParseError &e) {
            EXPECT_EQ(e.line(), m.line) << m.name << ": " << e.what();
            EXPECT_GE(e.column(), 1) << m.name;
            EXPECT_EQ(std::string(e.what()).rfind("line " + std::to_string(m.line) + ",", 0), 0u) << m.name;
        }
    }
}

TEST(program, error_columns_point_at_token) {
    try {
        parse_program("PARAM mu1 2\nPARAM mu2 1\nPARAM B 1\nPARAM T1 8\nPARAM T2 1\nPARAM gamma 1\nINIT THERMAL\n"
                      "CNOT 1 9\n");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 8);
        EXPECT_EQ(e.column(), 8);
        EXPECT_NE(std::string(e.what()).find("spin index must be 1 or 2"), std::string::npos);
    }
}

TEST(program, templates_round_trip) {
    for (const char *name : kTemplateNames) {
        const PulseProgram a = template_program(name);
        const std::string text = serialize_program(a);
        const PulseProgram b = parse_program(text);
        EXPECT_EQ(a, b) << name;
        EXPECT_EQ(serialize_program(b), text) << name;
    }
    EXPECT_THROW(template_text("nope"), PreconditionError);
}

TEST(program, random_programs_round_trip) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 100; ++i) {
        const PulseProgram a = parse_program(qdemon_test::random_program(rng));
        EXPECT_EQ(parse_program(serialize_program(a)), a);
    }
}

TEST(program, symbolic_operands_resolve) {
    ProgramParams p;
    p.theta = 0.4;
    EXPECT_EQ(resolve_angle({Angle::Kind::Theta}, p), 0.4);
    EXPECT_EQ(resolve_angle({Angle::Kind::TwoTheta}, p), 0.8);
    EXPECT_EQ(resolve_angle({Angle::Kind::HalfPi}, p), std::numbers::pi / 2);
    p.theta = 3.0;
    EXPECT_NEAR(resolve_pulse_angle({Angle::Kind::TwoTheta}, p), 6.0, 1e-15);
    p.theta = std::numbers::pi;
    EXPECT_NEAR(resolve_pulse_angle({Angle::Kind::TwoTheta}, p), 0.0, 1e-15);
    p.spin.gamma = 0.5;
    EXPECT_EQ(resolve_duration({true, 0.0}, p.spin), std::numbers::pi);
    EXPECT_THROW(resolve_steps({true, 1}, ProgramParams{}), PreconditionError);
}

TEST(program, set_param_validation) {
    ProgramParams p;
    EXPECT_THROW(set_param(p, "theta", 4.0), PreconditionError);
    EXPECT_THROW(set_param(p, "n_steps", 2.5), PreconditionError);
    EXPECT_THROW(set_param(p, "mu3", 1.0), PreconditionError);
    set_param(p, "Bprime", 20.0);
    EXPECT_EQ(*p.Bprime, 20.0);
}

TEST(program, format_double_round_trips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(-0.0), "0");
}

TEST(program, initial_states) {
    ProgramParams p;
    InitDirective init;
    init.thermal = false;
    init.kets = {Ket{Ket::Kind::Plus, {}}, Ket{Ket::Kind::Down, {}}};
    const DensityMatrix rho = initial_state(init, p);
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(rho(0, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(rho(1, 1).real(), 0.0, 1e-15);
}
