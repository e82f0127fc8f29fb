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

// Pulse-program text format.
//
//   # comment to end of line
//   PROTOCOL <name>                optional; selects closed-form annotation
//   PARAM <name> <number>          mu1 mu2 B T1 T2 gamma required;
//                                  theta n_steps Bprime optional
//   INIT THERMAL [TIPPED <angle>]  thermal pair, spin 1 optionally tipped
//   INIT STATE <ket> <ket>         ket: DOWN | UP | PLUS | TIPPED <angle>
//   PULSE <spin> <angle> <phase>
//   WAIT <duration>                number or PI/2GAMMA
//   CNOT <control> <target> [IDEAL | PULSED | SELECTIVE]
//   MEASURE <spin>
//   DEPHASE <spin>
//   CONTACT <spin> ON | OFF
//   THERMALIZE <spin>
//   RAMP <spin> <field> <n> ADIABATIC | ISOTHERMAL
//
// Angles: decimal radians in [0, 2pi), PI, PI/2, 3PI/2, THETA, 2THETA.
// Fields: a number, B, MATCHED, TRATIO, BPRIME, EQUILIBRIUM.
// Step counts: a positive integer or N (the n_steps parameter).
// Keywords are case-insensitive. LF or CRLF line endings.

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "qdemon/engine.hpp"
#include "qdemon/errors.hpp"

namespace qdemon {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    if (v == 0.0) {
        v = 0.0;  // drop the sign of -0
    }
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) {
        throw Error("format_double: conversion failed");
    }
    return std::string(buf.data(), end);
}

struct ProgramParams {
    SpinParams spin;
    std::optional<double> theta;
    std::optional<long> n_steps;
    std::optional<double> Bprime;

    bool operator==(const ProgramParams &) const = default;
};

inline constexpr std::array<const char *, 9> kParamNames{
    "mu1", "mu2", "B", "T1", "T2", "gamma", "theta", "n_steps", "Bprime"};

/// Sets a named parameter; throws PreconditionError for bad names or values.
inline void set_param(ProgramParams &p, const std::string &name, double value) {
    if (!std::isfinite(value)) {
        throw PreconditionError("parameter " + name + " must be finite");
    }
    if (name == "mu1") {
        p.spin.mu1 = value;
    } else if (name == "mu2") {
        p.spin.mu2 = value;
    } else if (name == "B") {
        p.spin.B = value;
    } else if (name == "T1") {
        p.spin.T1 = value;
    } else if (name == "T2") {
        p.spin.T2 = value;
    } else if (name == "gamma") {
        p.spin.gamma = value;
    } else if (name == "theta") {
        if (!(value >= 0.0 && value <= std::numbers::pi)) {
            throw PreconditionError("theta must lie in [0, pi]");
        }
        p.theta = value;
    } else if (name == "n_steps") {
        if (!(value >= 0.0) || value != std::floor(value) || value > 1e9) {
            throw PreconditionError("n_steps must be a non-negative integer");
        }
        p.n_steps = static_cast<long>(value);
    } else if (name == "Bprime") {
        p.Bprime = value;
    } else {
        throw PreconditionError("unknown parameter '" + name + "'");
    }
}

struct Angle {
    enum class Kind { Literal, Pi, HalfPi, ThreeHalfPi, Theta, TwoTheta };
    Kind kind = Kind::Literal;
    double value = 0.0;  // Literal only

    bool operator==(const Angle &) const = default;
};

struct Duration {
    bool quarter_coupling_period = false;  // PI/2GAMMA
    double value = 0.0;

    bool operator==(const Duration &) const = default;
};

struct FieldRef {
    enum class Kind { Literal, Base, Matched, TRatio, BPrime, Equilibrium };
    Kind kind = Kind::Literal;
    double value = 0.0;

    bool operator==(const FieldRef &) const = default;
};

struct StepCount {
    bool symbolic = false;  // N
    long value = 1;

    bool operator==(const StepCount &) const = default;
};

struct Ket {
    enum class Kind { Down, Up, Plus, Tipped };
    Kind kind = Kind::Down;
    Angle angle;  // Tipped only

    bool operator==(const Ket &) const = default;
};

struct InitDirective {
    bool thermal = true;
    std::optional<Angle> tipped;  // THERMAL TIPPED <angle>
    std::array<Ket, 2> kets{};    // STATE

    bool operator==(const InitDirective &) const = default;
};

namespace op {

struct Pulse {
    Spin spin = Spin::One;
    Angle angle;
    Angle phase;
    bool operator==(const Pulse &) const = default;
};
struct Wait {
    Duration duration;
    bool operator==(const Wait &) const = default;
};
struct Cnot {
    Spin control = Spin::One;
    Spin target = Spin::Two;
    CnotMode mode = CnotMode::Ideal;
    bool operator==(const Cnot &) const = default;
};
struct Measure {
    Spin spin = Spin::One;
    bool operator==(const Measure &) const = default;
};
struct Dephase {
    Spin spin = Spin::One;
    bool operator==(const Dephase &) const = default;
};
struct Contact {
    Spin spin = Spin::One;
    bool on = false;
    bool operator==(const Contact &) const = default;
};
struct Thermalize {
    Spin spin = Spin::One;
    bool operator==(const Thermalize &) const = default;
};
struct Ramp {
    Spin spin = Spin::One;
    FieldRef field;
    StepCount steps;
    RampMode mode = RampMode::Adiabatic;
    bool operator==(const Ramp &) const = default;
};

}  // namespace op

using Instruction =
    std::variant<op::Pulse, op::Wait, op::Cnot, op::Measure, op::Dephase, op::Contact, op::Thermalize, op::Ramp>;

struct PulseProgram {
    std::optional<ProtocolKind> protocol;
    ProgramParams params;
    InitDirective init;
    std::vector<Instruction> instructions;
    std::vector<int> lines;  // source line per instruction; not part of the value

    bool operator==(const PulseProgram &o) const {
        return protocol == o.protocol && params == o.params && init == o.init && instructions == o.instructions;
    }
};

// ---------------------------------------------------------------------------
// Resolution of symbolic operands against parameters.

inline double resolve_angle(const Angle &a, const ProgramParams &p) {
    constexpr double pi = std::numbers::pi;
    switch (a.kind) {
        case Angle::Kind::Literal:
            return a.value;
        case Angle::Kind::Pi:
            return pi;
        case Angle::Kind::HalfPi:
            return 0.5 * pi;
        case Angle::Kind::ThreeHalfPi:
            return 1.5 * pi;
        case Angle::Kind::Theta:
        case Angle::Kind::TwoTheta:
            if (!p.theta) {
                throw PreconditionError("THETA used but PARAM theta is not set");
            }
            return a.kind == Angle::Kind::Theta ? *p.theta : 2.0 * *p.theta;
    }
    return 0.0;
}

/// Pulse angles live on [0, 2pi); symbolic values are reduced there.
inline double resolve_pulse_angle(const Angle &a, const ProgramParams &p) {
    const double v = resolve_angle(a, p);
    return a.kind == Angle::Kind::Literal ? v : reduce_angle(v);
}

inline double resolve_duration(const Duration &d, const SpinParams &p) {
    return d.quarter_coupling_period ? cnot_wait_time(p.gamma) : d.value;
}

inline long resolve_steps(const StepCount &s, const ProgramParams &p) {
    if (!s.symbolic) {
        return s.value;
    }
    if (!p.n_steps) {
        throw PreconditionError("N used but PARAM n_steps is not set");
    }
    if (*p.n_steps < 1) {
        throw PreconditionError("ramp needs n_steps >= 1");
    }
    return *p.n_steps;
}

inline std::array<Complex, 2> ket_vector(const Ket &k, const ProgramParams &p) {
    switch (k.kind) {
        case Ket::Kind::Down:
            return {Complex(1.0), Complex(0.0)};
        case Ket::Kind::Up:
            return {Complex(0.0), Complex(1.0)};
        case Ket::Kind::Plus:
            return tipped_ket(0.25 * std::numbers::pi);
        case Ket::Kind::Tipped: {
            const double theta = resolve_angle(k.angle, p);
            TippedSpec{theta}.validate();
            return tipped_ket(theta);
        }
    }
    return {};
}

inline DensityMatrix initial_state(const InitDirective &init, const ProgramParams &p) {
    if (init.thermal) {
        if (init.tipped) {
            const double theta = resolve_angle(*init.tipped, p);
            TippedSpec{theta}.validate();
            return tipped_pair(p.spin, theta);
        }
        return thermal_pair(p.spin);
    }
    const auto a = ket_vector(init.kets[0], p);
    const auto b = ket_vector(init.kets[1], p);
    std::array<Complex, 4> v{};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            v[2 * i + j] = a[i] * b[j];
        }
    }
    return DensityMatrix::pure(v);
}

// ---------------------------------------------------------------------------
// Serialization.

inline std::string angle_text(const Angle &a) {
    switch (a.kind) {
        case Angle::Kind::Literal:
            return format_double(a.value);
        case Angle::Kind::Pi:
            return "PI";
        case Angle::Kind::HalfPi:
            return "PI/2";
        case Angle::Kind::ThreeHalfPi:
            return "3PI/2";
        case Angle::Kind::Theta:
            return "THETA";
        case Angle::Kind::TwoTheta:
            return "2THETA";
    }
    return "";
}

inline std::string field_text(const FieldRef &f) {
    switch (f.kind) {
        case FieldRef::Kind::Literal:
            return format_double(f.value);
        case FieldRef::Kind::Base:
            return "B";
        case FieldRef::Kind::Matched:
            return "MATCHED";
        case FieldRef::Kind::TRatio:
            return "TRATIO";
        case FieldRef::Kind::BPrime:
            return "BPRIME";
        case FieldRef::Kind::Equilibrium:
            return "EQUILIBRIUM";
    }
    return "";
}

inline std::string ket_text(const Ket &k) {
    switch (k.kind) {
        case Ket::Kind::Down:
            return "DOWN";
        case Ket::Kind::Up:
            return "UP";
        case Ket::Kind::Plus:
            return "PLUS";
        case Ket::Kind::Tipped:
            return "TIPPED " + angle_text(k.angle);
    }
    return "";
}

inline std::string spin_text(Spin s) {
    return std::to_string(index_of(s));
}

inline std::string instruction_text(const Instruction &ins) {
    struct Visitor {
        std::string operator()(const op::Pulse &x) const {
            return "PULSE " + spin_text(x.spin) + " " + angle_text(x.angle) + " " + angle_text(x.phase);
        }
        std::string operator()(const op::Wait &x) const {
            return "WAIT " + (x.duration.quarter_coupling_period ? std::string("PI/2GAMMA") : format_double(x.duration.value));
        }
        std::string operator()(const op::Cnot &x) const {
            const char *mode = x.mode == CnotMode::Ideal ? "IDEAL" : x.mode == CnotMode::Pulsed ? "PULSED" : "SELECTIVE";
            return "CNOT " + spin_text(x.control) + " " + spin_text(x.target) + " " + mode;
        }
        std::string operator()(const op::Measure &x) const {
            return "MEASURE " + spin_text(x.spin);
        }
        std::string operator()(const op::Dephase &x) const {
            return "DEPHASE " + spin_text(x.spin);
        }
        std::string operator()(const op::Contact &x) const {
            return "CONTACT " + spin_text(x.spin) + (x.on ? " ON" : " OFF");
        }
        std::string operator()(const op::Thermalize &x) const {
            return "THERMALIZE " + spin_text(x.spin);
        }
        std::string operator()(const op::Ramp &x) const {
            return "RAMP " + spin_text(x.spin) + " " + field_text(x.field) + " " +
                   (x.steps.symbolic ? std::string("N") : std::to_string(x.steps.value)) +
                   (x.mode == RampMode::Adiabatic ? " ADIABATIC" : " ISOTHERMAL");
        }
    };
    return std::visit(Visitor{}, ins);
}

/// Canonical text: PROTOCOL, PARAMs in fixed order, INIT, instructions.
inline std::string serialize_program(const PulseProgram &prog) {
    std::string out;
    if (prog.protocol) {
        out += std::string("PROTOCOL ") + protocol_name(*prog.protocol) + "\n";
    }
    const auto &p = prog.params;
    const std::array<std::pair<const char *, double>, 6> required{{
        {"mu1", p.spin.mu1},
        {"mu2", p.spin.mu2},
        {"B", p.spin.B},
        {"T1", p.spin.T1},
        {"T2", p.spin.T2},
        {"gamma", p.spin.gamma},
    }};
    for (const auto &[name, v] : required) {
        out += std::string("PARAM ") + name + " " + format_double(v) + "\n";
    }
    if (p.theta) {
        out += "PARAM theta " + format_double(*p.theta) + "\n";
    }
    if (p.n_steps) {
        out += "PARAM n_steps " + std::to_string(*p.n_steps) + "\n";
    }
    if (p.Bprime) {
        out += "PARAM Bprime " + format_double(*p.Bprime) + "\n";
    }
    if (prog.init.thermal) {
        out += "INIT THERMAL";
        if (prog.init.tipped) {
            out += " TIPPED " + angle_text(*prog.init.tipped);
        }
    } else {
        out += "INIT STATE " + ket_text(prog.init.kets[0]) + " " + ket_text(prog.init.kets[1]);
    }
    out += "\n";
    for (const auto &ins : prog.instructions) {
        out += instruction_text(ins) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

struct Token {
    std::string text;
    int column = 1;
};

inline std::string upper(std::string_view s) {
    std::string out(s);
    for (char &c : out) {
        if (c >= 'a' && c <= 'z') {
            c = static_cast<char>(c - 'a' + 'A');
        }
    }
    return out;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char &c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') {
            break;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') {
            ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    return out;
}

class LineParser {
   public:
    LineParser(std::vector<Token> tokens, int line, int end_column)
        : tokens_(std::move(tokens)), line_(line), end_column_(end_column) {
    }

    [[noreturn]] void fail(const Token &t, const std::string &msg) const {
        throw ParseError(line_, t.column, msg);
    }
    [[noreturn]] void fail_at_end(const std::string &msg) const {
        throw ParseError(line_, end_column_, msg);
    }

    const Token &next(const char *what) {
        if (pos_ >= tokens_.size()) {
            fail_at_end(std::string("expected ") + what);
        }
        return tokens_[pos_++];
    }

    bool at_end() const {
        return pos_ >= tokens_.size();
    }

    void expect_end() const {
        if (!at_end()) {
            fail(tokens_[pos_], "unexpected token '" + tokens_[pos_].text + "'");
        }
    }

    double number(const Token &t) const {
        double v = 0.0;
        const char *first = t.text.data();
        const char *last = first + t.text.size();
        if (!t.text.empty() && *first == '+') {
            ++first;
        }
        auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
        if (ec != std::errc() || ptr != last || !std::isfinite(v) || first == last) {
            fail(t, "malformed number '" + t.text + "'");
        }
        return v;
    }

    double number(const char *what) {
        return number(next(what));
    }

    Spin spin() {
        const Token &t = next("spin index");
        if (t.text == "1") {
            return Spin::One;
        }
        if (t.text == "2") {
            return Spin::Two;
        }
        fail(t, "spin index must be 1 or 2, got '" + t.text + "'");
    }

    /// `limit` bounds decimal literals: [0, limit) if open, else [0, limit].
    Angle angle(const char *what, double limit, bool open) {
        const Token &t = next(what);
        const std::string u = upper(t.text);
        if (u == "PI") {
            return {Angle::Kind::Pi};
        }
        if (u == "PI/2") {
            return {Angle::Kind::HalfPi};
        }
        if (u == "3PI/2") {
            return {Angle::Kind::ThreeHalfPi};
        }
        if (u == "THETA") {
            return {Angle::Kind::Theta};
        }
        if (u == "2THETA") {
            return {Angle::Kind::TwoTheta};
        }
        const double v = number(t);
        if (!(v >= 0.0) || (open ? !(v < limit) : !(v <= limit))) {
            fail(t, std::string(what) + " " + t.text + " out of range");
        }
        return {Angle::Kind::Literal, v};
    }

    const Token &peek() const {
        return tokens_[pos_];
    }

   private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int line_;
    int end_column_;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace detail

/// Parses program text. Throws ParseError carrying line and column.
inline PulseProgram parse_program(std::string_view text) {
    using detail::LineParser;
    using detail::Token;
    PulseProgram prog;
    std::array<bool, kParamNames.size()> seen{};
    bool any_param = false;
    bool have_init = false;
    bool have_protocol = false;
    int line_no = 0;
    std::size_t pos = 0;

    auto missing_required = [&]() -> std::optional<std::string> {
        for (std::size_t i = 0; i < 6; ++i) {
            if (!seen[i]) {
                return std::string(kParamNames[i]);
            }
        }
        return std::nullopt;
    };

    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        auto tokens = detail::tokenize(raw);
        if (tokens.empty()) {
            if (eol == text.size()) {
                break;
            }
            continue;
        }
        const Token head = tokens.front();
        std::size_t visible = raw.size();
        while (visible > 0 && (raw[visible - 1] == '\r')) {
            --visible;
        }
        LineParser lp(std::move(tokens), line_no, static_cast<int>(visible) + 1);
        lp.next("keyword");
        const std::string kw = detail::upper(head.text);

        if (kw == "PROTOCOL") {
            if (have_protocol) {
                lp.fail(head, "duplicate PROTOCOL");
            }
            if (have_init) {
                lp.fail(head, "PROTOCOL after INIT");
            }
            const Token &name = lp.next("protocol name");
            const auto kind = protocol_from_name(detail::lower(name.text));
            if (!kind) {
                lp.fail(name, "unknown protocol '" + name.text + "'");
            }
            lp.expect_end();
            prog.protocol = *kind;
            have_protocol = true;
        } else if (kw == "PARAM") {
            if (have_init) {
                lp.fail(head, "PARAM after INIT");
            }
            const Token &name = lp.next("parameter name");
            std::size_t idx = kParamNames.size();
            for (std::size_t i = 0; i < kParamNames.size(); ++i) {
                if (detail::lower(name.text) == detail::lower(kParamNames[i])) {
                    idx = i;
                }
            }
            if (idx == kParamNames.size()) {
                lp.fail(name, "unknown parameter '" + name.text + "'");
            }
            if (seen[idx]) {
                lp.fail(name, std::string("duplicate PARAM ") + kParamNames[idx]);
            }
            const Token &value_token = lp.next("parameter value");
            const double value = lp.number(value_token);
            lp.expect_end();
            try {
                set_param(prog.params, kParamNames[idx], value);
            } catch (const PreconditionError &e) {
                lp.fail(value_token, e.what());
            }
            seen[idx] = true;
            any_param = true;
        } else if (kw == "INIT") {
            if (have_init) {
                lp.fail(head, "duplicate INIT");
            }
            if (!any_param) {
                lp.fail(head, "missing PARAM block");
            }
            if (auto m = missing_required()) {
                lp.fail(head, "missing PARAM " + *m);
            }
            try {
                prog.params.spin.validate();
            } catch (const PreconditionError &e) {
                lp.fail(head, e.what());
            }
            const Token &kind = lp.next("THERMAL or STATE");
            const std::string k = detail::upper(kind.text);
            auto tipped_angle = [&]() {
                const Angle a = lp.angle("tipping angle", std::numbers::pi, false);
                try {
                    TippedSpec{resolve_angle(a, prog.params)}.validate();
                } catch (const PreconditionError &e) {
                    lp.fail(head, e.what());
                }
                return a;
            };
            if (k == "THERMAL") {
                prog.init.thermal = true;
                if (!lp.at_end()) {
                    const Token &t = lp.next("TIPPED");
                    if (detail::upper(t.text) != "TIPPED") {
                        lp.fail(t, "expected TIPPED, got '" + t.text + "'");
                    }
                    prog.init.tipped = tipped_angle();
                }
            } else if (k == "STATE") {
                prog.init.thermal = false;
                for (auto &ket : prog.init.kets) {
                    const Token &t = lp.next("ket (DOWN, UP, PLUS or TIPPED)");
                    const std::string u = detail::upper(t.text);
                    if (u == "DOWN") {
                        ket = {Ket::Kind::Down, {}};
                    } else if (u == "UP") {
                        ket = {Ket::Kind::Up, {}};
                    } else if (u == "PLUS") {
                        ket = {Ket::Kind::Plus, {}};
                    } else if (u == "TIPPED") {
                        ket = {Ket::Kind::Tipped, tipped_angle()};
                    } else {
                        lp.fail(t, "unknown ket '" + t.text + "'");
                    }
                }
            } else {
                lp.fail(kind, "expected THERMAL or STATE, got '" + kind.text + "'");
            }
            lp.expect_end();
            have_init = true;
        } else {
            static const std::array<const char *, 8> kInstr{
                "PULSE", "WAIT", "CNOT", "MEASURE", "DEPHASE", "CONTACT", "THERMALIZE", "RAMP"};
            bool is_instr = false;
            for (const char *k : kInstr) {
                is_instr = is_instr || kw == k;
            }
            if (!is_instr) {
                lp.fail(head, "unknown keyword '" + head.text + "'");
            }
            if (!any_param || missing_required()) {
                lp.fail(head, "instruction before parameters");
            }
            if (!have_init) {
                lp.fail(head, "instruction before INIT");
            }
            const ProgramParams &params = prog.params;
            Instruction ins;
            if (kw == "PULSE") {
                op::Pulse x;
                x.spin = lp.spin();
                x.angle = lp.angle("pulse angle", detail::kTwoPi, true);
                x.phase = lp.angle("pulse phase", detail::kTwoPi, true);
                try {
                    resolve_angle(x.angle, params);
                    resolve_angle(x.phase, params);
                } catch (const PreconditionError &e) {
                    lp.fail(head, e.what());
                }
                ins = x;
            } else if (kw == "WAIT") {
                op::Wait x;
                const Token &t = lp.next("duration");
                if (detail::upper(t.text) == "PI/2GAMMA") {
                    x.duration.quarter_coupling_period = true;
                    if (!(params.spin.gamma > 0.0)) {
                        lp.fail(t, "PI/2GAMMA needs gamma > 0");
                    }
                } else {
                    x.duration.value = lp.number(t);
                    if (x.duration.value < 0.0) {
                        lp.fail(t, "duration must be non-negative");
                    }
                }
                ins = x;
            } else if (kw == "CNOT") {
                op::Cnot x;
                x.control = lp.spin();
                const Token &target_token = lp.peek();
                x.target = lp.spin();
                if (x.control == x.target) {
                    lp.fail(target_token, "CNOT control and target must differ");
                }
                if (!lp.at_end()) {
                    const Token &t = lp.next("mode");
                    const std::string u = detail::upper(t.text);
                    if (u == "IDEAL") {
                        x.mode = CnotMode::Ideal;
                    } else if (u == "PULSED") {
                        x.mode = CnotMode::Pulsed;
                        if (!(params.spin.gamma > 0.0)) {
                            lp.fail(t, "PULSED CNOT needs gamma > 0");
                        }
                    } else if (u == "SELECTIVE") {
                        x.mode = CnotMode::Selective;
                    } else {
                        lp.fail(t, "unknown CNOT mode '" + t.text + "'");
                    }
                }
                ins = x;
            } else if (kw == "MEASURE") {
                ins = op::Measure{lp.spin()};
            } else if (kw == "DEPHASE") {
                ins = op::Dephase{lp.spin()};
            } else if (kw == "CONTACT") {
                op::Contact x;
                x.spin = lp.spin();
                const Token &t = lp.next("ON or OFF");
                const std::string u = detail::upper(t.text);
                if (u == "ON") {
                    x.on = true;
                } else if (u == "OFF") {
                    x.on = false;
                } else {
                    lp.fail(t, "expected ON or OFF, got '" + t.text + "'");
                }
                ins = x;
            } else if (kw == "THERMALIZE") {
                ins = op::Thermalize{lp.spin()};
            } else {
                op::Ramp x;
                x.spin = lp.spin();
                const Token &f = lp.next("field");
                const std::string fu = detail::upper(f.text);
                if (fu == "B") {
                    x.field.kind = FieldRef::Kind::Base;
                } else if (fu == "MATCHED") {
                    x.field.kind = FieldRef::Kind::Matched;
                } else if (fu == "TRATIO") {
                    x.field.kind = FieldRef::Kind::TRatio;
                } else if (fu == "BPRIME") {
                    x.field.kind = FieldRef::Kind::BPrime;
                    if (!params.Bprime) {
                        lp.fail(f, "BPRIME used but PARAM Bprime is not set");
                    }
                } else if (fu == "EQUILIBRIUM") {
                    x.field.kind = FieldRef::Kind::Equilibrium;
                } else {
                    x.field = {FieldRef::Kind::Literal, lp.number(f)};
                }
                const Token &n = lp.next("step count");
                if (detail::upper(n.text) == "N") {
                    x.steps.symbolic = true;
                    if (!params.n_steps || *params.n_steps < 1) {
                        lp.fail(n, "N used but PARAM n_steps is not set to a positive integer");
                    }
                } else {
                    long v = 0;
                    auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), v);
                    if (ec != std::errc() || ptr != n.text.data() + n.text.size() || v < 1) {
                        lp.fail(n, "step count must be a positive integer, got '" + n.text + "'");
                    }
                    x.steps.value = v;
                }
                const Token &m = lp.next("ADIABATIC or ISOTHERMAL");
                const std::string mu = detail::upper(m.text);
                if (mu == "ADIABATIC") {
                    x.mode = RampMode::Adiabatic;
                } else if (mu == "ISOTHERMAL") {
                    x.mode = RampMode::Isothermal;
                } else {
                    lp.fail(m, "expected ADIABATIC or ISOTHERMAL, got '" + m.text + "'");
                }
                ins = x;
            }
            lp.expect_end();
            prog.instructions.push_back(std::move(ins));
            prog.lines.push_back(line_no);
        }
        if (eol == text.size()) {
            break;
        }
    }

    if (!any_param) {
        throw ParseError(1, 1, "missing PARAM block");
    }
    if (!have_init) {
        throw ParseError(line_no, 1, "missing INIT");
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Built-in programs.

inline constexpr std::array<const char *, 8> kTemplateNames{
    "swap", "basic", "carnot", "refrigerator", "erase", "tipped", "tipped_free", "demo"};

namespace detail {

inline constexpr const char *kSwapBody =
    "CNOT 1 2\n"
    "CNOT 2 1\n"
    "CNOT 1 2\n";

inline constexpr const char *kLegs =
    "RAMP 1 MATCHED N ADIABATIC\n"
    "CONTACT 1 ON\n"
    "RAMP 1 B N ISOTHERMAL\n"
    "CONTACT 1 OFF\n"
    "RAMP 2 MATCHED N ADIABATIC\n"
    "CONTACT 2 ON\n"
    "RAMP 2 B N ISOTHERMAL\n"
    "CONTACT 2 OFF\n";

inline constexpr const char *kCarnotParams =
    "PARAM mu1 1\n"
    "PARAM mu2 1.5\n"
    "PARAM B 1\n"
    "PARAM T1 2\n"
    "PARAM T2 1\n"
    "PARAM gamma 1\n";

}  // namespace detail

/// Program text of a built-in protocol.
inline std::string template_text(const std::string &name) {
    using namespace detail;
    std::string s;
    if (name == "swap") {
        s = "# Three conditional flips on thermal spins.\n"
            "PROTOCOL swap\n"
            "PARAM mu1 2\nPARAM mu2 1\nPARAM B 1\nPARAM T1 8\nPARAM T2 1\nPARAM gamma 1\n"
            "INIT THERMAL\n";
        s += kSwapBody;
    } else if (name == "basic") {
        s = "# Swap, then let both spins re-equilibrate.\n"
            "PROTOCOL basic\n"
            "PARAM mu1 2\nPARAM mu2 1\nPARAM B 1\nPARAM T1 8\nPARAM T2 1\nPARAM gamma 1\n"
            "INIT THERMAL\n";
        s += kSwapBody;
        s += "CONTACT 1 ON\nTHERMALIZE 1\nCONTACT 1 OFF\n"
             "CONTACT 2 ON\nTHERMALIZE 2\nCONTACT 2 OFF\n";
    } else if (name == "carnot") {
        s = "# Swap, then return each spin along an adiabat and an isotherm.\n"
            "PROTOCOL carnot\n";
        s += kCarnotParams;
        s += "PARAM n_steps 10000\nINIT THERMAL\n";
        s += kSwapBody;
        s += kLegs;
    } else if (name == "refrigerator") {
        s = "# The quasi-static cycle with mu1/T1 > mu2/T2: heat moves from reservoir 2 to 1.\n"
            "PROTOCOL refrigerator\n"
            "PARAM mu1 2\nPARAM mu2 1\nPARAM B 1\nPARAM T1 1.5\nPARAM T2 1\nPARAM gamma 1\n"
            "PARAM n_steps 10000\nINIT THERMAL\n";
        s += kSwapBody;
        s += kLegs;
    } else if (name == "erase") {
        s = "# Reset spin 2 to |down> by a high-field isotherm and an adiabatic return.\n"
            "PROTOCOL erase\n"
            "PARAM mu1 1\nPARAM mu2 1\nPARAM B 0\nPARAM T1 1\nPARAM T2 1\nPARAM gamma 1\n"
            "PARAM n_steps 10000\nPARAM Bprime 20\n"
            "INIT THERMAL\n"
            "CONTACT 2 ON\n"
            "RAMP 2 BPRIME N ISOTHERMAL\n"
            "CONTACT 2 OFF\n"
            "RAMP 2 B N ADIABATIC\n";
    } else if (name == "tipped") {
        s = "# Tipped spin 1 run through the cycle without untipping; spin 2 dephases.\n"
            "PROTOCOL tipped\n";
        s += kCarnotParams;
        s += "PARAM theta 0.5\nPARAM n_steps 10000\n"
             "INIT THERMAL TIPPED THETA\n";
        s += kSwapBody;
        s += "DEPHASE 2\n"
             "RAMP 1 MATCHED N ADIABATIC\n"
             "CONTACT 1 ON\n"
             "RAMP 1 B N ISOTHERMAL\n"
             "CONTACT 1 OFF\n"
             "RAMP 2 EQUILIBRIUM N ADIABATIC\n"
             "CONTACT 2 ON\n"
             "RAMP 2 B N ISOTHERMAL\n"
             "CONTACT 2 OFF\n";
    } else if (name == "tipped_free") {
        s = "# Untip spin 1 first, then run the quasi-static cycle.\n"
            "PROTOCOL tipped_free\n";
        s += kCarnotParams;
        s += "PARAM theta 0.5\nPARAM n_steps 10000\n"
             "INIT THERMAL TIPPED THETA\n"
             "PULSE 1 2THETA PI/2\n";
        s += kSwapBody;
        s += kLegs;
    } else if (name == "demo") {
        s = "# |->|down>: two coherent flips extract (mu1 - mu2) B.\n"
            "PROTOCOL demo\n"
            "PARAM mu1 2\nPARAM mu2 1\nPARAM B 1\nPARAM T1 1\nPARAM T2 1\nPARAM gamma 1\n"
            "INIT STATE PLUS DOWN\n"
            "CNOT 1 2\n"
            "CNOT 2 1\n";
    } else {
        throw PreconditionError("unknown template '" + name + "'");
    }
    return s;
}

inline PulseProgram template_program(const std::string &name) {
    return parse_program(template_text(name));
}

}  // namespace qdemon
