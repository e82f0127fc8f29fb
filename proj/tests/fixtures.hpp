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

// Test inputs shared by the unit tests and the acceptance binary:
// broken variants of a valid program, and random valid programs.

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qdemon/program.hpp"

namespace qdemon_test {

inline const std::vector<std::string> kBaseLines{
    "PROTOCOL swap",     // 1
    "PARAM mu1 2",       // 2
    "PARAM mu2 1",       // 3
    "PARAM B 1",         // 4
    "PARAM T1 8",        // 5
    "PARAM T2 1",        // 6
    "PARAM gamma 1",     // 7
    "INIT THERMAL",      // 8
    "CNOT 1 2",          // 9
    "CNOT 2 1",          // 10
    "CNOT 1 2",          // 11
};

struct Mutation {
    std::string name;
    std::string text;
    int line;  // where the parser must report the error
};

namespace detail {

inline std::string join(const std::vector<std::string> &lines) {
    std::string s;
    for (const auto &l : lines) {
        s += l + "\n";
    }
    return s;
}

// Replaces 1-based lines.
inline std::string replaced(const std::map<int, std::string> &edits) {
    auto lines = kBaseLines;
    for (const auto &[k, v] : edits) {
        lines[static_cast<std::size_t>(k - 1)] = v;
    }
    return join(lines);
}

inline std::string inserted_after(int k, const std::string &line) {
    auto lines = kBaseLines;
    lines.insert(lines.begin() + k, line);
    return join(lines);
}

inline std::string deleted(int k) {
    auto lines = kBaseLines;
    lines.erase(lines.begin() + (k - 1));
    return join(lines);
}

}  // namespace detail

inline std::string base_program_text() {
    return detail::join(kBaseLines);
}

/// Fifty single-defect variants of the swap program.
inline std::vector<Mutation> mutated_programs() {
    using detail::deleted;
    using detail::inserted_after;
    using detail::replaced;
    std::vector<Mutation> m{
        {"unknown_protocol", replaced({{1, "PROTOCOL nonsense"}}), 1},
        {"protocol_without_name", replaced({{1, "PROTOCOL"}}), 1},
        {"duplicate_protocol", inserted_after(1, "PROTOCOL swap"), 2},
        {"param_without_value", replaced({{2, "PARAM mu1"}}), 2},
        {"param_word_value", replaced({{2, "PARAM mu1 two"}}), 2},
        {"param_extra_token", replaced({{2, "PARAM mu1 2 3"}}), 2},
        {"unknown_param", replaced({{2, "PARAM mu9 2"}}), 2},
        {"negative_moment", replaced({{2, "PARAM mu1 -2"}}), 8},
        {"duplicate_param", replaced({{3, "PARAM mu1 1"}}), 3},
        {"zero_temperature", replaced({{5, "PARAM T1 0"}}), 8},
        {"overflowing_number", replaced({{5, "PARAM T1 1e999"}}), 5},
        {"negative_field", replaced({{4, "PARAM B -1"}}), 8},
        {"theta_out_of_range", inserted_after(7, "PARAM theta 4"), 8},
        {"fractional_n_steps", inserted_after(7, "PARAM n_steps 2.5"), 8},
        {"missing_param_B", deleted(4), 7},
        {"init_without_kind", replaced({{8, "INIT"}}), 8},
        {"init_unknown_kind", replaced({{8, "INIT WARM"}}), 8},
        {"init_state_one_ket", replaced({{8, "INIT STATE DOWN"}}), 8},
        {"init_unknown_ket", replaced({{8, "INIT STATE DOWN SIDEWAYS"}}), 8},
        {"init_tipped_without_angle", replaced({{8, "INIT THERMAL TIPPED"}}), 8},
        {"init_tipped_out_of_range", replaced({{8, "INIT THERMAL TIPPED 4"}}), 8},
        {"init_trailing_token", replaced({{8, "INIT THERMAL EXTRA"}}), 8},
        {"init_theta_unset", replaced({{8, "INIT THERMAL TIPPED THETA"}}), 8},
        {"duplicate_init", inserted_after(8, "INIT THERMAL"), 9},
        {"missing_init", deleted(8), 8},
        {"init_before_params", replaced({{2, "INIT THERMAL"}, {8, "PARAM mu1 2"}}), 2},
        {"param_after_init", inserted_after(9, "PARAM theta 0.5"), 10},
        {"cnot_same_spin", replaced({{9, "CNOT 1 1"}}), 9},
        {"cnot_bad_spin", replaced({{9, "CNOT 1 3"}}), 9},
        {"cnot_missing_target", replaced({{9, "CNOT 1"}}), 9},
        {"cnot_unknown_mode", replaced({{9, "CNOT 1 2 FAST"}}), 9},
        {"cnot_trailing_token", replaced({{9, "CNOT 1 2 IDEAL EXTRA"}}), 9},
        {"misspelled_keyword", replaced({{9, "CNOTT 1 2"}}), 9},
        {"pulse_missing_phase", replaced({{9, "PULSE 1 PI"}}), 9},
        {"pulse_bad_spin", replaced({{9, "PULSE 3 PI 0"}}), 9},
        {"pulse_angle_out_of_range", replaced({{9, "PULSE 1 7 0"}}), 9},
        {"pulse_negative_phase", replaced({{9, "PULSE 1 PI -1"}}), 9},
        {"pulse_theta_unset", replaced({{9, "PULSE 1 THETA 0"}}), 9},
        {"pulse_bad_symbol", replaced({{9, "PULSE 1 PI/2 PI/3"}}), 9},
        {"wait_without_duration", replaced({{9, "WAIT"}}), 9},
        {"wait_negative", replaced({{9, "WAIT -1"}}), 9},
        {"wait_word", replaced({{9, "WAIT soon"}}), 9},
        {"measure_without_spin", replaced({{10, "MEASURE"}}), 10},
        {"measure_spin_zero", replaced({{10, "MEASURE 0"}}), 10},
        {"dephase_two_spins", replaced({{10, "DEPHASE 1 2"}}), 10},
        {"contact_without_state", replaced({{10, "CONTACT 1"}}), 10},
        {"contact_bad_state", replaced({{10, "CONTACT 1 MAYBE"}}), 10},
        {"ramp_zero_steps", replaced({{10, "RAMP 1 2 0 ADIABATIC"}}), 10},
        {"ramp_symbolic_steps_unset", replaced({{10, "RAMP 1 2 N ADIABATIC"}}), 10},
        {"pulsed_cnot_without_coupling", replaced({{7, "PARAM gamma 0"}, {11, "CNOT 1 2 PULSED"}}), 11},
    };
    return m;
}

/// Random valid program text. Contacts and ramp modes respect the
/// machine's rules, so a correct runner never throws on these.
inline std::string random_program(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> logu(std::log(0.3), std::log(3.0));
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    auto pos = [&]() { return qdemon::format_double(std::exp(logu(rng))); };
    std::string s;
    s += "PARAM mu1 " + pos() + "\n";
    s += "PARAM mu2 " + pos() + "\n";
    s += "PARAM B " + pos() + "\n";
    s += "PARAM T1 " + pos() + "\n";
    s += "PARAM T2 " + pos() + "\n";
    s += "PARAM gamma " + pos() + "\n";
    switch (rng() % 3) {
        case 0:
            s += "INIT THERMAL\n";
            break;
        case 1:
            s += "INIT THERMAL TIPPED " + qdemon::format_double(angle(rng) / 2.0) + "\n";
            break;
        default: {
            static const char *kets[] = {"DOWN", "UP", "PLUS", "TIPPED 0.7"};
            s += std::string("INIT STATE ") + kets[rng() % 4] + " " + kets[rng() % 4] + "\n";
        }
    }
    const int count = 3 + static_cast<int>(rng() % 14);
    for (int i = 0; i < count; ++i) {
        const std::string spin = rng() % 2 ? "1" : "2";
        const std::string partner = spin == "1" ? "2" : "1";
        switch (rng() % 8) {
            case 0:
                s += "PULSE " + spin + " " + qdemon::format_double(angle(rng)) + " " +
                     qdemon::format_double(angle(rng)) + "\n";
                break;
            case 1:
                s += "WAIT " + qdemon::format_double(angle(rng)) + "\n";
                break;
            case 2:
                s += "CNOT " + spin + " " + partner + (rng() % 2 ? " PULSED\n" : "\n");
                break;
            case 3:
                s += "MEASURE " + spin + "\n";
                break;
            case 4:
                s += "DEPHASE " + spin + "\n";
                break;
            case 5:
                s += "CONTACT " + spin + " ON\nTHERMALIZE " + spin + "\nCONTACT " + spin + " OFF\n";
                break;
            case 6:
                s += "RAMP " + spin + " " + pos() + " 200 ADIABATIC\n";
                break;
            default:
                s += "CONTACT " + spin + " ON\nRAMP " + spin + " " + pos() + " 200 ISOTHERMAL\nCONTACT " + spin +
                     " OFF\n";
        }
    }
    return s;
}

}  // namespace qdemon_test
