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

#include "qdemon/emit.hpp"

#include <algorithm>

#include "gtest/gtest.h"
#include "json.hpp"

using namespace qdemon;

namespace {

SpinParams swap_params() {
    return {.mu1 = 2.0, .mu2 = 1.0, .B = 1.0, .gamma = 1.0, .T1 = 8.0, .T2 = 1.0};
}

}  // namespace

TEST(emit, empty_ledger) {
    const auto out = run_program(parse_program(
        "PARAM mu1 2\nPARAM mu2 1\nPARAM B 1\nPARAM T1 8\nPARAM T2 1\nPARAM gamma 1\nINIT THERMAL\n"));
    const auto j = nlohmann::json::parse(emit_json(make_report(out)));
    EXPECT_TRUE(j.at("steps").is_array());
    EXPECT_TRUE(j.at("steps").empty());
    for (const char *k : {"W_out", "Q_in", "Q_out", "dS_total"}) {
        EXPECT_EQ(j.at("totals").at(k).get<double>(), 0.0) << k;
    }
    EXPECT_EQ(emit_csv(make_report(out)), std::string(kLedgerCsvHeader) + "\n");
}

TEST(emit, swap_report_keys) {
    const auto out = run_swap_stage(swap_params());
    const auto j = nlohmann::ordered_json::parse(emit_json(make_report(out)));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) {
        keys.push_back(it.key());
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"params", "steps", "totals", "closed_form", "residuals", "outcome"}));
    EXPECT_EQ(j.at("steps").size(), 3u);
    EXPECT_LE(j.at("residuals").at("eq6").get<double>(), 1e-10);
    EXPECT_NEAR(j.at("totals").at("W_out").get<double>(), 0.5166754935520557, 1e-12);
    EXPECT_EQ(j.at("params").at("T1").get<double>(), 8.0);
    EXPECT_TRUE(j.at("outcome").at("efficiency").is_null());
}

TEST(emit, json_round_trip_is_byte_identical) {
    for (const char *name : kTemplateNames) {
        const PulseProgram prog = template_program(name);
        const std::string a = emit_json(make_report(run_program(prog), prog.params));
        const std::string b = emit_json(parse_report_json(a));
        EXPECT_EQ(a, b) << name;
    }
}

TEST(emit, json_escapes_labels) {
    Report r;
    r.steps.push_back({"odd \"label\"\n\x01", 1.0, 0.0, 0.0, 0.0, 0.0});
    const std::string text = emit_json(r);
    EXPECT_EQ(nlohmann::json::parse(text).at("steps")[0].at("label").get<std::string>(), "odd \"label\"\n\x01");
    EXPECT_EQ(emit_json(parse_report_json(text)), text);
    EXPECT_THROW(parse_report_json("{"), Error);
    EXPECT_THROW(parse_report_json("{}"), Error);
}

TEST(emit, csv_ledger) {
    const auto csv = emit_csv(make_report(run_swap_stage(swap_params())));
    const auto first = csv.find('\n');
    EXPECT_EQ(csv.substr(0, first), kLedgerCsvHeader);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    EXPECT_EQ(csv.substr(first + 1, 2), "1,");
    Report r;
    r.steps.push_back({"a,b", 1.0, 0.0, 0.0, 0.0, 0.0});
    EXPECT_NE(emit_csv(r).find("\"a,b\""), std::string::npos);
}

TEST(emit, sweep_tables) {
    const auto t = run_sweep(template_program("swap"), parse_sweep_range("T1", "2:8:3"), 2);
    const auto csv = emit_sweep_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "index,T1,W_out,Q_in,Q_out,dS_total,efficiency,efficiency_bound,closed_form_W");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    const auto j = nlohmann::json::parse(emit_sweep_json(t));
    EXPECT_EQ(j.at("param"), "T1");
    ASSERT_EQ(j.at("rows").size(), 3u);
    EXPECT_EQ(j.at("rows")[2].at("value").get<double>(), 8.0);
    EXPECT_TRUE(j.at("rows")[0].at("efficiency").is_null());
    EXPECT_NEAR(j.at("rows")[2].at("W_out").get<double>(), 0.5166754935520557, 1e-12);
}
