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

// JSON and CSV output.
//
// Run report JSON, keys in this order:
//   params       mu1 mu2 B T1 T2 gamma, then theta n_steps Bprime when set
//   steps        [{label, work_on_field, heat_from_res1, heat_from_res2,
//                  entropy_to_res1, entropy_to_res2}]
//   totals       W_out Q_in Q_out dS_total
//   closed_form  protocol-specific closed-form values
//   residuals    protocol-specific |simulated - closed form| values
//   outcome      protocol simulated_W closed_form_W efficiency efficiency_bound
//
// Numbers use the shortest decimal that round-trips; NaN and infinities
// are written as null.

#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qdemon/engine.hpp"
#include "qdemon/program.hpp"
#include "qdemon/runner.hpp"

namespace qdemon {

struct Report {
    NamedValues params;
    std::vector<LedgerEntry> steps;
    LedgerTotals totals;
    NamedValues closed_form;
    NamedValues residuals;
    std::string protocol = "custom";
    double simulated_W = 0.0;
    double closed_form_W = kNaN;
    double efficiency = kNaN;
    double efficiency_bound = kNaN;
};

inline NamedValues params_as_values(const ProgramParams &p) {
    NamedValues v{{"mu1", p.spin.mu1}, {"mu2", p.spin.mu2}, {"B", p.spin.B},
                  {"T1", p.spin.T1},   {"T2", p.spin.T2},   {"gamma", p.spin.gamma}};
    if (p.theta) {
        v.push_back({"theta", *p.theta});
    }
    if (p.n_steps) {
        v.push_back({"n_steps", static_cast<double>(*p.n_steps)});
    }
    if (p.Bprime) {
        v.push_back({"Bprime", *p.Bprime});
    }
    return v;
}

inline Report make_report(const CycleOutcome &out, const ProgramParams &params) {
    Report r;
    r.params = params_as_values(params);
    r.steps = out.ledger.steps();
    r.totals = out.ledger.totals();
    r.closed_form = out.closed_form;
    r.residuals = out.residuals;
    r.protocol = out.protocol;
    r.simulated_W = out.simulated_W;
    r.closed_form_W = out.closed_form_W;
    r.efficiency = out.efficiency;
    r.efficiency_bound = out.efficiency_bound;
    return r;
}

inline Report make_report(const CycleOutcome &out) {
    return make_report(out, ProgramParams{out.params, std::nullopt, std::nullopt, std::nullopt});
}

namespace detail {

inline std::string json_number(double v) {
    return std::isfinite(v) ? format_double(v) : "null";
}

inline std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\t':
                out += "\\t";
                break;
            case '\r':
                out += "\\r";
                break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    static const char *hex = "0123456789abcdef";
                    out += "\\u00";
                    out += hex[(c >> 4) & 0xf];
                    out += hex[c & 0xf];
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

inline void json_object(std::string &out, const NamedValues &values, const char *indent) {
    if (values.empty()) {
        out += "{}";
        return;
    }
    out += "{\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += indent;
        out += "  " + json_string(values[i].name) + ": " + json_number(values[i].value);
        out += i + 1 < values.size() ? ",\n" : "\n";
    }
    out += indent;
    out += "}";
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

inline std::string csv_number(double v) {
    return std::isfinite(v) ? format_double(v) : "";
}

}  // namespace detail

inline std::string emit_json(const Report &r) {
    using detail::json_number;
    using detail::json_string;
    std::string out = "{\n  \"params\": ";
    detail::json_object(out, r.params, "  ");
    out += ",\n  \"steps\": [";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto &e = r.steps[i];
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"label\": " + json_string(e.label) + ", \"work_on_field\": " + json_number(e.work_on_field) +
               ", \"heat_from_res1\": " + json_number(e.heat_from_res1) +
               ", \"heat_from_res2\": " + json_number(e.heat_from_res2) +
               ", \"entropy_to_res1\": " + json_number(e.entropy_to_res1) +
               ", \"entropy_to_res2\": " + json_number(e.entropy_to_res2) + "}";
    }
    out += r.steps.empty() ? "]" : "\n  ]";
    out += ",\n  \"totals\": ";
    detail::json_object(out,
                        {{"W_out", r.totals.W_out},
                         {"Q_in", r.totals.Q_in},
                         {"Q_out", r.totals.Q_out},
                         {"dS_total", r.totals.dS_total}},
                        "  ");
    out += ",\n  \"closed_form\": ";
    detail::json_object(out, r.closed_form, "  ");
    out += ",\n  \"residuals\": ";
    detail::json_object(out, r.residuals, "  ");
    out += ",\n  \"outcome\": {\n    \"protocol\": " + json_string(r.protocol) +
           ",\n    \"simulated_W\": " + json_number(r.simulated_W) +
           ",\n    \"closed_form_W\": " + json_number(r.closed_form_W) +
           ",\n    \"efficiency\": " + json_number(r.efficiency) +
           ",\n    \"efficiency_bound\": " + json_number(r.efficiency_bound) + "\n  }\n}\n";
    return out;
}

inline constexpr const char *kLedgerCsvHeader =
    "step,label,work_on_field,heat_res1,heat_res2,entropy_res1,entropy_res2";

inline std::string emit_csv(const Report &r) {
    std::string out = std::string(kLedgerCsvHeader) + "\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto &e = r.steps[i];
        out += std::to_string(i + 1) + "," + detail::csv_field(e.label) + "," + detail::csv_number(e.work_on_field) +
               "," + detail::csv_number(e.heat_from_res1) + "," + detail::csv_number(e.heat_from_res2) + "," +
               detail::csv_number(e.entropy_to_res1) + "," + detail::csv_number(e.entropy_to_res2) + "\n";
    }
    return out;
}

/// Reads a report written by emit_json.
inline Report parse_report_json(std::string_view text) {
    using json = nlohmann::ordered_json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(std::string("report JSON: ") + e.what());
    }
    auto num = [](const json &v) {
        return v.is_null() ? kNaN : v.get<double>();
    };
    auto values = [&](const json &obj) {
        NamedValues out;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            out.push_back({it.key(), num(it.value())});
        }
        return out;
    };
    try {
        Report r;
        r.params = values(j.at("params"));
        for (const auto &s : j.at("steps")) {
            r.steps.push_back(LedgerEntry{s.at("label").get<std::string>(), num(s.at("work_on_field")),
                                          num(s.at("heat_from_res1")), num(s.at("heat_from_res2")),
                                          num(s.at("entropy_to_res1")), num(s.at("entropy_to_res2"))});
        }
        const auto &t = j.at("totals");
        r.totals = {num(t.at("W_out")), num(t.at("Q_in")), num(t.at("Q_out")), num(t.at("dS_total"))};
        r.closed_form = values(j.at("closed_form"));
        r.residuals = values(j.at("residuals"));
        const auto &o = j.at("outcome");
        r.protocol = o.at("protocol").get<std::string>();
        r.simulated_W = num(o.at("simulated_W"));
        r.closed_form_W = num(o.at("closed_form_W"));
        r.efficiency = num(o.at("efficiency"));
        r.efficiency_bound = num(o.at("efficiency_bound"));
        return r;
    } catch (const json::exception &e) {
        throw Error(std::string("report JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Sweep tables.

inline std::string emit_sweep_csv(const SweepTable &t) {
    std::string out = "index," + t.param + ",W_out,Q_in,Q_out,dS_total,efficiency,efficiency_bound,closed_form_W\n";
    for (const auto &r : t.rows) {
        out += std::to_string(r.index) + "," + detail::csv_number(r.value) + "," + detail::csv_number(r.totals.W_out) +
               "," + detail::csv_number(r.totals.Q_in) + "," + detail::csv_number(r.totals.Q_out) + "," +
               detail::csv_number(r.totals.dS_total) + "," + detail::csv_number(r.efficiency) + "," +
               detail::csv_number(r.efficiency_bound) + "," + detail::csv_number(r.closed_form_W) + "\n";
    }
    return out;
}

inline std::string emit_sweep_json(const SweepTable &t) {
    using detail::json_number;
    std::string out = "{\n  \"param\": " + detail::json_string(t.param) + ",\n  \"rows\": [";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto &r = t.rows[i];
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"index\": " + std::to_string(r.index) + ", \"value\": " + json_number(r.value) +
               ", \"W_out\": " + json_number(r.totals.W_out) + ", \"Q_in\": " + json_number(r.totals.Q_in) +
               ", \"Q_out\": " + json_number(r.totals.Q_out) + ", \"dS_total\": " + json_number(r.totals.dS_total) +
               ", \"efficiency\": " + json_number(r.efficiency) +
               ", \"efficiency_bound\": " + json_number(r.efficiency_bound) +
               ", \"closed_form_W\": " + json_number(r.closed_form_W) + "}";
    }
    out += t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

}  // namespace qdemon
