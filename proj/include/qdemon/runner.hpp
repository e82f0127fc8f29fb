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

// Executes pulse programs on the machine and sweeps them over a parameter.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <string>
#include <system_error>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "qdemon/engine.hpp"
#include "qdemon/program.hpp"

namespace qdemon {

namespace detail {

inline double resolve_field(const FieldRef &f, const Machine &m, Spin s, const ProgramParams &p) {
    switch (f.kind) {
        case FieldRef::Kind::Literal:
            return f.value;
        case FieldRef::Kind::Base:
            return p.spin.B;
        case FieldRef::Kind::Matched:
            return matched_field(p.spin, s);
        case FieldRef::Kind::TRatio:
            return temperature_ratio_field(p.spin, s);
        case FieldRef::Kind::BPrime:
            if (!p.Bprime) {
                throw PreconditionError("BPRIME used but PARAM Bprime is not set");
            }
            return *p.Bprime;
        case FieldRef::Kind::Equilibrium:
            return m.equilibrium_field(s);
    }
    return 0.0;
}

inline void execute(Machine &m, const Instruction &ins, const ProgramParams &p) {
    std::visit(
        [&](const auto &x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, op::Pulse>) {
                m.pulse(PulseSpec{x.spin, resolve_pulse_angle(x.angle, p), resolve_pulse_angle(x.phase, p)});
            } else if constexpr (std::is_same_v<T, op::Wait>) {
                m.wait(resolve_duration(x.duration, p.spin));
            } else if constexpr (std::is_same_v<T, op::Cnot>) {
                m.cnot(x.control, x.target, x.mode);
            } else if constexpr (std::is_same_v<T, op::Measure>) {
                m.measure(x.spin);
            } else if constexpr (std::is_same_v<T, op::Dephase>) {
                m.dephase(x.spin);
            } else if constexpr (std::is_same_v<T, op::Contact>) {
                m.set_contact(x.spin, x.on);
            } else if constexpr (std::is_same_v<T, op::Thermalize>) {
                m.thermalize(x.spin);
            } else if constexpr (std::is_same_v<T, op::Ramp>) {
                m.ramp(x.spin, resolve_field(x.field, m, x.spin, p), resolve_steps(x.steps, p), x.mode);
            }
        },
        ins);
}

inline std::string where(const PulseProgram &prog, std::size_t i) {
    std::string s = "instruction " + std::to_string(i + 1);
    if (i < prog.lines.size()) {
        s += " (line " + std::to_string(prog.lines[i]) + ")";
    }
    return s;
}

}  // namespace detail

/// Runs a program. Errors raised by an instruction are rethrown with its
/// 1-based index (and source line when known) prefixed.
inline CycleOutcome run_program(const PulseProgram &prog) {
    const ProgramParams &p = prog.params;
    Machine m(p.spin, initial_state(prog.init, p));
    for (std::size_t i = 0; i < prog.instructions.size(); ++i) {
        try {
            detail::execute(m, prog.instructions[i], p);
            m.check_invariants();
        } catch (const InvariantError &e) {
            throw InvariantError(detail::where(prog, i) + ": " + e.what());
        } catch (const DimensionError &e) {
            throw DimensionError(detail::where(prog, i) + ": " + e.what());
        } catch (const PreconditionError &e) {
            throw PreconditionError(detail::where(prog, i) + ": " + e.what());
        }
    }
    const ProtocolKind kind = prog.protocol.value_or(ProtocolKind::Custom);
    const ProtocolExtras extras{p.theta.value_or(0.0), p.n_steps.value_or(0), p.Bprime.value_or(kNaN)};
    CycleOutcome out = annotate(kind, m, extras);
    if (kind == ProtocolKind::Tipped && extras.n_steps > 0) {
        add_work_gap(out, extras.theta, extras.n_steps);
    }
    if (kind == ProtocolKind::Erase && p.Bprime && p.spin.mu2 * *p.Bprime / p.spin.T2 < 10.0) {
        out.warnings.push_back("mu2*B'/T2 < 10: spin 2 is left far from |down>");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepSpec {
    std::string param;
    double start = 0.0;
    double end = 1.0;
    long count = 2;
    bool log = false;

    void validate() const {
        if (std::find(kParamNames.begin(), kParamNames.end(), param) == kParamNames.end()) {
            throw PreconditionError("unknown sweep parameter '" + param + "'");
        }
        if (!std::isfinite(start) || !std::isfinite(end)) {
            throw PreconditionError("sweep range endpoints must be finite");
        }
        if (count < 2) {
            throw PreconditionError("sweep count must be >= 2");
        }
        if (log && !(start > 0.0 && end > 0.0)) {
            throw PreconditionError("log sweep needs positive endpoints");
        }
    }

    /// Grid point `i`; endpoints are exact.
    double value(long i) const {
        if (i == 0) {
            return start;
        }
        if (i == count - 1) {
            return end;
        }
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        if (log) {
            return std::exp(std::log(start) + f * (std::log(end) - std::log(start)));
        }
        return start + f * (end - start);
    }
};

/// Parses "START:END:COUNT" or "START:END:COUNT:log".
inline SweepSpec parse_sweep_range(const std::string &param, const std::string &range) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t c = range.find(':', pos);
        parts.push_back(range.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
        if (c == std::string::npos) {
            break;
        }
        pos = c + 1;
    }
    if (parts.size() != 3 && parts.size() != 4) {
        throw PreconditionError("range must be START:END:COUNT[:log], got '" + range + "'");
    }
    auto num = [&](const std::string &s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw PreconditionError("malformed number '" + s + "' in range");
        }
        return v;
    };
    SweepSpec spec;
    spec.param = param;
    spec.start = num(parts[0]);
    spec.end = num(parts[1]);
    long count = 0;
    auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
    if (ec != std::errc() || ptr != parts[2].data() + parts[2].size()) {
        throw PreconditionError("malformed count '" + parts[2] + "' in range");
    }
    spec.count = count;
    if (parts.size() == 4) {
        if (parts[3] != "log" && parts[3] != "LOG") {
            throw PreconditionError("range scale must be 'log', got '" + parts[3] + "'");
        }
        spec.log = true;
    }
    spec.validate();
    return spec;
}

struct SweepRow {
    long index = 0;
    double value = 0.0;
    LedgerTotals totals;
    double efficiency = kNaN;
    double efficiency_bound = kNaN;
    double closed_form_W = kNaN;

    bool operator==(const SweepRow &) const = default;
};

struct SweepTable {
    std::string param;
    std::vector<SweepRow> rows;
};

/// One row per grid point in grid order; points may run concurrently.
/// The first failing point (by grid index) rethrows its error.
inline SweepTable run_sweep(const PulseProgram &base, const SweepSpec &spec, unsigned threads = 0) {
    spec.validate();
    SweepTable table{spec.param, std::vector<SweepRow>(static_cast<std::size_t>(spec.count))};
    std::vector<std::exception_ptr> errors(table.rows.size());
    std::atomic<long> next{0};
    auto worker = [&]() {
        for (long i = next++; i < spec.count; i = next++) {
            const auto k = static_cast<std::size_t>(i);
            try {
                PulseProgram prog = base;
                double v = spec.value(i);
                if (spec.param == "n_steps") {
                    v = std::max(1.0, std::round(v));
                }
                set_param(prog.params, spec.param, v);
                prog.params.spin.validate();
                const CycleOutcome out = run_program(prog);
                table.rows[k] = SweepRow{i, v, out.ledger.totals(), out.efficiency, out.efficiency_bound,
                                         out.closed_form_W};
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<long>(threads, spec.count));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return table;
}

}  // namespace qdemon
