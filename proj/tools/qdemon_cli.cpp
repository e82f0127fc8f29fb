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

// qdemon: run pulse programs, sweep them, and check invariants.
//
// Exit codes: 0 success, 1 parse error, 2 precondition violation,
// 3 invariant failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qdemon/qdemon.hpp"

namespace {

constexpr int kExitParse = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitInvariant = 3;

struct Source {
    std::string file;
    std::string template_name;
};

qdemon::PulseProgram load(const Source &src) {
    if (!src.template_name.empty()) {
        return qdemon::template_program(src.template_name);
    }
    if (src.file.empty()) {
        throw qdemon::PreconditionError("give a program file or --template NAME");
    }
    std::ifstream in(src.file, std::ios::binary);
    if (!in) {
        throw qdemon::PreconditionError("cannot open '" + src.file + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return qdemon::parse_program(ss.str());
}

void write(const std::string &text, const std::string &path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw qdemon::PreconditionError("cannot write '" + path + "'");
    }
    out << text;
}

void add_source(CLI::App *cmd, Source &src) {
    cmd->add_option("file", src.file, "Pulse-program file");
    cmd->add_option("--template", src.template_name, "Built-in program")
        ->check(CLI::IsMember(std::vector<std::string>(qdemon::kTemplateNames.begin(), qdemon::kTemplateNames.end())));
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Two-spin demon engine simulator"};
    app.require_subcommand(1);

    Source run_src;
    std::string run_format = "json";
    std::string run_out;
    auto *run = app.add_subcommand("run", "Run a pulse program and emit its ledger");
    add_source(run, run_src);
    run->add_option("--format", run_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    run->add_option("--out", run_out, "Output path (default stdout)");

    Source sweep_src;
    std::string sweep_param;
    std::string sweep_range;
    std::string sweep_format = "csv";
    std::string sweep_out;
    unsigned sweep_threads = 0;
    auto *sweep = app.add_subcommand("sweep", "Run a program over a grid of one parameter");
    add_source(sweep, sweep_src);
    sweep->add_option("--param", sweep_param, "Parameter name")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(qdemon::kParamNames.begin(), qdemon::kParamNames.end())));
    sweep->add_option("--range", sweep_range, "START:END:COUNT[:log]")->required();
    sweep->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"json", "csv"}));
    sweep->add_option("--out", sweep_out, "Output path (default stdout)");
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = hardware)");

    auto *check = app.add_subcommand("check", "Run the invariant suite");

    std::string show_name;
    auto *show = app.add_subcommand("template", "Print a built-in program");
    show->add_option("name", show_name, "Template name")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(qdemon::kTemplateNames.begin(), qdemon::kTemplateNames.end())));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto prog = load(run_src);
            const auto outcome = qdemon::run_program(prog);
            for (const auto &w : outcome.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            const auto report = qdemon::make_report(outcome, prog.params);
            write(run_format == "csv" ? qdemon::emit_csv(report) : qdemon::emit_json(report), run_out);
        } else if (*sweep) {
            const auto prog = load(sweep_src);
            const auto spec = qdemon::parse_sweep_range(sweep_param, sweep_range);
            const auto table = qdemon::run_sweep(prog, spec, sweep_threads);
            write(sweep_format == "json" ? qdemon::emit_sweep_json(table) : qdemon::emit_sweep_csv(table), sweep_out);
        } else if (*check) {
            bool ok = true;
            for (const auto &r : qdemon::run_invariant_suite()) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
                ok = ok && r.passed;
            }
            return ok ? 0 : kExitInvariant;
        } else if (*show) {
            std::cout << qdemon::template_text(show_name);
        }
    } catch (const qdemon::ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const qdemon::InvariantError &e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const qdemon::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
    return 0;
}
