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

// Property suite run by `qdemon check`. Deterministic: every random draw
// comes from a fixed seed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qdemon/emit.hpp"
#include "qdemon/engine.hpp"
#include "qdemon/program.hpp"
#include "qdemon/runner.hpp"

namespace qdemon {

/// Random full-rank state: G G^dag / tr, G with complex Gaussian entries.
template <typename Rng>
DensityMatrix random_density_matrix(Rng &rng, std::size_t dim) {
    std::normal_distribution<double> g;
    CMatrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            m(r, c) = Complex(g(rng), g(rng));
        }
    }
    CMatrix rho = m * adjoint(m);
    rho *= Complex(1.0 / trace(rho).real());
    // Symmetrize away rounding so the Hermiticity check is exact.
    const CMatrix h = (rho + adjoint(rho)) * Complex(0.5);
    return DensityMatrix(h);
}

/// Random pure state.
template <typename Rng>
DensityMatrix random_pure_state(Rng &rng, std::size_t dim) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(dim);
    for (auto &a : v) {
        a = Complex(g(rng), g(rng));
    }
    return DensityMatrix::pure(v);
}

/// Parameters with every quantity drawn log-uniformly from [lo, hi].
template <typename Rng>
SpinParams random_params(Rng &rng, double lo = 0.1, double hi = 10.0) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    auto draw = [&]() {
        return std::exp(u(rng));
    };
    SpinParams p;
    p.mu1 = draw();
    p.mu2 = draw();
    p.B = draw();
    p.gamma = draw();
    p.T1 = draw();
    p.T2 = draw();
    return p;
}

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

inline PropertyResult max_below(std::string name, double worst, double tol) {
    return {std::move(name), worst <= tol, "max " + sci(worst) + " <= " + sci(tol)};
}

inline PropertyResult min_above(std::string name, double worst, double tol) {
    return {std::move(name), worst >= tol, "min " + sci(worst) + " >= " + sci(tol)};
}

}  // namespace detail

inline std::vector<PropertyResult> run_invariant_suite(std::uint64_t seed = 20260515) {
    using detail::max_below;
    using detail::min_above;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<PropertyResult> out;

    auto guarded = [&](const std::string &name, const std::function<PropertyResult()> &f) {
        try {
            out.push_back(f());
        } catch (const std::exception &e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };

    guarded("unitarity", [&] {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const SpinParams p = random_params(rng);
            const Spin s = i % 2 ? Spin::One : Spin::Two;
            for (const Unitary &u : {rotation_pulse({s, angle(rng), angle(rng)}), free_evolution(p, angle(rng)),
                                     cnot_pulse_sequence(p, s, other(s))}) {
                worst = std::max(worst, max_abs_diff(u.mat() * adjoint(u.mat()), CMatrix::identity(4)));
            }
        }
        return max_below("unitarity", worst, 1e-10);
    });

    guarded("swap_self_inverse", [&] {
        double worst = 0.0;
        const SpinParams p{};
        for (int i = 0; i < 200; ++i) {
            const DensityMatrix rho = random_density_matrix(rng, 4);
            const auto once = swap_sequence(rho, p);
            const auto twice = swap_sequence(once.state, p);
            worst = std::max(worst, max_abs_diff(twice.state.mat(), rho.mat()));
        }
        return max_below("swap_self_inverse", worst, 0.0);
    });

    guarded("flip_reversibility", [&] {
        double worst = 0.0;
        const SpinParams p{};
        for (int i = 0; i < 200; ++i) {
            const DensityMatrix rho = random_density_matrix(rng, 4);
            auto a = conditional_flip(rho, Spin::One, Spin::Two, p);
            auto b = conditional_flip(a.state, Spin::Two, Spin::One, p);
            auto c = conditional_flip(b.state, Spin::Two, Spin::One, p);
            auto d = conditional_flip(c.state, Spin::One, Spin::Two, p);
            worst = std::max(worst, trace_distance(d.state, rho));
        }
        return max_below("flip_reversibility", worst, 1e-12);
    });

    guarded("cnot_pulse_fidelity", [&] {
        double worst = 1.0;
        std::vector<double> gammas{0.1, 1.0, 10.0};
        std::uniform_real_distribution<double> lg(std::log(1e-2), std::log(1e2));
        for (int i = 0; i < 20; ++i) {
            gammas.push_back(std::exp(lg(rng)));
        }
        for (double g : gammas) {
            SpinParams p;
            p.gamma = g;
            for (Spin c : {Spin::One, Spin::Two}) {
                worst = std::min(worst,
                                 phase_insensitive_fidelity(cnot_pulse_sequence(p, c, other(c)), cnot_ideal(c, other(c))));
            }
        }
        return min_above("cnot_pulse_fidelity", worst, 1.0 - 1e-9);
    });

    guarded("coherent_energy_balance", [&] {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const SpinParams p = random_params(rng);
            const auto r = swap_sequence(random_density_matrix(rng, 4), p);
            for (const auto &w : r.records) {
                worst = std::max(worst, std::abs(w.work_on_field + w.delta_spin_energy));
            }
        }
        return max_below("coherent_energy_balance", worst, 0.0);
    });

    guarded("measurement_entropy_nondecreasing", [&] {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const std::size_t dim = i % 2 ? 2 : 4;
            const DensityMatrix rho = i % 3 == 0 ? random_pure_state(rng, dim) : random_density_matrix(rng, dim);
            // Random orthogonal projector pair from a random pure state.
            const DensityMatrix axis = random_pure_state(rng, dim);
            const auto ch = MeasurementChannel({axis.mat(), CMatrix::identity(dim) - axis.mat()});
            worst = std::min(worst, delta_S_Q(rho, ch));
        }
        return min_above("measurement_entropy_nondecreasing", worst, -1e-12);
    });

    guarded("channels_preserve_states", [&] {
        for (int i = 0; i < 200; ++i) {
            const DensityMatrix rho = random_density_matrix(rng, 4);
            (void)DensityMatrix(qdemon::measure(rho, MeasurementChannel::spin_z(Spin::One)).mat());
            (void)DensityMatrix(dephase(rho, Spin::Two).mat());
        }
        return PropertyResult{"channels_preserve_states", true, "200 random states"};
    });

    guarded("gibbs_entropy_matches_vn", [&] {
        double worst = 0.0;
        double worst_identity = 0.0;
        for (int k = 0; k <= 120; ++k) {
            const double x = std::pow(10.0, -3.0 + 6.0 * k / 120.0);
            const GibbsSpec g{1.0, x, 1.0};
            const double S = gibbs_entropy(g);
            worst = std::max(worst, std::abs(vn_entropy(thermal_state(g)) - S));
            const auto d = gibbs_distribution(g);
            const double identity = gibbs_energy(g) / g.T + d.log_Z;
            worst_identity = std::max(worst_identity, std::abs(identity - binary_entropy(d.p.p_up)));
        }
        return max_below("gibbs_entropy_matches_vn", std::max(worst, worst_identity), 1e-12);
    });

    guarded("quantum_efficiency_below_carnot", [&] {
        double worst = -1.0;
        std::uniform_real_distribution<double> u(0.01, 3.0);
        for (int i = 0; i < 1000; ++i) {
            const auto r = efficiencies(u(rng), u(rng), u(rng), u(rng), u(rng));
            worst = std::max(worst, r.quantum - r.carnot);
        }
        return max_below("quantum_efficiency_below_carnot", worst, 1e-12);
    });

    guarded("swap_work_closed_form_grid", [&] {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                for (int k = 0; k < 10; ++k) {
                    SpinParams p;
                    p.mu1 = 1.0;
                    p.T1 = 1.0;
                    p.mu2 = 0.1 + 1.9 * i / 9.0;
                    p.T2 = 0.1 + 1.9 * j / 9.0;
                    p.B = 0.05 + 4.95 * k / 9.0;
                    worst = std::max(worst, run_swap_stage(p).residual("eq6"));
                }
            }
        }
        return max_below("swap_work_closed_form_grid", worst, 1e-10);
    });

    guarded("equilibrium_null", [&] {
        double worst = -1.0;
        for (int i = 0; i < 1000; ++i) {
            SpinParams p = random_params(rng);
            p.T2 = p.T1;
            worst = std::max(worst, run_swap_stage(p).simulated_W);
        }
        return max_below("equilibrium_null", worst, 1e-12);
    });

    guarded("positivity_predicate", [&] {
        int mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            const SpinParams p = random_params(rng);
            mismatches += (run_swap_stage(p).simulated_W > 0.0) != work_positive_region(p);
        }
        return PropertyResult{"positivity_predicate", mismatches == 0, std::to_string(mismatches) + " mismatches"};
    });

    guarded("swap_populations", [&] {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            worst = std::max(worst, run_swap_stage(random_params(rng)).residual("swap_populations"));
        }
        return max_below("swap_populations", worst, 1e-15);
    });

    guarded("step_closed_forms", [&] {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const SpinParams p = random_params(rng);
            const auto o = run_swap_stage(p);
            const double sum = -step1_work_closed(p) + step2_work_closed(p) + step3_work_closed(p);
            worst = std::max({worst, std::abs(sum - swap_work_closed(p)), o.residual("step1"), o.residual("step2"),
                              o.residual("step3")});
        }
        return max_below("step_closed_forms", worst, 1e-10);
    });

    guarded("carnot_convergence", [&] {
        SpinParams p;
        p.mu1 = 1.0;
        p.mu2 = 1.5;
        p.B = 1.0;
        p.T1 = 2.0;
        p.T2 = 1.0;
        const double e1 = run_carnot_cycle(p, 1000).residual("efficiency");
        const double e2 = run_carnot_cycle(p, 2000).residual("efficiency");
        const double ratio = e1 / e2;
        return PropertyResult{"carnot_convergence", ratio >= 1.6 && ratio <= 2.4,
                              "error ratio n=1000/n=2000 = " + detail::sci(ratio)};
    });

    guarded("template_conservation", [&] {
        double worst_first = 0.0;
        double worst_second = 0.0;
        for (const char *name : kTemplateNames) {
            PulseProgram prog = template_program(name);
            if (prog.params.n_steps) {
                prog.params.n_steps = 1000;
            }
            const auto o = run_program(prog);
            worst_first = std::max(worst_first, o.residual("first_law"));
            worst_second = std::min(worst_second, o.residual("entropy_production"));
        }
        const bool ok = worst_first <= 1e-10 && worst_second >= -1e-10;
        return PropertyResult{"template_conservation", ok,
                              "first law max " + detail::sci(worst_first) + ", entropy production min " +
                                  detail::sci(worst_second)};
    });

    guarded("quantum_efficiency_route", [&] {
        SpinParams p;
        p.mu1 = 1.0;
        p.mu2 = 1.5;
        p.B = 1.0;
        p.T1 = 2.0;
        p.T2 = 1.0;
        double worst = -1.0;
        for (int k = 0; k <= 8; ++k) {
            const double theta = 0.5 * std::numbers::pi * k / 8.0;
            const auto o = tipped_measured_route(p, TippedSpec{theta}, 1000);
            worst = std::max({worst, o.closed("eps_Q") - o.closed("eps_C"), o.efficiency - o.efficiency_bound});
        }
        return max_below("quantum_efficiency_route", worst, 1e-12);
    });

    guarded("program_round_trip", [&] {
        int bad = 0;
        for (const char *name : kTemplateNames) {
            const PulseProgram a = template_program(name);
            const std::string text = serialize_program(a);
            const PulseProgram b = parse_program(text);
            bad += !(a == b) || serialize_program(b) != text;
        }
        return PropertyResult{"program_round_trip", bad == 0, std::to_string(bad) + " templates differ"};
    });

    guarded("report_round_trip", [&] {
        int bad = 0;
        for (const char *name : {"swap", "basic", "demo"}) {
            const PulseProgram prog = template_program(name);
            const std::string a = emit_json(make_report(run_program(prog), prog.params));
            bad += emit_json(parse_report_json(a)) != a;
        }
        return PropertyResult{"report_round_trip", bad == 0, std::to_string(bad) + " reports differ"};
    });

    return out;
}

}  // namespace qdemon
