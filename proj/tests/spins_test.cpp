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

#include "qdemon/spins.hpp"

#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "qdemon/thermo.hpp"

using namespace qdemon;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix basis_state(std::size_t k) {
    std::array<Complex, 4> v{};
    v[k] = 1.0;
    return DensityMatrix::pure(v);
}

// Basis index 2*s1 + s2 with down = 0.
constexpr std::size_t kDD = 0, kDU = 1, kUD = 2, kUU = 3;

SpinParams example_params() {
    SpinParams p;
    p.mu1 = 2.0;
    p.mu2 = 1.0;
    p.B = 1.0;
    p.T1 = 8.0;
    p.T2 = 1.0;
    return p;
}

std::array<Complex, 4> apply_to(const Unitary &u, const std::array<Complex, 4> &v) {
    std::array<Complex, 4> out{};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            out[r] += u(r, c) * v[c];
        }
    }
    return out;
}

}  // namespace

TEST(spins, pauli_algebra) {
    EXPECT_LE(max_abs_diff(pauli::x() * pauli::y(), pauli::z() * Complex(0.0, 1.0)), 1e-15);
    EXPECT_EQ(pauli::z()(0, 0), Complex(-1.0));
}

TEST(spins, larmor_frequency_cases) {
    EXPECT_EQ(larmor_frequency(1.0, 0.0), 0.0);
    EXPECT_EQ(larmor_frequency(1.0, 1.0), 2.0);
    EXPECT_EQ(larmor_frequency(0.5, 3.0), 3.0);
    EXPECT_THROW(larmor_frequency(0.0, 1.0), PreconditionError);
    EXPECT_THROW(larmor_frequency(1.0, -1.0), PreconditionError);
}

TEST(spins, rotation_pulse_cases) {
    EXPECT_LE(max_abs_diff(single_spin_rotation(0.0, 0.3), CMatrix::identity(2)), 1e-15);
    // Flip of |down> by a pi pulse about x gives -i|up>.
    const CMatrix r = single_spin_rotation(kPi, 0.0);
    EXPECT_LE(std::abs(r(0, 0)), 1e-15);
    EXPECT_LE(std::abs(r(1, 0) - Complex(0.0, -1.0)), 1e-15);
    // pi/2 on |up>: hand-computed column (-i/sqrt2, 1/sqrt2), <sz> = 0.
    const CMatrix h = single_spin_rotation(kPi / 2, 0.0);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_LE(std::abs(h(0, 1) - Complex(0.0, -s)), 1e-15);
    EXPECT_LE(std::abs(h(1, 1) - Complex(s, 0.0)), 1e-15);
    EXPECT_NEAR(std::norm(h(1, 1)) - std::norm(h(0, 1)), 0.0, 1e-15);
    EXPECT_THROW(rotation_pulse({Spin::One, 2 * kPi, 0.0}), PreconditionError);
    EXPECT_THROW(rotation_pulse({Spin::One, 1.0, -0.1}), PreconditionError);
}

TEST(spins, free_evolution_conditional_phase) {
    SpinParams p;
    p.gamma = 0.4;
    EXPECT_LE(max_abs_diff(free_evolution(p, 0.0).mat(), CMatrix::identity(4)), 1e-15);
    const Unitary u = free_evolution(p, cnot_wait_time(p.gamma));
    // (gamma/2) sz sz for pi/(2 gamma): phases e^{-+i pi/4}.
    const Complex m = std::polar(1.0, -kPi / 4);
    const Complex q = std::polar(1.0, kPi / 4);
    EXPECT_LE(std::abs(u(0, 0) - m), 1e-15);
    EXPECT_LE(std::abs(u(1, 1) - q), 1e-15);
    EXPECT_LE(std::abs(u(2, 2) - q), 1e-15);
    EXPECT_LE(std::abs(u(3, 3) - m), 1e-15);
    // Spin 2 precesses by +pi/2 or -pi/2 depending on spin 1: relative phase pi.
    EXPECT_LE(std::abs((u(1, 1) / u(0, 0)) / (u(3, 3) / u(2, 2)) - Complex(-1.0, 0.0)), 1e-15);
    EXPECT_THROW(free_evolution(p, -1.0), PreconditionError);
}

TEST(spins, cnot_ideal_cases) {
    const Unitary c = cnot_ideal(Spin::One, Spin::Two);
    EXPECT_EQ(conjugate(c, basis_state(kDD)).mat(), basis_state(kDD).mat());
    EXPECT_EQ(conjugate(c, basis_state(kUD)).mat(), basis_state(kUU).mat());
    const double h = 1.0 / std::sqrt(2.0);
    const std::array<Complex, 4> in{h, 0, h, 0};
    const std::array<Complex, 4> bell{h, 0, 0, h};
    EXPECT_LE(max_abs_diff(conjugate(c, DensityMatrix::pure(in)).mat(), DensityMatrix::pure(bell).mat()), 1e-15);
    EXPECT_THROW(cnot_ideal(Spin::One, Spin::One), PreconditionError);
}

TEST(spins, cnot_pulse_sequence_matches_up_to_phases) {
    for (double gamma : {0.1, 1.0, 10.0}) {
        SpinParams p;
        p.gamma = gamma;
        const Unitary seq = cnot_pulse_sequence(p);
        // Oracle: multiply the three factors by hand-applied matrix-vector steps.
        const std::array<Complex, 4> ud{0, 0, 1, 0};
        const auto out = apply_to(rotation_pulse({Spin::Two, kPi / 2, kPi / 2}),
                               apply_to(free_evolution(p, kPi / (2 * gamma)), apply_to(rotation_pulse({Spin::Two, kPi / 2, 0}), ud)));
        EXPECT_NEAR(std::norm(out[kUU]), 1.0, 1e-12);
        const auto seq_out = apply_to(seq, ud);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_LE(std::abs(seq_out[k] - out[k]), 1e-14);
        }
        const std::array<Complex, 4> dd{1, 0, 0, 0};
        EXPECT_NEAR(std::norm(apply_to(seq, dd)[kDD]), 1.0, 1e-12);
        EXPECT_GE(phase_insensitive_fidelity(seq, cnot_ideal(Spin::One, Spin::Two)), 1.0 - 1e-9);
    }
    SpinParams p;
    p.gamma = 0.0;
    EXPECT_THROW(cnot_pulse_sequence(p), PreconditionError);
}

TEST(spins, fidelity_detects_wrong_gate) {
    EXPECT_LE(phase_insensitive_fidelity(Unitary::identity(4), cnot_ideal(Spin::One, Spin::Two)), 0.75);
    // Local z phases applied before the gate are forgiven: a + b s1 + c s2.
    const std::array<double, 4> local{0.3, 0.3 + 0.5, 0.3 + 0.9, 0.3 + 0.5 + 0.9};
    const Unitary d = mat_exp_diag_phase(local, 1.0);
    EXPECT_NEAR(phase_insensitive_fidelity(cnot_ideal(Spin::One, Spin::Two) * d, cnot_ideal(Spin::One, Spin::Two)),
                1.0, 1e-12);
}

TEST(spins, conditional_flip_work) {
    const SpinParams p = example_params();
    const auto a = conditional_flip(basis_state(kDD), Spin::One, Spin::Two, p);
    EXPECT_EQ(a.record.work_on_field, 0.0);
    const auto b = conditional_flip(basis_state(kUD), Spin::One, Spin::Two, p);
    EXPECT_DOUBLE_EQ(b.record.work_on_field, -2.0 * p.mu2 * p.B);
    const auto c = conditional_flip(basis_state(kUU), Spin::Two, Spin::One, p);
    EXPECT_DOUBLE_EQ(c.record.work_on_field, 2.0 * p.mu1 * p.B);
    EXPECT_EQ(b.record.label, "flip 2 iff 1");
}

TEST(spins, swap_sequence_cases) {
    const SpinParams p = example_params();
    auto thermal = [](double mu, double B, double T) { return thermal_state(GibbsSpec{mu, B, T}); };

    const DensityMatrix same = product_state(thermal(1.0, 1.0, 1.0), thermal(1.0, 1.0, 1.0));
    const auto r0 = swap_sequence(same, p);
    double total0 = 0.0;
    for (const auto &w : r0.records) {
        total0 += w.work_on_field;
    }
    EXPECT_NEAR(total0, 0.0, 1e-15);

    const DensityMatrix in = product_state(thermal(p.mu1, p.B, p.T1), thermal(p.mu2, p.B, p.T2));
    const auto r = swap_sequence(in, p);
    double total = 0.0;
    for (const auto &w : r.records) {
        total += w.work_on_field;
    }
    // Frozen: -(mu1 - mu2) B (tanh(mu1 B/T1) - tanh(mu2 B/T2)).
    EXPECT_NEAR(total, 0.5166754935520557, 1e-12);
    EXPECT_NEAR(total, -(p.mu1 - p.mu2) * p.B * (std::tanh(0.25) - std::tanh(1.0)), 1e-12);
    ASSERT_EQ(r.records.size(), 3u);
    EXPECT_EQ(r.records[1].label, "flip 1 iff 2");

    // Oracle: three permutation applications on |up down>.
    const auto b = swap_sequence(basis_state(kUD), p);
    EXPECT_EQ(b.state.mat(), basis_state(kDU).mat());
}

TEST(spins, coherent_steps_conserve_energy) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int i = 0; i < 50; ++i) {
        SpinParams p;
        p.mu1 = u(rng);
        p.mu2 = u(rng);
        p.B = u(rng);
        const DensityMatrix rho = product_state(thermal_state({p.mu1, p.B, u(rng)}), thermal_state({p.mu2, p.B, u(rng)}));
        const auto step = conditional_flip(rho, Spin::Two, Spin::One, p);
        EXPECT_NEAR(step.record.work_on_field + step.record.delta_spin_energy, 0.0, 1e-15);
        EXPECT_NEAR(step.record.delta_spin_energy, zeeman_energy(step.state, p) - zeeman_energy(rho, p), 1e-12);
    }
}

TEST(spins, phase_from_delay_wraps) {
    EXPECT_NEAR(phase_from_delay(1.5 * kPi), 0.5 * kPi, 1e-15);
    EXPECT_EQ(phase_from_delay(0.0), 0.0);
}
