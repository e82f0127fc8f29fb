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

// Two coupled spin-1/2 dipoles in a static field: Hamiltonian, resonant
// pulses, Ising-coupled free evolution, controlled-NOT gates, and coherent
// work bookkeeping against the driving field.
//
// Conventions: sigma_z has eigenvalues +-1 with sigma_z|up> = +|up>, so a
// spin with moment mu in field B has levels -mu*B (down) and +mu*B (up).
// The Ising term is (gamma/2) sigma_z^1 sigma_z^2: spin 2's precession
// frequency shifts by +-gamma depending on spin 1. Free evolution is taken
// in the doubly rotating frame, where only the coupling term acts. Energy
// bookkeeping uses the uncoupled Zeeman Hamiltonian.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdemon/qmatrix.hpp"

namespace qdemon {

struct SpinParams {
    double mu1 = 1.0;
    double mu2 = 1.0;
    double B = 1.0;
    double gamma = 1.0;
    double T1 = 1.0;
    double T2 = 1.0;

    double mu(Spin s) const {
        return s == Spin::One ? mu1 : mu2;
    }
    double T(Spin s) const {
        return s == Spin::One ? T1 : T2;
    }

    void validate() const {
        const std::array<double, 6> all{mu1, mu2, B, gamma, T1, T2};
        for (double v : all) {
            if (!std::isfinite(v)) {
                throw PreconditionError("spin parameters must be finite");
            }
        }
        if (!(mu1 > 0.0) || !(mu2 > 0.0)) {
            throw PreconditionError("dipole moments must be positive");
        }
        if (B < 0.0) {
            throw PreconditionError("field B must be non-negative");
        }
        if (gamma < 0.0) {
            throw PreconditionError("coupling gamma must be non-negative");
        }
        if (!(T1 > 0.0) || !(T2 > 0.0)) {
            throw PreconditionError("reservoir temperatures must be positive");
        }
    }

    bool operator==(const SpinParams &) const = default;
};

namespace pauli {

inline CMatrix x() {
    return CMatrix::from_rows({0.0, 1.0, 1.0, 0.0});
}

// In the (down, up) basis, chosen so that x*y = i*z.
inline CMatrix y() {
    return CMatrix::from_rows({0.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 0.0});
}

inline CMatrix z() {
    return CMatrix::from_rows({-1.0, 0.0, 0.0, 1.0});
}

}  // namespace pauli

/// Lifts a single-spin operator onto the two-spin space.
inline CMatrix embed(Spin target, const CMatrix &op) {
    if (op.dim() != 2) {
        throw DimensionError("embed expects a single-spin operator");
    }
    return target == Spin::One ? tensor(op, CMatrix::identity(2)) : tensor(CMatrix::identity(2), op);
}

/// sigma_z eigenvalue (+-1) of `spin` in two-spin basis state `k`.
inline double z_sign(std::size_t k, Spin spin) {
    const std::size_t bit = spin == Spin::One ? (k >> 1) & 1u : k & 1u;
    return bit ? 1.0 : -1.0;
}

/// Diagonal of mu1*B1*sz1 + mu2*B2*sz2.
inline std::array<double, 4> zeeman_diagonal(double mu1, double B1, double mu2, double B2) {
    std::array<double, 4> h{};
    for (std::size_t k = 0; k < 4; ++k) {
        h[k] = mu1 * B1 * z_sign(k, Spin::One) + mu2 * B2 * z_sign(k, Spin::Two);
    }
    return h;
}

inline std::array<double, 4> zeeman_diagonal(const SpinParams &p) {
    return zeeman_diagonal(p.mu1, p.B, p.mu2, p.B);
}

/// Diagonal of (gamma/2) sz1 sz2.
inline std::array<double, 4> coupling_diagonal(double gamma) {
    std::array<double, 4> h{};
    for (std::size_t k = 0; k < 4; ++k) {
        h[k] = 0.5 * gamma * z_sign(k, Spin::One) * z_sign(k, Spin::Two);
    }
    return h;
}

/// Full lab-frame two-spin Hamiltonian, diagonal in the computational basis.
struct TwoSpinHamiltonian {
    std::array<double, 4> diagonal{};

    static TwoSpinHamiltonian from(const SpinParams &p) {
        TwoSpinHamiltonian h;
        const auto z = zeeman_diagonal(p);
        const auto c = coupling_diagonal(p.gamma);
        for (std::size_t k = 0; k < 4; ++k) {
            h.diagonal[k] = z[k] + c[k];
        }
        return h;
    }
};

/// Zeeman energy tr(H0 rho) with a common field.
inline double zeeman_energy(const DensityMatrix &rho, const SpinParams &p) {
    const auto h = zeeman_diagonal(p);
    return expectation_diag(rho, h);
}

/// Resonance frequency 2*mu*B (hbar = 1).
inline double larmor_frequency(double mu, double B) {
    if (!(mu > 0.0)) {
        throw PreconditionError("larmor_frequency: mu must be positive");
    }
    if (B < 0.0) {
        throw PreconditionError("larmor_frequency: B must be non-negative");
    }
    return 2.0 * mu * B;
}

/// Instantaneous, perfectly selective resonant pulse on one spin.
struct PulseSpec {
    Spin target = Spin::One;
    double tip_angle = 0.0;  // rotation angle, [0, 2pi)
    double phase = 0.0;      // rotation axis azimuth in the rotating frame, [0, 2pi)

    void validate() const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if (!(tip_angle >= 0.0 && tip_angle < two_pi)) {
            throw PreconditionError("pulse tip angle must lie in [0, 2pi)");
        }
        if (!(phase >= 0.0 && phase < two_pi)) {
            throw PreconditionError("pulse phase must lie in [0, 2pi)");
        }
    }
};

/// Axis azimuth of a pulse whose drive is delayed by `delay` radians
/// relative to a reference pulse at azimuth 0.
inline double phase_from_delay(double delay) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double phase = std::fmod(-delay, two_pi);
    if (phase < 0.0) {
        phase += two_pi;
    }
    return phase >= two_pi ? 0.0 : phase;
}

/// cos(theta/2) I - i sin(theta/2) (cos(phi) sx + sin(phi) sy).
inline CMatrix single_spin_rotation(double theta, double phi) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const CMatrix axis = pauli::x() * Complex(std::cos(phi)) + pauli::y() * Complex(std::sin(phi));
    return CMatrix::identity(2) * Complex(c) + axis * Complex(0.0, -s);
}

inline Unitary rotation_pulse(const PulseSpec &p) {
    p.validate();
    return Unitary(embed(p.target, single_spin_rotation(p.tip_angle, p.phase)));
}

/// exp(-i H_c t) with H_c = (gamma/2) sz1 sz2 (doubly rotating frame).
inline Unitary free_evolution(const SpinParams &p, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw PreconditionError("free_evolution: duration must be finite and non-negative");
    }
    const auto h = coupling_diagonal(p.gamma);
    return mat_exp_diag_phase(h, t);
}

/// Permutation flipping `target` iff `control` is up.
inline Unitary cnot_ideal(Spin control, Spin target) {
    if (control == target) {
        throw PreconditionError("cnot: control and target must differ");
    }
    CMatrix m(4);
    for (std::size_t k = 0; k < 4; ++k) {
        std::size_t out = k;
        if (z_sign(k, control) > 0.0) {
            out ^= target == Spin::One ? 2u : 1u;
        }
        m(out, k) = 1.0;
    }
    return Unitary(m);
}

/// Duration of the conditional-phase wait, pi/(2 gamma).
inline double cnot_wait_time(double gamma) {
    if (!(gamma > 0.0)) {
        throw PreconditionError("pulsed CNOT needs gamma > 0 (no conditional phase accumulates)");
    }
    return std::numbers::pi / (2.0 * gamma);
}

/// Three-step double-resonance CNOT: a pi/2 pulse on the target, a wait of
/// pi/(2 gamma) under the Ising coupling, then a second pi/2 pulse whose
/// drive is delayed by 3pi/2. Equals cnot_ideal up to single-spin z phases.
inline Unitary cnot_pulse_sequence(const SpinParams &p, Spin control = Spin::One, Spin target = Spin::Two) {
    if (control == target) {
        throw PreconditionError("cnot: control and target must differ");
    }
    const double half_pi = 0.5 * std::numbers::pi;
    const Unitary first = rotation_pulse({target, half_pi, 0.0});
    const Unitary wait = free_evolution(p, cnot_wait_time(p.gamma));
    const Unitary second = rotation_pulse({target, half_pi, phase_from_delay(1.5 * std::numbers::pi)});
    return second * wait * first;
}

/// max over single-spin diagonal phase corrections D of |tr(D U^dag V)| / 4.
inline double phase_insensitive_fidelity(const Unitary &u, const Unitary &v) {
    if (u.dim() != 4 || v.dim() != 4) {
        throw DimensionError("phase_insensitive_fidelity expects two-spin unitaries");
    }
    const CMatrix m = adjoint(u.mat()) * v.mat();
    const Complex m0 = m(0, 0), m1 = m(1, 1), m2 = m(2, 2), m3 = m(3, 3);
    // The spin-2 phase is optimized in closed form; the spin-1 phase by
    // grid search followed by golden-section refinement.
    auto objective = [&](double alpha) {
        const Complex e = std::polar(1.0, alpha);
        return std::abs(m0 + m2 * e) + std::abs(m1 + m3 * e);
    };
    constexpr int kGrid = 2048;
    const double step = 2.0 * std::numbers::pi / kGrid;
    double best_alpha = 0.0;
    double best = objective(0.0);
    for (int k = 1; k < kGrid; ++k) {
        const double value = objective(k * step);
        if (value > best) {
            best = value;
            best_alpha = k * step;
        }
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_alpha - step;
    double hi = best_alpha + step;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = objective(a);
    double fb = objective(b);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = objective(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = objective(a);
        }
    }
    best = std::max({best, fa, fb});
    return best / 4.0;
}

/// Energy exchanged with the driving field during one coherent step.
/// work_on_field > 0 means the spins gave energy to the field.
struct WorkRecord {
    std::string label;
    double delta_spin_energy = 0.0;
    double work_on_field = 0.0;
};

struct CoherentStep {
    DensityMatrix state;
    WorkRecord record;
};

/// Applies `u` and books the Zeeman energy change as work on the field.
inline CoherentStep apply_coherent(
    const DensityMatrix &rho, const Unitary &u, std::span<const double> zeeman, std::string label) {
    DensityMatrix after = conjugate(u, rho);
    const double delta = expectation_diag_change(rho, after, zeeman);
    return {std::move(after), WorkRecord{std::move(label), delta, -delta}};
}

inline std::string flip_label(Spin control, Spin target) {
    return "flip " + std::to_string(index_of(target)) + " iff " + std::to_string(index_of(control));
}

/// Ideal CNOT with work bookkeeping.
inline CoherentStep conditional_flip(const DensityMatrix &rho, Spin control, Spin target, const SpinParams &p) {
    const auto h = zeeman_diagonal(p);
    return apply_coherent(rho, cnot_ideal(control, target), h, flip_label(control, target));
}

struct SwapResult {
    DensityMatrix state;
    std::vector<WorkRecord> records;
};

/// flip 2 iff 1, flip 1 iff 2, flip 2 iff 1: exchanges the two spins' states.
inline SwapResult swap_sequence(const DensityMatrix &rho, const SpinParams &p) {
    SwapResult out{rho, {}};
    constexpr std::array<std::pair<Spin, Spin>, 3> kFlips{{
        {Spin::One, Spin::Two},
        {Spin::Two, Spin::One},
        {Spin::One, Spin::Two},
    }};
    for (const auto &[control, target] : kFlips) {
        auto step = conditional_flip(out.state, control, target, p);
        out.state = std::move(step.state);
        out.records.push_back(std::move(step.record));
    }
    return out;
}

}  // namespace qdemon
