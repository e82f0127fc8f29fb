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

// Heat-engine protocols on the two-spin machine, with a full work, heat and
// entropy ledger.
//
// Sign conventions: work_on_field > 0 means the spins gave energy to the
// field. heat_from_resN > 0 means heat left reservoir N. W_out is the summed
// work, Q_in the summed heat from reservoir 1, Q_out the summed heat into
// reservoir 2, and dS_total the summed reservoir entropy change.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdemon/qmatrix.hpp"
#include "qdemon/spins.hpp"
#include "qdemon/thermo.hpp"

namespace qdemon {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LedgerEntry {
    std::string label;
    double work_on_field = 0.0;
    double heat_from_res1 = 0.0;
    double heat_from_res2 = 0.0;
    double entropy_to_res1 = 0.0;
    double entropy_to_res2 = 0.0;

    bool operator==(const LedgerEntry &) const = default;
};

struct LedgerTotals {
    double W_out = 0.0;
    double Q_in = 0.0;
    double Q_out = 0.0;
    double dS_total = 0.0;

    bool operator==(const LedgerTotals &) const = default;
};

class CycleLedger {
   public:
    void add(LedgerEntry e) {
        steps_.push_back(std::move(e));
    }

    const std::vector<LedgerEntry> &steps() const {
        return steps_;
    }
    std::size_t size() const {
        return steps_.size();
    }
    bool empty() const {
        return steps_.empty();
    }

    /// Left fold in step order.
    LedgerTotals totals() const {
        LedgerTotals t;
        double heat2 = 0.0;
        for (const auto &e : steps_) {
            t.W_out += e.work_on_field;
            t.Q_in += e.heat_from_res1;
            heat2 += e.heat_from_res2;
            t.dS_total += e.entropy_to_res1 + e.entropy_to_res2;
        }
        t.Q_out = -heat2;
        return t;
    }

   private:
    std::vector<LedgerEntry> steps_;
};

struct NamedValue {
    std::string name;
    double value = 0.0;

    bool operator==(const NamedValue &) const = default;
};
using NamedValues = std::vector<NamedValue>;

inline std::optional<double> find_value(const NamedValues &values, const std::string &name) {
    for (const auto &v : values) {
        if (v.name == name) {
            return v.value;
        }
    }
    return std::nullopt;
}

struct CycleOutcome {
    std::string protocol = "custom";
    SpinParams params;
    CycleLedger ledger;
    double closed_form_W = kNaN;
    double simulated_W = 0.0;
    double efficiency = kNaN;
    double efficiency_bound = kNaN;
    NamedValues closed_form;
    NamedValues residuals;
    std::vector<std::string> warnings;
    DensityMatrix final_state;

    double closed(const std::string &name) const {
        return require(closed_form, name);
    }
    double residual(const std::string &name) const {
        return require(residuals, name);
    }

   private:
    static double require(const NamedValues &values, const std::string &name) {
        if (auto v = find_value(values, name)) {
            return *v;
        }
        throw PreconditionError("outcome has no entry named '" + name + "'");
    }
};

// ---------------------------------------------------------------------------
// Closed forms.

inline GibbsSpec gibbs_of(const SpinParams &p, Spin s) {
    return GibbsSpec{p.mu(s), p.B, p.T(s)};
}

inline double tanh_x(const SpinParams &p, Spin s) {
    return std::tanh(p.mu(s) * p.B / p.T(s));
}

/// Net work of the three conditional flips on thermal inputs. Written with
/// tanh(x1) - tanh(x2) = 2 (p2_up - p1_up) so saturated spins keep the sign.
inline double swap_work_closed(const SpinParams &p) {
    const double p1_up = gibbs_distribution(gibbs_of(p, Spin::One)).p.p_up;
    const double p2_up = gibbs_distribution(gibbs_of(p, Spin::Two)).p.p_up;
    return 2.0 * (p.mu1 - p.mu2) * p.B * (p1_up - p2_up);
}

/// Work the field supplies during the first conditional flip.
inline double step1_work_closed(const SpinParams &p) {
    p.validate();
    const double p1_up = gibbs_distribution(gibbs_of(p, Spin::One)).p.p_up;
    return p1_up * 2.0 * p.mu2 * p.B * tanh_x(p, Spin::Two);
}

/// Work done on the field by the second conditional flip.
inline double step2_work_closed(const SpinParams &p) {
    return -p.mu1 * p.B * (tanh_x(p, Spin::One) - tanh_x(p, Spin::Two));
}

/// Work done on the field by the third conditional flip.
inline double step3_work_closed(const SpinParams &p) {
    const double p2_up = gibbs_distribution(gibbs_of(p, Spin::Two)).p.p_up;
    return p2_up * 2.0 * p.mu2 * p.B * tanh_x(p, Spin::One);
}

/// Third-flip work with the tanh argument mu1*B/T2, kept for comparison.
inline double step3_work_mixed_argument(const SpinParams &p) {
    const double p2_up = gibbs_distribution(gibbs_of(p, Spin::Two)).p.p_up;
    return p2_up * 2.0 * p.mu2 * p.B * std::tanh(p.mu1 * p.B / p.T2);
}

/// Entropy gain of spin 2's marginal after the first conditional flip.
inline double info_gained_step1(const SpinParams &p) {
    p.validate();
    const auto d1 = gibbs_distribution(gibbs_of(p, Spin::One)).p;
    const auto d2 = gibbs_distribution(gibbs_of(p, Spin::Two)).p;
    const double mixed_up = d1.p_up * d2.p_down + d1.p_down * d2.p_up;
    return binary_entropy(mixed_up) - binary_entropy(d2.p_up);
}

inline bool work_positive_region(const SpinParams &p) {
    p.validate();
    const double r1 = p.mu1 / p.T1;
    const double r2 = p.mu2 / p.T2;
    return (p.mu1 > p.mu2 && r1 < r2) || (p.mu1 < p.mu2 && r1 > r2);
}

inline double carnot_work_closed(const SpinParams &p) {
    return (p.T1 - p.T2) * (gibbs_entropy(gibbs_of(p, Spin::One)) - gibbs_entropy(gibbs_of(p, Spin::Two)));
}

/// Field at which spin `s` holding the other spin's thermal populations is
/// thermal with its own reservoir: mu_s B_s / T_s = mu_o B / T_o.
inline double matched_field(const SpinParams &p, Spin s) {
    const Spin o = other(s);
    return p.B * (p.mu(o) / p.mu(s)) * (p.T(s) / p.T(o));
}

/// B T1/T2 for spin 1 and B T2/T1 for spin 2 (equal moments assumed).
inline double temperature_ratio_field(const SpinParams &p, Spin s) {
    return p.B * p.T(s) / p.T(other(s));
}

// ---------------------------------------------------------------------------
// Tipped states. A tipped axis at angle theta has |down'> = cos(theta)|down>
// + sin(theta)|up>, |up'> = cos(theta)|up> - sin(theta)|down>.

struct TippedSpec {
    double theta = 0.0;

    void validate() const {
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
            throw PreconditionError("tipping angle must lie in [0, pi]");
        }
    }
};

inline double reduce_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    return r >= two_pi ? 0.0 : r;
}

/// Single-spin rotation taking |down> to |down'>.
inline CMatrix tipping_rotation(double theta) {
    return single_spin_rotation(2.0 * theta, 1.5 * std::numbers::pi);
}

/// Pulse on spin 1 taking |down'> to |down> and |up'> to |up>.
inline PulseSpec tipping_pulse(double theta, Spin target = Spin::One) {
    return PulseSpec{target, reduce_angle(2.0 * theta), 0.5 * std::numbers::pi};
}

inline std::array<Complex, 2> tipped_ket(double theta) {
    return {Complex(std::cos(theta)), Complex(std::sin(theta))};
}

/// Gibbs populations placed on the tipped axis.
inline DensityMatrix tipped_thermal_state(const GibbsSpec &g, double theta) {
    const CMatrix v = tipping_rotation(theta);
    return DensityMatrix::trusted(v * thermal_state(g).mat() * adjoint(v));
}

/// Populations after full z dephasing of a tipped thermal spin.
inline SpinDistribution tipped_populations(const SpinDistribution &d, double theta) {
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    return {d.p_up * c2 + d.p_down * s2, d.p_down * c2 + d.p_up * s2};
}

/// Work released by untipping a thermal spin 1: E1* - E1.
inline double tipped_work_closed(const SpinParams &p, double theta) {
    const auto d = gibbs_distribution(gibbs_of(p, Spin::One)).p;
    const auto s = tipped_populations(d, theta);
    return p.mu1 * p.B * ((s.p_up - s.p_down) - (d.p_up - d.p_down));
}

/// 1 - T2 (S* - S2) / (T1 (S1 - S2)).
inline double quantum_efficiency_closed(const SpinParams &p, double theta) {
    const double S1 = gibbs_entropy(gibbs_of(p, Spin::One));
    const double S2 = gibbs_entropy(gibbs_of(p, Spin::Two));
    const auto star = tipped_populations(gibbs_distribution(gibbs_of(p, Spin::One)).p, theta);
    const double S_star = binary_entropy(star.p_up);
    return 1.0 - p.T2 * (S_star - S2) / (p.T1 * (S1 - S2));
}

// ---------------------------------------------------------------------------
// Reservoir contact and quasi-static ramps on a single spin.

inline double sigma_z_expectation(const DensityMatrix &rho, Spin s) {
    const DensityMatrix r = partial_trace(rho, s);
    return r(1, 1).real() - r(0, 0).real();
}

/// <sigma_z> after minus before, taken from the minority population.
inline double sigma_z_change(const DensityMatrix &before, const DensityMatrix &after, Spin s) {
    const DensityMatrix r0 = partial_trace(before, s);
    const DensityMatrix r1 = partial_trace(after, s);
    if (r0(1, 1).real() <= 0.5) {
        return 2.0 * (r1(1, 1).real() - r0(1, 1).real());
    }
    return -2.0 * (r1(0, 0).real() - r0(0, 0).real());
}

inline DensityMatrix replace_spin(const DensityMatrix &rho, Spin s, const DensityMatrix &single) {
    const DensityMatrix kept = partial_trace(rho, other(s));
    return s == Spin::One ? product_state(single, kept) : product_state(kept, single);
}

inline void set_entry_heat(LedgerEntry &e, Spin s, double heat, double T) {
    if (s == Spin::One) {
        e.heat_from_res1 = heat;
        e.entropy_to_res1 = -heat / T;
    } else {
        e.heat_from_res2 = heat;
        e.entropy_to_res2 = -heat / T;
    }
}

inline std::string spin_label(const char *verb, Spin s) {
    return std::string(verb) + " " + std::to_string(index_of(s));
}

/// Replaces spin `s` by its reservoir Gibbs state at field `field`.
inline std::pair<DensityMatrix, LedgerEntry> equilibrate(
    Spin s, const DensityMatrix &rho, const SpinParams &p, double field) {
    const double mu = p.mu(s);
    const double T = p.T(s);
    const GibbsSpec g{mu, field, T};
    const DensityMatrix out = replace_spin(rho, s, thermal_state(g));
    LedgerEntry e{spin_label("thermalize", s)};
    set_entry_heat(e, s, mu * field * sigma_z_change(rho, out, s), T);
    return {out, e};
}

inline std::pair<DensityMatrix, LedgerEntry> equilibrate(Spin s, const DensityMatrix &rho, const SpinParams &p) {
    return equilibrate(s, rho, p, p.B);
}

enum class RampMode { Adiabatic, Isothermal };

inline const char *ramp_mode_name(RampMode m) {
    return m == RampMode::Adiabatic ? "adiabatic" : "isothermal";
}

struct RampSchedule {
    double B_start = 0.0;
    double B_end = 0.0;
    long n_steps = 1;
    RampMode mode = RampMode::Adiabatic;
    Spin reservoir = Spin::One;

    void validate() const {
        if (!std::isfinite(B_start) || !std::isfinite(B_end)) {
            throw PreconditionError("ramp fields must be finite");
        }
        if (n_steps < 1) {
            throw PreconditionError("ramp needs n_steps >= 1");
        }
    }
};

/// Moves spin `sched.reservoir` from B_start to B_end in n_steps equal
/// increments. Adiabatic: populations frozen, work only. Isothermal: each
/// increment is a frozen-population field step followed by a reset to the
/// Gibbs state at the new field.
inline std::pair<DensityMatrix, LedgerEntry> ramp(const DensityMatrix &rho, const RampSchedule &sched, const SpinParams &p) {
    sched.validate();
    const Spin s = sched.reservoir;
    const double mu = p.mu(s);
    const double T = p.T(s);
    LedgerEntry e{"ramp " + std::to_string(index_of(s)) + " " + ramp_mode_name(sched.mode)};
    double m = sigma_z_expectation(rho, s);
    if (sched.mode == RampMode::Adiabatic) {
        e.work_on_field = -mu * m * (sched.B_end - sched.B_start);
        return {rho, e};
    }
    double work = 0.0;
    double heat = 0.0;
    double B_prev = sched.B_start;
    const double span = sched.B_end - sched.B_start;
    for (long k = 1; k <= sched.n_steps; ++k) {
        const double B_k = k == sched.n_steps
                               ? sched.B_end
                               : sched.B_start + span * static_cast<double>(k) / static_cast<double>(sched.n_steps);
        work -= mu * m * (B_k - B_prev);
        const double m_new = -std::tanh(mu * B_k / T);
        heat += mu * B_k * (m_new - m);
        m = m_new;
        B_prev = B_k;
    }
    e.work_on_field = work;
    set_entry_heat(e, s, heat, T);
    return {replace_spin(rho, s, thermal_state(GibbsSpec{mu, sched.B_end, T})), e};
}

// ---------------------------------------------------------------------------
// The machine: state, per-spin fields, reservoir contacts and the ledger.

enum class CnotMode { Ideal, Pulsed, Selective };

inline DensityMatrix thermal_pair(const SpinParams &p) {
    return product_state(thermal_state(gibbs_of(p, Spin::One)), thermal_state(gibbs_of(p, Spin::Two)));
}

class Machine {
   public:
    Machine(const SpinParams &p, DensityMatrix initial) : params_(p), state_(initial), initial_(initial) {
        params_.validate();
        if (initial.dim() != 4) {
            throw DimensionError("machine state must be a two-spin density matrix");
        }
        initial.validate();
        fields_ = {p.B, p.B};
    }

    const SpinParams &params() const {
        return params_;
    }
    const DensityMatrix &state() const {
        return state_;
    }
    const DensityMatrix &initial_state() const {
        return initial_;
    }
    const CycleLedger &ledger() const {
        return ledger_;
    }
    double field(Spin s) const {
        return fields_[index_of(s) - 1];
    }
    bool contact(Spin s) const {
        return contact_[index_of(s) - 1];
    }
    double information_created() const {
        return information_;
    }

    std::array<double, 4> zeeman() const {
        return zeeman_diagonal(params_.mu1, field(Spin::One), params_.mu2, field(Spin::Two));
    }

    /// Zeeman energy at the current per-spin fields.
    double energy() const {
        return expectation_diag(state_, zeeman());
    }

    void apply(const Unitary &u, std::string label) {
        auto step = apply_coherent(state_, u, zeeman(), std::move(label));
        state_ = std::move(step.state);
        ledger_.add(LedgerEntry{std::move(step.record.label), step.record.work_on_field});
    }

    void pulse(const PulseSpec &spec) {
        apply(rotation_pulse(spec), spin_label("pulse", spec.target));
    }

    void wait(double t) {
        apply(free_evolution(params_, t), "wait");
    }

    void cnot(Spin control, Spin target, CnotMode mode = CnotMode::Ideal) {
        const Unitary u = mode == CnotMode::Pulsed ? cnot_pulse_sequence(params_, control, target)
                                                   : cnot_ideal(control, target);
        apply(u, flip_label(control, target));
    }

    /// Projective z measurement of one spin (outcome discarded).
    void measure(Spin s) {
        const auto ch = MeasurementChannel::spin_z(s);
        information_ += delta_S_Q(state_, ch);
        state_ = qdemon::measure(state_, ch);
        ledger_.add(LedgerEntry{spin_label("measure", s)});
    }

    void dephase(Spin s) {
        information_ += delta_S_Q(state_, MeasurementChannel::spin_z(s));
        state_ = qdemon::dephase(state_, s);
        ledger_.add(LedgerEntry{spin_label("dephase", s)});
    }

    void set_contact(Spin s, bool on) {
        contact_[index_of(s) - 1] = on;
    }

    void thermalize(Spin s) {
        require_contact(s, true, "thermalize");
        auto [rho, entry] = equilibrate(s, state_, params_, field(s));
        state_ = std::move(rho);
        ledger_.add(std::move(entry));
    }

    void ramp(Spin s, double target, long n_steps, RampMode mode) {
        require_contact(s, mode == RampMode::Isothermal, mode == RampMode::Isothermal ? "isothermal ramp" : "adiabatic ramp");
        const RampSchedule sched{field(s), target, n_steps, mode, s};
        auto [rho, entry] = qdemon::ramp(state_, sched, params_);
        state_ = std::move(rho);
        fields_[index_of(s) - 1] = target;
        ledger_.add(std::move(entry));
    }

    /// Field at which spin `s`'s current populations are Gibbs at its
    /// reservoir temperature. Negative for inverted populations.
    double equilibrium_field(Spin s) const {
        const double m = sigma_z_expectation(state_, s);
        if (std::abs(m) >= 1.0 - 1e-15) {
            throw PreconditionError("spin " + std::to_string(index_of(s)) +
                                    " has pure populations; no finite equilibrium field");
        }
        return params_.T(s) * std::atanh(-m) / params_.mu(s);
    }

    /// Full density-matrix validation plus a finite ledger.
    void check_invariants() const {
        state_.validate();
        const auto t = ledger_.totals();
        if (!std::isfinite(t.W_out) || !std::isfinite(t.Q_in) || !std::isfinite(t.Q_out) ||
            !std::isfinite(t.dS_total)) {
            throw InvariantError("ledger has non-finite totals");
        }
    }

    /// |W_out - (Q_in - Q_out) + dU|: energy balance including the change
    /// of the spins' own energy.
    double first_law_residual() const {
        const auto t = ledger_.totals();
        const double dU = energy() - expectation_diag(initial_, zeeman_diagonal(params_));
        return std::abs(t.W_out - (t.Q_in - t.Q_out) + dU);
    }

    /// Reservoir entropy change plus the spins' von Neumann entropy change.
    double entropy_production() const {
        return ledger_.totals().dS_total + vn_entropy(state_) - vn_entropy(initial_);
    }

    CycleOutcome finish(std::string protocol) const {
        CycleOutcome out;
        out.protocol = std::move(protocol);
        out.params = params_;
        out.ledger = ledger_;
        out.simulated_W = ledger_.totals().W_out;
        out.final_state = state_;
        out.residuals.push_back({"first_law", first_law_residual()});
        out.residuals.push_back({"entropy_production", entropy_production()});
        return out;
    }

   private:
    void require_contact(Spin s, bool wanted, const char *what) const {
        if (contact(s) != wanted) {
            throw PreconditionError(std::string(what) + " of spin " + std::to_string(index_of(s)) + " needs contact " +
                                    (wanted ? "ON" : "OFF"));
        }
    }

    SpinParams params_;
    DensityMatrix state_;
    DensityMatrix initial_;
    std::array<double, 2> fields_{};
    std::array<bool, 2> contact_{false, false};
    CycleLedger ledger_;
    double information_ = 0.0;
};

// ---------------------------------------------------------------------------
// Closed-form annotation per protocol.

enum class ProtocolKind { Custom, Swap, Basic, Carnot, Refrigerator, Erase, TippedFree, Tipped, Demo };

inline const char *protocol_name(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::Swap:
            return "swap";
        case ProtocolKind::Basic:
            return "basic";
        case ProtocolKind::Carnot:
            return "carnot";
        case ProtocolKind::Refrigerator:
            return "refrigerator";
        case ProtocolKind::Erase:
            return "erase";
        case ProtocolKind::TippedFree:
            return "tipped_free";
        case ProtocolKind::Tipped:
            return "tipped";
        case ProtocolKind::Demo:
            return "demo";
        case ProtocolKind::Custom:
            break;
    }
    return "custom";
}

inline std::optional<ProtocolKind> protocol_from_name(const std::string &name) {
    for (auto k : {ProtocolKind::Custom, ProtocolKind::Swap, ProtocolKind::Basic, ProtocolKind::Carnot,
                   ProtocolKind::Refrigerator, ProtocolKind::Erase, ProtocolKind::TippedFree, ProtocolKind::Tipped,
                   ProtocolKind::Demo}) {
        if (name == protocol_name(k)) {
            return k;
        }
    }
    return std::nullopt;
}

/// Parameters beyond SpinParams that some protocols read.
struct ProtocolExtras {
    double theta = 0.0;
    long n_steps = 0;
    double Bprime = kNaN;
};

namespace detail {

inline void add(NamedValues &v, const char *name, double value) {
    v.push_back({name, value});
}

inline double spin_energy_closed(const SpinParams &p, Spin s, double tanh_value) {
    return -p.mu(s) * p.B * tanh_value;
}

inline double reduced_p_up(const DensityMatrix &rho, Spin s) {
    return partial_trace(rho, s)(1, 1).real();
}

inline void annotate_swap(const Machine &m, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double t1 = tanh_x(p, Spin::One);
    const double t2 = tanh_x(p, Spin::Two);
    const double W = swap_work_closed(p);
    out.closed_form_W = W;
    add(out.closed_form, "W_eq6", W);
    add(out.closed_form, "step1_work_by_field", step1_work_closed(p));
    add(out.closed_form, "step2_work", step2_work_closed(p));
    add(out.closed_form, "step3_work", step3_work_closed(p));
    add(out.closed_form, "step3_work_mixed_argument", step3_work_mixed_argument(p));
    add(out.closed_form, "E1_prime", spin_energy_closed(p, Spin::One, t2));
    add(out.closed_form, "E2_prime", spin_energy_closed(p, Spin::Two, t1));
    add(out.closed_form, "info_gained_step1", info_gained_step1(p));

    add(out.residuals, "eq6", std::abs(out.simulated_W - W));
    const auto &steps = out.ledger.steps();
    if (steps.size() >= 3) {
        add(out.residuals, "step1", std::abs(steps[0].work_on_field + step1_work_closed(p)));
        add(out.residuals, "step2", std::abs(steps[1].work_on_field - step2_work_closed(p)));
        add(out.residuals, "step3", std::abs(steps[2].work_on_field - step3_work_closed(p)));
        add(out.residuals, "step3_mixed_argument", std::abs(steps[2].work_on_field - step3_work_mixed_argument(p)));
    }
    const DensityMatrix &rho = out.final_state;
    const double p1 = gibbs_distribution(gibbs_of(p, Spin::One)).p.p_up;
    const double p2 = gibbs_distribution(gibbs_of(p, Spin::Two)).p.p_up;
    add(out.residuals, "swap_populations",
        std::max(std::abs(reduced_p_up(rho, Spin::One) - p2), std::abs(reduced_p_up(rho, Spin::Two) - p1)));
    const double E1 = p.mu1 * p.B * sigma_z_expectation(rho, Spin::One);
    const double E2 = p.mu2 * p.B * sigma_z_expectation(rho, Spin::Two);
    add(out.residuals, "E1_prime", std::abs(E1 - spin_energy_closed(p, Spin::One, t2)));
    add(out.residuals, "E2_prime", std::abs(E2 - spin_energy_closed(p, Spin::Two, t1)));
}

inline void add_cycle_checks(const Machine &m, CycleOutcome &out) {
    const auto t = out.ledger.totals();
    add(out.residuals, "cycle_first_law", std::abs(t.W_out - (t.Q_in - t.Q_out)));
    add(out.residuals, "closure", trace_distance(m.state(), m.initial_state()));
}

inline void annotate_basic(const Machine &m, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double t1 = tanh_x(p, Spin::One);
    const double t2 = tanh_x(p, Spin::Two);
    const double W = swap_work_closed(p);
    const double Q_in = p.mu1 * p.B * (t2 - t1);
    const double Q_out = p.mu2 * p.B * (t2 - t1);
    const auto t = out.ledger.totals();
    out.closed_form_W = W;
    out.efficiency = t.W_out / t.Q_in;
    out.efficiency_bound = 1.0 - p.T2 / p.T1;
    add(out.closed_form, "W_eq6", W);
    add(out.closed_form, "Q_in", Q_in);
    add(out.closed_form, "Q_out", Q_out);
    add(out.closed_form, "efficiency", 1.0 - p.mu2 / p.mu1);
    add(out.residuals, "eq6", std::abs(t.W_out - W));
    add(out.residuals, "Q_in", std::abs(t.Q_in - Q_in));
    add(out.residuals, "Q_out", std::abs(t.Q_out - Q_out));
    add(out.residuals, "efficiency", std::abs(out.efficiency - (1.0 - p.mu2 / p.mu1)));
    add_cycle_checks(m, out);
}

inline void annotate_carnot(const Machine &m, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double S1 = gibbs_entropy(gibbs_of(p, Spin::One));
    const double S2 = gibbs_entropy(gibbs_of(p, Spin::Two));
    const double W = carnot_work_closed(p);
    const auto t = out.ledger.totals();
    out.closed_form_W = W;
    out.efficiency = t.W_out / t.Q_in;
    out.efficiency_bound = 1.0 - p.T2 / p.T1;
    add(out.closed_form, "W_carnot", W);
    add(out.closed_form, "Q_in", p.T1 * (S1 - S2));
    add(out.closed_form, "Q_out", p.T2 * (S1 - S2));
    add(out.closed_form, "efficiency", out.efficiency_bound);
    add(out.residuals, "W_carnot", std::abs(t.W_out - W));
    add(out.residuals, "efficiency", std::abs(out.efficiency - out.efficiency_bound));
    add_cycle_checks(m, out);
}

inline double carnot_cop(const SpinParams &p) {
    return p.T1 > p.T2 ? p.T2 / (p.T1 - p.T2) : std::numeric_limits<double>::infinity();
}

inline void annotate_refrigerator(const Machine &m, const ProtocolExtras &x, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const auto t = out.ledger.totals();
    // Coefficient of performance: heat drawn from reservoir 2 per unit work input.
    out.efficiency = t.Q_out / t.W_out;
    out.efficiency_bound = carnot_cop(p);
    if (x.n_steps > 0) {
        const double S1 = gibbs_entropy(gibbs_of(p, Spin::One));
        const double S2 = gibbs_entropy(gibbs_of(p, Spin::Two));
        const double W = carnot_work_closed(p);
        out.closed_form_W = W;
        add(out.closed_form, "W_carnot", W);
        add(out.closed_form, "heat_drawn_res2", p.T2 * (S2 - S1));
        add(out.closed_form, "heat_into_res1", p.T1 * (S2 - S1));
        add(out.residuals, "W_carnot", std::abs(t.W_out - W));
        add(out.residuals, "heat_drawn_res2", std::abs(-t.Q_out - p.T2 * (S2 - S1)));
    } else {
        const double t1 = tanh_x(p, Spin::One);
        const double t2 = tanh_x(p, Spin::Two);
        const double W = swap_work_closed(p);
        out.closed_form_W = W;
        add(out.closed_form, "W_eq6", W);
        add(out.closed_form, "heat_drawn_res2", p.mu2 * p.B * (t1 - t2));
        add(out.closed_form, "heat_into_res1", p.mu1 * p.B * (t1 - t2));
        add(out.closed_form, "cop", p.mu1 > p.mu2 ? p.mu2 / (p.mu1 - p.mu2) : kNaN);
        add(out.residuals, "eq6", std::abs(t.W_out - W));
        add(out.residuals, "heat_drawn_res2", std::abs(-t.Q_out - p.mu2 * p.B * (t1 - t2)));
    }
    add_cycle_checks(m, out);
}

inline void annotate_erase(const Machine &m, const ProtocolExtras &x, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double S_start = vn_entropy(partial_trace(m.initial_state(), Spin::Two));
    const auto t = out.ledger.totals();
    const double p_up_final = detail::reduced_p_up(m.state(), Spin::Two);
    add(out.closed_form, "S2_start", S_start);
    if (std::isfinite(x.Bprime)) {
        const GibbsSpec high{p.mu2, x.Bprime, p.T2};
        const double heat = p.T2 * (S_start - gibbs_entropy(high));
        add(out.closed_form, "heat_reversible", heat);
        add(out.closed_form, "p_up_at_Bprime", gibbs_distribution(high).p.p_up);
        add(out.residuals, "heat_reversible", std::abs(t.Q_out - heat));
    }
    add(out.closed_form, "heat_limit", p.T2 * S_start);
    add(out.closed_form, "landauer_one_bit", landauer_cost(1.0, p.T2));
    add(out.residuals, "heat_limit", std::abs(t.Q_out - p.T2 * S_start));
    add(out.residuals, "p_up_final", p_up_final);
}

inline void annotate_tipped_free(const Machine &m, const ProtocolExtras &x, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double W_star = tipped_work_closed(p, x.theta);
    const auto star = tipped_populations(gibbs_distribution(gibbs_of(p, Spin::One)).p, x.theta);
    add(out.closed_form, "W_star", W_star);
    add(out.closed_form, "p_star_up", star.p_up);
    const auto &steps = out.ledger.steps();
    if (!steps.empty()) {
        add(out.residuals, "W_star", std::abs(steps.front().work_on_field - W_star));
    }
    const auto t = out.ledger.totals();
    if (x.n_steps > 0) {
        const double W = W_star + carnot_work_closed(p);
        out.closed_form_W = W;
        out.efficiency = (t.W_out - W_star) / t.Q_in;
        out.efficiency_bound = 1.0 - p.T2 / p.T1;
        add(out.closed_form, "W_total", W);
        add(out.residuals, "W_total", std::abs(t.W_out - W));
        add(out.residuals, "efficiency", std::abs(out.efficiency - out.efficiency_bound));
    } else {
        out.closed_form_W = W_star;
    }
}

inline void annotate_tipped(const Machine &m, const ProtocolExtras &x, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double S1 = gibbs_entropy(gibbs_of(p, Spin::One));
    const double S2 = gibbs_entropy(gibbs_of(p, Spin::Two));
    const auto star = tipped_populations(gibbs_distribution(gibbs_of(p, Spin::One)).p, x.theta);
    const double S_star = binary_entropy(star.p_up);
    const double W_star = tipped_work_closed(p, x.theta);
    const double W = p.T1 * (S1 - S2) - p.T2 * (S_star - S2) + W_star;
    const double eps_Q = quantum_efficiency_closed(p, x.theta);
    const auto t = out.ledger.totals();
    out.closed_form_W = W;
    out.efficiency = (t.W_out - W_star) / t.Q_in;
    out.efficiency_bound = 1.0 - p.T2 / p.T1;
    add(out.closed_form, "W_star", W_star);
    add(out.closed_form, "S_star", S_star);
    add(out.closed_form, "W_measured_route", W);
    add(out.closed_form, "work_gap", p.T2 * (S_star - S1));
    add(out.closed_form, "eps_Q", eps_Q);
    add(out.closed_form, "eps_C", out.efficiency_bound);
    add(out.residuals, "W_measured_route", std::abs(t.W_out - W));
    add(out.residuals, "eps_Q", std::abs(out.efficiency - eps_Q));
    if (S1 > S2) {
        const auto rep = efficiencies(S1 - S2, S_star - S2, S_star - S1, p.T1, p.T2);
        add(out.residuals, "eps_Q_identity", std::abs(rep.quantum - eps_Q));
    }
}

inline void annotate_demo(const Machine &m, CycleOutcome &out) {
    const SpinParams &p = m.params();
    const double W = (p.mu1 - p.mu2) * p.B;
    out.closed_form_W = W;
    add(out.closed_form, "W_demo", W);
    add(out.residuals, "W_demo", std::abs(out.simulated_W - W));
    const double h = std::numbers::sqrt2 / 2.0;
    const std::array<Complex, 4> target{h, h, 0.0, 0.0};  // |down>_1 |->_2
    add(out.residuals, "final_state", trace_distance(m.state(), DensityMatrix::pure(target)));

    // Undo: the same flips in reverse order.
    Machine back(p, m.state());
    back.cnot(Spin::Two, Spin::One);
    back.cnot(Spin::One, Spin::Two);
    add(out.residuals, "reversal_state", trace_distance(back.state(), m.initial_state()));
    add(out.residuals, "reversal_energy", std::abs(back.energy() - expectation_diag(m.initial_state(), zeeman_diagonal(p))));
    add(out.residuals, "reversal_entropy", std::abs(vn_entropy(back.state()) - vn_entropy(m.initial_state())));
}

}  // namespace detail

/// Fills closed forms and residuals for a finished run of protocol `kind`.
inline CycleOutcome annotate(ProtocolKind kind, const Machine &m, const ProtocolExtras &extras = {}) {
    CycleOutcome out = m.finish(protocol_name(kind));
    switch (kind) {
        case ProtocolKind::Swap:
            detail::annotate_swap(m, out);
            break;
        case ProtocolKind::Basic:
            detail::annotate_basic(m, out);
            break;
        case ProtocolKind::Carnot:
            detail::annotate_carnot(m, out);
            break;
        case ProtocolKind::Refrigerator:
            detail::annotate_refrigerator(m, extras, out);
            break;
        case ProtocolKind::Erase:
            detail::annotate_erase(m, extras, out);
            break;
        case ProtocolKind::TippedFree:
            detail::annotate_tipped_free(m, extras, out);
            break;
        case ProtocolKind::Tipped:
            detail::annotate_tipped(m, extras, out);
            break;
        case ProtocolKind::Demo:
            detail::annotate_demo(m, out);
            break;
        case ProtocolKind::Custom:
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Protocols.

inline void run_swap_steps(Machine &m) {
    m.cnot(Spin::One, Spin::Two);
    m.cnot(Spin::Two, Spin::One);
    m.cnot(Spin::One, Spin::Two);
}

/// Adiabatic ramp to `target`, then isothermal ramp back to B in contact.
inline void run_quasi_static_leg(Machine &m, Spin s, double target, long n_steps) {
    m.ramp(s, target, n_steps, RampMode::Adiabatic);
    m.set_contact(s, true);
    m.ramp(s, m.params().B, n_steps, RampMode::Isothermal);
    m.set_contact(s, false);
}

inline void run_carnot_legs(Machine &m, long n_steps) {
    run_quasi_static_leg(m, Spin::One, matched_field(m.params(), Spin::One), n_steps);
    run_quasi_static_leg(m, Spin::Two, matched_field(m.params(), Spin::Two), n_steps);
}

inline void require_steps(long n_steps) {
    if (n_steps < 1) {
        throw PreconditionError("n_steps must be >= 1");
    }
}

inline void require_engine_regime(const SpinParams &p) {
    if (p.T1 < p.T2) {
        throw PreconditionError("engine mode needs T1 >= T2");
    }
    if (p.mu1 / p.T1 > p.mu2 / p.T2) {
        throw PreconditionError("engine mode needs S1 >= S2 (mu1/T1 <= mu2/T2); work would be negative");
    }
}

inline CycleOutcome run_swap_stage(const SpinParams &p) {
    Machine m(p, thermal_pair(p));
    run_swap_steps(m);
    return annotate(ProtocolKind::Swap, m);
}

/// Swap, then re-equilibrate both spins with their reservoirs.
inline CycleOutcome run_basic_cycle(const SpinParams &p) {
    Machine m(p, thermal_pair(p));
    run_swap_steps(m);
    for (Spin s : {Spin::One, Spin::Two}) {
        m.set_contact(s, true);
        m.thermalize(s);
        m.set_contact(s, false);
    }
    return annotate(ProtocolKind::Basic, m);
}

inline CycleOutcome run_carnot_cycle(const SpinParams &p, long n_steps) {
    p.validate();
    require_steps(n_steps);
    require_engine_regime(p);
    Machine m(p, thermal_pair(p));
    run_swap_steps(m);
    run_carnot_legs(m, n_steps);
    return annotate(ProtocolKind::Carnot, m, {0.0, n_steps, kNaN});
}

/// n_steps = 0 re-equilibrates by contact alone; n_steps >= 1 uses the
/// quasi-static legs.
inline CycleOutcome run_refrigerator(const SpinParams &p, long n_steps) {
    p.validate();
    if (n_steps < 0) {
        throw PreconditionError("n_steps must be >= 0");
    }
    if (p.mu1 / p.T1 < p.mu2 / p.T2) {
        throw PreconditionError("refrigerator mode needs mu1/T1 >= mu2/T2");
    }
    Machine m(p, thermal_pair(p));
    run_swap_steps(m);
    if (n_steps == 0) {
        if (p.mu1 < p.mu2) {
            throw PreconditionError("contact-only refrigerator needs mu1 >= mu2");
        }
        for (Spin s : {Spin::One, Spin::Two}) {
            m.set_contact(s, true);
            m.thermalize(s);
            m.set_contact(s, false);
        }
    } else {
        if (p.T1 < p.T2) {
            throw PreconditionError("quasi-static refrigerator needs T1 >= T2");
        }
        run_carnot_legs(m, n_steps);
    }
    return annotate(ProtocolKind::Refrigerator, m, {0.0, n_steps, kNaN});
}

/// Isothermal ramp of spin 2 up to B', then adiabatic ramp back to B.
inline CycleOutcome prepare_down_by_erasure(const SpinParams &p, double B_prime, long n_steps) {
    p.validate();
    require_steps(n_steps);
    if (!(B_prime > 0.0) || !std::isfinite(B_prime)) {
        throw PreconditionError("erasure needs a positive, finite B'");
    }
    Machine m(p, thermal_pair(p));
    m.set_contact(Spin::Two, true);
    m.ramp(Spin::Two, B_prime, n_steps, RampMode::Isothermal);
    m.set_contact(Spin::Two, false);
    m.ramp(Spin::Two, p.B, n_steps, RampMode::Adiabatic);
    CycleOutcome out = annotate(ProtocolKind::Erase, m, {0.0, n_steps, B_prime});
    if (p.mu2 * B_prime / p.T2 < 10.0) {
        out.warnings.push_back("mu2*B'/T2 < 10: spin 2 is left far from |down>");
    }
    return out;
}

inline DensityMatrix tipped_pair(const SpinParams &p, double theta) {
    return product_state(tipped_thermal_state(gibbs_of(p, Spin::One), theta),
                         thermal_state(gibbs_of(p, Spin::Two)));
}

/// Untips spin 1, then (n_steps >= 1) runs the quasi-static cycle.
inline CycleOutcome tipped_free_energy_route(const SpinParams &p, const TippedSpec &spec, long n_steps = 0) {
    p.validate();
    spec.validate();
    if (n_steps < 0) {
        throw PreconditionError("n_steps must be >= 0");
    }
    Machine m(p, tipped_pair(p, spec.theta));
    m.pulse(tipping_pulse(spec.theta));
    if (n_steps > 0) {
        require_engine_regime(p);
        run_swap_steps(m);
        run_carnot_legs(m, n_steps);
    }
    return annotate(ProtocolKind::TippedFree, m, {spec.theta, n_steps, kNaN});
}

/// Runs the untipping route with the same parameters and records the
/// work difference against an annotated measured-route outcome.
inline void add_work_gap(CycleOutcome &out, double theta, long n_steps) {
    const CycleOutcome a = tipped_free_energy_route(out.params, TippedSpec{theta}, n_steps);
    const double W_a = a.ledger.totals().W_out;
    detail::add(out.closed_form, "W_free_energy_route", W_a);
    detail::add(out.residuals, "work_gap", std::abs((W_a - out.ledger.totals().W_out) - out.closed("work_gap")));
}

/// Keeps spin 1 tipped: swap, dephase spin 2, then quasi-static legs.
/// Spin 2's leg starts from the field at which its dephased populations
/// are thermal.
inline CycleOutcome tipped_measured_route(const SpinParams &p, const TippedSpec &spec, long n_steps) {
    p.validate();
    spec.validate();
    require_steps(n_steps);
    require_engine_regime(p);
    Machine m(p, tipped_pair(p, spec.theta));
    run_swap_steps(m);
    m.dephase(Spin::Two);
    run_quasi_static_leg(m, Spin::One, matched_field(p, Spin::One), n_steps);
    run_quasi_static_leg(m, Spin::Two, m.equilibrium_field(Spin::Two), n_steps);
    CycleOutcome out = annotate(ProtocolKind::Tipped, m, {spec.theta, n_steps, kNaN});
    add_work_gap(out, spec.theta, n_steps);
    return out;
}

/// |->_1 |down>_2: flip 2 iff 1, then flip 1 iff 2.
inline CycleOutcome coherent_two_route_demo(const SpinParams &p) {
    p.validate();
    if (p.mu1 < p.mu2) {
        throw PreconditionError("demo needs mu1 >= mu2");
    }
    const double h = std::numbers::sqrt2 / 2.0;
    const std::array<Complex, 4> ket{h, 0.0, h, 0.0};  // |->_1 |down>_2
    Machine m(p, DensityMatrix::pure(ket));
    m.cnot(Spin::One, Spin::Two);
    m.cnot(Spin::Two, Spin::One);
    return annotate(ProtocolKind::Demo, m);
}

}  // namespace qdemon
