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

// Thermal states of a single dipole, von Neumann entropy, projective
// measurement and dephasing channels, and efficiency bounds.
//
// Entropies are in nats (k_B = 1); to_bits() converts.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qdemon/qmatrix.hpp"

namespace qdemon {

inline double to_bits(double nats) {
    return nats / std::numbers::ln2;
}

struct GibbsSpec {
    double mu = 1.0;
    double B = 1.0;
    double T = 1.0;

    void validate() const {
        if (!std::isfinite(mu) || !std::isfinite(B)) {
            throw PreconditionError("gibbs: mu and B must be finite");
        }
        if (!(T > 0.0) || !std::isfinite(T)) {
            throw PreconditionError("gibbs: temperature must be positive and finite");
        }
    }

    /// mu*B/T.
    double x() const {
        validate();
        return mu * B / T;
    }
};

struct SpinDistribution {
    double p_up = 0.5;
    double p_down = 0.5;

    void validate() const {
        if (!(p_up >= 0.0 && p_up <= 1.0) || !(p_down >= 0.0 && p_down <= 1.0)) {
            throw InvariantError("spin probabilities must lie in [0, 1]");
        }
        if (std::abs(p_up + p_down - 1.0) > kAlgebraTol) {
            throw InvariantError("spin probabilities must sum to 1");
        }
    }
};

struct GibbsDistribution {
    SpinDistribution p;
    double Z = 2.0;
    double log_Z = std::numbers::ln2;
};

/// ln(2 cosh x) without overflow.
inline double log_two_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a));
}

inline GibbsDistribution gibbs_distribution(const GibbsSpec &g) {
    const double x = g.x();
    GibbsDistribution out;
    // Levels are +-mu*B, so p_up = 1/(1 + e^{2x}).
    out.p.p_up = 1.0 / (1.0 + std::exp(2.0 * x));
    out.p.p_down = 1.0 / (1.0 + std::exp(-2.0 * x));
    out.log_Z = log_two_cosh(x);
    out.Z = 2.0 * std::cosh(x);
    return out;
}

inline double gibbs_energy(const GibbsSpec &g) {
    const double x = g.x();
    return -g.mu * g.B * std::tanh(x);
}

/// S = E/T + ln Z, arranged to stay accurate for large |x|.
inline double gibbs_entropy(const GibbsSpec &g) {
    const double a = std::abs(g.x());
    const double u = std::exp(-2.0 * a);
    return std::log1p(u) + a * 2.0 * u / (1.0 + u);
}

/// Binary Shannon entropy in nats.
inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw PreconditionError("binary_entropy: p must lie in [0, 1]");
    }
    auto term = [](double q) {
        return q > 0.0 ? -q * std::log(q) : 0.0;
    };
    return term(p) + term(1.0 - p);
}

/// diag(p_down, p_up).
inline DensityMatrix thermal_state(const GibbsSpec &g) {
    const auto d = gibbs_distribution(g);
    const std::array<double, 2> diag{d.p.p_down, d.p.p_up};
    return DensityMatrix::trusted(CMatrix::diagonal(std::span<const double>(diag)));
}

/// Distribution read off a single-spin state's diagonal.
inline SpinDistribution populations(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw DimensionError("populations expects a single-spin state");
    }
    SpinDistribution d{rho(1, 1).real(), rho(0, 0).real()};
    d.p_up = std::clamp(d.p_up, 0.0, 1.0);
    d.p_down = std::clamp(d.p_down, 0.0, 1.0);
    return d;
}

/// -sum lambda ln lambda; eigenvalues in [-1e-12, 0) count as zero.
inline double vn_entropy(const DensityMatrix &rho) {
    double s = 0.0;
    for (double lambda : hermitian_eigenvalues(rho.mat())) {
        if (lambda < -kAlgebraTol) {
            throw InvariantError("vn_entropy: state has a negative eigenvalue");
        }
        if (lambda > 0.0) {
            s -= lambda * std::log(lambda);
        }
    }
    return s;
}

/// Complete set of orthogonal projectors.
class MeasurementChannel {
   public:
    explicit MeasurementChannel(std::vector<CMatrix> projectors) : projectors_(std::move(projectors)) {
        validate();
    }

    /// Computational-basis projectors in dimension `dim`.
    static MeasurementChannel computational(std::size_t dim) {
        std::vector<CMatrix> ps;
        for (std::size_t k = 0; k < dim; ++k) {
            CMatrix p(dim);
            p(k, k) = 1.0;
            ps.push_back(p);
        }
        return MeasurementChannel(std::move(ps));
    }

    /// Single-spin z basis.
    static MeasurementChannel z_basis() {
        return computational(2);
    }

    /// z measurement of one spin of a pair.
    static MeasurementChannel spin_z(Spin spin) {
        std::vector<CMatrix> ps;
        for (std::size_t bit = 0; bit < 2; ++bit) {
            CMatrix p(4);
            for (std::size_t k = 0; k < 4; ++k) {
                const std::size_t b = spin == Spin::One ? (k >> 1) & 1u : k & 1u;
                if (b == bit) {
                    p(k, k) = 1.0;
                }
            }
            ps.push_back(p);
        }
        return MeasurementChannel(std::move(ps));
    }

    const std::vector<CMatrix> &projectors() const {
        return projectors_;
    }
    std::size_t dim() const {
        return projectors_.front().dim();
    }

   private:
    void validate() const {
        if (projectors_.empty()) {
            throw PreconditionError("measurement channel needs at least one projector");
        }
        const std::size_t dim = projectors_.front().dim();
        CMatrix sum(dim);
        for (std::size_t i = 0; i < projectors_.size(); ++i) {
            const CMatrix &p = projectors_[i];
            if (p.dim() != dim) {
                throw DimensionError("projectors have mismatched dimensions");
            }
            p.require_finite();
            if (hermiticity_defect(p) > kAlgebraTol || max_abs_diff(p * p, p) > kAlgebraTol) {
                throw PreconditionError("measurement operator is not an orthogonal projector");
            }
            for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
                if (max_abs_diff(p * projectors_[j], CMatrix(dim)) > kAlgebraTol) {
                    throw PreconditionError("projectors are not mutually orthogonal");
                }
            }
            sum += p;
        }
        if (max_abs_diff(sum, CMatrix::identity(dim)) > kAlgebraTol) {
            throw PreconditionError("projectors do not resolve the identity");
        }
    }

    std::vector<CMatrix> projectors_;
};

/// rho -> sum_i P_i rho P_i.
inline DensityMatrix measure(const DensityMatrix &rho, const MeasurementChannel &ch) {
    if (ch.dim() != rho.dim()) {
        throw DimensionError("measurement channel and state dimensions differ");
    }
    CMatrix out(rho.dim());
    for (const auto &p : ch.projectors()) {
        out += p * rho.mat() * p;
    }
    return DensityMatrix::trusted(out);
}

/// Complete z dephasing of one spin. A single-spin state is dephased
/// in its own z basis and `spin` is ignored.
inline DensityMatrix dephase(const DensityMatrix &rho, Spin spin) {
    if (rho.dim() == 2) {
        return measure(rho, MeasurementChannel::z_basis());
    }
    return measure(rho, MeasurementChannel::spin_z(spin));
}

/// Entropy generated by the measurement; never negative.
inline double delta_S_Q(const DensityMatrix &rho, const MeasurementChannel &ch) {
    const double d = vn_entropy(measure(rho, ch)) - vn_entropy(rho);
    return d < 0.0 && d > -kAlgebraTol ? 0.0 : d;
}

inline double landauer_cost(double bits, double T) {
    if (!(bits >= 0.0)) {
        throw PreconditionError("landauer_cost: bit count must be non-negative");
    }
    if (!(T >= 0.0)) {
        throw PreconditionError("landauer_cost: temperature must be non-negative");
    }
    return bits * T * std::numbers::ln2;
}

struct EfficiencyReport {
    double carnot = 0.0;
    double quantum = 0.0;
    double generic = 0.0;  // 1 - T2 S_out / (T1 S_in)
    double delta_S_Q = 0.0;
    double S_in = 0.0;
    double S_out = 0.0;
};

inline EfficiencyReport efficiencies(double S_in, double S_out, double delta_S_Q, double T1, double T2) {
    if (!(S_in > 0.0)) {
        throw PreconditionError("efficiencies: S_in must be positive");
    }
    if (!(T1 > 0.0) || !(T2 > 0.0)) {
        throw PreconditionError("efficiencies: temperatures must be positive");
    }
    EfficiencyReport r;
    r.S_in = S_in;
    r.S_out = S_out;
    r.delta_S_Q = delta_S_Q;
    r.carnot = 1.0 - T2 / T1;
    r.quantum = r.carnot - T2 * delta_S_Q / (T1 * S_in);
    r.generic = 1.0 - T2 * S_out / (T1 * S_in);
    return r;
}

}  // namespace qdemon
