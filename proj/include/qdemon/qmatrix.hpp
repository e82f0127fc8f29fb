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

// Dense complex linear algebra for one- and two-spin Hilbert spaces.
//
// Basis convention for two spins: index = 2*s1 + s2 with s = 0 for |down>
// and s = 1 for |up>, i.e. |dd>, |du>, |ud>, |uu>. Spin 1 is the most
// significant tensor factor. Natural units: hbar = k_B = 1.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qdemon/errors.hpp"

namespace qdemon {

using Complex = std::complex<double>;

/// Identifies one of the two spins.
enum class Spin { One = 1, Two = 2 };

inline Spin spin_from_index(int index) {
    if (index == 1) {
        return Spin::One;
    }
    if (index == 2) {
        return Spin::Two;
    }
    throw PreconditionError("spin index must be 1 or 2, got " + std::to_string(index));
}

inline int index_of(Spin s) {
    return static_cast<int>(s);
}

inline Spin other(Spin s) {
    return s == Spin::One ? Spin::Two : Spin::One;
}

/// Tolerance for exact algebraic identities.
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for iterative results (eigenvalues, unitarity of composites).
inline constexpr double kIterativeTol = 1e-10;

/// Square complex matrix of dimension 1..4, stored row-major in place.
class CMatrix {
   public:
    static constexpr std::size_t kMaxDim = 4;

    CMatrix() : CMatrix(2) {
    }

    /// Zero matrix.
    explicit CMatrix(std::size_t dim) : dim_(dim), data_{} {
        if (dim == 0 || dim > kMaxDim) {
            throw DimensionError("matrix dimension must be in 1..4, got " + std::to_string(dim));
        }
    }

    static CMatrix identity(std::size_t dim) {
        CMatrix m(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            m(k, k) = 1.0;
        }
        return m;
    }

    /// Row-major entries; the count must be a perfect square <= 16.
    static CMatrix from_rows(std::initializer_list<Complex> entries) {
        std::size_t dim = 0;
        while (dim * dim < entries.size()) {
            ++dim;
        }
        if (dim * dim != entries.size()) {
            throw DimensionError("entry count is not a perfect square");
        }
        CMatrix m(dim);
        std::size_t k = 0;
        for (const auto &e : entries) {
            m.data_[k / dim * kMaxDim + k % dim] = e;
            ++k;
        }
        m.require_finite();
        return m;
    }

    static CMatrix diagonal(std::span<const double> diag) {
        CMatrix m(diag.size());
        for (std::size_t k = 0; k < diag.size(); ++k) {
            m(k, k) = diag[k];
        }
        m.require_finite();
        return m;
    }

    static CMatrix diagonal(std::span<const Complex> diag) {
        CMatrix m(diag.size());
        for (std::size_t k = 0; k < diag.size(); ++k) {
            m(k, k) = diag[k];
        }
        m.require_finite();
        return m;
    }

    /// |v><v| for a (not necessarily normalized) vector.
    static CMatrix outer(std::span<const Complex> v) {
        CMatrix m(v.size());
        for (std::size_t r = 0; r < v.size(); ++r) {
            for (std::size_t c = 0; c < v.size(); ++c) {
                m(r, c) = v[r] * std::conj(v[c]);
            }
        }
        return m;
    }

    std::size_t dim() const {
        return dim_;
    }

    Complex operator()(std::size_t r, std::size_t c) const {
        return data_[r * kMaxDim + c];
    }
    Complex &operator()(std::size_t r, std::size_t c) {
        return data_[r * kMaxDim + c];
    }

    bool all_finite() const {
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                const Complex v = (*this)(r, c);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    return false;
                }
            }
        }
        return true;
    }

    void require_finite() const {
        if (!all_finite()) {
            throw InvariantError("matrix has a non-finite entry");
        }
    }

    std::vector<double> real_diagonal() const {
        std::vector<double> d(dim_);
        for (std::size_t k = 0; k < dim_; ++k) {
            d[k] = (*this)(k, k).real();
        }
        return d;
    }

    CMatrix &operator+=(const CMatrix &o) {
        require_same_dim(o);
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                (*this)(r, c) += o(r, c);
            }
        }
        return *this;
    }

    CMatrix &operator-=(const CMatrix &o) {
        require_same_dim(o);
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                (*this)(r, c) -= o(r, c);
            }
        }
        return *this;
    }

    CMatrix &operator*=(Complex s) {
        for (auto &v : data_) {
            v *= s;
        }
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix &b) {
        return a += b;
    }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) {
        return a -= b;
    }
    friend CMatrix operator*(CMatrix a, Complex s) {
        return a *= s;
    }
    friend CMatrix operator*(Complex s, CMatrix a) {
        return a *= s;
    }

    bool operator==(const CMatrix &o) const {
        if (dim_ != o.dim_) {
            return false;
        }
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                if ((*this)(r, c) != o(r, c)) {
                    return false;
                }
            }
        }
        return true;
    }

   private:
    void require_same_dim(const CMatrix &o) const {
        if (o.dim_ != dim_) {
            throw DimensionError(
                "dimension mismatch: " + std::to_string(dim_) + " vs " + std::to_string(o.dim_));
        }
    }

    std::size_t dim_;
    std::array<Complex, kMaxDim * kMaxDim> data_;
};

inline CMatrix mat_mul(const CMatrix &a, const CMatrix &b) {
    if (a.dim() != b.dim()) {
        throw DimensionError(
            "dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    const std::size_t n = a.dim();
    CMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += a(r, k) * b(k, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

inline CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    return mat_mul(a, b);
}

/// Conjugate transpose.
inline CMatrix adjoint(const CMatrix &a) {
    CMatrix out(a.dim());
    for (std::size_t r = 0; r < a.dim(); ++r) {
        for (std::size_t c = 0; c < a.dim(); ++c) {
            out(c, r) = std::conj(a(r, c));
        }
    }
    return out;
}

/// Kronecker product; `a` is the most significant factor.
inline CMatrix tensor(const CMatrix &a, const CMatrix &b) {
    const std::size_t n = a.dim() * b.dim();
    if (n > CMatrix::kMaxDim) {
        throw DimensionError("tensor product dimension " + std::to_string(n) + " exceeds 4");
    }
    CMatrix out(n);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            for (std::size_t k = 0; k < b.dim(); ++k) {
                for (std::size_t l = 0; l < b.dim(); ++l) {
                    out(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

inline Complex trace(const CMatrix &a) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        acc += a(k, k);
    }
    return acc;
}

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("dimension mismatch");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r) {
        for (std::size_t c = 0; c < a.dim(); ++c) {
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
        }
    }
    return worst;
}

inline double hermiticity_defect(const CMatrix &a) {
    return max_abs_diff(a, adjoint(a));
}

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic complex
/// Jacobi rotations. Converges when the off-diagonal Frobenius norm drops
/// to 1e-14 (relative to max(1, |a|_F)).
inline std::vector<double> hermitian_eigenvalues(const CMatrix &a) {
    if (hermiticity_defect(a) > kIterativeTol) {
        throw PreconditionError("hermitian_eigenvalues: matrix is not Hermitian");
    }
    const std::size_t n = a.dim();
    CMatrix m = (a + adjoint(a)) * Complex(0.5);

    double frob = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            frob += std::norm(m(r, c));
        }
    }
    const double threshold = 1e-14 * std::max(1.0, std::sqrt(frob));

    auto off_norm = [&] {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                if (r != c) {
                    acc += std::norm(m(r, c));
                }
            }
        }
        return std::sqrt(acc);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = m(p, q);
                const double mag = std::abs(b);
                if (mag == 0.0) {
                    continue;
                }
                const Complex phase = b / mag;
                const double tau = (m(q, q).real() - m(p, p).real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                CMatrix rot = CMatrix::identity(n);
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = s * phase;
                rot(q, p) = -s * std::conj(phase);
                m = adjoint(rot) * m * rot;
            }
        }
    }

    std::vector<double> eig = m.real_diagonal();
    std::sort(eig.begin(), eig.end());
    return eig;
}

/// Unitary matrix, ||U U^dagger - I||_max <= 1e-10.
class Unitary {
   public:
    Unitary() : mat_(CMatrix::identity(4)) {
    }

    explicit Unitary(CMatrix m) : mat_(m) {
        mat_.require_finite();
        const double defect = max_abs_diff(mat_ * qdemon::adjoint(mat_), CMatrix::identity(mat_.dim()));
        if (defect > kIterativeTol) {
            throw InvariantError("matrix is not unitary (defect " + std::to_string(defect) + ")");
        }
    }

    static Unitary identity(std::size_t dim) {
        return Unitary(CMatrix::identity(dim));
    }

    const CMatrix &mat() const {
        return mat_;
    }
    std::size_t dim() const {
        return mat_.dim();
    }
    Complex operator()(std::size_t r, std::size_t c) const {
        return mat_(r, c);
    }

    Unitary adjoint() const {
        return Unitary(qdemon::adjoint(mat_));
    }

    /// Composition: (a * b) applies b first.
    friend Unitary operator*(const Unitary &a, const Unitary &b) {
        return Unitary(a.mat_ * b.mat_);
    }

   private:
    CMatrix mat_;
};

/// Diagonal unitary exp(-i h t) for a Hamiltonian diagonal in the
/// computational basis.
inline Unitary mat_exp_diag_phase(std::span<const double> h_diag, double t) {
    std::vector<Complex> d(h_diag.size());
    for (std::size_t k = 0; k < h_diag.size(); ++k) {
        d[k] = std::polar(1.0, -h_diag[k] * t);
    }
    return Unitary(CMatrix::diagonal(std::span<const Complex>(d)));
}

/// Hermitian, unit-trace, positive semidefinite 2x2 or 4x4 matrix.
class DensityMatrix {
   public:
    DensityMatrix() : mat_(CMatrix::identity(4) * Complex(0.25)) {
    }

    /// Validates all invariants; throws InvariantError on violation.
    explicit DensityMatrix(CMatrix m) : mat_(m) {
        validate();
    }

    /// Skips the eigenvalue check; for results of channels known to
    /// preserve positivity. Hermiticity and trace are still checked.
    static DensityMatrix trusted(CMatrix m) {
        DensityMatrix d;
        d.mat_ = m;
        d.validate_cheap();
        return d;
    }

    static DensityMatrix pure(std::span<const Complex> ket) {
        double norm = 0.0;
        for (const auto &a : ket) {
            norm += std::norm(a);
        }
        if (!(norm > 0.0)) {
            throw PreconditionError("pure state from zero vector");
        }
        return DensityMatrix(CMatrix::outer(ket) * Complex(1.0 / norm));
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        return DensityMatrix(CMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
    }

    const CMatrix &mat() const {
        return mat_;
    }
    std::size_t dim() const {
        return mat_.dim();
    }
    Complex operator()(std::size_t r, std::size_t c) const {
        return mat_(r, c);
    }

    /// Full invariant check (Hermitian, trace, spectrum).
    void validate() const {
        validate_cheap();
        const auto eig = hermitian_eigenvalues(mat_);
        if (eig.front() < -kAlgebraTol) {
            throw InvariantError("density matrix has negative eigenvalue " + std::to_string(eig.front()));
        }
    }

   private:
    void validate_cheap() const {
        if (mat_.dim() != 2 && mat_.dim() != 4) {
            throw DimensionError("density matrix must be 2x2 or 4x4");
        }
        mat_.require_finite();
        if (hermiticity_defect(mat_) > kAlgebraTol) {
            throw InvariantError("density matrix is not Hermitian");
        }
        if (std::abs(trace(mat_) - 1.0) > kAlgebraTol) {
            throw InvariantError("density matrix trace is not 1");
        }
    }

    CMatrix mat_;
};

inline DensityMatrix conjugate(const Unitary &u, const DensityMatrix &rho) {
    if (u.dim() != rho.dim()) {
        throw DimensionError("unitary and state dimensions differ");
    }
    return DensityMatrix::trusted(u.mat() * rho.mat() * adjoint(u.mat()));
}

/// Reduced state of the kept spin of a two-spin state.
inline DensityMatrix partial_trace(const DensityMatrix &rho, Spin keep) {
    if (rho.dim() != 4) {
        throw DimensionError("partial_trace needs a two-spin (4x4) state");
    }
    CMatrix out(2);
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                acc += keep == Spin::One ? rho(2 * a + k, 2 * b + k) : rho(2 * k + a, 2 * k + b);
            }
            out(a, b) = acc;
        }
    }
    return DensityMatrix::trusted(out);
}

/// Two-spin state from per-spin states, ordered by spin index.
inline DensityMatrix product_state(const DensityMatrix &spin1, const DensityMatrix &spin2) {
    if (spin1.dim() != 2 || spin2.dim() != 2) {
        throw DimensionError("product_state expects two single-spin states");
    }
    return DensityMatrix::trusted(tensor(spin1.mat(), spin2.mat()));
}

/// Sum_k h_k rho_kk for a diagonal observable.
inline double expectation_diag(const DensityMatrix &rho, std::span<const double> h) {
    if (h.size() != rho.dim()) {
        throw DimensionError("observable and state dimensions differ");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        acc += h[k] * rho(k, k).real();
    }
    return acc;
}

/// Sum_k h_k (after_kk - before_kk), measured from the most populated level
/// of `before` so nearly pure states keep their small population changes.
inline double expectation_diag_change(const DensityMatrix &before, const DensityMatrix &after, std::span<const double> h) {
    if (h.size() != before.dim() || h.size() != after.dim()) {
        throw DimensionError("observable and state dimensions differ");
    }
    std::size_t ref = 0;
    for (std::size_t k = 1; k < h.size(); ++k) {
        if (before(k, k).real() > before(ref, ref).real()) {
            ref = k;
        }
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (k != ref) {
            acc += (h[k] - h[ref]) * (after(k, k).real() - before(k, k).real());
        }
    }
    return acc;
}

/// (1/2) || rho - sigma ||_1.
inline double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    const auto eig = hermitian_eigenvalues(rho.mat() - sigma.mat());
    double acc = 0.0;
    for (double e : eig) {
        acc += std::abs(e);
    }
    return 0.5 * acc;
}

}  // namespace qdemon
