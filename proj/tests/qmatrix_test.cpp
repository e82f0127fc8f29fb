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

#include "qdemon/qmatrix.hpp"

#include <complex>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "qdemon/invariants.hpp"
#include "qdemon/spins.hpp"

using namespace qdemon;

namespace {

using LComplex = std::complex<long double>;

CMatrix random_matrix(std::mt19937_64 &rng, std::size_t dim) {
    std::normal_distribution<double> g;
    CMatrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            m(r, c) = Complex(g(rng), g(rng));
        }
    }
    return m;
}

CMatrix random_hermitian(std::mt19937_64 &rng, std::size_t dim) {
    const CMatrix a = random_matrix(rng, dim);
    return (a + adjoint(a)) * Complex(0.5);
}

// Unitary from Gram-Schmidt on a random complex matrix.
CMatrix random_unitary(std::mt19937_64 &rng) {
    CMatrix a = random_matrix(rng, 4);
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t k = 0; k < c; ++k) {
            Complex dot = 0.0;
            for (std::size_t r = 0; r < 4; ++r) {
                dot += std::conj(a(r, k)) * a(r, c);
            }
            for (std::size_t r = 0; r < 4; ++r) {
                a(r, c) -= dot * a(r, k);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < 4; ++r) {
            norm += std::norm(a(r, c));
        }
        for (std::size_t r = 0; r < 4; ++r) {
            a(r, c) /= std::sqrt(norm);
        }
    }
    return a;
}

// Oracle: entrywise product summed in long double.
CMatrix product_oracle(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.dim());
    for (std::size_t r = 0; r < a.dim(); ++r) {
        for (std::size_t c = 0; c < a.dim(); ++c) {
            LComplex acc = 0.0L;
            for (std::size_t k = 0; k < a.dim(); ++k) {
                acc += LComplex(a(r, k)) * LComplex(b(k, c));
            }
            out(r, c) = Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
        }
    }
    return out;
}

// Oracle: Kronecker expansion by explicit index arithmetic.
CMatrix kron_oracle(const CMatrix &a, const CMatrix &b) {
    CMatrix out(4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t l = 0; l < 2; ++l) {
                    out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

const std::array<double, 2> kDiag02_08{0.2, 0.8};

}  // namespace

TEST(qmatrix, mat_mul_identity_and_pauli) {
    EXPECT_EQ(CMatrix::identity(4) * CMatrix::identity(4), CMatrix::identity(4));
    EXPECT_EQ(pauli::x() * pauli::x(), CMatrix::identity(2));
    EXPECT_THROW(CMatrix::identity(2) * CMatrix::identity(4), DimensionError);
}

TEST(qmatrix, mat_mul_unitary_against_long_double) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const CMatrix u = random_unitary(rng);
        EXPECT_LE(max_abs_diff(u * adjoint(u), CMatrix::identity(4)), 1e-12);
        EXPECT_LE(max_abs_diff(u * adjoint(u), product_oracle(u, adjoint(u))), 1e-14);
    }
}

TEST(qmatrix, adjoint_cases) {
    EXPECT_EQ(adjoint(CMatrix::identity(2)), CMatrix::identity(2));
    const CMatrix a = CMatrix::from_rows({0.0, Complex(0.0, 1.0), 0.0, 0.0});
    const CMatrix expect = CMatrix::from_rows({0.0, 0.0, Complex(0.0, -1.0), 0.0});
    EXPECT_EQ(adjoint(a), expect);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 20; ++i) {
        const CMatrix x = random_matrix(rng, 4);
        const CMatrix y = random_matrix(rng, 4);
        EXPECT_LE(max_abs_diff(adjoint(x * y), adjoint(y) * adjoint(x)), 1e-12);
    }
}

TEST(qmatrix, tensor_cases) {
    EXPECT_EQ(tensor(CMatrix::identity(2), CMatrix::identity(2)), CMatrix::identity(4));
    // Physical sigma_z in the (down, up) basis is diag(-1, 1).
    const std::array<double, 4> z1{-1, -1, 1, 1};
    EXPECT_EQ(tensor(pauli::z(), CMatrix::identity(2)), CMatrix::diagonal(std::span<const double>(z1)));
    // Textbook matrix [[1,0],[0,-1]] gives diag(1,1,-1,-1).
    const CMatrix textbook = CMatrix::from_rows({1.0, 0.0, 0.0, -1.0});
    const std::array<double, 4> zt{1, 1, -1, -1};
    EXPECT_EQ(tensor(textbook, CMatrix::identity(2)), CMatrix::diagonal(std::span<const double>(zt)));
    const std::array<double, 4> zz{1, -1, -1, 1};
    EXPECT_EQ(tensor(pauli::z(), pauli::z()), CMatrix::diagonal(std::span<const double>(zz)));
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const CMatrix a = random_matrix(rng, 2);
        const CMatrix b = random_matrix(rng, 2);
        EXPECT_EQ(tensor(a, b), kron_oracle(a, b));
    }
}

TEST(qmatrix, trace_cases) {
    EXPECT_EQ(trace(CMatrix::identity(4)), Complex(4.0));
    EXPECT_NEAR(trace(DensityMatrix::maximally_mixed(4).mat()).real(), 1.0, 1e-15);
    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i) {
        const CMatrix a = random_matrix(rng, 4);
        const CMatrix b = random_matrix(rng, 4);
        EXPECT_LE(std::abs(trace(a * b) - trace(b * a)), 1e-12);
    }
}

TEST(qmatrix, partial_trace_cases) {
    const std::array<Complex, 4> dd{1, 0, 0, 0};
    const DensityMatrix r = partial_trace(DensityMatrix::pure(dd), Spin::One);
    const std::array<Complex, 2> down{1, 0};
    EXPECT_EQ(r.mat(), DensityMatrix::pure(down).mat());

    const double h = 1.0 / std::sqrt(2.0);
    const std::array<Complex, 4> bell{h, 0, 0, h};
    const DensityMatrix b = DensityMatrix::pure(bell);
    for (Spin s : {Spin::One, Spin::Two}) {
        EXPECT_LE(max_abs_diff(partial_trace(b, s).mat(), CMatrix::identity(2) * Complex(0.5)), 1e-15);
    }

    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double p = u(rng);
        const double q = u(rng);
        const std::array<double, 2> d1{1 - p, p};
        const std::array<double, 2> d2{1 - q, q};
        const DensityMatrix r1(CMatrix::diagonal(std::span<const double>(d1)));
        const DensityMatrix r2(CMatrix::diagonal(std::span<const double>(d2)));
        const DensityMatrix prod = product_state(r1, r2);
        // Oracle: sum over spin 1's index by hand.
        CMatrix expect(2);
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t c = 0; c < 2; ++c) {
                expect(a, c) = prod(a, c) + prod(2 + a, 2 + c);
            }
        }
        EXPECT_LE(max_abs_diff(partial_trace(prod, Spin::Two).mat(), expect), 1e-15);
        EXPECT_LE(max_abs_diff(partial_trace(prod, Spin::Two).mat(), r2.mat()), 1e-15);
    }
}

TEST(qmatrix, hermitian_eigenvalues_cases) {
    const auto e = hermitian_eigenvalues(CMatrix::diagonal(std::span<const double>(kDiag02_08)));
    ASSERT_EQ(e.size(), 2u);
    EXPECT_NEAR(e[0], 0.2, 1e-15);
    EXPECT_NEAR(e[1], 0.8, 1e-15);

    const double h = 1.0 / std::sqrt(2.0);
    const std::array<Complex, 2> plus{h, h};
    const auto ep = hermitian_eigenvalues(DensityMatrix::pure(plus).mat());
    EXPECT_NEAR(ep[0], 0.0, 1e-15);
    EXPECT_NEAR(ep[1], 1.0, 1e-15);

    std::mt19937_64 rng(16);
    for (int i = 0; i < 50; ++i) {
        const CMatrix a = random_hermitian(rng, 4);
        const auto ev = hermitian_eigenvalues(a);
        double s1 = 0.0;
        double s2 = 0.0;
        for (double l : ev) {
            s1 += l;
            s2 += l * l;
        }
        EXPECT_NEAR(s1, trace(a).real(), 1e-10);
        EXPECT_NEAR(s2, trace(a * a).real(), 1e-10);
        EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
    }
}

TEST(qmatrix, mat_exp_diag_phase_cases) {
    const std::array<double, 4> zero{0, 0, 0, 0};
    EXPECT_EQ(mat_exp_diag_phase(zero, 0.0).mat(), CMatrix::identity(4));
    const std::array<double, 4> ones{1, 1, 1, 1};
    EXPECT_LE(max_abs_diff(mat_exp_diag_phase(ones, std::numbers::pi).mat(), CMatrix::identity(4) * Complex(-1.0)),
              1e-15);
    // gamma sz sz for t = pi / (2 gamma).
    const double gamma = 0.7;
    const std::array<double, 4> zz{gamma, -gamma, -gamma, gamma};
    const auto u = mat_exp_diag_phase(zz, std::numbers::pi / (2.0 * gamma));
    const Complex m(0.0, -1.0);
    const Complex p(0.0, 1.0);
    EXPECT_LE(std::abs(u(0, 0) - m), 1e-15);
    EXPECT_LE(std::abs(u(1, 1) - p), 1e-15);
    EXPECT_LE(std::abs(u(2, 2) - p), 1e-15);
    EXPECT_LE(std::abs(u(3, 3) - m), 1e-15);
}

TEST(qmatrix, density_matrix_validation) {
    EXPECT_THROW(DensityMatrix(CMatrix::identity(2)), InvariantError);
    const CMatrix negative = CMatrix::from_rows({1.5, 0.0, 0.0, -0.5});
    EXPECT_THROW((DensityMatrix(negative)), InvariantError);
    const CMatrix nonherm = CMatrix::from_rows({0.5, 0.3, 0.1, 0.5});
    EXPECT_THROW((DensityMatrix(nonherm)), InvariantError);
    EXPECT_THROW(CMatrix(5), DimensionError);
    EXPECT_NO_THROW(DensityMatrix::maximally_mixed(4));
}

TEST(qmatrix, unitary_rejects_non_unitary) {
    EXPECT_THROW(Unitary(CMatrix::identity(4) * Complex(2.0)), InvariantError);
}

TEST(qmatrix, conjugation_preserves_states) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix rho = random_density_matrix(rng, 4);
        const Unitary u(random_unitary(rng));
        const DensityMatrix out = conjugate(u, rho);
        EXPECT_NO_THROW(out.validate());
        EXPECT_NEAR(trace(out.mat()).real(), 1.0, 1e-12);
        EXPECT_LE(max_abs_diff(out.mat(), product_oracle(product_oracle(u.mat(), rho.mat()), adjoint(u.mat()))),
                  1e-13);
    }
}

TEST(qmatrix, trace_distance_cases) {
    const std::array<Complex, 2> down{1, 0};
    const std::array<Complex, 2> up{0, 1};
    EXPECT_NEAR(trace_distance(DensityMatrix::pure(down), DensityMatrix::pure(up)), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(DensityMatrix::pure(down), DensityMatrix::maximally_mixed(2)), 0.5, 1e-15);
}

TEST(qmatrix, expectation_change_keeps_small_populations) {
    // Nearly pure |down down> moving 1e-30 of weight: a plain difference of
    // expectations rounds to zero.
    const double eps = 1e-30;
    const std::array<double, 4> before{1.0 - eps, eps, 0, 0};
    const std::array<double, 4> after{1.0 - eps, 0, 0, eps};
    const DensityMatrix a = DensityMatrix::trusted(CMatrix::diagonal(std::span<const double>(before)));
    const DensityMatrix b = DensityMatrix::trusted(CMatrix::diagonal(std::span<const double>(after)));
    const std::array<double, 4> h{-3, -1, 1, 3};
    EXPECT_DOUBLE_EQ(expectation_diag_change(a, b, h), 4.0 * eps);
}
