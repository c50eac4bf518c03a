// Copyright 2026 The RetroOp Authors
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

/**
 * @file
 * Dense complex matrices over C^nu: traces, inner products, the operator
 * norm, a cyclic Jacobi eigensolver for Hermitian input and the Loewner
 * order predicates built on it.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace retroop {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance used by every predicate unless the caller passes one.
inline constexpr double kDefaultTol = 1e-9;

/// Hermitian eigendecomposition. Eigenvalues ascend; column k of
/// `eigenvectors` belongs to `eigenvalues[k]`.
struct EigSystem {
    RealVector eigenvalues;
    Matrix eigenvectors;
};

inline Matrix identity(Index dim) { return Matrix::Identity(dim, dim); }

/// E_{row,col}: one at (row, col), zero elsewhere.
inline Matrix matrix_unit(Index dim, Index row, Index col) {
    Matrix e = Matrix::Zero(dim, dim);
    e(row, col) = 1.0;
    return e;
}

inline bool all_finite(const Matrix &m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) ||
                !std::isfinite(m(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

inline void require_square(const Matrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionMismatch(std::string(what) + " must be a non-empty "
                                "square matrix, got " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
    }
}

inline void require_same_dim(const Matrix &a, const Matrix &b) {
    require_square(a, "left operand");
    require_square(b, "right operand");
    if (a.rows() != b.rows()) {
        throw DimensionMismatch("operands have dimensions " +
                                std::to_string(a.rows()) + " and " +
                                std::to_string(b.rows()));
    }
}

inline Complex trace(const Matrix &m) {
    require_square(m, "trace argument");
    return m.trace();
}

/// tau(A) = tr(A) / nu.
inline Complex normalized_trace(const Matrix &m) {
    return trace(m) / static_cast<double>(m.rows());
}

/// (A|B) = tau(A* B).
inline Complex hs_inner(const Matrix &a, const Matrix &b) {
    require_same_dim(a, b);
    return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

/// <A, B> = tr(A* B), the unnormalized pairing used by the superoperator
/// formulas.
inline Complex tr_inner(const Matrix &a, const Matrix &b) {
    require_same_dim(a, b);
    return (a.adjoint() * b).trace();
}

namespace detail {

/// Cyclic complex Jacobi on the Hermitian part of `m`; no precondition
/// checks. Each rotation first rephases column q so that the pivot is real,
/// then applies the real symmetric Schur rotation.
inline EigSystem jacobi_eig(const Matrix &m, int max_sweeps = 100,
                            double rel_threshold = 1e-14) {
    const Index n = m.rows();
    Matrix a = 0.5 * (m + m.adjoint());
    Matrix v = Matrix::Identity(n, n);

    const double scale = a.norm();
    auto off_norm = [&] {
        double s = 0.0;
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < n; ++i) {
                if (i != j) {
                    s += std::norm(a(i, j));
                }
            }
        }
        return std::sqrt(s);
    };

    int sweep = 0;
    while (scale > 0.0 && off_norm() >= rel_threshold * scale) {
        if (sweep++ == max_sweeps) {
            throw NoConvergence("Jacobi eigensolver exceeded " +
                                std::to_string(max_sweeps) + " sweeps");
        }
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double g = std::abs(a(p, q));
                if (g == 0.0) {
                    continue;
                }
                // d rotates a(p, q) onto the positive real axis.
                const Complex d = std::conj(a(p, q)) / g;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * g);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;

                // A <- A G, V <- V G with G e_p = c e_p - s d e_q,
                // G e_q = s e_p + c d e_q.
                for (Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp - s * d * akq;
                    a(k, q) = s * akp + c * d * akq;
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = c * vkp - s * d * vkq;
                    v(k, q) = s * vkp + c * d * vkq;
                }
                // A <- G* A.
                const Complex dc = std::conj(d);
                for (Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk - s * dc * aqk;
                    a(q, k) = s * apk + c * dc * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<std::pair<double, Index>> order;
    order.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        order.emplace_back(a(i, i).real(), i);
    }
    std::sort(order.begin(), order.end(),
              [](const auto &l, const auto &r) { return l.first < r.first; });

    EigSystem out{RealVector(n), Matrix(n, n)};
    for (Index k = 0; k < n; ++k) {
        out.eigenvalues[k] = order[static_cast<std::size_t>(k)].first;
        out.eigenvectors.col(k) = v.col(order[static_cast<std::size_t>(k)].second);
    }
    return out;
}

} // namespace detail

/// Largest singular value, sqrt of the top eigenvalue of M* M.
inline double op_norm(const Matrix &m) {
    require_square(m, "op_norm argument");
    const Matrix gram = m.adjoint() * m;
    const double top = detail::jacobi_eig(gram).eigenvalues.maxCoeff();
    return std::sqrt(std::max(top, 0.0));
}

/// True when p_inf(M - M*) <= tol * max(1, p_inf(M)).
inline bool is_hermitian(const Matrix &m, double tol = kDefaultTol) {
    require_square(m, "matrix");
    const Matrix skew = m - m.adjoint();
    if (skew.cwiseAbs().maxCoeff() == 0.0) {
        return true;
    }
    return op_norm(skew) <= tol * std::max(1.0, op_norm(m));
}

inline EigSystem hermitian_eig(const Matrix &m, double hermitian_tol = kDefaultTol) {
    require_square(m, "eigensolver input");
    if (!all_finite(m)) {
        throw NotFinite("eigensolver input has NaN or Inf entries");
    }
    if (!is_hermitian(m, hermitian_tol)) {
        throw NotHermitian("eigensolver input is not Hermitian");
    }
    return detail::jacobi_eig(m);
}

/// Minimum eigenvalue >= -tol * max(1, |largest eigenvalue|).
inline bool is_psd(const Matrix &m, double tol = kDefaultTol) {
    const RealVector ev = hermitian_eig(m, tol).eigenvalues;
    return ev.minCoeff() >= -tol * std::max(1.0, std::abs(ev.maxCoeff()));
}

/// A <= B in the Loewner order, i.e. B - A is psd.
inline bool loewner_leq(const Matrix &a, const Matrix &b, double tol = kDefaultTol) {
    require_same_dim(a, b);
    if (!is_hermitian(a, tol) || !is_hermitian(b, tol)) {
        throw NotHermitian("Loewner comparison needs Hermitian operands");
    }
    return is_psd(b - a, tol);
}

} // namespace retroop
