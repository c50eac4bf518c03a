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
 * Linear maps a: M -> M on nu x nu matrices, stored as the nu^2 x nu^2
 * tensor a_{gd}^{ab} with row index (g, d) and column index (a, b), both in
 * row-major pair order. Under this layout
 *
 *   - apply is a matrix-vector product on the row-major vectorization,
 *   - composition is the matrix product,
 *   - the adjoint involution (time reversal) is the conjugate transpose,
 *   - the diamond involution is the Choi reshuffle.
 */

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matcore.hpp"

namespace retroop {

/// Absolute tolerance on ||s(I) - I|| when checking that a sum of many
/// components is trivial; looser than arithmetic tolerance because the
/// summation accumulates rounding error.
inline constexpr double kSumTol = 1e-8;

class Superoperator {
  public:
    /// Takes ownership of a nu^2 x nu^2 tensor.
    explicit Superoperator(Matrix tensor) : tensor_(std::move(tensor)) {
        if (tensor_.rows() != tensor_.cols() || tensor_.rows() == 0) {
            throw DimensionMismatch("superoperator tensor must be square");
        }
        dim_ = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(tensor_.rows()))));
        if (dim_ * dim_ != tensor_.rows()) {
            throw DimensionMismatch("superoperator tensor side " +
                                    std::to_string(tensor_.rows()) +
                                    " is not a perfect square");
        }
        if (!all_finite(tensor_)) {
            throw NotFinite("superoperator tensor has NaN or Inf entries");
        }
    }

    Index dim() const { return dim_; }
    const Matrix &tensor() const { return tensor_; }

    /// a_{out_row out_col}^{in_row in_col}
    Complex entry(Index out_row, Index out_col, Index in_row, Index in_col) const {
        return tensor_(out_row * dim_ + out_col, in_row * dim_ + in_col);
    }

  private:
    Index dim_ = 0;
    Matrix tensor_;
};

struct KrausSet {
    Index dim = 0;
    std::vector<Matrix> kraus;
};

/// Classification record. `operation` is cp && sub_unital && sub_tracial;
/// `trivial` implies `operation`.
struct OperationClass {
    bool positive = false;
    bool cp = false;
    bool sub_unital = false;  // a(I) <= I
    bool sub_tracial = false; // a^(I) <= I, with ^ the adjoint involution
    bool operation = false;
    bool trivial = false;
};

namespace detail {

inline Eigen::VectorXcd vectorize(const Matrix &m) {
    const Index n = m.rows();
    Eigen::VectorXcd v(n * n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            v(i * n + j) = m(i, j);
        }
    }
    return v;
}

inline Matrix unvectorize(const Eigen::VectorXcd &v, Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            m(i, j) = v(i * n + j);
        }
    }
    return m;
}

inline void require_same_dim(const Superoperator &a, const Superoperator &b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("superoperators act on dimensions " +
                                std::to_string(a.dim()) + " and " +
                                std::to_string(b.dim()));
    }
}

} // namespace detail

namespace detail {
// A function object rather than a function, so that ADL (which would find
// std::apply through Eigen's std::complex template arguments) stays out.
struct ApplyFn {
    Matrix operator()(const Superoperator &a, const Matrix &m) const {
        require_square(m, "superoperator argument");
        if (m.rows() != a.dim()) {
            throw DimensionMismatch("cannot apply a dimension " +
                                    std::to_string(a.dim()) +
                                    " superoperator to a " +
                                    std::to_string(m.rows()) + "x" +
                                    std::to_string(m.rows()) + " matrix");
        }
        return detail::unvectorize(a.tensor() * detail::vectorize(m), a.dim());
    }
};
} // namespace detail

/// a(A) = (sum_{ab} a_{gd}^{ab} A_{ab})_{gd}.
inline constexpr detail::ApplyFn apply{};

/// The composed map A -> a(b(A)).
inline Superoperator compose(const Superoperator &a, const Superoperator &b) {
    detail::require_same_dim(a, b);
    return Superoperator(a.tensor() * b.tensor());
}

/// a<->(A) = [a(A*)]*.
inline Superoperator invol_lr(const Superoperator &a) {
    const Index n = a.dim();
    Matrix t(n * n, n * n);
    for (Index g = 0; g < n; ++g)
        for (Index d = 0; d < n; ++d)
            for (Index al = 0; al < n; ++al)
                for (Index be = 0; be < n; ++be)
                    t(g * n + d, al * n + be) = std::conj(a.entry(d, g, be, al));
    return Superoperator(std::move(t));
}

/// Adjoint for tr(A* B); read as the time reversal of a.
inline Superoperator invol_ud(const Superoperator &a) {
    return Superoperator(a.tensor().adjoint());
}

/// Choi reshuffle, (a<>)_{gd}^{ab} = a_{ga}^{db}.
inline Superoperator invol_diamond(const Superoperator &a) {
    const Index n = a.dim();
    Matrix t(n * n, n * n);
    for (Index g = 0; g < n; ++g)
        for (Index d = 0; d < n; ++d)
            for (Index al = 0; al < n; ++al)
                for (Index be = 0; be < n; ++be)
                    t(g * n + d, al * n + be) = a.entry(g, al, d, be);
    return Superoperator(std::move(t));
}

/// Sum of a_{ab}^{ab}: the trace on Hilbert-Schmidt space.
inline Complex tr_ud(const Superoperator &a) { return a.tensor().trace(); }

/// Sum of a_{bb}^{aa}, equal to tr a(I).
inline Complex tr_lr(const Superoperator &a) {
    const Index n = a.dim();
    Complex s = 0.0;
    for (Index al = 0; al < n; ++al)
        for (Index be = 0; be < n; ++be)
            s += a.entry(be, be, al, al);
    return s;
}

/// Positive in the b^ b sense. Equivalent to tr[A* a(A)] >= 0 for all A,
/// which is psd-ness of the tensor since ^ is the conjugate transpose.
/// A non-Hermitian tensor is simply not positive.
inline bool is_positive(const Superoperator &a, double tol = kDefaultTol) {
    if (!is_hermitian(a.tensor(), tol)) {
        return false;
    }
    return is_psd(a.tensor(), tol);
}

/// Completely positive iff the Choi reshuffle is positive.
inline bool is_cp(const Superoperator &a, double tol = kDefaultTol) {
    return is_positive(invol_diamond(a), tol);
}

inline Superoperator zero(Index dim) {
    return Superoperator(Matrix::Zero(dim * dim, dim * dim));
}

inline Superoperator unit(Index dim) {
    return Superoperator(Matrix::Identity(dim * dim, dim * dim));
}

/// A -> sum_k M_k A M_k*.
inline Superoperator from_kraus(const KrausSet &set) {
    const Index n = set.dim;
    if (n <= 0) {
        throw DimensionMismatch("Kraus set has no dimension");
    }
    Matrix t = Matrix::Zero(n * n, n * n);
    for (const Matrix &m : set.kraus) {
        if (m.rows() != n || m.cols() != n) {
            throw DimensionMismatch("Kraus operator is " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) +
                                    ", expected " + std::to_string(n) + "x" +
                                    std::to_string(n));
        }
        if (!all_finite(m)) {
            throw NotFinite("Kraus operator has NaN or Inf entries");
        }
        // a_{gd}^{ab} += M_{ga} conj(M_{db})
        for (Index g = 0; g < n; ++g)
            for (Index d = 0; d < n; ++d)
                for (Index al = 0; al < n; ++al)
                    for (Index be = 0; be < n; ++be)
                        t(g * n + d, al * n + be) += m(g, al) * std::conj(m(d, be));
    }
    return Superoperator(std::move(t));
}

inline Superoperator from_kraus(Index dim, std::vector<Matrix> kraus) {
    return from_kraus(KrausSet{dim, std::move(kraus)});
}

/// Kraus operators from the Choi spectrum: each eigenpair (lambda, v) with
/// lambda > tol * max(1, lambda_max) yields sqrt(lambda) * v reshaped
/// row-major. Defined only up to a unitary mixing of the operators.
inline KrausSet extract_kraus(const Superoperator &a, double tol = kDefaultTol) {
    const Superoperator choi = invol_diamond(a);
    if (!is_positive(choi, tol)) {
        throw NotCP("superoperator is not completely positive");
    }
    const EigSystem es = hermitian_eig(choi.tensor(), tol);
    const double cutoff = tol * std::max(1.0, es.eigenvalues.maxCoeff());
    KrausSet out{a.dim(), {}};
    for (Index k = es.eigenvalues.size() - 1; k >= 0; --k) {
        const double lambda = es.eigenvalues[k];
        if (lambda <= cutoff) {
            break;
        }
        out.kraus.push_back(std::sqrt(lambda) *
                            detail::unvectorize(es.eigenvectors.col(k), a.dim()));
    }
    return out;
}

inline Superoperator add(const Superoperator &a, const Superoperator &b) {
    detail::require_same_dim(a, b);
    return Superoperator(a.tensor() + b.tensor());
}

/// Nonnegative scaling. A factor above one can take an operation out of the
/// operation class.
inline Superoperator scale(const Superoperator &a, double factor) {
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
        throw ValidationError("scale factor must be a finite nonnegative real");
    }
    return Superoperator(factor * a.tensor());
}

/// Sum of a non-empty list.
inline Superoperator sum(const std::vector<Superoperator> &ops) {
    if (ops.empty()) {
        throw ValidationError("cannot sum an empty list of superoperators");
    }
    Superoperator acc = ops.front();
    for (std::size_t i = 1; i < ops.size(); ++i) {
        acc = add(acc, ops[i]);
    }
    return acc;
}

/// A -> P A P for a projector P = P* = P^2.
inline Superoperator projecting(const Matrix &p, double tol = kDefaultTol) {
    require_square(p, "projector");
    const double scale_ref = std::max(1.0, op_norm(p));
    if (!is_hermitian(p, tol) || op_norm(p * p - p) > tol * scale_ref) {
        throw NotProjector("matrix is not an orthogonal projector");
    }
    return from_kraus(p.rows(), {p});
}

namespace detail {
inline void require_unitary(const Matrix &u, double tol) {
    require_square(u, "unitary");
    if (op_norm(u.adjoint() * u - identity(u.rows())) > tol) {
        throw NotUnitary("matrix is not unitary");
    }
}
} // namespace detail

/// A -> U A U*.
inline Superoperator unitary(const Matrix &u, double tol = kDefaultTol) {
    detail::require_unitary(u, tol);
    return from_kraus(u.rows(), {u});
}

/// A -> U* A U.
inline Superoperator unitary_inv(const Matrix &u, double tol = kDefaultTol) {
    detail::require_unitary(u, tol);
    return from_kraus(u.rows(), {u.adjoint()});
}

inline double max_abs_diff(const Superoperator &a, const Superoperator &b) {
    detail::require_same_dim(a, b);
    return (a.tensor() - b.tensor()).cwiseAbs().maxCoeff();
}

inline Matrix kraus_sum_left(const KrausSet &set) {
    Matrix s = Matrix::Zero(set.dim, set.dim);
    for (const Matrix &m : set.kraus) {
        s += m * m.adjoint();
    }
    return s;
}

inline Matrix kraus_sum_right(const KrausSet &set) {
    Matrix s = Matrix::Zero(set.dim, set.dim);
    for (const Matrix &m : set.kraus) {
        s += m.adjoint() * m;
    }
    return s;
}

namespace detail {
/// Loewner X <= I, with a non-Hermitian X counted as false.
inline bool below_identity(const Matrix &x, double tol) {
    if (!is_hermitian(x, tol)) {
        return false;
    }
    return loewner_leq(x, identity(x.rows()), tol);
}
} // namespace detail

/**
 * Fills every OperationClass field.
 *
 * The operation property is decided twice: directly (Choi psd plus
 * a(I) <= I and a^(I) <= I) and, for CP input, from an extracted Kraus set
 * (sum M M* <= I and sum M* M <= I). Disagreement raises
 * InvariantViolation.
 *
 * Triviality is tested as a(I) = I and a^(I) = I. This matches the
 * quantified definition (tr<->(ab) = tr<->(ba) = tr<->(b) for every
 * operation b): tr<->(ab) = tr[a^(I)* b(I)] equals tr b(I) for all b iff
 * a^(I) = I, and tr<->(ba) = tr[b^(I)* a(I)] equals tr<->(b) for all b iff
 * a(I) = I.
 */
inline OperationClass classify(const Superoperator &a, double tol = kDefaultTol) {
    OperationClass c;
    const Matrix id = identity(a.dim());
    const Matrix image = apply(a, id);
    const Matrix back = apply(invol_ud(a), id);

    c.positive = is_positive(a, tol);
    c.cp = is_cp(a, tol);
    c.sub_unital = detail::below_identity(image, tol);
    c.sub_tracial = detail::below_identity(back, tol);
    c.operation = c.cp && c.sub_unital && c.sub_tracial;

    if (c.cp) {
        const KrausSet ks = extract_kraus(a, tol);
        const bool kraus_unital = detail::below_identity(kraus_sum_left(ks), tol);
        const bool kraus_tracial = detail::below_identity(kraus_sum_right(ks), tol);
        if (kraus_unital != c.sub_unital || kraus_tracial != c.sub_tracial) {
            throw InvariantViolation("direct and Kraus-sum operation tests disagree");
        }
    }

    c.trivial = c.operation && op_norm(image - id) <= tol && op_norm(back - id) <= tol;
    return c;
}

inline void require_operation(const Superoperator &a, double tol, const std::string &what) {
    if (!classify(a, tol).operation) {
        throw NotOperation(what + " is not an operation");
    }
}

} // namespace retroop
