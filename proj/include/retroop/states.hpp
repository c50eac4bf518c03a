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
 * Bayesian a priori / a posteriori states of operations and instruments,
 * held as density matrices, and the effect operators that turn the
 * conditional probabilities into expectations in those states.
 *
 * For an operation a with tr<->(a) > 0:
 *   a priori      rho->_a = a^(I) / tr a^(I),  since tr a(A) = tr[rho->_a A] tr<->(a)
 *   a posteriori  rho<-_a = a(I) / tr a(I)
 */

#pragma once

#include <cmath>
#include <string>

#include "bayes.hpp"
#include "errors.hpp"
#include "instrument.hpp"
#include "matcore.hpp"
#include "superop.hpp"

namespace retroop {

class DensityMatrix {
  public:
    /// Hermitian within 1e-10, psd at 1e-9, unit trace within 1e-10.
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
        require_square(m_, "density matrix");
        if (!all_finite(m_)) {
            throw NotFinite("density matrix has NaN or Inf entries");
        }
        if (!is_hermitian(m_, 1e-10)) {
            throw ValidationError("density matrix is not Hermitian");
        }
        if (!is_psd(m_, 1e-9)) {
            throw ValidationError("density matrix is not positive semidefinite");
        }
        if (std::abs(m_.trace() - Complex(1.0)) > 1e-10) {
            throw ValidationError("density matrix trace is not one");
        }
    }

    const Matrix &matrix() const { return m_; }
    Index dim() const { return m_.rows(); }

    /// tr(rho A).
    Complex expectation(const Matrix &a) const {
        require_same_dim(m_, a);
        return (m_ * a).trace();
    }

    double purity() const { return (m_ * m_).trace().real(); }

    RealVector spectrum() const { return hermitian_eig(m_, 1e-10).eigenvalues; }

    static DensityMatrix maximally_mixed(Index dim) {
        return DensityMatrix(identity(dim) / static_cast<double>(dim));
    }

  private:
    Matrix m_;
};

/// 0 <= E <= I.
class Effect {
  public:
    explicit Effect(Matrix m, double tol = kDefaultTol) : m_(std::move(m)) {
        require_square(m_, "effect");
        if (!is_hermitian(m_, tol) || !is_psd(m_, tol) ||
            !loewner_leq(m_, identity(m_.rows()), tol)) {
            throw ValidationError("effect must satisfy 0 <= E <= I");
        }
    }
    const Matrix &matrix() const { return m_; }

  private:
    Matrix m_;
};

enum class StateDirection { Prior, Posterior };

namespace detail {
inline DensityMatrix normalized_state(const Matrix &m) {
    const Matrix herm = 0.5 * (m + m.adjoint());
    try {
        return DensityMatrix(herm / herm.trace().real());
    } catch (const ValidationError &e) {
        throw InvariantViolation(std::string("emitted state invalid: ") + e.what());
    }
}
} // namespace detail

inline DensityMatrix state_prior(const Superoperator &a, double tol = kDefaultTol) {
    require_operation(a, tol, "argument");
    detail::nonzero_weight(a, tol, "state_prior argument");
    return detail::normalized_state(apply(invol_ud(a), identity(a.dim())));
}

inline DensityMatrix state_posterior(const Superoperator &a, double tol = kDefaultTol) {
    require_operation(a, tol, "argument");
    detail::nonzero_weight(a, tol, "state_posterior argument");
    return detail::normalized_state(apply(a, identity(a.dim())));
}

/// omega->_a(A) = tr a(A) / tr<->(a), evaluated from the definition.
inline Complex prior_functional(const Superoperator &a, const Matrix &m) {
    return trace(apply(a, m)) / tr_lr(a);
}

/// omega<-_a(A) = conj(tr a^(A*) / tr<->(a)), evaluated from the definition.
inline Complex posterior_functional(const Superoperator &a, const Matrix &m) {
    return std::conj(trace(apply(invol_ud(a), m.adjoint())) / tr_lr(a));
}

/// State of an instrument given that the outcome fell in `event`; the same
/// as the state of the summed operation.
inline DensityMatrix state_of_instrument(const Instrument &inst, const OutcomeEvent &event,
                                         StateDirection direction,
                                         double tol = kDefaultTol) {
    if (event.labels.empty()) {
        throw ZeroCondition("empty outcome event");
    }
    const Superoperator a = event_sum(inst, event);
    return direction == StateDirection::Prior ? state_prior(a, tol) : state_posterior(a, tol);
}

/// M = sum M_k* M_k = a^(I) and M' = sum M_k M_k* = a(I). Then
/// P<-(a|b) = tr[rho<-_b M] and P->(a|b) = tr[rho->_b M'].
struct EffectPair {
    Effect m;
    Effect m_prime;
};

inline EffectPair effects_of(const Superoperator &a, double tol = kDefaultTol) {
    require_operation(a, tol, "argument");
    const Matrix id = identity(a.dim());
    const Matrix m = apply(invol_ud(a), id);
    const Matrix mp = apply(a, id);
    return {Effect(0.5 * (m + m.adjoint()), tol), Effect(0.5 * (mp + mp.adjoint()), tol)};
}

} // namespace retroop
