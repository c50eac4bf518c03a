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
 * Bayesian probabilities over operations.
 *
 * With tr<->(a) = tr a(I):
 *
 *   predictive    P<-(a|b) = tr<->(ab) / tr<->(b)   a fires right after b fired
 *   retrodictive  P->(a|b) = tr<->(ba) / tr<->(b)   a fired right before b fires
 *   prior         P(a)     = tr<->(a) / nu
 *
 * where ab is the composed map A -> a(b(A)).
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "superop.hpp"

namespace retroop {

class Probability {
  public:
    /// Accepts only values in [0, 1].
    explicit Probability(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw InvariantViolation("probability " + std::to_string(value) +
                                     " outside [0, 1]");
        }
    }
    double value() const { return value_; }
    operator double() const { return value_; }

  private:
    double value_;
};

/// Largest resolution size accepted by the Bayes-type identities. They need
/// a genuinely finite sum.
inline constexpr std::size_t kMaxResolutionSize = 10000;

namespace detail {

/// Real part of a ratio that should be a probability. Values within tol of
/// [0, 1] are clamped; anything farther out, or a non-negligible imaginary
/// part, signals a bug.
inline Probability to_probability(Complex z, double tol, const char *what) {
    if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z.real()))) {
        throw InvariantViolation(std::string(what) + " has imaginary part " +
                                 std::to_string(z.imag()));
    }
    double r = z.real();
    if (r < -tol || r > 1.0 + tol) {
        throw InvariantViolation(std::string(what) + " = " + std::to_string(r) +
                                 " is outside [0, 1]");
    }
    r = std::min(1.0, std::max(0.0, r));
    return Probability(r);
}

inline double nonzero_weight(const Superoperator &b, double tol, const char *what) {
    const double w = tr_lr(b).real();
    if (w <= tol) {
        throw ZeroCondition(std::string(what) + " has tr<->(b) = " +
                            std::to_string(w) + " <= tol");
    }
    return w;
}

} // namespace detail

inline Probability p_pred(const Superoperator &a, const Superoperator &b,
                          double tol = kDefaultTol) {
    require_operation(a, tol, "event");
    require_operation(b, tol, "condition");
    const double wb = detail::nonzero_weight(b, tol, "condition");
    return detail::to_probability(tr_lr(compose(a, b)) / wb, tol, "P<-(a|b)");
}

inline Probability p_retro(const Superoperator &a, const Superoperator &b,
                           double tol = kDefaultTol) {
    require_operation(a, tol, "event");
    require_operation(b, tol, "condition");
    const double wb = detail::nonzero_weight(b, tol, "condition");
    return detail::to_probability(tr_lr(compose(b, a)) / wb, tol, "P->(a|b)");
}

inline Probability p_prior(const Superoperator &a, double tol = kDefaultTol) {
    require_operation(a, tol, "event");
    return detail::to_probability(tr_lr(a) / static_cast<double>(a.dim()), tol, "P(a)");
}

namespace detail {

/// Validates a resolution {a_k} for the Bayes-type identities. The sum must
/// be trivial (unital and trace-preserving); the unit operation is the
/// special case. The identities only use tr<->((sum a_k) b) = tr<->(b) and
/// tr<->(b (sum a_k)) = tr<->(b), which hold for any trivial sum.
inline void require_resolution(const std::vector<Superoperator> &ops,
                               std::size_t j, double tol) {
    if (ops.empty() || ops.size() > kMaxResolutionSize) {
        throw NotResolution("resolution size " + std::to_string(ops.size()) +
                            " not in [1, " + std::to_string(kMaxResolutionSize) + "]");
    }
    if (j >= ops.size()) {
        throw ValidationError("index " + std::to_string(j) +
                              " outside resolution of size " +
                              std::to_string(ops.size()));
    }
    for (std::size_t k = 0; k < ops.size(); ++k) {
        require_operation(ops[k], tol, "resolution member " + std::to_string(k));
        nonzero_weight(ops[k], tol, "resolution member");
    }
    if (!classify(sum(ops), std::max(tol, kSumTol)).trivial) {
        throw NotResolution("resolution members do not sum to a trivial operation");
    }
}

} // namespace detail

/// P->(a_j|b) = P<-(b|a_j) P(a_j) / sum_k P<-(b|a_k) P(a_k).
inline Probability bayes_retrodict(const std::vector<Superoperator> &ops,
                                   const Superoperator &b, std::size_t j,
                                   double tol = kDefaultTol) {
    detail::require_resolution(ops, j, tol);
    if (p_prior(b, tol).value() <= tol) {
        throw ZeroCondition("P(b) vanishes");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const double term = p_pred(b, ops[k], tol).value() * p_prior(ops[k], tol).value();
        den += term;
        if (k == j) {
            num = term;
        }
    }
    return detail::to_probability(num / den, tol, "Bayes retrodiction");
}

/// P<-(a_j|b) = P->(b|a_j) P(a_j) / sum_k P->(b|a_k) P(a_k).
inline Probability bayes_predict(const std::vector<Superoperator> &ops,
                                 const Superoperator &b, std::size_t j,
                                 double tol = kDefaultTol) {
    detail::require_resolution(ops, j, tol);
    if (p_prior(b, tol).value() <= tol) {
        throw ZeroCondition("P(b) vanishes");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const double term = p_retro(b, ops[k], tol).value() * p_prior(ops[k], tol).value();
        den += term;
        if (k == j) {
            num = term;
        }
    }
    return detail::to_probability(num / den, tol, "Bayes prediction");
}

/// The adjoint a^ of an operation, read as its time reversal. Operations
/// are closed under it.
inline Superoperator time_reverse(const Superoperator &a, double tol = kDefaultTol) {
    require_operation(a, tol, "argument");
    Superoperator r = invol_ud(a);
    if (!classify(r, tol).operation) {
        throw InvariantViolation("time reversal left the operation class");
    }
    return r;
}

} // namespace retroop
