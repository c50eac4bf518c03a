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
 * Finite-outcome instruments: an ordered family of operations, one per
 * outcome label, whose sum is trivial.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bayes.hpp"
#include "errors.hpp"
#include "superop.hpp"

namespace retroop {

class Instrument {
  public:
    Index dim() const { return ops_.front().dim(); }
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string> &outcomes() const { return labels_; }
    const std::vector<Superoperator> &components() const { return ops_; }

    bool contains(const std::string &label) const { return index_.count(label) != 0; }

    const Superoperator &at(const std::string &label) const {
        auto it = index_.find(label);
        if (it == index_.end()) {
            throw ValidationError("unknown outcome '" + label + "'");
        }
        return ops_[it->second];
    }

  private:
    friend Instrument make_instrument(std::vector<std::pair<std::string, Superoperator>>,
                                      double);
    Instrument() = default;

    std::vector<std::string> labels_;
    std::vector<Superoperator> ops_;
    std::map<std::string, std::size_t> index_;
};

/// A set of outcome labels. Duplicates collapse.
struct OutcomeEvent {
    std::vector<std::string> labels;
};

/// Validates that every component is an operation and that their sum s is
/// trivial, with ||s(I) - I|| and ||s^(I) - I|| at most max(tol, kSumTol).
inline Instrument make_instrument(std::vector<std::pair<std::string, Superoperator>> ops,
                                  double tol = kDefaultTol) {
    if (ops.empty()) {
        throw ValidationError("instrument needs at least one outcome");
    }
    Instrument inst;
    const Index dim = ops.front().second.dim();
    for (auto &[label, op] : ops) {
        if (op.dim() != dim) {
            throw DimensionMismatch("outcome '" + label + "' has dimension " +
                                    std::to_string(op.dim()) + ", expected " +
                                    std::to_string(dim));
        }
        if (!inst.index_.emplace(label, inst.labels_.size()).second) {
            throw ValidationError("duplicate outcome label '" + label + "'");
        }
        if (!classify(op, tol).operation) {
            throw NotOperation("outcome '" + label + "'");
        }
        inst.labels_.push_back(label);
        inst.ops_.push_back(std::move(op));
    }

    const Superoperator total = sum(inst.ops_);
    const double sum_tol = std::max(tol, kSumTol);
    const Matrix id = identity(dim);
    const double out_dev = op_norm(apply(total, id) - id);
    const double back_dev = op_norm(apply(invol_ud(total), id) - id);
    if (out_dev > sum_tol || back_dev > sum_tol || !classify(total, sum_tol).trivial) {
        throw NotTrivialSum("||a(I) - I|| = " + std::to_string(out_dev) +
                            ", ||a^(I) - I|| = " + std::to_string(back_dev));
    }
    return inst;
}

/// (IJ)(x, z) = I(x) J(z), labelled "x,z" in row-major outcome order.
inline Instrument product(const Instrument &first, const Instrument &second,
                          double tol = kDefaultTol) {
    if (first.dim() != second.dim()) {
        throw DimensionMismatch("instrument product across dimensions " +
                                std::to_string(first.dim()) + " and " +
                                std::to_string(second.dim()));
    }
    std::vector<std::pair<std::string, Superoperator>> ops;
    ops.reserve(first.size() * second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        for (std::size_t j = 0; j < second.size(); ++j) {
            ops.emplace_back(first.outcomes()[i] + "," + second.outcomes()[j],
                             compose(first.components()[i], second.components()[j]));
        }
    }
    return make_instrument(std::move(ops), tol);
}

/// The instrument with every component replaced by its time reversal.
inline Instrument reversed(const Instrument &inst, double tol = kDefaultTol) {
    std::vector<std::pair<std::string, Superoperator>> ops;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        ops.emplace_back(inst.outcomes()[i], invol_ud(inst.components()[i]));
    }
    return make_instrument(std::move(ops), tol);
}

/// Every outcome of the instrument, in order.
inline OutcomeEvent all_outcomes(const Instrument &inst) { return {inst.outcomes()}; }

/// Labels "x,z" for every x in `a` and z in `b`.
inline OutcomeEvent cartesian(const OutcomeEvent &a, const OutcomeEvent &b) {
    OutcomeEvent out;
    for (const auto &x : a.labels) {
        for (const auto &z : b.labels) {
            out.labels.push_back(x + "," + z);
        }
    }
    return out;
}

/// sum over alpha in A of I(alpha). The empty event gives the zero map.
inline Superoperator event_sum(const Instrument &inst, const OutcomeEvent &event) {
    std::vector<std::string> labels = event.labels;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    Superoperator acc = zero(inst.dim());
    for (const auto &label : labels) {
        acc = add(acc, inst.at(label));
    }
    return acc;
}

inline Probability p_inst_pred(const Instrument &inst, const OutcomeEvent &event,
                               const Superoperator &a, double tol = kDefaultTol) {
    return p_pred(event_sum(inst, event), a, tol);
}

inline Probability p_inst_retro(const Instrument &inst, const OutcomeEvent &event,
                                const Superoperator &a, double tol = kDefaultTol) {
    return p_retro(event_sum(inst, event), a, tol);
}

inline Probability p_inst(const Instrument &inst, const OutcomeEvent &event,
                          double tol = kDefaultTol) {
    return p_prior(event_sum(inst, event), tol);
}

namespace detail {
inline double condition_weight(const Instrument &j_inst, const OutcomeEvent &b, double tol) {
    const double pb = p_inst(j_inst, b, tol).value();
    if (pb <= tol) {
        throw ZeroCondition("P_J(B) = " + std::to_string(pb) + " <= tol");
    }
    return pb;
}
} // namespace detail

/// P<-_{I,J}(A|B) = P_{IJ}(A x B) / P_J(B): I observed right after J.
inline Probability p_cond_pred(const Instrument &i_inst, const Instrument &j_inst,
                               const OutcomeEvent &a, const OutcomeEvent &b,
                               double tol = kDefaultTol) {
    const double pb = detail::condition_weight(j_inst, b, tol);
    const double joint = p_inst(product(i_inst, j_inst, tol), cartesian(a, b), tol).value();
    return detail::to_probability(joint / pb, tol, "P<-_{I,J}(A|B)");
}

/// P->_{I,J}(A|B) = P_{JI}(B x A) / P_J(B): I observed right before J.
inline Probability p_cond_retro(const Instrument &i_inst, const Instrument &j_inst,
                                const OutcomeEvent &a, const OutcomeEvent &b,
                                double tol = kDefaultTol) {
    const double pb = detail::condition_weight(j_inst, b, tol);
    const double joint = p_inst(product(j_inst, i_inst, tol), cartesian(b, a), tol).value();
    return detail::to_probability(joint / pb, tol, "P->_{I,J}(A|B)");
}

} // namespace retroop
