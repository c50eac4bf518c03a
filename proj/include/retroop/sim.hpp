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
 * Monte Carlo sampling of instrument sequences.
 *
 * Starting from a prior density matrix rho, each step draws outcome x of
 * instrument I with probability tr[I(x)(rho)] = tr[rho I(x)^(I)] and moves
 * to I(x)(rho) / tr[I(x)(rho)]. Conditional frequencies between two steps
 * estimate the predictive (target after condition) or retrodictive (target
 * before condition) probabilities.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "instrument.hpp"
#include "rng.hpp"
#include "states.hpp"
#include "superop.hpp"

namespace retroop {

struct NamedInstrument {
    std::string name;
    Instrument instrument;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> steps; // (instrument, outcome)
};

/// A constraint "step `step` produced outcome `outcome`".
struct StepOutcome {
    std::size_t step = 0;
    std::string outcome;
};

enum class Direction { Predictive, Retrodictive, SameStep };

inline const char *to_string(Direction d) {
    switch (d) {
    case Direction::Predictive:
        return "predictive";
    case Direction::Retrodictive:
        return "retrodictive";
    case Direction::SameStep:
        return "same-step";
    }
    return "?";
}

struct FreqReport {
    std::uint64_t trials = 0;
    std::uint64_t condition_hits = 0;
    std::uint64_t joint_hits = 0;
    double empirical = 0.0;
    double exact = 0.0;
    double abs_err = 0.0;
    /// sqrt(p (1 - p) / n) with p the exact value and n the number of
    /// trajectories that met the condition.
    double std_err = 0.0;
    Direction direction = Direction::Predictive;
};

/// Branch probabilities must sum to one within this at every step.
inline constexpr double kBranchSumTol = 1e-10;
/// Choosing a branch below this probability means the draw is broken.
inline constexpr double kMinBranchProbability = 1e-15;

class TrajectorySampler {
  public:
    TrajectorySampler(std::vector<NamedInstrument> sequence, DensityMatrix prior,
                      double tol = kDefaultTol)
        : sequence_(std::move(sequence)), prior_(std::move(prior)) {
        if (sequence_.empty()) {
            throw ValidationError("empty instrument sequence");
        }
        for (const auto &ni : sequence_) {
            if (ni.instrument.dim() != prior_.dim()) {
                throw DimensionMismatch("instrument '" + ni.name + "' has dimension " +
                                        std::to_string(ni.instrument.dim()) +
                                        ", prior has " + std::to_string(prior_.dim()));
            }
            Step step;
            for (const auto &op : ni.instrument.components()) {
                KrausSet ks = extract_kraus(op, tol);
                step.effects.push_back(kraus_sum_right(ks));
                step.kraus.push_back(std::move(ks.kraus));
            }
            steps_.push_back(std::move(step));
        }
    }

    std::size_t length() const { return sequence_.size(); }
    const std::vector<NamedInstrument> &sequence() const { return sequence_; }
    const DensityMatrix &prior() const { return prior_; }

    /// Outcome index per step for trajectory `index` of run `seed`.
    std::vector<std::size_t> sample_indices(std::uint64_t seed, std::uint64_t index) const {
        CounterRng rng = CounterRng::stream(seed, index);
        Matrix rho = prior_.matrix();
        Matrix next(rho.rows(), rho.cols());
        std::vector<std::size_t> out;
        out.reserve(steps_.size());
        std::vector<double> probs;
        for (const Step &step : steps_) {
            probs.clear();
            double total = 0.0;
            for (const Matrix &e : step.effects) {
                // tr(rho E)
                const double p = rho.cwiseProduct(e.transpose()).sum().real();
                probs.push_back(p);
                total += p;
            }
            if (std::abs(total - 1.0) > kBranchSumTol) {
                throw InvariantViolation("branch probabilities sum to " +
                                         std::to_string(total));
            }
            const double u = rng.uniform() * total;
            std::size_t pick = probs.size();
            double acc = 0.0;
            for (std::size_t k = 0; k < probs.size(); ++k) {
                acc += probs[k];
                if (u < acc) {
                    pick = k;
                    break;
                }
            }
            if (pick == probs.size()) {
                // u rounded past the last partial sum: take the last live branch
                pick = probs.size() - 1;
                while (pick > 0 && probs[pick] <= 0.0) {
                    --pick;
                }
            }
            if (probs[pick] < kMinBranchProbability) {
                throw ZeroProbabilityBranch("drew outcome with probability " +
                                            std::to_string(probs[pick]));
            }
            next.setZero();
            for (const Matrix &m : step.kraus[pick]) {
                next.noalias() += m * rho * m.adjoint();
            }
            rho = next / probs[pick];
            out.push_back(pick);
        }
        return out;
    }

    Trajectory sample(std::uint64_t seed, std::uint64_t index = 0) const {
        Trajectory t{seed, {}};
        const auto picks = sample_indices(seed, index);
        for (std::size_t s = 0; s < picks.size(); ++s) {
            const auto &ni = sequence_[s];
            t.steps.emplace_back(ni.name, ni.instrument.outcomes()[picks[s]]);
        }
        return t;
    }

  private:
    struct Step {
        std::vector<std::vector<Matrix>> kraus; // per outcome
        std::vector<Matrix> effects;            // per outcome, I(x)^(I)
    };

    std::vector<NamedInstrument> sequence_;
    DensityMatrix prior_;
    std::vector<Step> steps_;
};

inline Trajectory sample_sequence(std::vector<NamedInstrument> sequence,
                                  const DensityMatrix &prior, std::uint64_t seed,
                                  double tol = kDefaultTol) {
    return TrajectorySampler(std::move(sequence), prior, tol).sample(seed, 0);
}

namespace detail {

inline std::size_t outcome_index(const NamedInstrument &ni, const std::string &label) {
    const auto &labels = ni.instrument.outcomes();
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw ValidationError("instrument '" + ni.name + "' has no outcome '" + label + "'");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

inline void check_step(const std::vector<NamedInstrument> &seq, const StepOutcome &so) {
    if (so.step >= seq.size()) {
        throw ValidationError("step " + std::to_string(so.step) + " outside sequence of length " +
                              std::to_string(seq.size()));
    }
    outcome_index(seq[so.step], so.outcome);
}

/// tr[(S_last ... S_0)(rho)] where S_s is the constrained component at
/// constrained steps and the full (trivial) sum elsewhere.
inline double sequence_probability(const std::vector<NamedInstrument> &seq,
                                   const DensityMatrix &prior,
                                   const std::vector<StepOutcome> &constraints) {
    std::size_t last = 0;
    for (const auto &c : constraints) {
        last = std::max(last, c.step);
    }
    Matrix rho = prior.matrix();
    for (std::size_t s = 0; s <= last; ++s) {
        const Instrument &inst = seq[s].instrument;
        std::vector<std::string> wanted;
        for (const auto &c : constraints) {
            if (c.step == s) {
                wanted.push_back(c.outcome);
            }
        }
        std::sort(wanted.begin(), wanted.end());
        wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
        if (wanted.size() > 1) {
            return 0.0; // distinct outcomes of one step are exclusive
        }
        const Superoperator op = wanted.empty() ? sum(inst.components()) : inst.at(wanted.front());
        rho = apply(op, rho);
    }
    return rho.trace().real();
}

} // namespace detail

/// Exact conditional probability of `target` given `condition` for the
/// sequence started in `prior`. For adjacent steps and the maximally mixed
/// prior this is P<-_{I,J} (target later) or P->_{I,J} (target earlier).
inline double exact_conditional(const std::vector<NamedInstrument> &seq,
                                const DensityMatrix &prior, const StepOutcome &condition,
                                const StepOutcome &target, double tol = kDefaultTol) {
    detail::check_step(seq, condition);
    detail::check_step(seq, target);
    const double cond = detail::sequence_probability(seq, prior, {condition});
    if (cond <= tol) {
        throw ZeroCondition("condition has probability " + std::to_string(cond));
    }
    const double joint = detail::sequence_probability(seq, prior, {condition, target});
    return detail::to_probability(joint / cond, tol, "exact conditional").value();
}

/**
 * Runs `trials` independent trajectories, trajectory t drawing from stream
 * t of `seed`, and compares the conditional frequency of `target` given
 * `condition` with its exact value. Work is split over `threads` workers;
 * only integer hit counts are merged, so the report does not depend on the
 * thread count.
 */
inline FreqReport estimate(const TrajectorySampler &sampler, const StepOutcome &condition,
                           const StepOutcome &target, std::uint64_t trials, std::uint64_t seed,
                           unsigned threads = 1, double tol = kDefaultTol) {
    if (trials < 1) {
        throw ValidationError("trials must be at least 1");
    }
    const auto &seq = sampler.sequence();
    detail::check_step(seq, condition);
    detail::check_step(seq, target);
    const std::size_t cond_idx = detail::outcome_index(seq[condition.step], condition.outcome);
    const std::size_t targ_idx = detail::outcome_index(seq[target.step], target.outcome);

    threads = std::max(1u, threads);
    const std::uint64_t workers = std::min<std::uint64_t>(threads, trials);
    std::vector<std::uint64_t> cond_hits(workers, 0);
    std::vector<std::uint64_t> joint_hits(workers, 0);
    std::vector<std::exception_ptr> failures(workers);

    auto work = [&](std::uint64_t w) {
        try {
            const std::uint64_t begin = trials * w / workers;
            const std::uint64_t end = trials * (w + 1) / workers;
            for (std::uint64_t t = begin; t < end; ++t) {
                const auto picks = sampler.sample_indices(seed, t);
                if (picks[condition.step] == cond_idx) {
                    ++cond_hits[w];
                    if (picks[target.step] == targ_idx) {
                        ++joint_hits[w];
                    }
                }
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (const auto &f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }

    FreqReport r;
    r.trials = trials;
    for (std::uint64_t w = 0; w < workers; ++w) {
        r.condition_hits += cond_hits[w];
        r.joint_hits += joint_hits[w];
    }
    if (r.condition_hits == 0) {
        throw NoConditionHits("condition step " + std::to_string(condition.step) + " = '" +
                              condition.outcome + "' never occurred in " +
                              std::to_string(trials) + " trials");
    }
    r.direction = target.step > condition.step   ? Direction::Predictive
                  : target.step < condition.step ? Direction::Retrodictive
                                                 : Direction::SameStep;
    r.empirical = static_cast<double>(r.joint_hits) / static_cast<double>(r.condition_hits);
    r.exact = exact_conditional(seq, sampler.prior(), condition, target, tol);
    r.abs_err = std::abs(r.empirical - r.exact);
    r.std_err = std::sqrt(r.exact * (1.0 - r.exact) / static_cast<double>(r.condition_hits));
    return r;
}

} // namespace retroop
