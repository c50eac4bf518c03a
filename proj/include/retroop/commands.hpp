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
 * Command dispatch for scenario tasks and the command-line tool. A command
 * is a JSON object; every report carries the tolerance it used and the
 * residuals of any identity it checked.
 *
 *   {"command": "check",    "op": name}
 *   {"command": "kraus",    "op": name}
 *   {"command": "prob",     "mode": "pred"|"retro"|"prior", "a": name, "b": name}
 *   {"command": "bayes",    "resolution": instrument-name | [op names], "b": name}
 *   {"command": "reverse",  "op": name, "given": name (optional)}
 *   {"command": "state",    "of": op-or-instrument, "direction": "prior"|"posterior",
 *                           "outcomes": [labels] (instruments only, default all)}
 *   {"command": "simulate", "trials": n, "seed": s, "threads": k (all optional)}
 */

#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "bayes.hpp"
#include "errors.hpp"
#include "instrument.hpp"
#include "scenario.hpp"
#include "sim.hpp"
#include "states.hpp"
#include "superop.hpp"

namespace retroop {

struct RunOptions {
    double tol = kDefaultTol;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    unsigned threads = 1;
};

/// Twelve significant digits.
inline std::string decimal12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline Json probability_json(double v) { return Json{{"value", v}, {"decimal", decimal12(v)}}; }

inline std::string string_field(const Json &cmd, const char *key) {
    if (!cmd.contains(key) || !cmd.at(key).is_string()) {
        throw ValidationError(std::string("command needs string field '") + key + "'");
    }
    return cmd.at(key).get<std::string>();
}

inline Json class_json(const OperationClass &c) {
    return Json{{"positive", c.positive},       {"cp", c.cp},
                {"sub_unital", c.sub_unital},   {"sub_tracial", c.sub_tracial},
                {"operation", c.operation},     {"trivial", c.trivial}};
}

inline Json run_check(const Scenario &sc, const Json &cmd, double tol) {
    const std::string name = string_field(cmd, "op");
    const Superoperator &a = sc.operation(name);
    const OperationClass c = classify(a, tol);
    const Matrix id = identity(a.dim());
    Json residuals;
    residuals["unital_deviation"] = op_norm(apply(a, id) - id);
    residuals["tracial_deviation"] = op_norm(apply(invol_ud(a), id) - id);
    if (c.cp) {
        residuals["kraus_reconstruction"] = max_abs_diff(from_kraus(extract_kraus(a, tol)), a);
    }
    return Json{{"op", name}, {"class", class_json(c)}, {"residuals", residuals}};
}

inline Json run_kraus(const Scenario &sc, const Json &cmd, double tol) {
    const std::string name = string_field(cmd, "op");
    const Superoperator &a = sc.operation(name);
    const KrausSet ks = extract_kraus(a, tol);
    Json ops = Json::array();
    for (const auto &m : ks.kraus) {
        ops.push_back(matrix_to_json(m));
    }
    return Json{{"op", name},
                {"count", ks.kraus.size()},
                {"kraus", ops},
                {"residuals", {{"reconstruction", max_abs_diff(from_kraus(ks), a)}}}};
}

inline Json run_prob(const Scenario &sc, const Json &cmd, double tol) {
    const std::string mode = string_field(cmd, "mode");
    const std::string a_name = string_field(cmd, "a");
    const Superoperator &a = sc.operation(a_name);
    Json out{{"mode", mode}, {"a", a_name}};
    if (mode == "prior") {
        const double p = p_prior(a, tol);
        out["probability"] = probability_json(p);
        out["residuals"] = {{"reversal", std::abs(p - p_prior(invol_ud(a), tol).value())}};
        return out;
    }
    const std::string b_name = string_field(cmd, "b");
    const Superoperator &b = sc.operation(b_name);
    out["b"] = b_name;
    const EffectPair eff = effects_of(a, tol);
    if (mode == "pred") {
        const double p = p_pred(a, b, tol);
        out["probability"] = probability_json(p);
        const double bridge = state_posterior(b, tol).expectation(eff.m.matrix()).real();
        out["residuals"] = {{"effect_bridge", std::abs(p - bridge)},
                            {"time_reversal", std::abs(p - p_retro(invol_ud(a), invol_ud(b), tol).value())}};
    } else if (mode == "retro") {
        const double p = p_retro(a, b, tol);
        out["probability"] = probability_json(p);
        const double bridge = state_prior(b, tol).expectation(eff.m_prime.matrix()).real();
        out["residuals"] = {{"effect_bridge", std::abs(p - bridge)},
                            {"time_reversal", std::abs(p - p_pred(invol_ud(a), invol_ud(b), tol).value())}};
    } else {
        throw ValidationError("prob mode must be 'pred', 'retro' or 'prior'");
    }
    return out;
}

inline Json run_bayes(const Scenario &sc, const Json &cmd, double tol) {
    std::vector<std::string> names;
    std::vector<Superoperator> ops;
    const Json &res = cmd.contains("resolution") ? cmd.at("resolution") : Json();
    if (res.is_string()) {
        const Instrument &inst = sc.instrument(res.get<std::string>());
        names = inst.outcomes();
        ops = inst.components();
    } else if (res.is_array()) {
        for (const auto &n : res) {
            names.push_back(n.get<std::string>());
            ops.push_back(sc.operation(names.back()));
        }
    } else {
        throw ValidationError("bayes needs 'resolution' (instrument name or list of operations)");
    }
    const std::string b_name = string_field(cmd, "b");
    const Superoperator &b = sc.operation(b_name);
    Json rows = Json::array();
    double worst = 0.0;
    for (std::size_t j = 0; j < ops.size(); ++j) {
        const double retro = bayes_retrodict(ops, b, j, tol);
        const double retro_direct = p_retro(ops[j], b, tol);
        const double pred = bayes_predict(ops, b, j, tol);
        const double pred_direct = p_pred(ops[j], b, tol);
        worst = std::max({worst, std::abs(retro - retro_direct), std::abs(pred - pred_direct)});
        rows.push_back({{"member", names[j]},
                        {"retrodict", probability_json(retro)},
                        {"retrodict_direct", retro_direct},
                        {"predict", probability_json(pred)},
                        {"predict_direct", pred_direct},
                        {"residuals",
                         {{"retrodict", std::abs(retro - retro_direct)},
                          {"predict", std::abs(pred - pred_direct)}}}});
    }
    return Json{{"b", b_name}, {"members", rows}, {"residuals", {{"max", worst}}}};
}

inline Json run_reverse(const Scenario &sc, const Json &cmd, double tol) {
    const std::string name = string_field(cmd, "op");
    const Superoperator &a = sc.operation(name);
    const Superoperator r = time_reverse(a, tol);
    Json out{{"op", name},
             {"reversed", {{"tensor", matrix_to_json(r.tensor())}}},
             {"class", class_json(classify(r, tol))}};
    Json residuals{{"prior", std::abs(p_prior(a, tol).value() - p_prior(r, tol).value())},
                   {"involution", max_abs_diff(invol_ud(r), a)}};
    if (cmd.contains("given")) {
        const std::string b_name = string_field(cmd, "given");
        const Superoperator &b = sc.operation(b_name);
        const Superoperator rb = time_reverse(b, tol);
        const double pred = p_pred(a, b, tol);
        const double retro = p_retro(a, b, tol);
        const double rev_retro = p_retro(r, rb, tol);
        const double rev_pred = p_pred(r, rb, tol);
        out["given"] = b_name;
        out["values"] = {{"pred", probability_json(pred)},
                         {"retro", probability_json(retro)},
                         {"reversed_retro", probability_json(rev_retro)},
                         {"reversed_pred", probability_json(rev_pred)}};
        residuals["pred_vs_reversed_retro"] = std::abs(pred - rev_retro);
        residuals["retro_vs_reversed_pred"] = std::abs(retro - rev_pred);
    }
    out["residuals"] = residuals;
    return out;
}

inline Json run_state(const Scenario &sc, const Json &cmd, double tol) {
    const std::string of = string_field(cmd, "of");
    const std::string dir = cmd.value("direction", std::string("prior"));
    if (dir != "prior" && dir != "posterior") {
        throw ValidationError("state direction must be 'prior' or 'posterior'");
    }
    const StateDirection d = dir == "prior" ? StateDirection::Prior : StateDirection::Posterior;
    Json out{{"of", of}, {"direction", dir}};
    std::optional<DensityMatrix> rho;
    if (sc.instruments.count(of)) {
        const Instrument &inst = sc.instrument(of);
        OutcomeEvent ev = all_outcomes(inst);
        if (cmd.contains("outcomes")) {
            ev.labels = cmd.at("outcomes").get<std::vector<std::string>>();
        }
        out["outcomes"] = ev.labels;
        rho = state_of_instrument(inst, ev, d, tol);
    } else {
        const Superoperator &a = sc.operation(of);
        rho = d == StateDirection::Prior ? state_prior(a, tol) : state_posterior(a, tol);
    }
    const RealVector ev = rho->spectrum();
    out["density"] = matrix_to_json(rho->matrix());
    out["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
    out["purity"] = rho->purity();
    out["residuals"] = {{"trace", std::abs(rho->matrix().trace() - Complex(1.0))}};
    return out;
}

inline Json freq_json(const SimulationQuery &q, const FreqReport &r) {
    return Json{{"condition", {{"step", q.condition.step}, {"outcome", q.condition.outcome}}},
                {"target", {{"step", q.target.step}, {"outcome", q.target.outcome}}},
                {"direction", to_string(r.direction)},
                {"trials", r.trials},
                {"condition_hits", r.condition_hits},
                {"joint_hits", r.joint_hits},
                {"empirical", r.empirical},
                {"exact", r.exact},
                {"exact_decimal", decimal12(r.exact)},
                {"abs_err", r.abs_err},
                {"std_err", r.std_err},
                {"sigmas", r.std_err > 0.0 ? r.abs_err / r.std_err : 0.0}};
}

inline Json run_simulate(const Scenario &sc, const Json &cmd, const RunOptions &opt) {
    if (!sc.simulation) {
        throw ValidationError("scenario has no 'simulation' block");
    }
    const SimulationSpec &spec = *sc.simulation;
    const std::uint64_t trials = opt.trials.value_or(cmd.value("trials", spec.trials));
    const std::uint64_t seed = opt.seed.value_or(cmd.value("seed", spec.seed));
    const unsigned threads = std::max(opt.threads, cmd.value("threads", 1u));

    std::vector<NamedInstrument> seq;
    for (const auto &n : spec.sequence) {
        seq.push_back({n, sc.instrument(n)});
    }
    DensityMatrix prior = spec.prior ? DensityMatrix(*spec.prior) : DensityMatrix::maximally_mixed(sc.dim);
    const TrajectorySampler sampler(std::move(seq), std::move(prior), opt.tol);

    Json reports = Json::array();
    for (const auto &q : spec.queries) {
        reports.push_back(freq_json(q, estimate(sampler, q.condition, q.target, trials, seed, threads, opt.tol)));
    }
    Json first;
    for (const auto &[inst, outcome] : sampler.sample(seed, 0).steps) {
        first.push_back({{"instrument", inst}, {"outcome", outcome}});
    }
    return Json{{"sequence", spec.sequence},
                {"trials", trials},
                {"seed", seed},
                {"first_trajectory", first},
                {"reports", reports}};
}

} // namespace detail

/// Runs one command object against a validated scenario.
inline Json run_command(const Scenario &sc, const Json &cmd, const RunOptions &opt = {}) {
    const std::string name = detail::string_field(cmd, "command");
    Json body;
    if (name == "check") {
        body = detail::run_check(sc, cmd, opt.tol);
    } else if (name == "kraus") {
        body = detail::run_kraus(sc, cmd, opt.tol);
    } else if (name == "prob") {
        body = detail::run_prob(sc, cmd, opt.tol);
    } else if (name == "bayes") {
        body = detail::run_bayes(sc, cmd, opt.tol);
    } else if (name == "reverse") {
        body = detail::run_reverse(sc, cmd, opt.tol);
    } else if (name == "state") {
        body = detail::run_state(sc, cmd, opt.tol);
    } else if (name == "simulate") {
        body = detail::run_simulate(sc, cmd, opt);
    } else {
        throw ValidationError("unknown command '" + name + "'");
    }
    Json out{{"command", name}, {"tolerance", opt.tol}};
    for (auto it = body.begin(); it != body.end(); ++it) {
        out[it.key()] = it.value();
    }
    return out;
}

/// Runs every task of the scenario in order.
inline Json run_tasks(const Scenario &sc, const RunOptions &opt = {}) {
    Json out = Json::array();
    for (const auto &t : sc.tasks) {
        out.push_back(run_command(sc, t, opt));
    }
    return out;
}

} // namespace retroop
