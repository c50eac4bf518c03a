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
 * Scenario files: JSON documents naming matrices, operations and
 * instruments over one dimension, plus a list of command tasks and an
 * optional simulation block.
 *
 * Complex scalars are [re, im] pairs (a bare number is read as real);
 * matrices are row-major nested arrays. Operations are given as
 * {"kraus": [...]}, {"tensor": ...} or {"builder": ...}; instruments as
 * {"outcomes": {label: operation-or-name, ...}}.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "instrument.hpp"
#include "matcore.hpp"
#include "sim.hpp"
#include "states.hpp"
#include "superop.hpp"

namespace retroop {

using Json = nlohmann::ordered_json;

struct SimulationQuery {
    StepOutcome condition;
    StepOutcome target;
};

struct SimulationSpec {
    std::vector<std::string> sequence;
    std::optional<Matrix> prior; // maximally mixed when absent
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::vector<SimulationQuery> queries;
};

struct Scenario {
    Index dim = 0;
    /// Definition names in file order.
    std::vector<std::string> order;
    std::map<std::string, Matrix> matrices;
    std::map<std::string, Superoperator> operations;
    std::map<std::string, OperationClass> classes;
    std::map<std::string, Instrument> instruments;
    /// Each task is a command object as accepted by run_command.
    std::vector<Json> tasks;
    std::optional<SimulationSpec> simulation;

    const Superoperator &operation(const std::string &name) const {
        auto it = operations.find(name);
        if (it == operations.end()) {
            throw ValidationError("no operation named '" + name + "'");
        }
        return it->second;
    }

    const Instrument &instrument(const std::string &name) const {
        auto it = instruments.find(name);
        if (it == instruments.end()) {
            throw ValidationError("no instrument named '" + name + "'");
        }
        return it->second;
    }
};

// ---------------------------------------------------------------------------
// Scalars and matrices
// ---------------------------------------------------------------------------

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json &j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ValidationError("complex scalar must be [re, im] or a number, got " + j.dump());
}

inline Json matrix_to_json(const Matrix &m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            row.push_back(complex_to_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json &j) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError("matrix must be a non-empty array of rows");
    }
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array()) {
        throw ValidationError("matrix rows must be arrays");
    }
    const auto cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw ValidationError("matrix rows have unequal lengths");
        }
        for (Index c = 0; c < cols; ++c) {
            m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
        }
    }
    if (!all_finite(m)) {
        throw ValidationError("matrix has non-finite entries");
    }
    return m;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class ScenarioBuilder {
  public:
    ScenarioBuilder(const Json &defs, Index dim, double tol)
        : defs_(defs), dim_(dim), tol_(tol) {}

    void build_all(Scenario &sc) {
        for (auto it = defs_.begin(); it != defs_.end(); ++it) {
            sc.order.push_back(it.key());
            resolve(it.key());
        }
        sc.matrices = std::move(matrices_);
        sc.operations = std::move(operations_);
        sc.instruments = std::move(instruments_);
        for (const auto &[name, op] : sc.operations) {
            try {
                sc.classes.emplace(name, classify(op, tol_));
            } catch (const InputError &e) {
                throw ValidationError("definition '" + name + "': " + e.what());
            }
        }
    }

  private:
    enum class Kind { Matrix, Operation, Instrument };

    Kind resolve(const std::string &name) {
        if (matrices_.count(name)) return Kind::Matrix;
        if (operations_.count(name)) return Kind::Operation;
        if (instruments_.count(name)) return Kind::Instrument;
        if (!defs_.contains(name)) {
            throw ValidationError("reference to undefined name '" + name + "'");
        }
        if (!in_progress_.insert(name).second) {
            throw ValidationError("definition '" + name + "' refers to itself");
        }
        const Json &spec = defs_.at(name);
        Kind kind;
        try {
            if (!spec.is_object()) {
                throw ValidationError("definition must be an object");
            }
            if (spec.contains("matrix") && !spec.contains("builder")) {
                Matrix m = matrix_from_json(spec.at("matrix"));
                check_dim(m, "matrix");
                matrices_.emplace(name, std::move(m));
                kind = Kind::Matrix;
            } else if (spec.contains("outcomes")) {
                instruments_.emplace(name, instrument_of(spec));
                kind = Kind::Instrument;
            } else {
                operations_.emplace(name, operation_of(spec));
                kind = Kind::Operation;
            }
        } catch (const ValidationError &e) {
            in_progress_.erase(name);
            if (std::string(e.what()).rfind("ValidationError: definition '", 0) == 0) {
                throw;
            }
            throw ValidationError("definition '" + name + "': " + e.what());
        } catch (const InputError &e) {
            in_progress_.erase(name);
            throw ValidationError("definition '" + name + "': " + e.what());
        }
        in_progress_.erase(name);
        return kind;
    }

    void check_dim(const Matrix &m, const char *what) const {
        if (m.rows() != dim_ || m.cols() != dim_) {
            throw ValidationError(std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()) + ", scenario dimension is " +
                                  std::to_string(dim_));
        }
    }

    Matrix matrix_ref(const Json &j) {
        if (j.is_string()) {
            const std::string ref = j.get<std::string>();
            if (resolve(ref) != Kind::Matrix) {
                throw ValidationError("'" + ref + "' is not a matrix");
            }
            return matrices_.at(ref);
        }
        Matrix m = matrix_from_json(j);
        check_dim(m, "matrix");
        return m;
    }

    Superoperator operation_ref(const Json &j) {
        if (j.is_string()) {
            const std::string ref = j.get<std::string>();
            if (resolve(ref) != Kind::Operation) {
                throw ValidationError("'" + ref + "' is not an operation");
            }
            return operations_.at(ref);
        }
        return operation_of(j);
    }

    std::vector<Superoperator> operation_list(const Json &j) {
        if (!j.is_array() || j.empty()) {
            throw ValidationError("'of' must be a non-empty array");
        }
        std::vector<Superoperator> out;
        for (const auto &e : j) {
            out.push_back(operation_ref(e));
        }
        return out;
    }

    Superoperator operation_of(const Json &spec) {
        if (!spec.is_object()) {
            throw ValidationError("operation spec must be an object");
        }
        if (spec.contains("kraus")) {
            const Json &list = spec.at("kraus");
            if (!list.is_array() || list.empty()) {
                throw ValidationError("'kraus' must be a non-empty array");
            }
            std::vector<Matrix> ks;
            for (const auto &m : list) {
                Matrix k = matrix_ref(m);
                if (k.rows() != k.cols()) {
                    throw ValidationError("Kraus operator is not square");
                }
                ks.push_back(std::move(k));
            }
            return from_kraus(dim_, std::move(ks));
        }
        if (spec.contains("tensor")) {
            Matrix t = matrix_from_json(spec.at("tensor"));
            if (t.rows() != dim_ * dim_ || t.cols() != dim_ * dim_) {
                throw ValidationError("tensor must be " + std::to_string(dim_ * dim_) + "x" +
                                      std::to_string(dim_ * dim_));
            }
            return Superoperator(std::move(t));
        }
        if (!spec.contains("builder")) {
            throw ValidationError("operation needs 'kraus', 'tensor' or 'builder'");
        }
        const std::string b = spec.at("builder").get<std::string>();
        auto need = [&](const char *key) -> const Json & {
            if (!spec.contains(key)) {
                throw ValidationError("builder '" + b + "' needs '" + key + "'");
            }
            return spec.at(key);
        };
        if (b == "unit") return unit(dim_);
        if (b == "zero") return zero(dim_);
        if (b == "projector") return projecting(matrix_ref(need("matrix")), tol_);
        if (b == "unitary") return unitary(matrix_ref(need("matrix")), tol_);
        if (b == "unitary_inv") return unitary_inv(matrix_ref(need("matrix")), tol_);
        if (b == "sum") return sum(operation_list(need("of")));
        if (b == "compose") {
            // ["a", "b", "c"] is a(b(c(.))), i.e. c acts first
            const auto ops = operation_list(need("of"));
            Superoperator acc = ops.back();
            for (auto it = ops.rbegin() + 1; it != ops.rend(); ++it) {
                acc = compose(*it, acc);
            }
            return acc;
        }
        if (b == "scale") {
            const Json &f = need("factor");
            if (!f.is_number()) {
                throw ValidationError("'factor' must be a number");
            }
            return scale(operation_ref(need("of")), f.get<double>());
        }
        if (b == "reverse") return invol_ud(operation_ref(need("of")));
        throw ValidationError("unknown builder '" + b + "'");
    }

    Instrument instrument_of(const Json &spec) {
        const Json &outs = spec.at("outcomes");
        if (!outs.is_object() || outs.empty()) {
            throw ValidationError("'outcomes' must be a non-empty object");
        }
        std::vector<std::pair<std::string, Superoperator>> ops;
        for (auto it = outs.begin(); it != outs.end(); ++it) {
            ops.emplace_back(it.key(), operation_ref(it.value()));
        }
        return make_instrument(std::move(ops), tol_);
    }

    const Json &defs_;
    Index dim_;
    double tol_;
    std::set<std::string> in_progress_;
    std::map<std::string, Matrix> matrices_;
    std::map<std::string, Superoperator> operations_;
    std::map<std::string, Instrument> instruments_;
};

inline StepOutcome step_outcome_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("step") || !j.contains("outcome") ||
        !j.at("step").is_number_unsigned() || !j.at("outcome").is_string()) {
        throw ValidationError("expected {\"step\": n, \"outcome\": label}, got " + j.dump());
    }
    return {j.at("step").get<std::size_t>(), j.at("outcome").get<std::string>()};
}

inline SimulationSpec simulation_from_json(const Json &j, const Scenario &sc) {
    if (!j.is_object() || !j.contains("sequence") || !j.at("sequence").is_array()) {
        throw ValidationError("simulation needs a 'sequence' array");
    }
    SimulationSpec spec;
    for (const auto &s : j.at("sequence")) {
        if (!s.is_string()) {
            throw ValidationError("simulation sequence entries must be instrument names");
        }
        spec.sequence.push_back(s.get<std::string>());
        sc.instrument(spec.sequence.back());
    }
    if (spec.sequence.empty()) {
        throw ValidationError("simulation sequence is empty");
    }
    if (j.contains("prior")) {
        const Json &p = j.at("prior");
        if (p.is_string()) {
            auto it = sc.matrices.find(p.get<std::string>());
            if (it == sc.matrices.end()) {
                throw ValidationError("simulation prior '" + p.get<std::string>() +
                                      "' is not a matrix");
            }
            spec.prior = it->second;
        } else {
            spec.prior = matrix_from_json(p);
        }
        if (spec.prior->rows() != sc.dim || spec.prior->cols() != sc.dim) {
            throw ValidationError("simulation prior has the wrong dimension");
        }
        DensityMatrix check(*spec.prior);
        (void)check;
    }
    if (j.contains("trials")) spec.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("queries")) {
        for (const auto &q : j.at("queries")) {
            if (!q.is_object() || !q.contains("condition") || !q.contains("target")) {
                throw ValidationError("query needs 'condition' and 'target'");
            }
            spec.queries.push_back(
                {step_outcome_from_json(q.at("condition")), step_outcome_from_json(q.at("target"))});
        }
    }
    return spec;
}

} // namespace detail

/// Parses and validates a scenario document. Every operation is classified
/// and every instrument validated at load.
inline Scenario parse_scenario(const std::string &text, double tol = kDefaultTol) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError("at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    Scenario sc;
    try {
        if (!doc.is_object()) {
            throw ValidationError("scenario must be a JSON object");
        }
        if (!doc.contains("dim") || !doc.at("dim").is_number_integer() ||
            doc.at("dim").get<long long>() < 1) {
            throw ValidationError("'dim' must be a positive integer");
        }
        sc.dim = static_cast<Index>(doc.at("dim").get<long long>());
        const Json defs = doc.value("definitions", Json::object());
        if (!defs.is_object()) {
            throw ValidationError("'definitions' must be an object");
        }
        detail::ScenarioBuilder(defs, sc.dim, tol).build_all(sc);

        const Json tasks = doc.value("tasks", Json::array());
        if (!tasks.is_array()) {
            throw ValidationError("'tasks' must be an array");
        }
        for (const auto &t : tasks) {
            if (!t.is_object() || !t.contains("command") || !t.at("command").is_string()) {
                throw ValidationError("each task needs a 'command' string");
            }
            sc.tasks.push_back(t);
        }
        if (doc.contains("simulation")) {
            sc.simulation = detail::simulation_from_json(doc.at("simulation"), sc);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(e.what());
    } catch (const ValidationError &) {
        throw;
    } catch (const InputError &e) {
        throw ValidationError(e.what());
    }
    return sc;
}

/// Canonical form: matrices as literals, every operation as its tensor,
/// instruments with inline tensors. Parsing the result yields the same
/// scenario.
inline Json serialize(const Scenario &sc) {
    Json doc;
    doc["dim"] = sc.dim;
    Json defs = Json::object();
    auto op_json = [](const Superoperator &a) { return Json{{"tensor", matrix_to_json(a.tensor())}}; };
    for (const auto &name : sc.order) {
        if (auto m = sc.matrices.find(name); m != sc.matrices.end()) {
            defs[name] = Json{{"matrix", matrix_to_json(m->second)}};
        } else if (auto o = sc.operations.find(name); o != sc.operations.end()) {
            defs[name] = op_json(o->second);
        } else if (auto i = sc.instruments.find(name); i != sc.instruments.end()) {
            Json outs = Json::object();
            for (std::size_t k = 0; k < i->second.size(); ++k) {
                outs[i->second.outcomes()[k]] = op_json(i->second.components()[k]);
            }
            defs[name] = Json{{"outcomes", std::move(outs)}};
        }
    }
    doc["definitions"] = std::move(defs);
    doc["tasks"] = Json(sc.tasks);
    if (sc.simulation) {
        const SimulationSpec &s = *sc.simulation;
        Json sim;
        sim["sequence"] = s.sequence;
        if (s.prior) {
            sim["prior"] = matrix_to_json(*s.prior);
        }
        sim["trials"] = s.trials;
        sim["seed"] = s.seed;
        Json qs = Json::array();
        for (const auto &q : s.queries) {
            qs.push_back({{"condition", {{"step", q.condition.step}, {"outcome", q.condition.outcome}}},
                          {"target", {{"step", q.target.step}, {"outcome", q.target.outcome}}}});
        }
        sim["queries"] = std::move(qs);
        doc["simulation"] = std::move(sim);
    }
    return doc;
}

} // namespace retroop
