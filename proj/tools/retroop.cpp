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

// retroop: command-line front end for scenario files.
//
//   retroop <command> [args] --scenario FILE [--tol T] [--seed S]
//           [--trials N] [--threads K] [--json]
//
// Exit codes: 0 success, 2 invalid input, 3 numerical invariant violation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "retroop/commands.hpp"
#include "retroop/errors.hpp"
#include "retroop/scenario.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw retroop::ValidationError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double resolve_tolerance(const CLI::Option *tol_opt, double tol_flag) {
    if (tol_opt->count() > 0) {
        return tol_flag;
    }
    if (const char *env = std::getenv("RETRO_OP_TOL")) {
        char *end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0)) {
            throw retroop::ValidationError(std::string("RETRO_OP_TOL is not a positive real: ") + env);
        }
        return v;
    }
    return retroop::kDefaultTol;
}

void print_simulation_table(const retroop::Json &report) {
    std::printf("%-12s %-12s %-13s %10s %14s %14s %12s %7s\n", "condition", "target", "direction",
                "hits", "empirical", "exact", "std_err", "sigmas");
    for (const auto &r : report.at("reports")) {
        const std::string cond = std::to_string(r["condition"]["step"].get<std::size_t>()) + "=" +
                                 r["condition"]["outcome"].get<std::string>();
        const std::string targ = std::to_string(r["target"]["step"].get<std::size_t>()) + "=" +
                                 r["target"]["outcome"].get<std::string>();
        std::printf("%-12s %-12s %-13s %10llu %14.12f %14.12f %12.3e %7.2f\n", cond.c_str(),
                    targ.c_str(), r["direction"].get<std::string>().c_str(),
                    static_cast<unsigned long long>(r["condition_hits"].get<std::uint64_t>()),
                    r["empirical"].get<double>(), r["exact"].get<double>(),
                    r["std_err"].get<double>(), r["sigmas"].get<double>());
    }
}

void print_text(const retroop::Json &report) {
    const std::string cmd = report.value("command", std::string());
    if (cmd == "simulate") {
        std::printf("trials %llu, seed %llu\n",
                    static_cast<unsigned long long>(report["trials"].get<std::uint64_t>()),
                    static_cast<unsigned long long>(report["seed"].get<std::uint64_t>()));
        print_simulation_table(report);
        return;
    }
    for (auto it = report.begin(); it != report.end(); ++it) {
        const auto &v = it.value();
        if (v.is_object() && v.contains("decimal")) {
            std::printf("%s: %s\n", it.key().c_str(), v["decimal"].get<std::string>().c_str());
        } else if (v.is_number_float()) {
            std::printf("%s: %s\n", it.key().c_str(), retroop::decimal12(v.get<double>()).c_str());
        } else {
            std::printf("%s: %s\n", it.key().c_str(), v.dump().c_str());
        }
    }
}

/// Reports an error on stderr, and also as {"error": {...}} on stdout in
/// JSON mode. Library messages start with the error class name.
int fail(bool json, int code, const std::string &what) {
    std::cerr << "error: " << what << "\n";
    if (json) {
        const auto colon = what.find(": ");
        const std::string kind = colon == std::string::npos ? "Error" : what.substr(0, colon);
        const retroop::Json err = {{"error", {{"kind", kind}, {"exit_code", code}, {"message", what}}}};
        std::cout << err.dump(2) << "\n";
    }
    return code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Predictive and retrodictive probabilities of quantum operations"};
    app.require_subcommand(1);

    std::string scenario_path;
    double tol_flag = retroop::kDefaultTol;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    unsigned threads = 1;
    bool json = false;

    app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    CLI::Option *tol_opt = app.add_option("--tol", tol_flag, "Relative tolerance (default 1e-9, env RETRO_OP_TOL)")
                               ->check(CLI::PositiveNumber);
    CLI::Option *seed_opt = app.add_option("--seed", seed, "RNG seed for simulate");
    CLI::Option *trials_opt = app.add_option("--trials", trials, "Trajectories for simulate")
                                  ->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "Worker threads for simulate")->check(CLI::PositiveNumber);
    app.add_flag("--json", json, "Emit machine-readable JSON");
    app.fallthrough();

    retroop::Json command;

    auto *check = app.add_subcommand("check", "Classify an operation");
    std::string op_name;
    check->add_option("op", op_name)->required();

    auto *kraus = app.add_subcommand("kraus", "Extract Kraus operators");
    kraus->add_option("op", op_name)->required();

    auto *prob = app.add_subcommand("prob", "Bayesian probabilities");
    std::vector<std::string> pred_args, retro_args;
    std::string prior_arg;
    auto *pred_opt = prob->add_option("--pred", pred_args, "P<-(a|b)")->expected(2);
    auto *retro_opt = prob->add_option("--retro", retro_args, "P->(a|b)")->expected(2);
    auto *prior_opt = prob->add_option("--prior", prior_arg, "P(a)");
    pred_opt->excludes(retro_opt)->excludes(prior_opt);
    retro_opt->excludes(prior_opt);

    auto *bayes = app.add_subcommand("bayes", "Bayes-type identities over a resolution");
    std::string resolution, given;
    bayes->add_option("resolution", resolution, "Instrument name or comma-separated operations")->required();
    bayes->add_option("b", given, "Condition operation")->required();

    auto *reverse = app.add_subcommand("reverse", "Time reversal and its invariance checks");
    reverse->add_option("op", op_name)->required();
    reverse->add_option("given", given, "Optional condition for the reversed probabilities");

    auto *state = app.add_subcommand("state", "Bayesian a priori / a posteriori state");
    std::string of;
    bool posterior = false;
    std::string outcomes;
    state->add_option("of", of, "Operation or instrument")->required();
    state->add_flag("--posterior", posterior, "A posteriori instead of a priori");
    state->add_option("--outcomes", outcomes, "Comma-separated outcome labels (instruments)");

    auto *simulate = app.add_subcommand("simulate", "Monte Carlo concordance of the scenario's simulation block");
    auto *run = app.add_subcommand("run", "Run every task in the scenario");
    auto *dump = app.add_subcommand("dump", "Print the scenario in canonical form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInput;
    }

    auto split = [](const std::string &s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(item);
        }
        return out;
    };

    try {
        retroop::RunOptions opt;
        opt.tol = resolve_tolerance(tol_opt, tol_flag);
        if (seed_opt->count() > 0) opt.seed = seed;
        if (trials_opt->count() > 0) opt.trials = trials;
        opt.threads = threads;

        const retroop::Scenario sc = retroop::parse_scenario(read_file(scenario_path), opt.tol);

        if (*dump) {
            std::cout << retroop::serialize(sc).dump(2) << "\n";
            return 0;
        }
        if (*run) {
            const retroop::Json reports = retroop::run_tasks(sc, opt);
            if (json) {
                std::cout << reports.dump(2) << "\n";
            } else {
                for (const auto &r : reports) {
                    std::printf("== %s\n", r["command"].get<std::string>().c_str());
                    print_text(r);
                }
            }
            return 0;
        }

        if (*check) {
            command = {{"command", "check"}, {"op", op_name}};
        } else if (*kraus) {
            command = {{"command", "kraus"}, {"op", op_name}};
        } else if (*prob) {
            if (pred_opt->count() > 0) {
                command = {{"command", "prob"}, {"mode", "pred"}, {"a", pred_args[0]}, {"b", pred_args[1]}};
            } else if (retro_opt->count() > 0) {
                command = {{"command", "prob"}, {"mode", "retro"}, {"a", retro_args[0]}, {"b", retro_args[1]}};
            } else if (prior_opt->count() > 0) {
                command = {{"command", "prob"}, {"mode", "prior"}, {"a", prior_arg}};
            } else {
                throw retroop::ValidationError("prob needs one of --pred, --retro, --prior");
            }
        } else if (*bayes) {
            command = {{"command", "bayes"}, {"b", given}};
            if (sc.instruments.count(resolution)) {
                command["resolution"] = resolution;
            } else {
                command["resolution"] = split(resolution);
            }
        } else if (*reverse) {
            command = {{"command", "reverse"}, {"op", op_name}};
            if (!given.empty()) command["given"] = given;
        } else if (*state) {
            command = {{"command", "state"}, {"of", of}, {"direction", posterior ? "posterior" : "prior"}};
            if (!outcomes.empty()) command["outcomes"] = split(outcomes);
        } else if (*simulate) {
            command = {{"command", "simulate"}};
        }

        const retroop::Json report = retroop::run_command(sc, command, opt);
        if (json) {
            std::cout << report.dump(2) << "\n";
        } else {
            print_text(report);
        }
        return 0;
    } catch (const retroop::NumericalError &e) {
        return fail(json, kExitNumerical, e.what());
    } catch (const retroop::InputError &e) {
        return fail(json, kExitInput, e.what());
    } catch (const nlohmann::json::exception &e) {
        return fail(json, kExitInput, std::string("JsonError: ") + e.what());
    }
}
