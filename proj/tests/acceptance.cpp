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

// Acceptance gate. Prints one PASS/FAIL line per criterion with the
// measured worst error and the pinned tolerance; exits 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "retroop/commands.hpp"
#include "retroop/scenario.hpp"
#include "support/cli_golden.hpp"
#include "support/generators.hpp"

using namespace retroop;
using namespace retroop::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Running maximum of an error measure against a fixed tolerance.
struct Worst {
    double tol;
    double value = 0.0;
    void see(double err) { value = std::max(value, std::isnan(err) ? INFINITY : err); }
    bool ok() const { return value <= tol; }
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string worst_str(const char *label, const Worst &w) {
    return std::string(label) + " " + fmt("%.2e", w.value) + " (tol " + fmt("%.0e", w.tol) + ")";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_fixture(const std::string &name) {
    std::ifstream in(std::string(RETROOP_SCENARIOS) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double scale_of(const Superoperator &a) { return std::max(1.0, a.tensor().cwiseAbs().maxCoeff()); }

// Block matrix [a(|i><j|)]_ij; psd exactly when the kappa-sequence
// condition holds for every finite family.
Matrix block_choi(const Superoperator &a) {
    const Index n = a.dim();
    Matrix blocks(n * n, n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) blocks.block(i * n, j * n, n, n) = apply(a, matrix_unit(n, i, j));
    return blocks;
}

// 1. Involution and trace laws.
Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    Worst w{1e-10};
    for (int t = 0; t < 500; ++t) {
        const Index n = 2 + t % 3;
        const Superoperator a = random_tensor(rng, n), b = random_tensor(rng, n);
        const double s = scale_of(a) * scale_of(b) * static_cast<double>(n * n);
        auto rel = [&](const Superoperator &x, const Superoperator &y) { return max_abs_diff(x, y) / s; };
        auto relc = [&](Complex x, Complex y) { return std::abs(x - y) / (s * static_cast<double>(n * n)); };
        w.see(rel(invol_lr(invol_lr(a)), a));
        w.see(rel(invol_ud(invol_ud(a)), a));
        w.see(rel(invol_diamond(invol_diamond(a)), a));
        w.see(rel(invol_diamond(invol_lr(a)), invol_ud(invol_diamond(a))));
        w.see(rel(invol_lr(invol_diamond(a)), invol_diamond(invol_ud(a))));
        w.see(rel(invol_ud(compose(a, b)), compose(invol_ud(b), invol_ud(a))));
        w.see(rel(invol_lr(compose(a, b)), compose(invol_lr(a), invol_lr(b))));
        w.see(rel(invol_lr(invol_ud(a)), invol_ud(invol_lr(a))));
        const Matrix id = identity(n);
        w.see(relc(tr_ud(compose(a, b)), tr_ud(compose(b, a))));
        w.see(relc(tr_lr(invol_diamond(a)), tr_ud(a)));
        w.see(relc(tr_ud(invol_diamond(a)), tr_lr(a)));
        w.see(relc(tr_lr(a), trace(apply(a, id))));
        w.see(relc(tr_ud(a), trace(apply(invol_diamond(a), id))));
        w.see(relc(tr_lr(compose(a, b)), (apply(invol_ud(a), id).adjoint() * apply(b, id)).trace()));
    }
    const double secs = seconds_since(t0);
    return {w.ok() && secs < 10.0, "500 tensors, " + worst_str("max scaled err", w) + ", " + fmt("%.2f", secs) +
                                       " s (limit 10 s)"};
}

// 2. Positivity and complete positivity against independent oracles.
Outcome criterion_2() {
    Rng rng(202);
    int disagree_pos = 0, disagree_cp = 0, one_sided_violations = 0, undecided_by_image = 0;
    for (int t = 0; t < 400; ++t) {
        const Index n = 2 + t % 2;
        const bool make_cp = t < 200;
        Superoperator a = zero(n);
        if (make_cp) {
            a = (t % 2 == 0) ? from_kraus(n, random_kraus(rng, n)) : random_operation(rng, n);
        } else {
            switch (t % 3) {
            case 0: a = compose(transpose_map(n), random_operation(rng, n)); break;
            case 1: a = invol_diamond(Superoperator(random_hermitian(rng, n * n))); break;
            default: a = Superoperator(-from_kraus(n, random_kraus(rng, n)).tensor()); break;
            }
        }
        // quadratic form tr[A* a(A)] >= 0 on random A (two-sided for positivity)
        bool quad = true;
        for (int k = 0; k < 200 && quad; ++k) {
            const Matrix m = random_matrix(rng, n);
            const Complex q = (m.adjoint() * apply(a, m)).trace();
            const double s = 1e-9 * m.squaredNorm() * scale_of(a);
            quad = q.real() >= -s && std::abs(q.imag()) <= s;
        }
        disagree_pos += is_positive(a) != quad;

        const bool kappa = min_eigenvalue(block_choi(a)) >= -1e-9 * scale_of(a);
        const bool cp = is_cp(a);
        disagree_cp += cp != kappa || (make_cp && !cp);

        // psd-image and pairing oracles decide only one way
        bool image = true;
        for (int k = 0; k < 200 && image; ++k) {
            const Matrix rho = random_psd(rng, n), sigma = random_psd(rng, n);
            image = min_eigenvalue(apply(a, rho)) >= -1e-10 * rho.norm() * scale_of(a) &&
                    (sigma * apply(a, rho)).trace().real() >= -1e-10 * rho.norm() * sigma.norm() * scale_of(a);
        }
        if (cp && !image) ++one_sided_violations;
        if (!cp && image) ++undecided_by_image;
    }
    const bool pass = disagree_pos == 0 && disagree_cp == 0 && one_sided_violations == 0;
    return {pass, "200 CP + 200 non-CP; is_positive vs quadratic form: " + std::to_string(disagree_pos) +
                      " disagreements; is_cp vs kappa-sequence: " + std::to_string(disagree_cp) +
                      "; psd-image/pairing refutations missed: " + std::to_string(one_sided_violations) + " (" +
                      std::to_string(undecided_by_image) + " positive-but-not-CP maps pass the image test)"};
}

// 3. Kraus round trip and adjoint Kraus form.
Outcome criterion_3() {
    Rng rng(303);
    Worst recon{1e-9}, adj{1e-12};
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 3;
        auto ks = random_kraus(rng, n);
        const Superoperator a = from_kraus(n, ks);
        recon.see(max_abs_diff(from_kraus(extract_kraus(a)), a));
        for (auto &m : ks) m.adjointInPlace();
        adj.see(max_abs_diff(invol_ud(a), from_kraus(n, ks)));
    }
    return {recon.ok() && adj.ok(), "200 CP maps, " + worst_str("reconstruction", recon) + ", " +
                                        worst_str("adjoint Kraus", adj)};
}

// 4. Bayes-type identities.
Outcome criterion_4() {
    Rng rng(404);
    Worst w{1e-9};
    const ResolutionKind kinds[] = {ResolutionKind::ScaledUnit, ResolutionKind::RandomUnitary, ResolutionKind::Luders};
    int literal = 0;
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 3;
        const ResolutionKind kind = kinds[t % 3];
        literal += kind == ResolutionKind::ScaledUnit;
        std::uniform_int_distribution<int> pick(1, kind == ResolutionKind::Luders ? static_cast<int>(n) : 8);
        const int k = pick(rng);
        const auto ops = random_resolution(rng, n, k, kind);
        const Superoperator b = random_operation(rng, n);
        for (int j = 0; j < k; ++j) {
            w.see(std::abs(bayes_retrodict(ops, b, j) - p_retro(ops[j], b)));
            w.see(std::abs(bayes_predict(ops, b, j) - p_pred(ops[j], b)));
        }
    }
    const Scenario sc = parse_scenario(read_fixture("qubit_zx.json"));
    const double fixture = p_retro(sc.operation("pz+"), sc.operation("px+"));
    const double via_bayes =
        bayes_retrodict({sc.operation("pz+"), sc.operation("pz-")}, sc.operation("px+"), 0);
    Worst fx{1e-12};
    fx.see(std::abs(fixture - 0.5));
    fx.see(std::abs(via_bayes - 0.5));
    return {w.ok() && fx.ok(), "200 resolutions (" + std::to_string(literal) + " summing to unit exactly, rest trivial), " +
                                   worst_str("identity err", w) + "; fixture P->(pz+|px+) = " +
                                   fmt("%.15g", fixture) + ", " + worst_str("err", fx)};
}

// 5. Time reversal and its corollary.
Outcome criterion_5() {
    Rng rng(505);
    Worst pairs{1e-10}, chains{1e-9};
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 3;
        const Superoperator a = random_operation(rng, n), b = random_operation(rng, n);
        const Superoperator ar = time_reverse(a), br = time_reverse(b);
        pairs.see(std::abs(p_pred(a, b) - p_retro(ar, br)));
        pairs.see(std::abs(p_retro(a, b) - p_pred(ar, br)));
        pairs.see(std::abs(p_prior(a) - p_prior(ar)));
    }
    std::uniform_int_distribution<int> len(1, 6);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 2;
        std::uniform_int_distribution<int> rank(1, static_cast<int>(n));
        auto chain = [&](int m, std::vector<Superoperator> &fwd) {
            Superoperator f = unit(n), r = unit(n);
            for (int i = 0; i < m; ++i) fwd.push_back(projecting(random_projector(rng, n, rank(rng))));
            for (int i = 0; i < m; ++i) {
                f = compose(f, fwd[i]);
                r = compose(r, fwd[m - 1 - i]);
            }
            return std::pair{f, r};
        };
        std::vector<Superoperator> as, bs;
        const auto [af, ar] = chain(len(rng), as);
        const auto [bf, br] = chain(len(rng), bs);
        chains.see(std::abs(p_prior(af) - p_prior(ar)));
        if (tr_lr(bf).real() <= 1e-6) continue;
        chains.see(std::abs(p_pred(af, bf) - p_retro(ar, br)));
        ++checked;
    }
    return {pairs.ok() && chains.ok() && checked >= 100,
            "200 pairs, " + worst_str("reversal err", pairs) + "; " + std::to_string(checked) +
                " projector chains (M, N <= 6), " + worst_str("corollary err", chains)};
}

// 6. Unitary invariance.
Outcome criterion_6() {
    Rng rng(606);
    Worst w{1e-10};
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 3;
        const Superoperator a = random_operation(rng, n), b = random_operation(rng, n);
        const Matrix um = random_unitary(rng, n);
        const Superoperator u = unitary(um), ui = unitary_inv(um);
        auto conj = [&](const Superoperator &x) { return compose(u, compose(x, ui)); };
        const double pred = p_pred(a, b), retro = p_retro(a, b);
        for (double v : {p_pred(conj(a), conj(b)).value(), p_pred(compose(a, ui), compose(u, b)).value(),
                         p_pred(compose(u, a), b).value(), p_pred(a, compose(b, u)).value()})
            w.see(std::abs(v - pred));
        for (double v : {p_retro(conj(a), conj(b)).value(), p_retro(compose(u, a), compose(b, ui)).value(),
                         p_retro(compose(a, u), b).value(), p_retro(a, compose(u, b)).value()})
            w.see(std::abs(v - retro));
    }
    return {w.ok(), "200 (a, b, U) triples, 8 equalities each, " + worst_str("max err", w)};
}

// 7. Instruments.
Outcome criterion_7() {
    const Scenario sc = parse_scenario(read_fixture("qubit_zx.json"));
    const Instrument &z = sc.instrument("Z"), &x = sc.instrument("X");
    Rng rng(707);
    Worst add{1e-12}, prod{1e-12};
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 3;
        const Instrument inst = make_instrument(random_instrument_ops(rng, n, t % 2 ? 2 : 4, false));
        const Superoperator a = random_operation(rng, n);
        OutcomeEvent left, right, both{inst.outcomes()};
        for (std::size_t k = 0; k < inst.size(); ++k) (k % 2 ? left : right).labels.push_back(inst.outcomes()[k]);
        add.see(std::abs(p_inst_pred(inst, both, a) - p_inst_pred(inst, left, a) - p_inst_pred(inst, right, a)));
        add.see(std::abs(p_inst_retro(inst, both, a) - p_inst_retro(inst, left, a) - p_inst_retro(inst, right, a)));
        add.see(std::abs(p_inst(inst, both) - p_inst(inst, left) - p_inst(inst, right)));
    }
    const Instrument zx = product(z, x);
    for (const auto &label : zx.outcomes()) prod.see(std::abs(p_inst(zx, {{label}}) - 0.25));
    const bool pass = add.ok() && prod.ok() && zx.size() == 4;
    return {pass, "Z/X fixtures valid; " + worst_str("additivity", add) + "; product Z.X has " +
                      std::to_string(zx.size()) + " outcomes, " + worst_str("|p - 0.25|", prod)};
}

// 8. Bayesian states and effects.
Outcome criterion_8() {
    Rng rng(808);
    Worst bridge{1e-9};
    int invalid = 0;
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 3;
        const Superoperator a = random_operation(rng, n), b = random_operation(rng, n);
        const EffectPair ep = effects_of(a);
        const DensityMatrix post = state_posterior(b), prior = state_prior(b);
        bridge.see(std::abs(post.expectation(ep.m.matrix()).real() - p_pred(a, b)));
        bridge.see(std::abs(prior.expectation(ep.m_prime.matrix()).real() - p_retro(a, b)));
        for (const DensityMatrix *rho : {&post, &prior}) {
            const Matrix &m = rho->matrix();
            const bool ok = (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 && min_eigenvalue(m) >= -1e-9 &&
                            std::abs(m.trace() - Complex(1.0)) <= 1e-10;
            invalid += !ok;
        }
    }
    return {bridge.ok() && invalid == 0, "200 pairs, " + worst_str("bridge err", bridge) + "; " +
                                             std::to_string(invalid) + " of 400 states violate invariants"};
}

// 9. Simulation concordance.
Outcome criterion_9() {
    const Scenario sc = parse_scenario(read_fixture("qubit_zx.json"));
    const SimulationSpec &spec = *sc.simulation;
    std::vector<NamedInstrument> seq;
    for (const auto &n : spec.sequence) seq.push_back({n, sc.instrument(n)});
    const TrajectorySampler sampler(seq, DensityMatrix::maximally_mixed(sc.dim));
    const StepOutcome cond{1, "+"}, target{0, "+"};

    const auto t0 = std::chrono::steady_clock::now();
    const FreqReport one = estimate(sampler, cond, target, 1000000, spec.seed, 1);
    const double secs = seconds_since(t0);
    bool identical = true;
    for (unsigned threads : {2u, 4u}) {
        const FreqReport r = estimate(sampler, cond, target, 1000000, spec.seed, threads);
        identical = identical && r.condition_hits == one.condition_hits && r.joint_hits == one.joint_hits &&
                    r.empirical == one.empirical;
    }
    const double sigmas = one.abs_err / one.std_err;
    const bool pass = one.direction == Direction::Retrodictive && std::abs(one.exact - 0.5) <= 1e-12 &&
                      sigmas <= 4.0 && secs < 60.0 && identical;
    return {pass, "1e6 trials, seed " + std::to_string(spec.seed) + ": empirical " + fmt("%.6f", one.empirical) +
                      " vs exact " + fmt("%.6f", one.exact) + ", " + fmt("%.2f", sigmas) + " std_err (limit 4), " +
                      fmt("%.1f", secs) + " s single-threaded (limit 60 s), threads 1/2/4 " +
                      (identical ? "bit-identical" : "DIFFER")};
}

// 10. CLI contract via golden files.
Outcome criterion_10() {
    std::vector<std::string> diffs;
    int cases = 0;
    for (const auto &c : cli::kCases) {
        ++cases;
        for (auto &d : cli::check_case(c)) diffs.push_back(std::move(d));
    }
    std::string detail = std::to_string(cases) + " golden cases, " + std::to_string(diffs.size()) + " differences";
    if (!diffs.empty()) detail += " (first: " + diffs.front() + ")";
    return {diffs.empty(), detail};
}

} // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"involution and trace laws", criterion_1},
        {"positivity equivalence", criterion_2},
        {"Kraus round trip", criterion_3},
        {"Bayes-type identities", criterion_4},
        {"time reversal", criterion_5},
        {"unitary invariance", criterion_6},
        {"instrument validity and additivity", criterion_7},
        {"Bayesian states and effects", criterion_8},
        {"simulation concordance", criterion_9},
        {"CLI contract", criterion_10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("threw ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
