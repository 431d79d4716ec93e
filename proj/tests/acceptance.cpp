// Acceptance suite: one PASS/FAIL line per criterion, plus INFO lines.
// Exit status is nonzero when any criterion fails.

#include "mtlforge/counter_machine.hpp"
#include "mtlforge/harness.hpp"
#include "mtlforge/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace mtlf;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << " (" << o.detail;
    if (!in_time) line << "; over the " << limit_s << " s limit";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", s);
    line << ") " << buf << " s";
    std::cout << line.str() << std::endl;
}

void info(const std::string& s) { std::cout << "INFO " << s << std::endl; }

std::string show(const TimedWord& w) {
    std::string s;
    for (const auto& p : w.points()) {
        s += "(";
        for (std::size_t k = 0; k < p.props.size(); ++k) s += (k ? "," : "") + p.props[k];
        s += ")@" + time_to_string(p.t) + " ";
    }
    return s;
}

const Alphabet kAB{"a", "b"};

// 1
Outcome semantics() {
    Rng rng(2024);
    std::size_t checks = 0, bad = 0;
    for (int k = 0; k < 500; ++k) {
        TimedWord w = gen_random_word(rng, kAB, GridSpec{8, 4, 8});
        Formula g = gen_random_formula(rng, kAB, 1 + rng.below(4), Fragment::UntilISinceI);
        auto t = truth_table(w, g);
        for (std::size_t s = 0; s < t.subformulas.size(); ++s)
            for (std::size_t i = 1; i <= w.size(); ++i, ++checks) bad += t.rows[s][i - 1] != eval_at(w, i, t.subformulas[s]);
    }
    return {bad == 0, std::to_string(checks) + " table cells, " + std::to_string(bad) + " disagreements"};
}

// 2
Outcome three_words() {
    const Alphabet abc{"a", "b", "c"};
    auto pt = [](std::vector<std::string> p, Rational t) { return TimedPoint{std::move(p), std::move(t)}; };
    auto rho = make_word(kAB, {pt({"a"}, 0), pt({"a", "b"}, ratio(3, 10)), pt({"a"}, ratio(24, 5))});
    auto rho1 = make_word(abc, {pt({"a", "c"}, 0), pt({"c"}, ratio(1, 10)), pt({"a", "b"}, ratio(3, 10)), pt({"a", "c"}, ratio(24, 5))});
    auto rho2 = make_word(abc, {pt({"a", "c"}, 0), pt({"b", "c"}, ratio(1, 10)), pt({"a", "b"}, ratio(3, 10)), pt({"a", "c"}, ratio(24, 5))});
    int ok = 0, total = 0;
    auto check = [&](bool c) { ok += c, ++total; };
    check(restrict_word(rho1, kAB) == rho);
    check(restrict_word(rho2, kAB) != rho);
    check(is_oversampling_of(rho1, rho, kAB));
    check(!is_oversampling_of(rho2, rho, kAB));
    check(!is_simple_extension(rho1, rho, kAB));
    check(!is_simple_extension(rho2, rho, kAB));
    auto g = g_map(rho1, rho, kAB);
    check(g.size() == 3 && g.at(1) == 1 && g.at(3) == 2 && g.at(4) == 3);
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " verdicts"};
}

// 3
Outcome lemma_flatten() {
    Rng rng(7);
    std::size_t models = 0, tries = 0, probes = 0, bad = 0;
    for (int n = 0; n < 200; ++n) {
        Formula x = gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS);
        NameSupply names;
        FlatFormula ff = flatten(x, kAB, names);
        Formula g = flat_conjunction(ff);
        std::vector<std::string> ws;
        for (const auto& d : ff.history) ws.push_back(d.witness);
        for (int k = 0; k < 5; ++k) {
            TimedWord w = gen_random_word(rng, kAB, GridSpec{6, 2, 4});
            TimedWord ext = canonical_extension(w, ff);
            const bool sx = satisfies(w, x);
            models += sx;
            if (!is_simple_extension(ext, w, kAB) || satisfies(ext, g) != sx) ++bad;
            if (ws.empty()) continue;
            for (int r = 0; r < 3; ++r) {
                TimedWord m = flip_random_prop(rng, ext, Alphabet(ws));
                ++tries;
                if (!satisfies(m, g)) continue;
                ++probes;
                auto back = restrict_word(m, kAB);
                if (!back || !satisfies(*back, x)) ++bad;
            }
        }
    }
    return {bad == 0 && models > 100, "200 formulas, " + std::to_string(models) + " models extended, " + std::to_string(tries) +
                                          " witness mutations (" + std::to_string(probes) + " still models, projected), " + std::to_string(bad) + " counterexamples"};
}

// 4
Outcome lemma_oversample() {
    Rng rng(19);
    const Alphabet extra{"z1", "z2"};
    std::size_t models = 0, bad = 0;
    for (int n = 0; n < 200; ++n) {
        Formula x = gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS);
        NameSupply names;
        names.reserve(extra);
        FlatFormula ff = flatten(x, kAB, names);
        FlatFormula cl = oversample_close(ff);
        Formula g0 = flat_conjunction(ff), g1 = flat_conjunction(cl);
        std::vector<std::string> ws;
        for (const auto& d : ff.history) ws.push_back(d.witness);
        TimedWord w = canonical_extension(gen_random_word(rng, kAB, GridSpec{6, 2, 4}), ff);
        if (!ws.empty() && rng.coin()) w = flip_random_prop(rng, w, Alphabet(ws));
        TimedWord over = insert_random_points(rng, w, extra, 1 + rng.below(4));
        const bool a = satisfies(w, g0), b = satisfies(over, g1);
        models += a;
        auto back = restrict_word(over, ff.extended_alphabet);
        if (a != b || !back || !(*back == w) || !is_oversampling_of(over, w, w.alphabet())) ++bad;
    }
    return {bad == 0 && models > 20, "200 samples, " + std::to_string(models) + " models, " + std::to_string(bad) + " counterexamples"};
}

// 5
Outcome lemma_past_inf() {
    std::size_t words = 0, bad = 0;
    std::string per;
    for (bool open : {false, true})
        for (std::uint64_t l : {0, 1, 2}) {
            auto r = check_past_inf_exhaustive(l, open, GridSpec{5, 2, 4});
            words += r.words;
            bad += r.mismatches;
            if (r.mismatches) per += " " + std::string(open ? "(" : "[") + std::to_string(l) + ",inf): " + show(r.counterexamples[0]);
        }
    return {bad == 0, std::to_string(words) + " words over [l,inf) and (l,inf), l in {0,1,2}, " + std::to_string(bad) + " mismatches" + per};
}

// 6
Outcome lemma_unit_condition() {
    auto r = check_unit_past_condition(99, 500, 3);
    return {r.mismatches == 0 && r.positions > 0,
            std::to_string(r.words) + " words, " + std::to_string(r.positions) + " positions, " + std::to_string(r.mismatches) + " mismatches"};
}

// 7
Outcome lemma_unit_elim() {
    bool ok = true;
    std::string d;
    for (std::uint64_t l : {0, 1}) {
        auto r = check_unit_elim_exhaustive(l, UnitRepairs::all(), GridSpec{6, 2, 4});
        ok = ok && r.ok() && r.psi_models > 0 && r.dir2_models > 0;
        d += (l ? "; " : "") + std::string("l=") + std::to_string(l) + ": " + std::to_string(r.psi_models) + " psi-models, " +
             std::to_string(r.dir1_violations) + " dir1 violations, " + std::to_string(r.groups) + " uniqueness groups, " +
             std::to_string(r.uniqueness_violations) + " clashes, " + std::to_string(r.dir2_models) + " dir2 models, " +
             std::to_string(r.dir2_violations) + " dir2 violations, c-marking " + std::to_string(r.c_mismatches) + " mismatches";
    }
    return {ok, d};
}

// 8
Outcome theorem_one() {
    std::size_t checked = 0, bad = 0, not_future = 0, units = 0, infs = 0;
    std::string first;
    auto run = [&](const Formula& f, const Alphabet& base, std::uint64_t seed) {
        auto p = pipeline_to_future(f, base);
        units += p.unit_defs.size();
        infs += p.inf_defs.size();
        if (!fragment_contains(Fragment::UntilI, p.output)) ++not_future;
        EquisatOptions o;
        o.grid = GridSpec{6, 2, 4};
        o.samples = 60;
        o.seed = seed;
        o.extend = [&](const TimedWord& w) { return extend_model(p, w); };
        auto r = check_equisat(f, p.output, base, p.alphabet, o);
        checked += r.checked;
        if (!r.ok()) {
            ++bad;
            if (first.empty()) first = "; first: " + render_formula(f) + " " + r.counterexamples[0].detail;
        }
    };
    const Alphabet ac{"a", "c"};
    run(parse_formula("F(a & P(1,inf) c)", ac), ac, 1);
    run(parse_formula("(b -> P[1,2) a) U EP", kAB), kAB, 2);
    Rng rng(2024);
    for (int n = 0; n < 100; ++n) run(gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS), kAB, 100 + n);
    return {bad == 0 && not_future == 0, "102 formulas, " + std::to_string(checked) + " checks, " + std::to_string(units) + " unit and " +
                                             std::to_string(infs) + " unbounded eliminations, " + std::to_string(bad) +
                                             " with counterexamples, " + std::to_string(not_future) + " outputs outside MTL[U_I]" + first};
}

// 9
Outcome counter_machines() {
    auto three = parse_machine("counters: 1\np1: INC 1 GOTO p2\np2: DEC 1 GOTO p3\np3: HALT\n");
    auto transfer = parse_machine(
        "counters: 2\np1: INC 1 GOTO p2\np2: INC 1 GOTO p3\np3: JZ 1 p6 p4\np4: DEC 1 GOTO p5\np5: INC 2 GOTO p3\np6: HALT\n");
    std::vector<std::string> bad;
    auto r = run_machine(three, 50);
    if (!verify_encoding(three, r, RunMode::Standard)) bad.push_back("3-line run fails the Minsky encoding");
    if (!verify_encoding(three, r, RunMode::IncrementError)) bad.push_back("3-line run fails the incrementing encoding");

    std::size_t mutations = 0, survived = 0;
    for (const auto* m : {&three, &transfer}) {
        auto run = run_machine(*m, 100);
        auto w = run_to_word(*m, run);
        Formula phi = encode_minsky(*m).formula;
        const Rational K(static_cast<std::int64_t>(2 * m->k + 1));
        for (const auto& s : copy_governed_slots(*m, run)) {
            std::vector<TimedWord> muts{insert_counter_a(*m, w, s)};
            for (std::int64_t j = 1; j < 8; ++j) {
                Rational t = K * static_cast<std::int64_t>(s.config) + static_cast<std::int64_t>(2 * s.counter - 1) + Rational(j, 8);
                bool taken = false;
                for (const auto& p : w.points()) taken = taken || p.t == t;
                if (!taken) muts.push_back(insert_event(w, "a", t));
            }
            for (const auto& mw : muts) {
                ++mutations;
                if (satisfies(mw, phi)) {
                    ++survived;
                    if (bad.size() < 3) bad.push_back("insertion survived: " + show(mw));
                }
            }
        }
    }
    if (mutations == 0) bad.push_back("no copy-governed interval");

    auto er = run_machine(three, 50, RunMode::IncrementError,
                          [](std::size_t s, const Config&) { return std::vector<std::uint64_t>{s == 0 ? 1u : 0u}; });
    if (!verify_encoding(three, er, RunMode::IncrementError)) bad.push_back("error run fails the incrementing encoding");
    if (verify_encoding(three, er, RunMode::Standard)) bad.push_back("error run satisfies the Minsky encoding");

    const std::size_t steps = r.configs.size() - 1;
    const GridSpec grid{5, 4, (2 * three.k + 1) * (steps + 1)};
    auto guarded = encode_incrementing(three, {true, false});
    auto found = bounded_sat(guarded.formula, guarded.alphabet, grid, {true, true});
    std::string sat_detail = "no model";
    if (!found) {
        bad.push_back("bounded_sat found no model");
    } else {
        auto d = decode_word(three, *found, RunMode::IncrementError);
        sat_detail = show(*found) + (d.valid ? "decodes to a halting run" : "does not decode: " + d.reason);
        if (!d.valid || !d.run.halted) bad.push_back("bounded_sat model does not decode");
    }
    auto plain = encode_incrementing(three);
    if (auto lossy = bounded_sat(plain.formula, plain.alphabet, grid, {true, true})) {
        auto d = decode_word(three, *lossy, RunMode::IncrementError);
        info("[9] incrementing encoding without the zero-increment guard: bounded_sat returns " + show(*lossy) +
             (d.valid ? "(decodes)" : "which does not decode (" + d.reason + ")"));
    }
    std::string d = std::to_string(mutations) + " copy-interval insertions, " + std::to_string(survived) + " survived; bounded_sat (" +
                    std::to_string(steps) + " steps, guarded): " + sat_detail;
    for (const auto& b : bad) d += "; " + b;
    return {bad.empty(), d};
}

// 10
Outcome expressiveness() {
    std::string d;
    bool ok = true;
    for (int c : {1, 2, 3}) {
        auto r = expressiveness_pairs(c, ExpressivenessParams::defaults(3));
        ok = ok && r.distinguishes();
        d += (c > 1 ? ", " : "") + std::string("case ") + std::to_string(c) + " (" + (r.v1 ? "true" : "false") + "," +
             (r.v2 ? "true" : "false") + ")";
    }
    return {ok, d};
}

// 11
Outcome laws() {
    bool ok = true;
    std::string d;
    for (Law l : {Law::Duality, Law::ShiftInvariance, Law::IntervalSplit, Law::BoundedSince}) {
        auto r = check_law(l, 11, 500);
        ok = ok && r.ok() && r.samples == 500;
        d += (d.empty() ? "" : ", ") + std::string(law_name(l)) + " " + std::to_string(r.violations) + "/" + std::to_string(r.positions);
    }
    return {ok, d + " violations/positions"};
}

}  // namespace

int main() {
    criterion(1, "truth tables agree with recursive evaluation", 30, semantics);
    criterion(2, "projection, oversampling and g-map verdicts on a three-word family", 1, three_words);
    criterion(3, "flattening preserves models both ways", 60, lemma_flatten);
    criterion(4, "oversampling closure both ways", 60, lemma_oversample);
    criterion(5, "unbounded past elimination, exhaustive", 300, lemma_past_inf);
    criterion(6, "first/last occurrence characterization", 60, lemma_unit_condition);
    criterion(7, "unit past elimination, exhaustive", 600, lemma_unit_elim);
    {
        auto r = check_unit_elim_exhaustive(1, UnitRepairs::none(), GridSpec{4, 2, 3}, 1);
        info("[7] clauses without repairs, l=1, len<=4: " + std::to_string(r.dir1_violations) + " dir1 and " +
             std::to_string(r.dir2_violations) + " dir2 violations" +
             (r.dir1_counterexamples.empty() ? "" : ", e.g. psi-model " + show(r.dir1_counterexamples[0])));
    }
    criterion(8, "end-to-end past elimination is equisatisfiable", 600, theorem_one);
    criterion(9, "counter machine encodings", 300, counter_machines);
    criterion(10, "expressiveness word pairs", 1, expressiveness);
    criterion(11, "algebraic laws", 120, laws);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failures ? 1 : 0;
}
