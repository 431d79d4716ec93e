#pragma once

#include "mtlforge/generators.hpp"
#include "mtlforge/past_elim.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mtlf {

// ── Equisatisfiability ──────────────────────────────────────────────────

struct Counterexample {
    TimedWord word;
    int direction = 0;      // 1: model of g whose projection fails f; 2: model of f whose extension fails g
    std::size_t position = 1;
    std::string detail;
};

struct EquisatReport {
    std::string suite;
    std::uint64_t seed = 0;
    GridSpec grid;
    std::size_t checked = 0;
    std::size_t dir1_models = 0, dir2_models = 0;
    std::vector<Counterexample> counterexamples;
    bool ok() const { return counterexamples.empty(); }
};

using Extender = std::function<TimedWord(const TimedWord&)>;

struct EquisatOptions {
    std::string suite = "equisat";
    GridSpec grid;
    std::size_t samples = 100;      // models of f to extend (direction 2)
    std::uint64_t seed = 1;
    Extender extend;                // defaults to widening the alphabet
    std::size_t attempts_per_sample = 20;
    std::size_t mutation_rounds = 6;
    std::size_t keep = 10;
};

namespace detail {

class CompiledCheck {
public:
    CompiledCheck(const Formula& f, Alphabet sigma) : sigma_(std::move(sigma)), prog_(f, sigma_), ev_(prog_) {}
    bool operator()(const TimedWord& w) { return ev_.run(to_fast(w, sigma_)); }

private:
    Alphabet sigma_;
    Program prog_;
    Evaluator ev_;
};

inline TimedWord widen(const TimedWord& w, const Alphabet& sigma) { return make_word(sigma, w.points()); }

}  // namespace detail

// Direction 2 extends sampled models of f with the given witness builder. Direction 1
// probes models of g obtained by mutating extensions of arbitrary sampled words.
inline EquisatReport check_equisat(const Formula& f, const Formula& g, const Alphabet& sigma, const Alphabet& g_alphabet,
                                   const EquisatOptions& opt = {}) {
    if (!sigma.subset_of(g_alphabet)) throw AlphabetError("sigma must be contained in g's alphabet");
    for (const auto& p : atoms_of(f))
        if (!sigma.contains(p)) throw AlphabetError("atom '" + p + "' of f outside sigma");
    EquisatReport rep;
    rep.suite = opt.suite;
    rep.seed = opt.seed;
    rep.grid = opt.grid;
    Rng rng(opt.seed);
    Extender extend = opt.extend ? opt.extend : [&](const TimedWord& w) { return detail::widen(w, g_alphabet); };
    detail::CompiledCheck sat_f(f, sigma), sat_g(g, g_alphabet);
    std::vector<std::string> aux_v;
    for (const auto& p : g_alphabet.props())
        if (!sigma.contains(p)) aux_v.push_back(p);
    const Alphabet aux(aux_v);
    auto fail = [&](TimedWord w, int dir, std::string why) {
        if (rep.counterexamples.size() < opt.keep) rep.counterexamples.push_back({std::move(w), dir, 1, std::move(why)});
        else rep.counterexamples.back().detail += "";  // keep the count visible through checked
    };
    auto probe = [&](const TimedWord& m) {
        if (!sat_g(m)) return;
        ++rep.dir1_models;
        ++rep.checked;
        auto back = restrict_word(m, sigma);
        if (!back) fail(m, 1, "empty projection");
        else if (!sat_f(*back)) fail(m, 1, "projection violates f");
    };

    std::size_t models = 0;
    for (std::size_t attempt = 0; models < opt.samples && attempt < opt.samples * opt.attempts_per_sample; ++attempt) {
        TimedWord w = gen_random_word(rng, sigma, opt.grid);
        TimedWord e = extend(w);
        if (sat_f(w)) {
            ++models;
            ++rep.dir2_models;
            ++rep.checked;
            auto back = restrict_word(e, sigma);
            if (!back || !(*back == w)) fail(e, 2, "extension does not project back");
            else if (!sat_g(e)) fail(e, 2, "extension violates g");
            probe(e);
        }
        if (aux.empty()) continue;
        for (std::size_t r = 0; r < opt.mutation_rounds; ++r) {
            TimedWord m = e;
            const std::size_t flips = 1 + rng.below(3);
            for (std::size_t k = 0; k < flips; ++k) m = flip_random_prop(rng, m, rng.coin(1, 4) ? g_alphabet : aux);
            if (rng.coin(1, 4)) m = insert_random_points(rng, m, aux, 1);
            probe(m);
        }
    }
    return rep;
}

// ── Bounded satisfiability ──────────────────────────────────────────────

// First word of the grid enumeration satisfying f. Incomplete: none only means
// no model within the grid.
// Shortest-first search over the grid. Anchoring at 0 loses nothing: truth values
// only depend on time differences.
inline std::optional<TimedWord> bounded_sat(const Formula& f, const Alphabet& sigma, const GridSpec& grid,
                                            const EnumOptions& eo = {true, false}) {
    for (const auto& p : atoms_of(f))
        if (!sigma.contains(p)) throw AlphabetError("atom '" + p + "' outside the alphabet");
    Program prog(f, sigma);
    Evaluator ev(prog);
    std::optional<TimedWord> found;
    enumerate_fast(sigma.size(), grid, eo, [&](const FastWord& w) {
        if (!ev.run(w)) return true;
        found = from_fast(w, sigma);
        return false;
    });
    if (found && !satisfies(*found, f)) throw std::logic_error("bounded_sat returned a non-model");
    return found;
}

// ── Algebraic laws ──────────────────────────────────────────────────────

enum class Law { Duality, ShiftInvariance, IntervalSplit, BoundedSince };

inline const char* law_name(Law l) {
    switch (l) {
        case Law::Duality: return "duality";
        case Law::ShiftInvariance: return "shift_invariance";
        case Law::IntervalSplit: return "interval_split";
        case Law::BoundedSince: return "bounded_since";
    }
    return "?";
}

struct LawReport {
    Law law = Law::Duality;
    std::uint64_t seed = 0;
    std::size_t samples = 0, positions = 0, violations = 0;
    std::vector<std::pair<TimedWord, std::string>> counterexamples;
    bool ok() const { return violations == 0; }
};

namespace detail {

// □_I g / ⊟_I g straight from the quantifier reading, over g's row.
inline std::vector<bool> box_by_definition(const TimedWord& w, const std::vector<bool>& g, const Interval& iv, bool past) {
    std::vector<bool> out(w.size(), true);
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (past ? j >= i : j <= i) continue;
            const Rational d = past ? w.time(i + 1) - w.time(j + 1) : w.time(j + 1) - w.time(i + 1);
            if (iv.contains(d) && !g[j]) out[i] = false;
        }
    return out;
}

}  // namespace detail

// Random words over {a, b} (len <= 8, denom 4, horizon 8) paired with random formulas.
inline LawReport check_law(Law law, std::uint64_t seed, std::size_t samples, std::size_t keep = 5) {
    const Alphabet ab{"a", "b"};
    const GridSpec grid{8, 4, 8};
    Rng rng(seed);
    LawReport rep;
    rep.law = law;
    rep.seed = seed;
    auto compare = [&](const TimedWord& w, const std::vector<bool>& x, const std::vector<bool>& y, const std::string& what) {
        rep.positions += x.size();
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != y[i]) {
                ++rep.violations;
                if (rep.counterexamples.size() < keep)
                    rep.counterexamples.emplace_back(w, what + " at position " + std::to_string(i + 1));
                return;
            }
    };
    for (std::size_t n = 0; n < samples; ++n, ++rep.samples) {
        TimedWord w = gen_random_word(rng, ab, grid);
        switch (law) {
            case Law::Duality: {
                Formula g = gen_random_formula(rng, ab, 2, Fragment::UntilISinceI);
                Interval iv = detail::random_interval(rng, true, false);
                const auto row = eval_row(w, g);
                compare(w, eval_row(w, always(iv, g)), detail::box_by_definition(w, row, iv, false), "box " + iv.str());
                compare(w, eval_row(w, historically(iv, g)), detail::box_by_definition(w, row, iv, true), "historically " + iv.str());
                break;
            }
            case Law::ShiftInvariance: {
                Formula g = gen_random_formula(rng, ab, 3, Fragment::UntilISinceI);
                Rational delta = Rational(static_cast<std::int64_t>(rng.below(25)), 4) - w.time(1);
                compare(w, eval_row(w, g), eval_row(shift_word(w, delta), g), render_formula(g) + " shifted by " + time_to_string(delta));
                break;
            }
            case Law::IntervalSplit: {
                const std::uint64_t l = rng.below(4), m = l + 1 + rng.below(4 - l);
                Formula g = gen_random_formula(rng, ab, 1, Fragment::UntilISinceI);
                std::vector<Formula> units;
                for (std::uint64_t k = l; k < m; ++k) units.push_back(once(Interval::left_closed(k, k + 1), g));
                compare(w, eval_row(w, once(Interval::left_closed(l, m), g)), eval_row(w, disj_all(units)),
                        "split of [" + std::to_string(l) + "," + std::to_string(m) + ")");
                break;
            }
            case Law::BoundedSince: {
                const std::uint64_t l = rng.below(4);
                std::optional<std::uint64_t> r;
                if (rng.coin()) r = l + 1;
                Formula a = gen_random_formula(rng, ab, 1, Fragment::UntilISinceI);
                Formula b = gen_random_formula(rng, ab, 1, Fragment::UntilISinceI);
                Formula lhs = since(a, Interval::left_closed(l, r), b);
                Formula rhs = conj(once(Interval::left_closed(l, r), b), since(a, b));
                if (l > 0) rhs = conj(rhs, historically(Interval::left_closed(0, l), conj(a, since(a, b))));
                compare(w, eval_row(w, lhs), eval_row(w, rhs), render_formula(lhs));
                break;
            }
        }
    }
    return rep;
}

// ── Expressiveness word pairs ───────────────────────────────────────────

struct ExpressivenessParams {
    std::uint64_t n = 3;
    Rational delta, kappa, epsilon;

    static ExpressivenessParams defaults(std::uint64_t n) {
        Rational d(1, 2 * (n + 1));
        return {n, d, d / 2, Rational(1, 10 * (n + 1))};
    }
    void validate() const {
        if (n < 3) throw std::invalid_argument("expressiveness pairs need n >= 3");
        if (!(kappa > 0 && delta > 0 && epsilon > 0)) throw std::invalid_argument("delta, kappa and epsilon must be positive");
        if (!(kappa < delta)) throw std::invalid_argument("kappa must be smaller than delta");
        if (!(delta * n < 1)) throw std::invalid_argument("n * delta must be below 1");
        if (!(epsilon * n < Rational(1, 10))) throw std::invalid_argument("n * epsilon must be below 1/10");
    }
};

struct ExpressivenessPair {
    int which = 0;
    Formula formula;
    Alphabet alphabet;
    TimedWord w1, w2;
    bool v1 = false, v2 = false;      // evaluator verdicts
    bool text_v1 = false, text_v2 = false;  // verdicts expected for the uncorrected families
    std::vector<std::string> corrections;
    bool distinguishes() const { return v1 != v2; }
};

inline ExpressivenessPair expressiveness_pairs(int which, const ExpressivenessParams& p) {
    p.validate();
    const Alphabet ab{"a", "b"};
    const std::uint64_t n = p.n, i = (n + 1) / 2;
    const Rational d = p.delta, k = p.kappa, e = p.epsilon;
    auto word = [&](std::vector<std::pair<std::string, Rational>> pts) {
        std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
        std::vector<TimedPoint> v;
        for (auto& [q, t] : pts) v.push_back({{q}, t});
        return make_word(ab, std::move(v));
    };
    auto family = [&](const std::string& q, const Rational& off, bool with_kappa, std::optional<std::uint64_t> skip) {
        std::vector<std::pair<std::string, Rational>> v;
        for (std::uint64_t j = 1; j <= n; ++j)
            if (!skip || *skip != j) v.emplace_back(q, off + d * j);
        if (with_kappa) v.emplace_back(q, off + d * i - k);
        return v;
    };
    auto cat = [](auto x, const auto& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    ExpressivenessPair r;
    r.which = which;
    r.alphabet = ab;
    switch (which) {
        case 1:
            r.formula = parse_formula("F(0,1) (a & !F[1,1] (a | b))", ab);
            r.w1 = word(cat(family("a", 0, true, {}), family("b", 1, true, {})));
            r.w2 = word(cat(family("a", 0, true, {}), family("b", 1, true, i)));
            r.text_v1 = true;
            r.text_v2 = false;
            r.corrections = {"W'_b as given lists the same points as W_b; (b, 1+i*delta) is omitted from W'_b instead",
                             "with that omission the verdicts are reversed: w1 fails and w2 satisfies the formula"};
            break;
        case 2:
            r.formula = parse_formula("F (b & !P[1,1] (a | b))", ab);
            r.w1 = word(cat(family("a", 0, true, {}), family("b", 1, true, {})));
            r.w2 = word(cat(family("a", 0, false, {}), family("b", 1, true, {})));
            r.text_v1 = false;
            r.text_v2 = true;
            break;
        case 3: {
            r.formula = parse_formula("F(1,2) (a & !P(1,2) a)", ab);
            std::vector<std::pair<std::string, Rational>> w1{{"b", 0}}, w2{{"b", 0}};
            for (std::uint64_t j = 1; j <= n; ++j)
                for (auto* w : {&w1, &w2}) {
                    w->emplace_back("a", Rational(1, 2) + e * j);
                    w->emplace_back("a", Rational(9, 10) + e * j);
                    w->emplace_back("a", Rational(8, 5) + e * j);
                }
            w1.emplace_back("a", Rational(3, 2));
            r.w1 = word(w1);
            r.w2 = word(w2);
            r.text_v1 = true;
            r.text_v2 = false;
            r.corrections = {"both words start with an anchor point (b, 0); without it the formula is anchored at 0.5+epsilon and "
                             "(a, 1.5) lies outside its (1,2) window"};
            break;
        }
        default:
            throw std::invalid_argument("expressiveness case must be 1, 2 or 3");
    }
    r.v1 = satisfies(r.w1, r.formula);
    r.v2 = satisfies(r.w2, r.formula);
    return r;
}

}  // namespace mtlf
