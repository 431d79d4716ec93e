#pragma once

// Brute-force oracles for the past-elimination constructions.

#include "mtlforge/generators.hpp"
#include "mtlforge/past_elim.hpp"

#include <bit>
#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace mtlf {

// ── ◇⁻_[l,inf) / ◇⁻_(l,inf) as a word-level equivalence ──────────────────

struct PastInfReport {
    std::uint64_t l = 0;
    bool open = false;
    std::size_t words = 0;
    std::size_t mismatches = 0;
    std::vector<TimedWord> counterexamples;
};

// Alphabet {a, b, x}; base {a, x}; b is the witness.
inline PastInfReport check_past_inf_exhaustive(std::uint64_t l, bool open, const GridSpec& grid, std::size_t keep = 5) {
    const Alphabet sig{"a", "b", "x"}, base{"a", "x"};
    Interval iv = open ? Interval::open(l, std::nullopt) : Interval::left_closed(l, std::nullopt);
    TemporalDefinition d{"b", once(iv, atom("a")), true};
    Program px(definition_formula(d, base), sig), pn(eliminate_past_inf(d, base), sig);
    Evaluator ex(px), en(pn);
    PastInfReport rep;
    rep.l = l;
    rep.open = open;
    enumerate_fast(sig.size(), grid, [&](const FastWord& w) {
        ++rep.words;
        if (ex.run(w) != en.run(w)) {
            ++rep.mismatches;
            if (rep.counterexamples.size() < keep) rep.counterexamples.push_back(from_fast(w, sig));
        }
        return true;
    });
    return rep;
}

// ── First/last occurrence characterization of ◇⁻_[l,l+1) ────────────────

// For τ_i ∈ [t+l+1, t+l+2): some a at (τ_i-l-1, τ_i-l], split at t+1.
inline bool unit_past_condition(const TimedWord& w, std::string_view a, std::uint64_t l, std::uint64_t t, std::size_t i) {
    const Rational& ti = w.time(i);
    auto L = last_occurrence(w, a, t);
    auto F = first_occurrence(w, a, t);
    auto F2 = first_occurrence(w, a, t + 1);
    bool first = F && ti > *F && ti >= t + l + 1 && ti < *L + l + 1;
    bool second = F2 && ti > *F2 && ti >= *F2 + l && ti < t + l + 2;
    return first || second;
}

struct UnitPastReport {
    std::size_t words = 0, positions = 0, mismatches = 0;
};

inline UnitPastReport check_unit_past_condition(std::uint64_t seed, std::size_t words, std::uint64_t max_l) {
    const Alphabet sig{"a", "b"};
    Rng rng(seed);
    UnitPastReport rep;
    for (std::size_t n = 0; n < words; ++n) {
        TimedWord w = gen_random_word(rng, sig, GridSpec{10, 4, 8});
        ++rep.words;
        for (std::uint64_t l = 0; l <= max_l; ++l) {
            auto row = eval_row(w, once(Interval::left_closed(l, l + 1), atom("a")));
            for (std::uint64_t t = 0; t <= 3; ++t)
                for (std::size_t i = 1; i <= w.size(); ++i) {
                    const Rational& ti = w.time(i);
                    if (ti < t + l + 1 || ti >= t + l + 2) continue;
                    ++rep.positions;
                    rep.mismatches += unit_past_condition(w, "a", l, t, i) != row[i - 1];
                }
        }
    }
    return rep;
}

// ── ◇⁻_[l,l+1) elimination, exhaustively ────────────────────────────────

struct UnitElimReport {
    std::uint64_t l = 0;
    UnitRepairs repairs;
    GridSpec grid;
    // c-marking: words over {c, y} where the c clause holds are exactly those with
    // c at t_1 + k for every integer k with t_1 + k <= duration
    std::size_t c_words = 0, c_mismatches = 0;
    // direction 1
    std::size_t skeletons = 0, skeletons_passing = 0, psi_models = 0, dir1_violations = 0;
    std::vector<TimedWord> dir1_counterexamples;
    // marker uniqueness over psi-models with Σ′ endpoints
    std::size_t groups = 0, uniqueness_violations = 0;
    std::vector<std::pair<TimedWord, TimedWord>> uniqueness_counterexamples;
    // direction 2
    std::size_t dir2_words = 0, dir2_models = 0, dir2_violations = 0;
    std::vector<std::pair<TimedWord, std::string>> dir2_counterexamples;
    double seconds = 0;

    bool ok() const { return c_mismatches == 0 && dir1_violations == 0 && uniqueness_violations == 0 && dir2_violations == 0; }
};

namespace detail {

// Σ = {a, x}, Σ′ = Σ ∪ {b}, Δ = Σ′ ∪ {c, beg_b, end_b}.
struct UnitSetup {
    Alphabet base{"a", "x"};
    Alphabet sigma1{"a", "b", "x"};
    UnitAux aux{"c", "beg_b", "end_b"};
    Alphabet delta = sigma1.with({"c", "beg_b", "end_b"});
    TemporalDefinition def;
    UnitElimResult res;
    UnitSetup(std::uint64_t l, const UnitRepairs& v)
        : def{"b", once(Interval::left_closed(l, l + 1), atom("a")), true}, res(eliminate_past_unit(def, base, aux, v)) {}
    std::uint64_t bit(const char* p) const { return 1ULL << delta.index_of(p); }
};

inline std::size_t check_c_marking(const UnitSetup& s, const GridSpec& grid) {
    const Alphabet cy{"c", "y"};
    Program p(s.res.parts[0], cy);
    Evaluator ev(p);
    std::size_t bad = 0;
    enumerate_fast(2, grid, [&](const FastWord& w) {
        bool expect = true;
        const std::int64_t t0 = w.ticks[0], sc = w.scale;
        std::size_t k = 0;
        for (std::int64_t t = t0; t <= w.ticks.back(); t += sc) {
            while (k < w.size() && w.ticks[k] < t) {
                if (w.props[k] & 1) expect = false;  // c off the integer grid
                ++k;
            }
            if (k == w.size() || w.ticks[k] != t || !(w.props[k] & 1)) expect = false;
            else ++k;
        }
        for (; k < w.size(); ++k)
            if (w.props[k] & 1) expect = false;
        bad += ev.run(w) != expect;
        return true;
    });
    return bad;
}

}  // namespace detail

// Direction 1 fixes t_1 = 0 (satisfaction is shift invariant) and c exactly at the
// integer points (validated by check_c_marking), enumerates the b-independent
// skeleton (a, beg, end) and only then the (b, x) labelling.
inline UnitElimReport check_unit_elim_exhaustive(std::uint64_t l, const UnitRepairs& repairs, const GridSpec& grid, std::size_t keep = 5) {
    auto t0 = std::chrono::steady_clock::now();
    detail::UnitSetup s(l, repairs);
    UnitElimReport rep;
    rep.l = l;
    rep.repairs = repairs;
    rep.grid = grid;
    rep.c_words = count_words(2, GridSpec{grid.max_len, grid.denom, grid.horizon}).convert_to<std::size_t>();
    rep.c_mismatches = detail::check_c_marking(s, grid);

    std::vector<Formula> early(s.res.parts.begin(), s.res.parts.end() - 3), late(s.res.parts.end() - 3, s.res.parts.end());
    Program p_early(conj_all(early), s.delta), p_late(conj_all(late), s.delta), p_def(definition_formula(s.def, s.base), s.delta);
    Evaluator e_early(p_early), e_late(p_late), e_def(p_def);
    const std::uint64_t A = s.bit("a"), B = s.bit("b"), X = s.bit("x"), C = s.bit("c"), BEG = s.bit("beg_b"), END = s.bit("end_b");
    const std::uint64_t skel_bits[3] = {A, BEG, END};
    const std::uint64_t sig1 = A | B | X, auxm = C | BEG | END;
    const std::size_t slots = grid.slots();
    const auto den = static_cast<std::int64_t>(grid.denom);
    std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> seen;
    std::map<std::vector<std::uint64_t>, FastWord> seen_word;

    FastWord w;
    w.scale = den;
    for (std::uint64_t mask = 0; mask < (1ULL << (slots - 1)); ++mask) {
        const std::size_t k = 1 + static_cast<std::size_t>(std::popcount(mask));
        if (k > grid.max_len) continue;
        w.ticks.assign(1, 0);
        for (std::size_t j = 0; j + 1 < slots; ++j)
            if (mask >> j & 1) w.ticks.push_back(static_cast<std::int64_t>(j + 1));
        bool closed = true;  // every integer up to the last point must be present
        for (std::int64_t t = 0; t <= w.ticks.back(); t += den)
            closed &= std::find(w.ticks.begin(), w.ticks.end(), t) != w.ticks.end();
        if (!closed) continue;
        std::vector<std::uint64_t> cbit(k);
        for (std::size_t i = 0; i < k; ++i) cbit[i] = w.ticks[i] % den == 0 ? C : 0;
        const std::uint64_t nskel = 1ULL << (3 * k);
        w.props.assign(k, 0);
        for (std::uint64_t sk = 0; sk < nskel; ++sk) {
            std::vector<std::uint64_t> base_props(k);
            for (std::size_t i = 0; i < k; ++i) {
                std::uint64_t m = cbit[i];
                for (int b = 0; b < 3; ++b)
                    if (sk >> (3 * i + b) & 1) m |= skel_bits[b];
                base_props[i] = m;
                w.props[i] = m | X;  // x never changes the skeleton clauses; keep points nonempty
            }
            ++rep.skeletons;
            if (!e_early.run(w)) continue;
            ++rep.skeletons_passing;
            const std::uint64_t nlab = 1ULL << (2 * k);
            for (std::uint64_t lab = 0; lab < nlab; ++lab) {
                bool valid = true;
                for (std::size_t i = 0; i < k; ++i) {
                    std::uint64_t m = base_props[i];
                    if (lab >> (2 * i) & 1) m |= B;
                    if (lab >> (2 * i + 1) & 1) m |= X;
                    if (!m) valid = false;
                    w.props[i] = m;
                }
                if (!valid) continue;
                if (!e_early.run(w) || !e_late.run(w)) continue;
                ++rep.psi_models;
                if (!e_def.run(w)) {
                    ++rep.dir1_violations;
                    if (rep.dir1_counterexamples.size() < keep) rep.dir1_counterexamples.push_back(from_fast(w, s.delta));
                }
                if ((w.props[0] & sig1) && (w.props[k - 1] & sig1)) {
                    std::vector<std::uint64_t> key, val;
                    for (std::size_t i = 0; i < k; ++i) {
                        if (w.props[i] & sig1) key.insert(key.end(), {static_cast<std::uint64_t>(w.ticks[i]), w.props[i] & sig1});
                        if (w.props[i] & auxm) val.insert(val.end(), {static_cast<std::uint64_t>(w.ticks[i]), w.props[i] & auxm});
                    }
                    auto [it, fresh] = seen.emplace(key, val);
                    if (fresh) {
                        seen_word.emplace(key, w);
                    } else if (it->second != val) {
                        ++rep.uniqueness_violations;
                        if (rep.uniqueness_counterexamples.size() < keep)
                            rep.uniqueness_counterexamples.emplace_back(from_fast(seen_word.at(key), s.delta), from_fast(w, s.delta));
                    }
                }
            }
        }
    }
    rep.groups = seen.size();

    // direction 2: every X̂-model over Σ′ with t_1 = 0 (others are shifts of these)
    Program p_def1(definition_formula(s.def, s.base), s.sigma1), p_psi(s.res.psi, s.delta);
    Evaluator e_def1(p_def1), e_psi(p_psi);
    enumerate_fast(s.sigma1.size(), grid, [&](const FastWord& v) {
        if (v.ticks[0] != 0) return true;
        ++rep.dir2_words;
        if (!e_def1.run(v)) return true;
        ++rep.dir2_models;
        TimedWord orig = from_fast(v, s.sigma1);
        TimedWord wit = add_unit_markers(orig, {{s.def, s.aux}}, s.base);
        bool proj = restrict_word(wit, s.sigma1) == std::optional<TimedWord>(orig);
        if (!proj || !e_psi.run(to_fast(wit, s.delta))) {
            ++rep.dir2_violations;
            if (rep.dir2_counterexamples.size() < keep) {
                std::string why = proj ? "" : "projection ";
                for (std::size_t j = 0; j < s.res.parts.size(); ++j)
                    if (!satisfies(wit, s.res.parts[j])) why += s.res.labels[j] + " ";
                rep.dir2_counterexamples.emplace_back(wit, why);
            }
        }
        return true;
    });
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace mtlf
