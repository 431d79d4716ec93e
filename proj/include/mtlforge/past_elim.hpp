#pragma once

#include "mtlforge/evaluator.hpp"
#include "mtlforge/transforms.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mtlf {

// ── Shapes ──────────────────────────────────────────────────────────────

struct PastShape {
    std::string witness;  // b
    std::string operand;  // a
    Interval iv;
};

inline PastShape past_shape(const TemporalDefinition& d) {
    const Formula& g = d.body;
    if (g.kind() != Kind::Since || g->left.kind() != Kind::True || g->right.kind() != Kind::Atom)
        throw ShapeError("definition of " + d.witness + " is not of the form P_I a: " + render_formula(g));
    return {d.witness, g->right->prop, g->iv};
}

inline bool is_past_inf(const TemporalDefinition& d) {
    if (!is_timed_past(d.body) || d.body->iv.hi) return false;
    return true;
}
inline bool is_past_unit(const TemporalDefinition& d) {
    const Interval& iv = d.body->iv;
    return is_timed_past(d.body) && iv.lo_closed && !iv.hi_closed && iv.hi && *iv.hi == iv.lo + 1;
}

// ── P_[l,inf) and P_(l,inf) ──────────────────────────────────────────────

// ν = φ1 ∧ φ2 with α = act ⇒ (¬a ∧ ¬b). The closed variant cuts off at [0,l), the
// open one at [0,l]; for l = 0 the closed cutoff is the current point.
inline std::vector<Formula> past_inf_conjuncts(const TemporalDefinition& d, const Alphabet& base) {
    if (!d.relativized) throw ShapeError("past elimination expects a relativized definition of " + d.witness);
    PastShape s = past_shape(d);
    if (s.iv.hi) throw ShapeError("not an unbounded past interval: " + s.iv.str());
    const std::uint64_t l = s.iv.lo;
    const Formula A = act(base), a = atom(s.operand), b = atom(s.witness);
    const Formula aa = conj(a, A);
    const Formula alpha = implies(A, conj(neg(a), neg(b)));
    Interval cutoff = s.iv.lo_closed ? (l == 0 ? Interval::point(0) : Interval::left_closed(0, l)) : Interval::closed(0, l);
    Interval ahead = s.iv.lo_closed ? Interval::left_closed(l, std::nullopt) : Interval::open(l, std::nullopt);
    Formula phi1 = disj(weak_always(alpha), weak_until(alpha, conj(aa, weak_always(cutoff, implies(A, neg(b))))));
    Formula phi2 = weak_always(implies(aa, always(ahead, implies(A, b))));
    return {phi1, phi2};
}

inline Formula eliminate_past_inf(const TemporalDefinition& d, const Alphabet& base) {
    return conj_all(past_inf_conjuncts(d, base));
}

// ── P_[l,l+1) ────────────────────────────────────────────────────────────

struct UnitAux {
    std::string c, beg, end;
};

enum class UnitVariant { Literal, Repaired };

// Individual departures from the literal φ-clauses; Repaired enables all of them.
struct UnitRepairs {
    bool phi2_guard = true;    // an end marker needs a first a exactly l before it
    bool phi4_last = true;     // the last unit's a may have no following c
    bool phi4_guard = true;    // a beg marker needs a last a exactly l+1 before it
    bool phi7_edges = true;    // markers may sit on c or on EP
    bool region = true;        // the ¬b region is nonempty unless it starts at end_b
    bool phi9_anchor = true;   // φ9 looks l+1 ahead from the a-free unit

    static UnitRepairs none() { return {false, false, false, false, false, false}; }
    static UnitRepairs all() { return {}; }
    static UnitRepairs of(UnitVariant v) { return v == UnitVariant::Repaired ? all() : none(); }
    friend bool operator==(const UnitRepairs&, const UnitRepairs&) = default;
};

struct UnitElimResult {
    Formula psi;
    std::vector<Formula> parts;  // φ1..φ10 in order (φ3 absent when l = 0; φ7 covers both markers)
    std::vector<std::string> labels;
    UnitAux aux;
    TemporalDefinition source;
    std::uint64_t l = 0;
};

namespace detail {

inline Formula wev(std::uint64_t lo, std::optional<std::uint64_t> hi, bool lc, bool hc, const Formula& g) {
    if (!Interval::nonempty(lo, hi, lc, hc)) return fls();
    return weak_eventually(Interval::make(lo, hi, lc, hc), g);
}
inline Formula wal(std::uint64_t lo, std::optional<std::uint64_t> hi, bool lc, bool hc, const Formula& g) {
    if (!Interval::nonempty(lo, hi, lc, hc)) return tru();
    return weak_always(Interval::make(lo, hi, lc, hc), g);
}
inline Interval lcro(std::uint64_t lo, std::uint64_t hi) { return Interval::left_closed(lo, hi); }

}  // namespace detail

inline UnitElimResult eliminate_past_unit(const TemporalDefinition& d, const Alphabet& base, const UnitAux& aux,
                                          const UnitRepairs& fix = UnitRepairs::all()) {
    using namespace detail;
    if (!d.relativized) throw ShapeError("past elimination expects a relativized definition of " + d.witness);
    if (!is_past_unit(d)) throw ShapeError("not a unit past interval [l,l+1): " + render_formula(d.body));
    PastShape s = past_shape(d);
    const std::uint64_t l = s.iv.lo;
    const Formula A = act(base), a = atom(s.operand), b = atom(s.witness);
    const Formula c = atom(aux.c), beg = atom(aux.beg), end = atom(aux.end), EP = ep();
    const Formula aa = conj(a, A);
    const Formula no_a = implies(A, neg(a));
    const Formula no_b = implies(A, neg(b));

    UnitElimResult res;
    res.aux = aux;
    res.source = d;
    res.l = l;
    auto add = [&](const std::string& label, Formula g) {
        res.labels.push_back(label);
        res.parts.push_back(std::move(g));
    };

    // φ1: c exactly at the integer points
    add("phi1", conj(c, weak_always(implies(conj(c, neg(EP)),
                                            conj(always(Interval::open(0, 1), neg(c)),
                                                 disj(eventually(Interval::point(1), c), eventually(Interval::open(0, 1), EP)))))));

    // φ2: end at distance l from the first a of each unit interval
    Formula end_here = wev(l, l, true, true, end);
    Formula phi2 = weak_always(implies(conj(c, weak_eventually(lcro(0, 1), aa)),
                                       weak_until(no_a, lcro(0, 1), conj(aa, disj(end_here, wev(0, l, true, false, EP))))));
    if (fix.phi2_guard)
        phi2 = conj(phi2, weak_always(implies(conj(c, weak_eventually(lcro(l, l + 1), end)),
                                              weak_until(no_a, lcro(0, 1), conj(aa, end_here)))));
    add("phi2", phi2);
    if (l != 0) add("phi3", weak_always(lcro(0, l), neg(end)));

    // φ4: beg at distance l+1 from the last a of each unit interval
    Formula last_a = until(conj(no_a, neg(c)), c);
    if (fix.phi4_last) last_a = disj(last_a, always(conj(no_a, neg(c))));
    Formula beg_there = eventually(Interval::point(l + 1), beg);
    Formula phi4 = weak_always(implies(conj(c, weak_eventually(lcro(0, 1), aa)),
                                       weak_eventually(lcro(0, 1), conj(conj(aa, last_a), disj(beg_there, wev(0, l + 1, true, false, EP))))));
    if (fix.phi4_guard)
        phi4 = conj(phi4, weak_always(implies(conj(c, weak_eventually(lcro(l + 1, l + 2), beg)),
                                              weak_eventually(lcro(0, 1), conj(conj(aa, last_a), beg_there)))));
    add("phi4", phi4);
    add("phi5", weak_always(lcro(0, l + 1), neg(beg)));

    // φ6: unit intervals without a produce no markers
    add("phi6", weak_always(implies(conj(c, weak_always(lcro(0, 1), no_a)),
                                    conj(weak_always(lcro(l, l + 1), neg(end)), weak_always(lcro(l + 1, l + 2), neg(beg))))));

    // φ7: at most one marker of each kind per unit interval
    std::vector<Formula> phi7;
    for (const Formula& x : {end, beg}) {
        Formula after = fix.phi7_edges ? disj(EP, until(conj(neg(x), neg(c)), Interval::make(0, 1, false, true), disj(c, conj(EP, neg(x)))))
                              : until(conj(neg(x), neg(c)), Interval::open(0, 1), disj(c, EP));
        phi7.push_back(weak_always(implies(conj(c, weak_eventually(lcro(0, 1), x)), weak_until(neg(x), lcro(0, 1), conj(x, after)))));
    }
    add("phi7", conj(phi7[0], phi7[1]));

    // φ8: b wherever some a lies at past distance [l,l+1)
    add("phi8", weak_always(implies(aa, always(lcro(l, l + 1), implies(A, b)))));

    // φ9, φ10: ¬b from the region start (c, resp. beg) up to end_b / next c / EP
    const Formula stop = disj(end, disj(c, EP));
    Formula region;
    if (!fix.region) {
        region = weak_until(conj(no_b, neg(stop)), stop);
    } else {
        Formula mid = conj(no_b, neg(stop));
        if (l > 0)
            region = disj(end, conj(no_b, disj(EP, until(mid, disj(c, disj(end, conj(EP, no_b)))))));
        else
            region = conj(no_b, disj(end, disj(EP, until(mid, disj(c, conj(disj(end, EP), no_b))))));
    }
    if (!fix.phi9_anchor) {
        add("phi9", weak_always(implies(conj(c, weak_always(lcro(0, 1), neg(beg))), region)));
    } else {
        // anchored at the unit that holds no a, l+1 earlier: a beg cut off by EP is then not mistaken
        // for an absent one; units before l+1 have no source unit at all
        add("phi9", conj(weak_always(implies(conj(c, weak_always(lcro(0, 1), no_a)), wal(l + 1, l + 1, true, true, region))),
                         weak_always(lcro(0, l + 1), implies(c, region))));
    }
    add("phi10", weak_always(implies(conj(c, weak_until(neg(end), lcro(0, 1), beg)), weak_eventually(lcro(0, 1), conj(beg, region)))));

    res.psi = conj_all(res.parts);
    return res;
}

inline UnitElimResult eliminate_past_unit(const TemporalDefinition& d, const Alphabet& base, const UnitAux& aux, UnitVariant v) {
    return eliminate_past_unit(d, base, aux, UnitRepairs::of(v));
}

// ── Witness construction ─────────────────────────────────────────────────

struct UnitMarking {
    TemporalDefinition def;
    UnitAux aux;
};

// c at every integer in [0, time(w)]; per unit interval [t,t+1) holding a∧act,
// end at first + l and beg at last + l + 1 when within time(w). Requires t_1 = 0.
inline TimedWord add_unit_markers(const TimedWord& w, const std::vector<UnitMarking>& ms, const Alphabet& base) {
    if (w.time(1) != 0) throw WordError(WordError::Code::Precondition, "witness construction expects t_1 = 0");
    const Rational T = w.duration();
    std::map<Rational, std::set<std::string>> extra;
    std::vector<std::string> aux_props;
    const auto floorT = static_cast<std::uint64_t>(numerator(T) / denominator(T));
    for (const auto& m : ms) {
        for (std::uint64_t t = 0; t <= floorT; ++t) extra[Rational(t)].insert(m.aux.c);
        aux_props.insert(aux_props.end(), {m.aux.c, m.aux.beg, m.aux.end});
        PastShape s = past_shape(m.def);
        const std::uint64_t l = s.iv.lo;
        for (std::uint64_t t = 0; t <= floorT; ++t) {
            std::optional<Rational> first, last;
            for (const auto& p : w.points())
                if (p.t >= t && p.t < t + 1 && p.has(s.operand) && is_action_point(p, base)) {
                    if (!first) first = p.t;
                    last = p.t;
                }
            if (!first) continue;
            if (*first + l <= T) extra[*first + l].insert(m.aux.end);
            if (*last + l + 1 <= T) extra[*last + l + 1].insert(m.aux.beg);
        }
    }
    std::vector<TimedPoint> pts;
    auto it = extra.begin();
    for (const auto& p : w.points()) {
        for (; it != extra.end() && it->first < p.t; ++it) pts.push_back({{it->second.begin(), it->second.end()}, it->first});
        TimedPoint q = p;
        if (it != extra.end() && it->first == p.t) {
            q.props.insert(q.props.end(), it->second.begin(), it->second.end());
            ++it;
        }
        pts.push_back(std::move(q));
    }
    return make_word(w.alphabet().with(aux_props), std::move(pts));
}

// Oversampled witness for a single unit definition; checks w ⊨ def first.
inline TimedWord build_oversampled_witness(const TimedWord& w, const TemporalDefinition& d, const UnitAux& aux, const Alphabet& base) {
    Formula x = definition_formula(d, base);
    auto row = eval_row(w, x);
    if (!row[0]) {
        // report the first action point where the witness disagrees with its body
        Formula inner = implies(act(base), iff(relativize(d.body, base), atom(d.witness)));
        auto r = eval_row(w, inner);
        std::size_t pos = 1;
        while (pos <= r.size() && r[pos - 1]) ++pos;
        throw WordError(WordError::Code::Precondition, "word does not satisfy the definition of " + d.witness + " at position " + std::to_string(pos), pos);
    }
    return add_unit_markers(w, {{d, aux}}, base);
}

inline UnitAux fresh_unit_aux(const TemporalDefinition& d, NameSupply& names, const std::string& c) {
    auto pick = [&](const std::string& want) {
        if (!names.used().contains(want)) {
            names.reserve(Alphabet{want});
            return want;
        }
        return names.fresh(want + "_");
    };
    return {c, pick("beg_" + d.witness), pick("end_" + d.witness)};
}

// ── Full past-elimination pipeline ───────────────────────────────────────────────────

struct PassReport {
    std::string pass;
    std::size_t size = 0;  // DAG size of the conjunction after the pass
    std::vector<std::string> fresh;
};

struct PipelineResult {
    Formula output;
    Alphabet alphabet;  // Σ″
    Alphabet base;      // Σ
    std::vector<PassReport> passes;
    Fragment fragment = Fragment::UntilI;
    FlatFormula flat;                     // after oversampling closure, before past elimination
    std::vector<UnitMarking> unit_defs;   // eliminated ◇⁻_[l,l+1) definitions
    std::vector<TemporalDefinition> inf_defs;
    std::vector<UnitElimResult> unit_results;
    std::string c;                        // shared integer marker, empty when unused
};

struct PipelineOptions {
    UnitRepairs repairs = UnitRepairs::all();
    bool weak_next_at_end = true;
};

inline PipelineResult pipeline_to_future(const Formula& f, const Alphabet& base, const PipelineOptions& opt = {}) {
    for (const auto& p : atoms_of(f))
        if (!base.contains(p)) throw AlphabetError("atom '" + p + "' outside the base alphabet");
    PipelineResult res;
    res.base = base;
    NameSupply names(base);
    auto record = [&](const std::string& pass, const FlatFormula& ff, const Alphabet& before) {
        PassReport r{pass, dag_size(flat_conjunction(ff)), {}};
        for (const auto& p : ff.extended_alphabet.props())
            if (!before.contains(p)) r.fresh.push_back(p);
        res.passes.push_back(std::move(r));
    };

    Formula g = rewrite_bounded_since(f);
    FlatFormula ff;
    ff.core = g;
    ff.base_alphabet = ff.extended_alphabet = base;
    record("rewrite_bounded_since", ff, base);
    ff = flatten(g, base, names);
    record("flatten", ff, base);
    Alphabet prev = ff.extended_alphabet;
    ff = eliminate_untimed_since(ff, opt.weak_next_at_end);
    record("eliminate_untimed_since", ff, prev);
    prev = ff.extended_alphabet;
    ff = split_past_intervals(ff, names);
    record("split_past_intervals", ff, prev);
    prev = ff.extended_alphabet;
    ff = oversample_close(ff);
    record("oversample_close", ff, prev);
    res.flat = ff;

    std::vector<Formula> parts{ff.core};
    for (const auto& c : ff.constraints) parts.push_back(c);
    std::vector<std::string> aux;
    for (const auto& d : ff.definitions) {
        if (!has_since(d.body)) {
            parts.push_back(definition_formula(d, base));
        } else if (is_past_inf(d)) {
            parts.push_back(eliminate_past_inf(d, base));
            res.inf_defs.push_back(d);
        } else if (is_past_unit(d)) {
            if (res.c.empty()) {
                res.c = names.used().contains("c") ? names.fresh("c") : "c";
                names.reserve(Alphabet{res.c});
                aux.push_back(res.c);
            }
            UnitAux ua = fresh_unit_aux(d, names, res.c);
            aux.insert(aux.end(), {ua.beg, ua.end});
            UnitElimResult u = eliminate_past_unit(d, base, ua, opt.repairs);
            parts.push_back(u.psi);
            res.unit_defs.push_back({d, ua});
            res.unit_results.push_back(std::move(u));
        } else {
            throw ShapeError("no elimination for the definition of " + d.witness + ": " + render_formula(d.body));
        }
    }
    res.output = conj_all(parts);
    res.alphabet = ff.extended_alphabet.with(aux);
    res.passes.push_back({"eliminate_past", dag_size(res.output), aux});
    if (has_since(res.output)) throw std::logic_error("pipeline output still contains a since node");
    res.fragment = classify_fragment(res.output);
    return res;
}

// Constructive model extension: canonical witnesses, then the integer and
// beg/end markers computed on the word shifted to t_1 = 0 and shifted back.
inline TimedWord extend_model(const PipelineResult& p, const TimedWord& w) {
    if (!(w.alphabet() == p.base)) throw WordError(WordError::Code::AlphabetMismatch, "word alphabet differs from the base alphabet");
    const Rational t1 = w.time(1);
    TimedWord cur = canonical_extension(shift_word(w, -t1), p.flat);
    if (!p.unit_defs.empty()) cur = add_unit_markers(cur, p.unit_defs, p.base);
    std::vector<TimedPoint> pts = cur.points();
    for (auto& q : pts) q.t += t1;
    return make_word(p.alphabet, std::move(pts));
}

}  // namespace mtlf
