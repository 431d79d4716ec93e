#pragma once

#include "mtlforge/evaluator.hpp"
#include "mtlforge/parser.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtlf {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// □̃(body ⇔ witness), or □̃(act ⇒ (rel(body) ⇔ witness)) once relativized.
struct TemporalDefinition {
    std::string witness;
    Formula body;
    bool relativized = false;
};

struct FlatFormula {
    Formula core;
    std::vector<TemporalDefinition> definitions;
    std::vector<Formula> constraints;  // future-only conjuncts that replaced definitions
    std::vector<TemporalDefinition> history;  // every definition ever introduced, in marking order
    Alphabet base_alphabet;
    Alphabet extended_alphabet;
};

// Deterministic fresh names "<prefix><k>" avoiding everything already used.
class NameSupply {
public:
    explicit NameSupply(Alphabet used = {}) : used_(std::move(used)) {}
    std::string fresh(const std::string& prefix = "w") {
        for (;;) {
            std::string s = prefix + std::to_string(++counter_[prefix]);
            if (!used_.contains(s)) {
                used_ = used_.with({s});
                return s;
            }
        }
    }
    void reserve(const Alphabet& a) { used_ = used_.united(a); }
    const Alphabet& used() const { return used_; }

private:
    Alphabet used_;
    std::unordered_map<std::string, unsigned> counter_;
};

// ── Relativization ──────────────────────────────────────────────────────

// Temporal operators only look at action points: φ U ψ becomes (act ⇒ φ) U (ψ ∧ act).
inline Formula relativize(const Formula& f, const Alphabet& base) {
    Formula a = act(base);
    return rebuild(f, [&](const Formula& g, Formula l, Formula r) -> Formula {
        if (g.kind() != Kind::Until && g.kind() != Kind::Since) return with_children(g, l, r);
        Formula ll = l.kind() == Kind::True ? l : implies(a, l);
        Formula rr = conj(r, a);
        return g.kind() == Kind::Until ? until(ll, g->iv, rr) : since(ll, g->iv, rr);
    });
}

inline Formula definition_formula(const TemporalDefinition& d, const Alphabet& base) {
    Formula w = atom(d.witness);
    if (!d.relativized) return weak_always(iff(d.body, w));
    return weak_always(implies(act(base), iff(relativize(d.body, base), w)));
}

inline Formula flat_conjunction(const FlatFormula& ff) {
    std::vector<Formula> parts{ff.core};
    for (const auto& c : ff.constraints) parts.push_back(c);
    for (const auto& d : ff.definitions) parts.push_back(definition_formula(d, ff.base_alphabet));
    return conj_all(parts);
}

// ── Bounded since ───────────────────────────────────────────────────────

// a S_[l,r) b  ~>  ◇⁻_[l,r) b ∧ (a S b) ∧ ⊟_[0,l)(a ∧ a S b); last conjunct dropped for l = 0.
// ◇⁻ nodes (left operand true) are left alone.
inline Formula rewrite_bounded_since(const Formula& f) {
    return rebuild(f, [](const Formula& g, Formula l, Formula r) -> Formula {
        if (g.kind() != Kind::Since || g->left.kind() == Kind::True || g->iv.is_unbounded()) return with_children(g, l, r);
        const Interval& iv = g->iv;
        if (!iv.lo_closed || iv.hi_closed || (iv.hi && *iv.hi <= iv.lo))
            throw ShapeError("unsupported since interval " + iv.str() + " in " + render_formula(g));
        Formula s = since(l, r);
        Formula out = conj(once(iv, r), s);
        if (iv.lo > 0) out = conj(out, historically(Interval::left_closed(0, iv.lo), conj(l, s)));
        return out;
    });
}

// ── Flattening ──────────────────────────────────────────────────────────

using Selector = std::function<bool(const Formula&)>;

inline bool is_past_rooted(const Formula& g) { return g.kind() == Kind::Since; }

struct FlattenOptions {
    Selector select = is_past_rooted;
    // Give non-atomic operands of selected past nodes their own witness, so every
    // past definition reads (c S f) or ◇⁻_I f over propositions.
    bool atomize_past_operands = true;
};

inline FlatFormula flatten(const Formula& f, const Alphabet& base, NameSupply& names, const FlattenOptions& opt = {}) {
    names.reserve(base);
    FlatFormula ff;
    ff.base_alphabet = base;
    std::vector<std::string> fresh;
    std::unordered_map<const Node*, std::string> witness_of;
    auto define = [&](const Formula& body) -> Formula {
        if (auto it = witness_of.find(body.get()); it != witness_of.end()) return atom(it->second);
        std::string w = names.fresh("w");
        fresh.push_back(w);
        witness_of.emplace(body.get(), w);
        ff.definitions.push_back({w, body, false});
        ff.history.push_back(ff.definitions.back());
        return atom(w);
    };
    auto atomic = [](const Formula& g) { return g.kind() == Kind::Atom || g.kind() == Kind::True; };
    ff.core = rebuild(f, [&](const Formula& g, Formula l, Formula r) -> Formula {
        if (!opt.select(g)) return with_children(g, l, r);
        if (opt.atomize_past_operands && g.kind() == Kind::Since) {
            if (!atomic(l)) l = define(l);
            if (r.kind() != Kind::Atom) r = define(r);
        }
        return define(with_children(g, l, r));
    });
    ff.extended_alphabet = base.with(fresh);
    return ff;
}

// ── Untimed since elimination ───────────────────────────────────────────

// Weak next: O ψ, or no next point at all.
inline Formula weak_next(const Formula& g) { return disj(ep(), next(g)); }

// ν_r for r ⇔ (c S f); `weak_next_at_end` lets the recurrence stop at the last point.
inline std::vector<Formula> nu_untimed_since(const std::string& r, const Formula& c, const Formula& f, bool weak_next_at_end = true) {
    Formula rr = atom(r);
    auto O = [&](const Formula& g) { return weak_next_at_end ? weak_next(g) : next(g); };
    return {
        weak_always(implies(f, O(rr))),
        neg(rr),
        always(implies(conj(rr, c), O(rr))),
        always(implies(conj(rr, conj(neg(c), neg(f))), O(neg(rr)))),
        weak_always(implies(conj(neg(rr), neg(f)), O(neg(rr)))),
    };
}

inline FlatFormula eliminate_untimed_since(const FlatFormula& in, bool weak_next_at_end = true) {
    FlatFormula out = in;
    out.definitions.clear();
    for (const auto& d : in.definitions) {
        if (d.body.kind() != Kind::Since || d.relativized) {
            out.definitions.push_back(d);
            continue;
        }
        if (!d.body->iv.is_unbounded()) {
            if (d.body->left.kind() != Kind::True)
                throw ShapeError("since definition with interval " + d.body->iv.str() + " for " + d.witness);
            out.definitions.push_back(d);  // timed ◇⁻, handled later
            continue;
        }
        for (auto& g : nu_untimed_since(d.witness, d.body->left, d.body->right, weak_next_at_end)) out.constraints.push_back(g);
    }
    return out;
}

// ── Splitting past intervals ────────────────────────────────────────────

inline bool is_timed_past(const Formula& b) {
    return b.kind() == Kind::Since && b->left.kind() == Kind::True && !b->iv.is_unbounded();
}

inline FlatFormula split_past_intervals(const FlatFormula& in, NameSupply& names) {
    FlatFormula out = in;
    out.definitions.clear();
    std::vector<std::string> fresh;
    for (const auto& d : in.definitions) {
        if (!is_timed_past(d.body)) {
            out.definitions.push_back(d);
            continue;
        }
        const Interval& iv = d.body->iv;
        const bool lc_ro = iv.lo_closed && !iv.hi_closed;
        const bool open_inf = !iv.lo_closed && !iv.hi;
        if (!(lc_ro || open_inf))
            throw ShapeError("unsupported past interval " + iv.str() + " in definition of " + d.witness);
        if (!iv.hi || *iv.hi == iv.lo + 1) {
            out.definitions.push_back(d);
            continue;
        }
        std::vector<Formula> parts;
        for (std::uint64_t k = iv.lo; k < *iv.hi; ++k) {
            std::string w = names.fresh("w");
            fresh.push_back(w);
            out.definitions.push_back({w, once(Interval::left_closed(k, k + 1), d.body->right), d.relativized});
            out.history.push_back(out.definitions.back());
            parts.push_back(atom(w));
        }
        out.definitions.push_back({d.witness, disj_all(parts), d.relativized});
    }
    out.extended_alphabet = out.extended_alphabet.with(fresh);
    return out;
}

// ── Oversampling closure ────────────────────────────────────────────────

inline FlatFormula oversample_close(const FlatFormula& in) {
    FlatFormula out = in;
    const Formula a = act(in.base_alphabet);
    out.core = conj(conj(relativize(in.core, in.base_alphabet), implies(bp(), a)), weak_always(implies(ep(), a)));
    for (auto& c : out.constraints) c = relativize(c, in.base_alphabet);
    for (auto& d : out.definitions) d.relativized = true;
    return out;
}

// ── Canonical witness marking ───────────────────────────────────────────

// Adds prop p at the positions where row holds.
inline TimedWord add_prop(const TimedWord& w, const std::string& p, const std::vector<bool>& row) {
    std::vector<TimedPoint> pts = w.points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (row[i]) pts[i].props.push_back(p);
    return make_word(w.alphabet().with({p}), std::move(pts));
}

// Marks every witness exactly where its body holds (action points only once
// relativized), in definition order. The result is a simple extension of w.
inline TimedWord canonical_extension(const TimedWord& w, const FlatFormula& ff) {
    TimedWord cur = w;
    for (const auto& d : ff.history) {
        Formula body = d.relativized ? conj(relativize(d.body, ff.base_alphabet), act(ff.base_alphabet)) : d.body;
        cur = add_prop(cur, d.witness, eval_row(cur, body));
    }
    return cur;
}

}  // namespace mtlf
