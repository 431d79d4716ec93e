#pragma once

#include "mtlforge/timed_word.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace mtlf {

class EvalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ── Direct recursive semantics (reference) ─────────────────────────────

inline bool eval_at(const TimedWord& w, std::size_t i, const Formula& f);

namespace detail {
inline bool eval_rec(const TimedWord& w, std::size_t i, const Formula& f) {
    const std::size_t n = w.size();
    switch (f.kind()) {
        case Kind::Atom:
            if (!w.alphabet().contains(f->prop)) throw EvalError("unknown atom '" + f->prop + "'");
            return w.at(i).has(f->prop);
        case Kind::BP: return i == 1;
        case Kind::EP: return i == n;
        case Kind::True: return true;
        case Kind::Not: return !eval_rec(w, i, f->left);
        case Kind::And: return eval_rec(w, i, f->left) && eval_rec(w, i, f->right);
        case Kind::Until:
            for (std::size_t j = i + 1; j <= n; ++j) {
                if (f->iv.contains(w.time(j) - w.time(i)) && eval_rec(w, j, f->right)) return true;
                if (!eval_rec(w, j, f->left)) return false;
            }
            return false;
        case Kind::Since:
            for (std::size_t j = i - 1; j >= 1; --j) {
                if (f->iv.contains(w.time(i) - w.time(j)) && eval_rec(w, j, f->right)) return true;
                if (!eval_rec(w, j, f->left)) return false;
            }
            return false;
    }
    return false;
}
}  // namespace detail

inline bool eval_at(const TimedWord& w, std::size_t i, const Formula& f) {
    if (i < 1 || i > w.size()) throw EvalError("position " + std::to_string(i) + " out of range");
    return detail::eval_rec(w, i, f);
}

// ── Compiled bottom-up evaluation ──────────────────────────────────────

// Formula flattened to post-order instructions over a fixed alphabet.
class Program {
public:
    struct Op {
        Kind kind;
        int a = -1, b = -1;  // operand instruction indices
        int atom = -1;       // alphabet index for Atom
        int iv = -1;         // interval slot for Until/Since
    };

    Program(const Formula& f, const Alphabet& sigma) : sigma_(sigma) {
        auto subs = subformulas(f);
        std::unordered_map<const Node*, int> index;
        for (const auto& g : subs) {
            Op op{g.kind()};
            if (g.kind() == Kind::Atom) {
                op.atom = sigma.index_of(g->prop);
                if (op.atom < 0) throw EvalError("unknown atom '" + g->prop + "'");
            }
            if (g->left) op.a = index.at(g->left.get());
            if (g->right) op.b = index.at(g->right.get());
            if (g.kind() == Kind::Until || g.kind() == Kind::Since) {
                auto key = std::make_pair(g.kind() == Kind::Until, g->iv);
                auto it = std::find(slots_.begin(), slots_.end(), key);
                op.iv = static_cast<int>(it - slots_.begin());
                if (it == slots_.end()) slots_.push_back(key);
            }
            index.emplace(g.get(), static_cast<int>(ops_.size()));
            ops_.push_back(op);
            formulas_.push_back(g);
        }
    }

    const std::vector<Op>& ops() const { return ops_; }
    const std::vector<std::pair<bool, Interval>>& slots() const { return slots_; }
    const std::vector<Formula>& formulas() const { return formulas_; }
    const Alphabet& alphabet() const { return sigma_; }
    int root() const { return static_cast<int>(ops_.size()) - 1; }

private:
    Alphabet sigma_;
    std::vector<Op> ops_;
    std::vector<std::pair<bool, Interval>> slots_;
    std::vector<Formula> formulas_;
};

// Word in evaluation-ready form: per-point prop bitmask (alphabet index order)
// and timestamps as integer ticks of 1/scale, or exact rationals when ticks overflow.
struct FastWord {
    std::vector<std::uint64_t> props;
    std::vector<std::int64_t> ticks;
    std::int64_t scale = 1;
    std::vector<Rational> exact;  // used iff nonempty
    std::size_t size() const { return props.size(); }
};

inline FastWord to_fast(const TimedWord& w, const Alphabet& sigma) {
    if (sigma.size() > 64) throw EvalError("compiled evaluation supports at most 64 propositions");
    FastWord fw;
    for (const auto& p : w.points()) {
        std::uint64_t m = 0;
        for (const auto& a : p.props) {
            int k = sigma.index_of(a);
            if (k < 0) throw EvalError("word proposition '" + a + "' outside the evaluation alphabet");
            m |= 1ULL << k;
        }
        fw.props.push_back(m);
    }
    BigInt l = 1;
    for (const auto& p : w.points()) {
        BigInt d = denominator(p.t);
        l = l / boost::multiprecision::gcd(l, d) * d;
    }
    const BigInt limit = BigInt(1) << 60;
    bool ok = l < limit;
    if (ok) {
        for (const auto& p : w.points()) {
            BigInt v = numerator(p.t) * (l / denominator(p.t));
            if (v >= limit) {
                ok = false;
                break;
            }
            fw.ticks.push_back(static_cast<std::int64_t>(v));
        }
    }
    if (ok) {
        fw.scale = static_cast<std::int64_t>(l);
    } else {
        fw.ticks.clear();
        for (const auto& p : w.points()) fw.exact.push_back(p.t);
    }
    return fw;
}

class Evaluator {
public:
    explicit Evaluator(const Program& p) : prog_(p) {}

    // Fills all rows; returns the root row value at position 0.
    bool run(const FastWord& w) {
        const std::size_t n = w.size();
        const auto& ops = prog_.ops();
        rows_.assign(ops.size() * n, 0);
        compute_ranges(w);
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const auto& op = ops[k];
            std::uint8_t* r = &rows_[k * n];
            switch (op.kind) {
                case Kind::Atom:
                    for (std::size_t i = 0; i < n; ++i) r[i] = (w.props[i] >> op.atom) & 1U;
                    break;
                case Kind::BP:
                    r[0] = 1;
                    break;
                case Kind::EP:
                    r[n - 1] = 1;
                    break;
                case Kind::True:
                    std::fill(r, r + n, 1);
                    break;
                case Kind::Not: {
                    const std::uint8_t* a = row(op.a, n);
                    for (std::size_t i = 0; i < n; ++i) r[i] = !a[i];
                    break;
                }
                case Kind::And: {
                    const std::uint8_t* a = row(op.a, n);
                    const std::uint8_t* b = row(op.b, n);
                    for (std::size_t i = 0; i < n; ++i) r[i] = a[i] && b[i];
                    break;
                }
                case Kind::Until: until_row(row(op.a, n), row(op.b, n), op.iv, n, r); break;
                case Kind::Since: since_row(row(op.a, n), row(op.b, n), op.iv, n, r); break;
            }
        }
        return rows_[static_cast<std::size_t>(prog_.root()) * n] != 0;
    }

    bool value(int op, std::size_t pos0, std::size_t n) const { return rows_[static_cast<std::size_t>(op) * n + pos0] != 0; }
    const std::uint8_t* row(int op, std::size_t n) const { return &rows_[static_cast<std::size_t>(op) * n]; }

private:
    // sign of (t_j - t_i) - bound
    static int cmp_diff(const FastWord& w, std::size_t j, std::size_t i, std::uint64_t bound) {
        if (w.exact.empty()) {
            __int128 d = static_cast<__int128>(w.ticks[j]) - w.ticks[i];
            __int128 b = static_cast<__int128>(bound) * w.scale;
            return d < b ? -1 : (d > b ? 1 : 0);
        }
        Rational d = w.exact[j] - w.exact[i];
        Rational b(bound);
        return d < b ? -1 : (d > b ? 1 : 0);
    }

    // For Until slots: positions j>i with t_j - t_i in I form [lo[i], hi[i]].
    // For Since slots: positions j<i with t_i - t_j in I form [lo[i], hi[i]].
    void compute_ranges(const FastWord& w) {
        const std::size_t n = w.size();
        const auto& slots = prog_.slots();
        lo_.assign(slots.size() * n, 0);
        hi_.assign(slots.size() * n, -1);
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const bool fut = slots[s].first;
            const Interval& iv = slots[s].second;
            auto above_lo = [&](std::size_t far, std::size_t near) {
                int c = cmp_diff(w, far, near, iv.lo);
                return iv.lo_closed ? c >= 0 : c > 0;
            };
            auto below_hi = [&](std::size_t far, std::size_t near) {
                if (!iv.hi) return true;
                int c = cmp_diff(w, far, near, *iv.hi);
                return iv.hi_closed ? c <= 0 : c < 0;
            };
            for (std::size_t i = 0; i < n; ++i) {
                long long lo, hi;
                if (fut) {
                    // first j > i meeting the lower bound; last j meeting the upper bound
                    std::size_t a = i + 1, b = n;
                    while (a < b) {
                        std::size_t m = (a + b) / 2;
                        if (above_lo(m, i)) b = m;
                        else a = m + 1;
                    }
                    lo = static_cast<long long>(a);
                    a = i + 1, b = n;
                    while (a < b) {
                        std::size_t m = (a + b) / 2;
                        if (below_hi(m, i)) a = m + 1;
                        else b = m;
                    }
                    hi = static_cast<long long>(a) - 1;
                } else {
                    // j < i: distance t_i - t_j decreases as j grows
                    std::size_t a = 0, b = i;
                    while (a < b) {
                        std::size_t m = (a + b) / 2;
                        if (below_hi(i, m)) b = m;
                        else a = m + 1;
                    }
                    lo = static_cast<long long>(a);
                    a = 0, b = i;
                    while (a < b) {
                        std::size_t m = (a + b) / 2;
                        if (above_lo(i, m)) a = m + 1;
                        else b = m;
                    }
                    hi = static_cast<long long>(a) - 1;
                }
                lo_[s * n + i] = lo;
                hi_[s * n + i] = hi;
            }
        }
    }

    void until_row(const std::uint8_t* a, const std::uint8_t* b, int slot, std::size_t n, std::uint8_t* r) {
        scratch1_.assign(n + 1, static_cast<long long>(n));
        scratch2_.assign(n + 1, static_cast<long long>(n));
        auto& nf = scratch1_;  // first k > i with !a[k]
        auto& nt = scratch2_;  // first j >= p with b[j]
        for (long long i = static_cast<long long>(n) - 2; i >= 0; --i) nf[i] = !a[i + 1] ? i + 1 : nf[i + 1];
        for (long long p = static_cast<long long>(n) - 1; p >= 0; --p) nt[p] = b[p] ? p : nt[p + 1];
        const long long* lo = &lo_[static_cast<std::size_t>(slot) * n];
        const long long* hi = &hi_[static_cast<std::size_t>(slot) * n];
        for (std::size_t i = 0; i < n; ++i) {
            long long from = std::max<long long>(static_cast<long long>(i) + 1, lo[i]);
            long long to = std::min<long long>({hi[i], nf[i], static_cast<long long>(n) - 1});
            r[i] = from <= to && nt[from] <= to;
        }
    }

    void since_row(const std::uint8_t* a, const std::uint8_t* b, int slot, std::size_t n, std::uint8_t* r) {
        scratch1_.assign(n, -1);
        scratch2_.assign(n, -1);
        auto& pf = scratch1_;  // last k < i with !a[k]
        auto& pt = scratch2_;  // last j <= p with b[j]
        for (std::size_t i = 1; i < n; ++i) pf[i] = !a[i - 1] ? static_cast<long long>(i) - 1 : pf[i - 1];
        for (std::size_t p = 0; p < n; ++p) pt[p] = b[p] ? static_cast<long long>(p) : (p ? pt[p - 1] : -1);
        const long long* lo = &lo_[static_cast<std::size_t>(slot) * n];
        const long long* hi = &hi_[static_cast<std::size_t>(slot) * n];
        for (std::size_t i = 0; i < n; ++i) {
            long long from = std::max<long long>({lo[i], pf[i], 0});
            long long to = std::min<long long>(hi[i], static_cast<long long>(i) - 1);
            r[i] = from <= to && pt[to] >= from;
        }
    }

    const Program& prog_;
    std::vector<std::uint8_t> rows_;
    std::vector<long long> lo_, hi_, scratch1_, scratch2_;
};

// ── Public API ──────────────────────────────────────────────────────────

struct TruthTable {
    std::vector<Formula> subformulas;          // post-order
    std::vector<std::vector<bool>> rows;       // rows[k][i-1] for position i
    const std::vector<bool>& row(const Formula& f) const {
        for (std::size_t k = 0; k < subformulas.size(); ++k)
            if (subformulas[k] == f) return rows[k];
        throw EvalError("formula is not a subformula of the table");
    }
};

inline Alphabet eval_alphabet(const TimedWord& w, const Formula& f) {
    for (const auto& p : atoms_of(f))
        if (!w.alphabet().contains(p)) throw EvalError("unknown atom '" + p + "'");
    return w.alphabet();
}

inline TruthTable truth_table(const TimedWord& w, const Formula& f) {
    Alphabet sigma = eval_alphabet(w, f);
    Program prog(f, sigma);
    Evaluator ev(prog);
    ev.run(to_fast(w, sigma));
    TruthTable t;
    t.subformulas = prog.formulas();
    const std::size_t n = w.size();
    for (std::size_t k = 0; k < prog.ops().size(); ++k) {
        const std::uint8_t* r = ev.row(static_cast<int>(k), n);
        t.rows.emplace_back(r, r + n);
    }
    return t;
}

inline std::vector<bool> eval_row(const TimedWord& w, const Formula& f) {
    Alphabet sigma = eval_alphabet(w, f);
    Program prog(f, sigma);
    Evaluator ev(prog);
    ev.run(to_fast(w, sigma));
    const std::uint8_t* r = ev.row(prog.root(), w.size());
    return std::vector<bool>(r, r + w.size());
}

// Word-level satisfaction, anchored at the first position.
inline bool satisfies(const TimedWord& w, const Formula& f) {
    Alphabet sigma = eval_alphabet(w, f);
    Program prog(f, sigma);
    Evaluator ev(prog);
    return ev.run(to_fast(w, sigma));
}

}  // namespace mtlf
