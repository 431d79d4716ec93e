#pragma once

#include "mtlforge/interval.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mtlf {

// ── Propositions and alphabets ──────────────────────────────────────────

inline bool is_reserved_name(std::string_view s) {
    static const std::array<std::string_view, 15> kReserved = {
        "F", "P", "G", "H", "U", "S", "O", "BP", "EP", "true", "false", "act", "wF", "wG", "wU"};
    return std::find(kReserved.begin(), kReserved.end(), s) != kReserved.end();
}

inline bool is_valid_prop(std::string_view s) {
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return !is_reserved_name(s);
}

class AlphabetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Alphabet {
public:
    Alphabet() = default;
    Alphabet(std::initializer_list<std::string> props) : Alphabet(std::vector<std::string>(props)) {}
    explicit Alphabet(std::vector<std::string> props) {
        for (auto& p : props)
            if (!is_valid_prop(p)) throw AlphabetError("invalid proposition name '" + p + "'");
        std::sort(props.begin(), props.end());
        props.erase(std::unique(props.begin(), props.end()), props.end());
        props_ = std::move(props);
    }

    const std::vector<std::string>& props() const { return props_; }
    std::size_t size() const { return props_.size(); }
    bool empty() const { return props_.empty(); }
    bool contains(std::string_view p) const { return std::binary_search(props_.begin(), props_.end(), p); }
    int index_of(std::string_view p) const {
        auto it = std::lower_bound(props_.begin(), props_.end(), p);
        return (it != props_.end() && *it == p) ? static_cast<int>(it - props_.begin()) : -1;
    }
    bool subset_of(const Alphabet& o) const {
        return std::includes(o.props_.begin(), o.props_.end(), props_.begin(), props_.end());
    }
    Alphabet with(const std::vector<std::string>& extra) const {
        auto v = props_;
        v.insert(v.end(), extra.begin(), extra.end());
        return Alphabet(std::move(v));
    }
    Alphabet united(const Alphabet& o) const { return with(o.props_); }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::vector<std::string> props_;
};

// ── Formula AST ─────────────────────────────────────────────────────────

enum class Kind : std::uint8_t { Atom, BP, EP, True, Not, And, Until, Since };

struct Node;

// Hash-consed handle: structurally equal formulas share one node, so
// equality and memoization are pointer operations.
class Formula {
public:
    Formula() = default;
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    const Node& operator*() const { return *n_; }
    const Node* operator->() const { return n_.get(); }
    const Node* get() const { return n_.get(); }
    explicit operator bool() const { return static_cast<bool>(n_); }

    Kind kind() const;
    std::uint64_t id() const;

    friend bool operator==(const Formula& a, const Formula& b) { return a.n_ == b.n_; }
    friend bool operator!=(const Formula& a, const Formula& b) { return a.n_ != b.n_; }

private:
    std::shared_ptr<const Node> n_;
};

struct Node {
    Kind kind;
    std::string prop;  // Atom only
    Interval iv;       // Until / Since only
    Formula left;      // Not, And, Until, Since
    Formula right;     // And, Until, Since
    std::uint64_t id;
    std::size_t size;  // tree size
};

inline Kind Formula::kind() const { return n_->kind; }
inline std::uint64_t Formula::id() const { return n_->id; }

struct FormulaHash {
    std::size_t operator()(const Formula& f) const { return std::hash<const void*>()(f.get()); }
};

namespace detail {

struct Key {
    Kind kind;
    std::string prop;
    std::uint64_t lo;
    std::uint64_t hi;
    std::uint8_t flags;
    std::uint64_t l, r;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = std::hash<std::string>()(k.prop);
        auto mix = [&](std::uint64_t v) { h ^= std::hash<std::uint64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(static_cast<std::uint64_t>(k.kind));
        mix(k.lo);
        mix(k.hi);
        mix(k.flags);
        mix(k.l);
        mix(k.r);
        return h;
    }
};

class Interner {
public:
    static Interner& instance() {
        static Interner in;
        return in;
    }

    Formula make(Kind kind, std::string prop, Interval iv, Formula l, Formula r) {
        Key key{kind,
                prop,
                iv.lo,
                iv.hi ? *iv.hi : ~0ULL,
                static_cast<std::uint8_t>((iv.lo_closed ? 1 : 0) | (iv.hi_closed ? 2 : 0) | (iv.hi ? 4 : 0)),
                l ? l.id() : 0,
                r ? r.id() : 0};
        std::lock_guard<std::mutex> lock(mu_);
        if (auto it = table_.find(key); it != table_.end())
            if (auto sp = it->second.lock()) return Formula(std::move(sp));
        if (++inserts_ % 4096 == 0) sweep();
        std::size_t size = 1 + (l ? l->size : 0) + (r ? r->size : 0);
        auto node = std::make_shared<const Node>(Node{kind, std::move(prop), iv, std::move(l), std::move(r), ++next_id_, size});
        table_[key] = node;
        return Formula(node);
    }

private:
    void sweep() {
        for (auto it = table_.begin(); it != table_.end();)
            it = it->second.expired() ? table_.erase(it) : std::next(it);
    }

    std::mutex mu_;
    std::unordered_map<Key, std::weak_ptr<const Node>, KeyHash> table_;
    std::uint64_t next_id_ = 0;
    std::uint64_t inserts_ = 0;
};

}  // namespace detail

// ── Core constructors ───────────────────────────────────────────────────

inline Formula atom(const std::string& p) {
    if (!is_valid_prop(p)) throw AlphabetError("invalid proposition name '" + p + "'");
    return detail::Interner::instance().make(Kind::Atom, p, Interval::unbounded(), {}, {});
}
inline Formula bp() { return detail::Interner::instance().make(Kind::BP, "", Interval::unbounded(), {}, {}); }
inline Formula ep() { return detail::Interner::instance().make(Kind::EP, "", Interval::unbounded(), {}, {}); }
inline Formula tru() { return detail::Interner::instance().make(Kind::True, "", Interval::unbounded(), {}, {}); }
inline Formula neg(Formula f) { return detail::Interner::instance().make(Kind::Not, "", Interval::unbounded(), std::move(f), {}); }
inline Formula conj(Formula a, Formula b) {
    return detail::Interner::instance().make(Kind::And, "", Interval::unbounded(), std::move(a), std::move(b));
}
inline Formula until(Formula a, Interval i, Formula b) {
    return detail::Interner::instance().make(Kind::Until, "", i, std::move(a), std::move(b));
}
inline Formula since(Formula a, Interval i, Formula b) {
    return detail::Interner::instance().make(Kind::Since, "", i, std::move(a), std::move(b));
}
inline Formula until(Formula a, Formula b) { return until(std::move(a), Interval::unbounded(), std::move(b)); }
inline Formula since(Formula a, Formula b) { return since(std::move(a), Interval::unbounded(), std::move(b)); }

// ── Sugar (expanded eagerly) ────────────────────────────────────────────

inline Formula fls() { return neg(tru()); }
inline Formula disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }
inline Formula implies(Formula a, Formula b) { return neg(conj(std::move(a), neg(std::move(b)))); }
inline Formula iff(Formula a, Formula b) { return conj(implies(a, b), implies(b, a)); }

inline Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return tru();
    Formula acc = fs.front();
    for (std::size_t k = 1; k < fs.size(); ++k) acc = conj(acc, fs[k]);
    return acc;
}
inline Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return fls();
    Formula acc = fs.front();
    for (std::size_t k = 1; k < fs.size(); ++k) acc = disj(acc, fs[k]);
    return acc;
}

inline Formula eventually(Interval i, Formula a) { return until(tru(), i, std::move(a)); }
inline Formula eventually(Formula a) { return eventually(Interval::unbounded(), std::move(a)); }
inline Formula once(Interval i, Formula a) { return since(tru(), i, std::move(a)); }
inline Formula once(Formula a) { return once(Interval::unbounded(), std::move(a)); }
inline Formula always(Interval i, Formula a) { return neg(eventually(i, neg(std::move(a)))); }
inline Formula always(Formula a) { return always(Interval::unbounded(), std::move(a)); }
inline Formula historically(Interval i, Formula a) { return neg(once(i, neg(std::move(a)))); }
inline Formula historically(Formula a) { return historically(Interval::unbounded(), std::move(a)); }
inline Formula next(Formula a) { return until(fls(), std::move(a)); }

// Weak timed forms: the current point counts when 0 lies in I. For Ũ the current
// point must then satisfy b, or a as well as the strict until.
inline Formula weak_until(Formula a, Interval i, Formula b) {
    Formula strict = until(a, i, b);
    return i.contains_zero() ? disj(std::move(b), conj(std::move(a), strict)) : strict;
}
inline Formula weak_until(Formula a, Formula b) { return weak_until(std::move(a), Interval::unbounded(), std::move(b)); }
inline Formula weak_eventually(Interval i, Formula a) {
    Formula strict = eventually(i, a);
    return i.contains_zero() ? disj(std::move(a), strict) : strict;
}
inline Formula weak_eventually(Formula a) { return weak_eventually(Interval::unbounded(), std::move(a)); }
inline Formula weak_always(Interval i, Formula a) { return neg(weak_eventually(i, neg(std::move(a)))); }
inline Formula weak_always(Formula a) { return weak_always(Interval::unbounded(), std::move(a)); }

inline Formula act(const Alphabet& sigma) {
    std::vector<Formula> atoms;
    for (const auto& p : sigma.props()) atoms.push_back(atom(p));
    return disj_all(atoms);
}

// ── Queries ─────────────────────────────────────────────────────────────

// Post-order, each distinct subterm once.
inline std::vector<Formula> subformulas(const Formula& f) {
    std::vector<Formula> out;
    std::unordered_set<const Node*> seen;
    std::vector<std::pair<Formula, bool>> stack{{f, false}};
    while (!stack.empty()) {
        auto [g, expanded] = stack.back();
        stack.pop_back();
        if (seen.count(g.get())) continue;
        if (expanded) {
            seen.insert(g.get());
            out.push_back(g);
            continue;
        }
        stack.push_back({g, true});
        if (g->right && !seen.count(g->right.get())) stack.push_back({g->right, false});
        if (g->left && !seen.count(g->left.get())) stack.push_back({g->left, false});
    }
    return out;
}

inline std::size_t dag_size(const Formula& f) { return subformulas(f).size(); }

inline std::set<std::string> atoms_of(const Formula& f) {
    std::set<std::string> s;
    for (const auto& g : subformulas(f))
        if (g.kind() == Kind::Atom) s.insert(g->prop);
    return s;
}

inline bool has_since(const Formula& f) {
    for (const auto& g : subformulas(f))
        if (g.kind() == Kind::Since) return true;
    return false;
}

// Rebuilds f bottom-up, letting `fn` replace any node (already rebuilt children).
inline Formula rebuild(const Formula& f, const std::function<Formula(const Formula& orig, Formula l, Formula r)>& fn) {
    std::unordered_map<const Node*, Formula> memo;
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (auto it = memo.find(g.get()); it != memo.end()) return it->second;
        Formula l = g->left ? go(g->left) : Formula{};
        Formula r = g->right ? go(g->right) : Formula{};
        Formula out = fn(g, l, r);
        memo.emplace(g.get(), out);
        return out;
    };
    return go(f);
}

inline Formula with_children(const Formula& g, Formula l, Formula r) {
    switch (g.kind()) {
        case Kind::Not: return neg(std::move(l));
        case Kind::And: return conj(std::move(l), std::move(r));
        case Kind::Until: return until(std::move(l), g->iv, std::move(r));
        case Kind::Since: return since(std::move(l), g->iv, std::move(r));
        default: return g;
    }
}

// ── Fragments ───────────────────────────────────────────────────────────

enum class Fragment : std::uint8_t { DiamondI, UntilI, DiamondIPastI, UntilNSSinceNS, UntilISinceNS, UntilISinceI };

inline const char* fragment_name(Fragment fr) {
    switch (fr) {
        case Fragment::DiamondI: return "MTL[F_I]";
        case Fragment::UntilI: return "MTL[U_I]";
        case Fragment::DiamondIPastI: return "MTL[F_I,P_I]";
        case Fragment::UntilNSSinceNS: return "MTL[U_NS,S_NS]";
        case Fragment::UntilISinceNS: return "MTL[U_I,S_NS]";
        case Fragment::UntilISinceI: return "MTL[U_I,S_I]";
    }
    return "?";
}

inline bool fragment_contains(Fragment fr, const Formula& f) {
    for (const auto& g : subformulas(f)) {
        bool temporal = g.kind() == Kind::Until || g.kind() == Kind::Since;
        if (!temporal) continue;
        bool unary = g->left.kind() == Kind::True;
        bool ns = !g->iv.is_singular();
        bool is_since = g.kind() == Kind::Since;
        switch (fr) {
            case Fragment::DiamondI:
                if (is_since || !unary) return false;
                break;
            case Fragment::UntilI:
                if (is_since) return false;
                break;
            case Fragment::DiamondIPastI:
                if (!unary) return false;
                break;
            case Fragment::UntilNSSinceNS:
                if (!ns) return false;
                break;
            case Fragment::UntilISinceNS:
                if (is_since && !ns) return false;
                break;
            case Fragment::UntilISinceI: break;
        }
    }
    return true;
}

// First fragment (in a fixed small-to-large order) that contains f.
inline Fragment classify_fragment(const Formula& f) {
    for (auto fr : {Fragment::DiamondI, Fragment::UntilI, Fragment::DiamondIPastI, Fragment::UntilNSSinceNS,
                    Fragment::UntilISinceNS, Fragment::UntilISinceI})
        if (fragment_contains(fr, f)) return fr;
    return Fragment::UntilISinceI;
}

}  // namespace mtlf
