#pragma once

#include "mtlforge/evaluator.hpp"
#include "mtlforge/generators.hpp"

#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtlf {

class MachineError : public std::invalid_argument {
public:
    MachineError(const std::string& msg, std::size_t line = 0) : std::invalid_argument(msg), line(line) {}
    std::size_t line;
};

struct Instr {
    enum class Op { Inc, Dec, Jz, Halt } op = Op::Halt;
    std::size_t counter = 0;  // 1-based
    std::size_t next = 0;     // Inc/Dec target; Jz zero branch
    std::size_t other = 0;    // Jz nonzero branch
};

struct CounterMachine {
    std::size_t k = 0;
    std::vector<Instr> instrs;  // instrs[i-1] is p_i
    std::size_t n() const { return instrs.size(); }
    const Instr& at(std::size_t label) const { return instrs.at(label - 1); }
};

struct Config {
    std::size_t label = 1;
    std::vector<std::uint64_t> counters;
    friend bool operator==(const Config&, const Config&) = default;
};

inline void validate_machine(const CounterMachine& m) {
    if (m.k == 0) throw MachineError("machine needs at least one counter");
    if (m.instrs.empty() || m.instrs.back().op != Instr::Op::Halt) throw MachineError("the last instruction must be HALT");
    for (std::size_t i = 0; i < m.n(); ++i) {
        const Instr& in = m.instrs[i];
        if (in.op == Instr::Op::Halt) {
            if (i + 1 != m.n()) throw MachineError("HALT must be unique and last (found at p" + std::to_string(i + 1) + ")");
            continue;
        }
        if (in.counter < 1 || in.counter > m.k) throw MachineError("p" + std::to_string(i + 1) + ": counter index out of range");
        auto in_range = [&](std::size_t t) { return t >= 1 && t <= m.n(); };
        if (!in_range(in.next) || (in.op == Instr::Op::Jz && !in_range(in.other)))
            throw MachineError("p" + std::to_string(i + 1) + ": goto to an undefined label");
    }
}

inline CounterMachine parse_machine(const std::string& text) {
    static const std::regex header(R"(^\s*counters\s*:\s*(\d+)\s*$)");
    static const std::regex incdec(R"(^\s*p(\d+)\s*:\s*(INC|DEC)\s+(\d+)\s+GOTO\s+p(\d+)\s*$)");
    static const std::regex jz(R"(^\s*p(\d+)\s*:\s*JZ\s+(\d+)\s+p(\d+)\s+p(\d+)\s*$)");
    static const std::regex halt(R"(^\s*p(\d+)\s*:\s*HALT\s*$)");
    CounterMachine m;
    std::vector<std::optional<Instr>> slots;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    auto num = [&](const std::string& s) {
        if (s.size() > 9) throw MachineError("number too large", lineno);
        return static_cast<std::size_t>(std::stoul(s));
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::smatch g;
        Instr ins;
        std::size_t label = 0;
        if (std::regex_match(line, g, header)) {
            if (have_header) throw MachineError("duplicate counters header", lineno);
            have_header = true;
            m.k = num(g[1]);
            continue;
        }
        if (!have_header) throw MachineError("expected 'counters: <k>' before instructions", lineno);
        if (std::regex_match(line, g, incdec)) {
            label = num(g[1]);
            ins = {g[2] == "INC" ? Instr::Op::Inc : Instr::Op::Dec, num(g[3]), num(g[4]), 0};
        } else if (std::regex_match(line, g, jz)) {
            label = num(g[1]);
            ins = {Instr::Op::Jz, num(g[2]), num(g[3]), num(g[4])};
        } else if (std::regex_match(line, g, halt)) {
            label = num(g[1]);
        } else {
            throw MachineError("cannot parse instruction '" + line + "'", lineno);
        }
        if (label == 0) throw MachineError("labels start at p1", lineno);
        if (slots.size() < label) slots.resize(label);
        if (slots[label - 1]) throw MachineError("duplicate label p" + std::to_string(label), lineno);
        slots[label - 1] = ins;
    }
    if (!have_header) throw MachineError("missing 'counters: <k>' header");
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i]) throw MachineError("missing instruction p" + std::to_string(i + 1));
        m.instrs.push_back(*slots[i]);
    }
    validate_machine(m);
    return m;
}

inline std::string machine_to_string(const CounterMachine& m) {
    std::string s = "counters: " + std::to_string(m.k) + "\n";
    for (std::size_t i = 0; i < m.n(); ++i) {
        const Instr& in = m.instrs[i];
        s += "p" + std::to_string(i + 1) + ": ";
        switch (in.op) {
            case Instr::Op::Inc: s += "INC " + std::to_string(in.counter) + " GOTO p" + std::to_string(in.next); break;
            case Instr::Op::Dec: s += "DEC " + std::to_string(in.counter) + " GOTO p" + std::to_string(in.next); break;
            case Instr::Op::Jz:
                s += "JZ " + std::to_string(in.counter) + " p" + std::to_string(in.next) + " p" + std::to_string(in.other);
                break;
            case Instr::Op::Halt: s += "HALT"; break;
        }
        s += "\n";
    }
    return s;
}

// ── Simulation ──────────────────────────────────────────────────────────

inline Config initial_config(const CounterMachine& m) { return {1, std::vector<std::uint64_t>(m.k, 0)}; }

// nullopt at HALT.
inline std::optional<Config> step_std(const CounterMachine& m, const Config& c) {
    if (c.label < 1 || c.label > m.n() || c.counters.size() != m.k) throw MachineError("invalid configuration");
    const Instr& in = m.at(c.label);
    Config d = c;
    switch (in.op) {
        case Instr::Op::Halt: return std::nullopt;
        case Instr::Op::Inc:
            ++d.counters[in.counter - 1];
            d.label = in.next;
            break;
        case Instr::Op::Dec:
            if (d.counters[in.counter - 1] == 0)
                throw MachineError("DEC on zero counter " + std::to_string(in.counter) + " at p" + std::to_string(c.label));
            --d.counters[in.counter - 1];
            d.label = in.next;
            break;
        case Instr::Op::Jz: d.label = d.counters[in.counter - 1] == 0 ? in.next : in.other; break;
    }
    return d;
}

inline std::optional<Config> step_incerr(const CounterMachine& m, const Config& c, const std::vector<std::uint64_t>& err) {
    if (err.size() != m.k) throw MachineError("error vector has the wrong length");
    auto d = step_std(m, c);
    if (d)
        for (std::size_t i = 0; i < m.k; ++i) d->counters[i] += err[i];
    return d;
}

enum class RunMode { Standard, IncrementError };

struct MachineRun {
    RunMode mode = RunMode::Standard;
    std::vector<Config> configs;
    std::vector<std::vector<std::uint64_t>> errors;  // errors[j] applied on the step from configs[j]
    bool halted = false;
    friend bool operator==(const MachineRun&, const MachineRun&) = default;
};

using ErrorSchedule = std::function<std::vector<std::uint64_t>(std::size_t step, const Config&)>;

inline MachineRun run_machine(const CounterMachine& m, std::size_t max_steps, RunMode mode = RunMode::Standard, const ErrorSchedule& errs = {}) {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    MachineRun r;
    r.mode = mode;
    r.configs.push_back(initial_config(m));
    for (std::size_t s = 0; s < max_steps; ++s) {
        const Config& c = r.configs.back();
        if (m.at(c.label).op == Instr::Op::Halt) {
            r.halted = true;
            return r;
        }
        std::vector<std::uint64_t> e(m.k, 0);
        if (mode == RunMode::IncrementError && errs) e = errs(s, c);
        auto d = step_incerr(m, c, e);
        r.errors.push_back(e);
        r.configs.push_back(*d);
    }
    r.halted = m.at(r.configs.back().label).op == Instr::Op::Halt;
    return r;
}

// Random increment errors: each counter gains 0..max_err with probability 1/3 per step.
inline ErrorSchedule random_errors(std::uint64_t seed, std::uint64_t max_err = 1) {
    auto rng = std::make_shared<Rng>(seed);
    return [rng, max_err](std::size_t, const Config& c) {
        std::vector<std::uint64_t> e(c.counters.size(), 0);
        for (auto& x : e)
            if (rng->coin(1, 3)) x = 1 + rng->below(max_err);
        return e;
    };
}

// ── Encodings ───────────────────────────────────────────────────────────

struct EncodingOptions {
    // INC from an empty counter is otherwise unconstrained: demand an a in the
    // next configuration's interval.
    bool zero_increment_guard = false;
    // b1 ∧ □_(0,2k+1) false instead of b1 ∧ □_(0,2k+1)¬(B ∧ a); only the former
    // pins the initial counters to zero.
    bool empty_initial_config = false;
};

struct Encoding {
    Formula formula;
    Alphabet alphabet;
    std::vector<std::string> labels;
    std::vector<Formula> parts;
};

inline std::string instr_prop(std::size_t i) { return "b" + std::to_string(i); }

inline Alphabet machine_alphabet(const CounterMachine& m) {
    std::vector<std::string> v{"a"};
    for (std::size_t i = 1; i <= m.n(); ++i) v.push_back(instr_prop(i));
    return Alphabet(v);
}

namespace detail {

struct MachineFormulas {
    const CounterMachine& m;
    std::uint64_t K;  // 2k+1
    Formula a = atom("a");
    explicit MachineFormulas(const CounterMachine& mm) : m(mm), K(2 * mm.k + 1) {}

    Formula b(std::size_t i) const { return atom(instr_prop(i)); }
    Formula B() const {
        std::vector<Formula> v;
        for (std::size_t i = 1; i <= m.n(); ++i) v.push_back(b(i));
        return disj_all(v);
    }
    Interval cur(std::size_t i) const { return Interval::open(2 * i - 1, 2 * i); }
    Interval nxt(std::size_t i) const { return Interval::open(K + 2 * i - 1, K + 2 * i); }
    Interval at_K() const { return Interval::point(K); }
    Formula fut_copy(const Formula& g) const { return eventually(at_K(), g); }
    Formula past_copy(const Formula& g) const { return once(at_K(), g); }
    Formula fut_later(const Interval& iv) const { return eventually(iv, a); }

    Formula copy(std::size_t i) const {
        return conj(always(cur(i), implies(a, fut_copy(a))), always(nxt(i), implies(a, past_copy(a))));
    }
    Formula inc(std::size_t i) const {
        Formula last = conj(a, neg(fut_later(Interval::open(0, 1))));
        Formula here = conj(implies(a, fut_copy(a)),
                            implies(last, conj(eventually(Interval::open(K, K + 1), a),
                                               always(Interval::open(K, K + 1), implies(a, always(Interval::open(0, 1), fls()))))));
        return conj(always(cur(i), here), always(nxt(i), implies(conj(a, fut_later(Interval::closed(0, 1))), past_copy(a))));
    }
    Formula dec(std::size_t i) const {
        Formula here = conj(implies(conj(a, fut_later(Interval::open(0, 1))), fut_copy(a)),
                            implies(conj(a, neg(fut_later(Interval::closed(0, 1)))), neg(eventually(Interval::closed(K, K + 1), a))));
        return conj(always(cur(i), here), always(nxt(i), implies(a, past_copy(a))));
    }
    Formula copy_err(std::size_t i) const { return always(cur(i), implies(a, fut_copy(a))); }
    // INCERR with the consequent's window moved to the next configuration: the
    // window ◇_(0,1)a would contradict its own antecedent.
    Formula inc_err(std::size_t i) const {
        Formula here = conj(implies(conj(a, fut_later(Interval::open(0, 1))), fut_copy(a)),
                            implies(conj(a, neg(fut_later(Interval::make(0, 1, false, true)))),
                                    conj(fut_copy(a), eventually(Interval::open(K, K + 1), a))));
        return always(cur(i), here);
    }
    Formula dec_err(std::size_t i) const { return always(cur(i), implies(conj(a, fut_later(Interval::open(0, 1))), fut_copy(a))); }
    Formula zero_guard(std::size_t i) const {
        return implies(always(cur(i), neg(a)), eventually(Interval::open(K + 2 * i - 1, K + 2 * i), a));
    }
};

inline Encoding encode(const CounterMachine& m, bool errors, const EncodingOptions& opt) {
    validate_machine(m);
    MachineFormulas M(m);
    Encoding e;
    e.alphabet = machine_alphabet(m);
    auto add = [&](const std::string& l, Formula g) {
        e.labels.push_back(l);
        e.parts.push_back(std::move(g));
    };
    const Formula B = M.B();
    const std::uint64_t K = M.K;
    add("phi0", conj_all({M.b(1), weak_always(implies(conj(B, eventually(B)), eventually(Interval::point(K), B))),
                          weak_always(implies(B, neg(eventually(Interval::open(0, K), B))))}));
    std::vector<Formula> gaps;
    for (std::size_t w = 0; w <= m.k; ++w) gaps.push_back(weak_always(Interval::closed(2 * w, 2 * w + 1), neg(M.a)));
    add("phi1", weak_always(implies(B, conj_all(gaps))));
    add("phi2", weak_always(implies(M.b(m.n()), always(Interval::left_closed(K, std::nullopt), fls()))));
    std::vector<Formula> phi3;
    for (std::size_t x = 1; x <= m.n(); ++x) {
        const Instr& in = m.at(x);
        if (in.op == Instr::Op::Halt) continue;
        std::vector<Formula> body;
        if (in.op == Instr::Op::Jz) {
            for (std::size_t j = 1; j <= m.k; ++j) body.push_back(errors ? M.copy_err(j) : M.copy(j));
            const std::size_t i = in.counter;
            body.push_back(implies(always(M.cur(i), neg(M.a)), eventually(M.at_K(), M.b(in.next))));
            body.push_back(implies(eventually(M.cur(i), M.a), eventually(M.at_K(), M.b(in.other))));
        } else {
            for (std::size_t j = 1; j <= m.k; ++j)
                if (j != in.counter) body.push_back(errors ? M.copy_err(j) : M.copy(j));
            body.push_back(eventually(M.at_K(), M.b(in.next)));
            if (in.op == Instr::Op::Inc) {
                body.push_back(errors ? M.inc_err(in.counter) : M.inc(in.counter));
                if (opt.zero_increment_guard) body.push_back(M.zero_guard(in.counter));
            } else {
                body.push_back(errors ? M.dec_err(in.counter) : M.dec(in.counter));
            }
        }
        phi3.push_back(weak_always(implies(M.b(x), conj_all(body))));
    }
    add("phi3", conj_all(phi3));
    add("phi4", conj(M.b(1), always(Interval::open(0, K), opt.empty_initial_config ? fls() : neg(conj(B, M.a)))));
    std::vector<Formula> excl;
    const auto& props = e.alphabet.props();
    for (std::size_t p = 0; p < props.size(); ++p)
        for (std::size_t q = p + 1; q < props.size(); ++q) excl.push_back(neg(conj(atom(props[p]), atom(props[q]))));
    add("phi5", conj_all(excl));  // unboxed: first point only; run_to_word puts one event per point
    add("phi6", weak_eventually(M.b(m.n())));
    e.formula = conj_all(e.parts);
    return e;
}

}  // namespace detail

inline Encoding encode_minsky(const CounterMachine& m, const EncodingOptions& opt = {}) { return detail::encode(m, false, opt); }
inline Encoding encode_incrementing(const CounterMachine& m, const EncodingOptions& opt = {}) { return detail::encode(m, true, opt); }

// ── Runs as timed words ─────────────────────────────────────────────────

// Each counter keeps its a's as offsets in (0,1) inside its interval. Copies keep
// offsets, increments add the midpoint towards 1 (1/2 when empty), decrements drop
// the greatest offset.
inline TimedWord run_to_word(const CounterMachine& m, const MachineRun& r) {
    if (!r.halted) throw MachineError("run does not halt");
    const std::uint64_t K = 2 * m.k + 1;
    std::vector<std::vector<Rational>> offs(m.k);
    std::vector<TimedPoint> pts;
    auto grow = [](std::vector<Rational>& v) { v.push_back(v.empty() ? Rational(1, 2) : (v.back() + 1) / 2); };
    for (std::size_t j = 0; j < r.configs.size(); ++j) {
        const Config& c = r.configs[j];
        if (j > 0) {
            const Config& p = r.configs[j - 1];
            for (std::size_t q = 0; q < m.k; ++q) {
                while (offs[q].size() > c.counters[q] && !offs[q].empty()) offs[q].pop_back();
                while (offs[q].size() < c.counters[q]) grow(offs[q]);
                (void)p;
            }
        }
        const Rational base(static_cast<std::int64_t>(K * j));
        pts.push_back({{instr_prop(c.label)}, base});
        for (std::size_t q = 0; q < m.k; ++q)
            for (const auto& o : offs[q]) pts.push_back({{"a"}, base + Rational(static_cast<std::int64_t>(2 * q + 1)) + o});
    }
    return make_word(machine_alphabet(m), std::move(pts));
}

inline bool verify_encoding(const CounterMachine& m, const MachineRun& r, RunMode mode, const EncodingOptions& opt = {}) {
    const Encoding e = mode == RunMode::Standard ? encode_minsky(m, opt) : encode_incrementing(m, opt);
    return satisfies(run_to_word(m, r), e.formula);
}

// Reads configurations back from a word (b_i at multiples of 2k+1, a's counted per
// counter interval) and checks that consecutive ones are legal moves of `mode`.
struct DecodeResult {
    MachineRun run;
    bool valid = false;
    std::string reason;
};

inline DecodeResult decode_word(const CounterMachine& m, const TimedWord& w, RunMode mode) {
    DecodeResult d;
    d.run.mode = mode;
    const Alphabet sig = machine_alphabet(m);
    const std::int64_t K = static_cast<std::int64_t>(2 * m.k + 1);
    auto fail = [&](std::string why) {
        d.reason = std::move(why);
        return d;
    };
    for (const auto& p : w.points()) {
        if (p.props.size() != 1) return fail("point at " + time_to_string(p.t) + " carries several events");
        const std::string& q = p.props[0];
        if (q == "a") {
            if (d.run.configs.empty()) return fail("a before the first instruction");
            Rational rel = p.t - Rational(K * static_cast<std::int64_t>(d.run.configs.size() - 1));
            BigInt fl = numerator(rel) / denominator(rel);
            std::int64_t whole = fl.convert_to<std::int64_t>();
            if (whole % 2 == 0 || whole >= K || Rational(BigInt(whole)) == rel)
                return fail("a at " + time_to_string(p.t) + " outside every counter interval");
            ++d.run.configs.back().counters[static_cast<std::size_t>((whole - 1) / 2)];
        } else {
            if (!sig.contains(q) || q[0] != 'b') return fail("unknown event " + q);
            const std::size_t label = std::stoul(q.substr(1));
            if (p.t != Rational(K * static_cast<std::int64_t>(d.run.configs.size())))
                return fail("instruction " + q + " at " + time_to_string(p.t) + " is off the configuration grid");
            d.run.configs.push_back({label, std::vector<std::uint64_t>(m.k, 0)});
        }
    }
    if (d.run.configs.empty()) return fail("no configurations");
    if (!(d.run.configs[0] == initial_config(m))) return fail("run does not start in the initial configuration");
    for (std::size_t j = 0; j + 1 < d.run.configs.size(); ++j) {
        std::optional<Config> nxt;
        try {
            nxt = step_std(m, d.run.configs[j]);
        } catch (const MachineError& e) {
            return fail(std::string("step ") + std::to_string(j) + ": " + e.what());
        }
        if (!nxt) return fail("configuration after HALT");
        const Config& got = d.run.configs[j + 1];
        std::vector<std::uint64_t> err(m.k, 0);
        bool ok = got.label == nxt->label;
        for (std::size_t q = 0; q < m.k && ok; ++q) {
            if (got.counters[q] < nxt->counters[q]) ok = false;
            else err[q] = got.counters[q] - nxt->counters[q];
            if (mode == RunMode::Standard && err[q] != 0) ok = false;
        }
        if (!ok) return fail("step " + std::to_string(j) + " is not a legal move");
        d.run.errors.push_back(err);
    }
    d.run.halted = m.at(d.run.configs.back().label).op == Instr::Op::Halt;
    if (!d.run.halted) return fail("last configuration does not halt");
    d.valid = true;
    return d;
}

// ── Mutations ───────────────────────────────────────────────────────────

struct CounterSlot {
    std::size_t config = 0;   // 0-based configuration index
    std::size_t counter = 0;  // 1-based
};

// Counter intervals constrained by some COPY_q: the current interval of a copied
// counter and its image in the next configuration.
inline std::vector<CounterSlot> copy_governed_slots(const CounterMachine& m, const MachineRun& r) {
    std::vector<CounterSlot> out;
    auto copies = [&](std::size_t j, std::size_t q) {
        if (j + 1 >= r.configs.size()) return false;
        const Instr& in = m.at(r.configs[j].label);
        return in.op == Instr::Op::Jz || (in.op != Instr::Op::Halt && in.counter != q);
    };
    for (std::size_t j = 0; j < r.configs.size(); ++j)
        for (std::size_t q = 1; q <= m.k; ++q)
            if (copies(j, q) || (j > 0 && copies(j - 1, q))) out.push_back({j, q});
    return out;
}

inline TimedWord insert_event(const TimedWord& w, const std::string& p, const Rational& t) {
    std::vector<TimedPoint> pts = w.points();
    auto it = std::find_if(pts.begin(), pts.end(), [&](const TimedPoint& x) { return !(x.t < t); });
    if (it != pts.end() && it->t == t) throw WordError(WordError::Code::Precondition, "a point already sits at " + time_to_string(t));
    pts.insert(it, TimedPoint{{p}, t});
    return make_word(w.alphabet().with({p}), std::move(pts));
}

inline TimedWord remove_point(const TimedWord& w, std::size_t i) {
    std::vector<TimedPoint> pts = w.points();
    if (i < 1 || i > pts.size()) throw std::out_of_range("no point " + std::to_string(i));
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i - 1));
    return make_word(w.alphabet(), std::move(pts));
}

// A fresh a inside counter interval `s`, at an offset not used by any a of the word.
inline TimedWord insert_counter_a(const CounterMachine& m, const TimedWord& w, const CounterSlot& s) {
    const Rational K(static_cast<std::int64_t>(2 * m.k + 1));
    std::vector<Rational> used;
    for (const auto& p : w.points()) {
        if (!p.has("a")) continue;
        Rational rel = p.t;
        while (rel >= 1) rel -= 1;
        used.push_back(rel);
    }
    for (std::int64_t den = 3;; den += 2)
        for (std::int64_t n = 1; n < den; ++n) {
            Rational o(n, den);
            if (std::find(used.begin(), used.end(), o) != used.end()) continue;
            return insert_event(w, "a", K * static_cast<std::int64_t>(s.config) + static_cast<std::int64_t>(2 * s.counter - 1) + o);
        }
}

}  // namespace mtlf
