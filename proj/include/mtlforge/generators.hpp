#pragma once

#include "mtlforge/evaluator.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace mtlf {

// Timestamps are multiples of 1/denom in [0, horizon]; words have 1..max_len points.
struct GridSpec {
    std::size_t max_len = 5;
    std::uint64_t denom = 2;
    std::uint64_t horizon = 4;

    std::size_t slots() const { return static_cast<std::size_t>(denom * horizon + 1); }
    void validate() const {
        if (max_len < 1 || denom < 1 || horizon < 1) throw std::invalid_argument("grid needs max_len, denom, horizon >= 1");
    }
};

// Deterministic across platforms: only raw mt19937_64 output is used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t below(std::uint64_t n) { return n ? eng_() % n : 0; }
    bool coin(std::uint64_t num = 1, std::uint64_t den = 2) { return below(den) < num; }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

inline TimedWord gen_random_word(Rng& rng, const Alphabet& sigma, const GridSpec& grid) {
    grid.validate();
    if (sigma.empty()) throw std::invalid_argument("empty alphabet");
    const std::size_t slots = grid.slots();
    std::size_t len = 1 + rng.below(std::min(grid.max_len, slots));
    // choose len distinct slots (selection sampling keeps them sorted)
    std::vector<std::size_t> chosen;
    std::size_t need = len;
    for (std::size_t s = 0; s < slots && need; ++s)
        if (rng.below(slots - s) < need) {
            chosen.push_back(s);
            --need;
        }
    std::vector<TimedPoint> pts;
    const std::uint64_t subsets = (1ULL << sigma.size()) - 1;
    for (auto s : chosen) {
        std::uint64_t m = 1 + rng.below(subsets);
        TimedPoint p{{}, Rational(BigInt(s), BigInt(grid.denom))};
        for (std::size_t k = 0; k < sigma.size(); ++k)
            if (m >> k & 1) p.props.push_back(sigma.props()[k]);
        pts.push_back(std::move(p));
    }
    return make_word(sigma, std::move(pts));
}

inline TimedWord gen_random_word(std::uint64_t seed, const Alphabet& sigma, const GridSpec& grid) {
    Rng rng(seed);
    return gen_random_word(rng, sigma, grid);
}

namespace detail {

inline Interval random_interval(Rng& rng, bool singular_ok, bool lcro_only) {
    for (;;) {
        std::uint64_t lo = rng.below(4);
        if (lcro_only) {
            if (lo == 3 || rng.coin(1, 3)) return Interval::left_closed(lo, std::nullopt);
            return Interval::left_closed(lo, lo + 1 + rng.below(3 - lo));
        }
        std::optional<std::uint64_t> hi;
        if (!rng.coin(1, 4)) hi = lo + rng.below(4 - lo);
        bool lc = rng.coin(), hc = hi && rng.coin();
        if (hi && *hi == lo) {
            if (!singular_ok) continue;
            lc = hc = true;
        }
        if (!Interval::nonempty(lo, hi, lc, hc)) continue;
        return Interval::make(lo, hi, lc, hc);
    }
}

inline Formula random_formula(Rng& rng, const Alphabet& sigma, unsigned depth, Fragment fr) {
    auto leaf = [&] { return atom(sigma.props()[rng.below(sigma.size())]); };
    if (depth == 0) return leaf();
    const bool past = fr == Fragment::DiamondIPastI || fr == Fragment::UntilNSSinceNS || fr == Fragment::UntilISinceNS ||
                      fr == Fragment::UntilISinceI;
    const bool unary_only = fr == Fragment::DiamondI || fr == Fragment::DiamondIPastI;
    const bool fut_singular = fr != Fragment::UntilNSSinceNS;
    const bool past_singular = fr == Fragment::UntilISinceI || fr == Fragment::DiamondIPastI;
    const bool past_lcro = fr == Fragment::UntilISinceNS;
    switch (rng.below(8)) {
        case 0: return leaf();
        case 1: return neg(random_formula(rng, sigma, depth - 1, fr));
        case 2: return conj(random_formula(rng, sigma, depth - 1, fr), random_formula(rng, sigma, depth - 1, fr));
        case 3: return disj(random_formula(rng, sigma, depth - 1, fr), random_formula(rng, sigma, depth - 1, fr));
        case 4:
        case 5: {
            Interval iv = random_interval(rng, fut_singular, false);
            Formula r = random_formula(rng, sigma, depth - 1, fr);
            if (unary_only || rng.coin()) return eventually(iv, r);
            return until(random_formula(rng, sigma, depth - 1, fr), iv, r);
        }
        default: {
            if (!past) return neg(random_formula(rng, sigma, depth - 1, fr));
            Interval iv = random_interval(rng, past_singular, past_lcro);
            Formula r = random_formula(rng, sigma, depth - 1, fr);
            if (unary_only || rng.coin()) return once(iv, r);
            return since(random_formula(rng, sigma, depth - 1, fr), iv, r);
        }
    }
}

}  // namespace detail

// Intervals have endpoints <= 3 (upper end possibly infinite).
inline Formula gen_random_formula(Rng& rng, const Alphabet& sigma, unsigned depth, Fragment fr) {
    if (sigma.empty()) throw std::invalid_argument("empty alphabet");
    return detail::random_formula(rng, sigma, depth, fr);
}

inline Formula gen_random_formula(std::uint64_t seed, const Alphabet& sigma, unsigned depth, Fragment fr) {
    Rng rng(seed);
    return gen_random_formula(rng, sigma, depth, fr);
}

// ── Exhaustive enumeration ─────────────────────────────────────────────

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Sum over k <= max_len of C(slots, k) * (2^|sigma| - 1)^k.
inline BigInt count_words(std::size_t alphabet_size, const GridSpec& grid) {
    BigInt total = 0, per = (BigInt(1) << alphabet_size) - 1;
    for (std::size_t k = 1; k <= grid.max_len; ++k) total += binomial(grid.slots(), k) * boost::multiprecision::pow(per, static_cast<unsigned>(k));
    return total;
}

struct EnumOptions {
    bool anchor_zero = false;  // first point at time 0 (complete up to shifting)
    bool singletons = false;   // exactly one proposition per point
};

// Streams every word of the grid in a fixed order (length, timestamps, prop sets)
// as FastWord with ticks = slot index and scale = denom. Visitor returns false to stop.
inline void enumerate_fast(std::size_t alphabet_size, const GridSpec& grid, const EnumOptions& eo,
                           const std::function<bool(const FastWord&)>& visit) {
    grid.validate();
    const std::size_t slots = grid.slots();
    const std::uint64_t choices = eo.singletons ? alphabet_size : (1ULL << alphabet_size) - 1;
    auto mask = [&](std::uint64_t c) { return eo.singletons ? 1ULL << c : c + 1; };
    FastWord w;
    w.scale = static_cast<std::int64_t>(grid.denom);
    const std::size_t lo = eo.anchor_zero ? 1 : 0;  // slots 0..lo-1 are fixed
    for (std::size_t k = 1; k <= std::min(grid.max_len, slots); ++k) {
        const std::size_t free = k - lo, span = slots - lo;
        std::vector<std::size_t> comb(free);
        for (std::size_t i = 0; i < free; ++i) comb[i] = lo + i;
        for (;;) {
            w.ticks.clear();
            if (lo) w.ticks.push_back(0);
            w.ticks.insert(w.ticks.end(), comb.begin(), comb.end());
            std::vector<std::uint64_t> ch(k, 0);
            for (;;) {
                w.props.resize(k);
                for (std::size_t q = 0; q < k; ++q) w.props[q] = mask(ch[q]);
                if (!visit(w)) return;
                std::size_t p = k;
                while (p > 0 && ch[p - 1] + 1 == choices) --p;
                if (p == 0) break;
                ++ch[p - 1];
                for (std::size_t q = p; q < k; ++q) ch[q] = 0;
            }
            // next combination of `free` slots out of lo..slots-1
            std::size_t i = free;
            while (i > 0 && comb[i - 1] == lo + span - free + i - 1) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t j = i; j < free; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
}

inline void enumerate_fast(std::size_t alphabet_size, const GridSpec& grid, const std::function<bool(const FastWord&)>& visit) {
    enumerate_fast(alphabet_size, grid, EnumOptions{}, visit);
}

inline TimedWord from_fast(const FastWord& w, const Alphabet& sigma) {
    std::vector<TimedPoint> pts;
    for (std::size_t i = 0; i < w.size(); ++i) {
        TimedPoint p;
        p.t = w.exact.empty() ? Rational(BigInt(w.ticks[i]), BigInt(w.scale)) : w.exact[i];
        for (std::size_t k = 0; k < sigma.size(); ++k)
            if (w.props[i] >> k & 1) p.props.push_back(sigma.props()[k]);
        pts.push_back(std::move(p));
    }
    return make_word(sigma, std::move(pts));
}

inline void enumerate_words(const Alphabet& sigma, const GridSpec& grid, const std::function<bool(const TimedWord&)>& visit) {
    enumerate_fast(sigma.size(), grid, [&](const FastWord& fw) { return visit(from_fast(fw, sigma)); });
}

// Inserts `count` points strictly inside the gaps of w, each carrying a random
// nonempty subset of `extra` (props outside w's alphabet). First and last points stay put.
inline TimedWord insert_random_points(Rng& rng, const TimedWord& w, const Alphabet& extra, std::size_t count) {
    if (extra.empty()) throw std::invalid_argument("no propositions to insert");
    std::vector<TimedPoint> pts = w.points();
    if (pts.size() < 2) return make_word(w.alphabet().united(extra), std::move(pts));
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t i = rng.below(pts.size() - 1);
        const std::uint64_t parts = 2 + rng.below(4);
        Rational t = pts[i].t + (pts[i + 1].t - pts[i].t) * Rational(1 + rng.below(parts - 1), parts);
        TimedPoint p;
        p.t = t;
        while (p.props.empty())
            for (const auto& q : extra.props())
                if (rng.coin()) p.props.push_back(q);
        pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i + 1), std::move(p));
    }
    return make_word(w.alphabet().united(extra), std::move(pts));
}

// Toggles one random proposition of `props` at one random point, refusing to empty a point.
inline TimedWord flip_random_prop(Rng& rng, const TimedWord& w, const Alphabet& props) {
    std::vector<TimedPoint> pts = w.points();
    auto& p = pts[rng.below(pts.size())];
    const std::string& q = props.props()[rng.below(props.size())];
    auto it = std::find(p.props.begin(), p.props.end(), q);
    if (it == p.props.end()) p.props.push_back(q);
    else if (p.props.size() > 1) p.props.erase(it);
    return make_word(w.alphabet().united(props), std::move(pts));
}

}  // namespace mtlf
