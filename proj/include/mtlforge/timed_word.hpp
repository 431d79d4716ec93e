#pragma once

#include "mtlforge/formula.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtlf {

class WordError : public std::invalid_argument {
public:
    enum class Code { NonMonotone, EmptyProps, UnknownProp, EmptyWord, NegativeTime, AlphabetMismatch, Precondition };
    WordError(Code code, const std::string& msg, std::size_t index = 0)
        : std::invalid_argument(msg), code(code), index(index) {}
    Code code;
    std::size_t index;  // 1-based position of the offending point, 0 if not applicable
};

struct TimedPoint {
    std::vector<std::string> props;  // sorted, unique
    Rational t;

    bool has(std::string_view p) const { return std::binary_search(props.begin(), props.end(), p); }
    friend bool operator==(const TimedPoint&, const TimedPoint&) = default;
};

class TimedWord {
public:
    TimedWord() = default;

    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<TimedPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    // 1-based access, matching dom(w) = {1..n}.
    const TimedPoint& at(std::size_t i) const { return points_.at(i - 1); }
    const Rational& time(std::size_t i) const { return points_.at(i - 1).t; }
    const Rational& duration() const { return points_.back().t; }

    friend bool operator==(const TimedWord&, const TimedWord&) = default;

    friend TimedWord make_word(Alphabet, std::vector<TimedPoint>);

private:
    Alphabet alphabet_;
    std::vector<TimedPoint> points_;
};

inline TimedWord make_word(Alphabet sigma, std::vector<TimedPoint> pts) {
    if (pts.empty()) throw WordError(WordError::Code::EmptyWord, "timed word must be nonempty");
    for (std::size_t k = 0; k < pts.size(); ++k) {
        auto& p = pts[k];
        std::sort(p.props.begin(), p.props.end());
        p.props.erase(std::unique(p.props.begin(), p.props.end()), p.props.end());
        if (p.props.empty())
            throw WordError(WordError::Code::EmptyProps, "point " + std::to_string(k + 1) + " has no propositions", k + 1);
        for (const auto& q : p.props)
            if (!sigma.contains(q))
                throw WordError(WordError::Code::UnknownProp,
                                "point " + std::to_string(k + 1) + " uses '" + q + "' outside the alphabet", k + 1);
        if (p.t < 0) throw WordError(WordError::Code::NegativeTime, "negative timestamp at point " + std::to_string(k + 1), k + 1);
        if (k > 0 && !(pts[k - 1].t < p.t))
            throw WordError(WordError::Code::NonMonotone,
                            "timestamps not strictly increasing at point " + std::to_string(k + 1), k + 1);
    }
    TimedWord w;
    w.alphabet_ = std::move(sigma);
    w.points_ = std::move(pts);
    return w;
}

// E1 then E2: erase props outside sigma, drop emptied points. nullopt = empty residue.
inline std::optional<TimedWord> restrict_word(const TimedWord& w, const Alphabet& sigma) {
    std::vector<TimedPoint> out;
    for (const auto& p : w.points()) {
        TimedPoint q{{}, p.t};
        for (const auto& a : p.props)
            if (sigma.contains(a)) q.props.push_back(a);
        if (!q.props.empty()) out.push_back(std::move(q));
    }
    if (out.empty()) return std::nullopt;
    return make_word(sigma, std::move(out));
}

inline bool is_action_point(const TimedPoint& p, const Alphabet& sigma) {
    for (const auto& a : p.props)
        if (sigma.contains(a)) return true;
    return false;
}

namespace detail {
inline void check_oversampling_args(const TimedWord& big, const TimedWord& small, const Alphabet& sigma) {
    if (!sigma.subset_of(big.alphabet()))
        throw WordError(WordError::Code::AlphabetMismatch, "sigma is not contained in the larger word's alphabet");
    if (!(small.alphabet() == sigma))
        throw WordError(WordError::Code::AlphabetMismatch, "smaller word's alphabet differs from sigma");
}
}  // namespace detail

inline bool is_oversampling_of(const TimedWord& big, const TimedWord& small, const Alphabet& sigma) {
    detail::check_oversampling_args(big, small, sigma);
    auto r = restrict_word(big, sigma);
    if (!r || !(*r == small)) return false;
    return is_action_point(big.points().front(), sigma) && is_action_point(big.points().back(), sigma);
}

inline bool is_simple_extension(const TimedWord& big, const TimedWord& small, const Alphabet& sigma) {
    return is_oversampling_of(big, small, sigma) && big.size() == small.size();
}

// Positions of big's action points mapped to positions of small (both 1-based).
using OversamplingMap = std::map<std::size_t, std::size_t>;

inline OversamplingMap g_map(const TimedWord& big, const TimedWord& small, const Alphabet& sigma) {
    if (!is_oversampling_of(big, small, sigma))
        throw WordError(WordError::Code::Precondition, "g_map requires an oversampling");
    OversamplingMap g;
    std::size_t j = 0;
    for (std::size_t i = 1; i <= big.size(); ++i)
        if (is_action_point(big.at(i), sigma)) g[i] = ++j;
    return g;
}

inline TimedWord shift_word(const TimedWord& w, const Rational& delta) {
    if (w.time(1) + delta < 0)
        throw WordError(WordError::Code::NegativeTime, "shift would produce a negative timestamp", 1);
    auto pts = w.points();
    for (auto& p : pts) p.t += delta;
    return make_word(w.alphabet(), std::move(pts));
}

// Timestamp of the first / last point in [t, t+1) carrying p.
inline std::optional<Rational> first_occurrence(const TimedWord& w, std::string_view p, std::uint64_t t) {
    Rational lo(t), hi(t + 1);
    for (const auto& pt : w.points())
        if (pt.t >= lo && pt.t < hi && pt.has(p)) return pt.t;
    return std::nullopt;
}

inline std::optional<Rational> last_occurrence(const TimedWord& w, std::string_view p, std::uint64_t t) {
    Rational lo(t), hi(t + 1);
    std::optional<Rational> r;
    for (const auto& pt : w.points())
        if (pt.t >= lo && pt.t < hi && pt.has(p)) r = pt.t;
    return r;
}

}  // namespace mtlf
