#pragma once

#include "mtlforge/rational.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtlf {

class IntervalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Time constraint with natural endpoints; hi == nullopt means infinity.
struct Interval {
    std::uint64_t lo = 0;
    std::optional<std::uint64_t> hi;
    bool lo_closed = true;
    bool hi_closed = false;

    static Interval make(std::uint64_t lo, std::optional<std::uint64_t> hi, bool lo_closed, bool hi_closed) {
        Interval i{lo, hi, lo_closed, hi_closed};
        if (!hi) {
            if (hi_closed) throw IntervalError("infinite upper end must be open");
        } else if (*hi < lo) {
            throw IntervalError("upper end below lower end");
        } else if (*hi == lo && !(lo_closed && hi_closed)) {
            throw IntervalError("interval denotes the empty set");
        }
        return i;
    }
    static Interval unbounded() { return Interval{0, std::nullopt, true, false}; }
    static Interval closed(std::uint64_t lo, std::uint64_t hi) { return make(lo, hi, true, true); }
    static Interval left_closed(std::uint64_t lo, std::optional<std::uint64_t> hi) { return make(lo, hi, true, false); }
    static Interval open(std::uint64_t lo, std::optional<std::uint64_t> hi) { return make(lo, hi, false, false); }
    static Interval point(std::uint64_t v) { return make(v, v, true, true); }

    // True when [lo,hi) style arguments describe a nonempty set.
    static bool nonempty(std::uint64_t lo, std::optional<std::uint64_t> hi, bool lo_closed, bool hi_closed) {
        if (!hi) return !hi_closed;
        if (*hi > lo) return true;
        return *hi == lo && lo_closed && hi_closed;
    }

    bool is_unbounded() const { return lo == 0 && lo_closed && !hi; }
    bool is_singular() const { return hi && *hi == lo; }
    bool contains_zero() const { return lo == 0 && lo_closed; }

    bool contains(const Rational& d) const {
        Rational l(lo);
        if (lo_closed ? d < l : d <= l) return false;
        if (!hi) return true;
        Rational h(*hi);
        return hi_closed ? d <= h : d < h;
    }

    std::string str() const {
        std::string s = lo_closed ? "[" : "(";
        s += std::to_string(lo);
        s += ",";
        s += hi ? std::to_string(*hi) : std::string("inf");
        s += hi_closed ? "]" : ")";
        return s;
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace mtlf
