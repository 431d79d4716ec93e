#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtlf {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

class TimeFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Accepts "3", "0.25" (at most 12 fractional digits) or "3/10".
inline Rational parse_time(std::string_view s) {
    auto fail = [&](const std::string& why) -> Rational {
        throw TimeFormatError("bad timestamp '" + std::string(s) + "': " + why);
    };
    if (s.empty()) return fail("empty");
    auto all_digits = [](std::string_view v) {
        if (v.empty()) return false;
        for (char c : v)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return fail("expected n/d with naturals");
        BigInt d{std::string(den)};
        if (d == 0) return fail("zero denominator");
        return Rational(BigInt(std::string(num)), d);
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (!all_digits(ip) || !all_digits(fp)) return fail("malformed decimal");
        if (fp.size() > 12) return fail("more than 12 fractional digits");
        BigInt scale = 1;
        for (std::size_t k = 0; k < fp.size(); ++k) scale *= 10;
        return Rational(BigInt(std::string(ip) + std::string(fp)), scale);
    }
    if (!all_digits(s)) return fail("not a number");
    return Rational(BigInt(std::string(s)));
}

inline std::string time_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational ratio(long long n, long long d = 1) { return Rational(BigInt(n), BigInt(d)); }

}  // namespace mtlf
