#pragma once
// rat.hpp -- exact rational scalar type plus parse/format helpers.
// All engine arithmetic is exact; doubles appear only in test oracles.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace diffeolab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;  // always reduced, denominator > 0

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline int rat_sign(const Rat& r) { return r < 0 ? -1 : (r > 0 ? 1 : 0); }

// Renders "p" for integers, "p/q" otherwise.
inline std::string rat_to_string(const Rat& r) {
    std::string s = rat_num(r).str();
    if (rat_den(r) != 1) s += "/" + rat_den(r).str();
    return s;
}

// Accepts "p", "-p", "p/q", "-p/q".  Throws std::invalid_argument otherwise.
inline Rat rat_from_string(const std::string& s) {
    auto bad = [&]() { return std::invalid_argument("not a rational: '" + s + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int p(s.substr(0, slash));
        Int q(s.substr(slash + 1));
        if (q == 0) throw bad();
        return Rat(p, q);
    } catch (const std::runtime_error&) {
        throw bad();
    }
}

using Point = std::vector<Rat>;  // exact coordinates

inline std::string point_to_string(const Point& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += rat_to_string(p[i]);
    }
    return s + ")";
}

}  // namespace diffeolab
