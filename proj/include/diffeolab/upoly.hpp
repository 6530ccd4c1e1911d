#pragma once
// upoly.hpp -- univariate polynomials over Q, used by the parametric
// elimination that locates dual-profile breakpoints.  Coefficients are kept
// exact; root finding is restricted to rational roots by design.

#include "rat.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace diffeolab {

// Coefficient vector, index = exponent; invariant: no trailing zero (empty = 0).
struct UPoly {
    std::vector<Rat> c;

    static UPoly zero() { return {}; }
    static UPoly constant(const Rat& r) {
        UPoly p;
        if (r != 0) p.c = {r};
        return p;
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    Rat eval(const Rat& x) const {
        Rat acc(0);
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
};

inline UPoly upoly_add(const UPoly& a, const UPoly& b) {
    UPoly r = a;
    if (r.c.size() < b.c.size()) r.c.resize(b.c.size(), Rat(0));
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

inline UPoly upoly_sub(const UPoly& a, const UPoly& b) {
    UPoly r = a;
    if (r.c.size() < b.c.size()) r.c.resize(b.c.size(), Rat(0));
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

inline UPoly upoly_mul(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return UPoly::zero();
    UPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

struct RationalRoots {
    std::set<Rat> roots;      // distinct rational roots (0 included when present)
    int residual_degree = 0;  // degree left after dividing out rational roots
    bool overflow = false;    // coefficient bound exceeded, enumeration skipped
};

namespace detail {

// Positive divisors of |n|; n must satisfy the caller's size cap.
inline std::vector<Int> divisors(Int n) {
    if (n < 0) n = -n;
    std::vector<Int> lo, hi;
    for (Int d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            lo.push_back(d);
            if (d * d != n) hi.push_back(n / d);
        }
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

}  // namespace detail

// Extracts the rational roots of p.  Zero roots are divided out first, then
// candidates come from the classical p|a0, q|alead enumeration on the
// integer-scaled polynomial.  Residual factors keep residual_degree > 0.
inline RationalRoots rational_roots(UPoly p) {
    RationalRoots out;
    p.trim();
    if (p.is_zero() || p.degree() == 0) return out;
    while (!p.c.empty() && p.c.front() == 0) {
        out.roots.insert(Rat(0));
        p.c.erase(p.c.begin());
    }
    p.trim();
    if (p.degree() <= 0) return out;

    // Scale to integer coefficients with content removed.
    Int lcm = 1;
    for (const Rat& r : p.c) lcm = boost::multiprecision::lcm(lcm, rat_den(r));
    std::vector<Int> ic(p.c.size());
    Int content = 0;
    for (size_t i = 0; i < p.c.size(); ++i) {
        ic[i] = rat_num(p.c[i] * Rat(lcm));
        content = boost::multiprecision::gcd(content, ic[i]);
    }
    if (content > 1)
        for (Int& v : ic) v /= content;

    const Int cap = Int("1000000000000");
    while (ic.size() > 1) {
        Int a0 = ic.front(), al = ic.back();
        if (boost::multiprecision::abs(a0) > cap || boost::multiprecision::abs(al) > cap) {
            out.overflow = true;
            out.residual_degree = static_cast<int>(ic.size()) - 1;
            return out;
        }
        bool found = false;
        for (const Int& pn : detail::divisors(a0)) {
            for (const Int& qd : detail::divisors(al)) {
                if (boost::multiprecision::gcd(pn, qd) != 1) continue;
                for (int s : {1, -1}) {
                    Rat cand(s * pn, qd);
                    Rat acc(0);
                    for (size_t i = ic.size(); i-- > 0;) acc = acc * cand + Rat(ic[i]);
                    if (acc != 0) continue;
                    out.roots.insert(cand);
                    // Synthetic division by (x - cand) over Q, then rescale.
                    std::vector<Rat> q(ic.size() - 1);
                    Rat carry(0);
                    for (size_t i = ic.size(); i-- > 1;) {
                        carry = Rat(ic[i]) + carry * cand;
                        q[i - 1] = carry;
                    }
                    Int l2 = 1;
                    for (const Rat& r : q) l2 = boost::multiprecision::lcm(l2, rat_den(r));
                    ic.resize(q.size());
                    Int cont2 = 0;
                    for (size_t i = 0; i < q.size(); ++i) {
                        ic[i] = rat_num(q[i] * Rat(l2));
                        cont2 = boost::multiprecision::gcd(cont2, ic[i]);
                    }
                    if (cont2 > 1)
                        for (Int& v : ic) v /= cont2;
                    found = true;
                    break;
                }
                if (found) break;
            }
            if (found) break;
        }
        if (!found) break;
    }
    out.residual_degree = static_cast<int>(ic.size()) - 1;
    return out;
}

}  // namespace diffeolab
