#pragma once
// pwpoly.hpp -- exact piecewise polynomials on R^d with breaks confined to
// coordinate hyperplanes.  Elements live in Q[x_1..x_d, a_1..a_d] with
// a_i = |x_i| and the normal form a_i^2 -> x_i^2, so every a-exponent is 0
// or 1 and representations are unique.

#include "errors.hpp"
#include "rat.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace diffeolab {

// Monomial x^xe * a^ae; ae entries are 0/1 after normalization.
struct Mono {
    std::vector<uint32_t> xe;
    std::vector<uint8_t> ae;

    bool operator<(const Mono& o) const {
        if (xe != o.xe) return xe < o.xe;
        return ae < o.ae;
    }
    bool operator==(const Mono& o) const { return xe == o.xe && ae == o.ae; }

    bool has_abs() const {
        for (uint8_t b : ae)
            if (b) return true;
        return false;
    }
};

struct OrthantPoly {
    int dim = 0;
    std::map<Mono, Rat> terms;  // normal form, no zero coefficients

    static OrthantPoly zero(int d) { return {d, {}}; }

    static OrthantPoly constant(int d, const Rat& r) {
        OrthantPoly p{d, {}};
        if (r != 0) p.terms[Mono{std::vector<uint32_t>(d, 0), std::vector<uint8_t>(d, 0)}] = r;
        return p;
    }

    static OrthantPoly var(int d, int i) {
        OrthantPoly p{d, {}};
        Mono m{std::vector<uint32_t>(d, 0), std::vector<uint8_t>(d, 0)};
        m.xe[i] = 1;
        p.terms[m] = 1;
        return p;
    }

    static OrthantPoly absvar(int d, int i) {
        OrthantPoly p{d, {}};
        Mono m{std::vector<uint32_t>(d, 0), std::vector<uint8_t>(d, 0)};
        m.ae[i] = 1;
        p.terms[m] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    bool operator==(const OrthantPoly& o) const { return dim == o.dim && terms == o.terms; }
    bool operator<(const OrthantPoly& o) const {
        if (dim != o.dim) return dim < o.dim;
        return terms < o.terms;
    }
    bool operator!=(const OrthantPoly& o) const { return !(*this == o); }

    void add_term(const Mono& m, const Rat& c) {
        if (c == 0) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }
};

inline OrthantPoly add(const OrthantPoly& f, const OrthantPoly& g) {
    OrthantPoly r = f;
    for (const auto& [m, c] : g.terms) r.add_term(m, c);
    return r;
}

inline OrthantPoly scale(const OrthantPoly& f, const Rat& s) {
    OrthantPoly r{f.dim, {}};
    if (s == 0) return r;
    for (const auto& [m, c] : f.terms) r.terms[m] = c * s;
    return r;
}

inline OrthantPoly neg(const OrthantPoly& f) { return scale(f, Rat(-1)); }

inline OrthantPoly sub(const OrthantPoly& f, const OrthantPoly& g) { return add(f, neg(g)); }

inline OrthantPoly mul(const OrthantPoly& f, const OrthantPoly& g) {
    OrthantPoly r{f.dim, {}};
    for (const auto& [ma, ca] : f.terms) {
        for (const auto& [mb, cb] : g.terms) {
            Mono m{std::vector<uint32_t>(f.dim), std::vector<uint8_t>(f.dim)};
            for (int i = 0; i < f.dim; ++i) {
                uint32_t s = uint32_t(ma.ae[i]) + uint32_t(mb.ae[i]);
                m.xe[i] = ma.xe[i] + mb.xe[i] + (s == 2 ? 2 : 0);
                m.ae[i] = uint8_t(s & 1u);
            }
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

inline OrthantPoly operator+(const OrthantPoly& a, const OrthantPoly& b) { return add(a, b); }
inline OrthantPoly operator-(const OrthantPoly& a, const OrthantPoly& b) { return sub(a, b); }
inline OrthantPoly operator*(const OrthantPoly& a, const OrthantPoly& b) { return mul(a, b); }

inline OrthantPoly pow(const OrthantPoly& f, uint32_t e) {
    OrthantPoly r = OrthantPoly::constant(f.dim, 1);
    for (uint32_t i = 0; i < e; ++i) r = mul(r, f);
    return r;
}

// A normal-form element is an ordinary (everywhere C-infinity) polynomial
// exactly when no monomial carries an absolute-value factor: distinct
// orthant pieces of a normalized element never glue smoothly across a facet.
inline bool is_ordinarily_smooth(const OrthantPoly& f) {
    for (const auto& [m, c] : f.terms)
        if (m.has_abs()) return false;
    return true;
}

// Specializes a_i -> signs[i] * x_i for every i; signs entries must be +-1.
inline OrthantPoly orthant_specialize(const OrthantPoly& f, const std::vector<int>& signs) {
    OrthantPoly r{f.dim, {}};
    for (const auto& [m, c] : f.terms) {
        Mono n = m;
        Rat coeff = c;
        for (int i = 0; i < f.dim; ++i) {
            if (!n.ae[i]) continue;
            n.xe[i] += 1;
            n.ae[i] = 0;
            if (signs[i] < 0) coeff = -coeff;
        }
        r.add_term(n, coeff);
    }
    return r;
}

// Partial specialization: only the listed variables get a_i -> sign * x_i.
inline OrthantPoly orthant_specialize_vars(const OrthantPoly& f,
                                           const std::vector<std::pair<int, int>>& var_signs) {
    OrthantPoly r{f.dim, {}};
    for (const auto& [m, c] : f.terms) {
        Mono n = m;
        Rat coeff = c;
        for (const auto& [i, s] : var_signs) {
            if (!n.ae[i]) continue;
            n.xe[i] += 1;
            n.ae[i] = 0;
            if (s < 0) coeff = -coeff;
        }
        r.add_term(n, coeff);
    }
    return r;
}

// Substitutes exact values for the variables listed in vars (sorted, unique);
// the remaining variables are renumbered preserving order.
inline OrthantPoly substitute_point(const OrthantPoly& f, const std::vector<int>& vars,
                                    const Point& values) {
    if (vars.size() != values.size())
        throw Error(Err::PointDimMismatch, "substitute_point: " + std::to_string(vars.size()) +
                                               " variables vs " + std::to_string(values.size()) +
                                               " values");
    std::vector<int> newindex(f.dim, -1);
    std::vector<int> which(f.dim, -1);
    for (size_t k = 0; k < vars.size(); ++k) {
        if (vars[k] < 0 || vars[k] >= f.dim)
            throw Error(Err::PointDimMismatch, "substitute_point: variable out of range");
        which[vars[k]] = static_cast<int>(k);
    }
    int nd = 0;
    for (int i = 0; i < f.dim; ++i)
        if (which[i] < 0) newindex[i] = nd++;
    OrthantPoly r{nd, {}};
    for (const auto& [m, c] : f.terms) {
        Rat coeff = c;
        Mono n{std::vector<uint32_t>(nd, 0), std::vector<uint8_t>(nd, 0)};
        for (int i = 0; i < f.dim; ++i) {
            if (which[i] >= 0) {
                const Rat& v = values[which[i]];
                for (uint32_t e = 0; e < m.xe[i]; ++e) coeff *= v;
                if (m.ae[i]) coeff *= rat_abs(v);
                if (coeff == 0) break;
            } else {
                n.xe[newindex[i]] = m.xe[i];
                n.ae[newindex[i]] = m.ae[i];
            }
        }
        r.add_term(n, coeff);
    }
    return r;
}

// Renames variable i to perm[i] in a poly over new_dim variables.
inline OrthantPoly rename_vars(const OrthantPoly& f, int new_dim, const std::vector<int>& perm) {
    OrthantPoly r{new_dim, {}};
    for (const auto& [m, c] : f.terms) {
        Mono n{std::vector<uint32_t>(new_dim, 0), std::vector<uint8_t>(new_dim, 0)};
        for (int i = 0; i < f.dim; ++i) {
            n.xe[perm[i]] = m.xe[i];
            n.ae[perm[i]] = m.ae[i];
        }
        r.add_term(n, c);
    }
    return r;
}

// x_i -> offset[i] + sum_j lin[i][j] x'_j.  Variables carrying an
// absolute-value factor only admit images c*x'_j or pure constants; anything
// else leaves the representation class.
inline OrthantPoly affine_substitute(const OrthantPoly& f, const std::vector<std::vector<Rat>>& lin,
                                     const std::vector<Rat>& offset, int new_dim) {
    if (static_cast<int>(lin.size()) != f.dim || static_cast<int>(offset.size()) != f.dim)
        throw Error(Err::DimensionMismatch, "affine_substitute: matrix rows must match dimension");
    std::vector<OrthantPoly> sub(f.dim, OrthantPoly::zero(new_dim));
    std::vector<OrthantPoly> abs_sub(f.dim, OrthantPoly::zero(new_dim));
    std::vector<bool> abs_ok(f.dim, false);
    for (int i = 0; i < f.dim; ++i) {
        OrthantPoly s = OrthantPoly::constant(new_dim, offset[i]);
        int nz = -1, count = 0;
        for (int j = 0; j < new_dim; ++j) {
            if (lin[i][j] == 0) continue;
            s = add(s, scale(OrthantPoly::var(new_dim, j), lin[i][j]));
            nz = j;
            ++count;
        }
        sub[i] = s;
        if (count == 0) {
            abs_sub[i] = OrthantPoly::constant(new_dim, rat_abs(offset[i]));
            abs_ok[i] = true;
        } else if (count == 1 && offset[i] == 0) {
            abs_sub[i] = scale(OrthantPoly::absvar(new_dim, nz), rat_abs(lin[i][nz]));
            abs_ok[i] = true;
        }
    }
    OrthantPoly r = OrthantPoly::zero(new_dim);
    for (const auto& [m, c] : f.terms) {
        OrthantPoly t = OrthantPoly::constant(new_dim, c);
        for (int i = 0; i < f.dim; ++i) {
            if (m.xe[i]) t = mul(t, pow(sub[i], m.xe[i]));
            if (m.ae[i]) {
                if (!abs_ok[i])
                    throw Error(Err::SubstitutionOutsideClass,
                                "image of variable " + std::to_string(i + 1) +
                                    " is not a single scaled variable or constant");
                t = mul(t, abs_sub[i]);
            }
        }
        r = add(r, t);
    }
    return r;
}

inline Rat evaluate(const OrthantPoly& f, const Point& p) {
    if (static_cast<int>(p.size()) != f.dim)
        throw Error(Err::PointDimMismatch, "evaluate: point dimension mismatch");
    Rat acc(0);
    for (const auto& [m, c] : f.terms) {
        Rat t = c;
        for (int i = 0; i < f.dim; ++i) {
            for (uint32_t e = 0; e < m.xe[i]; ++e) t *= p[i];
            if (m.ae[i]) t *= rat_abs(p[i]);
        }
        acc += t;
    }
    return acc;
}

inline uint32_t degree_in_var(const OrthantPoly& f, int i) {
    uint32_t d = 0;
    for (const auto& [m, c] : f.terms) d = std::max(d, m.xe[i] + m.ae[i]);
    return d;
}

inline uint32_t total_degree(const OrthantPoly& f) {
    uint32_t d = 0;
    for (const auto& [m, c] : f.terms) {
        uint32_t t = 0;
        for (int i = 0; i < f.dim; ++i) t += m.xe[i] + m.ae[i];
        d = std::max(d, t);
    }
    return d;
}

// Monomials responsible for non-smoothness (those carrying an a-factor).
inline std::set<Mono> nonsmooth_monomials(const OrthantPoly& f) {
    std::set<Mono> s;
    for (const auto& [m, c] : f.terms)
        if (m.has_abs()) s.insert(m);
    return s;
}

inline Rat coeff_of(const OrthantPoly& f, const Mono& m) {
    auto it = f.terms.find(m);
    return it == f.terms.end() ? Rat(0) : it->second;
}

// Rendering; variables 0..split-1 print as x1.., the rest as y1..
// (split < 0 means all variables use the x prefix).  Output is re-parseable
// by the DSL expression grammar.
inline std::string to_string(const OrthantPoly& f, int split = -1) {
    if (f.terms.empty()) return "0";
    auto var_name = [&](int i) {
        if (split >= 0 && i >= split) return "y" + std::to_string(i - split + 1);
        return "x" + std::to_string(i + 1);
    };
    std::string out;
    bool first = true;
    for (const auto& [m, c] : f.terms) {
        Rat ac = rat_abs(c);
        if (first) {
            if (c < 0) out += "-";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        std::string factors;
        for (int i = 0; i < f.dim; ++i) {
            if (m.xe[i]) {
                if (!factors.empty()) factors += "*";
                factors += var_name(i);
                if (m.xe[i] > 1) factors += "^" + std::to_string(m.xe[i]);
            }
            if (m.ae[i]) {
                if (!factors.empty()) factors += "*";
                factors += "abs(" + var_name(i) + ")";
            }
        }
        if (factors.empty()) {
            out += rat_to_string(ac);
        } else if (ac == 1) {
            out += factors;
        } else {
            out += rat_to_string(ac) + "*" + factors;
        }
    }
    return out;
}

}  // namespace diffeolab
