#pragma once
// dvs.hpp -- finitely generated diffeological vector spaces: duals, smooth
// symmetric forms, canonical pseudo-metrics, combinations, and the
// three-valued membership / smooth-linear-map tests.
//
// Plot semantics for a Generated space with generators g_i: the plots are
// locally u -> F(u) + sum_j h_j(u) * g_{i_j}(y_j(u)) with F, h_j, y_j
// ordinarily smooth.  Every computation below is exact against that family.

#include "errors.hpp"
#include "linalg.hpp"
#include "plotmap.hpp"
#include "pwpoly.hpp"
#include "rat.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace diffeolab {

enum class SpaceKind { Standard, Coarse, Generated };

struct DVSpace {
    int dim = 0;
    SpaceKind kind = SpaceKind::Standard;
    std::vector<PlotMap> generators;  // nonempty iff kind == Generated
    bool complete = true;             // false: dual answers are upper bounds

    static DVSpace standard(int n) { return {n, SpaceKind::Standard, {}, true}; }
    static DVSpace coarse(int n) { return {n, SpaceKind::Coarse, {}, true}; }
    static DVSpace generated(int n, std::vector<PlotMap> gens) {
        if (gens.empty())
            throw Error(Err::DimensionMismatch, "generated space needs at least one generator");
        for (const PlotMap& g : gens)
            if (g.codomain_dim != n)
                throw Error(Err::DimensionMismatch, "generator codomain must match space dimension");
        return {n, SpaceKind::Generated, std::move(gens), true};
    }
};

// A linear functional on R^n, stored as its coefficient vector.
struct LinFunctional {
    Vec coeffs;
};

// A symmetric bilinear form, stored as a full symmetric matrix.
struct SymForm {
    Mat m;
};

struct DualBasis {
    int space_dim = 0;
    Mat basis;             // rows are functional coefficient vectors, RREF order
    bool complete = true;  // false: basis is only an upper bound for the dual

    size_t dim() const { return basis.size(); }
};

struct Verdict {
    enum Status { Smooth, NotSmooth, Unknown } status = Unknown;
    std::string witness;  // refuting functional / offending component / decomposition
    std::string reason;
};

// ---------------------------------------------------------------------------
// smooth_dual

// A functional f is smooth iff f composed with every generator is ordinarily
// smooth: each absolute-value-carrying monomial of the composite must cancel,
// which is one linear constraint on f per (generator, monomial).
inline Mat dual_constraint_rows(const std::vector<PlotMap>& gens, int n) {
    Mat rows;
    for (const PlotMap& p : gens) {
        std::set<Mono> monos;
        for (const OrthantPoly& c : p.components)
            for (const Mono& m : nonsmooth_monomials(c)) monos.insert(m);
        for (const Mono& m : monos) {
            Vec row(n, Rat(0));
            for (int w = 0; w < n; ++w) row[w] = coeff_of(p.components[w], m);
            if (!vec_is_zero(row)) rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline DualBasis smooth_dual(const DVSpace& v) {
    DualBasis d;
    d.space_dim = v.dim;
    d.complete = v.complete;
    switch (v.kind) {
        case SpaceKind::Standard:
            d.basis = mat_identity(v.dim);
            return d;
        case SpaceKind::Coarse:
            return d;
        case SpaceKind::Generated:
            d.basis = kernel_basis(dual_constraint_rows(v.generators, v.dim), v.dim);
            return d;
    }
    return d;
}

// ---------------------------------------------------------------------------
// smooth_symmetric_forms

namespace detail {

inline size_t sym_index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    // position of (i,j), i<=j, in row-major upper-triangle order
    size_t idx = 0;
    for (int r = 0; r < i; ++r) idx += static_cast<size_t>(n - r);
    return idx + static_cast<size_t>(j - i);
}

inline Mat sym_vector_to_matrix(const Vec& s, int n) {
    Mat a = mat_zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a[i][j] = a[j][i] = s[sym_index(i, j, n)];
    return a;
}

// Generator pair evaluated over a joint domain: p's variables first, q's after.
inline std::pair<std::vector<OrthantPoly>, std::vector<OrthantPoly>> joint_pair(
    const PlotMap& p, const PlotMap& q) {
    int d = p.domain_dim + q.domain_dim;
    std::vector<int> pl(p.domain_dim), ql(q.domain_dim);
    for (int i = 0; i < p.domain_dim; ++i) pl[i] = i;
    for (int i = 0; i < q.domain_dim; ++i) ql[i] = p.domain_dim + i;
    std::vector<OrthantPoly> pc, qc;
    for (const OrthantPoly& c : p.components) pc.push_back(rename_vars(c, d, pl));
    for (const OrthantPoly& c : q.components) qc.push_back(rename_vars(c, d, ql));
    return {pc, qc};
}

}  // namespace detail

// Exact constraint system for symmetric forms A: (a) every slice A(e_v, .)
// must be a smooth functional; (b) for every generator pair the two-argument
// evaluation A(p(u), q(u')) must be ordinarily smooth on the joint domain.
// Returned basis is canonical (RREF over upper-triangle coordinates).
inline std::vector<SymForm> smooth_symmetric_forms(const DVSpace& v) {
    const int n = v.dim;
    const size_t nu = static_cast<size_t>(n) * (n + 1) / 2;
    std::vector<SymForm> out;
    if (v.kind == SpaceKind::Coarse) return out;
    if (v.kind == SpaceKind::Standard) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Vec s(nu, Rat(0));
                s[detail::sym_index(i, j, n)] = 1;
                out.push_back({detail::sym_vector_to_matrix(s, n)});
            }
        return out;
    }

    Mat rows;
    // (a) slice constraints
    for (const PlotMap& p : v.generators) {
        std::set<Mono> monos;
        for (const OrthantPoly& c : p.components)
            for (const Mono& m : nonsmooth_monomials(c)) monos.insert(m);
        for (int vv = 0; vv < n; ++vv) {
            for (const Mono& m : monos) {
                Vec row(nu, Rat(0));
                for (int w = 0; w < n; ++w)
                    row[detail::sym_index(vv, w, n)] += coeff_of(p.components[w], m);
                if (!vec_is_zero(row)) rows.push_back(std::move(row));
            }
        }
    }
    // (b) pair constraints, unordered pairs including the diagonal
    for (size_t a = 0; a < v.generators.size(); ++a) {
        for (size_t b = a; b < v.generators.size(); ++b) {
            auto [pc, qc] = detail::joint_pair(v.generators[a], v.generators[b]);
            int d = v.generators[a].domain_dim + v.generators[b].domain_dim;
            std::vector<OrthantPoly> per_unknown(nu, OrthantPoly::zero(d));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    per_unknown[detail::sym_index(i, j, n)] =
                        add(per_unknown[detail::sym_index(i, j, n)], mul(pc[i], qc[j]));
            std::set<Mono> monos;
            for (const OrthantPoly& u : per_unknown)
                for (const Mono& m : nonsmooth_monomials(u)) monos.insert(m);
            for (const Mono& m : monos) {
                Vec row(nu, Rat(0));
                for (size_t k = 0; k < nu; ++k) row[k] = coeff_of(per_unknown[k], m);
                if (!vec_is_zero(row)) rows.push_back(std::move(row));
            }
        }
    }
    for (const Vec& s : kernel_basis(std::move(rows), nu))
        out.push_back({detail::sym_vector_to_matrix(s, n)});
    return out;
}

// ---------------------------------------------------------------------------
// pseudo_metric

struct PseudoMetric {
    SymForm form;
    size_t rank = 0;
};

// Canonical candidate sum f_i (x) f_i over the dual basis.  The verification
// steps are invariants of the construction; their failure indicates an
// internal inconsistency, reported as a logic error.
inline PseudoMetric pseudo_metric(const DVSpace& v) {
    DualBasis d = smooth_dual(v);
    const int n = v.dim;
    Mat g = mat_zero(n, n);
    for (const Vec& f : d.basis)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[i][j] += f[i] * f[j];

    // membership of g in the computed form span
    std::vector<SymForm> forms = smooth_symmetric_forms(v);
    const size_t nu = static_cast<size_t>(n) * (n + 1) / 2;
    Mat span;
    for (const SymForm& f : forms) {
        Vec s(nu, Rat(0));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) s[detail::sym_index(i, j, n)] = f.m[i][j];
        span.push_back(std::move(s));
    }
    Vec gs(nu, Rat(0));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) gs[detail::sym_index(i, j, n)] = g[i][j];
    if (!in_span(span, gs))
        throw std::logic_error("pseudo_metric candidate escaped the smooth form span");

    PsdResult ps = psd_rank(g);
    if (!ps.psd || ps.rank != d.dim())
        throw std::logic_error("pseudo_metric candidate failed rank/PSD verification");
    return {SymForm{std::move(g)}, ps.rank};
}

// ---------------------------------------------------------------------------
// combinations

inline PlotMap embed_plot(const PlotMap& p, int total, int offset) {
    std::vector<OrthantPoly> comps;
    comps.reserve(total);
    for (int i = 0; i < offset; ++i) comps.push_back(OrthantPoly::zero(p.domain_dim));
    for (const OrthantPoly& c : p.components) comps.push_back(c);
    for (int i = offset + p.codomain_dim; i < total; ++i)
        comps.push_back(OrthantPoly::zero(p.domain_dim));
    return PlotMap(p.domain_dim, std::move(comps));
}

inline DVSpace direct_sum(const DVSpace& a, const DVSpace& b) {
    int n = a.dim + b.dim;
    bool ca = a.kind == SpaceKind::Coarse, cb = b.kind == SpaceKind::Coarse;
    if (ca && cb) return DVSpace::coarse(n);
    if (ca || cb)
        throw Error(Err::UnsupportedCombination,
                    "direct sum with exactly one coarse factor is not finitely generated");
    if (a.kind == SpaceKind::Standard && b.kind == SpaceKind::Standard)
        return DVSpace::standard(n);
    std::vector<PlotMap> gens;
    for (const PlotMap& g : a.generators) gens.push_back(embed_plot(g, n, 0));
    for (const PlotMap& g : b.generators) gens.push_back(embed_plot(g, n, a.dim));
    return DVSpace::generated(n, std::move(gens));
}

// Tensor index (v, w) -> v * dim(b) + w.
inline DVSpace tensor(const DVSpace& a, const DVSpace& b) {
    int n = a.dim * b.dim;
    if (a.kind == SpaceKind::Coarse || b.kind == SpaceKind::Coarse) return DVSpace::coarse(n);
    if (a.kind == SpaceKind::Standard && b.kind == SpaceKind::Standard)
        return DVSpace::standard(n);

    std::vector<PlotMap> gens;
    auto tensor_basis = [&](const PlotMap& p, bool left) {
        // p (x) e_w for fixed basis vectors of the other factor
        int other = left ? b.dim : a.dim;
        for (int w = 0; w < other; ++w) {
            std::vector<OrthantPoly> comps(n, OrthantPoly::zero(p.domain_dim));
            for (int v = 0; v < p.codomain_dim; ++v)
                comps[left ? v * b.dim + w : w * b.dim + v] = p.components[v];
            gens.emplace_back(p.domain_dim, std::move(comps));
        }
    };
    if (a.kind == SpaceKind::Generated)
        for (const PlotMap& p : a.generators) tensor_basis(p, true);
    if (b.kind == SpaceKind::Generated)
        for (const PlotMap& q : b.generators) tensor_basis(q, false);
    if (a.kind == SpaceKind::Generated && b.kind == SpaceKind::Generated) {
        for (const PlotMap& p : a.generators) {
            for (const PlotMap& q : b.generators) {
                auto [pc, qc] = detail::joint_pair(p, q);
                int d = p.domain_dim + q.domain_dim;
                std::vector<OrthantPoly> comps(n, OrthantPoly::zero(d));
                for (int v = 0; v < a.dim; ++v)
                    for (int w = 0; w < b.dim; ++w) comps[v * b.dim + w] = mul(pc[v], qc[w]);
                gens.emplace_back(d, std::move(comps));
            }
        }
    }
    return DVSpace::generated(n, std::move(gens));
}

// Quotient by the span of the given vectors; coordinates are the RREF
// non-pivot positions of the subspace basis.
struct QuotientResult {
    DVSpace space;
    Mat projection;               // (n - r) x n quotient map
    std::vector<size_t> coords;   // surviving coordinate indices
};

inline QuotientResult space_quotient(const DVSpace& v, const Mat& subspace) {
    for (const Vec& row : subspace)
        if (static_cast<int>(row.size()) != v.dim)
            throw Error(Err::InvalidSubspace, "subspace vector has wrong dimension");
    Mat b = subspace;
    std::vector<size_t> piv = rref(b);
    if (piv.size() != subspace.size())
        throw Error(Err::InvalidSubspace, "subspace basis is linearly dependent");
    while (b.size() > piv.size()) b.pop_back();

    std::vector<bool> is_piv(v.dim, false);
    for (size_t c : piv) is_piv[c] = true;
    std::vector<size_t> coords;
    for (int c = 0; c < v.dim; ++c)
        if (!is_piv[c]) coords.push_back(c);

    Mat proj = mat_zero(coords.size(), v.dim);
    for (size_t j = 0; j < coords.size(); ++j) {
        proj[j][coords[j]] = 1;
        for (size_t i = 0; i < piv.size(); ++i) proj[j][piv[i]] = -b[i][coords[j]];
    }

    QuotientResult out{DVSpace::standard(static_cast<int>(coords.size())), proj, coords};
    switch (v.kind) {
        case SpaceKind::Standard:
            break;
        case SpaceKind::Coarse:
            out.space = DVSpace::coarse(static_cast<int>(coords.size()));
            break;
        case SpaceKind::Generated: {
            std::vector<PlotMap> gens;
            for (const PlotMap& g : v.generators) gens.push_back(compose_linear(proj, g));
            out.space = DVSpace::generated(static_cast<int>(coords.size()), std::move(gens));
            break;
        }
    }
    out.space.complete = v.complete;
    return out;
}

// ---------------------------------------------------------------------------
// membership

struct MemberConfig {
    uint32_t degree = 4;  // coefficient degree bound for decompositions
};

namespace detail {

// Catalog of domain substitutions: each generator variable is sent to 0 or to
// +-u_l.  Composites that stay in class by construction.
inline std::vector<PlotMap> candidate_composites(const std::vector<PlotMap>& gens,
                                                 int domain_dim) {
    std::vector<PlotMap> out;
    std::set<std::vector<OrthantPoly>> seen;
    for (const PlotMap& g : gens) {
        int d = g.domain_dim;
        // options per slot: 0, +u_1..+u_D, -u_1..-u_D
        int options = 1 + 2 * domain_dim;
        std::vector<int> pick(d, 0);
        for (;;) {
            Mat lin(d, Vec(domain_dim, Rat(0)));
            Vec off(d, Rat(0));
            for (int s = 0; s < d; ++s) {
                int o = pick[s];
                if (o == 0) continue;
                int var = (o - 1) % domain_dim;
                lin[s][var] = o <= domain_dim ? 1 : -1;
            }
            PlotMap comp = precompose_affine(g, lin, off, domain_dim);
            if (!plot_is_smooth(comp) && !seen.count(comp.components)) {
                seen.insert(comp.components);
                out.push_back(std::move(comp));
            }
            int s = 0;
            while (s < d && ++pick[s] == options) pick[s++] = 0;
            if (s == d) break;
        }
    }
    return out;
}

inline std::vector<Mono> smooth_monomials_up_to(int dim, uint32_t deg) {
    std::vector<Mono> out;
    Mono m{std::vector<uint32_t>(dim, 0), std::vector<uint8_t>(dim, 0)};
    // lexicographic enumeration of exponent vectors with total degree <= deg
    for (;;) {
        uint32_t tot = 0;
        for (int i = 0; i < dim; ++i) tot += m.xe[i];
        if (tot <= deg) out.push_back(m);
        int i = 0;
        while (i < dim) {
            if (++m.xe[i] <= deg) {
                uint32_t t2 = 0;
                for (int k = 0; k < dim; ++k) t2 += m.xe[k];
                if (t2 <= deg) break;
            }
            m.xe[i++] = 0;
        }
        if (i == dim) break;
    }
    return out;
}

}  // namespace detail

// Three-valued membership of a query plot in the diffeology of v.
//  Smooth: the query is ordinarily smooth, or decomposes over the generator
//          catalog with polynomial coefficients of degree <= cfg.degree.
//  NotSmooth: some smooth functional of v composes non-smoothly with q.
//  Unknown: neither certificate found within the configured bound.
inline Verdict is_plot_member(const PlotMap& q, const DVSpace& v, MemberConfig cfg = {}) {
    if (q.codomain_dim != v.dim)
        throw Error(Err::DimensionMismatch, "query codomain must match space dimension");
    Verdict out;
    if (v.kind == SpaceKind::Coarse) {
        out.status = Verdict::Smooth;
        out.reason = "coarse diffeology admits every map";
        return out;
    }
    if (plot_is_smooth(q)) {
        out.status = Verdict::Smooth;
        out.reason = "ordinarily smooth";
        return out;
    }
    if (v.kind == SpaceKind::Standard) {
        for (int w = 0; w < q.codomain_dim; ++w) {
            if (!is_ordinarily_smooth(q.components[w])) {
                out.status = Verdict::NotSmooth;
                out.witness = "component " + std::to_string(w + 1) + " = " +
                              to_string(q.components[w]);
                out.reason = "standard diffeology admits only ordinarily smooth plots";
                return out;
            }
        }
    }

    // refutation by a smooth functional
    DualBasis dual = smooth_dual(v);
    for (const Vec& f : dual.basis) {
        OrthantPoly comp = OrthantPoly::zero(q.domain_dim);
        for (int w = 0; w < v.dim; ++w)
            if (f[w] != 0) comp = add(comp, scale(q.components[w], f[w]));
        if (!is_ordinarily_smooth(comp)) {
            out.status = Verdict::NotSmooth;
            std::string fs = "(";
            for (size_t i = 0; i < f.size(); ++i) {
                if (i) fs += ", ";
                fs += rat_to_string(f[i]);
            }
            fs += ")";
            out.witness = fs;
            out.reason = "functional composes non-smoothly with the query";
            return out;
        }
    }

    // decomposition over the generator catalog
    std::vector<PlotMap> cands = detail::candidate_composites(v.generators, q.domain_dim);
    std::vector<Mono> hs = detail::smooth_monomials_up_to(q.domain_dim, cfg.degree);
    // unknowns: lambda_{c,h}; equations: every abs-carrying monomial of
    // q - sum lambda * h * cand must vanish, per codomain coordinate.
    std::map<std::pair<int, Mono>, size_t> row_index;
    auto row_of = [&](int w, const Mono& m) {
        auto key = std::make_pair(w, m);
        auto it = row_index.find(key);
        if (it != row_index.end()) return it->second;
        size_t idx = row_index.size();
        row_index.emplace(key, idx);
        return idx;
    };
    std::vector<std::map<size_t, Rat>> cols;  // per unknown: sparse rows
    for (const PlotMap& c : cands) {
        for (const Mono& h : hs) {
            OrthantPoly hm{q.domain_dim, {}};
            hm.terms[h] = 1;
            std::map<size_t, Rat> col;
            for (int w = 0; w < v.dim; ++w) {
                OrthantPoly prod = mul(hm, c.components[w]);
                for (const auto& [m, coef] : prod.terms)
                    if (m.has_abs()) col[row_of(w, m)] += coef;
            }
            cols.push_back(std::move(col));
        }
    }
    std::map<size_t, Rat> rhs_entries;
    for (int w = 0; w < v.dim; ++w)
        for (const auto& [m, coef] : q.components[w].terms)
            if (m.has_abs()) rhs_entries[row_of(w, m)] = coef;
    Vec rhs(row_index.size(), Rat(0));
    for (const auto& [r, coef] : rhs_entries) rhs[r] = coef;
    Mat sys = mat_zero(row_index.size(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k)
        for (const auto& [r, coef] : cols[k]) sys[r][k] = coef;
    if (auto sol = solve(std::move(sys), rhs)) {
        out.status = Verdict::Smooth;
        std::string parts;
        PlotMap residue = q;  // composites cancel every abs monomial; what is
                              // left is an ordinarily smooth plot, free in any
                              // vector space diffeology
        for (size_t k = 0; k < sol->size(); ++k) {
            if ((*sol)[k] == 0) continue;
            size_t ci = k / hs.size(), hi = k % hs.size();
            OrthantPoly hm{q.domain_dim, {}};
            hm.terms[hs[hi]] = (*sol)[k];
            for (int w = 0; w < v.dim; ++w)
                residue.components[w] =
                    sub(residue.components[w], mul(hm, cands[ci].components[w]));
            if (!parts.empty()) parts += " + ";
            parts += "[" + to_string(hm) + "]*" + plot_to_string(cands[ci]);
        }
        bool rem = false;
        for (const OrthantPoly& r : residue.components)
            if (!r.terms.empty()) rem = true;
        if (rem && !parts.empty()) parts += " + " + plot_to_string(residue);
        out.witness = parts.empty() ? "0" : parts;
        out.reason = "decomposes over generator composites";
        return out;
    }

    out.status = Verdict::Unknown;
    out.reason = "no decomposition within degree " + std::to_string(cfg.degree) +
                 " and no refuting functional";
    return out;
}

// Smoothness of the linear map m : v -> w between diffeological vector spaces.
inline Verdict is_smooth_linear_map(const Mat& m, const DVSpace& v, const DVSpace& w,
                                    MemberConfig cfg = {}) {
    if (m.size() != static_cast<size_t>(w.dim) ||
        (w.dim > 0 && mat_cols(m) != static_cast<size_t>(v.dim)))
        throw Error(Err::DimensionMismatch, "matrix shape must be dim(w) x dim(v)");
    Verdict out;
    if (w.kind == SpaceKind::Coarse) {
        out.status = Verdict::Smooth;
        out.reason = "coarse codomain";
        return out;
    }
    if (v.kind == SpaceKind::Coarse) {
        bool zero = true;
        for (const Vec& row : m) zero = zero && vec_is_zero(row);
        out.status = zero ? Verdict::Smooth : Verdict::NotSmooth;
        out.reason = zero ? "zero map from a coarse space"
                          : "nonzero linear map from a coarse space into a finer one";
        if (!zero) out.witness = "coarse plot with non-smooth image";
        return out;
    }
    if (v.kind == SpaceKind::Standard) {
        out.status = Verdict::Smooth;
        out.reason = "ordinarily smooth linear map";
        return out;
    }
    bool unknown = false;
    std::string unknown_reason;
    for (size_t i = 0; i < v.generators.size(); ++i) {
        PlotMap image = compose_linear(m, v.generators[i]);
        Verdict sub = is_plot_member(image, w, cfg);
        if (sub.status == Verdict::NotSmooth) {
            out.status = Verdict::NotSmooth;
            out.witness = "generator " + std::to_string(i + 1) + " -> " +
                          plot_to_string(image) + (sub.witness.empty() ? "" : "; " + sub.witness);
            out.reason = sub.reason;
            return out;
        }
        if (sub.status == Verdict::Unknown) {
            unknown = true;
            unknown_reason = "generator " + std::to_string(i + 1) + ": " + sub.reason;
        }
    }
    if (unknown) {
        out.status = Verdict::Unknown;
        out.reason = unknown_reason;
        return out;
    }
    out.status = Verdict::Smooth;
    out.reason = "all generator images are plots of the codomain";
    return out;
}

}  // namespace diffeolab
