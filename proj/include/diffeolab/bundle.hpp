#pragma once
// bundle.hpp -- diffeological vector pseudo-bundles over R^k: generated and
// pullback-coarse bundles, fibre extraction, stratified dual profiles,
// combinations, gluing, and the commutation checks for gluing vs combining.
//
// Generators are base-identity plots: the first k components are the base
// coordinates themselves, so the fibre over x0 is exact point substitution.

#include "dvs.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "plotmap.hpp"
#include "pwpoly.hpp"
#include "upoly.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace diffeolab {

enum class BundleKind { Generated, PullbackCoarse, Glued, Sub };

// Finite gluing data: base points of the left bundle, their images in the
// right base, and one fibre matrix per point.
struct GluingSpec {
    std::vector<Point> points;
    std::vector<Point> images;
    std::vector<Mat> lifts;  // (n2-k2) x (n1-k1) each
};

struct PseudoBundle {
    BundleKind kind = BundleKind::Generated;
    int total_dim = 0;  // n
    int base_dim = 0;   // k
    std::vector<PlotMap> generators;  // Generated: domain = k + extra params
    // Sub
    std::shared_ptr<const PseudoBundle> parent;
    std::vector<int> sub_coords;  // fibre-local indices into the parent fibre
    // Glued
    std::shared_ptr<const PseudoBundle> left, right;
    GluingSpec spec;

    int fibre_dim() const { return total_dim - base_dim; }
};

inline PseudoBundle make_generated_bundle(int n, int k, std::vector<PlotMap> gens) {
    if (k < 1) throw Error(Err::UnsupportedBaseDim, "base dimension must be at least 1");
    if (n < k) throw Error(Err::DimensionMismatch, "total dimension below base dimension");
    if (gens.empty())
        throw Error(Err::DimensionMismatch, "generated bundle needs at least one generator");
    for (const PlotMap& g : gens) {
        if (g.codomain_dim != n)
            throw Error(Err::DimensionMismatch, "generator codomain must equal total dimension");
        if (g.domain_dim < k)
            throw Error(Err::NotBaseIdentity, "generator domain lacks the base variables");
        for (int i = 0; i < k; ++i)
            if (g.components[i] != OrthantPoly::var(g.domain_dim, i))
                throw Error(Err::NotBaseIdentity,
                            "generator component " + std::to_string(i + 1) +
                                " is not the base coordinate x" + std::to_string(i + 1));
    }
    PseudoBundle b;
    b.kind = BundleKind::Generated;
    b.total_dim = n;
    b.base_dim = k;
    b.generators = std::move(gens);
    return b;
}

inline PseudoBundle make_pullback_coarse_bundle(int n, int k) {
    if (k < 1) throw Error(Err::UnsupportedBaseDim, "base dimension must be at least 1");
    if (n < k) throw Error(Err::DimensionMismatch, "total dimension below base dimension");
    PseudoBundle b;
    b.kind = BundleKind::PullbackCoarse;
    b.total_dim = n;
    b.base_dim = k;
    return b;
}

// A point of a glued base: side 0 = left bundle's base, side 1 = right.
struct BundlePoint {
    int side = 0;
    Point p;
};

inline std::string bundle_point_to_string(const BundlePoint& bp) {
    return std::string(bp.side == 0 ? "left" : "right") + point_to_string(bp.p);
}

// ---------------------------------------------------------------------------
// fibre extraction

namespace detail {

// Substitutes the base point into a generator and keeps the fibre part.
inline PlotMap fibre_generator(const PlotMap& g, int k, const Point& x0) {
    std::vector<int> base_vars(k);
    for (int i = 0; i < k; ++i) base_vars[i] = i;
    std::vector<OrthantPoly> comps;
    for (int w = k; w < g.codomain_dim; ++w)
        comps.push_back(substitute_point(g.components[w], base_vars, x0));
    return PlotMap(g.domain_dim - k, std::move(comps));
}

}  // namespace detail

inline DVSpace fibre_space(const PseudoBundle& b, const Point& x0);

namespace detail {

// Restricted rule for sub-bundle fibres.  Generators whose complement part
// vanishes are kept (restricted); the rest must admit one shared exact
// dependency sub = M * out, in which case they contribute only smooth plots
// and are dropped; otherwise the result is an upper-bound space.
inline DVSpace sub_fibre(const PseudoBundle& sub, const Point& x0) {
    DVSpace parent_fibre = fibre_space(*sub.parent, x0);
    const int m = parent_fibre.dim;
    const std::vector<int>& s_coords = sub.sub_coords;
    std::vector<int> o_coords;
    {
        std::vector<bool> in_s(m, false);
        for (int c : s_coords) in_s[c] = true;
        for (int c = 0; c < m; ++c)
            if (!in_s[c]) o_coords.push_back(c);
    }
    const int ms = static_cast<int>(s_coords.size());
    const int mo = static_cast<int>(o_coords.size());

    if (parent_fibre.kind == SpaceKind::Coarse) return DVSpace::coarse(ms);
    if (parent_fibre.kind == SpaceKind::Standard) return DVSpace::standard(ms);

    std::vector<PlotMap> kept;
    std::vector<const PlotMap*> dependent;
    bool complete = true;
    for (const PlotMap& g : parent_fibre.generators) {
        if (plot_is_smooth(g)) continue;
        bool out_zero = true;
        for (int c : o_coords) out_zero = out_zero && g.components[c].is_zero();
        if (out_zero) {
            std::vector<OrthantPoly> comps;
            for (int c : s_coords) comps.push_back(g.components[c]);
            kept.emplace_back(g.domain_dim, std::move(comps));
        } else {
            dependent.push_back(&g);
        }
    }
    if (!dependent.empty()) {
        // one shared M with  g_sub = M * g_out  for every dependent generator;
        // unknowns M[s][o] indexed s * mo + o
        std::vector<std::map<size_t, Rat>> cols(static_cast<size_t>(ms) * mo);
        std::map<std::tuple<size_t, int, Mono>, size_t> rindex;
        auto row_key = [&](size_t gi, int s, const Mono& mu) {
            auto key = std::make_tuple(gi, s, mu);
            auto it = rindex.find(key);
            if (it != rindex.end()) return it->second;
            size_t idx = rindex.size();
            rindex.emplace(key, idx);
            return idx;
        };
        std::map<size_t, Rat> rhs_entries;
        for (size_t gi = 0; gi < dependent.size(); ++gi) {
            const PlotMap& g = *dependent[gi];
            for (int si = 0; si < ms; ++si) {
                for (const auto& [mu, c] : g.components[s_coords[si]].terms)
                    rhs_entries[row_key(gi, si, mu)] = c;
                for (int oi = 0; oi < mo; ++oi)
                    for (const auto& [mu, c] : g.components[o_coords[oi]].terms)
                        cols[static_cast<size_t>(si) * mo + oi][row_key(gi, si, mu)] += c;
            }
        }
        Mat sys = mat_zero(rindex.size(), cols.size());
        for (size_t kcol = 0; kcol < cols.size(); ++kcol)
            for (const auto& [r, c] : cols[kcol]) sys[r][kcol] = c;
        Vec rhs(rindex.size(), Rat(0));
        for (const auto& [r, c] : rhs_entries) rhs[r] = c;
        if (!solve(std::move(sys), rhs).has_value()) complete = false;
    }
    DVSpace out = kept.empty() ? DVSpace::standard(ms) : DVSpace::generated(ms, std::move(kept));
    out.complete = complete && parent_fibre.complete;
    return out;
}

}  // namespace detail

inline DVSpace fibre_space(const PseudoBundle& b, const Point& x0) {
    if (static_cast<int>(x0.size()) != b.base_dim)
        throw Error(Err::PointDimMismatch, "base point has wrong dimension");
    switch (b.kind) {
        case BundleKind::PullbackCoarse:
            return DVSpace::coarse(b.fibre_dim());
        case BundleKind::Generated: {
            std::vector<PlotMap> gens;
            bool any_nonsmooth = false;
            for (const PlotMap& g : b.generators) {
                gens.push_back(detail::fibre_generator(g, b.base_dim, x0));
                any_nonsmooth = any_nonsmooth || !plot_is_smooth(gens.back());
            }
            if (!any_nonsmooth) return DVSpace::standard(b.fibre_dim());
            return DVSpace::generated(b.fibre_dim(), std::move(gens));
        }
        case BundleKind::Sub:
            return detail::sub_fibre(b, x0);
        case BundleKind::Glued:
            throw Error(Err::PointDimMismatch,
                        "glued bundles take tagged base points (side + coordinates)");
    }
    throw std::logic_error("unreachable");
}

inline DVSpace fibre_space(const PseudoBundle& b, const BundlePoint& bp) {
    if (b.kind != BundleKind::Glued) {
        if (bp.side != 0)
            throw Error(Err::PointDimMismatch, "non-glued bundle has only a left base");
        return fibre_space(b, bp.p);
    }
    if (bp.side == 1) return fibre_space(*b.right, bp.p);
    for (size_t i = 0; i < b.spec.points.size(); ++i)
        if (b.spec.points[i] == bp.p) return fibre_space(*b.right, b.spec.images[i]);
    return fibre_space(*b.left, bp.p);
}

// ---------------------------------------------------------------------------
// dual profile (stratified for base_dim == 1; pointwise otherwise)

struct ProfileStratum {
    bool is_point = false;
    std::optional<Rat> lo, hi;  // open interval ends; nullopt = unbounded
    Rat point;                  // when is_point
    size_t dual_dim = 0;
    Mat dual_basis;  // fibre-local coefficient rows at the witness
    Point witness;
    bool glued_override = false;  // point identified with the right bundle
    std::string label;
};

struct DualProfile {
    int base_dim = 1;
    std::vector<ProfileStratum> strata;
};

namespace detail {

inline std::string interval_label(const std::optional<Rat>& lo, const std::optional<Rat>& hi) {
    std::string s = "(";
    s += lo ? rat_to_string(*lo) : "-inf";
    s += ", ";
    s += hi ? rat_to_string(*hi) : "inf";
    return s + ")";
}

// Parametric dual-constraint entries for base_dim == 1: one row per
// (generator, non-smooth fibre monomial), entries are polynomials in the
// base parameter after fixing the base sign.
inline std::vector<std::vector<UPoly>> parametric_rows(const PseudoBundle& b, int side) {
    std::vector<std::vector<UPoly>> rows;
    const int m = b.fibre_dim();
    for (const PlotMap& g : b.generators) {
        const int dom = g.domain_dim;
        // group fibre-component terms by their fibre-variable monomial part
        std::map<Mono, std::vector<UPoly>> by_fibre_mono;
        for (int w = 0; w < m; ++w) {
            const OrthantPoly& comp = g.components[b.base_dim + w];
            for (const auto& [mono, c] : comp.terms) {
                bool fibre_abs = false;
                for (int v = 1; v < dom; ++v) fibre_abs = fibre_abs || mono.ae[v];
                if (!fibre_abs) continue;
                Mono fm = mono;
                uint32_t xdeg = fm.xe[0] + fm.ae[0];
                Rat coeff = c;
                if (fm.ae[0] && side < 0) coeff = -coeff;
                fm.xe[0] = 0;
                fm.ae[0] = 0;
                auto& vecs = by_fibre_mono[fm];
                if (vecs.empty()) vecs.assign(m, UPoly::zero());
                UPoly xp;
                xp.c.assign(xdeg + 1, Rat(0));
                xp.c[xdeg] = coeff;
                vecs[w] = upoly_add(vecs[w], xp);
            }
        }
        for (auto& [fm, vecs] : by_fibre_mono) rows.push_back(std::move(vecs));
    }
    return rows;
}

// Candidate breakpoints from entry and elimination-pivot polynomials.  Any
// polynomial that does not factor into rational linear pieces is an error.
inline void collect_roots(const UPoly& p, std::set<Rat>& out) {
    if (p.is_zero() || p.degree() == 0) return;
    RationalRoots rr = rational_roots(p);
    if (rr.overflow)
        throw Error(Err::IrrationalBreakpoint,
                    "coefficient polynomial too large for exact root enumeration");
    if (rr.residual_degree > 0)
        throw Error(Err::IrrationalBreakpoint,
                    "coefficient polynomial admits no rational linear factorization");
    for (const Rat& r : rr.roots) out.insert(r);
}

inline void eliminate_and_collect(std::vector<std::vector<UPoly>> rows, std::set<Rat>& out) {
    if (rows.empty()) return;
    const size_t cols = rows[0].size();
    for (const auto& row : rows)
        for (const UPoly& e : row) collect_roots(e, out);
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows.size(); ++c) {
        size_t sel = rows.size();
        for (size_t i = r; i < rows.size(); ++i)
            if (!rows[i][c].is_zero()) { sel = i; break; }
        if (sel == rows.size()) continue;
        std::swap(rows[sel], rows[r]);
        collect_roots(rows[r][c], out);
        for (size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][c].is_zero()) continue;
            UPoly f = rows[i][c];
            for (size_t j = 0; j < cols; ++j)
                rows[i][j] = upoly_sub(upoly_mul(rows[r][c], rows[i][j]),
                                       upoly_mul(f, rows[r][j]));
        }
        ++r;
    }
}

inline void profile_fill(ProfileStratum& s, const PseudoBundle& b) {
    DVSpace f = fibre_space(b, s.witness);
    DualBasis d = smooth_dual(f);
    s.dual_dim = d.dim();
    s.dual_basis = d.basis;
}

}  // namespace detail

inline DualProfile dual_profile(const PseudoBundle& b);

// Pointwise query, any base dimension.
inline DualBasis dual_profile_at(const PseudoBundle& b, const Point& x0) {
    return smooth_dual(fibre_space(b, x0));
}

inline DualProfile dual_profile(const PseudoBundle& b) {
    if (b.kind == BundleKind::Glued)
        throw Error(Err::UnsupportedBaseDim,
                    "glued bundles support per-side profiles; use glued_dual_profile");
    if (b.kind == BundleKind::Sub)
        throw Error(Err::UnsupportedCombination,
                    "sub-bundles answer fibre queries pointwise; stratified profile unsupported");
    if (b.base_dim != 1)
        throw Error(Err::UnsupportedBaseDim,
                    "stratified dual profile requires base dimension 1; use pointwise queries");

    std::set<Rat> candidates;
    candidates.insert(Rat(0));
    if (b.kind == BundleKind::Generated) {
        for (int side : {+1, -1})
            detail::eliminate_and_collect(detail::parametric_rows(b, side), candidates);
    }

    std::vector<Rat> cuts(candidates.begin(), candidates.end());
    DualProfile prof;
    prof.base_dim = 1;
    auto add_interval = [&](std::optional<Rat> lo, std::optional<Rat> hi) {
        ProfileStratum s;
        s.is_point = false;
        s.lo = lo;
        s.hi = hi;
        Rat w;
        if (lo && hi) w = (*lo + *hi) / 2;
        else if (lo) w = *lo + 1;
        else if (hi) w = *hi - 1;
        else w = 0;
        s.witness = {w};
        s.label = detail::interval_label(lo, hi);
        detail::profile_fill(s, b);
        prof.strata.push_back(std::move(s));
    };
    auto add_point = [&](const Rat& x) {
        ProfileStratum s;
        s.is_point = true;
        s.point = x;
        s.witness = {x};
        s.label = "{" + rat_to_string(x) + "}";
        detail::profile_fill(s, b);
        prof.strata.push_back(std::move(s));
    };
    add_interval(std::nullopt, cuts.front());
    for (size_t i = 0; i < cuts.size(); ++i) {
        add_point(cuts[i]);
        if (i + 1 < cuts.size()) add_interval(cuts[i], cuts[i + 1]);
    }
    add_interval(cuts.back(), std::nullopt);

    // merge (interval, point, interval) runs with identical dual data
    for (;;) {
        bool merged = false;
        for (size_t i = 1; i + 1 < prof.strata.size(); ++i) {
            ProfileStratum &a = prof.strata[i - 1], &p = prof.strata[i], &c = prof.strata[i + 1];
            if (!p.is_point || a.is_point || c.is_point) continue;
            if (a.dual_dim != p.dual_dim || p.dual_dim != c.dual_dim) continue;
            if (a.dual_basis != p.dual_basis || p.dual_basis != c.dual_basis) continue;
            ProfileStratum joined = a;
            joined.hi = c.hi;
            joined.label = detail::interval_label(joined.lo, joined.hi);
            if (joined.lo && joined.hi) joined.witness = {(*joined.lo + *joined.hi) / 2};
            else if (joined.lo) joined.witness = {*joined.lo + 1};
            else if (joined.hi) joined.witness = {*joined.hi - 1};
            else joined.witness = {Rat(0)};
            // the dual rows may vary inside a stratum; merge only when the
            // joined witness re-derives the identical data
            detail::profile_fill(joined, b);
            if (joined.dual_dim != a.dual_dim || joined.dual_basis != a.dual_basis) continue;
            a = std::move(joined);
            prof.strata.erase(prof.strata.begin() + i, prof.strata.begin() + i + 2);
            merged = true;
            break;
        }
        if (!merged) break;
    }
    return prof;
}

struct GluedProfile {
    DualProfile left, right;
};

inline GluedProfile glued_dual_profile(const PseudoBundle& b) {
    if (b.kind != BundleKind::Glued)
        throw Error(Err::UnsupportedCombination, "glued_dual_profile needs a glued bundle");
    GluedProfile out{dual_profile(*b.left), dual_profile(*b.right)};
    for (size_t i = 0; i < b.spec.points.size(); ++i) {
        const Rat y = b.spec.points[i][0];
        DualBasis d = smooth_dual(fibre_space(*b.right, b.spec.images[i]));
        auto& strata = out.left.strata;
        size_t pos = 0;
        for (; pos < strata.size(); ++pos) {
            ProfileStratum& s = strata[pos];
            if (s.is_point && s.point == y) break;
            bool lo_ok = !s.lo || *s.lo < y;
            bool hi_ok = !s.hi || y < *s.hi;
            if (!s.is_point && lo_ok && hi_ok) {
                // split the interval around the glued point
                ProfileStratum leftpart = s, pointpart, rightpart = s;
                leftpart.hi = y;
                leftpart.label = detail::interval_label(leftpart.lo, leftpart.hi);
                rightpart.lo = y;
                rightpart.label = detail::interval_label(rightpart.lo, rightpart.hi);
                pointpart.is_point = true;
                pointpart.point = y;
                pointpart.witness = {y};
                pointpart.label = "{" + rat_to_string(y) + "}";
                strata.erase(strata.begin() + pos);
                strata.insert(strata.begin() + pos, {leftpart, pointpart, rightpart});
                ++pos;
                break;
            }
        }
        ProfileStratum& target = strata[pos];
        target.dual_dim = d.dim();
        target.dual_basis = d.basis;
        target.glued_override = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// combinations

inline PseudoBundle bundle_direct_sum(const PseudoBundle& a, const PseudoBundle& b) {
    if (a.base_dim != b.base_dim)
        throw Error(Err::BaseMismatch, "direct sum requires a shared base");
    if (a.kind == BundleKind::PullbackCoarse && b.kind == BundleKind::PullbackCoarse)
        return make_pullback_coarse_bundle(a.base_dim + a.fibre_dim() + b.fibre_dim(),
                                           a.base_dim);
    if (a.kind != BundleKind::Generated || b.kind != BundleKind::Generated)
        throw Error(Err::UnsupportedCombination,
                    "direct sum is defined for generated or pullback-coarse pairs");
    const int k = a.base_dim, ma = a.fibre_dim(), mb = b.fibre_dim();
    const int n = k + ma + mb;
    std::vector<PlotMap> gens;
    auto embed = [&](const PlotMap& g, int offset, int mg_other) {
        (void)mg_other;
        std::vector<OrthantPoly> comps;
        for (int i = 0; i < k; ++i) comps.push_back(OrthantPoly::var(g.domain_dim, i));
        for (int w = 0; w < ma + mb; ++w) comps.push_back(OrthantPoly::zero(g.domain_dim));
        for (int w = 0; w < g.codomain_dim - k; ++w)
            comps[static_cast<size_t>(k) + offset + w] = g.components[k + w];
        gens.emplace_back(g.domain_dim, std::move(comps));
    };
    for (const PlotMap& g : a.generators) embed(g, 0, mb);
    for (const PlotMap& g : b.generators) embed(g, ma, ma);
    return make_generated_bundle(n, k, std::move(gens));
}

inline PseudoBundle bundle_tensor(const PseudoBundle& a, const PseudoBundle& b) {
    if (a.base_dim != b.base_dim)
        throw Error(Err::BaseMismatch, "tensor requires a shared base");
    if (a.kind == BundleKind::PullbackCoarse && b.kind == BundleKind::PullbackCoarse)
        return make_pullback_coarse_bundle(a.base_dim + a.fibre_dim() * b.fibre_dim(),
                                           a.base_dim);
    if (a.kind != BundleKind::Generated || b.kind != BundleKind::Generated)
        throw Error(Err::UnsupportedCombination,
                    "tensor is defined for generated or pullback-coarse pairs");
    const int k = a.base_dim, ma = a.fibre_dim(), mb = b.fibre_dim();
    const int n = k + ma * mb;
    std::vector<PlotMap> gens;
    auto base_identity = [&](int dom) {
        std::vector<OrthantPoly> comps;
        for (int i = 0; i < k; ++i) comps.push_back(OrthantPoly::var(dom, i));
        for (int w = 0; w < ma * mb; ++w) comps.push_back(OrthantPoly::zero(dom));
        return comps;
    };
    for (const PlotMap& g : a.generators) {
        for (int w = 0; w < mb; ++w) {
            auto comps = base_identity(g.domain_dim);
            for (int v = 0; v < ma; ++v) comps[k + v * mb + w] = g.components[k + v];
            gens.emplace_back(g.domain_dim, std::move(comps));
        }
    }
    for (const PlotMap& h : b.generators) {
        for (int v = 0; v < ma; ++v) {
            auto comps = base_identity(h.domain_dim);
            for (int w = 0; w < mb; ++w) comps[k + v * mb + w] = h.components[k + w];
            gens.emplace_back(h.domain_dim, std::move(comps));
        }
    }
    for (const PlotMap& g : a.generators) {
        for (const PlotMap& h : b.generators) {
            const int dg = g.domain_dim, dh = h.domain_dim;
            const int dom = dg + (dh - k);
            // shared base variables; h's fibre parameters are renamed after g's
            std::vector<int> gperm(dg), hperm(dh);
            for (int i = 0; i < dg; ++i) gperm[i] = i;
            for (int i = 0; i < k; ++i) hperm[i] = i;
            for (int i = k; i < dh; ++i) hperm[i] = dg + (i - k);
            auto comps = base_identity(dom);
            for (int v = 0; v < ma; ++v) {
                OrthantPoly gv = rename_vars(g.components[k + v], dom, gperm);
                for (int w = 0; w < mb; ++w) {
                    OrthantPoly hw = rename_vars(h.components[k + w], dom, hperm);
                    comps[k + v * mb + w] = mul(gv, hw);
                }
            }
            gens.emplace_back(dom, std::move(comps));
        }
    }
    return make_generated_bundle(n, k, std::move(gens));
}

namespace detail {

inline std::vector<int> validate_fibre_coords(const PseudoBundle& b, std::vector<int> coords) {
    std::sort(coords.begin(), coords.end());
    for (size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= b.fibre_dim())
            throw Error(Err::NonCoordinateSubspace, "fibre coordinate out of range");
        if (i && coords[i] == coords[i - 1])
            throw Error(Err::NonCoordinateSubspace, "repeated fibre coordinate");
    }
    return coords;
}

}  // namespace detail

// Quotient by the span of the listed fibre coordinates: projection onto the
// complement coordinates, pushed forward through the generators.
inline PseudoBundle bundle_quotient(const PseudoBundle& b, std::vector<int> fibre_coords) {
    if (b.kind != BundleKind::Generated)
        throw Error(Err::UnsupportedCombination, "quotient is defined for generated bundles");
    std::vector<int> z = detail::validate_fibre_coords(b, std::move(fibre_coords));
    std::vector<int> keep;
    {
        std::vector<bool> dropped(b.fibre_dim(), false);
        for (int c : z) dropped[c] = true;
        for (int c = 0; c < b.fibre_dim(); ++c)
            if (!dropped[c]) keep.push_back(c);
    }
    const int k = b.base_dim;
    std::vector<PlotMap> gens;
    for (const PlotMap& g : b.generators) {
        std::vector<OrthantPoly> comps;
        for (int i = 0; i < k; ++i) comps.push_back(g.components[i]);
        for (int c : keep) comps.push_back(g.components[k + c]);
        gens.emplace_back(g.domain_dim, std::move(comps));
    }
    return make_generated_bundle(k + static_cast<int>(keep.size()), k, std::move(gens));
}

inline PseudoBundle bundle_sub(const PseudoBundle& b, std::vector<int> fibre_coords) {
    if (b.kind == BundleKind::Sub) {
        // flatten: sub of sub = sub of the original on composed coordinates
        std::vector<int> composed;
        for (int c : detail::validate_fibre_coords(b, fibre_coords))
            composed.push_back(b.sub_coords[c]);
        return bundle_sub(*b.parent, std::move(composed));
    }
    if (b.kind != BundleKind::Generated && b.kind != BundleKind::PullbackCoarse)
        throw Error(Err::UnsupportedCombination,
                    "sub-bundle is defined for generated or pullback-coarse bundles");
    std::vector<int> s = detail::validate_fibre_coords(b, std::move(fibre_coords));
    PseudoBundle out;
    out.kind = BundleKind::Sub;
    out.base_dim = b.base_dim;
    out.total_dim = b.base_dim + static_cast<int>(s.size());
    out.parent = std::make_shared<PseudoBundle>(b);
    out.sub_coords = std::move(s);
    return out;
}

// ---------------------------------------------------------------------------
// gluing

inline PseudoBundle glue(const PseudoBundle& b1, const PseudoBundle& b2, const GluingSpec& spec,
                         MemberConfig cfg = {}) {
    if (spec.points.size() != spec.images.size() || spec.points.size() != spec.lifts.size())
        throw Error(Err::DimensionMismatch, "gluing spec lists must have equal length");
    for (size_t i = 0; i < spec.points.size(); ++i) {
        if (static_cast<int>(spec.points[i].size()) != b1.base_dim)
            throw Error(Err::PointDimMismatch, "gluing point has wrong base dimension");
        if (static_cast<int>(spec.images[i].size()) != b2.base_dim)
            throw Error(Err::PointDimMismatch, "gluing image has wrong base dimension");
        for (size_t j = 0; j < i; ++j) {
            if (spec.points[j] == spec.points[i])
                throw Error(Err::FNotInjective, "duplicate gluing point " +
                                                    point_to_string(spec.points[i]));
            if (spec.images[j] == spec.images[i])
                throw Error(Err::FNotInjective,
                            "base map not injective: points " + point_to_string(spec.points[j]) +
                                " and " + point_to_string(spec.points[i]) +
                                " share the image " + point_to_string(spec.images[i]));
        }
        const Mat& lift = spec.lifts[i];
        if (lift.size() != static_cast<size_t>(b2.fibre_dim()) ||
            (b2.fibre_dim() > 0 && mat_cols(lift) != static_cast<size_t>(b1.fibre_dim())))
            throw Error(Err::DimensionMismatch, "lift matrix shape must be fibre2 x fibre1");
        DVSpace f1 = fibre_space(b1, spec.points[i]);
        DVSpace f2 = fibre_space(b2, spec.images[i]);
        Verdict v = is_smooth_linear_map(lift, f1, f2, cfg);
        if (v.status == Verdict::NotSmooth)
            throw Error(Err::LiftNotSmooth, "lift at " + point_to_string(spec.points[i]) + ": " +
                                                v.reason +
                                                (v.witness.empty() ? "" : " [" + v.witness + "]"));
        if (v.status == Verdict::Unknown)
            throw Error(Err::LiftNotSmooth, "lift at " + point_to_string(spec.points[i]) +
                                                " undecided: " + v.reason);
    }
    PseudoBundle g;
    g.kind = BundleKind::Glued;
    g.left = std::make_shared<PseudoBundle>(b1);
    g.right = std::make_shared<PseudoBundle>(b2);
    g.spec = spec;
    g.base_dim = b1.base_dim;
    g.total_dim = b1.total_dim;
    return g;
}

// ---------------------------------------------------------------------------
// sub-bundle compatibility of a gluing

struct SubGluingResult {
    bool ok = true;
    Point at;
    Vec witness;  // image vector escaping the target sub-bundle
};

inline SubGluingResult check_subbundle_gluing(const PseudoBundle& b1, const PseudoBundle& b2,
                                              const GluingSpec& spec, std::vector<int> z1,
                                              std::vector<int> z2) {
    std::vector<int> s1 = detail::validate_fibre_coords(b1, std::move(z1));
    std::vector<int> s2 = detail::validate_fibre_coords(b2, std::move(z2));
    std::vector<bool> in_z2(b2.fibre_dim(), false);
    for (int c : s2) in_z2[c] = true;
    for (size_t i = 0; i < spec.points.size(); ++i) {
        for (int c : s1) {
            Vec e(b1.fibre_dim(), Rat(0));
            e[c] = 1;
            Vec img = mat_apply(spec.lifts[i], e);
            for (int w = 0; w < b2.fibre_dim(); ++w) {
                if (!in_z2[w] && img[w] != 0) {
                    return {false, spec.points[i], img};
                }
            }
        }
    }
    return {true, {}, {}};
}

// ---------------------------------------------------------------------------
// induced gluing through fibrewise projections

// F1 maps fibres of b1p into fibres of b1 over each glued point; F2 maps
// fibres of b2 out to fibres of b2p.  The induced lift is F2 * lift * F1.
inline GluingSpec induced_gluing(const PseudoBundle& b1p, const PseudoBundle& b2p,
                                 const std::vector<Mat>& f1, const std::vector<Mat>& f2,
                                 const PseudoBundle& b1, const PseudoBundle& b2,
                                 const GluingSpec& spec, MemberConfig cfg = {}) {
    if (f1.size() != spec.points.size() || f2.size() != spec.points.size())
        throw Error(Err::ProjectionMismatch, "one projection matrix needed per glued point");
    GluingSpec out;
    out.points = spec.points;
    out.images = spec.images;
    for (size_t i = 0; i < spec.points.size(); ++i) {
        if (f1[i].size() != static_cast<size_t>(b1.fibre_dim()) ||
            (b1.fibre_dim() > 0 && mat_cols(f1[i]) != static_cast<size_t>(b1p.fibre_dim())))
            throw Error(Err::ProjectionMismatch, "F1 shape must be fibre(b1) x fibre(b1')");
        if (f2[i].size() != static_cast<size_t>(b2p.fibre_dim()) ||
            (b2p.fibre_dim() > 0 && mat_cols(f2[i]) != static_cast<size_t>(b2.fibre_dim())))
            throw Error(Err::ProjectionMismatch, "F2 shape must be fibre(b2') x fibre(b2)");
        auto check = [&](const Mat& m, const DVSpace& from, const DVSpace& to,
                         const char* name) {
            Verdict v = is_smooth_linear_map(m, from, to, cfg);
            if (v.status != Verdict::Smooth)
                throw Error(Err::LiftNotSmooth,
                            std::string(name) + " at " + point_to_string(spec.points[i]) +
                                (v.status == Verdict::Unknown ? " undecided: " : ": ") + v.reason);
        };
        check(f1[i], fibre_space(b1p, spec.points[i]), fibre_space(b1, spec.points[i]), "F1");
        check(f2[i], fibre_space(b2, spec.images[i]), fibre_space(b2p, spec.images[i]), "F2");
        out.lifts.push_back(mat_mul(f2[i], mat_mul(spec.lifts[i], f1[i])));
    }
    return out;
}

// ---------------------------------------------------------------------------
// commutation of gluing with combinations and duals

struct CommuteReport {
    enum Status { Commutes, HypothesisFailed, WitnessMismatch } status = Commutes;
    std::string witness;
    std::string detail;
};

namespace detail {

inline std::vector<Point> sign_witnesses(int k) {
    std::vector<Point> pts;
    const int total = [&] {
        int t = 1;
        for (int i = 0; i < k; ++i) t *= 3;
        return t;
    }();
    for (int t = 0; t < total; ++t) {
        Point p(k);
        int rem = t;
        for (int i = k - 1; i >= 0; --i) {
            int digit = rem % 3;
            rem /= 3;
            p[i] = digit == 0 ? Rat(-1) : (digit == 1 ? Rat(0) : Rat(1));
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

inline void append_unique(std::vector<Point>& pts, const Point& p) {
    for (const Point& q : pts)
        if (q == p) return;
    pts.push_back(p);
}

inline bool spaces_match(const DVSpace& a, const DVSpace& b, std::string& why,
                         MemberConfig cfg) {
    if (a.dim != b.dim) {
        why = "fibre dimensions differ: " + std::to_string(a.dim) + " vs " +
              std::to_string(b.dim);
        return false;
    }
    DualBasis da = smooth_dual(a), db = smooth_dual(b);
    if (da.basis != db.basis) {
        why = "fibre dual bases differ";
        return false;
    }
    Mat id = mat_identity(a.dim);
    Verdict fwd = is_smooth_linear_map(id, a, b, cfg);
    if (fwd.status != Verdict::Smooth) {
        why = "identity not verified smooth forward: " + fwd.reason;
        return false;
    }
    Verdict bwd = is_smooth_linear_map(id, b, a, cfg);
    if (bwd.status != Verdict::Smooth) {
        why = "identity not verified smooth backward: " + bwd.reason;
        return false;
    }
    return true;
}

inline Mat block_diag(const Mat& a, const Mat& b) {
    size_t ra = a.size(), ca = a.empty() ? 0 : a[0].size();
    size_t rb = b.size(), cb = b.empty() ? 0 : b[0].size();
    Mat m = mat_zero(ra + rb, ca + cb);
    for (size_t i = 0; i < ra; ++i)
        for (size_t j = 0; j < ca; ++j) m[i][j] = a[i][j];
    for (size_t i = 0; i < rb; ++i)
        for (size_t j = 0; j < cb; ++j) m[ra + i][ca + j] = b[i][j];
    return m;
}

inline Mat kronecker(const Mat& a, const Mat& b) {
    size_t ra = a.size(), ca = a.empty() ? 0 : a[0].size();
    size_t rb = b.size(), cb = b.empty() ? 0 : b[0].size();
    Mat m = mat_zero(ra * rb, ca * cb);
    for (size_t i = 0; i < ra; ++i)
        for (size_t j = 0; j < ca; ++j)
            for (size_t p = 0; p < rb; ++p)
                for (size_t q = 0; q < cb; ++q) m[i * rb + p][j * cb + q] = a[i][j] * b[p][q];
    return m;
}

}  // namespace detail

// Product (fibrewise direct sum) and tensor cases: glue-then-combine must
// agree fibrewise with combine-then-glue at every witness.
inline CommuteReport check_gluing_commutes_combine(bool tensor_case, const PseudoBundle& b1,
                                                   const PseudoBundle& b2, const GluingSpec& s1,
                                                   const PseudoBundle& b1p, const PseudoBundle& b2p,
                                                   const GluingSpec& s2, MemberConfig cfg = {}) {
    CommuteReport rep;
    if (s1.points != s2.points || s1.images != s2.images)
        throw Error(Err::BaseMismatch, "both gluings must share Y and the base map");
    PseudoBundle ga = glue(b1, b2, s1, cfg);
    PseudoBundle gb = glue(b1p, b2p, s2, cfg);

    PseudoBundle c1 = tensor_case ? bundle_tensor(b1, b1p) : bundle_direct_sum(b1, b1p);
    PseudoBundle c2 = tensor_case ? bundle_tensor(b2, b2p) : bundle_direct_sum(b2, b2p);
    GluingSpec cs;
    cs.points = s1.points;
    cs.images = s1.images;
    for (size_t i = 0; i < s1.lifts.size(); ++i)
        cs.lifts.push_back(tensor_case ? detail::kronecker(s1.lifts[i], s2.lifts[i])
                                       : detail::block_diag(s1.lifts[i], s2.lifts[i]));
    PseudoBundle gc;
    try {
        gc = glue(c1, c2, cs, cfg);
    } catch (const Error& e) {
        rep.status = CommuteReport::WitnessMismatch;
        rep.detail = std::string("combined lift failed validation: ") + e.what();
        return rep;
    }

    std::vector<Point> left_w = detail::sign_witnesses(b1.base_dim);
    for (const Point& y : s1.points) detail::append_unique(left_w, y);
    std::vector<Point> right_w = detail::sign_witnesses(b2.base_dim);
    for (const Point& y : s1.images) detail::append_unique(right_w, y);

    size_t checked = 0;
    auto verify_at = [&](const BundlePoint& bp) -> bool {
        DVSpace fa = fibre_space(ga, bp);
        DVSpace fb = fibre_space(gb, bp);
        DVSpace combined = tensor_case ? tensor(fa, fb) : direct_sum(fa, fb);
        DVSpace direct = fibre_space(gc, bp);
        std::string why;
        if (!detail::spaces_match(direct, combined, why, cfg)) {
            rep.status = CommuteReport::WitnessMismatch;
            rep.witness = bundle_point_to_string(bp);
            rep.detail = why;
            return false;
        }
        ++checked;
        return true;
    };
    for (const Point& p : left_w)
        if (!verify_at({0, p})) return rep;
    for (const Point& p : right_w)
        if (!verify_at({1, p})) return rep;
    rep.status = CommuteReport::Commutes;
    rep.detail = "fibrewise agreement at " + std::to_string(checked) + " witnesses";
    return rep;
}

// Dual case: over each glued point the fibre duals must match in dimension
// (the hypothesis), and the transposed lift must carry the right dual span
// bijectively onto the left dual span.
inline CommuteReport check_gluing_commutes_dual(const PseudoBundle& b1, const PseudoBundle& b2,
                                                const GluingSpec& spec, MemberConfig cfg = {}) {
    CommuteReport rep;
    glue(b1, b2, spec, cfg);  // validates the gluing itself
    std::string detail;
    for (size_t i = 0; i < spec.points.size(); ++i) {
        DualBasis d1 = smooth_dual(fibre_space(b1, spec.points[i]));
        DualBasis d2 = smooth_dual(fibre_space(b2, spec.images[i]));
        if (d1.dim() != d2.dim()) {
            rep.status = CommuteReport::HypothesisFailed;
            rep.witness = point_to_string(spec.points[i]);
            rep.detail = "dual fibre dimensions differ: " + std::to_string(d1.dim()) + " vs " +
                         std::to_string(d2.dim());
            return rep;
        }
        Mat lt = mat_transpose(spec.lifts[i]);
        Mat images;
        for (const Vec& w : d2.basis) {
            Vec pulled = mat_apply(lt, w);
            if (!in_span(d1.basis, pulled)) {
                rep.status = CommuteReport::WitnessMismatch;
                rep.witness = point_to_string(spec.points[i]);
                rep.detail = "pulled-back functional escapes the left dual span";
                return rep;
            }
            images.push_back(std::move(pulled));
        }
        if (mat_rank(images) != d1.dim()) {
            rep.status = CommuteReport::WitnessMismatch;
            rep.witness = point_to_string(spec.points[i]);
            rep.detail = "dual lift is not bijective between the dual spans";
            return rep;
        }
        detail += (detail.empty() ? "" : "; ") + std::string("at ") +
                  point_to_string(spec.points[i]) + ": dual dim " + std::to_string(d1.dim()) +
                  ", dual lift rows";
        for (const Vec& row : mat_transpose(spec.lifts[i])) {
            detail += " (";
            for (size_t j = 0; j < row.size(); ++j)
                detail += (j ? ", " : "") + rat_to_string(row[j]);
            detail += ")";
        }
    }
    rep.status = CommuteReport::Commutes;
    rep.detail = detail.empty() ? "empty gluing locus" : detail;
    return rep;
}

}  // namespace diffeolab
