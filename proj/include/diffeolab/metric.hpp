#pragma once
// Stratified fibrewise symmetric forms on vector pseudo-bundles: smoothness
// verdicts for candidate pseudo-metrics, fibrewise rank verification, search
// for a pseudo-metric, and compatibility checks across a gluing.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bundle.hpp"

namespace diffeolab {

// One symmetric fibre matrix with base-variable polynomial entries.
using SecMat = std::vector<std::vector<OrthantPoly>>;

// A candidate metric section carries one fibre matrix per sign stratum of the
// base coordinate arrangement: all 3^k sign vectors in {-1,0,1}^k, covering
// the open orthants and every lower-dimensional stratum down to the origin.
struct StratifiedSection {
    int base_dim = 0;
    int fibre_dim = 0;
    std::map<std::vector<int>, SecMat> pieces;
};

inline std::vector<std::vector<int>> arrangement_strata(int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> s(k, -1);
    for (;;) {
        out.push_back(s);
        int i = 0;
        while (i < k && s[i] == 1) s[i++] = -1;
        if (i == k) break;
        ++s[i];
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

inline SecMat zero_sec_mat(int k, int m) {
    return SecMat(static_cast<size_t>(m),
                  std::vector<OrthantPoly>(static_cast<size_t>(m), OrthantPoly::zero(k)));
}

inline std::string base_var_name(int i, int k) {
    static const char* names[] = {"x", "y", "z", "w"};
    if (k <= 4) return names[i];
    return "x" + std::to_string(i + 1);
}

// a, b, c, ... in row-major upper-triangle order of the fibre matrix
inline std::string coeff_name(size_t idx) {
    std::string s(1, static_cast<char>('a' + idx % 26));
    if (idx >= 26) s += std::to_string(idx / 26);
    return s;
}

inline std::string sign_stratum_label(const std::vector<int>& s, int k) {
    std::string out;
    for (int i = 0; i < k; ++i) {
        if (!out.empty()) out += ", ";
        out += base_var_name(i, k) + (s[i] < 0 ? "<0" : s[i] > 0 ? ">0" : "=0");
    }
    return out;
}

inline std::string profile_stratum_label(const ProfileStratum& st) {
    if (st.is_point) return "x=" + rat_to_string(st.point);
    if (!st.lo && !st.hi) return "everywhere";
    if (!st.lo) return "x<" + rat_to_string(*st.hi);
    if (!st.hi) return "x>" + rat_to_string(*st.lo);
    return rat_to_string(*st.lo) + "<x<" + rat_to_string(*st.hi);
}

// restriction to a sign stratum: zero the coordinates whose sign is 0
// (keeping the dimension) and sign-specialize the rest
inline OrthantPoly restrict_to_stratum(const OrthantPoly& f, const std::vector<int>& s) {
    const int k = f.dim;
    std::vector<std::vector<Rat>> lin(k, std::vector<Rat>(k, Rat(0)));
    std::vector<Rat> off(static_cast<size_t>(k), Rat(0));
    std::vector<std::pair<int, int>> sg;
    for (int i = 0; i < k; ++i) {
        if (s[i] != 0) {
            lin[i][i] = 1;
            sg.push_back({i, s[i]});
        }
    }
    return orthant_specialize_vars(affine_substitute(f, lin, off, k), sg);
}

inline std::string mono_string(const Mono& mo, int dim, int split) {
    OrthantPoly f{dim, {}};
    f.terms[mo] = 1;
    return to_string(f, split);
}

// fibre components of a generator renamed into a joint domain whose first k
// variables are the shared base and whose extras start at extra_off
inline std::vector<OrthantPoly> lift_fibre_comps(const PlotMap& p, int k, int joint,
                                                 int extra_off) {
    std::vector<int> perm(static_cast<size_t>(p.domain_dim));
    for (int i = 0; i < k; ++i) perm[static_cast<size_t>(i)] = i;
    for (int i = k; i < p.domain_dim; ++i) perm[static_cast<size_t>(i)] = extra_off + (i - k);
    std::vector<OrthantPoly> out;
    for (int w = k; w < p.codomain_dim; ++w)
        out.push_back(rename_vars(p.components[w], joint, perm));
    return out;
}

// fibre components with the base pinned to the origin; only the generator's
// extra parameters remain as variables
inline std::vector<OrthantPoly> origin_fibre_comps(const PlotMap& p, int k) {
    std::vector<int> bv(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) bv[static_cast<size_t>(i)] = i;
    Point z(static_cast<size_t>(k), Rat(0));
    std::vector<OrthantPoly> out;
    for (int w = k; w < p.codomain_dim; ++w)
        out.push_back(substitute_point(p.components[w], bv, z));
    return out;
}

inline bool mono_has_abs(const Mono& mo) {
    for (uint8_t e : mo.ae)
        if (e) return true;
    return false;
}

inline Mat mat_sub(const Mat& a, const Mat& b) {
    Mat c = a;
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < c[i].size(); ++j) c[i][j] -= b[i][j];
    return c;
}

inline bool mat_is_zero(const Mat& m) {
    for (const Vec& r : m)
        if (!vec_is_zero(r)) return false;
    return true;
}

inline void validate_section(const StratifiedSection& g, int k, int m) {
    if (g.base_dim != k || g.fibre_dim != m)
        throw Error(Err::StrataMismatch, "section shaped for a different bundle");
    std::vector<std::vector<int>> keys = arrangement_strata(k);
    if (g.pieces.size() != keys.size())
        throw Error(Err::StrataMismatch, "section must carry one piece per sign stratum");
    for (const auto& key : keys) {
        auto it = g.pieces.find(key);
        if (it == g.pieces.end())
            throw Error(Err::StrataMismatch, "section is missing the stratum " +
                                                 sign_stratum_label(key, k));
        const SecMat& sm = it->second;
        if (sm.size() != static_cast<size_t>(m))
            throw Error(Err::StrataMismatch, "fibre matrix has the wrong size");
        for (const auto& row : sm) {
            if (row.size() != static_cast<size_t>(m))
                throw Error(Err::StrataMismatch, "fibre matrix has the wrong size");
            for (const OrthantPoly& e : row)
                if (e.dim != k)
                    throw Error(Err::StrataMismatch,
                                "matrix entries must be polynomials in the base variables");
        }
        for (int v = 0; v < m; ++v)
            for (int w = v + 1; w < m; ++w)
                if (!(sm[static_cast<size_t>(v)][static_cast<size_t>(w)] ==
                      sm[static_cast<size_t>(w)][static_cast<size_t>(v)]))
                    throw Error(Err::StrataMismatch, "fibre matrix must be symmetric");
    }
}

}  // namespace detail

inline StratifiedSection make_section(int k, int m) {
    StratifiedSection s;
    s.base_dim = k;
    s.fibre_dim = m;
    for (const auto& key : arrangement_strata(k)) s.pieces[key] = detail::zero_sec_mat(k, m);
    return s;
}

inline StratifiedSection make_section(const PseudoBundle& b) {
    return make_section(b.base_dim, b.fibre_dim());
}

inline void set_piece(StratifiedSection& s, const std::vector<int>& signs, const SecMat& g) {
    auto it = s.pieces.find(signs);
    if (it == s.pieces.end())
        throw Error(Err::StrataMismatch, "no such sign stratum in this section");
    it->second = g;
}

inline StratifiedSection uniform_section(int k, int m, const SecMat& g) {
    StratifiedSection s = make_section(k, m);
    for (auto& [key, piece] : s.pieces) piece = g;
    detail::validate_section(s, k, m);
    return s;
}

inline StratifiedSection uniform_section(const PseudoBundle& b, const SecMat& g) {
    return uniform_section(b.base_dim, b.fibre_dim(), g);
}

// exact value of the section at a base point
inline Mat section_at(const StratifiedSection& g, const Point& x) {
    if (static_cast<int>(x.size()) != g.base_dim)
        throw Error(Err::PointDimMismatch, "section evaluated at a point of the wrong dimension");
    std::vector<int> key(x.size());
    for (size_t i = 0; i < x.size(); ++i) key[i] = rat_sign(x[i]);
    const SecMat& sm = g.pieces.at(key);
    const size_t m = static_cast<size_t>(g.fibre_dim);
    Mat out = mat_zero(m, m);
    for (size_t v = 0; v < m; ++v)
        for (size_t w = 0; w < m; ++w) out[v][w] = evaluate(sm[v][w], x);
    return out;
}

enum class MetricStatus { Valid, InvalidAtPoint, Unknown };

struct MetricVerdict {
    MetricStatus status = MetricStatus::Unknown;
    Point at;            // witness base point when status is InvalidAtPoint
    std::string reason;  // "rank deficit", "not PSD", "not smooth", or details
    std::string side;    // for glued sections: "left", "right", or "glued"
};

enum class FindStatus { Exists, NotExists, Unknown };

struct FindResult {
    FindStatus status = FindStatus::Unknown;
    std::optional<StratifiedSection> section;
    std::string reason;
};

struct CompatibleResult {
    bool compatible = true;
    Point at;        // first glued point where the two forms disagree
    Mat difference;  // g1 minus the pulled-back g2 at that point
};

// A pseudo-metric on a glued bundle: one stratified piece per side. Values at
// glued base points are owned by the right piece.
struct GluedSection {
    PseudoBundle bundle;
    StratifiedSection left, right;
};

namespace detail {

inline Rat probe_scale(int i) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (i < 12) return Rat(primes[i]);
    return Rat(41 + 2 * i);
}

// duals of the fibres on the strata adjacent to the base origin; used to
// decide whether an isolated deviation at the origin can be observed
inline std::vector<Mat> origin_adjacent_duals(const PseudoBundle& b) {
    std::vector<Mat> out;
    if (b.base_dim == 1) {
        DualProfile prof = dual_profile(b);
        for (size_t i = 0; i < prof.strata.size(); ++i) {
            const ProfileStratum& st = prof.strata[i];
            if (st.is_point && st.point == 0) {
                if (i > 0) out.push_back(prof.strata[i - 1].dual_basis);
                if (i + 1 < prof.strata.size()) out.push_back(prof.strata[i + 1].dual_basis);
            } else if (!st.is_point && (!st.lo || *st.lo < 0) && (!st.hi || *st.hi > 0)) {
                out.push_back(st.dual_basis);
            }
        }
    } else {
        for (const auto& key : arrangement_strata(b.base_dim)) {
            bool top = true;
            for (int s : key)
                if (s == 0) top = false;
            if (!top) continue;
            for (int probe = 0; probe < 2; ++probe) {
                Point w(key.size());
                for (size_t i = 0; i < key.size(); ++i)
                    w[i] = Rat(key[i]) * (probe ? probe_scale(static_cast<int>(i)) : Rat(1));
                out.push_back(smooth_dual(fibre_space(b, w)).basis);
            }
        }
    }
    return out;
}

struct SmoothPart {
    bool ok = true;
    SecMat e;  // the single smooth matrix all open orthants agree on
    Verdict failure;
};

// the open-orthant pieces must specialize to one ordinary polynomial matrix
inline SmoothPart common_smooth_part(const StratifiedSection& g, int k, int m) {
    SmoothPart sp;
    sp.e = zero_sec_mat(k, m);
    std::vector<std::vector<int>> tops;
    for (const auto& key : arrangement_strata(k)) {
        bool top = true;
        for (int s : key)
            if (s == 0) top = false;
        if (top) tops.push_back(key);
    }
    for (int v = 0; v < m; ++v) {
        for (int w = v; w < m; ++w) {
            OrthantPoly e0 =
                orthant_specialize(g.pieces.at(tops[0])[static_cast<size_t>(v)][static_cast<size_t>(w)], tops[0]);
            for (size_t t = 1; t < tops.size(); ++t) {
                OrthantPoly et = orthant_specialize(
                    g.pieces.at(tops[t])[static_cast<size_t>(v)][static_cast<size_t>(w)], tops[t]);
                if (!(et == e0)) {
                    sp.ok = false;
                    sp.failure = {Verdict::NotSmooth,
                                  "entry (" + std::to_string(v + 1) + "," + std::to_string(w + 1) +
                                      ") across " + sign_stratum_label(tops[0], k) + " and " +
                                      sign_stratum_label(tops[t], k),
                                  "open-orthant values do not assemble into one smooth function"};
                    return sp;
                }
            }
            sp.e[static_cast<size_t>(v)][static_cast<size_t>(w)] = e0;
            sp.e[static_cast<size_t>(w)][static_cast<size_t>(v)] = e0;
        }
    }
    return sp;
}

}  // namespace detail

// Decides whether a stratified symmetric form is a smooth section of the
// bundle of fibrewise bilinear forms. The test has three parts: the open
// orthants must agree on one smooth matrix E; evaluating E against every
// generator pair over a shared base (and against every constant fibre
// section) must stay free of absolute values; lower strata must restrict to
// E exactly, except that an isolated deviation at the origin is allowed when
// it cancels against every generator at the origin and no adjacent fibre
// dual can observe the deviated directions.
inline Verdict is_smooth_section(const StratifiedSection& g, const PseudoBundle& b,
                                 MemberConfig cfg = {}) {
    (void)cfg;
    if (b.kind != BundleKind::Generated)
        throw Error(Err::UnsupportedCombination,
                    "smooth-section test needs a generated bundle; glued bundles take a glued section");
    const int k = b.base_dim;
    const int m = b.fibre_dim();
    detail::validate_section(g, k, m);
    if (m == 0) return {Verdict::Smooth, "", "zero-dimensional fibres"};

    detail::SmoothPart sp = detail::common_smooth_part(g, k, m);
    if (!sp.ok) return sp.failure;

    // pair evaluations against the generators
    for (size_t pi = 0; pi < b.generators.size(); ++pi) {
        const PlotMap& p = b.generators[pi];
        const int ap = p.domain_dim - k;
        for (size_t qi = 0; qi < b.generators.size(); ++qi) {
            const PlotMap& q = b.generators[qi];
            const int bq = q.domain_dim - k;
            const int joint = k + ap + bq;
            std::vector<OrthantPoly> pc = detail::lift_fibre_comps(p, k, joint, k);
            std::vector<OrthantPoly> qc = detail::lift_fibre_comps(q, k, joint, k + ap);
            std::vector<int> bperm(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) bperm[static_cast<size_t>(i)] = i;
            OrthantPoly acc = OrthantPoly::zero(joint);
            for (int v = 0; v < m; ++v)
                for (int w = 0; w < m; ++w) {
                    const OrthantPoly& e = sp.e[static_cast<size_t>(v)][static_cast<size_t>(w)];
                    if (e.terms.empty()) continue;
                    acc = add(acc, mul(rename_vars(e, joint, bperm),
                                       mul(pc[static_cast<size_t>(v)], qc[static_cast<size_t>(w)])));
                }
            std::set<Mono> bad = nonsmooth_monomials(acc);
            if (!bad.empty())
                return {Verdict::NotSmooth,
                        "(generator " + std::to_string(pi + 1) + ", generator " +
                            std::to_string(qi + 1) + ")",
                        "pair evaluation contains " + detail::mono_string(*bad.begin(), joint, k)};
        }
        // constant fibre sections are always plots
        {
            const int joint = k + ap;
            std::vector<OrthantPoly> pc = detail::lift_fibre_comps(p, k, joint, k);
            std::vector<int> bperm(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) bperm[static_cast<size_t>(i)] = i;
            for (int w = 0; w < m; ++w) {
                OrthantPoly acc = OrthantPoly::zero(joint);
                for (int v = 0; v < m; ++v) {
                    const OrthantPoly& e = sp.e[static_cast<size_t>(v)][static_cast<size_t>(w)];
                    if (e.terms.empty()) continue;
                    acc = add(acc, mul(rename_vars(e, joint, bperm), pc[static_cast<size_t>(v)]));
                }
                std::set<Mono> bad = nonsmooth_monomials(acc);
                if (!bad.empty())
                    return {Verdict::NotSmooth,
                            "(generator " + std::to_string(pi + 1) + ", e" +
                                std::to_string(k + w + 1) + ")",
                            "pair evaluation contains " +
                                detail::mono_string(*bad.begin(), joint, k)};
            }
        }
    }

    // positive-dimensional lower strata must match E exactly
    for (const auto& [key, piece] : g.pieces) {
        int zeros = 0;
        for (int s : key)
            if (s == 0) ++zeros;
        if (zeros == 0 || zeros == k) continue;
        for (int v = 0; v < m; ++v)
            for (int w = v; w < m; ++w) {
                OrthantPoly lhs = detail::restrict_to_stratum(
                    piece[static_cast<size_t>(v)][static_cast<size_t>(w)], key);
                OrthantPoly rhs = detail::restrict_to_stratum(
                    sp.e[static_cast<size_t>(v)][static_cast<size_t>(w)], key);
                if (!(lhs == rhs))
                    return {Verdict::NotSmooth,
                            "entry (" + std::to_string(v + 1) + "," + std::to_string(w + 1) +
                                ") on stratum " + detail::sign_stratum_label(key, k),
                            "stratum value differs from the smooth part"};
            }
    }

    // origin deviations
    const std::vector<int> okey(static_cast<size_t>(k), 0);
    const Point zero(static_cast<size_t>(k), Rat(0));
    Mat dev = mat_zero(static_cast<size_t>(m), static_cast<size_t>(m));
    bool any_dev = false;
    for (int v = 0; v < m; ++v)
        for (int w = 0; w < m; ++w) {
            dev[static_cast<size_t>(v)][static_cast<size_t>(w)] =
                evaluate(g.pieces.at(okey)[static_cast<size_t>(v)][static_cast<size_t>(w)], zero) -
                evaluate(sp.e[static_cast<size_t>(v)][static_cast<size_t>(w)], zero);
            if (dev[static_cast<size_t>(v)][static_cast<size_t>(w)] != 0) any_dev = true;
        }
    if (!any_dev) return {Verdict::Smooth, "", ""};

    // the deviation must cancel against every generator at the origin
    for (size_t pi = 0; pi < b.generators.size(); ++pi) {
        const PlotMap& p = b.generators[pi];
        const int ap = p.domain_dim - k;
        std::vector<OrthantPoly> po = detail::origin_fibre_comps(p, k);
        for (size_t qi = 0; qi < b.generators.size(); ++qi) {
            const PlotMap& q = b.generators[qi];
            const int bq = q.domain_dim - k;
            const int joint = ap + bq;
            std::vector<OrthantPoly> qo = detail::origin_fibre_comps(q, k);
            std::vector<int> pperm(static_cast<size_t>(ap)), qperm(static_cast<size_t>(bq));
            for (int i = 0; i < ap; ++i) pperm[static_cast<size_t>(i)] = i;
            for (int i = 0; i < bq; ++i) qperm[static_cast<size_t>(i)] = ap + i;
            OrthantPoly acc = OrthantPoly::zero(joint);
            for (int v = 0; v < m; ++v)
                for (int w = 0; w < m; ++w) {
                    const Rat& d = dev[static_cast<size_t>(v)][static_cast<size_t>(w)];
                    if (d == 0) continue;
                    acc = add(acc, scale(mul(rename_vars(po[static_cast<size_t>(v)], joint, pperm),
                                             rename_vars(qo[static_cast<size_t>(w)], joint, qperm)),
                                         d));
                }
            if (!acc.terms.empty())
                return {Verdict::NotSmooth,
                        "(generator " + std::to_string(pi + 1) + ", generator " +
                            std::to_string(qi + 1) + ")",
                        "origin value changes the pair evaluation"};
        }
        for (int w = 0; w < m; ++w) {
            OrthantPoly acc = OrthantPoly::zero(ap);
            for (int v = 0; v < m; ++v) {
                const Rat& d = dev[static_cast<size_t>(v)][static_cast<size_t>(w)];
                if (d == 0) continue;
                acc = add(acc, scale(po[static_cast<size_t>(v)], d));
            }
            if (!acc.terms.empty())
                return {Verdict::NotSmooth,
                        "(generator " + std::to_string(pi + 1) + ", e" +
                            std::to_string(k + w + 1) + ")",
                        "origin value changes the pair evaluation"};
        }
    }

    // the deviated directions must be invisible to every adjacent fibre dual
    std::vector<Mat> duals = detail::origin_adjacent_duals(b);
    for (int v = 0; v < m; ++v)
        for (int w = v; w < m; ++w) {
            if (dev[static_cast<size_t>(v)][static_cast<size_t>(w)] == 0) continue;
            Vec ev(static_cast<size_t>(m), Rat(0)), ew(static_cast<size_t>(m), Rat(0));
            ev[static_cast<size_t>(v)] = 1;
            ew[static_cast<size_t>(w)] = 1;
            for (const Mat& d : duals)
                if (in_span(d, ev) || in_span(d, ew))
                    return {Verdict::NotSmooth,
                            "entry (" + std::to_string(v + 1) + "," + std::to_string(w + 1) +
                                ") at the origin",
                            "origin deviation is visible to an adjacent fibre dual"};
        }
    return {Verdict::Smooth, "", ""};
}

// Verifies that a smooth stratified section is fibrewise positive
// semi-definite with rank equal to the dimension of the fibre dual. One
// witness point per dual-profile stratum for one-dimensional bases; sign
// witnesses with a second scaled probe otherwise.
inline MetricVerdict is_pseudometric(const StratifiedSection& g, const PseudoBundle& b,
                                     MemberConfig cfg = {}) {
    if (b.kind != BundleKind::Generated)
        throw Error(Err::UnsupportedCombination,
                    "pseudo-metric test needs a generated bundle; glued bundles take a glued section");
    const int k = b.base_dim;
    const int m = b.fibre_dim();
    detail::validate_section(g, k, m);

    Verdict sv = is_smooth_section(g, b, cfg);
    if (sv.status == Verdict::NotSmooth)
        return {MetricStatus::InvalidAtPoint, Point(static_cast<size_t>(k), Rat(0)), "not smooth",
                ""};
    if (sv.status == Verdict::Unknown) return {MetricStatus::Unknown, {}, sv.reason, ""};

    struct Witness {
        Point at;
        size_t required;
    };
    std::vector<Witness> ws;
    if (k == 1) {
        DualProfile prof = dual_profile(b);
        for (const ProfileStratum& st : prof.strata) ws.push_back({st.witness, st.dual_dim});
    } else {
        for (const auto& key : arrangement_strata(k)) {
            Point w1(key.size()), w2(key.size());
            for (size_t i = 0; i < key.size(); ++i) {
                w1[i] = Rat(key[i]);
                w2[i] = Rat(key[i]) * detail::probe_scale(static_cast<int>(i));
            }
            DualBasis d1 = smooth_dual(fibre_space(b, w1));
            DualBasis d2 = smooth_dual(fibre_space(b, w2));
            if (!d1.complete || !d2.complete)
                return {MetricStatus::Unknown, w1, "fibre dual not exactly computed", ""};
            if (!(d1.basis == d2.basis))
                return {MetricStatus::Unknown, w1,
                        "fibre dual varies inside stratum " + detail::sign_stratum_label(key, k),
                        ""};
            ws.push_back({w1, d1.dim()});
        }
    }
    for (const Witness& w : ws) {
        PsdResult pr = psd_rank(section_at(g, w.at));
        if (!pr.psd) return {MetricStatus::InvalidAtPoint, w.at, "not PSD", ""};
        if (pr.rank != w.required) return {MetricStatus::InvalidAtPoint, w.at, "rank deficit", ""};
    }
    return {MetricStatus::Valid, {}, "", ""};
}

// Smoothness for a section of a glued bundle: both pieces must be smooth and
// they must agree through the fibre lifts at every glued point. Cross-piece
// plots are not enumerated, so disagreement yields Unknown, not NotSmooth.
inline Verdict is_smooth_section(const GluedSection& gs, MemberConfig cfg = {}) {
    const PseudoBundle& b = gs.bundle;
    if (b.kind != BundleKind::Glued)
        throw Error(Err::UnsupportedCombination, "glued section requires a glued bundle");
    Verdict v1 = is_smooth_section(gs.left, *b.left, cfg);
    if (v1.status == Verdict::NotSmooth)
        return {Verdict::NotSmooth, v1.witness, "left piece: " + v1.reason};
    Verdict v2 = is_smooth_section(gs.right, *b.right, cfg);
    if (v2.status == Verdict::NotSmooth)
        return {Verdict::NotSmooth, v2.witness, "right piece: " + v2.reason};
    if (v1.status == Verdict::Unknown) return v1;
    if (v2.status == Verdict::Unknown) return v2;
    for (size_t i = 0; i < b.spec.points.size(); ++i) {
        Mat m1 = section_at(gs.left, b.spec.points[i]);
        Mat m2 = section_at(gs.right, b.spec.images[i]);
        Mat pulled = mat_mul(mat_mul(mat_transpose(b.spec.lifts[i]), m2), b.spec.lifts[i]);
        if (!detail::mat_is_zero(detail::mat_sub(m1, pulled)))
            return {Verdict::Unknown, point_to_string(b.spec.points[i]),
                    "pieces disagree at a glued point; cross-piece plots are not enumerated"};
    }
    return {Verdict::Smooth, "", ""};
}

inline MetricVerdict is_pseudometric(const GluedSection& gs, MemberConfig cfg = {}) {
    const PseudoBundle& b = gs.bundle;
    if (b.kind != BundleKind::Glued)
        throw Error(Err::UnsupportedCombination, "glued section requires a glued bundle");
    MetricVerdict m1 = is_pseudometric(gs.left, *b.left, cfg);
    if (m1.status != MetricStatus::Valid) {
        m1.side = "left";
        return m1;
    }
    MetricVerdict m2 = is_pseudometric(gs.right, *b.right, cfg);
    if (m2.status != MetricStatus::Valid) {
        m2.side = "right";
        return m2;
    }
    for (size_t i = 0; i < b.spec.points.size(); ++i) {
        Mat v1 = section_at(gs.left, b.spec.points[i]);
        Mat v2 = section_at(gs.right, b.spec.images[i]);
        Mat pulled = mat_mul(mat_mul(mat_transpose(b.spec.lifts[i]), v2), b.spec.lifts[i]);
        if (!detail::mat_is_zero(detail::mat_sub(v1, pulled)))
            return {MetricStatus::Unknown, b.spec.points[i],
                    "pieces disagree at a glued point", "glued"};
        // the glued fibre is the right fibre at the image point
        DualBasis d = smooth_dual(fibre_space(b, BundlePoint{0, b.spec.points[i]}));
        PsdResult pr = psd_rank(v2);
        if (!pr.psd)
            return {MetricStatus::InvalidAtPoint, b.spec.points[i], "not PSD", "glued"};
        if (pr.rank != d.dim())
            return {MetricStatus::InvalidAtPoint, b.spec.points[i], "rank deficit", "glued"};
    }
    return {MetricStatus::Valid, {}, "", ""};
}

// Exact compatibility of two pseudo-metrics across a gluing: at every glued
// point the left form must equal the right form pulled back through the lift.
inline CompatibleResult check_compatible(const StratifiedSection& g1, const PseudoBundle& b1,
                                         const StratifiedSection& g2, const PseudoBundle& b2,
                                         const GluingSpec& spec, MemberConfig cfg = {}) {
    MetricVerdict m1 = is_pseudometric(g1, b1, cfg);
    if (m1.status != MetricStatus::Valid)
        throw Error(Err::NotAPseudometric,
                    "left candidate is not a verified pseudo-metric" +
                        (m1.reason.empty() ? std::string() : ": " + m1.reason));
    MetricVerdict m2 = is_pseudometric(g2, b2, cfg);
    if (m2.status != MetricStatus::Valid)
        throw Error(Err::NotAPseudometric,
                    "right candidate is not a verified pseudo-metric" +
                        (m2.reason.empty() ? std::string() : ": " + m2.reason));
    if (spec.points.size() != spec.images.size() || spec.points.size() != spec.lifts.size())
        throw Error(Err::DimensionMismatch, "gluing spec lists must have equal length");
    for (size_t i = 0; i < spec.points.size(); ++i) {
        Mat v1 = section_at(g1, spec.points[i]);
        Mat v2 = section_at(g2, spec.images[i]);
        Mat pulled = mat_mul(mat_mul(mat_transpose(spec.lifts[i]), v2), spec.lifts[i]);
        Mat diff = detail::mat_sub(v1, pulled);
        if (!detail::mat_is_zero(diff)) return {false, spec.points[i], diff};
    }
    return {true, {}, {}};
}

// Glues two verified, compatible pseudo-metrics into a section of the glued
// bundle and verifies the result.
inline GluedSection glue_metrics(const StratifiedSection& g1, const PseudoBundle& b1,
                                 const StratifiedSection& g2, const PseudoBundle& b2,
                                 const GluingSpec& spec, MemberConfig cfg = {}) {
    CompatibleResult cr = check_compatible(g1, b1, g2, b2, spec, cfg);
    if (!cr.compatible)
        throw Error(Err::Incompatible,
                    "pseudo-metrics disagree at glued point " + point_to_string(cr.at));
    GluedSection out{glue(b1, b2, spec, cfg), g1, g2};
    MetricVerdict mv = is_pseudometric(out, cfg);
    if (mv.status != MetricStatus::Valid)
        throw Error(Err::NotAPseudometric,
                    "glued section failed verification" +
                        (mv.status == MetricStatus::InvalidAtPoint
                             ? " at " + point_to_string(mv.at) + ": " + mv.reason
                             : mv.reason.empty() ? std::string() : ": " + mv.reason));
    return out;
}

namespace detail {

// index pairs of the upper triangle in row-major order
inline std::vector<std::pair<int, int>> sym_pairs(int m) {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < m; ++v)
        for (int w = v; w < m; ++w) out.push_back({v, w});
    return out;
}

}  // namespace detail

// Searches for a pseudo-metric on a generated bundle. First tries the sum of
// squares of the fibre dual basis on each sign stratum. If that candidate is
// not smooth, solves for all smooth parts E with polynomial entries of total
// degree at most cfg.degree: the pair evaluations are linear in the entries
// of E, so the admissible E form a kernel. Entries forced to vanish at a
// stratum witness cap the achievable rank there; a stratum whose fibre dual
// is larger than the cap proves that no stratified polynomial pseudo-metric
// exists. Otherwise a kernel-adjusted candidate gets a second verification
// attempt before giving up.
inline FindResult find_pseudometric(const PseudoBundle& b, MemberConfig cfg = {}) {
    if (b.kind != BundleKind::Generated)
        return {FindStatus::Unknown, std::nullopt,
                "search handles generated bundles only"};
    const int k = b.base_dim;
    const int m = b.fibre_dim();
    if (m == 0)
        return {FindStatus::Exists, make_section(k, 0), "zero-dimensional fibres"};
    try {
        struct Req {
            std::vector<int> key;  // sign stratum containing the witness
            Point witness;
            size_t required;
            std::string label;
            bool at_origin;
        };
        std::vector<Req> reqs;
        if (k == 1) {
            DualProfile prof = dual_profile(b);
            for (const ProfileStratum& st : prof.strata) {
                Req r;
                r.witness = st.witness;
                r.required = st.dual_dim;
                r.label = detail::profile_stratum_label(st);
                r.key = {rat_sign(st.witness[0])};
                r.at_origin = st.witness[0] == 0;
                reqs.push_back(r);
            }
        } else {
            for (const auto& key : arrangement_strata(k)) {
                Point w1(key.size()), w2(key.size());
                bool origin = true;
                for (size_t i = 0; i < key.size(); ++i) {
                    w1[i] = Rat(key[i]);
                    w2[i] = Rat(key[i]) * detail::probe_scale(static_cast<int>(i));
                    if (key[i] != 0) origin = false;
                }
                DualBasis d1 = smooth_dual(fibre_space(b, w1));
                DualBasis d2 = smooth_dual(fibre_space(b, w2));
                if (!d1.complete || !d2.complete)
                    return {FindStatus::Unknown, std::nullopt, "fibre dual not exactly computed"};
                if (!(d1.basis == d2.basis))
                    return {FindStatus::Unknown, std::nullopt,
                            "fibre dual varies inside stratum " +
                                detail::sign_stratum_label(key, k)};
                reqs.push_back({key, w1, d1.dim(), detail::sign_stratum_label(key, k), origin});
            }
        }

        // candidate A: per-stratum sum of squares of the fibre dual basis
        StratifiedSection candA = make_section(k, m);
        for (const auto& key : arrangement_strata(k)) {
            Point w(key.size());
            for (size_t i = 0; i < key.size(); ++i) w[i] = Rat(key[i]);
            DualBasis d = smooth_dual(fibre_space(b, w));
            SecMat gm = detail::zero_sec_mat(k, m);
            for (const Vec& row : d.basis)
                for (int v = 0; v < m; ++v)
                    for (int u = 0; u < m; ++u)
                        gm[static_cast<size_t>(v)][static_cast<size_t>(u)] = add(
                            gm[static_cast<size_t>(v)][static_cast<size_t>(u)],
                            OrthantPoly::constant(k, row[static_cast<size_t>(v)] *
                                                         row[static_cast<size_t>(u)]));
            candA.pieces[key] = gm;
        }
        auto attempt = [&](const StratifiedSection& cand) {
            Verdict sv = is_smooth_section(cand, b, cfg);
            if (sv.status != Verdict::Smooth) return false;
            return is_pseudometric(cand, b, cfg).status == MetricStatus::Valid;
        };
        if (attempt(candA))
            return {FindStatus::Exists, candA, "per-stratum dual square sum"};

        // linear system for the admissible smooth parts E
        const std::vector<std::pair<int, int>> pairs = detail::sym_pairs(m);
        const size_t T = pairs.size();
        std::vector<Mono> mons = detail::smooth_monomials_up_to(k, cfg.degree);
        const size_t M = mons.size();
        const size_t U = T * M;
        Mat sys;
        auto push_rows = [&](const std::vector<std::vector<OrthantPoly>>& bases, int joint) {
            // bases[t] lists the products multiplying unknown entry t
            std::map<Mono, Vec> rows;
            std::vector<int> bperm(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) bperm[static_cast<size_t>(i)] = i;
            for (size_t t = 0; t < T; ++t) {
                for (const OrthantPoly& base : bases[t]) {
                    if (base.terms.empty()) continue;
                    for (size_t mi = 0; mi < M; ++mi) {
                        OrthantPoly mono{k, {}};
                        mono.terms[mons[mi]] = 1;
                        OrthantPoly c = mul(rename_vars(mono, joint, bperm), base);
                        for (const auto& [mo, cf] : c.terms) {
                            if (!detail::mono_has_abs(mo)) continue;
                            Vec& row = rows[mo];
                            if (row.empty()) row.assign(U, Rat(0));
                            row[t * M + mi] += cf;
                        }
                    }
                }
            }
            for (auto& [mo, row] : rows) sys.push_back(std::move(row));
        };
        for (size_t pi = 0; pi < b.generators.size(); ++pi) {
            const PlotMap& p = b.generators[pi];
            const int ap = p.domain_dim - k;
            for (size_t qi = pi; qi < b.generators.size(); ++qi) {
                const PlotMap& q = b.generators[qi];
                const int bq = q.domain_dim - k;
                const int joint = k + ap + bq;
                std::vector<OrthantPoly> pc = detail::lift_fibre_comps(p, k, joint, k);
                std::vector<OrthantPoly> qc = detail::lift_fibre_comps(q, k, joint, k + ap);
                std::vector<std::vector<OrthantPoly>> bases(T);
                for (size_t t = 0; t < T; ++t) {
                    auto [v, w] = pairs[t];
                    OrthantPoly base =
                        mul(pc[static_cast<size_t>(v)], qc[static_cast<size_t>(w)]);
                    if (v != w)
                        base = add(base,
                                   mul(pc[static_cast<size_t>(w)], qc[static_cast<size_t>(v)]));
                    bases[t].push_back(base);
                }
                push_rows(bases, joint);
            }
            {
                const int joint = k + ap;
                std::vector<OrthantPoly> pc = detail::lift_fibre_comps(p, k, joint, k);
                std::vector<std::vector<OrthantPoly>> bases(T);
                for (int w = 0; w < m; ++w)
                    for (int v = 0; v < m; ++v) {
                        size_t t = detail::sym_index(v, w, m);
                        bases[t].push_back(pc[static_cast<size_t>(v)]);
                    }
                push_rows(bases, joint);
            }
        }
        Mat kern = kernel_basis(std::move(sys), U);
        std::vector<std::vector<OrthantPoly>> kpolys;  // per kernel vector, per entry
        for (const Vec& kv : kern) {
            std::vector<OrthantPoly> es;
            for (size_t t = 0; t < T; ++t) {
                OrthantPoly e{k, {}};
                for (size_t mi = 0; mi < M; ++mi)
                    if (kv[t * M + mi] != 0) e.terms[mons[mi]] = kv[t * M + mi];
                es.push_back(std::move(e));
            }
            kpolys.push_back(std::move(es));
        }

        // origin deviations are possible in directions no adjacent dual sees
        std::vector<Mat> adj = detail::origin_adjacent_duals(b);
        auto invisible = [&](int v) {
            Vec ev(static_cast<size_t>(m), Rat(0));
            ev[static_cast<size_t>(v)] = 1;
            for (const Mat& d : adj)
                if (in_span(d, ev)) return false;
            return true;
        };

        struct Deficit {
            size_t req_index;
            std::vector<bool> dead;
            size_t required, ceiling;
        };
        std::vector<Deficit> deficits;
        std::vector<std::vector<bool>> alive_at(reqs.size());
        for (size_t ri = 0; ri < reqs.size(); ++ri) {
            const Req& r = reqs[ri];
            std::vector<bool> alive(T, false);
            for (const auto& es : kpolys)
                for (size_t t = 0; t < T; ++t)
                    if (!alive[t] && evaluate(es[t], r.witness) != 0) alive[t] = true;
            if (r.at_origin)
                for (size_t t = 0; t < T; ++t) {
                    auto [v, w] = pairs[t];
                    if (!alive[t] && invisible(v) && invisible(w)) alive[t] = true;
                }
            alive_at[ri] = alive;
            size_t dead_rows = 0;
            for (int row = 0; row < m; ++row) {
                bool row_alive = false;
                for (int col = 0; col < m; ++col)
                    if (alive[detail::sym_index(row, col, m)]) row_alive = true;
                if (!row_alive) ++dead_rows;
            }
            size_t ceiling = static_cast<size_t>(m) - dead_rows;
            if (r.required > ceiling) {
                std::vector<bool> dead(T);
                for (size_t t = 0; t < T; ++t) dead[t] = !alive[t];
                deficits.push_back({ri, dead, r.required, ceiling});
            }
        }
        if (!deficits.empty()) {
            const Deficit& d0 = deficits[0];
            std::vector<size_t> group;
            for (const Deficit& d : deficits)
                if (d.dead == d0.dead && d.required == d0.required && d.ceiling == d0.ceiling)
                    group.push_back(d.req_index);
            std::string label;
            if (k == 1) {
                label = reqs[group[0]].label;
            } else {
                std::string out;
                for (int i = 0; i < k; ++i) {
                    bool same = true;
                    for (size_t gi : group)
                        if (reqs[gi].key[static_cast<size_t>(i)] !=
                            reqs[group[0]].key[static_cast<size_t>(i)])
                            same = false;
                    if (!same) continue;
                    int s = reqs[group[0]].key[static_cast<size_t>(i)];
                    if (!out.empty()) out += ", ";
                    out += detail::base_var_name(i, k) + (s < 0 ? "<0" : s > 0 ? ">0" : "=0");
                }
                label = out.empty() ? "everywhere" : out;
            }
            std::string names;
            for (size_t t = 0; t < T; ++t)
                if (d0.dead[t]) {
                    if (!names.empty()) names += ",";
                    names += detail::coeff_name(t);
                }
            return {FindStatus::NotExists, std::nullopt,
                    "coefficients " + names + " forced to 0; rank " +
                        std::to_string(d0.ceiling) + " < required " +
                        std::to_string(d0.required) + " on stratum " + label};
        }

        // candidate B: candidate A with entries dead on each stratum removed
        StratifiedSection candB = candA;
        for (auto& [key, piece] : candB.pieces) {
            Point w(key.size());
            for (size_t i = 0; i < key.size(); ++i) w[i] = Rat(key[i]);
            bool origin = true;
            for (int s : key)
                if (s != 0) origin = false;
            for (size_t t = 0; t < T; ++t) {
                bool alive = false;
                for (const auto& es : kpolys)
                    if (evaluate(es[t], w) != 0) alive = true;
                auto [v, wq] = pairs[t];
                if (origin && !alive && invisible(v) && invisible(wq)) alive = true;
                if (!alive) {
                    piece[static_cast<size_t>(v)][static_cast<size_t>(wq)] = OrthantPoly::zero(k);
                    piece[static_cast<size_t>(wq)][static_cast<size_t>(v)] = OrthantPoly::zero(k);
                }
            }
        }
        if (!(candB.pieces == candA.pieces) && attempt(candB))
            return {FindStatus::Exists, candB,
                    "per-stratum dual square sum with forced entries removed"};
        return {FindStatus::Unknown, std::nullopt,
                "no rank obstruction found and no candidate verified at degree " +
                    std::to_string(cfg.degree)};
    } catch (const Error& e) {
        return {FindStatus::Unknown, std::nullopt, std::string("search aborted: ") + e.what()};
    }
}

}  // namespace diffeolab
