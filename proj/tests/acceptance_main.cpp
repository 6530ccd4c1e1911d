// Acceptance gate: twelve calibration checks, each printed as one
// [PASS]/[FAIL] line.  Exits nonzero when any check fails.

#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "diffeolab/bundle.hpp"
#include "diffeolab/dsl.hpp"
#include "diffeolab/dvs.hpp"
#include "diffeolab/interp.hpp"
#include "diffeolab/metric.hpp"
#include "diffeolab/pwpoly.hpp"
#include "oracle.hpp"

using namespace diffeolab;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& desc) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << desc << "\n";
    if (!ok) ++failures;
}

// --- local random corpus (mirrors the test suites' distribution) ------------

Rat random_rat(std::mt19937_64& rng, int num_range = 8, int max_den = 4) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, max_den);
    return Rat(num(rng)) / den(rng);
}

Rat random_nonzero_rat(std::mt19937_64& rng) {
    for (;;) {
        Rat r = random_rat(rng);
        if (r != 0) return r;
    }
}

// abs-carrying monomials keep per-variable exponents small so the numeric
// oracle's order window covers every kink
OrthantPoly random_poly(std::mt19937_64& rng, int dim, int max_terms = 5) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> xe_deep(0, 3);
    std::uniform_int_distribution<int> xe_shallow(0, 2);
    std::uniform_int_distribution<int> ae(0, 1);
    OrthantPoly f = OrthantPoly::zero(dim);
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        Mono m{std::vector<uint32_t>(dim, 0), std::vector<uint8_t>(dim, 0)};
        bool has_abs = false;
        for (int i = 0; i < dim; ++i) {
            m.ae[i] = static_cast<uint8_t>(ae(rng));
            if (m.ae[i]) has_abs = true;
        }
        for (int i = 0; i < dim; ++i)
            m.xe[i] = static_cast<uint32_t>(has_abs ? xe_shallow(rng) : xe_deep(rng));
        OrthantPoly term{dim, {}};
        term.terms[m] = random_nonzero_rat(rng);
        f = add(f, term);
    }
    return f;
}

Point random_point(std::mt19937_64& rng, int dim, bool nonzero = false) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = nonzero ? random_nonzero_rat(rng) : random_rat(rng);
    return p;
}

// --- shared fixtures ---------------------------------------------------------

// R^n generated by |x| e_n
DVSpace abs_last_space(int n) {
    std::vector<OrthantPoly> comps(static_cast<size_t>(n), OrthantPoly::zero(1));
    comps[static_cast<size_t>(n - 1)] = OrthantPoly::absvar(1, 0);
    return DVSpace::generated(n, {PlotMap(1, std::move(comps))});
}

PlotMap angled_plot() {
    OrthantPoly x = OrthantPoly::var(1, 0), a = OrthantPoly::absvar(1, 0);
    return PlotMap(1, {scale(add(x, a), Rat(1, 2)), scale(sub(a, x), Rat(1, 2))});
}

DVSpace angled_space() { return DVSpace::generated(2, {angled_plot()}); }

PseudoBundle kinked_line_bundle() {  // (x, |x||y|)
    OrthantPoly g = mul(OrthantPoly::absvar(2, 0), OrthantPoly::absvar(2, 1));
    return make_generated_bundle(2, 1, {PlotMap(2, {OrthantPoly::var(2, 0), g})});
}

PseudoBundle flat_abs_plane() {  // (x, 0, |y|)
    return make_generated_bundle(
        3, 1,
        {PlotMap(2, {OrthantPoly::var(2, 0), OrthantPoly::zero(2), OrthantPoly::absvar(2, 1)})});
}

PseudoBundle standard_bundle(int n, int k) {
    std::vector<OrthantPoly> comps;
    for (int i = 0; i < n; ++i) comps.push_back(OrthantPoly::var(n, i));
    return make_generated_bundle(n, k, {PlotMap(n, std::move(comps))});
}

PseudoBundle half_kinked_plane() {  // (x, y, |z|)
    return make_generated_bundle(
        3, 1,
        {PlotMap(3, {OrthantPoly::var(3, 0), OrthantPoly::var(3, 1), OrthantPoly::absvar(3, 2)})});
}

Mat expected_identity_rows(int n, int rows) {
    Mat m;
    for (int i = 0; i < rows; ++i) {
        Vec r(static_cast<size_t>(n), Rat(0));
        r[static_cast<size_t>(i)] = 1;
        m.push_back(std::move(r));
    }
    return m;
}

// --- criteria ----------------------------------------------------------------

void criterion_1() {
    bool ok = true;
    for (int n = 1; n <= 5; ++n) {
        DualBasis d = smooth_dual(abs_last_space(n));
        ok = ok && d.complete && d.dim() == static_cast<size_t>(n - 1) &&
             d.basis == expected_identity_rows(n, n - 1);
    }
    report(1, ok,
           "duals of the |x| e_n spaces (n=1..5) are spanned by the first n-1 coordinates");
}

void criterion_2() {
    DVSpace v = angled_space();
    DualBasis d = smooth_dual(v);
    bool ok = d.dim() == 1 && d.basis == Mat{{Rat(1), Rat(-1)}};
    std::vector<SymForm> fs = smooth_symmetric_forms(v);
    ok = ok && fs.size() == 1 &&
         fs[0].m == Mat{{Rat(1), Rat(-1)}, {Rat(-1), Rat(1)}};
    // e1 + e2 is in the kernel of every form in the span
    std::mt19937_64 rng(2026500);
    for (int i = 0; ok && i < 10; ++i) {
        Rat c = random_rat(rng);
        Vec image = mat_apply(fs[0].m, Vec{c, c});
        ok = ok && vec_is_zero(image);
    }
    report(2, ok, "angled space dual is e1-e2, forms are its square, e1+e2 in every kernel");
}

void criterion_3() {
    std::mt19937_64 rng(2026501);
    bool ok = true;
    int checked = 0;
    for (int n = 1; n <= 5; ++n) {
        std::vector<SymForm> fs = smooth_symmetric_forms(abs_last_space(n));
        Vec en(static_cast<size_t>(n), Rat(0));
        en[static_cast<size_t>(n - 1)] = 1;
        for (int iter = 0; iter < 25; ++iter) {
            Mat combo = mat_zero(static_cast<size_t>(n), static_cast<size_t>(n));
            for (const SymForm& f : fs) {
                Rat c = random_rat(rng);
                for (size_t r = 0; r < combo.size(); ++r)
                    for (size_t s = 0; s < combo.size(); ++s) combo[r][s] += c * f.m[r][s];
            }
            ok = ok && vec_is_zero(mat_apply(combo, en));
            ++checked;
        }
    }
    report(3, ok && checked >= 100,
           "every smooth symmetric form on the |x| e_n spaces annihilates e_n (" +
               std::to_string(checked) + " random spans)");
}

void criterion_4() {
    PseudoBundle b = kinked_line_bundle();
    DVSpace f0 = fibre_space(b, Point{Rat(0)});
    bool ok = f0.kind == SpaceKind::Standard && smooth_dual(f0).dim() == 1;
    for (const Rat& x : {Rat(1), Rat(-2), Rat(1, 2)}) {
        DVSpace fx = fibre_space(b, Point{x});
        ok = ok && fx.kind == SpaceKind::Generated && smooth_dual(fx).dim() == 0;
    }
    DualProfile prof = dual_profile(b);
    ok = ok && prof.strata.size() == 3 && prof.strata[0].label == "(-inf, 0)" &&
         prof.strata[0].dual_dim == 0 && prof.strata[1].label == "{0}" &&
         prof.strata[1].dual_dim == 1 && prof.strata[2].label == "(0, inf)" &&
         prof.strata[2].dual_dim == 0;
    report(4, ok, "(x, |x||y|) fibres: standard with dual 1 at 0, dual 0 elsewhere, profile 0/1/0");
}

void criterion_5() {
    PseudoBundle fp = flat_abs_plane();
    OrthantPoly x2p1 = add(mul(OrthantPoly::var(1, 0), OrthantPoly::var(1, 0)),
                           OrthantPoly::constant(1, Rat(1)));
    SecMat g{{x2p1, OrthantPoly::zero(1)}, {OrthantPoly::zero(1), OrthantPoly::zero(1)}};
    bool ok = is_pseudometric(uniform_section(fp, g), fp).status == MetricStatus::Valid;

    PseudoBundle b = kinked_line_bundle();
    StratifiedSection delta = uniform_section(b, SecMat{{OrthantPoly::zero(1)}});
    set_piece(delta, {0}, SecMat{{OrthantPoly::constant(1, Rat(1))}});
    ok = ok && is_pseudometric(delta, b).status == MetricStatus::Valid;
    report(5, ok, "(x^2+1) on the flat direction and the delta section are pseudo-metrics");
}

void criterion_6() {
    PseudoBundle nm = make_generated_bundle(
        4, 2,
        {PlotMap(3, {OrthantPoly::var(3, 0), OrthantPoly::var(3, 1), OrthantPoly::zero(3),
                     mul(OrthantPoly::var(3, 1), OrthantPoly::absvar(3, 2))})});
    FindResult fr = find_pseudometric(nm);
    bool ok = fr.status == FindStatus::NotExists &&
              fr.reason == "coefficients b,c forced to 0; rank 1 < required 2 on stratum y=0";
    report(6, ok, "(x, y, 0, y|z|) has no pseudo-metric: b,c forced to zero, rank deficit on y=0");
}

bool glued_metric_case(const PseudoBundle& b1, const PseudoBundle& b2, const GluingSpec& spec,
                       const StratifiedSection& g1, const StratifiedSection& g2) {
    if (is_pseudometric(g1, b1).status != MetricStatus::Valid) return false;
    if (is_pseudometric(g2, b2).status != MetricStatus::Valid) return false;
    CompatibleResult cr = check_compatible(g1, b1, g2, b2, spec);
    if (!cr.compatible) return false;
    GluedSection gs = glue_metrics(g1, b1, g2, b2, spec);
    if (is_pseudometric(gs).status != MetricStatus::Valid) return false;
    // explicit witnesses on both branches
    for (const Rat& x : {Rat(-1), Rat(0), Rat(1)}) {
        Mat v1 = section_at(gs.left, {x});
        Mat v2 = section_at(gs.right, {x});
        PsdResult p1 = psd_rank(v1), p2 = psd_rank(v2);
        if (!p1.psd || !p2.psd) return false;
        bool glued_pt = false;
        for (const Point& p : spec.points) glued_pt = glued_pt || p == Point{x};
        if (glued_pt) {
            // left value must agree with the pulled-back right value
            Mat pulled = mat_mul(mat_transpose(spec.lifts[0]), mat_mul(v2, spec.lifts[0]));
            if (v1 != pulled) return false;
            if (p2.rank < smooth_dual(fibre_space(b2, {x})).dim()) return false;
        } else {
            if (p1.rank < smooth_dual(fibre_space(b1, {x})).dim()) return false;
            if (p2.rank < smooth_dual(fibre_space(b2, {x})).dim()) return false;
        }
    }
    return true;
}

void criterion_7() {
    // standard plane pair glued by the identity lift, identity metrics
    PseudoBundle sp1 = standard_bundle(3, 1), sp2 = standard_bundle(3, 1);
    GluingSpec span_spec{{Point{Rat(0)}}, {Point{Rat(0)}}, {mat_identity(2)}};
    SecMat id2{{OrthantPoly::constant(1, Rat(1)), OrthantPoly::zero(1)},
               {OrthantPoly::zero(1), OrthantPoly::constant(1, Rat(1))}};
    bool ok = glued_metric_case(sp1, sp2, span_spec, uniform_section(sp1, id2),
                                uniform_section(sp2, id2));

    // kinked plane onto the trivial line bundle
    PseudoBundle hk = half_kinked_plane(), sl = standard_bundle(2, 1);
    GluingSpec kink_spec{{Point{Rat(0)}}, {Point{Rat(0)}}, {Mat{{Rat(1), Rat(0)}}}};
    SecMat diag10{{OrthantPoly::constant(1, Rat(1)), OrthantPoly::zero(1)},
                  {OrthantPoly::zero(1), OrthantPoly::zero(1)}};
    SecMat one{{OrthantPoly::constant(1, Rat(1))}};
    ok = ok && glued_metric_case(hk, sl, kink_spec, uniform_section(hk, diag10),
                                 uniform_section(sl, one));
    report(7, ok, "both gluing examples validate and the glued metrics pass at -1, 0, +1");
}

void criterion_8() {
    PseudoBundle b = standard_bundle(3, 1);
    GluingSpec spec{{Point{Rat(0)}}, {Point{Rat(0)}}, {mat_identity(2)}};
    SubGluingResult r = check_subbundle_gluing(b, b, spec, {0}, {1});
    bool ok = !r.ok && r.witness == Vec{Rat(1), Rat(0)};
    report(8, ok, "identity lift does not carry the y-axis sub-bundle into the z-axis one");
}

void criterion_9() {
    PseudoBundle hk = half_kinked_plane(), sl = standard_bundle(2, 1);
    GluingSpec spec{{Point{Rat(0)}}, {Point{Rat(0)}}, {Mat{{Rat(1), Rat(0)}}}};
    CommuteReport good = check_gluing_commutes_dual(hk, sl, spec);
    bool ok = good.status == CommuteReport::Commutes &&
              good.detail.find("dual lift rows") != std::string::npos;

    PseudoBundle sp = standard_bundle(3, 1);
    CommuteReport bad = check_gluing_commutes_dual(sp, sl, spec);
    ok = ok && bad.status == CommuteReport::HypothesisFailed && bad.witness == "(0)" &&
         bad.detail == "dual fibre dimensions differ: 2 vs 1";
    report(9, ok, "dual gluing hypothesis holds for the kinked pair, fails for dual dims 2 vs 1");
}

void criterion_10() {
    PseudoBundle dk = make_generated_bundle(
        4, 1,
        {PlotMap(2, {OrthantPoly::var(2, 0), OrthantPoly::zero(2),
                     mul(OrthantPoly::var(2, 0), OrthantPoly::absvar(2, 1)),
                     mul(OrthantPoly::var(2, 0), OrthantPoly::absvar(2, 1))})});
    size_t whole = smooth_dual(fibre_space(dk, Point{Rat(1)})).dim();
    PseudoBundle split = bundle_direct_sum(standard_bundle(2, 1), standard_bundle(3, 1));
    size_t summed = smooth_dual(fibre_space(split, Point{Rat(1)})).dim();
    bool ok = whole == 2 && summed == 3 && whole != summed;
    report(10, ok, "(x, 0, x|y|, x|y|) fibre dual dim 2 vs 3 for the split-standard sum");
}

void criterion_11() {
    DVSpace ang = angled_space();
    DVSpace ax_x = DVSpace::generated(2, {PlotMap(1, {OrthantPoly::var(1, 0), OrthantPoly::zero(1)})});
    DVSpace ax_y = DVSpace::generated(2, {PlotMap(1, {OrthantPoly::zero(1), OrthantPoly::var(1, 0)})});
    PlotMap ang_gen = angled_plot();
    Verdict vx = is_plot_member(ang_gen, ax_x);
    Verdict vy = is_plot_member(ang_gen, ax_y);
    Verdict ix = is_plot_member(PlotMap(1, {OrthantPoly::var(1, 0), OrthantPoly::zero(1)}), ang);
    Verdict iy = is_plot_member(PlotMap(1, {OrthantPoly::zero(1), OrthantPoly::var(1, 0)}), ang);
    bool ok = vx.status == Verdict::NotSmooth && vy.status == Verdict::NotSmooth &&
              ix.status == Verdict::Smooth && iy.status == Verdict::Smooth;
    report(11, ok, "angled generator rejected by both axes, axis inclusions accepted, no unknowns");
}

// five randomized suites, 100 cases each
bool suite_ring_laws() {
    std::mt19937_64 rng(2026502);
    for (int i = 0; i < 100; ++i) {
        int dim = 1 + static_cast<int>(rng() % 3);
        OrthantPoly a = random_poly(rng, dim), b = random_poly(rng, dim),
                    c = random_poly(rng, dim);
        Rat r = random_rat(rng);
        if (!(add(add(a, b), c) == add(a, add(b, c)))) return false;
        if (!(mul(mul(a, b), c) == mul(a, mul(b, c)))) return false;
        if (!(add(a, b) == add(b, a))) return false;
        if (!(mul(a, b) == mul(b, a))) return false;
        if (!(mul(a, add(b, c)) == add(mul(a, b), mul(a, c)))) return false;
        if (!(scale(a, r) == mul(a, OrthantPoly::constant(dim, r)))) return false;
        if (!(sub(a, a) == OrthantPoly::zero(dim))) return false;
        if (!(mul(a, OrthantPoly::constant(dim, Rat(1))) == a)) return false;
    }
    return true;
}

bool suite_oracle_agreement() {
    std::mt19937_64 rng(2026503);
    int checked = 0;
    for (int i = 0; i < 220; ++i) {
        int dim = 1 + static_cast<int>(rng() % 2);
        OrthantPoly f = random_poly(rng, dim, 4);
        bool engine = is_ordinarily_smooth(f);
        bool oracle_smooth = true;
        for (int probe = 0; probe < 2 && oracle_smooth; ++probe)
            oracle_smooth = oracle::looks_smooth(f, random_point(rng, dim, true), 3);
        if (engine) {
            if (!oracle_smooth) return false;
            ++checked;
        } else if (!oracle_smooth) {
            ++checked;  // both sides agree there is a kink
        }
    }
    return checked >= 100;
}

bool suite_dual_monotone() {
    std::mt19937_64 rng(2026504);
    for (int i = 0; i < 100; ++i) {
        int n = 2 + static_cast<int>(rng() % 2);
        auto plot = [&] {
            std::vector<OrthantPoly> comps;
            for (int w = 0; w < n; ++w) comps.push_back(random_poly(rng, 2, 3));
            return PlotMap(2, std::move(comps));
        };
        std::vector<PlotMap> gens{plot()};
        DVSpace small = DVSpace::generated(n, gens);
        gens.push_back(plot());
        DVSpace large = DVSpace::generated(n, gens);
        DualBasis ds = smooth_dual(small), dl = smooth_dual(large);
        if (dl.dim() > ds.dim()) return false;
        for (const Vec& row : dl.basis)
            if (!in_span(ds.basis, row)) return false;
    }
    return true;
}

bool suite_rank_ceiling() {
    std::mt19937_64 rng(2026505);
    int existing = 0, verified = 0;
    for (int i = 0; i < 100; ++i) {
        const int dom = 2;
        std::vector<PlotMap> gens;
        const int ngens = 1 + static_cast<int>(rng() % 2);
        for (int g = 0; g < ngens; ++g) {
            std::vector<OrthantPoly> comps{OrthantPoly::var(dom, 0)};
            for (int w = 0; w < 2; ++w) {
                OrthantPoly base = OrthantPoly::constant(dom, random_rat(rng));
                const int nroots = static_cast<int>(rng() % 2);
                for (int r = 0; r < nroots; ++r)
                    base = mul(base, sub(OrthantPoly::var(dom, 0),
                                         OrthantPoly::constant(
                                             dom, Rat(static_cast<int>(rng() % 3) - 1))));
                OrthantPoly tail = OrthantPoly::var(dom, 1);
                if (rng() % 2 == 0) tail = OrthantPoly::absvar(dom, 1);
                comps.push_back(mul(base, tail));
            }
            gens.emplace_back(dom, std::move(comps));
        }
        PseudoBundle b = make_generated_bundle(3, 1, gens);
        FindResult fr = find_pseudometric(b);
        if (fr.status != FindStatus::Exists) continue;
        ++existing;
        if (is_pseudometric(*fr.section, b).status != MetricStatus::Valid) return false;
        for (const Rat& x : {Rat(-2), Rat(-1), Rat(0), Rat(1, 2), Rat(1), Rat(3)}) {
            PsdResult pr = psd_rank(section_at(*fr.section, {x}));
            if (!pr.psd) return false;
            if (pr.rank > dual_profile_at(b, {x}).dim()) return false;
            ++verified;
        }
    }
    return existing >= 30 && verified >= 180;
}

bool suite_report_determinism() {
    std::mt19937_64 rng(2026506);
    for (int i = 0; i < 100; ++i) {
        auto render = [&](int dim) { return to_string(random_poly(rng, dim), dim); };
        int n = 2 + static_cast<int>(rng() % 2);
        std::string src = "space V = generated(" + std::to_string(n) + "; (";
        for (int w = 0; w < n; ++w) {
            if (w) src += ", ";
            src += render(2);
        }
        src += "))\nbundle B = generated(2, 1; (x1, " + render(1) + "*abs(y1)))\n";
        src += "dual V\nforms V\npseudometric V\nfibre (" + rat_to_string(random_rat(rng)) +
               ") B\n";
        std::string out1 = interp::emit_json(interp::run(dsl::parse(src)));
        std::string out2 = interp::emit_json(interp::run(dsl::parse(src)));
        if (out1 != out2) return false;
    }
    return true;
}

void criterion_12() {
    bool ring = suite_ring_laws();
    bool orc = suite_oracle_agreement();
    bool mono = suite_dual_monotone();
    bool rank = suite_rank_ceiling();
    bool det = suite_report_determinism();
    std::string detail;
    if (!ring) detail += " ring-laws";
    if (!orc) detail += " oracle-agreement";
    if (!mono) detail += " dual-monotonicity";
    if (!rank) detail += " rank-ceiling";
    if (!det) detail += " report-determinism";
    report(12, ring && orc && mono && rank && det,
           detail.empty() ? "five property suites, 100+ randomized cases each, zero failures"
                          : "failing suites:" + detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    return failures == 0 ? 0 : 1;
}
