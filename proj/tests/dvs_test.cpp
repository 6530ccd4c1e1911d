// Generated diffeological vector spaces: duals, bilinear forms,
// pseudo-metrics, combinations, smooth maps, and plot membership.

#include <catch2/catch_amalgamated.hpp>

#include "diffeolab/dvs.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace diffeolab;

namespace {

OrthantPoly mono(int dim, std::vector<uint32_t> xe, std::vector<uint8_t> ae, Rat c = 1) {
    OrthantPoly f{dim, {}};
    f.terms[Mono{std::move(xe), std::move(ae)}] = c;
    return f;
}

// |x| e3 in R^3
DVSpace abs_e3() {
    return DVSpace::generated(
        3, {PlotMap(1, {OrthantPoly::zero(1), OrthantPoly::zero(1), mono(1, {0}, {1})})});
}

// ((x+|x|)/2, (|x|-x)/2) in R^2
DVSpace angled() {
    OrthantPoly x = mono(1, {1}, {0});
    OrthantPoly ax = mono(1, {0}, {1});
    return DVSpace::generated(
        2, {PlotMap(1, {scale(add(x, ax), Rat(1, 2)), scale(sub(ax, x), Rat(1, 2))})});
}

// {|x| e1, |x| e2} in R^2
DVSpace two_abs() {
    return DVSpace::generated(2, {PlotMap(1, {mono(1, {0}, {1}), OrthantPoly::zero(1)}),
                                  PlotMap(1, {OrthantPoly::zero(1), mono(1, {0}, {1})})});
}

// functional applied to a generator, composed by hand for the oracle
OrthantPoly compose(const Vec& f, const PlotMap& p) {
    OrthantPoly acc = OrthantPoly::zero(p.domain_dim);
    for (int i = 0; i < p.codomain_dim; ++i) acc = add(acc, scale(p.components[i], f[i]));
    return acc;
}

}  // namespace

TEST_CASE("dual of R^3 generated by |x| e3 is spanned by e1, e2") {
    DualBasis d = smooth_dual(abs_e3());
    REQUIRE(d.dim() == 2);
    CHECK(d.basis[0] == Vec{Rat(1), Rat(0), Rat(0)});
    CHECK(d.basis[1] == Vec{Rat(0), Rat(1), Rat(0)});
    // oracle: e3 composed with the generator has a kink, dual members do not
    DVSpace v = abs_e3();
    CHECK(oracle::kink_order(compose({Rat(0), Rat(0), Rat(1)}, v.generators[0]), {Rat(0)}, 0, 3) ==
          1);
    for (const Vec& f : d.basis)
        CHECK(oracle::looks_smooth(compose(f, v.generators[0]), {Rat(1)}, 3));
}

TEST_CASE("dual of the angled plane is spanned by e1 - e2") {
    DualBasis d = smooth_dual(angled());
    REQUIRE(d.dim() == 1);
    CHECK(d.basis[0] == Vec{Rat(1), Rat(-1)});
    DVSpace v = angled();
    CHECK(oracle::looks_smooth(compose(d.basis[0], v.generators[0]), {Rat(1)}, 3));
    // e1 alone is not smooth on this space
    CHECK(oracle::kink_order(compose({Rat(1), Rat(0)}, v.generators[0]), {Rat(0)}, 0, 3) == 1);
}

TEST_CASE("two abs generators kill the whole dual") {
    CHECK(smooth_dual(two_abs()).dim() == 0);
}

TEST_CASE("standard and coarse duals are full and zero") {
    CHECK(smooth_dual(DVSpace::standard(4)).dim() == 4);
    CHECK(smooth_dual(DVSpace::coarse(3)).dim() == 0);
}

TEST_CASE("smooth symmetric forms match the worked examples") {
    SECTION("angled plane: multiples of (e1-e2) tensor (e1-e2)") {
        auto forms = smooth_symmetric_forms(angled());
        REQUIRE(forms.size() == 1);
        Mat expect{{Rat(1), Rat(-1)}, {Rat(-1), Rat(1)}};
        CHECK(forms[0].m == expect);
    }
    SECTION("abs e2 plane: multiples of e1 tensor e1") {
        DVSpace v = DVSpace::generated(
            2, {PlotMap(1, {OrthantPoly::zero(1), mono(1, {0}, {1})})});
        auto forms = smooth_symmetric_forms(v);
        REQUIRE(forms.size() == 1);
        Mat expect{{Rat(1), Rat(0)}, {Rat(0), Rat(0)}};
        CHECK(forms[0].m == expect);
    }
    SECTION("two abs generators admit only the zero form") {
        CHECK(smooth_symmetric_forms(two_abs()).empty());
        // oracle: brute force over the symmetric monomial basis
        DVSpace v = two_abs();
        for (int bi = 0; bi < 3; ++bi) {
            Mat a = mat_zero(2, 2);
            if (bi == 0) a[0][0] = 1;
            if (bi == 1) a[0][1] = a[1][0] = 1;
            if (bi == 2) a[1][1] = 1;
            // some slice p(u)^T A e_w must carry a kink
            bool kink = false;
            for (const PlotMap& p : v.generators)
                for (int w = 0; w < 2 && !kink; ++w) {
                    Vec row{a[0][w], a[1][w]};
                    if (!oracle::looks_smooth(compose(row, p), {Rat(1)}, 3)) kink = true;
                }
            CHECK(kink);
        }
    }
    SECTION("standard plane has the full three-dimensional form space") {
        CHECK(smooth_symmetric_forms(DVSpace::standard(2)).size() == 3);
    }
    SECTION("coarse spaces admit only the zero form") {
        CHECK(smooth_symmetric_forms(DVSpace::coarse(2)).empty());
    }
}

TEST_CASE("pseudo-metrics on single spaces") {
    SECTION("R^3 with |x| e3: e1#e1 + e2#e2, kernel multiplicity one") {
        PseudoMetric g = pseudo_metric(abs_e3());
        Mat expect{{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(0)}};
        CHECK(g.form.m == expect);
        CHECK(g.rank == 2);
    }
    SECTION("standard plane: identity form") {
        PseudoMetric g = pseudo_metric(DVSpace::standard(2));
        CHECK(g.form.m == mat_identity(2));
        CHECK(g.rank == 2);
    }
    SECTION("coarse plane: zero form with rank zero") {
        PseudoMetric g = pseudo_metric(DVSpace::coarse(2));
        CHECK(g.form.m == mat_zero(2, 2));
        CHECK(g.rank == 0);
    }
}

TEST_CASE("space combinations match the worked examples") {
    SECTION("standard line plus an abs line") {
        DVSpace axis = DVSpace::generated(1, {PlotMap(1, {mono(1, {0}, {1})})});
        DVSpace sum = direct_sum(DVSpace::standard(1), axis);
        CHECK(sum.dim == 2);
        CHECK(smooth_dual(sum).dim() == 1);
        CHECK(smooth_dual(sum).basis[0] == Vec{Rat(1), Rat(0)});
    }
    SECTION("quotient of (0,|x|,|x|) by e3 leaves (0,|x|)") {
        DVSpace v = DVSpace::generated(
            3, {PlotMap(1, {OrthantPoly::zero(1), mono(1, {0}, {1}), mono(1, {0}, {1})})});
        QuotientResult q = space_quotient(v, {{Rat(0), Rat(0), Rat(1)}});
        CHECK(q.space.dim == 2);
        REQUIRE(q.space.generators.size() == 1);
        CHECK(q.space.generators[0].components[0] == OrthantPoly::zero(1));
        CHECK(q.space.generators[0].components[1] == mono(1, {0}, {1}));
        CHECK(smooth_dual(q.space).dim() == 1);
    }
    SECTION("tensor with a standard line preserves the dual dimension") {
        for (const DVSpace& v : {abs_e3(), angled(), DVSpace::standard(2)}) {
            DVSpace t = tensor(DVSpace::standard(1), v);
            CHECK(t.dim == v.dim);
            CHECK(smooth_dual(t).dim() == smooth_dual(v).dim());
        }
    }
    SECTION("a lone coarse summand is rejected") {
        CHECK_THROWS_AS(direct_sum(DVSpace::coarse(1), DVSpace::standard(1)), Error);
    }
    SECTION("dependent subspace bases are rejected") {
        DVSpace v = DVSpace::standard(2);
        CHECK_THROWS_AS(space_quotient(v, {{Rat(1), Rat(0)}, {Rat(2), Rat(0)}}), Error);
        try {
            space_quotient(v, {{Rat(1), Rat(0)}, {Rat(2), Rat(0)}});
        } catch (const Error& e) {
            CHECK(e.kind == Err::InvalidSubspace);
        }
    }
}

TEST_CASE("smooth linear map verdicts") {
    SECTION("the dual generator of the angled plane is smooth onto the line") {
        Mat m{{Rat(1), Rat(-1)}};
        CHECK(is_smooth_linear_map(m, angled(), DVSpace::standard(1)).status == Verdict::Smooth);
    }
    SECTION("identity is always smooth") {
        CHECK(is_smooth_linear_map(mat_identity(2), angled(), angled()).status == Verdict::Smooth);
        CHECK(is_smooth_linear_map(mat_identity(3), abs_e3(), abs_e3()).status ==
              Verdict::Smooth);
    }
    SECTION("projecting out the abs coordinate onto a standard line is not smooth") {
        DVSpace v = DVSpace::generated(
            2, {PlotMap(1, {OrthantPoly::zero(1), mono(1, {0}, {1})})});
        Mat m{{Rat(0), Rat(1)}};
        Verdict w = is_smooth_linear_map(m, v, DVSpace::standard(1));
        CHECK(w.status == Verdict::NotSmooth);
        CHECK_FALSE(w.witness.empty());
    }
    SECTION("dimension mismatch throws") {
        Mat m{{Rat(1)}};
        CHECK_THROWS_AS(is_smooth_linear_map(m, angled(), DVSpace::standard(1)), Error);
    }
}

TEST_CASE("plot membership verdicts") {
    SECTION("the angled plot is not a plot of the standard plane") {
        Verdict v = is_plot_member(angled().generators[0], DVSpace::standard(2));
        CHECK(v.status == Verdict::NotSmooth);
    }
    SECTION("ordinarily smooth maps are plots of every generated space") {
        PlotMap q(1, {mono(1, {2}, {0}), mono(1, {1}, {0})});
        CHECK(is_plot_member(q, two_abs()).status == Verdict::Smooth);
        CHECK(is_plot_member(q, DVSpace::coarse(2)).status == Verdict::Smooth);
    }
    SECTION("(0, 2|u|) is a plot of the (0,|x|) space, found by decomposition") {
        DVSpace v = DVSpace::generated(
            2, {PlotMap(1, {OrthantPoly::zero(1), mono(1, {0}, {1})})});
        PlotMap q(1, {OrthantPoly::zero(1), mono(1, {0}, {1}, Rat(2))});
        Verdict w = is_plot_member(q, v);
        CHECK(w.status == Verdict::Smooth);
        CHECK_FALSE(w.witness.empty());
    }
    SECTION("a two-variable abs product neither decomposes nor is refuted") {
        DVSpace v = DVSpace::generated(
            2, {PlotMap(1, {OrthantPoly::zero(1), mono(1, {0}, {1})})});
        PlotMap q(2, {OrthantPoly::zero(2), mono(2, {0, 0}, {1, 1})});
        CHECK(is_plot_member(q, v).status == Verdict::Unknown);
    }
}

namespace {

// random generated space within the corpus bounds
DVSpace random_space(std::mt19937_64& rng, int dim, int max_gens = 3) {
    int n = 1 + static_cast<int>(rng() % max_gens);
    std::vector<PlotMap> gens;
    for (int i = 0; i < n; ++i) {
        int dom = 1 + static_cast<int>(rng() % 2);
        std::vector<OrthantPoly> comps;
        for (int c = 0; c < dim; ++c) comps.push_back(testutil::random_poly(rng, dom, 2));
        gens.push_back(PlotMap(dom, std::move(comps)));
    }
    return DVSpace::generated(dim, std::move(gens));
}

}  // namespace

TEST_CASE("dual dimension never grows when a generator is added") {
    std::mt19937_64 rng(2026101);
    for (int i = 0; i < 120; ++i) {
        int dim = 2 + static_cast<int>(rng() % 3);
        DVSpace v = random_space(rng, dim);
        size_t before = smooth_dual(v).dim();
        int dom = 1 + static_cast<int>(rng() % 2);
        std::vector<OrthantPoly> comps;
        for (int c = 0; c < dim; ++c) comps.push_back(testutil::random_poly(rng, dom, 2));
        DVSpace w = v;
        w.generators.push_back(PlotMap(dom, std::move(comps)));
        CHECK(smooth_dual(w).dim() <= before);
    }
}

TEST_CASE("dual bases re-verify against the generators and the oracle") {
    std::mt19937_64 rng(2026102);
    for (int i = 0; i < 100; ++i) {
        int dim = 2 + static_cast<int>(rng() % 2);
        DVSpace v = random_space(rng, dim, 2);
        DualBasis d = smooth_dual(v);
        for (const Vec& f : d.basis)
            for (const PlotMap& p : v.generators) {
                OrthantPoly comp = compose(f, p);
                CHECK(is_ordinarily_smooth(comp));
                Point probe = testutil::random_point(rng, p.domain_dim, true);
                CHECK(oracle::looks_smooth(comp, probe, 3));
            }
    }
}

TEST_CASE("form rows stay inside the dual span and metrics verify exactly") {
    std::mt19937_64 rng(2026103);
    for (int i = 0; i < 100; ++i) {
        int dim = 2 + static_cast<int>(rng() % 2);
        DVSpace v = random_space(rng, dim, 2);
        DualBasis d = smooth_dual(v);
        for (const SymForm& a : smooth_symmetric_forms(v))
            for (const Vec& row : a.m)
                if (!vec_is_zero(row)) CHECK(in_span(d.basis, row));
        PseudoMetric g = pseudo_metric(v);
        CHECK(g.rank == d.dim());
        PsdResult pr = psd_rank(g.form.m);
        CHECK(pr.psd);
        CHECK(pr.rank == d.dim());
        // zero-eigenvalue multiplicity at least n - dim(dual)
        CHECK(static_cast<size_t>(v.dim) - pr.rank >= static_cast<size_t>(v.dim) - d.dim());
    }
}

TEST_CASE("membership verdicts are stable under generator reordering") {
    std::mt19937_64 rng(2026104);
    int flips = 0;
    for (int i = 0; i < 100; ++i) {
        int dim = 2;
        DVSpace v = random_space(rng, dim, 3);
        int dom = 1 + static_cast<int>(rng() % 2);
        std::vector<OrthantPoly> comps;
        for (int c = 0; c < dim; ++c) comps.push_back(testutil::random_poly(rng, dom, 2));
        PlotMap q(dom, std::move(comps));
        Verdict a = is_plot_member(q, v);
        DVSpace w = v;
        std::reverse(w.generators.begin(), w.generators.end());
        Verdict b = is_plot_member(q, w);
        bool contradict = (a.status == Verdict::Smooth && b.status == Verdict::NotSmooth) ||
                          (a.status == Verdict::NotSmooth && b.status == Verdict::Smooth);
        if (contradict) ++flips;
    }
    CHECK(flips == 0);
}

TEST_CASE("quotient duals pull back injectively into the ambient dual") {
    std::mt19937_64 rng(2026105);
    for (int i = 0; i < 100; ++i) {
        int dim = 3;
        DVSpace v = random_space(rng, dim, 2);
        // quotient by a random coordinate axis
        size_t axis = rng() % dim;
        Vec sub(dim, Rat(0));
        sub[axis] = 1;
        QuotientResult q = space_quotient(v, {sub});
        DualBasis dq = smooth_dual(q.space);
        DualBasis dv = smooth_dual(v);
        // pull back each quotient functional through the projection
        Mat pulled;
        for (const Vec& f : dq.basis) {
            Vec g(dim, Rat(0));
            for (size_t r = 0; r < q.projection.size(); ++r)
                for (int c = 0; c < dim; ++c) g[c] += f[r] * q.projection[r][c];
            CHECK(in_span(dv.basis, g));
            pulled.push_back(g);
        }
        if (!pulled.empty()) CHECK(mat_rank(pulled) == pulled.size());
    }
}
