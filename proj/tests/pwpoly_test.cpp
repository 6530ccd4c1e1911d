// Piecewise polynomial layer: frozen oracle expectations, ring laws, and
// agreement between the symbolic smoothness test and the numeric oracle.

#include <catch2/catch_amalgamated.hpp>

#include "diffeolab/pwpoly.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace diffeolab;

namespace {
OrthantPoly mono(int dim, std::vector<uint32_t> xe, std::vector<uint8_t> ae, Rat c = 1) {
    OrthantPoly f{dim, {}};
    f.terms[Mono{std::move(xe), std::move(ae)}] = c;
    return f;
}
}  // namespace

TEST_CASE("oracle kink orders are frozen on the canonical family") {
    Point origin{Rat(0)};
    // |x|: first derivative jumps
    CHECK(oracle::kink_order(mono(1, {0}, {1}), origin, 0, 4) == 1);
    // x|x|: C^1, second derivative jumps
    CHECK(oracle::kink_order(mono(1, {1}, {1}), origin, 0, 4) == 2);
    // x^2|x|: C^2, third derivative jumps
    CHECK(oracle::kink_order(mono(1, {2}, {1}), origin, 0, 4) == 3);
    // x^3|x|: C^3, fourth derivative jumps
    CHECK(oracle::kink_order(mono(1, {3}, {1}), origin, 0, 4) == 4);
    // x^2 and x^3 are smooth
    CHECK_FALSE(oracle::kink_order(mono(1, {2}, {0}), origin, 0, 4));
    CHECK_FALSE(oracle::kink_order(mono(1, {3}, {0}), origin, 0, 4));
}

TEST_CASE("the engine is strictly conservative where the oracle runs out of orders") {
    // x^3|x| carries an absolute value, so the engine reports non-smooth even
    // though the kink only appears at order 4
    OrthantPoly f = mono(1, {3}, {1});
    CHECK_FALSE(is_ordinarily_smooth(f));
    CHECK(oracle::kink_order(f, {Rat(0)}, 0, 3) == std::nullopt);
    CHECK(oracle::kink_order(f, {Rat(0)}, 0, 4) == 4);
}

TEST_CASE("abs squares normalize to plain squares") {
    OrthantPoly a = mono(1, {0}, {1});
    OrthantPoly sq = mul(a, a);
    CHECK(sq == mono(1, {2}, {0}));
    CHECK(is_ordinarily_smooth(sq));
    // |x|^3 = x^2 |x|
    CHECK(mul(sq, a) == mono(1, {2}, {1}));
}

TEST_CASE("ordinary smoothness is exactly absence of abs factors") {
    CHECK(is_ordinarily_smooth(OrthantPoly::zero(2)));
    CHECK(is_ordinarily_smooth(mono(2, {3, 1}, {0, 0})));
    CHECK_FALSE(is_ordinarily_smooth(mono(2, {0, 0}, {0, 1})));
    OrthantPoly f = add(mono(2, {1, 0}, {0, 0}), mono(2, {0, 2}, {1, 0}, Rat(1, 3)));
    CHECK_FALSE(is_ordinarily_smooth(f));
    auto bad = nonsmooth_monomials(f);
    REQUIRE(bad.size() == 1);
    CHECK(bad.begin()->ae[0] == 1);
}

TEST_CASE("evaluation agrees with the independent evaluator") {
    std::mt19937_64 rng(2026001);
    for (int i = 0; i < 150; ++i) {
        int dim = 1 + static_cast<int>(rng() % 3);
        OrthantPoly f = testutil::random_poly(rng, dim);
        Point p = testutil::random_point(rng, dim);
        CHECK(evaluate(f, p) == oracle::eval(f, p));
    }
}

TEST_CASE("ring laws hold and keep the normal form") {
    std::mt19937_64 rng(2026002);
    auto normal = [](const OrthantPoly& f) {
        for (const auto& [m, c] : f.terms) {
            if (c == 0) return false;
            for (uint8_t e : m.ae)
                if (e > 1) return false;
        }
        return true;
    };
    for (int i = 0; i < 120; ++i) {
        int dim = 1 + static_cast<int>(rng() % 3);
        OrthantPoly f = testutil::random_poly(rng, dim);
        OrthantPoly g = testutil::random_poly(rng, dim);
        OrthantPoly h = testutil::random_poly(rng, dim);
        CHECK(add(f, g) == add(g, f));
        CHECK(mul(f, g) == mul(g, f));
        CHECK(mul(f, add(g, h)) == add(mul(f, g), mul(f, h)));
        CHECK(mul(mul(f, g), h) == mul(f, mul(g, h)));
        CHECK(add(f, neg(f)).terms.empty());
        CHECK(normal(mul(f, g)));
        CHECK(normal(add(f, g)));
        // the ring operations commute with evaluation
        Point p = testutil::random_point(rng, dim);
        CHECK(evaluate(mul(f, g), p) == evaluate(f, p) * evaluate(g, p));
        CHECK(evaluate(add(f, g), p) == evaluate(f, p) + evaluate(g, p));
    }
}

TEST_CASE("orthant specialization is a ring homomorphism matching signed evaluation") {
    std::mt19937_64 rng(2026003);
    for (int i = 0; i < 120; ++i) {
        int dim = 1 + static_cast<int>(rng() % 3);
        OrthantPoly f = testutil::random_poly(rng, dim);
        OrthantPoly g = testutil::random_poly(rng, dim);
        std::vector<int> signs(dim);
        for (int j = 0; j < dim; ++j) signs[j] = rng() % 2 ? 1 : -1;
        OrthantPoly fs = orthant_specialize(f, signs);
        OrthantPoly gs = orthant_specialize(g, signs);
        CHECK(is_ordinarily_smooth(fs));
        CHECK(orthant_specialize(mul(f, g), signs) == mul(fs, gs));
        CHECK(orthant_specialize(add(f, g), signs) == add(fs, gs));
        // evaluation inside the orthant agrees with the original
        Point p = testutil::random_point(rng, dim, true);
        for (int j = 0; j < dim; ++j)
            if ((signs[j] > 0) != (p[j] > 0)) p[j] = -p[j];
        CHECK(evaluate(fs, p) == evaluate(f, p));
    }
}

TEST_CASE("engine smoothness agrees with the numeric oracle on the corpus") {
    std::mt19937_64 rng(2026004);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        int dim = 1 + static_cast<int>(rng() % 2);
        OrthantPoly f = testutil::random_poly(rng, dim, 4);
        bool engine = is_ordinarily_smooth(f);
        // probe along each axis at two random off-axis points
        bool oracle_smooth = true;
        for (int probe = 0; probe < 2 && oracle_smooth; ++probe) {
            Point q = testutil::random_point(rng, dim, true);
            oracle_smooth = oracle::looks_smooth(f, q, 3);
        }
        if (engine) {
            // engine-smooth must never show a kink
            CHECK(oracle_smooth);
            ++checked;
        }
        // oracle kinks must be flagged by the engine
        if (!oracle_smooth) {
            CHECK_FALSE(engine);
            ++checked;
        }
    }
    // the corpus must actually exercise both directions
    CHECK(checked >= 100);
}

TEST_CASE("substitutions stay inside the representation class or throw") {
    OrthantPoly absx = mono(1, {0}, {1});
    SECTION("abs of a shifted variable leaves the class") {
        CHECK_THROWS_AS(affine_substitute(absx, {{Rat(1)}}, {Rat(1)}, 1), Error);
        try {
            affine_substitute(absx, {{Rat(1)}}, {Rat(1)}, 1);
        } catch (const Error& e) {
            CHECK(e.kind == Err::SubstitutionOutsideClass);
        }
    }
    SECTION("abs of a scaled variable stays in class") {
        // |x1| with x1 -> 2 x2 becomes 2 |x2|
        OrthantPoly out = affine_substitute(absx, {{Rat(0), Rat(2)}}, {Rat(0)}, 2);
        CHECK(out == mono(2, {0, 0}, {0, 1}, Rat(2)));
    }
    SECTION("abs of a negative constant is its absolute value") {
        OrthantPoly out = affine_substitute(absx, {{Rat(0)}}, {Rat(-3)}, 1);
        CHECK(out == OrthantPoly::constant(1, Rat(3)));
    }
    SECTION("abs of a two-variable image leaves the class") {
        CHECK_THROWS_AS(affine_substitute(absx, {{Rat(1), Rat(1)}}, {Rat(0)}, 2), Error);
    }
    SECTION("plain variables substitute freely") {
        OrthantPoly f = mono(1, {2}, {0});
        OrthantPoly out = affine_substitute(f, {{Rat(1), Rat(1)}}, {Rat(1)}, 2);
        // (x1 + x2 + 1)^2
        CHECK(evaluate(out, {Rat(2), Rat(3)}) == 36);
        CHECK(is_ordinarily_smooth(out));
    }
}

TEST_CASE("point substitution drops and reindexes the substituted variables") {
    // f(x1, x2) = x1^2 |x2|, fix x1 = -2: result 4 |x1| in one variable
    OrthantPoly f = mono(2, {2, 0}, {0, 1});
    OrthantPoly out = substitute_point(f, {0}, {Rat(-2)});
    CHECK(out.dim == 1);
    CHECK(out == mono(1, {0}, {1}, Rat(4)));
    // substituting zero kills abs-carrying terms cleanly
    OrthantPoly g = add(mono(2, {0, 1}, {1, 0}), mono(2, {0, 2}, {0, 0}));
    OrthantPoly out2 = substitute_point(g, {0}, {Rat(0)});
    CHECK(out2 == mono(1, {2}, {0}));
}

TEST_CASE("variable renaming is a clean embedding") {
    OrthantPoly f = mono(2, {1, 0}, {0, 1});  // x1 |x2|
    OrthantPoly g = rename_vars(f, 3, {2, 0});
    CHECK(g == mono(3, {0, 0, 1}, {1, 0, 0}));
    std::mt19937_64 rng(2026005);
    for (int i = 0; i < 100; ++i) {
        OrthantPoly h = testutil::random_poly(rng, 2);
        OrthantPoly r = rename_vars(h, 3, {2, 0});
        Point p = testutil::random_point(rng, 3);
        CHECK(evaluate(r, p) == evaluate(h, {p[2], p[0]}));
    }
}

TEST_CASE("rendering is deterministic and uses the split naming") {
    OrthantPoly f = add(mono(3, {2, 0, 0}, {0, 1, 1}), mono(3, {0, 0, 0}, {0, 0, 0}, Rat(-1, 2)));
    CHECK(to_string(f, 1) == "-1/2 + x1^2*abs(y1)*abs(y2)");
    CHECK(to_string(OrthantPoly::zero(2)) == "0");
    CHECK(to_string(mono(2, {1, 1}, {0, 0}, Rat(-2))) == "-2*x1*x2");
}

TEST_CASE("degrees are reported per variable and in total") {
    OrthantPoly f = add(mono(2, {2, 1}, {1, 0}), mono(2, {0, 3}, {0, 1}));
    CHECK(degree_in_var(f, 0) == 3);  // x1^2 |x1|
    CHECK(degree_in_var(f, 1) == 4);  // x2^3 |x2|
    CHECK(total_degree(f) == 4);
}
