#pragma once
// Shared randomized-corpus helpers for the test suites. All generators are
// seeded explicitly so every run sees the same cases.

#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "diffeolab/errors.hpp"
#include "diffeolab/pwpoly.hpp"

// Catch matcher for the library's typed error codes.
struct ErrCodeIs : Catch::Matchers::MatcherGenericBase {
    diffeolab::Err code;
    explicit ErrCodeIs(diffeolab::Err c) : code(c) {}
    bool match(const diffeolab::Error& e) const { return e.kind == code; }
    std::string describe() const override {
        return std::string("raises ") + diffeolab::err_name(code);
    }
};

namespace testutil {

using diffeolab::Mono;
using diffeolab::OrthantPoly;
using diffeolab::Point;
using diffeolab::Rat;

inline Rat random_rat(std::mt19937_64& rng, int num_range = 8, int max_den = 4) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, max_den);
    return Rat(num(rng)) / den(rng);
}

inline Rat random_nonzero_rat(std::mt19937_64& rng, int num_range = 8, int max_den = 4) {
    for (;;) {
        Rat r = random_rat(rng, num_range, max_den);
        if (r != 0) return r;
    }
}

// corpus constraint: abs-carrying monomials keep x-exponents <= 2 per
// variable so the kink order stays within the oracle's reach
inline OrthantPoly random_poly(std::mt19937_64& rng, int dim, int max_terms = 5) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> xe_deep(0, 3);
    std::uniform_int_distribution<int> xe_shallow(0, 2);
    std::uniform_int_distribution<int> ae(0, 1);
    OrthantPoly f = OrthantPoly::zero(dim);
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        Mono m{std::vector<uint32_t>(dim, 0), std::vector<uint8_t>(dim, 0)};
        bool has_abs = false;
        for (int i = 0; i < dim; ++i) m.ae[i] = static_cast<uint8_t>(ae(rng));
        for (int i = 0; i < dim; ++i)
            if (m.ae[i]) has_abs = true;
        for (int i = 0; i < dim; ++i)
            m.xe[i] = static_cast<uint32_t>(has_abs ? xe_shallow(rng) : xe_deep(rng));
        OrthantPoly term{dim, {}};
        term.terms[m] = random_nonzero_rat(rng);
        f = add(f, term);
    }
    return f;
}

inline Point random_point(std::mt19937_64& rng, int dim, bool nonzero = false) {
    Point p(dim);
    for (int i = 0; i < dim; ++i)
        p[i] = nonzero ? random_nonzero_rat(rng) : random_rat(rng);
    return p;
}

}  // namespace testutil
