#pragma once
// plotmap.hpp -- a finite plot: a map R^domain -> R^codomain whose components
// are OrthantPoly elements.  Used both for space generators and for
// membership queries.

#include "errors.hpp"
#include "pwpoly.hpp"

#include <vector>

namespace diffeolab {

struct PlotMap {
    int domain_dim = 0;
    int codomain_dim = 0;
    std::vector<OrthantPoly> components;

    PlotMap() = default;
    PlotMap(int dom, std::vector<OrthantPoly> comps)
        : domain_dim(dom), codomain_dim(static_cast<int>(comps.size())),
          components(std::move(comps)) {
        for (const OrthantPoly& c : components)
            if (c.dim != domain_dim)
                throw Error(Err::DimensionMismatch,
                            "plot component over wrong domain dimension");
    }

    bool operator==(const PlotMap& o) const {
        return domain_dim == o.domain_dim && components == o.components;
    }
};

inline bool plot_is_smooth(const PlotMap& p) {
    for (const OrthantPoly& c : p.components)
        if (!is_ordinarily_smooth(c)) return false;
    return true;
}

// Left-composition with a linear map given by matrix rows.
inline PlotMap compose_linear(const std::vector<std::vector<Rat>>& m, const PlotMap& p) {
    std::vector<OrthantPoly> comps;
    comps.reserve(m.size());
    for (const auto& row : m) {
        if (row.size() != p.components.size())
            throw Error(Err::DimensionMismatch, "matrix width must match plot codomain");
        OrthantPoly acc = OrthantPoly::zero(p.domain_dim);
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) acc = add(acc, scale(p.components[j], row[j]));
        comps.push_back(std::move(acc));
    }
    return PlotMap(p.domain_dim, std::move(comps));
}

// Right-composition with an affine substitution on the domain.
inline PlotMap precompose_affine(const PlotMap& p, const std::vector<std::vector<Rat>>& lin,
                                 const std::vector<Rat>& offset, int new_dom) {
    std::vector<OrthantPoly> comps;
    comps.reserve(p.components.size());
    for (const OrthantPoly& c : p.components)
        comps.push_back(affine_substitute(c, lin, offset, new_dom));
    return PlotMap(new_dom, std::move(comps));
}

inline std::string plot_to_string(const PlotMap& p, int split = -1) {
    std::string s = "(";
    for (size_t i = 0; i < p.components.size(); ++i) {
        if (i) s += ", ";
        s += to_string(p.components[i], split);
    }
    return s + ")";
}

}  // namespace diffeolab
