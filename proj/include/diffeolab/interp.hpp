#pragma once
// interp.hpp -- evaluates a parsed document and renders the results.
//
// Every command appends one report entry.  JSON entries carry their fields in
// the fixed order {command, object, status, dimension, basis, matrix, strata,
// witness, reason}; fields that do not apply to a command are omitted without
// disturbing the relative order.  Rational numbers are rendered as "p" or
// "p/q" strings, matrix entries over the base as expressions in the input
// grammar, so reports are byte-deterministic for a given document and config.

#include <map>
#include <string>
#include <vector>

#include "diffeolab/bundle.hpp"
#include "diffeolab/dsl.hpp"
#include "diffeolab/dvs.hpp"
#include "diffeolab/errors.hpp"
#include "diffeolab/metric.hpp"
#include "json.hpp"

namespace diffeolab::interp {

using json = nlohmann::ordered_json;

struct RunConfig {
    uint32_t degree = 4;  // decomposition degree bound for membership searches
};

struct Report {
    json entries = json::array();
};

namespace detail {

inline json rat_rows(const Mat& m) {
    json rows = json::array();
    for (const Vec& r : m) {
        json row = json::array();
        for (const Rat& x : r) row.push_back(rat_to_string(x));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json poly_rows(const SecMat& g) {
    json rows = json::array();
    for (const auto& r : g) {
        json row = json::array();
        for (const OrthantPoly& e : r) row.push_back(to_string(e));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline const char* verdict_status(Verdict::Status s) {
    switch (s) {
        case Verdict::Smooth: return "smooth";
        case Verdict::NotSmooth: return "not_smooth";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

inline const char* metric_status(MetricStatus s) {
    switch (s) {
        case MetricStatus::Valid: return "valid";
        case MetricStatus::InvalidAtPoint: return "invalid_at_point";
        case MetricStatus::Unknown: return "unknown";
    }
    return "unknown";
}

inline const char* find_status(FindStatus s) {
    switch (s) {
        case FindStatus::Exists: return "exists";
        case FindStatus::NotExists: return "not_exists";
        case FindStatus::Unknown: return "unknown";
    }
    return "unknown";
}

inline const char* commute_status(CommuteReport::Status s) {
    switch (s) {
        case CommuteReport::Commutes: return "commutes";
        case CommuteReport::HypothesisFailed: return "hypothesis_failed";
        case CommuteReport::WitnessMismatch: return "witness_mismatch";
    }
    return "unknown";
}

inline const char* kind_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::Standard: return "standard";
        case SpaceKind::Coarse: return "coarse";
        case SpaceKind::Generated: return "generated";
    }
    return "generated";
}

// upper-triangle coefficient vector of a symmetric form, row-major
inline json sym_row(const SymForm& f) {
    json row = json::array();
    const int n = static_cast<int>(f.m.size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) row.push_back(rat_to_string(f.m[i][j]));
    return row;
}

struct Evaluator {
    const dsl::Document& doc;
    MemberConfig cfg;
    std::map<std::string, PseudoBundle> glued;  // materialised glue declarations

    const DVSpace& space(const dsl::Command& c, const std::string& n) const {
        const dsl::SpaceDecl* d = doc.find_space(n);
        if (!d) throw command_error(c, n, "a space");
        return d->space;
    }
    const PseudoBundle& bundle(const dsl::Command& c, const std::string& n) const {
        const dsl::BundleDecl* d = doc.find_bundle(n);
        if (!d) throw command_error(c, n, "a bundle");
        return d->bundle;
    }
    const dsl::GlueDecl& glue_decl(const dsl::Command& c, const std::string& n) const {
        const dsl::GlueDecl* d = doc.find_glue(n);
        if (!d) throw command_error(c, n, "a gluing");
        return *d;
    }
    const dsl::SectionDecl& section_decl(const dsl::Command& c, const std::string& n) const {
        const dsl::SectionDecl* d = doc.find_section(n);
        if (!d) throw command_error(c, n, "a section");
        return *d;
    }

    static Error command_error(const dsl::Command& c, const std::string& n,
                               const std::string& want) {
        return Error(Err::UnknownName, "line " + std::to_string(c.line) + ", column " +
                                           std::to_string(c.column) + ": command '" + c.kind +
                                           "' needs " + want + ", but '" + n + "' is not one");
    }

    json run_command(const dsl::Command& c) {
        json e;
        e["command"] = c.kind;
        if (c.kind == "dual") {
            const DVSpace& v = space(c, c.names[0]);
            DualBasis d = smooth_dual(v);
            e["object"] = c.names[0];
            e["dimension"] = d.dim();
            e["basis"] = rat_rows(d.basis);
        } else if (c.kind == "forms") {
            const DVSpace& v = space(c, c.names[0]);
            std::vector<SymForm> fs = smooth_symmetric_forms(v);
            e["object"] = c.names[0];
            e["dimension"] = fs.size();
            json basis = json::array();
            for (const SymForm& f : fs) basis.push_back(sym_row(f));
            e["basis"] = std::move(basis);
        } else if (c.kind == "pseudometric") {
            const DVSpace& v = space(c, c.names[0]);
            PseudoMetric pm = pseudo_metric(v);
            e["object"] = c.names[0];
            e["dimension"] = pm.rank;
            e["matrix"] = rat_rows(pm.form.m);
        } else if (c.kind == "fibre") {
            const PseudoBundle& b = bundle(c, c.names[0]);
            DVSpace f = fibre_space(b, c.point);
            DualBasis d = smooth_dual(f);
            e["object"] = c.names[0];
            e["status"] = kind_string(f.kind);
            e["dimension"] = d.dim();
            e["basis"] = rat_rows(d.basis);
            e["witness"] = point_to_string(c.point);
        } else if (c.kind == "dual_profile") {
            const PseudoBundle& b = bundle(c, c.names[0]);
            DualProfile prof = dual_profile(b);
            e["object"] = c.names[0];
            json strata = json::array();
            for (const ProfileStratum& st : prof.strata) {
                json s;
                s["label"] = st.label;
                s["dimension"] = st.dual_dim;
                s["basis"] = rat_rows(st.dual_basis);
                s["witness"] = point_to_string(st.witness);
                strata.push_back(std::move(s));
            }
            e["strata"] = std::move(strata);
        } else if (c.kind == "member") {
            const DVSpace& v = space(c, c.names[0]);
            Verdict verd = is_plot_member(c.plot, v, cfg);
            e["object"] = c.names[0];
            e["status"] = verdict_status(verd.status);
            if (!verd.witness.empty()) e["witness"] = verd.witness;
            if (!verd.reason.empty()) e["reason"] = verd.reason;
        } else if (c.kind == "smoothmap") {
            const DVSpace& v = space(c, c.names[0]);
            const DVSpace& w = space(c, c.names[1]);
            Verdict verd = is_smooth_linear_map(c.matrix, v, w, cfg);
            e["object"] = c.names[0] + "->" + c.names[1];
            e["status"] = verdict_status(verd.status);
            e["matrix"] = rat_rows(c.matrix);
            if (!verd.witness.empty()) e["witness"] = verd.witness;
            if (!verd.reason.empty()) e["reason"] = verd.reason;
        } else if (c.kind == "check_metric") {
            const dsl::SectionDecl& sd = section_decl(c, c.names[0]);
            const PseudoBundle& b = bundle(c, sd.bundle);
            MetricVerdict mv = is_pseudometric(sd.section, b, cfg);
            e["object"] = c.names[0];
            e["status"] = metric_status(mv.status);
            if (mv.status != MetricStatus::Valid && !mv.at.empty())
                e["witness"] = point_to_string(mv.at);
            if (!mv.reason.empty()) e["reason"] = mv.reason;
        } else if (c.kind == "find_metric") {
            const PseudoBundle& b = bundle(c, c.names[0]);
            FindResult fr = find_pseudometric(b, cfg);
            e["object"] = c.names[0];
            e["status"] = find_status(fr.status);
            if (fr.section) {
                json strata = json::array();
                for (const auto& [signs, piece] : fr.section->pieces) {
                    json s;
                    s["label"] = diffeolab::detail::sign_stratum_label(signs, b.base_dim);
                    s["matrix"] = poly_rows(piece);
                    strata.push_back(std::move(s));
                }
                e["strata"] = std::move(strata);
            }
            if (!fr.reason.empty()) e["reason"] = fr.reason;
        } else if (c.kind == "compatible") {
            const dsl::SectionDecl& s1 = section_decl(c, c.names[0]);
            const dsl::SectionDecl& s2 = section_decl(c, c.names[1]);
            const dsl::GlueDecl& g = glue_decl(c, c.names[2]);
            if (s1.bundle != g.left)
                throw Error(Err::UnsupportedCombination,
                            "section '" + c.names[0] + "' is not on the left bundle of '" +
                                c.names[2] + "'");
            if (s2.bundle != g.right)
                throw Error(Err::UnsupportedCombination,
                            "section '" + c.names[1] + "' is not on the right bundle of '" +
                                c.names[2] + "'");
            CompatibleResult cr = check_compatible(s1.section, bundle(c, g.left), s2.section,
                                                   bundle(c, g.right), g.spec, cfg);
            e["object"] = c.names[0] + "," + c.names[1] + "," + c.names[2];
            e["status"] = cr.compatible ? "compatible" : "incompatible";
            if (!cr.compatible) {
                e["matrix"] = rat_rows(cr.difference);
                e["witness"] = point_to_string(cr.at);
            }
        } else if (c.kind == "commute") {
            CommuteReport rep;
            std::string object = c.sub;
            for (const std::string& n : c.names) object += "," + n;
            if (c.sub == "dual") {
                const dsl::GlueDecl& g = glue_decl(c, c.names[0]);
                rep = check_gluing_commutes_dual(bundle(c, g.left), bundle(c, g.right), g.spec,
                                                 cfg);
            } else {
                const dsl::GlueDecl& g1 = glue_decl(c, c.names[0]);
                const dsl::GlueDecl& g2 = glue_decl(c, c.names[1]);
                rep = check_gluing_commutes_combine(c.sub == "tensor", bundle(c, g1.left),
                                                    bundle(c, g1.right), g1.spec,
                                                    bundle(c, g2.left), bundle(c, g2.right),
                                                    g2.spec, cfg);
            }
            e["object"] = object;
            e["status"] = commute_status(rep.status);
            if (!rep.witness.empty()) e["witness"] = rep.witness;
            if (!rep.detail.empty()) e["reason"] = rep.detail;
        } else {
            throw Error(Err::UnknownName, "unrecognised command '" + c.kind + "'");
        }
        return e;
    }
};

}  // namespace detail

// Evaluate a document.  Glue declarations are validated up front (lift shape,
// smoothness, injectivity), then each command contributes one entry.
inline Report run(const dsl::Document& doc, RunConfig rc = {}) {
    detail::Evaluator ev{doc, MemberConfig{rc.degree}, {}};
    for (const dsl::GlueDecl& g : doc.glues) {
        const dsl::BundleDecl* l = doc.find_bundle(g.left);
        const dsl::BundleDecl* r = doc.find_bundle(g.right);
        if (!l || !r)
            throw Error(Err::UnknownName, "gluing '" + g.name + "' references an unknown bundle");
        ev.glued.emplace(g.name, glue(l->bundle, r->bundle, g.spec, ev.cfg));
    }
    Report rep;
    for (const dsl::Command& c : doc.commands) rep.entries.push_back(ev.run_command(c));
    return rep;
}

// Byte-deterministic JSON: two-space indentation, fixed field order, no
// trailing newline (an empty report is exactly "[]").
inline std::string emit_json(const Report& r) { return r.entries.dump(2); }

namespace detail {

inline std::string text_value(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s = "[";
        bool first = true;
        for (const json& item : v) {
            if (!first) s += ", ";
            first = false;
            s += text_value(item);
        }
        return s + "]";
    }
    if (v.is_object()) {
        std::string s = "{";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) s += ", ";
            first = false;
            s += it.key() + ": " + text_value(it.value());
        }
        return s + "}";
    }
    return v.dump();
}

}  // namespace detail

// Human-oriented rendering: one block per entry, LF line endings.
inline std::string emit_text(const Report& r) {
    std::string out;
    for (const json& e : r.entries) {
        std::string head = e.at("command").get<std::string>();
        if (e.contains("object")) head += " " + e.at("object").get<std::string>();
        out += head + "\n";
        for (auto it = e.begin(); it != e.end(); ++it) {
            if (it.key() == "command" || it.key() == "object") continue;
            if (it.key() == "strata") {
                out += "  strata:\n";
                for (const json& s : it.value())
                    out += "    " + detail::text_value(s) + "\n";
                continue;
            }
            out += "  " + it.key() + ": " + detail::text_value(it.value()) + "\n";
        }
    }
    if (out.empty()) out = "[]\n";
    return out;
}

}  // namespace diffeolab::interp
