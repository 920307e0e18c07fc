#include "aggrum/io.hpp"

#include <algorithm>

namespace aggrum {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::InvalidInput, what); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<std::string> strings(const Json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& s : j) {
        if (!s.is_string()) bad(std::string(what) + " must be an array of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + " must be a number");
    return j.get<double>();
}

std::vector<double> numbers(const Json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, what));
    return out;
}

Menu parse_menu(const AggregateSpace& space, const Json& j) {
    auto ids = strings(j, "menu");
    if (ids.empty()) bad("empty menu");
    Mask bits = 0;
    for (const auto& id : ids) {
        auto a = space.find(id);
        if (!a) bad("unknown aggregate '" + id + "'");
        if ((bits >> *a) & 1u) bad("duplicate aggregate '" + id + "' in menu");
        bits |= Mask{1} << *a;
    }
    return Menu{bits};
}

std::vector<std::string> part_ids(const AggregationCorrespondence& X, int agg, XMask part) {
    std::vector<std::string> ids;
    const auto& ms = X.members(agg);
    for (std::size_t j = 0; j < ms.size(); ++j)
        if ((part >> j) & 1u) ids.push_back(X.underlying()[static_cast<std::size_t>(ms[j])]);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Json composition_json(const AggregationCorrespondence& X, const CompositionDistribution& lam) {
    Json out = Json::array();
    for (const auto& [m, comp] : lam.per_menu()) {
        Json tuples = Json::array();
        for (const auto& [t, w] : comp) {
            std::vector<std::vector<std::string>> parts;
            for (const auto& [a, s] : t.parts) parts.push_back(part_ids(X, a, s));
            std::sort(parts.begin(), parts.end());
            tuples.push_back({{"parts", parts}, {"weight", w}});
        }
        out.push_back({{"menu", menu_json(X.space(), m)}, {"tuples", tuples}});
    }
    return out;
}

CompositionDistribution parse_composition(const AggregationCorrespondence& X, const Json& j) {
    if (!j.is_array()) bad("composition must be an array");
    const auto& space = X.space();
    CompositionDistribution lam;
    for (const auto& entry : j) {
        Menu m = parse_menu(space, field(entry, "menu"));
        MenuComposition comp;
        const auto& tuples = field(entry, "tuples");
        if (!tuples.is_array()) bad("tuples must be an array");
        for (const auto& tj : tuples) {
            std::map<int, XMask> parts;
            const auto& pj = field(tj, "parts");
            if (!pj.is_array()) bad("parts must be an array");
            for (const auto& part : pj) {
                auto ids = strings(part, "part");
                if (ids.empty()) bad("empty part");
                int agg = -1;
                XMask mask = 0;
                for (const auto& id : ids) {
                    auto x = X.find(id);
                    if (!x) bad("unknown underlying alternative '" + id + "'");
                    const int owner = X.owner(*x);
                    if (agg >= 0 && owner != agg) bad("part mixes aggregates");
                    agg = owner;
                    const auto& ms = X.members(agg);
                    mask |= XMask{1} << (std::find(ms.begin(), ms.end(), *x) - ms.begin());
                }
                if (!parts.emplace(agg, mask).second) bad("two parts for aggregate '" + space.id(agg) + "'");
            }
            CompositionTuple t;
            t.parts.assign(parts.begin(), parts.end());
            comp[t] += number(field(tj, "weight"), "weight");
        }
        validate_composition(X, m, comp);
        lam.set(m, std::move(comp));
    }
    return lam;
}

PreferenceDistribution parse_preference(const Json& j) {
    auto ground = strings(field(j, "ground"), "ground");
    std::vector<std::pair<LinearOrder, double>> pairs;
    const auto& support = field(j, "support");
    if (!support.is_array()) bad("support must be an array");
    for (const auto& s : support) {
        auto ids = strings(field(s, "order"), "order");
        if (ids.size() != ground.size()) bad("order does not rank the whole ground set");
        std::vector<int> ranking;
        for (const auto& id : ids) {
            auto it = std::find(ground.begin(), ground.end(), id);
            if (it == ground.end()) bad("order names '" + id + "' outside the ground set");
            ranking.push_back(static_cast<int>(it - ground.begin()));
        }
        auto sorted = ranking;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) bad("order repeats an alternative");
        pairs.emplace_back(LinearOrder(ranking), number(field(s, "weight"), "weight"));
    }
    return PreferenceDistribution(std::move(ground), std::move(pairs));
}

Json violation_json(const Violation& v, const AggregateSpace& space) {
    Json j{{"kind", violation_name(v.kind)}};
    if (!v.menu.empty()) j["menu"] = menu_json(space, v.menu);
    if (!v.superset.empty()) j["superset"] = menu_json(space, v.superset);
    if (v.item >= 0) j["item"] = space.id(v.item);
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["slack"] = v.slack;
    return j;
}

Json choice_json(const AggregateSpace& space, const StochasticChoice& rho) {
    Json out = Json::array();
    for (const auto& [m, p] : rho.table()) out.push_back({{"menu", menu_json(space, m)}, {"probs", p}});
    return out;
}

Json vertex_json(const RuVertex& v, const AggregateSpace& space) {
    Json fam = Json::array();
    for (const auto& [m, a] : v.family.assignments())
        fam.push_back({{"menu", menu_json(space, m)}, {"aggregate", space.id(a)}});
    return {{"order", order_json(space.ids(), v.order)}, {"family", fam}};
}

}  // namespace

Json menu_json(const AggregateSpace& space, Menu m) {
    Json out = Json::array();
    for (int a : m.members()) out.push_back(space.id(a));
    return out;
}

Json order_json(const std::vector<std::string>& ground, const LinearOrder& order) {
    Json out = Json::array();
    for (int i : order.ranking()) out.push_back(ground[static_cast<std::size_t>(i)]);
    return out;
}

Json preference_json(const PreferenceDistribution& mu) {
    Json support = Json::array();
    for (const auto& [o, w] : mu.support()) support.push_back({{"order", order_json(mu.ground(), o)}, {"weight", w}});
    return {{"ground", mu.ground()}, {"support", support}};
}

Json to_json(const Manifest& m) {
    Json j{{"format", kManifestFormat},
           {"space", {{"atomic", m.space.atomic_ids()}, {"non_atomic", m.space.non_atomic_ids()}}}};
    if (m.X) {
        Json corr = Json::array();
        for (int a = 0; a < m.space.size(); ++a) {
            std::vector<std::string> ids;
            for (int x : m.X->members(a)) ids.push_back(m.X->underlying()[static_cast<std::size_t>(x)]);
            corr.push_back({{"aggregate", m.space.id(a)}, {"members", ids}});
        }
        j["correspondence"] = corr;
    }
    if (m.choice) j["choice"] = choice_json(m.space, *m.choice);
    if (m.preference) j["preference"] = preference_json(*m.preference);
    if (m.composition) j["composition"] = composition_json(*m.X, *m.composition);
    if (m.utility) j["utility"] = Json(*m.utility);
    j["metadata"] = m.metadata;
    return j;
}

Manifest manifest_from_json(const Json& j) {
    try {
        const auto& fmt = field(j, "format");
        if (!fmt.is_string() || fmt.get<std::string>() != kManifestFormat)
            bad("unsupported format; expected " + std::string(kManifestFormat));
        Manifest m;
        const auto& sp = field(j, "space");
        m.space = AggregateSpace(strings(field(sp, "atomic"), "atomic"), strings(field(sp, "non_atomic"), "non_atomic"));
        if (j.contains("correspondence")) {
            const auto& cj = j.at("correspondence");
            if (!cj.is_array()) bad("correspondence must be an array");
            std::vector<std::vector<std::string>> per(static_cast<std::size_t>(m.space.size()));
            std::vector<bool> given(per.size(), false);
            for (const auto& e : cj) {
                const auto& id = field(e, "aggregate");
                if (!id.is_string()) bad("aggregate must be a string");
                auto a = m.space.find(id.get<std::string>());
                if (!a) bad("unknown aggregate '" + id.get<std::string>() + "'");
                if (given[static_cast<std::size_t>(*a)]) bad("aggregate listed twice in correspondence");
                given[static_cast<std::size_t>(*a)] = true;
                per[static_cast<std::size_t>(*a)] = strings(field(e, "members"), "members");
            }
            for (int a = 0; a < m.space.size(); ++a)
                if (!given[static_cast<std::size_t>(a)]) {
                    if (!m.space.is_atomic(a)) bad("no underlying set for '" + m.space.id(a) + "'");
                    per[static_cast<std::size_t>(a)] = {m.space.id(a)};
                }
            m.X = AggregationCorrespondence(m.space, std::move(per));
        }
        if (j.contains("choice")) {
            const auto& cj = j.at("choice");
            if (!cj.is_array()) bad("choice must be an array");
            StochasticChoice rho;
            for (const auto& e : cj) {
                Menu menu = parse_menu(m.space, field(e, "menu"));
                if (rho.has(menu)) bad("menu listed twice: " + menu_label(m.space, menu));
                // Probabilities follow the listed menu order; store them in index order.
                auto ids = strings(field(e, "menu"), "menu");
                auto probs = numbers(field(e, "probs"), "probs");
                if (probs.size() != ids.size()) bad("probs do not match the menu size");
                std::vector<double> aligned(probs.size());
                for (std::size_t i = 0; i < ids.size(); ++i)
                    aligned[static_cast<std::size_t>(menu.slot(m.space.index(ids[i])))] = probs[i];
                rho.set(menu, std::move(aligned));
            }
            m.choice = std::move(rho);
        }
        if (j.contains("preference")) {
            m.preference = parse_preference(j.at("preference"));
            for (const auto& id : m.preference->ground())
                if (!m.space.find(id) && !(m.X && m.X->find(id))) bad("preference ground id '" + id + "' does not resolve");
        }
        if (j.contains("composition")) {
            if (!m.X) bad("a composition needs a correspondence");
            m.composition = parse_composition(*m.X, j.at("composition"));
        }
        if (j.contains("utility")) {
            const auto& uj = j.at("utility");
            if (!uj.is_object()) bad("utility must be an object");
            UtilityMap u;
            for (const auto& [k, v] : uj.items()) u[k] = number(v, "utility");
            m.utility = std::move(u);
        }
        if (j.contains("metadata")) {
            if (!j.at("metadata").is_object()) bad("metadata must be an object");
            m.metadata = j.at("metadata");
        }
        if (!m.choice && !m.preference && !m.composition && !m.utility) bad("manifest carries no payload");
        return m;
    } catch (const Json::exception& e) {
        bad(e.what());
    }
}

std::string print_manifest(const Manifest& m) { return to_json(m).dump(2) + "\n"; }

Manifest parse_manifest(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    return manifest_from_json(j);
}

Json report_json(const AxiomReport& rep, const AggregateSpace& space) {
    Json j{{"passed", rep.passed}, {"method", rep.method}};
    Json vs = Json::array();
    for (const auto& v : rep.violations) vs.push_back(violation_json(v, space));
    j["violations"] = vs;
    if (rep.certificate) j["certificate"] = preference_json(*rep.certificate);
    if (!rep.farkas.empty()) j["farkas"] = rep.farkas;
    return j;
}

Json distance_json(const DistanceResult& d, const AggregateSpace& space) {
    return {{"squared_distance", d.squared_distance},
            {"duality_gap", d.duality_gap},
            {"iterations", d.iterations},
            {"hit_iteration_cap", d.hit_iteration_cap},
            {"mixture", preference_json(d.mixture)},
            {"projection", choice_json(space, d.projection)}};
}

Json caratheodory_json(const SparseApproximation& s, const AggregateSpace& space) {
    Json vs = Json::array(), fw = Json::array();
    for (const auto& v : s.vertices) vs.push_back(vertex_json(v, space));
    for (std::size_t i = 0; i < s.fw_vertices.size(); ++i) {
        auto v = vertex_json(s.fw_vertices[i], space);
        v["weight"] = s.fw_weights[i];
        fw.push_back(v);
    }
    return {{"k", s.vertices.size()}, {"achieved", s.achieved}, {"bound", s.bound},
            {"vertices", vs}, {"frank_wolfe", {{"achieved", s.fw_achieved}, {"vertices", fw}}}};
}

Manifest rationalization_manifest(const Rationalization& r, const AggregateSpace& space) {
    Manifest m;
    m.space = space;
    m.X = r.X;
    m.preference = r.mu_x;
    m.composition = r.lam;
    m.metadata = {{"construction", "rationalize"}, {"variant", variant_name(r.variant)}, {"residual", r.residual}};
    return m;
}

Json tagged_report(std::string_view kind, Json body) {
    Json j{{"format", kReportFormat}, {"kind", kind}};
    for (auto& [k, v] : body.items()) j[k] = v;
    return j;
}

}  // namespace aggrum
