#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "scalar.hpp"
#include "system.hpp"
#include "tree.hpp"

namespace heartwood {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scalar <-> JSON.  "p/q" for rationals, {"a":"p/q","b":"r/s"} for a+b*sqrt(d)
// where d comes from the enclosing tree's scalar context.
// ---------------------------------------------------------------------------

struct ScalarContext {
    long quad_d = 0; // 0 = rational context
    bool quadratic() const { return quad_d != 0; }
};

inline json scalar_to_json(const Scalar& s) {
    if (s.is_rational()) return Scalar::rat_str(s.rat_part());
    return json{{"a", Scalar::rat_str(s.rat_part())}, {"b", Scalar::rat_str(s.quad_part())}};
}

inline Scalar scalar_from_json(const json& j, const ScalarContext& ctx, const std::string& where) {
    if (j.is_string()) return Scalar(parse_rat(j.get<std::string>()));
    if (j.is_number_integer()) return Scalar(Rat(Int(j.get<long long>())));
    if (j.is_object()) {
        if (!j.contains("a") || !j.contains("b"))
            throw InputError(where + ": quadratic scalar needs fields a and b");
        Rat a = parse_rat(j.at("a").get<std::string>());
        Rat b = parse_rat(j.at("b").get<std::string>());
        if (b != Rat(0) && !ctx.quadratic())
            throw InputError(where + ": quadratic scalar in a rational context (d mismatch)");
        return b == Rat(0) ? Scalar(a) : Scalar(a, b, ctx.quad_d);
    }
    throw InputError(where + ": malformed scalar");
}

// CLI text form: "p/q", "p/q+r/s*sqrt(d)", "r/s*sqrt(d)", "-sqrt(d)", ...
inline Scalar parse_scalar_text(std::string text, const ScalarContext& ctx) {
    auto strip = [](std::string s) {
        std::string t;
        for (char c : s)
            if (c != ' ') t += c;
        return t;
    };
    text = strip(text);
    if (text.empty()) throw InputError("empty scalar");
    auto sq = text.find("sqrt(");
    if (sq == std::string::npos) return Scalar(parse_rat(text));
    auto close = text.find(')', sq);
    if (close == std::string::npos) throw InputError("malformed scalar '" + text + "'");
    long d = std::stol(text.substr(sq + 5, close - sq - 5));
    if (!ctx.quadratic() && d != 0)
        throw InputError("quadratic scalar '" + text + "' in a rational context");
    if (ctx.quadratic() && d != ctx.quad_d)
        throw InputError("scalar '" + text + "': sqrt base differs from context d=" +
                         std::to_string(ctx.quad_d));
    std::string head = text.substr(0, sq);
    if (!head.empty() && head.back() == '*') head.pop_back();
    // split head into rational part and coefficient at the last top-level +/-
    size_t cut = std::string::npos;
    for (size_t i = head.size(); i-- > 1;) {
        if ((head[i] == '+' || head[i] == '-') && head[i - 1] != '/' && head[i - 1] != '+' &&
            head[i - 1] != '-') {
            cut = i;
            break;
        }
    }
    Rat a(0), b(1);
    if (head.empty()) {
        // just sqrt(d)
    } else if (cut == std::string::npos) {
        std::string bs = head;
        if (bs == "-") b = Rat(-1);
        else if (bs == "+") b = Rat(1);
        else b = parse_rat(bs);
    } else {
        a = parse_rat(head.substr(0, cut));
        std::string bs = head.substr(cut);
        if (bs == "-") b = Rat(-1);
        else if (bs == "+") b = Rat(1);
        else b = parse_rat(bs);
    }
    return b == Rat(0) ? Scalar(a) : Scalar(a, b, d);
}

// ---------------------------------------------------------------------------
// Tree / point / system JSON
// ---------------------------------------------------------------------------

inline json context_to_json(const ScalarContext& ctx) {
    if (ctx.quadratic()) return json{{"kind", "quadratic"}, {"d", ctx.quad_d}};
    return json{{"kind", "rational"}};
}

inline ScalarContext context_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) throw InputError(where + ": malformed scalar context");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational") return ScalarContext{};
    if (kind == "quadratic") {
        if (!j.contains("d")) throw InputError(where + ": quadratic context needs d");
        long d = j.at("d").get<long>();
        if (d <= 1) throw InputError(where + ": quadratic context needs d >= 2");
        return ScalarContext{d};
    }
    throw InputError(where + ": unknown scalar kind '" + kind + "'");
}

inline json point_to_json(const FiniteMetricTree& t, const TreePoint& p) {
    t.check_point(p);
    if (p.is_vertex()) return json{{"v", p.vertex}};
    return json{{"e", p.edge}, {"off", scalar_to_json(p.offset)}};
}

inline TreePoint point_from_json(const FiniteMetricTree& t, const json& j, const ScalarContext& ctx,
                                 const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": malformed point");
    if (j.contains("v")) {
        TreePoint p = TreePoint::at_vertex(j.at("v").get<int>());
        t.check_point(p);
        return p;
    }
    if (j.contains("e") && j.contains("off")) {
        int e = j.at("e").get<int>();
        if (!t.edge_alive(e)) throw InputError(where + ": unknown edge " + std::to_string(e));
        Scalar off = scalar_from_json(j.at("off"), ctx, where + ".off");
        if (off.sign() < 0 || off > t.edge(e).len)
            throw InputError(where + ": offset outside the edge");
        return t.normalized(e, off);
    }
    throw InputError(where + ": point needs either v or e/off");
}

struct TreeBundle {
    FiniteMetricTree tree;
    ScalarContext ctx;
};

inline json tree_to_json(const FiniteMetricTree& t, const ScalarContext& ctx) {
    json jv = json::array();
    for (int v = 0; v < t.vertex_count(); ++v) jv.push_back(v);
    json je = json::array();
    for (int e : t.alive_edges()) {
        const auto& ed = t.edge(e);
        je.push_back(json{{"u", ed.u}, {"v", ed.v}, {"len", scalar_to_json(ed.len)}});
    }
    return json{{"scalar", context_to_json(ctx)}, {"vertices", jv}, {"edges", je}};
}

inline TreeBundle tree_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": malformed tree");
    ScalarContext ctx = context_from_json(j.value("scalar", json{{"kind", "rational"}}), where + ".scalar");
    if (!j.contains("vertices") || !j.contains("edges"))
        throw InputError(where + ": tree needs vertices and edges");
    std::map<long long, int> id_map;
    FiniteMetricTree t;
    for (const auto& jid : j.at("vertices")) {
        long long ext = jid.get<long long>();
        if (id_map.count(ext)) throw InputError(where + ": duplicate vertex id");
        id_map[ext] = t.add_vertex();
    }
    size_t idx = 0;
    for (const auto& jed : j.at("edges")) {
        std::string loc = where + ".edges[" + std::to_string(idx++) + "]";
        if (!jed.contains("u") || !jed.contains("v") || !jed.contains("len"))
            throw InputError(loc + ": edge needs u, v, len");
        auto u = id_map.find(jed.at("u").get<long long>());
        auto v = id_map.find(jed.at("v").get<long long>());
        if (u == id_map.end() || v == id_map.end()) throw InputError(loc + ": unknown endpoint id");
        Scalar len = scalar_from_json(jed.at("len"), ctx, loc + ".len");
        if (len.sign() <= 0) throw InputError(loc + ": edge length must be positive");
        t.add_edge(u->second, v->second, len);
    }
    t.validate();
    return TreeBundle{std::move(t), ctx};
}

struct SystemBundle {
    IsometrySystem sys;
    ScalarContext ctx;
};

inline json system_to_json(const IsometrySystem& sys, const ScalarContext& ctx) {
    json jiso = json::array();
    for (int i = 0; i < sys.generator_count(); ++i) {
        const auto& g = sys.generator(i);
        json jd = json::array(), ji = json::array();
        for (const auto& p : g.dom_ext) jd.push_back(point_to_json(sys.tree(), p));
        for (const auto& p : g.img_ext) ji.push_back(point_to_json(sys.tree(), p));
        jiso.push_back(json{{"name", g.name}, {"domain", jd}, {"images", ji}});
    }
    return json{{"tree", tree_to_json(sys.tree(), ctx)}, {"isometries", jiso}};
}

inline SystemBundle system_from_json(const json& j) {
    if (!j.is_object() || !j.contains("tree") || !j.contains("isometries"))
        throw InputError("system: needs tree and isometries");
    TreeBundle tb = tree_from_json(j.at("tree"), "tree");
    std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens;
    size_t gi = 0;
    for (const auto& jg : j.at("isometries")) {
        std::string loc = "isometries[" + std::to_string(gi++) + "]";
        if (!jg.contains("name") || !jg.contains("domain") || !jg.contains("images"))
            throw InputError(loc + ": isometry needs name, domain, images");
        std::vector<TreePoint> dom, img;
        size_t pi = 0;
        for (const auto& jp : jg.at("domain"))
            dom.push_back(point_from_json(tb.tree, jp, tb.ctx, loc + ".domain[" + std::to_string(pi++) + "]"));
        pi = 0;
        for (const auto& jp : jg.at("images"))
            img.push_back(point_from_json(tb.tree, jp, tb.ctx, loc + ".images[" + std::to_string(pi++) + "]"));
        gens.push_back({jg.at("name").get<std::string>(), dom, img});
    }
    return SystemBundle{IsometrySystem(tb.tree, gens), tb.ctx};
}

inline bool structurally_equal(const IsometrySystem& a, const IsometrySystem& b) {
    if (a.tree().vertex_count() != b.tree().vertex_count()) return false;
    auto ea = a.tree().alive_edges(), eb = b.tree().alive_edges();
    if (ea.size() != eb.size()) return false;
    for (size_t i = 0; i < ea.size(); ++i) {
        const auto &x = a.tree().edge(ea[i]), &y = b.tree().edge(eb[i]);
        if (x.u != y.u || x.v != y.v || x.len != y.len) return false;
    }
    if (a.generator_count() != b.generator_count()) return false;
    for (int i = 0; i < a.generator_count(); ++i) {
        const auto &x = a.generator(i), &y = b.generator(i);
        if (x.name != y.name || !(x.dom_ext == y.dom_ext) || !(x.img_ext == y.img_ext)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Interval importers
// ---------------------------------------------------------------------------

struct IetSpec {
    Scalar total;                    // interval length L
    std::vector<Scalar> lengths;     // subinterval lengths, sum = L
    std::vector<int> permutation;    // 1-based: interval j lands in slot permutation[j-1]
    std::vector<std::string> names;  // optional; defaults to a, b, c, ...
};

namespace detail {
inline FiniteMetricTree interval_tree(const Scalar& total) {
    if (total.sign() <= 0) throw InputError("interval length must be positive");
    FiniteMetricTree t;
    t.add_vertex();
    t.add_vertex();
    t.add_edge(0, 1, total);
    return t;
}
inline TreePoint interval_point(const FiniteMetricTree& t, const Scalar& c) {
    return t.normalized(0, c);
}
} // namespace detail

/*
 * Interval exchange: K = [0, L]; the isometry named by subinterval i maps it
 * forward under the exchange, so positive admissible words are exactly the
 * itinerary words of the IET.
 */
inline IsometrySystem gen_iet(const IetSpec& spec) {
    size_t m = spec.lengths.size();
    if (m == 0) throw InputError("iet needs at least one subinterval");
    if (spec.permutation.size() != m) throw InputError("iet permutation size mismatch");
    std::vector<char> seen(m + 1, 0);
    for (int p : spec.permutation) {
        if (p < 1 || p > static_cast<int>(m) || seen[static_cast<size_t>(p)])
            throw InputError("iet permutation is not a permutation");
        seen[static_cast<size_t>(p)] = 1;
    }
    Scalar sum(0);
    for (const auto& l : spec.lengths) {
        if (l.sign() <= 0) throw InputError("iet subinterval lengths must be positive");
        sum += l;
    }
    if (sum != spec.total) throw InputError("iet lengths do not sum to the interval length");

    FiniteMetricTree t = detail::interval_tree(spec.total);
    std::vector<Scalar> dom_start(m, Scalar(0)), img_start(m, Scalar(0));
    Scalar acc(0);
    for (size_t i = 0; i < m; ++i) {
        dom_start[i] = acc;
        acc += spec.lengths[i];
    }
    for (size_t i = 0; i < m; ++i) {
        Scalar start(0);
        for (size_t j = 0; j < m; ++j)
            if (spec.permutation[j] < spec.permutation[i]) start += spec.lengths[j];
        img_start[i] = start;
    }
    std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens;
    for (size_t i = 0; i < m; ++i) {
        std::string name = i < spec.names.size() ? spec.names[i]
                                                 : std::string(1, static_cast<char>('a' + i));
        std::vector<TreePoint> dom{detail::interval_point(t, dom_start[i]),
                                   detail::interval_point(t, dom_start[i] + spec.lengths[i])};
        std::vector<TreePoint> img{detail::interval_point(t, img_start[i]),
                                   detail::interval_point(t, img_start[i] + spec.lengths[i])};
        gens.push_back({name, dom, img});
    }
    return IsometrySystem(t, gens);
}

struct ItmPiece {
    std::string name;
    Scalar lo, hi;    // domain subinterval [lo, hi], lo <= hi (a point if equal)
    Scalar shift;     // translation; image = [lo+shift, hi+shift]
};

// Interval translation mapping: images need not tile or cover [0, L].
inline IsometrySystem gen_itm(const Scalar& total, const std::vector<ItmPiece>& pieces) {
    if (pieces.empty()) throw InputError("itm needs at least one translation");
    FiniteMetricTree t = detail::interval_tree(total);
    std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens;
    for (const auto& pc : pieces) {
        if (pc.lo.sign() < 0 || pc.hi > total || pc.lo > pc.hi)
            throw InputError("itm domain [" + pc.lo.str() + "," + pc.hi.str() + "] outside K");
        Scalar ilo = pc.lo + pc.shift, ihi = pc.hi + pc.shift;
        if (ilo.sign() < 0 || ihi > total)
            throw InputError("itm image of '" + pc.name + "' escapes K");
        std::vector<TreePoint> dom, img;
        dom.push_back(detail::interval_point(t, pc.lo));
        img.push_back(detail::interval_point(t, ilo));
        if (pc.hi != pc.lo) {
            dom.push_back(detail::interval_point(t, pc.hi));
            img.push_back(detail::interval_point(t, ihi));
        }
        gens.push_back({pc.name, dom, img});
    }
    return IsometrySystem(t, gens);
}

// Which regime the data is consistent with: a full exchange (domains and
// images both tile K) or a translation mapping.
struct RegimeStamp {
    bool domains_cover = false;
    bool images_cover = false;
    bool interiors_disjoint = false;
    std::string regime() const {
        return (domains_cover && images_cover && interiors_disjoint) ? "interval-exchange"
                                                                     : "interval-translation";
    }
};

inline RegimeStamp stamp_regime(const IsometrySystem& sys) {
    // Interval systems only: K must be a single segment.
    RegimeStamp st;
    const auto& t = sys.tree();
    Scalar total(0);
    for (int e : t.alive_edges()) total += t.edge(e).len;
    auto covers = [&](bool use_domain) {
        Scalar len(0);
        for (int i = 0; i < sys.generator_count(); ++i) {
            const ClosedSubtree& s = use_domain ? sys.generator(i).domain : sys.generator(i).image;
            len += s.diameter(t);
        }
        return len == total;
    };
    st.domains_cover = covers(true);
    st.images_cover = covers(false);
    st.interiors_disjoint = true;
    for (int i = 0; i < sys.generator_count() && st.interiors_disjoint; ++i)
        for (int j = i + 1; j < sys.generator_count() && st.interiors_disjoint; ++j) {
            ClosedSubtree inter =
                subtree_intersection(t, sys.generator(i).domain, sys.generator(j).domain);
            if (!inter.empty() && inter.diameter(t).sign() > 0) st.interiors_disjoint = false;
        }
    return st;
}

// ---------------------------------------------------------------------------
// Bundled catalog
// ---------------------------------------------------------------------------

inline Scalar gold_alpha() {
    // (sqrt(5) - 1) / 2
    return Scalar(Rat(Int(-1), Int(2)), Rat(Int(1), Int(2)), 5);
}

inline SystemBundle catalog_system(const std::string& name) {
    if (name == "SYS-SHIFT") {
        return {gen_itm(Scalar(2), {{"a", Scalar(0), Scalar(1), Scalar(1)}}), ScalarContext{}};
    }
    if (name == "SYS-POINT") {
        return {gen_itm(Scalar(1), {{"a", Scalar(1), Scalar(1), Scalar(-1)}}), ScalarContext{}};
    }
    if (name == "SYS-ID") {
        return {gen_itm(Scalar(1), {{"a", Scalar(0), Scalar(1), Scalar(0)}}), ScalarContext{}};
    }
    if (name == "SYS-REFLECT") {
        FiniteMetricTree t = detail::interval_tree(Scalar(2));
        std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens{
            {"a",
             {TreePoint::at_vertex(0), TreePoint::at_vertex(1)},
             {TreePoint::at_vertex(1), TreePoint::at_vertex(0)}}};
        return {IsometrySystem(t, gens), ScalarContext{}};
    }
    if (name == "SYS-GOLD") {
        Scalar alpha = gold_alpha();
        IetSpec spec;
        spec.total = Scalar(1);
        spec.lengths = {Scalar(1) - alpha, alpha};
        spec.permutation = {2, 1};
        spec.names = {"a", "b"};
        return {gen_iet(spec), ScalarContext{5}};
    }
    throw InputError("unknown catalog system '" + name + "'");
}

inline std::vector<std::string> catalog_names() {
    return {"SYS-SHIFT", "SYS-POINT", "SYS-ID", "SYS-REFLECT", "SYS-GOLD"};
}

// Catalog name or a path to a system JSON file.
inline SystemBundle load_system(const std::string& name_or_path) {
    for (const auto& n : catalog_names())
        if (n == name_or_path) return catalog_system(name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw InputError("cannot open system file '" + name_or_path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("malformed JSON in '" + name_or_path + "': " + e.what());
    }
    return system_from_json(j);
}

} // namespace heartwood
