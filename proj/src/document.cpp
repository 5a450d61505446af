#include "ultra/document.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

namespace ultra {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw DocumentError("Syntax",
                            "syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                e.what(),
                            line, col);
    }
}

Scalar scalar_from(const json& j) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    if (j.is_number()) return Scalar::parse(j.dump());
    throw DocumentError("Schema", "expected a number, got " + j.dump());
}

EdgePath path_from(const json& j) {
    EdgePath p;
    for (const auto& e : j) p.push_back(parse_edge_ref(e.get<std::string>()));
    return p;
}

std::map<std::string, Index> bases_of(const Ultragraph& g) {
    std::map<std::string, Index> b;
    for (const auto& f : g.vertex_families()) b[f.id] = f.base;
    return b;
}

// ------------------------------------------------------ set expressions

class SetParser {
public:
    SetParser(const std::string& text, const std::map<std::string, Index>& bases) : s_(text), bases_(bases) {}

    SymbolicVertexSet parse() {
        SymbolicVertexSet r = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
        return r;
    }

private:
    const std::string& s_;
    const std::map<std::string, Index>& bases_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw DocumentError("SetExpr", "set expression column " + std::to_string(pos_ + 1) + ": " + msg, 0,
                            static_cast<int>(pos_ + 1));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '\'';
    }
    std::string ident() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        if (start == pos_) fail("expected an identifier");
        return s_.substr(start, pos_ - start);
    }
    bool keyword(const char* kw) {
        skip();
        std::size_t n = std::char_traits<char>::length(kw);
        if (s_.compare(pos_, n, kw) != 0) return false;
        if (pos_ + n < s_.size() && ident_char(s_[pos_ + n])) return false;
        pos_ += n;
        return true;
    }
    Index family_base(const std::string& id) {
        auto it = bases_.find(id);
        if (it == bases_.end()) throw DocumentError("UnknownFamily", "unknown vertex family '" + id + "'");
        return it->second;
    }
    VertexRef ref() {
        std::string id = ident();
        if (!peek('[')) return VertexRef::named(id);
        ++pos_;
        skip();
        std::size_t start = pos_;
        if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an index");
        Index i = std::stoll(s_.substr(start, pos_ - start));
        expect(']');
        family_base(id);
        return VertexRef::indexed(id, i);
    }
    std::vector<SymbolicVertexSet> list() {
        expect('(');
        std::vector<SymbolicVertexSet> parts;
        if (peek(')')) {
            ++pos_;
            return parts;
        }
        parts.push_back(expr());
        while (peek(',')) {
            ++pos_;
            parts.push_back(expr());
        }
        expect(')');
        return parts;
    }
    SymbolicVertexSet primary() {
        if (keyword("FINITE")) {
            expect('(');
            std::vector<VertexRef> refs;
            if (!peek(')')) {
                refs.push_back(ref());
                while (peek(',')) {
                    ++pos_;
                    refs.push_back(ref());
                }
            }
            expect(')');
            return SymbolicVertexSet::of(refs);
        }
        if (keyword("FAMILY")) {
            expect('(');
            std::string id = ident();
            expect(')');
            return SymbolicVertexSet::family(id, family_base(id));
        }
        if (keyword("UNION")) {
            SymbolicVertexSet r;
            for (const auto& p : list()) r = r.unite(p);
            return r;
        }
        if (keyword("INTER")) {
            auto parts = list();
            if (parts.empty()) fail("INTER needs at least one operand");
            SymbolicVertexSet r = parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) r = r.intersect(parts[i]);
            return r;
        }
        if (peek('(')) {
            ++pos_;
            SymbolicVertexSet r = expr();
            expect(')');
            return r;
        }
        fail("expected FINITE, FAMILY, UNION or INTER");
    }
    SymbolicVertexSet expr() {
        SymbolicVertexSet r = primary();
        while (keyword("MINUS")) r = r.minus(primary());
        return r;
    }
};

const std::set<std::string> kTopFields = {"version", "vertex_families", "vertices", "edges", "edge_families",
                                          "weights"};

}  // namespace

VertexRef parse_vertex_ref(const std::string& text) {
    static const std::regex indexed(R"(^\s*([^\[\]\s]+)\[(-?\d+)\]\s*$)");
    static const std::regex named(R"(^\s*([^\[\]\s,()]+)\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, indexed)) return VertexRef::indexed(m[1], std::stoll(m[2]));
    if (std::regex_match(text, m, named)) return VertexRef::named(m[1]);
    throw DocumentError("Syntax", "bad vertex reference '" + text + "'");
}

EdgeRef parse_edge_ref(const std::string& text) {
    VertexRef v = parse_vertex_ref(text);
    return v.index ? EdgeRef::indexed(v.name, *v.index) : EdgeRef::single(v.name);
}

SymbolicVertexSet parse_set_expr(const std::string& text, const std::map<std::string, Index>& bases) {
    return SetParser(text, bases).parse();
}

SymbolicVertexSet parse_set_expr(const std::string& text, const Ultragraph& g) {
    SymbolicVertexSet s = parse_set_expr(text, bases_of(g));
    for (const auto& n : s.named())
        if (!g.has_vertex(VertexRef::named(n))) throw DocumentError("Semantic", "unknown vertex '" + n + "'");
    return s;
}

// ------------------------------------------------------------ documents

UltragraphDocument parse_document(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw DocumentError("MissingVersion", "empty document: missing version");
    json j = parse_json(text);
    if (!j.is_object()) throw DocumentError("Schema", "document must be an object");
    if (!j.contains("version")) throw DocumentError("MissingVersion", "document has no version field");
    for (const auto& [key, _] : j.items())
        if (!kTopFields.count(key)) throw DocumentError("Schema", "unknown field '" + key + "'");

    UltragraphDocument doc;
    try {
        const json& v = j.at("version");
        doc.version = v.is_string() ? v.get<std::string>() : v.dump();
        if (doc.version != "1") throw DocumentError("Schema", "unsupported version " + doc.version);

        std::vector<VertexFamilyDecl> families;
        std::map<std::string, Index> bases;
        for (const auto& f : j.value("vertex_families", json::array())) {
            VertexFamilyDecl d{f.at("id").get<std::string>(), f.value("base_index", Index{0})};
            bases[d.id] = d.base;
            families.push_back(d);
        }
        std::vector<std::string> named;
        for (const auto& v : j.value("vertices", json::array())) named.push_back(v.get<std::string>());

        std::vector<EdgeFamilyDecl> edges;
        for (const auto& e : j.value("edges", json::array())) {
            EdgeFamilyDecl d;
            d.id = e.at("id").get<std::string>();
            d.source.vertex = parse_vertex_ref(e.at("source").get<std::string>());
            d.range.set = parse_set_expr(e.at("range").get<std::string>(), bases);
            edges.push_back(std::move(d));
        }
        for (const auto& e : j.value("edge_families", json::array())) {
            EdgeFamilyDecl d;
            d.id = e.at("id").get<std::string>();
            d.indexed = true;
            const json& src = e.at("source");
            if (src.contains("Const")) {
                d.source.vertex = parse_vertex_ref(src.at("Const").get<std::string>());
                d.base = 0;
            } else if (src.contains("Indexed")) {
                const json& ix = src.at("Indexed");
                d.source.indexed = true;
                d.source.family = ix.at("family").get<std::string>();
                d.source.offset = ix.value("offset", Index{0});
                auto it = bases.find(d.source.family);
                if (it == bases.end())
                    throw DocumentError("UnknownFamily", "edge family '" + d.id + "' uses unknown vertex family '" +
                                                             d.source.family + "'");
                d.base = it->second - d.source.offset;
            } else {
                throw DocumentError("Schema", "edge family '" + d.id + "' needs a Const or Indexed source");
            }
            if (e.contains("base_index")) d.base = e.at("base_index").get<Index>();
            const json& rng = e.at("range");
            if (rng.contains("ConstSet")) {
                d.range.set = parse_set_expr(rng.at("ConstSet").get<std::string>(), bases);
            } else if (rng.contains("IndexedRefs")) {
                d.range.indexed = true;
                for (const auto& r : rng.at("IndexedRefs"))
                    d.range.refs.push_back({r.at("family").get<std::string>(), r.value("offset", Index{0})});
            } else {
                throw DocumentError("Schema", "edge family '" + d.id + "' needs a ConstSet or IndexedRefs range");
            }
            edges.push_back(std::move(d));
        }
        if (j.contains("weights")) {
            doc.has_weights = true;
            for (const auto& [id, w] : j.at("weights").items()) doc.weights.values[id] = scalar_from(w);
        }
        doc.graph = Ultragraph(std::move(families), std::move(named), std::move(edges));
        for (const auto& [id, w] : doc.weights.values)
            if (!doc.graph.has_edge_family(id)) throw DocumentError("Semantic", "weight for unknown edge '" + id + "'");
    } catch (const json::exception& e) {
        throw DocumentError("Schema", e.what());
    } catch (const ValidationError& e) {
        throw DocumentError("Semantic", e.what());
    } catch (const DeclarationError& e) {
        throw DocumentError("Semantic", e.what());
    } catch (const std::invalid_argument& e) {
        throw DocumentError("Schema", e.what());
    }
    return doc;
}

Ultragraph parse(const std::string& text) { return parse_document(text).graph; }

std::string serialize_document(const UltragraphDocument& doc) {
    const Ultragraph& g = doc.graph;
    ojson j;
    j["version"] = doc.version;
    j["vertex_families"] = ojson::array();
    for (const auto& f : g.vertex_families()) j["vertex_families"].push_back({{"id", f.id}, {"base_index", f.base}});
    j["vertices"] = g.named_vertices();
    j["edges"] = ojson::array();
    j["edge_families"] = ojson::array();
    for (const auto& d : g.edge_families()) {
        if (!d.indexed) {
            j["edges"].push_back({{"id", d.id}, {"source", d.source.vertex.str()}, {"range", d.range.set.str()}});
            continue;
        }
        ojson e;
        e["id"] = d.id;
        if (d.source.indexed)
            e["source"] = {{"Indexed", {{"family", d.source.family}, {"offset", d.source.offset}}}};
        else
            e["source"] = {{"Const", d.source.vertex.str()}};
        if (d.range.indexed) {
            ojson refs = ojson::array();
            for (const auto& r : d.range.refs) refs.push_back({{"family", r.family}, {"offset", r.offset}});
            e["range"] = {{"IndexedRefs", refs}};
        } else {
            e["range"] = {{"ConstSet", d.range.set.str()}};
        }
        e["base_index"] = d.base;
        j["edge_families"].push_back(e);
    }
    if (doc.has_weights) {
        ojson w = ojson::object();
        for (const auto& [id, v] : doc.weights.values) w[id] = v.str();
        j["weights"] = w;
    }
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DocumentError("Io", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

UltragraphDocument load_document(const std::string& path) { return parse_document(read_file(path)); }

std::string digest(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

// -------------------------------------------------------------- m files

MFunction parse_mfunction(const std::string& text, const Ultragraph& g) {
    json j = parse_json(text);
    MFunction m;
    try {
        m.truncation = j.at("truncation").get<Index>();
        const json vertices = j.value("vertices", json::object());
        const json families = j.value("families", json::object());
        for (const auto& [id, v] : vertices.items()) m.vertices[id] = scalar_from(v);
        for (const auto& [id, f] : families.items()) {
            MFunction::FamilyValues fv;
            for (const auto& h : f.value("heads", json::array())) fv.heads.push_back(scalar_from(h));
            if (f.contains("tail")) fv.tail = scalar_from(f.at("tail"));
            m.families[id] = std::move(fv);
        }
        for (const auto& s : j.value("minimal_sets", json::array()))
            m.minimal_sets.emplace_back(parse_set_expr(s.at("set").get<std::string>(), g), scalar_from(s.at("value")));
    } catch (const json::exception& e) {
        throw DocumentError("Schema", e.what());
    }
    return m;
}

std::string serialize_mfunction(const MFunction& m) {
    ojson j;
    j["truncation"] = m.truncation;
    ojson v = ojson::object();
    for (const auto& [id, x] : m.vertices) v[id] = x.str();
    j["vertices"] = v;
    ojson f = ojson::object();
    for (const auto& [id, fv] : m.families) {
        ojson heads = ojson::array();
        for (const auto& h : fv.heads) heads.push_back(h.str());
        f[id] = {{"heads", heads}, {"tail", fv.tail.str()}};
    }
    j["families"] = f;
    j["minimal_sets"] = ojson::array();
    for (const auto& [s, x] : m.minimal_sets) j["minimal_sets"].push_back({{"set", s.str()}, {"value", x.str()}});
    return j.dump(2) + "\n";
}

// ------------------------------------------------- points and cylinders

BoundaryPoint parse_point(const std::string& text, const Ultragraph& g) {
    json j = parse_json(text);
    try {
        if (j.contains("cycle")) {
            EdgePath cycle = path_from(j.at("cycle"));
            if (cycle.empty()) throw DocumentError("Schema", "cycle must be nonempty");
            return BoundaryPoint::periodic(path_from(j.value("prefix", json::array())), cycle);
        }
        return BoundaryPoint::finite(path_from(j.value("path", json::array())),
                                     parse_set_expr(j.at("range").get<std::string>(), g));
    } catch (const json::exception& e) {
        throw DocumentError("Schema", e.what());
    }
}

Cylinder parse_cylinder(const std::string& text, const Ultragraph& g) {
    json j = parse_json(text);
    try {
        Cylinder c = Cylinder::plain(path_from(j.value("path", json::array())),
                                     parse_set_expr(j.at("set").get<std::string>(), g));
        c.excluded_edges = EdgeSet::of(path_from(j.value("excluded_edges", json::array())));
        if (j.contains("excluded_sinks"))
            c.excluded_sinks = parse_set_expr(j.at("excluded_sinks").get<std::string>(), g);
        return c;
    } catch (const json::exception& e) {
        throw DocumentError("Schema", e.what());
    }
}

// ------------------------------------------------------------ block maps

namespace {

CocycleTable table_from(const json& j) {
    CocycleTable t;
    if (j.is_number_integer()) {
        t.fallback = j.get<std::int64_t>();
        return t;
    }
    t.fallback = j.value("default", std::int64_t{0});
    for (const auto& e : j.value("entries", json::array()))
        t.entries.emplace_back(path_from(e.at("prefix")), e.at("value").get<std::int64_t>());
    return t;
}

std::vector<std::pair<EdgePath, EdgePath>> rules_from(const json& j) {
    std::vector<std::pair<EdgePath, EdgePath>> rules;
    for (const auto& r : j) rules.emplace_back(path_from(r.at("from")), path_from(r.at("to")));
    return rules;
}

}  // namespace

BlockMapFile parse_block_map(const std::string& text) {
    json j = parse_json(text);
    BlockMapFile f;
    try {
        f.target = j.value("target", std::string{});
        if (j.value("identity", false)) {
            f.map = BlockMap::identity();
            return f;
        }
        f.map.passthrough = j.value("passthrough", false);
        const json rename = j.value("rename", json::object());
        for (const auto& [a, b] : rename.items()) f.map.rename[a] = b.get<std::string>();
        f.map.forward = rules_from(j.value("forward", json::array()));
        f.map.backward = rules_from(j.value("backward", json::array()));
        if (j.contains("k")) f.map.k = table_from(j.at("k"));
        if (j.contains("l")) f.map.l = table_from(j.at("l"));
        if (j.contains("k_inv")) f.map.k_inv = table_from(j.at("k_inv"));
        if (j.contains("l_inv")) f.map.l_inv = table_from(j.at("l_inv"));
    } catch (const json::exception& e) {
        throw DocumentError("Schema", e.what());
    }
    return f;
}

}  // namespace ultra
