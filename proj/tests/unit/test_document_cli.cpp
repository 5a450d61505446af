#include "doctest.h"
#include "support/oracles.hpp"
#include "ultra/cli.hpp"

#include <filesystem>
#include <sstream>

using namespace ultra;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(oracle::fixture_path("")))
        if (entry.path().extension() == ".json") names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

TEST_CASE("parsing the one-edge example") {
    auto doc = oracle::fixture("example_sink.json");
    CHECK(doc.graph.edges_up_to(10).size() == 1);
    CHECK(doc.graph.named_vertices().size() == 1);
    REQUIRE(doc.graph.vertex_families().size() == 1);
    CHECK(doc.graph.sinks() == SymbolicVertexSet::family("V", 1));
    CHECK(doc.weights.at(EdgeRef::single("e")) == Scalar(2));
}

TEST_CASE("parse errors") {
    auto code_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const DocumentError& e) {
            return e.code;
        }
        return std::string("none");
    };
    CHECK(code_of("") == "MissingVersion");
    CHECK(code_of("   \n") == "MissingVersion");
    CHECK(code_of("{}") == "MissingVersion");
    CHECK(code_of("{\"version\": \"1\",") == "Syntax");
    CHECK(code_of(R"j({"version":"1","vertices":["v"],"edges":[{"id":"e","source":"v","range":"FAMILY(X)"}]})j") ==
          "UnknownFamily");
    CHECK(code_of(R"j({"version":"1","colour":"red"})j") == "Schema");
    try {
        parse("{\n  \"version\": \"1\",\n  oops\n}");
        FAIL("expected a syntax error");
    } catch (const DocumentError& e) {
        CHECK(e.line == 3);
        CHECK(e.column > 0);
    }
}

TEST_CASE("set expressions") {
    Ultragraph g = oracle::fixture("boundary_example.json").graph;
    CHECK(parse_set_expr("FAMILY(S) MINUS FINITE(S[1], S[2])", g) == SymbolicVertexSet::family("S", 1, {1, 2}));
    CHECK(parse_set_expr("UNION(FINITE(v1), FINITE(v2))", g) ==
          SymbolicVertexSet::of({VertexRef::named("v1"), VertexRef::named("v2")}));
    CHECK(parse_set_expr("INTER(FAMILY(S), FINITE(S[3], v1))", g) ==
          SymbolicVertexSet::single(VertexRef::indexed("S", 3)));
    CHECK_THROWS_AS(parse_set_expr("FINITE(", g), DocumentError);
}

TEST_CASE("property: documents round trip") {
    for (const auto& name : fixture_names()) {
        INFO(name);
        std::string text = read_file(oracle::fixture_path(name));
        auto doc = parse_document(text);
        std::string once = serialize_document(doc);
        auto again = parse_document(once);
        CHECK(serialize_document(again) == once);
        CHECK(again.graph.edges_up_to(6).size() == doc.graph.edges_up_to(6).size());
        CHECK(again.graph.sinks() == doc.graph.sinks());
    }
}

TEST_CASE("m function files round trip") {
    Ultragraph g = oracle::fixture("example_sink.json").graph;
    auto m = oracle::geometric_family(Scalar::parse("1/2"), 5);
    auto back = parse_mfunction(serialize_mfunction(m), g);
    CHECK(serialize_mfunction(back) == serialize_mfunction(m));
    CHECK(back.families.at("V").tail == m.families.at("V").tail);
}

TEST_CASE("command line: the flagship example") {
    std::string doc = oracle::fixture_path("example_sink.json");
    auto solve = run({"kms", "solve", doc, "--beta", "1", "--format", "text"});
    CHECK(solve.code == 0);
    CHECK(solve.out.find("m(r(e)) = 2/3") != std::string::npos);
    CHECK(solve.out.find("m(v0) = 1/3") != std::string::npos);

    auto json = run({"kms", "solve", doc, "--beta", "1"});
    CHECK(json.code == 0);
    CHECK(json.out.find("\"exact\": \"2/3\"") != std::string::npos);
    CHECK(json.out.find("\"input_digest\"") != std::string::npos);
    CHECK(run({"kms", "solve", doc, "--beta", "1"}).out == json.out);

    auto ground = run({"ground", doc, "--format", "text"});
    CHECK(ground.code == 0);
    CHECK(ground.out.find("m(r(e)) = 1") != std::string::npos);
}

TEST_CASE("command line: exit codes") {
    for (const auto& name : fixture_names()) CHECK(run({"validate", oracle::fixture_path(name)}).code == 0);
    auto loop = run({"dynamics", "condition-l", oracle::fixture_path("exitless_loop.json"), "--format", "text"});
    CHECK(loop.code == 1);
    CHECK(loop.out.find("(l, {v})") != std::string::npos);
    CHECK(run({"dynamics", "condition-l", oracle::fixture_path("cycles_example.json")}).code == 0);
    CHECK(run({"dynamics", "condition-l", oracle::fixture_path("emitter_singleton.json")}).code == 1);
    CHECK(run({"dynamics", "condition-l", oracle::fixture_path("isolated_path.json")}).code == 3);
    CHECK(run({"kms", "solve", oracle::fixture_path("exitless_loop.json"), "--beta", "1"}).code == 1);
    CHECK(run({"kms", "solve", oracle::fixture_path("non_rfum2.json"), "--beta", "1"}).code == 1);
    CHECK(run({"analyze", oracle::fixture_path("non_rfum2.json")}).code == 1);
    CHECK(run({"validate", oracle::fixture_path("missing.json")}).code == 2);
    CHECK(run({"kms", "solve", oracle::fixture_path("example_sink.json")}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("command line: the remaining commands") {
    std::string stab = oracle::fixture_path("stabilizer.json");
    auto s = run({"dynamics", "stab", stab, "--point", R"j({"prefix":["a1","a2","a3"],"cycle":["b","c"]})j"});
    CHECK(s.code == 0);
    CHECK(s.out.find("\"stab_ess\": \"{0}\"") != std::string::npos);
    auto iso = run({"dynamics", "isolated", oracle::fixture_path("isolated_path.json"), "--tail",
                    R"j({"prefix":["feed"],"family":"s","start":2})j"});
    CHECK(iso.code == 0);
    CHECK(iso.out.find("\"isolated\"") != std::string::npos);
    CHECK(run({"dynamics", "cycles", stab}).code == 0);
    CHECK(run({"decompose", oracle::fixture_path("emitter_range.json"), "--set", "UNION(FAMILY(V), FINITE(v1))"}).code ==
          0);
    auto split = run({"cylinders", "split", oracle::fixture_path("emitter_range.json"), "--a",
                      R"j({"path":[],"set":"UNION(FAMILY(V), FINITE(v1))"})j", "--format", "text"});
    CHECK(split.code == 0);
    CHECK(run({"cylinders", "intersect", oracle::fixture_path("example_sink.json"), "--a",
               R"j({"path":["e"],"set":"FAMILY(V)"})j", "--b", R"j({"path":["e"],"set":"FINITE(V[2])"})j"})
              .code == 0);
    CHECK(run({"sweep", oracle::fixture_path("example_sink.json"), "--betas", "0.5,1,2"}).code == 0);
    CHECK(run({"orbit-check", oracle::fixture_path("two_cycle.json"), "--map",
               oracle::fixture_path("maps/two_to_one.json")})
              .code == 1);
    CHECK(run({"orbit-check", oracle::fixture_path("example_sink.json"), "--map",
               oracle::fixture_path("maps/relabel.json")})
              .code == 0);
}

TEST_CASE("digests are stable") {
    CHECK(digest("") == "cbf29ce484222325");
    CHECK(digest("a") == "af63dc4c8601ec8c");
}
