#include "ultra/cli.hpp"

#include "ultra/document.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <ostream>

namespace ultra {

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
    std::string document;
    std::string format = "json";
    std::string tol = "1e-12";
    std::uint64_t seed = 1;
    std::size_t depth = 8;
    std::size_t max_len = 6;
    Index truncation = -1;
    std::size_t samples = 100;

    std::string set, a, b, point, tail, beta, betas, m_file, map_file, convention = "printed";
    std::vector<std::string> weights;
    std::string default_weight;
};

/// A finished command: machine report, text lines and exit code.
struct Report {
    ojson body = ojson::object();
    std::vector<std::string> lines;
    int code = kExitOk;
};

ojson number(const Scalar& s) {
    ojson j;
    if (s.exact()) j["exact"] = s.str();
    j["decimal"] = s.decimal();
    return j;
}

ojson cylinders_json(const std::vector<Cylinder>& cs) {
    ojson arr = ojson::array();
    for (const auto& c : cs) arr.push_back(c.str());
    return arr;
}

// Inline JSON or the path of a file holding it.
std::string json_arg(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && arg[first] == '{') return arg;
    return read_file(arg);
}

struct Context {
    UltragraphDocument doc;
    std::string digest;
    EdgeWeight weights;
};

Context load(const Options& o) {
    Context c;
    c.doc = load_document(o.document);
    c.digest = digest(serialize_document(c.doc));
    c.weights = c.doc.weights;
    if (!o.default_weight.empty()) c.weights.fallback = Scalar::parse(o.default_weight);
    for (const auto& w : o.weights) {
        auto eq = w.find('=');
        if (eq == std::string::npos) throw DocumentError("Usage", "--weight expects ID=VALUE, got '" + w + "'");
        std::string id = w.substr(0, eq);
        if (!c.doc.graph.has_edge_family(id)) throw DocumentError("Usage", "unknown edge '" + id + "'");
        c.weights.values[id] = Scalar::parse(w.substr(eq + 1));
    }
    return c;
}

Index truncation_or(const Options& o, Index fallback) { return o.truncation >= 0 ? o.truncation : fallback; }

// ------------------------------------------------------------- commands

Report cmd_validate(const Options& o) {
    Context c = load(o);
    const Ultragraph& g = c.doc.graph;
    Report r;
    std::size_t singles = 0, families = 0;
    for (const auto& d : g.edge_families()) (d.indexed ? families : singles)++;
    r.body["verdict"] = "valid";
    r.body["named_vertices"] = g.named_vertices().size();
    r.body["vertex_families"] = g.vertex_families().size();
    r.body["edges"] = singles;
    r.body["edge_families"] = families;
    r.lines.push_back("valid: " + std::to_string(g.named_vertices().size()) + " named vertices, " +
                      std::to_string(g.vertex_families().size()) + " vertex families, " + std::to_string(singles) +
                      " edges, " + std::to_string(families) + " edge families");
    return r;
}

ojson decomposition_json(const Decomposition& d) {
    ojson j;
    j["minimal_infinite_emitters"] = ojson::array();
    for (const auto& m : d.minimal_infinite_emitters)
        j["minimal_infinite_emitters"].push_back({{"set", m.set.str()}, {"as", m.provenance.str()}});
    j["minimal_sinks"] = ojson::array();
    for (const auto& m : d.minimal_sinks) j["minimal_sinks"].push_back({{"set", m.set.str()}, {"as", m.provenance.str()}});
    j["finite_part"] = d.finite_part.str();
    return j;
}

std::string decomposition_text(const Decomposition& d) {
    std::string out;
    for (const auto& m : d.minimal_infinite_emitters) out += (out.empty() ? "" : " | ") + m.provenance.str() + " [emitter]";
    for (const auto& m : d.minimal_sinks) out += (out.empty() ? "" : " | ") + m.provenance.str() + " [sink]";
    if (!d.finite_part.empty()) out += (out.empty() ? "" : " | ") + d.finite_part.pretty();
    return out.empty() ? "{}" : out;
}

Report cmd_analyze(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    const Ultragraph& g = alg.graph();
    Report r;
    r.body["sinks"] = g.sinks().str();
    ojson emitters = ojson::array();
    for (const auto& v : g.infinite_emitter_vertices()) emitters.push_back(v.str());
    r.body["infinite_emitter_vertices"] = emitters;
    ojson closure = ojson::array();
    for (const auto& e : alg.closure()) closure.push_back({{"set", e.set.str()}, {"as", e.provenance.str()}});
    r.body["range_closure"] = closure;
    ojson minimal = ojson::array();
    for (const auto& m : alg.minimal_infinite_emitters())
        minimal.push_back({{"kind", "infinite-emitter"}, {"set", m.set.str()}, {"as", m.provenance.str()}});
    for (const auto& m : alg.minimal_sinks())
        minimal.push_back({{"kind", "sink"}, {"set", m.set.str()}, {"as", m.provenance.str()}});
    r.body["minimal_sets"] = minimal;
    r.lines.push_back("sinks: " + g.sinks().pretty());
    for (const auto& m : alg.minimal_infinite_emitters())
        r.lines.push_back("minimal infinite emitter: " + m.provenance.str() + " = " + m.set.pretty());
    for (const auto& m : alg.minimal_sinks())
        r.lines.push_back("minimal sink: " + m.provenance.str() + " = " + m.set.pretty());

    Rfum2Verdict v = alg.check_rfum2();
    ojson rf;
    rf["holds"] = v.holds;
    ojson w = ojson::object();
    for (const auto& [id, d] : v.witnesses) w[id] = decomposition_json(d);
    rf["decompositions"] = w;
    if (!v.holds) {
        rf["counterexample"] = v.counterexample.value_or("");
        rf["residue"] = v.residue ? v.residue->str() : "";
        r.code = kExitNegative;
        r.lines.push_back("RFUM2 fails: range of " + v.counterexample.value_or("?") + " leaves " +
                          (v.residue ? v.residue->pretty() : "") + " uncovered");
    } else {
        r.lines.push_back("RFUM2 holds");
        for (const auto& [id, d] : v.witnesses) r.lines.push_back("  r(" + id + ") = " + decomposition_text(d));
    }
    r.body["verdict"] = v.holds ? "rfum2-holds" : "rfum2-fails";
    r.body["rfum2"] = rf;
    return r;
}

Report cmd_decompose(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    SymbolicVertexSet s = parse_set_expr(o.set, alg.graph());
    Report r;
    r.body["set"] = s.str();
    try {
        Decomposition d = alg.decompose(s);
        r.body["verdict"] = "decomposed";
        r.body["decomposition"] = decomposition_json(d);
        auto gv = alg.as_generalized(s);
        r.body["generated_as"] = gv ? ojson(gv->provenance.str()) : ojson(nullptr);
        r.lines.push_back(s.pretty() + " = " + decomposition_text(d));
    } catch (const NotRfum2& e) {
        r.code = kExitNegative;
        r.body["verdict"] = "not-decomposable";
        r.body["residue"] = e.residue.str();
        r.lines.push_back(std::string("not decomposable: ") + e.what());
    }
    return r;
}

Report cmd_cylinders(const Options& o, const std::string& op) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    Cylinder a = normalized(alg, parse_cylinder(json_arg(o.a), alg.graph()));
    validate_cylinder(alg, a);
    std::vector<Cylinder> out;
    Report r;
    if (op == "split") {
        out = decompose_to_semiring(alg, a);
    } else {
        Cylinder b = normalized(alg, parse_cylinder(json_arg(o.b), alg.graph()));
        validate_cylinder(alg, b);
        if (op == "intersect") {
            out = basis_intersect(alg, a, b);
        } else {
            // Subtracts b from a piece by piece; works for any pair.
            out = subtract(alg, decompose_to_semiring(alg, a), decompose_to_semiring(alg, b));
        }
    }
    r.body["verdict"] = op;
    r.body["cylinders"] = cylinders_json(out);
    r.body["pairwise_disjoint"] = pairwise_disjoint(alg, out);
    for (const auto& x : out) r.lines.push_back(x.str());
    if (out.empty()) r.lines.push_back("(empty)");
    return r;
}

ojson cycle_json(const Ultragraph& g, const Cycle& cy) {
    ojson j;
    j["path"] = path_str(cy.path.edges);
    j["range"] = cy.path.range.str();
    j["simple"] = cy.simple;
    auto w = find_exit(g, cy.path.edges);
    j["exit"] = w ? ojson(w->str()) : ojson(nullptr);
    return j;
}

Report cmd_cycles(const Options& o) {
    Context c = load(o);
    const Ultragraph& g = c.doc.graph;
    Index t = truncation_or(o, g.explicit_index_bound() + 2);
    Report r;
    ojson arr = ojson::array();
    for (const auto& cy : find_cycles(g, o.max_len, t)) {
        arr.push_back(cycle_json(g, cy));
        auto w = find_exit(g, cy.path.edges);
        r.lines.push_back(cy.path.str() + (cy.simple ? " simple" : "") + (w ? " exit " + w->str() : " no exit"));
    }
    r.body["verdict"] = "listed";
    r.body["max_len"] = o.max_len;
    r.body["truncation"] = t;
    r.body["cycles"] = arr;
    return r;
}

Report cmd_condition_l(const Options& o) {
    Context c = load(o);
    const Ultragraph& g = c.doc.graph;
    Index t = truncation_or(o, g.explicit_index_bound() + 2);
    ConditionLResult res = check_condition_L(g, o.max_len, t);
    Report r;
    const char* verdict = res.verdict == ConditionLResult::Verdict::Holds   ? "holds"
                          : res.verdict == ConditionLResult::Verdict::Fails ? "fails"
                                                                            : "unknown";
    r.body["verdict"] = verdict;
    r.body["max_len"] = o.max_len;
    r.body["truncation"] = t;
    r.body["cycles_checked"] = res.cycles_checked;
    r.body["witness"] = res.counterexample ? cycle_json(g, *res.counterexample) : ojson(nullptr);
    r.lines.push_back(std::string("condition L ") + verdict + " (" + std::to_string(res.cycles_checked) +
                      " cycles up to length " + std::to_string(o.max_len) + ")");
    if (res.counterexample) r.lines.push_back("cycle without exit: " + res.counterexample->path.str());
    if (res.verdict == ConditionLResult::Verdict::Fails) r.code = kExitNegative;
    if (res.verdict == ConditionLResult::Verdict::Unknown) r.code = kExitUnknown;
    return r;
}

Report cmd_isolated(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    IsolationResult res;
    std::string shown;
    if (o.point.empty() && o.tail.empty()) throw DocumentError("Usage", "isolated needs --point or --tail");
    if (!o.tail.empty()) {
        auto j = nlohmann::json::parse(json_arg(o.tail));
        FamilyTail t;
        for (const auto& e : j.value("prefix", nlohmann::json::array())) t.prefix.push_back(parse_edge_ref(e));
        t.family = j.at("family").get<std::string>();
        t.start = j.at("start").get<Index>();
        res = classify_isolated(alg, t);
        shown = path_str(t.prefix) + (t.prefix.empty() ? "" : " ") + t.family + "[" + std::to_string(t.start) + "...]";
    } else {
        BoundaryPoint p = parse_point(json_arg(o.point), alg.graph());
        if (!in_boundary(alg, p)) throw DocumentError("Usage", p.str() + " is not a point of the boundary space");
        res = classify_isolated(alg, p);
        shown = p.str();
    }
    Report r;
    r.body["verdict"] = res.isolated ? "isolated" : "not-isolated";
    r.body["point"] = shown;
    r.body["reason"] = res.reason;
    r.body["witness"] = res.witness ? ojson(res.witness->str()) : ojson(nullptr);
    r.lines.push_back(shown + ": " + (res.isolated ? "isolated" : "not isolated") + " (" + res.reason + ")");
    return r;
}

Report cmd_stab(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    BoundaryPoint p = parse_point(json_arg(o.point), alg.graph());
    if (!in_boundary(alg, p)) throw DocumentError("Usage", p.str() + " is not a point of the boundary space");
    StabReport s = stabilizers(alg.graph(), p);
    auto min_str = [](const std::optional<std::size_t>& m) { return m ? std::to_string(*m) : std::string("inf"); };
    Report r;
    r.body["verdict"] = "computed";
    r.body["point"] = p.str();
    r.body["stab"] = s.stab.str();
    r.body["stab_min"] = min_str(s.stab_min);
    r.body["stab_ess"] = s.stab_ess.str();
    r.body["stab_ess_min"] = min_str(s.stab_ess_min);
    r.body["rule"] = s.rule;
    r.lines.push_back(p.str() + ": (" + s.stab.str() + ", " + min_str(s.stab_min) + ", " + s.stab_ess.str() + ", " +
                      min_str(s.stab_ess_min) + ")  [" + s.rule + "]");
    return r;
}

void solution_report(Report& r, const ConstraintSystem& sys, const KmsSolution& sol) {
    r.body["verdict"] = sol.feasible ? "feasible" : "infeasible";
    r.body["truncation"] = sys.truncation;
    r.body["m1_attained"] = sys.m1_attained;
    ojson cons = ojson::array();
    for (const auto& k : sys.constraints)
        if (k.condition != "bound") cons.push_back(k.str(sys.variables));
    r.body["constraints"] = cons;
    if (!sol.feasible) {
        r.code = kExitNegative;
        r.lines.push_back("infeasible; constraints:");
        for (const auto& k : sys.constraints)
            if (k.condition != "bound") r.lines.push_back("  " + k.str(sys.variables));
        return;
    }
    r.body["dimension"] = sol.dimension;
    ojson vals = ojson::array();
    for (std::size_t i = 0; i < sys.variables.size(); ++i) {
        ojson v = number(sol.assignment[i]);
        v["variable"] = sys.variables[i].name();
        vals.push_back(v);
        r.lines.push_back(sys.variables[i].name() + " = " + sol.assignment[i].str());
    }
    r.body["values"] = vals;
    r.body["m"] = nlohmann::ordered_json::parse(serialize_mfunction(sol.m));
    r.lines.push_back("dimension = " + std::to_string(sol.dimension));
    if (!sys.m1_attained) r.lines.push_back("note: m1 is a supremum not attained on a single set");
}

Report cmd_kms_solve(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    Scalar beta = Scalar::parse(o.beta);
    ConstraintSystem sys = build_constraints(alg, c.weights, beta, truncation_or(o, alg.graph().explicit_index_bound() + 3));
    Report r;
    r.body["beta"] = number(beta);
    solution_report(r, sys, solve_kms(sys));
    return r;
}

Report cmd_kms_verify(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    Scalar beta = Scalar::parse(o.beta);
    MFunction m = parse_mfunction(read_file(o.m_file), alg.graph());
    auto violations = verify_m(m, alg, c.weights, beta, Scalar::parse(o.tol));
    Report r;
    r.body["verdict"] = violations.empty() ? "accepted" : "rejected";
    r.body["beta"] = number(beta);
    r.body["tol"] = o.tol;
    ojson arr = ojson::array();
    for (const auto& v : violations) {
        arr.push_back({{"condition", v.condition}, {"set", v.set}, {"residual", number(v.residual)}});
        r.lines.push_back("violation " + v.condition + " at " + v.set + ": residual " + v.residual.str());
    }
    r.body["violations"] = arr;
    if (violations.empty()) r.lines.push_back("accepted: m satisfies m1-m4");
    else r.code = kExitNegative;
    return r;
}

Report cmd_ground(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    GroundConvention conv;
    if (o.convention == "printed") conv = GroundConvention::Printed;
    else if (o.convention == "zero-temperature") conv = GroundConvention::ZeroTemperature;
    else throw DocumentError("Usage", "unknown convention '" + o.convention + "'");
    ConstraintSystem sys = build_system(alg, EdgeWeight{}, Scalar(0),
                                        truncation_or(o, alg.graph().explicit_index_bound() + 3), true, conv);
    Report r;
    r.body["convention"] = o.convention;
    solution_report(r, sys, solve_kms(sys));
    return r;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Report cmd_sweep(const Options& o) {
    Context c = load(o);
    VertexAlgebra alg(c.doc.graph);
    std::vector<Scalar> betas;
    for (const auto& b : split_list(o.betas)) betas.push_back(Scalar::parse(b));
    auto rows = beta_sweep(alg, c.weights, betas, truncation_or(o, alg.graph().explicit_index_bound() + 3));
    Report r;
    ojson table = ojson::array();
    bool any_error = false;
    for (const auto& row : rows) {
        ojson j;
        j["beta"] = number(row.beta);
        j["feasible"] = row.feasible;
        j["dimension"] = row.feasible ? ojson(row.dimension) : ojson(nullptr);
        if (row.error) {
            j["error"] = *row.error;
            any_error = true;
        }
        table.push_back(j);
        r.lines.push_back("beta " + row.beta.str() + ": " +
                          (row.error ? "error " + *row.error
                                     : row.feasible ? "feasible, dimension " + std::to_string(row.dimension)
                                                    : std::string("infeasible")));
    }
    r.body["verdict"] = "swept";
    r.body["table"] = table;
    if (any_error) r.code = kExitUsage;
    return r;
}

Report cmd_orbit_check(const Options& o) {
    Context c = load(o);
    BlockMapFile f = parse_block_map(read_file(o.map_file));
    UltragraphDocument target = c.doc;
    if (!f.target.empty()) {
        std::filesystem::path p = f.target;
        if (p.is_relative()) p = std::filesystem::path(o.map_file).parent_path() / p;
        target = load_document(p.string());
    }
    VertexAlgebra src(c.doc.graph), tgt(target.graph);
    OrbitReport rep = check_orbit_equivalence(src, tgt, f.map, o.samples, o.depth, o.seed);
    Report r;
    r.body["verdict"] = rep.all_pass() ? "pass" : "fail";
    r.body["target_digest"] = digest(serialize_document(target));
    r.body["samples"] = rep.samples;
    ojson checks = ojson::array();
    for (const CheckResult* cr : {&rep.coe_identities, &rep.stab_preservation, &rep.eq1, &rep.eq2,
                                  &rep.eventual_conjugacy}) {
        checks.push_back({{"name", cr->name}, {"pass", cr->pass}, {"checked", cr->checked}, {"witnesses", cr->witnesses}});
        r.lines.push_back(cr->name + ": " + (cr->pass ? "pass" : "FAIL") + " (" + std::to_string(cr->checked) +
                          " checked)");
        for (const auto& w : cr->witnesses) r.lines.push_back("  witness " + w);
    }
    r.body["checks"] = checks;
    if (!rep.all_pass()) r.code = kExitNegative;
    return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ultragraph shift-space analyses"};
    app.require_subcommand(1);
    Options o;
    std::string command;
    std::function<Report()> action;

    auto common = [&](CLI::App* sub, const std::string& name, std::function<Report()> fn) {
        sub->add_option("document", o.document, "ultragraph document (JSON)")->required();
        sub->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--tol", o.tol, "tolerance for inexact comparisons");
        sub->add_option("--seed", o.seed, "sampling seed");
        sub->add_option("--depth", o.depth, "finite path depth for sampling");
        sub->add_option("--max-len", o.max_len, "longest cycle searched");
        sub->add_option("--truncation,--truncate", o.truncation, "largest family index materialized");
        sub->add_option("--weight", o.weights, "edge weight override ID=VALUE");
        sub->add_option("--default-weight", o.default_weight, "weight of edges without one");
        sub->callback([&, name, fn] {
            command = name;
            action = fn;
        });
    };

    common(app.add_subcommand("validate", "parse and validate a document"), "validate", [&] { return cmd_validate(o); });
    common(app.add_subcommand("analyze", "sinks, minimal sets and RFUM2"), "analyze", [&] { return cmd_analyze(o); });
    auto* dec = app.add_subcommand("decompose", "split a set into minimal parts");
    common(dec, "decompose", [&] { return cmd_decompose(o); });
    dec->add_option("--set", o.set, "set expression")->required();

    auto* cyl = app.add_subcommand("cylinders", "cylinder arithmetic");
    cyl->require_subcommand(1);
    const std::pair<const char*, const char*> ops[] = {{"intersect", "intersection of two cylinders"},
                                                        {"diff", "a minus b as disjoint cylinders"},
                                                        {"split", "decompose into semiring cylinders"}};
    for (const auto& [op, what] : ops) {
        auto* s = cyl->add_subcommand(op, what);
        std::string name = op;
        common(s, std::string("cylinders ") + op, [&, name] { return cmd_cylinders(o, name); });
        s->add_option("--a", o.a, "cylinder JSON")->required();
        if (name != "split") s->add_option("--b", o.b, "cylinder JSON")->required();
    }

    auto* dyn = app.add_subcommand("dynamics", "cycles, condition L, isolation, stabilizers");
    dyn->require_subcommand(1);
    common(dyn->add_subcommand("cycles", "enumerate cycles and their exits"), "dynamics cycles", [&] { return cmd_cycles(o); });
    common(dyn->add_subcommand("condition-l", "every cycle has an exit"), "dynamics condition-l", [&] { return cmd_condition_l(o); });
    auto* iso = dyn->add_subcommand("isolated", "is a boundary point isolated");
    common(iso, "dynamics isolated", [&] { return cmd_isolated(o); });
    auto* point_opt = iso->add_option("--point", o.point, "point JSON");
    auto* tail_opt = iso->add_option("--tail", o.tail, "family tail JSON {prefix, family, start}");
    point_opt->excludes(tail_opt);
    auto* stab = dyn->add_subcommand("stab", "stabilizer subgroups of a periodic point");
    common(stab, "dynamics stab", [&] { return cmd_stab(o); });
    stab->add_option("--point", o.point, "point JSON")->required();

    auto* kms = app.add_subcommand("kms", "KMS data");
    kms->require_subcommand(1);
    auto* solve = kms->add_subcommand("solve", "solve the KMS conditions at one beta");
    common(solve, "kms solve", [&] { return cmd_kms_solve(o); });
    solve->add_option("--beta", o.beta, "inverse temperature")->required();
    auto* verify = kms->add_subcommand("verify", "check a given m-function");
    common(verify, "kms verify", [&] { return cmd_kms_verify(o); });
    verify->add_option("--beta", o.beta, "inverse temperature")->required();
    verify->add_option("--m", o.m_file, "m function file")->required();

    auto* ground = app.add_subcommand("ground", "ground state data");
    common(ground, "ground", [&] { return cmd_ground(o); });
    ground->add_option("--convention", o.convention, "printed or zero-temperature");

    auto* sweep = app.add_subcommand("sweep", "solve over a list of beta values");
    common(sweep, "sweep", [&] { return cmd_sweep(o); });
    sweep->add_option("--betas", o.betas, "comma-separated beta values")->required();

    auto* orbit = app.add_subcommand("orbit-check", "sample the orbit-equivalence identities of a block map");
    common(orbit, "orbit-check", [&] { return cmd_orbit_check(o); });
    orbit->add_option("--map", o.map_file, "block map file")->required();
    orbit->add_option("--samples", o.samples, "sampled points per side");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        Report r = action();
        ojson j;
        if (o.format == "text") {
            for (const auto& l : r.lines) out << l << "\n";
        } else {
            j["command"] = command;
            j["input_digest"] = digest(serialize_document(load_document(o.document)));
            for (const auto& [k, v] : r.body.items()) j[k] = v;
            out << j.dump(2) << "\n";
        }
        return r.code;
    } catch (const DocumentError& e) {
        err << "error [" << e.code << "]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SizeLimit& e) {
        err << "bound reached: " << e.what() << "\n";
        return kExitUnknown;
    } catch (const NotRfum2& e) {
        err << "not RFUM2: " << e.what() << "\n";
        return kExitNegative;
    } catch (const NotContained& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    } catch (const OutsideDomain& e) {
        err << "error: " << e.what() << "\n";
        return kExitNegative;
    } catch (const NegativeMass& e) {
        err << "negative mass: " << e.what() << "\n";
        return kExitNegative;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace ultra
