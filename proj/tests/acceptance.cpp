// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdc/consistency.hpp"
#include "cdc/error.hpp"
#include "cdc/inference.hpp"
#include "cdc/kb_io.hpp"
#include "cdc/query.hpp"
#include "cdc/synthetic.hpp"
#include "oracles.hpp"

using namespace cdc;

namespace {

using Clock = std::chrono::steady_clock;
using Rows = std::vector<std::vector<std::string>>;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

FactStore casestudy(const std::string& name) {
    FactStore s;
    auto r = load_builtin_casestudy(s, name);
    if (!r.ok()) throw Error("case study " + name + " does not load: " + r.diagnostics.front().render());
    return s;
}

BindingSet ask(const FactStore& store, const std::string& text) {
    return eval_query(parse_query(text, store.registry()), store);
}

Outcome closure_oracle_equivalence() {
    Outcome o;
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    const std::vector<std::string> relations{"is_a", "part_of", "requires"};
    std::size_t pairs = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto store = oracle::random_dag_kb(rng, relations, {12, 3, 0.3});
        const auto closure = materialize(store);
        for (const auto& rel : relations) {
            FactPattern p{RelationId(star_name(RelationId(rel)))};
            std::map<std::string, std::set<oracle::Edge>> got;
            for (const auto& f : closure.match(p)) got[f.domain().format()].emplace(f.subject().str(), f.object().str());
            for (const auto& d : store.domains(RelationId(rel))) {
                const auto expected = oracle::floyd_warshall(oracle::edges_of(store, rel, d.format()));
                pairs += expected.size();
                if (got[d.format()] != expected) o.fail("trial " + std::to_string(trial) + ": " + rel + " in " + d.format());
                got.erase(d.format());
            }
            if (!got.empty()) o.fail("trial " + std::to_string(trial) + ": star facts in a domain without edges");
        }
    }
    const double secs = seconds_since(start);
    if (secs >= 10.0) o.fail("took " + std::to_string(secs) + " s");
    if (o.pass) o.detail = "200 KBs, " + std::to_string(pairs) + " reachable pairs, " + std::to_string(secs) + " s";
    return o;
}

Outcome domain_separation() {
    Outcome o;
    std::vector<RelationId> intra;
    for (const auto& spec : builtin_registry().all())
        if (spec.shape == RelationShape::intra) intra.push_back(spec.name);

    std::mt19937_64 rng(2002);
    auto word = [&](const char* prefix) { return std::string(prefix) + std::to_string(rng() % 1000); };
    for (int trial = 0; trial < 1000; ++trial) {
        const RelationId r = intra[rng() % intra.size()];
        const std::string c = word("c");
        std::string c1 = word("x"), c2 = word("y");
        const auto d1 = parse_domain(word("D") + "@" + word("s"));
        auto d2 = parse_domain(word("E") + "@" + word("t"));
        FactStore s;
        s.assert_fact(Fact::intra(r, ConceptId(c), ConceptId(c1), d1));
        s.assert_fact(Fact::intra(r, ConceptId(c), ConceptId(c2), d2));
        const auto report = check(s);
        if (!report.ok()) o.fail("trial " + std::to_string(trial) + " reported an error");
        if (report.separation_witnesses.empty()) o.fail("trial " + std::to_string(trial) + " has no witness");
        try {
            (void)materialize(s);
        } catch (const Error& e) {
            o.fail("trial " + std::to_string(trial) + " does not materialize: " + e.what());
        }
        auto in_d1 = ask(s, r.str() + "(" + c + ", ?X, '" + d1.format() + "')").column("?X");
        if (in_d1 != std::vector<std::string>{c1}) o.fail("trial " + std::to_string(trial) + " leaks across domains");
    }

    FactStore apple;
    auto r = load_text(apple, "is_a(Apple, Fruit, 'Biology@Plant_Taxonomy').\n"
                              "is_a(Apple, Company, 'Business@Technology_Industry').\n");
    const auto report = check(apple);
    if (!r.ok() || !report.ok() || report.separation_witnesses.size() != 1) o.fail("Apple KB");
    if (o.pass) o.detail = "1000 trials plus the Apple KB, 0 errors, witnesses in every trial";
    return o;
}

Outcome acyclicity_detection() {
    Outcome o;
    std::mt19937_64 rng(3003);
    const std::vector<std::string> relations{"requires", "is_a", "evolves_to"};
    std::size_t walks = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::string rel = relations[trial % relations.size()];
        auto s = oracle::random_dag_kb(rng, {rel}, {12, 1, 0.3});
        const std::size_t len = 2 + rng() % 5;
        std::vector<std::string> pool;
        for (int i = 0; i < 12; ++i) pool.push_back("c" + std::to_string(i));
        std::shuffle(pool.begin(), pool.end(), rng);
        const auto domain = parse_domain("dom0@sub");
        for (std::size_t i = 0; i < len; ++i)
            s.assert_fact(Fact::intra(RelationId(rel), ConceptId(pool[i]), ConceptId(pool[(i + 1) % len]), domain));
        const auto edges = oracle::edges_of(s, rel, "dom0@sub");
        const std::string tag = "trial " + std::to_string(trial) + " (" + rel + ", length " + std::to_string(len) + ")";

        const auto report = check(s);
        if (report.ok()) o.fail(tag + ": check missed the cycle");
        for (const auto& v : report.errors) {
            std::vector<std::string> walk;
            for (auto c : v.cycle) walk.push_back(c.str());
            if (!oracle::is_closed_walk(walk, edges)) o.fail(tag + ": reported walk is not made of stored edges");
            ++walks;
        }
        try {
            (void)materialize(s);
            o.fail(tag + ": materialize accepted a cycle");
        } catch (const CycleError& e) {
            if (!oracle::is_closed_walk(e.cycle(), edges)) o.fail(tag + ": CycleError walk is not made of stored edges");
        }
    }
    if (o.pass) o.detail = "500 injected cycles, " + std::to_string(walks) + " closed walks verified";
    return o;
}

Outcome inheritance_correctness() {
    Outcome o;
    std::mt19937_64 rng(4004);
    std::size_t checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto s = oracle::random_dag_kb(rng, {"is_a"}, {12, 2, 0.3});
        std::uniform_int_distribution<int> pick(0, 11);
        const auto domains = s.domains(RelationId("is_a"));
        for (const auto& d : domains)
            for (int i = 0, n = 1 + pick(rng); i < n; ++i)
                s.assert_fact(Fact::intra(RelationId("has_attribute"), ConceptId("c" + std::to_string(pick(rng))),
                                          ConceptId("a" + std::to_string(pick(rng))), d));
        for (const auto& d : domains) {
            const auto carrier = oracle::edges_of(s, "is_a", d.format());
            const auto attrs = oracle::edges_of(s, "has_attribute", d.format());
            for (int i = 0; i < 12; ++i) {
                const std::string c = "c" + std::to_string(i);
                std::set<std::pair<std::string, std::string>> got;
                for (const auto& a : inherited_attributes(s, ConceptId(c), d))
                    got.emplace(a.attribute.str(), a.source.str());
                if (got != oracle::inherited(carrier, attrs, c))
                    o.fail("trial " + std::to_string(trial) + ": " + c + " in " + d.format());
                ++checked;
            }
        }
    }
    if (o.pass) o.detail = "200 hierarchies, " + std::to_string(checked) + " concept/domain pairs";
    return o;
}

Outcome partition_scan_reduction() {
    Outcome o;
    SyntheticConfig config;
    config.facts = 10000;
    config.domains = 50;
    const auto r = run_scan_bench(config);
    std::ostringstream detail;
    detail << "reduction " << r.reduction_factor << "x, materialize " << r.materialize_ms << " ms";
    if (r.reduction_factor < 40.0) o.fail(detail.str());
    if (r.materialize_ms >= 5000.0) o.fail(detail.str());
    if (o.pass) o.detail = detail.str();
    return o;
}

Outcome golden_queries() {
    Outcome o;
    const auto education = casestudy("education");
    const auto enterprise = casestudy("enterprise");
    const auto techdocs = casestudy("techdocs");
    struct Golden {
        const FactStore* store;
        std::string query;
        Rows expected;
    };
    const std::vector<Golden> goldens{
        {&education, "is_a_star(quadratic_function, ?S, \"math@algebra\")", {{"function"}, {"polynomial_function"}}},
        {&education, "all_prerequisites(calculus, highschool, ?P)", {{"algebra"}, {"arithmetic"}}},
        {&education, "requires_star(calculus, ?P, \"highschool\")", {{"algebra"}, {"arithmetic"}}},
        {&education, "analogous_to(neural_network, ?C, \"ai@ml\", ?D)", {{"biological_brain", "biology@neuroscience"}}},
        {&education, "strategy(explain_function, ?S, \"math_background@cs\")", {{"use_formal_definition"}}},
        {&education, "strategy(explain_function, ?S, \"design_background@cs\")", {{"use_workflow_metaphor"}}},
        {&enterprise, "analogous_to(user_story, ?X, ?D1, ?D2)",
         {{"functional_requirement", "product@requirements", "engineering@specs"}}},
        {&enterprise, "analogous_to(functional_requirement, ?X, ?D1, ?D2)",
         {{"user_story", "engineering@specs", "product@requirements"}}},
        {&techdocs, "evolves_to_star(class_component, ?X, \"react@paradigm_shift\")", {{"functional_component"}}},
    };
    for (const auto& g : goldens) {
        const auto first = ask(*g.store, g.query).solutions;
        const auto again = ask(*g.store, g.query).solutions;
        if (first != g.expected) o.fail(g.query);
        if (first != again) o.fail(g.query + " is not deterministic");
    }
    const auto order = all_prerequisites(education, ConceptId("calculus"), parse_domain("highschool"));
    if (order != std::vector<ConceptId>{ConceptId("arithmetic"), ConceptId("algebra")}) o.fail("prerequisite order");
    if (o.pass) o.detail = std::to_string(goldens.size()) + " queries plus the prerequisite order";
    return o;
}

Outcome round_trip_and_interop() {
    Outcome o;
    std::size_t facts = 0;
    for (const auto& name : casestudy_names()) {
        const auto original = casestudy(name);
        FactStore reloaded;
        if (!load_text(reloaded, save_text(original)).ok() || !(reloaded == original)) o.fail(name + ": save/load");

        FactStore reread(original.registry());
        const auto r = load_text(reread, export_interop_text(original), name + ".pl", Dialect::prolog);
        if (!r.ok()) o.fail(name + ": export does not re-parse: " + r.diagnostics.front().render());
        if (reread.size() != original.size() ||
            oracle::lowercased_fact_texts(reread) != oracle::lowercased_fact_texts(original))
            o.fail(name + ": export lost facts");
        facts += original.size();
    }
    if (o.pass) o.detail = "4 KBs, " + std::to_string(facts) + " facts recovered";
    return o;
}

Outcome symmetric_completion() {
    Outcome o;
    std::vector<FactStore> stores;
    for (const auto& name : casestudy_names()) stores.push_back(casestudy(name));
    FactStore polysemy;
    if (!load_file(polysemy, CDC_DATA_DIR "/polysemy.cdc").ok()) o.fail("polysemy.cdc does not load");
    stores.push_back(std::move(polysemy));

    std::size_t reversed = 0;
    for (const auto& s : stores) {
        for (const Fact& f : s.facts()) {
            const auto* c = f.as_cross();
            if (!c || f.relation != RelationId("analogous_to")) continue;
            const std::string q = "analogous_to(" + prolog_atom(c->right.str()) + ", ?X, '" + c->right_domain.format() +
                                  "', '" + c->left_domain.format() + "')";
            const auto column = ask(s, q).column("?X");
            if (std::find(column.begin(), column.end(), c->left.str()) == column.end()) o.fail(q);
            ++reversed;
        }
        if (!(materialize(s) == materialize(s))) o.fail("materialize is not idempotent");
    }
    if (o.pass) o.detail = std::to_string(reversed) + " reversed analogies, idempotent on " +
                           std::to_string(stores.size()) + " KBs";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"closure matches Floyd-Warshall oracle", closure_oracle_equivalence},
        {"domain separation", domain_separation},
        {"cycle detection", acyclicity_detection},
        {"attribute inheritance", inheritance_correctness},
        {"partition scan reduction", partition_scan_reduction},
        {"golden queries", golden_queries},
        {"round trip and interop", round_trip_and_interop},
        {"symmetric completion", symmetric_completion},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
