#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cdc/error.hpp"
#include "cdc/kb_io.hpp"
#include "cdc/query.hpp"
#include "oracles.hpp"

using namespace cdc;

namespace {

using Rows = std::vector<std::vector<std::string>>;

BindingSet run(const FactStore& store, std::string_view text, DomainMatch match = DomainMatch::exact,
               FactSource source = FactSource::all) {
    Query q = parse_query(text, store.registry());
    q.domain_match = match;
    q.source = source;
    return eval_query(q, store, nullptr);
}

std::size_t error_offset(std::string_view text) {
    try {
        (void)parse_query(text);
    } catch (const QueryError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "no error for " << text;
    return 0;
}

std::string error_message(std::string_view text) {
    try {
        (void)parse_query(text);
    } catch (const QueryError& e) {
        return e.what();
    }
    return {};
}

FactStore education() {
    FactStore s;
    load_builtin_casestudy(s, "education");
    return s;
}

}  // namespace

TEST(QueryParse, ExampleForms) {
    auto q = parse_query("?- is_a_star(quadratic_function, ?X, \"math@algebra\").");
    EXPECT_EQ(q.goal_kind, Query::Goal::star);
    EXPECT_EQ(q.relation, RelationId("is_a"));
    ASSERT_EQ(q.args.size(), 3u);
    EXPECT_EQ(q.args[1].kind, QueryTerm::Kind::variable);
    EXPECT_EQ(q.args[2].kind, QueryTerm::Kind::domain_literal);
    EXPECT_EQ(q.args[2].text, "math@algebra");
    EXPECT_EQ(q.variables(), std::vector<std::string>{"?X"});

    auto p = parse_query("all_prerequisites(calculus, highschool, ?P)");
    EXPECT_EQ(p.goal_kind, Query::Goal::all_prerequisites);
    EXPECT_EQ(p.args[1].kind, QueryTerm::Kind::constant);

    auto a = parse_query("analogous_to(?A, ?B, ?D1, 'biology@neuroscience')");
    EXPECT_EQ(a.goal_kind, Query::Goal::relation);
    EXPECT_EQ(a.variables(), (std::vector<std::string>{"?A", "?B", "?D1"}));

    EXPECT_EQ(parse_query("inherited_attributes(x, d, ?A, ?S)").goal_kind, Query::Goal::inherited_attributes);
    EXPECT_EQ(parse_query("analogy_search(x, ?C, ?D1, ?D2)").goal_kind, Query::Goal::analogy_search);
    EXPECT_EQ(parse_query("is_a('Student Zhang', ?X, ?D)").args[0].text, "Student Zhang");
    EXPECT_EQ(parse_query("is_a(x, ?X, 'react@pre16.8')").args[2].text, "react@pre16.8");
}

TEST(QueryParse, ErrorsCarryOffsets) {
    EXPECT_EQ(error_offset("nope(a, ?X, \"d\")"), 0u);
    EXPECT_EQ(error_message("nope(a, ?X, \"d\")"), "unknown goal 'nope'");
    EXPECT_EQ(error_offset("  is_a(a, ?X)"), 2u);
    EXPECT_EQ(error_message("is_a(a, ?X)"), "is_a expects 3 arguments, got 2");
    EXPECT_EQ(error_offset("is_a(a, ?X, \"x@@y\")"), 15u);
    EXPECT_EQ(error_offset("is_a(\"a\", ?X, d)"), 5u);
    EXPECT_EQ(error_offset("is_a(?D, ?X, ?D)"), 13u);
    EXPECT_EQ(error_offset("is_a(a, ?X, d) extra"), 15u);
    EXPECT_EQ(error_offset("is_a(a, ?, d)"), 8u);
    EXPECT_EQ(error_offset("is_a(a, 'open, d)"), 8u);
    EXPECT_EQ(error_offset("is_a(a, ?X, d"), 13u);
    EXPECT_EQ(error_offset("contrasts_with_star(a, ?X, d)"), 0u);
}

TEST(QueryEval, AppleIsScopedByDomain) {
    auto s = oracle::load_or_die("is_a(Apple, Fruit, 'Biology@Plant_Taxonomy').\n"
                                 "is_a(Apple, Company, 'Business@Technology_Industry').\n");
    EXPECT_EQ(run(s, "is_a(Apple, ?X, \"Biology@Plant_Taxonomy\")").column("?X"), std::vector<std::string>{"Fruit"});
    EXPECT_EQ(run(s, "is_a(Apple, ?X, \"Business@Technology_Industry\")").column("?X"),
              std::vector<std::string>{"Company"});
    EXPECT_EQ(run(s, "is_a(Apple, ?X, ?D)").solutions,
              (Rows{{"Company", "Business@Technology_Industry"}, {"Fruit", "Biology@Plant_Taxonomy"}}));
    EXPECT_TRUE(run(s, "is_a(Apple, ?X, \"Biology\")").empty());
    EXPECT_EQ(run(s, "is_a(Apple, ?X, \"Biology@Plant_Taxonomy@Fruits\")", DomainMatch::prefix).column("?X"),
              std::vector<std::string>{"Fruit"});
}

TEST(QueryEval, GoldenQueriesOnBundledKbs) {
    auto s = education();
    EXPECT_EQ(run(s, "is_a_star(quadratic_function, ?X, \"math@algebra\")").column("?X"),
              (std::vector<std::string>{"function", "polynomial_function"}));
    EXPECT_EQ(run(s, "all_prerequisites(calculus, highschool, ?P)").column("?P"),
              (std::vector<std::string>{"algebra", "arithmetic"}));
    EXPECT_EQ(run(s, "strategy(explain_function, ?S, \"math_background@cs\")").column("?S"),
              std::vector<std::string>{"use_formal_definition"});
    EXPECT_EQ(run(s, "analogous_to(neural_network, ?B, ?D1, ?D2)").solutions,
              (Rows{{"biological_brain", "ai@ml", "biology@neuroscience"}}));

    auto e = oracle::load_or_die(casestudy_text("enterprise"));
    EXPECT_EQ(run(e, "analogous_to(user_story, ?X, ?D1, ?D2)").solutions,
              (Rows{{"functional_requirement", "product@requirements", "engineering@specs"}}));
    EXPECT_EQ(run(e, "analogous_to(functional_requirement, ?X, ?D1, ?D2)").solutions,
              (Rows{{"user_story", "engineering@specs", "product@requirements"}}));
    EXPECT_EQ(run(e, "fuses_with(?A, ?B, ?F, \"engineering+product\")").column("?F"),
              (std::vector<std::string>{"integrated_product_spec", "integrated_product_spec"}));

    auto t = oracle::load_or_die(casestudy_text("techdocs"));
    EXPECT_EQ(run(t, "evolves_to_star(class_component, ?X, \"react@paradigm_shift\")").column("?X"),
              std::vector<std::string>{"functional_component"});
}

TEST(QueryEval, GroundQueriesAnswerTrueOrFalse) {
    auto s = education();
    auto yes = run(s, "is_a_star(quadratic_function, function, 'math@algebra')");
    EXPECT_EQ(yes.size(), 1u);
    EXPECT_EQ(render_text(yes), "true.\n");
    auto no = run(s, "is_a_star(function, quadratic_function, 'math@algebra')");
    EXPECT_TRUE(no.empty());
    EXPECT_EQ(render_text(no), "false.\n");
}

TEST(QueryEval, AssertedSourceSkipsDerivedFacts) {
    auto s = education();
    auto all = run(s, "is_a_star(quadratic_function, ?X, \"math@algebra\")");
    auto asserted = run(s, "is_a_star(quadratic_function, ?X, \"math@algebra\")", DomainMatch::exact,
                        FactSource::asserted);
    EXPECT_EQ(asserted.column("?X"), std::vector<std::string>{"polynomial_function"});
    EXPECT_EQ(all.size(), 2u);
}

TEST(QueryEval, RequiresStarAndAllPrerequisitesAgreeAsSets) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = oracle::random_dag_kb(rng, {"requires"}, {8, 2, 0.4});
        for (const auto& d : s.domains(RelationId("requires"))) {
            for (int i = 0; i < 8; ++i) {
                const std::string c = "c" + std::to_string(i);
                auto star = run(s, "requires_star(" + c + ", ?P, '" + d.format() + "')").column("?P");
                auto pre = run(s, "all_prerequisites(" + c + ", '" + d.format() + "', ?P)").column("?P");
                std::sort(star.begin(), star.end());
                std::sort(pre.begin(), pre.end());
                EXPECT_EQ(star, pre);
            }
        }
    }
}

TEST(QueryEval, AssertedIsSubsetOfAllAndExactOfPrefix) {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = oracle::random_dag_kb(rng, {"is_a", "has_attribute"}, {8, 3, 0.4});
        s.assert_fact(Fact::intra(RelationId("is_a"), ConceptId("c0"), ConceptId("top"), parse_domain("dom0")));
        for (const char* text : {"is_a(?X, ?Y, 'dom0@sub')", "is_a_star(?X, ?Y, 'dom1@sub')",
                                 "has_attribute(?X, ?Y, 'dom2@sub')", "is_a_star(c0, ?Y, ?D)"}) {
            auto all = run(s, text).solutions;
            auto asserted = run(s, text, DomainMatch::exact, FactSource::asserted).solutions;
            auto prefix = run(s, text, DomainMatch::prefix).solutions;
            EXPECT_TRUE(std::includes(all.begin(), all.end(), asserted.begin(), asserted.end())) << text;
            EXPECT_TRUE(std::includes(prefix.begin(), prefix.end(), all.begin(), all.end())) << text;
        }
        auto exact = run(s, "is_a(c0, ?Y, 'dom0@sub')").column("?Y");
        auto prefix = run(s, "is_a(c0, ?Y, 'dom0@sub')", DomainMatch::prefix).column("?Y");
        EXPECT_NE(std::find(prefix.begin(), prefix.end(), "top"), prefix.end());
        EXPECT_EQ(std::find(exact.begin(), exact.end(), "top"), exact.end());
    }
}

TEST(QueryEval, EmptyStoreAnswersNothing) {
    FactStore s;
    for (const char* text : {"is_a(?X, ?Y, ?D)", "is_a_star(a, ?Y, d)", "all_prerequisites(a, d, ?P)",
                             "inherited_attributes(a, d, ?A, ?S)", "analogy_search(a, ?C, ?D1, ?D2)"})
        EXPECT_TRUE(run(s, text).empty()) << text;
}

TEST(QueryEval, InheritedAttributesAndAnalogyGoals) {
    auto s = oracle::load_or_die("is_a(dog, mammal, zoo).\nis_a(mammal, animal, zoo).\n"
                                 "has_attribute(mammal, fur, zoo).\nhas_attribute(animal, alive, zoo).\n"
                                 "has_attribute(dog, barks, zoo).\n"
                                 "analogous_to(Atom, Solar_System, 'Physics@Atomic', 'Astronomy@Planetary').\n");
    EXPECT_EQ(run(s, "inherited_attributes(dog, zoo, ?A, ?S)").solutions,
              (Rows{{"alive", "animal"}, {"barks", "dog"}, {"fur", "mammal"}}));
    EXPECT_EQ(run(s, "has_attribute(dog, ?A, zoo)").column("?A"),
              (std::vector<std::string>{"alive", "barks", "fur"}));
    EXPECT_EQ(run(s, "analogy_search(Atom, ?C, ?D1, ?D2)").solutions,
              (Rows{{"Solar_System", "Physics@Atomic", "Astronomy@Planetary"}}));
    EXPECT_EQ(run(s, "analogy_search(Solar_System, ?C, ?D1, ?D2)").solutions,
              (Rows{{"Atom", "Astronomy@Planetary", "Physics@Atomic"}}));
}

TEST(QueryEval, RepeatedVariablesUnify) {
    FactStore s;
    RelationSpec near{RelationId("near"), RelationShape::intra};
    near.reflexive = true;
    s.register_relation(near);
    s.assert_fact(Fact::intra(RelationId("near"), ConceptId("a"), ConceptId("b"), parse_domain("d")));
    EXPECT_EQ(run(s, "near(?X, ?X, d)").column("?X"), (std::vector<std::string>{"a", "b"}));
}

TEST(QueryEval, StrictModeNeedsCurrentClosure) {
    auto s = education();
    auto q = parse_query("is_a_star(quadratic_function, ?X, \"math@algebra\")");
    EXPECT_THROW(eval_query(q, s, nullptr, true), QueryError);
    auto closure = materialize(s);
    EXPECT_EQ(eval_query(q, s, &closure, true).size(), 2u);
    s.assert_fact(Fact::intra(RelationId("is_a"), ConceptId("x"), ConceptId("y"), parse_domain("d")));
    EXPECT_THROW(eval_query(q, s, &closure, true), QueryError);
    EXPECT_EQ(eval_query(q, s, &closure, false).size(), 2u);
    auto plain = parse_query("is_a(quadratic_function, ?X, \"math@algebra\")");
    EXPECT_NO_THROW(eval_query(plain, s, nullptr, true));
}

TEST(QueryEval, UnregisteredRelationInStore) {
    FactStore s;
    RelationSpec r{RelationId("patient"), RelationShape::intra};
    s.register_relation(r);
    auto q = parse_query("patient(?X, ?Y, ?D)", s.registry());
    FactStore other;
    EXPECT_THROW(eval_query(q, other), QueryError);
}

TEST(QueryRender, JsonLines) {
    auto s = education();
    auto text = render_json_lines(run(s, "is_a_star(quadratic_function, ?X, ?D)"));
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> xs;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        xs.push_back(j.at("?X").get<std::string>());
        EXPECT_EQ(j.at("?D"), "math@algebra");
    }
    EXPECT_EQ(xs, (std::vector<std::string>{"function", "polynomial_function"}));
    EXPECT_EQ(render_text(run(s, "is_a(quadratic_function, ?X, ?D)")),
              "?X = polynomial_function, ?D = math@algebra\n");
}
