#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cdc/consistency.hpp"
#include "cdc/error.hpp"
#include "cdc/inference.hpp"
#include "cdc/kb_io.hpp"
#include "oracles.hpp"

using namespace cdc;

namespace {

constexpr const char* kApple = R"(is_a(Apple, Fruit, 'Biology@Plant_Taxonomy').
is_a(Apple, Company, 'Business@Technology_Industry').
)";

Fact intra(const char* r, const char* a, const char* b, const char* d) {
    return Fact::intra(RelationId(r), ConceptId(a), ConceptId(b), parse_domain(d));
}

}  // namespace

TEST(Consistency, AppleIsConsistentWithOneWitness) {
    auto s = oracle::load_or_die(kApple);
    auto r = check(s);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.warnings.empty());
    ASSERT_EQ(r.separation_witnesses.size(), 1u);
    const auto& w = r.separation_witnesses[0];
    EXPECT_EQ(w.subject.str(), "Apple");
    EXPECT_EQ(w.object1.str(), "Fruit");
    EXPECT_EQ(w.domain1.format(), "Biology@Plant_Taxonomy");
    EXPECT_EQ(w.object2.str(), "Company");
    EXPECT_EQ(w.domain2.format(), "Business@Technology_Industry");
    EXPECT_NO_THROW(materialize(s));
}

TEST(Consistency, PolysemyFileHasFourWitnesses) {
    FactStore s;
    auto r = load_file(s, CDC_DATA_DIR "/polysemy.cdc");
    ASSERT_TRUE(r.ok());
    auto report = check(s);
    EXPECT_TRUE(report.ok());
    EXPECT_EQ(report.separation_witnesses.size(), 4u);
}

TEST(Consistency, BundledCaseStudiesAreClean) {
    for (const auto& name : casestudy_names()) {
        FactStore s;
        ASSERT_TRUE(load_builtin_casestudy(s, name).ok()) << name;
        EXPECT_TRUE(check(s).ok()) << name;
    }
}

TEST(Consistency, TwoCycleIsReported) {
    FactStore s;
    s.assert_fact(intra("is_a", "a", "b", "d"));
    s.assert_fact(intra("is_a", "b", "a", "d"));
    auto r = check(s);
    ASSERT_EQ(r.errors.size(), 1u);
    const auto& v = r.errors[0];
    EXPECT_EQ(v.kind, Violation::Kind::cycle);
    ASSERT_EQ(v.cycle.size(), 3u);
    EXPECT_EQ(v.cycle.front(), v.cycle.back());
    EXPECT_EQ(v.facts.size(), 2u);
    for (const auto& f : v.facts) EXPECT_TRUE(s.contains(f));
    EXPECT_EQ(v.description, "cycle in acyclic relation is_a within \"d\": a -> b -> a");
}

TEST(Consistency, SelfLoopIsIrreflexiveViolation) {
    FactStore s;
    s.assert_fact(intra("requires", "x", "x", "d"));
    auto r = check(s);
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].kind, Violation::Kind::irreflexive);
    EXPECT_EQ(r.errors[0].facts, std::vector<Fact>{intra("requires", "x", "x", "d")});
}

TEST(Consistency, CyclesInDifferentDomainsAreSeparate) {
    FactStore s;
    s.assert_fact(intra("is_a", "a", "b", "one"));
    s.assert_fact(intra("is_a", "b", "a", "two"));
    EXPECT_TRUE(check(s).ok());
    s.assert_fact(intra("is_a", "b", "a", "one"));
    EXPECT_EQ(check(s).errors.size(), 1u);
}

TEST(Consistency, InjectedCyclesAreClosedWalksOfStoredEdges) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = oracle::random_dag_kb(rng, {"requires"}, {10, 1, 0.3});
        const std::size_t len = 2 + rng() % 5;
        std::vector<std::string> ring;
        for (std::size_t i = 0; i < len; ++i) ring.push_back("r" + std::to_string(i));
        for (std::size_t i = 0; i < len; ++i)
            s.assert_fact(Fact::intra(RelationId("requires"), ConceptId(ring[i]), ConceptId(ring[(i + 1) % len]),
                                      parse_domain("dom0@sub")));
        auto r = check(s);
        ASSERT_FALSE(r.ok());
        const auto edges = oracle::edges_of(s, "requires", "dom0@sub");
        for (const auto& v : r.errors) {
            std::vector<std::string> walk;
            for (auto c : v.cycle) walk.push_back(c.str());
            EXPECT_TRUE(oracle::is_closed_walk(walk, edges));
        }
    }
}

TEST(Consistency, DomainLints) {
    FactStore s;
    s.assert_fact(intra("is_a", "a", "b", "Biology"));
    s.assert_fact(intra("is_a", "a", "c", "biology"));
    s.assert_fact(intra("is_a", "a", "e", "Biolgy"));
    s.assert_fact(intra("is_a", "z", "y", "Astronomy"));
    auto r = check(s);
    EXPECT_TRUE(r.ok());
    std::size_t case_variants = 0, near = 0;
    for (const auto& l : r.warnings) {
        if (l.kind == Lint::Kind::case_variant_domain) ++case_variants;
        if (l.kind == Lint::Kind::near_duplicate_domain) ++near;
        EXPECT_EQ(l.subjects.size(), 2u);
    }
    EXPECT_EQ(case_variants, 1u);
    EXPECT_EQ(near, 2u);
}

TEST(Consistency, EditDistance) {
    EXPECT_EQ(edit_distance("", ""), 0u);
    EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
    EXPECT_EQ(edit_distance("abc", ""), 3u);
    EXPECT_EQ(edit_distance("flaw", "lawn"), 2u);
}

TEST(Consistency, CheckDoesNotMutateStore) {
    FactStore s;
    s.assert_fact(intra("is_a", "a", "b", "d"));
    s.assert_fact(intra("is_a", "b", "a", "d"));
    const FactStore before = s;
    const auto g = s.generation();
    (void)check(s);
    EXPECT_EQ(s, before);
    EXPECT_EQ(s.generation(), g);
}

TEST(Consistency, ReportIsDeterministic) {
    std::mt19937_64 rng(5);
    auto s = oracle::random_dag_kb(rng, {"is_a", "requires"});
    s.assert_fact(intra("is_a", "c0", "c0", "dom0@sub"));
    EXPECT_EQ(render_text(check(s)), render_text(check(FactStore(s))));
}

TEST(Consistency, RenderTextAndJson) {
    FactStore s;
    s.assert_fact(intra("is_a", "a", "b", "d"));
    s.assert_fact(intra("is_a", "b", "a", "d"));
    s.assert_fact(intra("is_a", "a", "c", "e"));
    auto r = check(s);
    auto text = render_text(r);
    EXPECT_NE(text.find("error: cycle in acyclic relation is_a"), std::string::npos);
    EXPECT_NE(text.find("1 error(s), 1 warning(s), 1 separation witness(es)"), std::string::npos);

    std::istringstream lines(render_json_lines(r));
    std::string line;
    std::size_t records = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("type"));
        ++records;
    }
    EXPECT_EQ(records, 3u);
}

// A concept categorized differently in two domains never sees the other
// domain's categories through a domain-scoped closure.
TEST(Consistency, SeparationWitnessesStayPartitioned) {
    auto s = oracle::load_or_die(kApple);
    auto closure = materialize(s);
    for (const auto& w : check(s).separation_witnesses) {
        auto in1 = reachable_star(closure, s, w.relation, w.subject, w.domain1);
        auto in2 = reachable_star(closure, s, w.relation, w.subject, w.domain2);
        EXPECT_EQ(std::count(in1.begin(), in1.end(), w.object2), 0);
        EXPECT_EQ(std::count(in2.begin(), in2.end(), w.object1), 0);
    }
}
