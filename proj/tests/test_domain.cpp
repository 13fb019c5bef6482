#include <random>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "cdc/domain.hpp"
#include "cdc/error.hpp"

using namespace cdc;

namespace {

std::size_t parse_error_offset(std::string_view text) {
    try {
        (void)parse_domain(text);
    } catch (const DomainParseError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "no error for \"" << text << "\"";
    return 0;
}

std::string random_atom(std::mt19937_64& rng) {
    static const std::string start = "abcXYZ019_";
    static const std::string rest = "abcXYZ019_.-";
    std::uniform_int_distribution<std::size_t> len(0, 4);
    std::string out(1, start[rng() % start.size()]);
    for (std::size_t i = len(rng); i > 0; --i) out += rest[rng() % rest.size()];
    return out;
}

}  // namespace

TEST(Domain, ParsesSegmentsOutermostFirst) {
    auto d = parse_domain("HighSchool@Math@Calculus");
    ASSERT_EQ(d.depth(), 3u);
    EXPECT_EQ(d.segments()[0].atoms(), std::vector<std::string>{"HighSchool"});
    EXPECT_EQ(d.segments()[2].atoms(), std::vector<std::string>{"Calculus"});
    EXPECT_EQ(d.format(), "HighSchool@Math@Calculus");
}

TEST(Domain, FusionIsCanonicalizedAsASet) {
    auto a = parse_domain("product+engineering");
    auto b = parse_domain("engineering+product");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.format(), "engineering+product");
    EXPECT_EQ(a.source(), "product+engineering");
    EXPECT_EQ(a.segments()[0].kind(), DomainSegment::Kind::fusion);
    EXPECT_EQ(parse_domain("x+x+y"), parse_domain("y+x"));
    EXPECT_EQ(parse_domain("product+engineering@mobile").format(), "engineering+product@mobile");
}

TEST(Domain, AtomsMayContainDotsAndDashes) {
    EXPECT_EQ(parse_domain("react@pre16.8").segments()[1].atoms()[0], "pre16.8");
    EXPECT_EQ(parse_domain("a-b.c").depth(), 1u);
    EXPECT_EQ(parse_domain("0.85").format(), "0.85");
}

TEST(Domain, RejectsMalformedTextWithOffsets) {
    EXPECT_EQ(parse_error_offset(""), 0u);
    EXPECT_EQ(parse_error_offset("@a"), 0u);
    EXPECT_EQ(parse_error_offset("a@"), 2u);
    EXPECT_EQ(parse_error_offset("a@@b"), 2u);
    EXPECT_EQ(parse_error_offset("a+@b"), 2u);
    EXPECT_EQ(parse_error_offset("react@16.8+@hooks"), 11u);
    EXPECT_EQ(parse_error_offset("a b"), 1u);
    EXPECT_EQ(parse_error_offset("a@.b"), 2u);
    EXPECT_EQ(parse_error_offset("Student Zhang"), 7u);
}

TEST(Domain, ErrorMessageNamesOffset) {
    try {
        (void)parse_domain("a@@b");
        FAIL();
    } catch (const DomainParseError& e) {
        EXPECT_STREQ(e.what(), "empty segment at offset 2");
    }
}

TEST(Domain, PrefixIsSegmentWise) {
    auto math = parse_domain("math");
    auto algebra = parse_domain("math@algebra");
    EXPECT_TRUE(is_prefix_of(math, algebra));
    EXPECT_TRUE(is_prefix_of(algebra, algebra));
    EXPECT_FALSE(is_prefix_of(algebra, math));
    EXPECT_FALSE(is_prefix_of(parse_domain("mat"), algebra));
    EXPECT_TRUE(is_prefix_of(parse_domain("b+a"), parse_domain("a+b@x")));
}

TEST(Domain, RefineAppendsSegments) {
    auto d = parse_domain("math").refine(parse_domain("algebra@linear"));
    EXPECT_EQ(d, parse_domain("math@algebra@linear"));
}

TEST(Domain, FuseIsCommutativeAndFlat) {
    auto p = parse_domain("product");
    auto e = parse_domain("engineering");
    EXPECT_EQ(fuse(p, e), fuse(e, p));
    EXPECT_EQ(fuse(p, e), parse_domain("engineering+product"));
    EXPECT_EQ(fuse(parse_domain("a+b"), parse_domain("c")), parse_domain("a+b+c"));
}

TEST(Domain, FuseOfPathsUsesOpaqueAtoms) {
    auto d = fuse(parse_domain("cs@ml"), parse_domain("biology"));
    EXPECT_EQ(d.depth(), 1u);
    EXPECT_EQ(d.format(), "biology+cs.ml");
    EXPECT_EQ(opaque_atom(parse_domain("a+b@c")), "a-b.c");
    EXPECT_EQ(fuse(parse_domain("cs@ml"), parse_domain("biology")), fuse(parse_domain("biology"), parse_domain("cs@ml")));
}

TEST(Domain, OrderingFollowsCanonicalText) {
    EXPECT_LT(parse_domain("a@b"), parse_domain("a@c"));
    EXPECT_LT(parse_domain("A"), parse_domain("a"));
    EXPECT_EQ(parse_domain("b+a") <=> parse_domain("a+b"), std::strong_ordering::equal);
}

TEST(Domain, FormatParseRoundTripProperty) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const std::size_t segments = 1 + rng() % 4;
        for (std::size_t s = 0; s < segments; ++s) {
            if (s) text += '@';
            const std::size_t atoms = 1 + rng() % 3;
            for (std::size_t a = 0; a < atoms; ++a) {
                if (a) text += '+';
                text += random_atom(rng);
            }
        }
        const auto d = parse_domain(text);
        EXPECT_EQ(parse_domain(d.format()), d) << text;
        EXPECT_EQ(parse_domain(d.format()).format(), d.format()) << text;
        EXPECT_EQ(d.source(), text);
    }
}

TEST(Domain, InterningIsThreadSafe) {
    std::vector<std::thread> threads;
    std::vector<std::vector<DomainExpr>> results(4);
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([t, &results] {
            for (int i = 0; i < 200; ++i) results[t].push_back(parse_domain("d" + std::to_string(i) + "@x+y"));
        });
    }
    for (auto& th : threads) th.join();
    for (int t = 1; t < 4; ++t) EXPECT_EQ(results[t], results[0]);
}
