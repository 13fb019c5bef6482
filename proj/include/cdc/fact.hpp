#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdc/domain.hpp"
#include "cdc/relation.hpp"
#include "cdc/symbol.hpp"

namespace cdc {

struct IntraArgs {
    ConceptId subject;
    ConceptId object;
    DomainExpr domain;
    friend bool operator==(const IntraArgs&, const IntraArgs&) = default;
};

struct CrossArgs {
    ConceptId left;
    ConceptId right;
    DomainExpr left_domain;
    DomainExpr right_domain;
    friend bool operator==(const CrossArgs&, const CrossArgs&) = default;
};

struct FusionArgs {
    ConceptId left;
    ConceptId right;
    ConceptId fused;
    DomainExpr domain;
    friend bool operator==(const FusionArgs&, const FusionArgs&) = default;
};

// One CDC statement. Equality is structural and orientation-sensitive; use
// canonical() for set semantics under symmetric relations.
struct Fact {
    RelationId relation;
    std::variant<IntraArgs, CrossArgs, FusionArgs> args;

    static Fact intra(RelationId r, ConceptId subject, ConceptId object, DomainExpr domain) {
        return {r, IntraArgs{subject, object, domain}};
    }
    static Fact cross(RelationId r, ConceptId left, ConceptId right, DomainExpr left_domain,
                      DomainExpr right_domain) {
        return {r, CrossArgs{left, right, left_domain, right_domain}};
    }
    static Fact fusion(RelationId r, ConceptId left, ConceptId right, ConceptId fused, DomainExpr domain) {
        return {r, FusionArgs{left, right, fused, domain}};
    }

    RelationShape shape() const noexcept { return static_cast<RelationShape>(args.index()); }
    const IntraArgs* as_intra() const noexcept { return std::get_if<IntraArgs>(&args); }
    const CrossArgs* as_cross() const noexcept { return std::get_if<CrossArgs>(&args); }
    const FusionArgs* as_fusion() const noexcept { return std::get_if<FusionArgs>(&args); }

    // First and second concept arguments, whatever the shape.
    ConceptId subject() const noexcept;
    ConceptId object() const noexcept;
    // Primary domain (left domain for cross facts).
    DomainExpr domain() const noexcept;
    // Every domain the fact lives in: one, or two distinct ones for cross facts.
    std::vector<DomainExpr> domains() const;

    // Same statement with the symmetric arguments swapped.
    Fact reversed() const;

    friend bool operator==(const Fact&, const Fact&) = default;

    std::size_t hash() const noexcept;
};

// Representative used for set semantics: symmetric facts are put into a fixed
// argument order, everything else is returned unchanged.
Fact canonical(const Fact& f, const RelationSpec& spec);

// Total order used for saving and rendering: relation, primary domain text,
// then concepts, then remaining domain text.
bool fact_less(const Fact& a, const Fact& b);
std::strong_ordering fact_compare(const Fact& a, const Fact& b);

// `name(arg, ..., "domain")` without the trailing period. Concepts are quoted
// only when they are not bare atoms.
std::string to_string(const Fact& f);
std::string to_string(const Fact& f, std::string_view relation_name);

// A concept rendered for the native file format.
std::string render_concept(ConceptId c);
bool is_bare_atom(std::string_view text) noexcept;
std::string quote_atom(std::string_view text);

struct FactHash {
    std::size_t operator()(const Fact& f) const noexcept { return f.hash(); }
};

// Relation fixed; everything else optional.
struct FactPattern {
    RelationId relation;
    std::optional<ConceptId> subject;
    std::optional<ConceptId> object;
    std::optional<ConceptId> fused;
    std::optional<DomainExpr> domain;
    std::optional<DomainExpr> right_domain;

    bool matches(const Fact& f) const;
};

}  // namespace cdc

template <>
struct std::hash<cdc::Fact> {
    std::size_t operator()(const cdc::Fact& f) const noexcept { return f.hash(); }
};
