#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdc/fact.hpp"
#include "cdc/fact_store.hpp"

namespace cdc {

// Rules the engine applies, per domain:
//   star_base   R*(x, y, d) <- R(x, y, d)                 R transitive
//   star_step   R*(x, z, d) <- R(x, y, d), R*(y, z, d)    R transitive
//   symmetric   R(y, x, ...) <- R(x, y, ...)              R symmetric (any shape)
//   reflexive   R(x, x, d) <- x occurs in some R(., ., d)  R reflexive
//   inherit     A(x, a, d) <- C(x, y, d), A(y, a, d)      A inherits via C
enum class Rule : std::uint8_t { star_base, star_step, symmetric, reflexive, inherit };

std::string_view rule_name(Rule rule) noexcept;

struct Premise {
    Fact fact;
    // false: an asserted fact; true: another entry of the closure.
    bool derived = false;
    friend bool operator==(const Premise&, const Premise&) = default;
};

// Star facts carry the closure relation name, e.g. `is_a_star`.
struct DerivedFact {
    Fact fact;
    Rule rule;
    std::vector<Premise> premises;
    friend bool operator==(const DerivedFact&, const DerivedFact&) = default;
};

// Derived facts of one materialization, with the minimal-depth derivation of
// each. Immutable once built; concurrent readers are safe.
class ClosureSet {
public:
    ClosureSet() = default;
    ClosureSet(std::vector<DerivedFact> facts, std::uint64_t store_id, std::uint64_t generation);

    std::span<const DerivedFact> facts() const noexcept { return facts_; }
    std::size_t size() const noexcept { return facts_.size(); }
    const DerivedFact* find(const Fact& f) const;
    bool contains(const Fact& f) const { return find(f) != nullptr; }

    // Derived facts unifying with the pattern (relation may be a star name),
    // sorted by fact_less.
    std::vector<Fact> match(const FactPattern& pattern) const;
    std::size_t count(Rule rule) const;

    // True if built from this exact store state.
    bool is_current_for(const FactStore& store) const noexcept {
        return store.id() == store_id_ && store.generation() == generation_;
    }

    // Same derived facts with the same derivations, independent of order.
    friend bool operator==(const ClosureSet& a, const ClosureSet& b);

private:
    struct Key {
        RelationId relation;
        DomainExpr domain;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept { return hash_combine(k.relation.hash(), k.domain.hash()); }
    };
    struct SubjectKey {
        RelationId relation;
        ConceptId subject;
        friend bool operator==(const SubjectKey&, const SubjectKey&) = default;
    };
    struct SubjectHash {
        std::size_t operator()(const SubjectKey& k) const noexcept {
            return hash_combine(k.relation.hash(), k.subject.hash());
        }
    };

    std::vector<DerivedFact> facts_;
    std::unordered_map<Fact, std::size_t> index_;
    std::unordered_map<Key, std::vector<std::size_t>, KeyHash> by_partition_;
    std::unordered_map<SubjectKey, std::vector<std::size_t>, SubjectHash> by_subject_;
    std::unordered_map<RelationId, std::vector<std::size_t>> by_relation_;
    std::uint64_t store_id_ = 0;
    std::uint64_t generation_ = 0;
};

enum class Execution { serial, parallel };

// Semi-naive fixpoint of all rules. Domains are independent partitions; with
// Execution::parallel they are evaluated concurrently (OpenMP) and the result
// is identical to serial evaluation. Throws CycleError when an acyclic relation
// contains a cycle (self-loops included).
ClosureSet materialize(const FactStore& store, Execution execution = Execution::parallel);

// Naive fixpoint: every round re-joins the full fact set until nothing new
// appears. Slow; kept as the serial reference for the semi-naive kernel.
ClosureSet materialize_reference(const FactStore& store);

// Concepts reachable from `from` along R edges (including symmetric and
// reflexive completions) inside one domain, by depth-first search. Does not
// require R to be transitive.
std::vector<ConceptId> reachable(const FactStore& store, RelationId relation, ConceptId from,
                                 const DomainExpr& domain);

// {y | R*(from, y, domain)}, sorted. Lazy form walks the store; the closure
// form reads a materialized ClosureSet. Throws Error if R is not transitive.
std::vector<ConceptId> reachable_star(const FactStore& store, RelationId relation, ConceptId from,
                                      const DomainExpr& domain);
std::vector<ConceptId> reachable_star(const ClosureSet& closure, const FactStore& store, RelationId relation,
                                      ConceptId from, const DomainExpr& domain);

// Transitive prerequisites of target, every prerequisite listed before the
// concepts that require it; ties broken lexicographically. Throws CycleError.
std::vector<ConceptId> all_prerequisites(const FactStore& store, ConceptId target, const DomainExpr& domain,
                                         RelationId requires_relation = RelationId("requires"));

struct InheritedAttribute {
    ConceptId attribute;
    ConceptId source;
    friend auto operator<=>(const InheritedAttribute&, const InheritedAttribute&) = default;
};

// Direct attributes (source = concept) plus those of every ancestor along the
// attribute relation's inherits_via carrier. No overriding.
std::vector<InheritedAttribute> inherited_attributes(const FactStore& store, ConceptId subject,
                                                     const DomainExpr& domain,
                                                     RelationId attribute_relation = RelationId("has_attribute"));

struct Analogy {
    ConceptId counterpart;
    DomainExpr concept_domain;
    DomainExpr counterpart_domain;
    friend auto operator<=>(const Analogy&, const Analogy&) = default;
};

enum class DomainMatch { exact, prefix };

// Cross facts with `subject` on either side, oriented so the concept is on the
// left. With source_domain set, only facts whose concept-side domain matches.
std::vector<Analogy> analogy_search(const FactStore& store, ConceptId subject,
                                    const std::optional<DomainExpr>& source_domain = std::nullopt,
                                    DomainMatch match = DomainMatch::exact,
                                    RelationId relation = RelationId("analogous_to"));

struct DerivationTrace {
    Fact fact;
    // "asserted" for leaves, otherwise a rule_name().
    std::string rule;
    std::vector<DerivationTrace> premises;

    bool is_leaf() const noexcept { return premises.empty(); }
    // Chaining depth: leaves and star_base relabelings count 0, every other
    // rule application adds one.
    std::size_t depth() const noexcept;
    std::vector<Fact> leaves() const;
};

// Leaf trace for an asserted fact, otherwise the stored minimal-depth
// derivation. Throws NotFoundError when the fact is neither.
DerivationTrace explain(const ClosureSet& closure, const FactStore& store, const Fact& fact);

// Indented tree, one fact per line.
std::string render_trace(const DerivationTrace& trace);

}  // namespace cdc
