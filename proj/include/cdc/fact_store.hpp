#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdc/fact.hpp"
#include "cdc/relation.hpp"

namespace cdc {

using FactId = std::uint32_t;

struct StoreStats {
    std::size_t total_facts = 0;
    // Keyed by canonical domain text. Cross facts count under both domains.
    std::map<std::string, std::size_t> facts_per_domain;
    std::size_t last_query_scanned = 0;
};

struct MatchResult {
    std::vector<Fact> facts;
    // Index entries touched while answering.
    std::size_t scanned = 0;
};

// Set of asserted facts, partitioned by (relation, exact domain) with
// secondary subject and object indexes. Owns the relation registry its facts
// are validated against.
//
// Mutation needs exclusive access; const member functions may run
// concurrently. Every successful mutation bumps generation(), which is how a
// materialized closure detects that it is stale.
class FactStore {
public:
    FactStore();
    explicit FactStore(RelationRegistry registry);
    FactStore(const FactStore& other);
    FactStore& operator=(const FactStore& other);
    FactStore(FactStore&& other) noexcept;
    FactStore& operator=(FactStore&& other) noexcept;

    const RelationRegistry& registry() const noexcept { return registry_; }
    // Throws RegistryError on duplicates.
    void register_relation(RelationSpec spec);
    // Directive semantics: identical redefinition is a no-op; a different spec
    // replaces the old one only while the relation holds no facts.
    void define_relation(RelationSpec spec);

    // In strict mode an assert that would close a cycle in an acyclic relation
    // throws CycleError instead of being stored.
    void set_strict(bool strict) noexcept { strict_ = strict; }
    bool strict() const noexcept { return strict_; }

    // True if newly inserted. Throws RegistryError / ShapeError.
    bool assert_fact(const Fact& f);
    // True if present and removed. Throws RegistryError for unknown relations.
    bool retract_fact(const Fact& f);
    bool contains(const Fact& f) const;
    // The stored orientation of f's equivalence class, or nullptr.
    const Fact* find_stored(const Fact& f) const;

    // Stored facts unifying with the pattern, sorted by fact_less. Records the
    // scan count in stats().last_query_scanned.
    std::vector<Fact> match(const FactPattern& pattern) const;
    MatchResult match_counted(const FactPattern& pattern) const;
    // Baseline without the partition index: walks every fact of the relation.
    MatchResult scan_relation(const FactPattern& pattern) const;

    StoreStats stats() const;
    std::size_t size() const noexcept { return by_key_.size(); }
    bool empty() const noexcept { return by_key_.empty(); }
    std::size_t count(RelationId relation) const;

    // All facts in fact_less order.
    std::vector<Fact> facts() const;
    // Distinct domains of the relation's facts (both sides for cross), sorted.
    std::vector<DomainExpr> domains(RelationId relation) const;
    // Distinct domains over all facts, sorted.
    std::vector<DomainExpr> domains() const;
    std::span<const FactId> partition(RelationId relation, const DomainExpr& domain) const;
    std::span<const FactId> by_relation(RelationId relation) const;
    const Fact& fact(FactId id) const { return *slots_[id]; }

    std::uint64_t id() const noexcept { return id_; }
    std::uint64_t generation() const noexcept { return generation_; }

    // Every stored fact is reachable from all of its indexes and nothing else
    // is. For tests.
    bool indexes_coherent() const;

    // Same registry and same fact set.
    friend bool operator==(const FactStore& a, const FactStore& b);

private:
    struct PartitionKey {
        RelationId relation;
        DomainExpr domain;
        friend bool operator==(const PartitionKey&, const PartitionKey&) = default;
    };
    struct PartitionHash {
        std::size_t operator()(const PartitionKey& k) const noexcept {
            return hash_combine(k.relation.hash(), k.domain.hash());
        }
    };

    const RelationSpec& validate(const Fact& f) const;
    void check_acyclic_insert(const RelationSpec& spec, const Fact& f) const;
    static void erase_id(std::vector<FactId>& ids, FactId id);
    void touch();

    RelationRegistry registry_;
    std::vector<std::optional<Fact>> slots_;
    std::vector<FactId> free_;
    std::unordered_map<Fact, FactId> by_key_;
    std::unordered_map<PartitionKey, std::vector<FactId>, PartitionHash> by_partition_;
    std::unordered_map<RelationId, std::vector<FactId>> by_relation_;
    std::unordered_map<ConceptId, std::vector<FactId>> by_subject_;
    std::unordered_map<ConceptId, std::vector<FactId>> by_object_;
    std::unordered_map<DomainExpr, std::size_t> domain_counts_;
    bool strict_ = false;
    std::uint64_t id_;
    std::uint64_t generation_ = 0;
    mutable std::atomic<std::size_t> last_scanned_{0};
};

}  // namespace cdc
