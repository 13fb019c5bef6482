#pragma once

#include <string>
#include <vector>

#include "cdc/fact.hpp"
#include "cdc/fact_store.hpp"

namespace cdc {

struct Violation {
    enum class Kind { cycle, irreflexive };
    Kind kind;
    RelationId relation;
    DomainExpr domain;
    std::string description;
    // Edges of the offending cycle in walk order, or the single self-loop.
    std::vector<Fact> facts;
    // Closed walk v0 -> ... -> v0 (cycle errors only).
    std::vector<ConceptId> cycle;
};

struct Lint {
    enum class Kind { case_variant_domain, near_duplicate_domain, duplicate_fact };
    Kind kind;
    std::string description;
    // The two domain texts, or the rendered duplicate fact.
    std::vector<std::string> subjects;
};

// One concept categorized by the same relation under two different domains.
struct SeparationWitness {
    ConceptId subject;
    RelationId relation;
    ConceptId object1;
    DomainExpr domain1;
    ConceptId object2;
    DomainExpr domain2;
    friend bool operator==(const SeparationWitness&, const SeparationWitness&) = default;
};

struct ConsistencyReport {
    std::vector<Violation> errors;
    std::vector<Lint> warnings;
    std::vector<SeparationWitness> separation_witnesses;

    // True iff the store can be materialized.
    bool ok() const noexcept { return errors.empty(); }
};

std::string_view to_string(Violation::Kind kind) noexcept;
std::string_view to_string(Lint::Kind kind) noexcept;

// Reads the store only. Findings are ordered deterministically: errors by
// (relation, domain, first cycle vertex), witnesses by (relation, subject,
// domains), lints by their subjects.
ConsistencyReport check(const FactStore& store);

std::size_t edit_distance(std::string_view a, std::string_view b);

// Human-readable report, one finding per line plus a summary line.
std::string render_text(const ConsistencyReport& report);
// One JSON object per finding; every record has a "type" field.
std::string render_json_lines(const ConsistencyReport& report);

}  // namespace cdc
