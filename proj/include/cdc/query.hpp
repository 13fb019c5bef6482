#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cdc/fact_store.hpp"
#include "cdc/inference.hpp"
#include "cdc/relation.hpp"

namespace cdc {

struct QueryTerm {
    enum class Kind { constant, variable, domain_literal };
    Kind kind;
    // Constant or domain text, or the variable name including `?`.
    std::string text;
    std::size_t offset = 0;  // byte offset in the query text
};

// asserted: stored facts only. all: stored plus materialized facts.
enum class FactSource { asserted, all };

struct Query {
    enum class Goal { relation, star, all_prerequisites, inherited_attributes, analogy_search };
    Goal goal_kind = Goal::relation;
    // As written, e.g. `is_a_star`.
    std::string goal;
    // The stored relation behind relation and star goals.
    RelationId relation;
    std::vector<QueryTerm> args;
    FactSource source = FactSource::all;
    DomainMatch domain_match = DomainMatch::exact;

    // Distinct variable names in order of first appearance.
    std::vector<std::string> variables() const;
};

// `name(qterm, ...)` with qterm := atom | 'quoted' | ?var | "domain".
// A leading `?-` and a trailing `.` are accepted. Goals: every relation in
// the registry, `<R>_star` for transitive R, all_prerequisites(T, D, ?P),
// inherited_attributes(C, D, ?Attr, ?Source), analogy_search(C, ?Other, ?D1, ?D2).
// Throws QueryError carrying the offset of the offending token.
Query parse_query(std::string_view text, const RelationRegistry& registry);
Query parse_query(std::string_view text);

struct BindingSet {
    std::vector<std::string> variables;
    // One row per solution, values aligned with `variables`. Deduplicated and
    // sorted. A query without variables has one empty row when it holds.
    std::vector<std::vector<std::string>> solutions;

    bool empty() const noexcept { return solutions.empty(); }
    std::size_t size() const noexcept { return solutions.size(); }
    // Values of one variable, in solution order.
    std::vector<std::string> column(std::string_view variable) const;
};

// Uses `closure` when it is current for the store. Otherwise goals needing
// derived facts materialize on demand, or throw QueryError in strict mode.
BindingSet eval_query(const Query& query, const FactStore& store, const ClosureSet* closure = nullptr,
                      bool strict = false);

// `?S = a, ?D = b` per line; `true.` / `false.` when the query has no variables.
std::string render_text(const BindingSet& bindings);
// One JSON object per solution keyed by variable name.
std::string render_json_lines(const BindingSet& bindings);

}  // namespace cdc
