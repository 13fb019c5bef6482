#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdc/symbol.hpp"

namespace cdc {

// intra: (c, c', d); cross: (c1, c2, d1, d2); fusion: (c1, c2, fused, d).
enum class RelationShape { intra, cross, fusion };

std::string_view to_string(RelationShape shape) noexcept;
std::optional<RelationShape> parse_shape(std::string_view text) noexcept;
// Number of arguments a fact of this shape takes.
std::size_t arity(RelationShape shape) noexcept;

struct RelationSpec {
    RelationId name;
    RelationShape shape = RelationShape::intra;
    bool transitive = false;
    bool symmetric = false;
    bool reflexive = false;
    bool acyclic = false;
    // A(x, a, d) <- via(x, y, d), A(y, a, d)
    std::optional<RelationId> inherits_via;

    friend bool operator==(const RelationSpec&, const RelationSpec&) = default;
};

// Name of the derived closure goal for a transitive relation: `is_a` -> `is_a_star`.
std::string star_name(RelationId relation);

// Goals answered by the inference layer rather than a stored relation.
inline constexpr std::string_view kAllPrerequisites = "all_prerequisites";
inline constexpr std::string_view kInheritedAttributes = "inherited_attributes";
inline constexpr std::string_view kAnalogySearch = "analogy_search";

class RelationRegistry {
public:
    // Adds a new relation; throws RegistryError on duplicates or invalid flags.
    void register_relation(RelationSpec spec);
    // Replaces an existing spec (or adds it). Validation is the same as
    // register_relation minus the duplicate check.
    void override_relation(RelationSpec spec);

    const RelationSpec* find(RelationId name) const;
    const RelationSpec* find(std::string_view name) const;
    // Throws RegistryError for unknown names.
    const RelationSpec& lookup(RelationId name) const;
    const RelationSpec& lookup(std::string_view name) const;
    bool contains(RelationId name) const { return find(name) != nullptr; }

    // The transitive relation R for which `goal` names R's star closure, if any.
    const RelationSpec* star_base(std::string_view goal) const;

    // Sorted by name.
    std::vector<RelationSpec> all() const;
    std::size_t size() const noexcept { return specs_.size(); }

    friend bool operator==(const RelationRegistry&, const RelationRegistry&) = default;

private:
    void validate(const RelationSpec& spec) const;
    std::unordered_map<RelationId, RelationSpec> specs_;
};

// is_a, part_of, has_attribute, requires, cause_of, enables, contrasts_with,
// conflicts_with, evolves_to, if_then, context_value, strategy, analogous_to,
// fuses_with.
RelationRegistry builtin_registry();
const RelationSpec* builtin_spec(std::string_view name);

}  // namespace cdc
