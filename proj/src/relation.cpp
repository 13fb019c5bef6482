#include "cdc/relation.hpp"

#include <algorithm>

#include "cdc/domain.hpp"
#include "cdc/error.hpp"

namespace cdc {

std::string_view to_string(RelationShape shape) noexcept {
    switch (shape) {
        case RelationShape::intra: return "intra";
        case RelationShape::cross: return "cross";
        case RelationShape::fusion: return "fusion";
    }
    return "intra";
}

std::optional<RelationShape> parse_shape(std::string_view text) noexcept {
    if (text == "intra") return RelationShape::intra;
    if (text == "cross") return RelationShape::cross;
    if (text == "fusion") return RelationShape::fusion;
    return std::nullopt;
}

std::size_t arity(RelationShape shape) noexcept { return shape == RelationShape::intra ? 3 : 4; }

std::string star_name(RelationId relation) { return relation.str() + "_star"; }

void RelationRegistry::validate(const RelationSpec& spec) const {
    const std::string& name = spec.name.str();
    if (name.empty() || !is_atom_start(name.front()) ||
        !std::all_of(name.begin(), name.end(), [](char c) { return is_atom_start(c); }))
        throw RegistryError("invalid relation name '" + name + "'");
    if (name == kAllPrerequisites || name == kInheritedAttributes || name == kAnalogySearch)
        throw RegistryError("relation name '" + name + "' is reserved for a derived goal");
    if (star_base(name))
        throw RegistryError("relation name '" + name + "' collides with a closure goal");
    if (spec.symmetric && spec.acyclic)
        throw RegistryError("relation " + name + " cannot be both symmetric and acyclic");
    if (spec.transitive && spec.shape != RelationShape::intra)
        throw RegistryError("transitive relation " + name + " must have intra shape");
    if (spec.acyclic && spec.shape != RelationShape::intra)
        throw RegistryError("acyclic relation " + name + " must have intra shape");
    if (spec.reflexive && spec.acyclic)
        throw RegistryError("relation " + name + " cannot be both reflexive and acyclic");
    if (spec.inherits_via) {
        if (spec.shape != RelationShape::intra)
            throw RegistryError("inheriting relation " + name + " must have intra shape");
        const RelationSpec* via = find(*spec.inherits_via);
        if (!via && *spec.inherits_via != spec.name)
            throw RegistryError("relation " + name + " inherits via unknown relation " +
                                spec.inherits_via->str());
        if (via && via->shape != RelationShape::intra)
            throw RegistryError("relation " + name + " inherits via non-intra relation " +
                                spec.inherits_via->str());
    }
    if (spec.transitive) {
        std::string star = star_name(spec.name);
        if (find(star)) throw RegistryError("closure goal " + star + " collides with a relation");
    }
}

void RelationRegistry::register_relation(RelationSpec spec) {
    if (contains(spec.name)) throw RegistryError("relation " + spec.name.str() + " already registered");
    validate(spec);
    specs_.emplace(spec.name, std::move(spec));
}

void RelationRegistry::override_relation(RelationSpec spec) {
    auto saved = specs_.extract(spec.name);
    try {
        validate(spec);
    } catch (...) {
        if (!saved.empty()) specs_.insert(std::move(saved));
        throw;
    }
    specs_.insert_or_assign(spec.name, std::move(spec));
}

const RelationSpec* RelationRegistry::find(RelationId name) const {
    auto it = specs_.find(name);
    return it == specs_.end() ? nullptr : &it->second;
}

const RelationSpec* RelationRegistry::find(std::string_view name) const { return find(RelationId(name)); }

const RelationSpec& RelationRegistry::lookup(RelationId name) const {
    if (const auto* spec = find(name)) return *spec;
    throw RegistryError("unknown relation " + name.str());
}

const RelationSpec& RelationRegistry::lookup(std::string_view name) const { return lookup(RelationId(name)); }

const RelationSpec* RelationRegistry::star_base(std::string_view goal) const {
    constexpr std::string_view suffix = "_star";
    if (goal.size() <= suffix.size() || !goal.ends_with(suffix)) return nullptr;
    const RelationSpec* base = find(goal.substr(0, goal.size() - suffix.size()));
    return base && base->transitive ? base : nullptr;
}

std::vector<RelationSpec> RelationRegistry::all() const {
    std::vector<RelationSpec> out;
    out.reserve(specs_.size());
    for (const auto& [_, spec] : specs_) out.push_back(spec);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

namespace {

RelationSpec make(std::string_view name, RelationShape shape, bool transitive, bool symmetric, bool acyclic,
                  std::optional<std::string_view> via = std::nullopt) {
    RelationSpec s;
    s.name = RelationId(name);
    s.shape = shape;
    s.transitive = transitive;
    s.symmetric = symmetric;
    s.acyclic = acyclic;
    if (via) s.inherits_via = RelationId(*via);
    return s;
}

const std::vector<RelationSpec>& builtin_specs() {
    using enum RelationShape;
    static const std::vector<RelationSpec> specs = {
        make("is_a", intra, true, false, true),
        make("part_of", intra, true, false, true),
        make("has_attribute", intra, false, false, false, "is_a"),
        make("requires", intra, true, false, true),
        make("cause_of", intra, false, false, false),
        make("enables", intra, false, false, false),
        make("contrasts_with", intra, false, true, false),
        make("conflicts_with", intra, false, true, false),
        make("evolves_to", intra, true, false, true),
        make("if_then", intra, false, false, false),
        make("context_value", intra, false, false, false),
        make("strategy", intra, false, false, false),
        make("analogous_to", cross, false, true, false),
        make("fuses_with", fusion, false, true, false),
    };
    return specs;
}

}  // namespace

RelationRegistry builtin_registry() {
    RelationRegistry r;
    for (const auto& spec : builtin_specs()) r.register_relation(spec);
    return r;
}

const RelationSpec* builtin_spec(std::string_view name) {
    for (const auto& spec : builtin_specs())
        if (spec.name.str() == name) return &spec;
    return nullptr;
}

}  // namespace cdc
