#include "cdc/fact_store.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "cdc/error.hpp"

namespace cdc {

namespace {

std::uint64_t next_store_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

std::vector<Fact> sorted(std::vector<Fact> facts) {
    std::sort(facts.begin(), facts.end(), fact_less);
    return facts;
}

}  // namespace

FactStore::FactStore() : FactStore(builtin_registry()) {}

FactStore::FactStore(RelationRegistry registry) : registry_(std::move(registry)), id_(next_store_id()) {}

FactStore::FactStore(const FactStore& other)
    : registry_(other.registry_),
      slots_(other.slots_),
      free_(other.free_),
      by_key_(other.by_key_),
      by_partition_(other.by_partition_),
      by_relation_(other.by_relation_),
      by_subject_(other.by_subject_),
      by_object_(other.by_object_),
      domain_counts_(other.domain_counts_),
      strict_(other.strict_),
      id_(next_store_id()),
      generation_(other.generation_),
      last_scanned_(other.last_scanned_.load()) {}

FactStore& FactStore::operator=(const FactStore& other) {
    if (this != &other) {
        FactStore copy(other);
        *this = std::move(copy);
    }
    return *this;
}

FactStore::FactStore(FactStore&& other) noexcept
    : registry_(std::move(other.registry_)),
      slots_(std::move(other.slots_)),
      free_(std::move(other.free_)),
      by_key_(std::move(other.by_key_)),
      by_partition_(std::move(other.by_partition_)),
      by_relation_(std::move(other.by_relation_)),
      by_subject_(std::move(other.by_subject_)),
      by_object_(std::move(other.by_object_)),
      domain_counts_(std::move(other.domain_counts_)),
      strict_(other.strict_),
      id_(other.id_),
      generation_(other.generation_),
      last_scanned_(other.last_scanned_.load()) {
    other.id_ = next_store_id();
}

FactStore& FactStore::operator=(FactStore&& other) noexcept {
    if (this == &other) return *this;
    registry_ = std::move(other.registry_);
    slots_ = std::move(other.slots_);
    free_ = std::move(other.free_);
    by_key_ = std::move(other.by_key_);
    by_partition_ = std::move(other.by_partition_);
    by_relation_ = std::move(other.by_relation_);
    by_subject_ = std::move(other.by_subject_);
    by_object_ = std::move(other.by_object_);
    domain_counts_ = std::move(other.domain_counts_);
    strict_ = other.strict_;
    id_ = next_store_id();
    generation_ = other.generation_ + 1;
    last_scanned_ = other.last_scanned_.load();
    other.id_ = next_store_id();
    return *this;
}

void FactStore::touch() { ++generation_; }

void FactStore::register_relation(RelationSpec spec) {
    registry_.register_relation(std::move(spec));
    touch();
}

void FactStore::define_relation(RelationSpec spec) {
    if (const auto* existing = registry_.find(spec.name)) {
        if (*existing == spec) return;
        if (count(spec.name) > 0)
            throw RegistryError("cannot redefine relation " + spec.name.str() + " after facts use it");
    }
    registry_.override_relation(std::move(spec));
    touch();
}

const RelationSpec& FactStore::validate(const Fact& f) const {
    const RelationSpec& spec = registry_.lookup(f.relation);
    if (f.shape() != spec.shape) {
        throw ShapeError("relation " + spec.name.str() + " expects " + std::to_string(arity(spec.shape)) +
                         " arguments (" + std::string(to_string(spec.shape)) + "), got " +
                         std::string(to_string(f.shape())) + " fact");
    }
    return spec;
}

void FactStore::check_acyclic_insert(const RelationSpec& spec, const Fact& f) const {
    const auto& a = *f.as_intra();
    if (a.subject == a.object)
        throw CycleError(spec.name.str(), a.domain.format(), {a.subject.str(), a.subject.str()});

    // Path object ->* subject would close a cycle through the new edge.
    std::unordered_map<ConceptId, std::vector<ConceptId>> succ;
    for (FactId id : partition(spec.name, a.domain)) {
        const auto& e = *fact(id).as_intra();
        succ[e.subject].push_back(e.object);
    }
    std::unordered_map<ConceptId, ConceptId> parent;
    std::deque<ConceptId> queue{a.object};
    parent.emplace(a.object, a.object);
    while (!queue.empty()) {
        ConceptId v = queue.front();
        queue.pop_front();
        if (v == a.subject) {
            std::vector<std::string> path;
            for (ConceptId w = v; w != a.object; w = parent.at(w)) path.push_back(w.str());
            path.push_back(a.object.str());
            std::reverse(path.begin(), path.end());  // object ... subject
            std::vector<std::string> cycle{a.subject.str()};
            cycle.insert(cycle.end(), path.begin(), path.end());
            throw CycleError(spec.name.str(), a.domain.format(), std::move(cycle));
        }
        if (auto it = succ.find(v); it != succ.end())
            for (ConceptId w : it->second)
                if (parent.emplace(w, v).second) queue.push_back(w);
    }
}

bool FactStore::assert_fact(const Fact& f) {
    const RelationSpec& spec = validate(f);
    Fact key = canonical(f, spec);
    if (by_key_.contains(key)) return false;
    if (strict_ && spec.acyclic) check_acyclic_insert(spec, f);

    FactId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        slots_[id] = f;
    } else {
        id = static_cast<FactId>(slots_.size());
        slots_.emplace_back(f);
    }
    by_key_.emplace(std::move(key), id);
    by_relation_[f.relation].push_back(id);
    for (const DomainExpr& d : f.domains()) {
        by_partition_[{f.relation, d}].push_back(id);
        ++domain_counts_[d];
    }
    by_subject_[f.subject()].push_back(id);
    by_object_[f.object()].push_back(id);
    touch();
    return true;
}

void FactStore::erase_id(std::vector<FactId>& ids, FactId id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it != ids.end()) ids.erase(it);
}

bool FactStore::retract_fact(const Fact& f) {
    const RelationSpec& spec = registry_.lookup(f.relation);
    if (f.shape() != spec.shape) return false;
    auto it = by_key_.find(canonical(f, spec));
    if (it == by_key_.end()) return false;
    FactId id = it->second;
    const Fact stored = *slots_[id];
    by_key_.erase(it);

    auto drop = [&](auto& index, const auto& key) {
        auto pos = index.find(key);
        if (pos == index.end()) return;
        erase_id(pos->second, id);
        if (pos->second.empty()) index.erase(pos);
    };
    drop(by_relation_, stored.relation);
    for (const DomainExpr& d : stored.domains()) {
        drop(by_partition_, PartitionKey{stored.relation, d});
        if (--domain_counts_[d] == 0) domain_counts_.erase(d);
    }
    drop(by_subject_, stored.subject());
    drop(by_object_, stored.object());

    slots_[id].reset();
    free_.push_back(id);
    touch();
    return true;
}

bool FactStore::contains(const Fact& f) const {
    const RelationSpec* spec = registry_.find(f.relation);
    if (!spec || f.shape() != spec->shape) return false;
    return by_key_.contains(canonical(f, *spec));
}

const Fact* FactStore::find_stored(const Fact& f) const {
    const RelationSpec* spec = registry_.find(f.relation);
    if (!spec || f.shape() != spec->shape) return nullptr;
    auto it = by_key_.find(canonical(f, *spec));
    return it == by_key_.end() ? nullptr : &fact(it->second);
}

MatchResult FactStore::match_counted(const FactPattern& pattern) const {
    registry_.lookup(pattern.relation);
    MatchResult out;

    auto scan = [&](std::span<const FactId> ids) {
        out.scanned += ids.size();
        for (FactId id : ids) {
            const Fact& f = fact(id);
            if (pattern.matches(f)) out.facts.push_back(f);
        }
    };
    auto lookup = [](const auto& index, ConceptId c) -> std::span<const FactId> {
        auto it = index.find(c);
        if (it == index.end()) return {};
        return it->second;
    };

    if (pattern.domain) {
        scan(partition(pattern.relation, *pattern.domain));
    } else if (pattern.right_domain) {
        scan(partition(pattern.relation, *pattern.right_domain));
    } else if (pattern.subject && pattern.object) {
        auto s = lookup(by_subject_, *pattern.subject);
        auto o = lookup(by_object_, *pattern.object);
        scan(s.size() <= o.size() ? s : o);
    } else if (pattern.subject) {
        scan(lookup(by_subject_, *pattern.subject));
    } else if (pattern.object) {
        scan(lookup(by_object_, *pattern.object));
    } else {
        scan(by_relation(pattern.relation));
    }
    out.facts = sorted(std::move(out.facts));
    last_scanned_.store(out.scanned, std::memory_order_relaxed);
    return out;
}

std::vector<Fact> FactStore::match(const FactPattern& pattern) const { return match_counted(pattern).facts; }

MatchResult FactStore::scan_relation(const FactPattern& pattern) const {
    registry_.lookup(pattern.relation);
    MatchResult out;
    for (FactId id : by_relation(pattern.relation)) {
        ++out.scanned;
        if (pattern.matches(fact(id))) out.facts.push_back(fact(id));
    }
    out.facts = sorted(std::move(out.facts));
    last_scanned_.store(out.scanned, std::memory_order_relaxed);
    return out;
}

StoreStats FactStore::stats() const {
    StoreStats s;
    s.total_facts = size();
    for (const auto& [d, n] : domain_counts_) s.facts_per_domain[d.format()] = n;
    s.last_query_scanned = last_scanned_.load(std::memory_order_relaxed);
    return s;
}

std::size_t FactStore::count(RelationId relation) const { return by_relation(relation).size(); }

std::vector<Fact> FactStore::facts() const {
    std::vector<Fact> out;
    out.reserve(size());
    for (const auto& slot : slots_)
        if (slot) out.push_back(*slot);
    return sorted(std::move(out));
}

std::vector<DomainExpr> FactStore::domains(RelationId relation) const {
    std::vector<DomainExpr> out;
    for (const auto& [key, ids] : by_partition_)
        if (key.relation == relation && !ids.empty()) out.push_back(key.domain);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DomainExpr> FactStore::domains() const {
    std::vector<DomainExpr> out;
    out.reserve(domain_counts_.size());
    for (const auto& [d, _] : domain_counts_) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

std::span<const FactId> FactStore::partition(RelationId relation, const DomainExpr& domain) const {
    auto it = by_partition_.find({relation, domain});
    if (it == by_partition_.end()) return {};
    return it->second;
}

std::span<const FactId> FactStore::by_relation(RelationId relation) const {
    auto it = by_relation_.find(relation);
    if (it == by_relation_.end()) return {};
    return it->second;
}

bool FactStore::indexes_coherent() const {
    auto holds = [](const auto& index, const auto& key, FactId id) {
        auto it = index.find(key);
        return it != index.end() && std::count(it->second.begin(), it->second.end(), id) == 1;
    };
    std::size_t live = 0;
    for (FactId id = 0; id < slots_.size(); ++id) {
        if (!slots_[id]) continue;
        ++live;
        const Fact& f = *slots_[id];
        const auto& spec = registry_.lookup(f.relation);
        auto key = by_key_.find(canonical(f, spec));
        if (key == by_key_.end() || key->second != id) return false;
        if (!holds(by_relation_, f.relation, id)) return false;
        if (!holds(by_subject_, f.subject(), id) || !holds(by_object_, f.object(), id)) return false;
        for (const auto& d : f.domains())
            if (!holds(by_partition_, PartitionKey{f.relation, d}, id)) return false;
    }
    if (live != by_key_.size()) return false;

    auto total = [](const auto& index) {
        std::size_t n = 0;
        for (const auto& [_, ids] : index) n += ids.size();
        return n;
    };
    std::size_t partition_entries = 0;
    for (const auto& slot : slots_)
        if (slot) partition_entries += slot->domains().size();
    return total(by_relation_) == live && total(by_subject_) == live && total(by_object_) == live &&
           total(by_partition_) == partition_entries;
}

bool operator==(const FactStore& a, const FactStore& b) {
    if (!(a.registry_ == b.registry_) || a.size() != b.size()) return false;
    for (const auto& [key, _] : a.by_key_)
        if (!b.by_key_.contains(key)) return false;
    return true;
}

}  // namespace cdc
