#include "cdc/inference.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <queue>
#include <set>
#include <unordered_set>

#include "cdc/error.hpp"
#include "graph.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cdc {

std::string_view rule_name(Rule rule) noexcept {
    switch (rule) {
        case Rule::star_base: return "star_base";
        case Rule::star_step: return "star_step";
        case Rule::symmetric: return "symmetric";
        case Rule::reflexive: return "reflexive";
        case Rule::inherit: return "inherit";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// ClosureSet

ClosureSet::ClosureSet(std::vector<DerivedFact> facts, std::uint64_t store_id, std::uint64_t generation)
    : facts_(std::move(facts)), store_id_(store_id), generation_(generation) {
    index_.reserve(facts_.size());
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        const Fact& f = facts_[i].fact;
        index_.emplace(f, i);
        for (const DomainExpr& d : f.domains()) by_partition_[{f.relation, d}].push_back(i);
        by_subject_[{f.relation, f.subject()}].push_back(i);
        by_relation_[f.relation].push_back(i);
    }
}

const DerivedFact* ClosureSet::find(const Fact& f) const {
    auto it = index_.find(f);
    return it == index_.end() ? nullptr : &facts_[it->second];
}

std::vector<Fact> ClosureSet::match(const FactPattern& pattern) const {
    const std::vector<std::size_t>* candidates = nullptr;
    static const std::vector<std::size_t> empty;
    auto pick = [&](const auto& index, const auto& key) {
        auto it = index.find(key);
        candidates = it == index.end() ? &empty : &it->second;
    };
    if (pattern.domain) pick(by_partition_, Key{pattern.relation, *pattern.domain});
    else if (pattern.subject) pick(by_subject_, SubjectKey{pattern.relation, *pattern.subject});
    else if (pattern.right_domain) pick(by_partition_, Key{pattern.relation, *pattern.right_domain});
    else pick(by_relation_, pattern.relation);

    std::vector<Fact> out;
    for (std::size_t i : *candidates)
        if (pattern.matches(facts_[i].fact)) out.push_back(facts_[i].fact);
    std::sort(out.begin(), out.end(), fact_less);
    return out;
}

std::size_t ClosureSet::count(Rule rule) const {
    return static_cast<std::size_t>(
        std::count_if(facts_.begin(), facts_.end(), [&](const DerivedFact& d) { return d.rule == rule; }));
}

bool operator==(const ClosureSet& a, const ClosureSet& b) {
    if (a.size() != b.size()) return false;
    for (const DerivedFact& d : a.facts_) {
        const DerivedFact* other = b.find(d.fact);
        if (!other || !(*other == d)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Semi-naive kernel

namespace {

class BitMatrix {
public:
    explicit BitMatrix(std::size_t n = 0) : words_((n + 63) / 64), bits_(n * words_, 0) {}

    bool test(std::size_t r, std::size_t c) const { return (bits_[r * words_ + c / 64] >> (c % 64)) & 1U; }
    // True if the bit was clear.
    bool set(std::size_t r, std::size_t c) {
        auto& w = bits_[r * words_ + c / 64];
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        if (w & mask) return false;
        w |= mask;
        return true;
    }

private:
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

using graph::Vertex;
using Pair = std::pair<Vertex, Vertex>;

// One intra relation restricted to one domain, over the domain's local ids.
struct LocalRelation {
    const RelationSpec* spec = nullptr;
    std::vector<Pair> asserted;  // sorted
    std::vector<Pair> edges;     // asserted plus symmetric/reflexive completions, sorted
    BitMatrix has_edge;
    BitMatrix derived_edge;
    std::vector<std::vector<Vertex>> pred;  // pred[y]: sorted x with edge x -> y
};

class DomainKernel {
public:
    DomainKernel(const FactStore& store, DomainExpr domain) : store_(store), domain_(domain) {}

    std::vector<DerivedFact> run() {
        collect();
        for (auto& rel : relations_) complete(rel);
        for (auto& rel : relations_)
            if (rel.spec->acyclic) check_acyclic(rel);
        for (auto& rel : relations_)
            if (rel.spec->transitive) close(rel);
        for (auto& rel : relations_)
            if (rel.spec->inherits_via) inherit(rel);
        return std::move(out_);
    }

private:
    void collect() {
        std::vector<const RelationSpec*> specs;
        for (const auto& spec : store_.registry().all()) {
            if (spec.shape != RelationShape::intra || store_.partition(spec.name, domain_).empty()) continue;
            specs.push_back(store_.registry().find(spec.name));
            for (FactId id : store_.partition(spec.name, domain_)) {
                const auto& a = *store_.fact(id).as_intra();
                concepts_.push_back(a.subject);
                concepts_.push_back(a.object);
            }
        }
        std::sort(concepts_.begin(), concepts_.end());
        concepts_.erase(std::unique(concepts_.begin(), concepts_.end()), concepts_.end());
        local_.reserve(concepts_.size());
        for (Vertex i = 0; i < concepts_.size(); ++i) local_.emplace(concepts_[i], i);

        relations_.reserve(specs.size());
        for (const RelationSpec* spec : specs) {
            LocalRelation rel;
            rel.spec = spec;
            for (FactId id : store_.partition(spec->name, domain_)) {
                const auto& a = *store_.fact(id).as_intra();
                rel.asserted.emplace_back(local_.at(a.subject), local_.at(a.object));
            }
            std::sort(rel.asserted.begin(), rel.asserted.end());
            relations_.push_back(std::move(rel));
        }
    }

    Fact edge(RelationId r, Vertex x, Vertex y) const { return Fact::intra(r, concepts_[x], concepts_[y], domain_); }

    LocalRelation* relation(RelationId name) {
        for (auto& rel : relations_)
            if (rel.spec->name == name) return &rel;
        return nullptr;
    }

    void complete(LocalRelation& rel) {
        const std::size_t n = concepts_.size();
        rel.has_edge = BitMatrix(n);
        rel.derived_edge = BitMatrix(n);
        for (auto [x, y] : rel.asserted) rel.has_edge.set(x, y);
        rel.edges = rel.asserted;
        const RelationId name = rel.spec->name;

        struct Completion {
            Pair edge;
            Rule rule;
            Pair premise;
            bool operator<(const Completion& o) const { return edge < o.edge; }
        };
        std::vector<Completion> added;
        if (rel.spec->symmetric)
            for (auto [x, y] : rel.asserted)
                if (!rel.has_edge.test(y, x)) added.push_back({{y, x}, Rule::symmetric, {x, y}});
        if (rel.spec->reflexive) {
            constexpr Vertex none = Vertex(-1);
            std::vector<Pair> first_mention(n, {none, none});
            for (auto e : rel.asserted)
                for (Vertex c : {e.first, e.second})
                    if (first_mention[c].first == none) first_mention[c] = e;
            for (Vertex c = 0; c < n; ++c)
                if (first_mention[c].first != none && !rel.has_edge.test(c, c))
                    added.push_back({{c, c}, Rule::reflexive, first_mention[c]});
        }
        std::sort(added.begin(), added.end());
        for (const auto& c : added) {
            if (!rel.has_edge.set(c.edge.first, c.edge.second)) continue;
            rel.derived_edge.set(c.edge.first, c.edge.second);
            rel.edges.push_back(c.edge);
            out_.push_back({edge(name, c.edge.first, c.edge.second),
                            c.rule,
                            {{edge(name, c.premise.first, c.premise.second), false}}});
        }
        std::sort(rel.edges.begin(), rel.edges.end());
        rel.pred.assign(n, {});
        for (auto [x, y] : rel.edges) rel.pred[y].push_back(x);
    }

    void check_acyclic(const LocalRelation& rel) const {
        graph::Adjacency adjacency(concepts_.size());
        for (auto [x, y] : rel.asserted) adjacency[x].push_back(y);
        if (auto cycle = graph::find_cycle(adjacency)) {
            std::vector<std::string> names;
            for (Vertex v : *cycle) names.push_back(concepts_[v].str());
            throw CycleError(rel.spec->name.str(), domain_.format(), std::move(names));
        }
    }

    void close(const LocalRelation& rel) {
        const RelationId name = rel.spec->name;
        const RelationId star(star_name(name));
        BitMatrix star_bits(concepts_.size());
        std::vector<Pair> delta;

        for (auto [x, y] : rel.edges) {
            star_bits.set(x, y);
            delta.emplace_back(x, y);
            out_.push_back({edge(star, x, y), Rule::star_base, {{edge(name, x, y), rel.derived_edge.test(x, y)}}});
        }

        struct Candidate {
            Vertex x, z, via;
            auto operator<=>(const Candidate&) const = default;
        };
        std::vector<Candidate> candidates;
        while (!delta.empty()) {
            candidates.clear();
            for (auto [y, z] : delta)
                for (Vertex x : rel.pred[y])
                    if (!star_bits.test(x, z)) candidates.push_back({x, z, y});
            std::sort(candidates.begin(), candidates.end());

            delta.clear();
            for (const Candidate& c : candidates) {
                if (!star_bits.set(c.x, c.z)) continue;  // a smaller `via` already won
                delta.emplace_back(c.x, c.z);
                out_.push_back({edge(star, c.x, c.z),
                                Rule::star_step,
                                {{edge(name, c.x, c.via), rel.derived_edge.test(c.x, c.via)},
                                 {edge(star, c.via, c.z), true}}});
            }
        }
    }

    void inherit(const LocalRelation& rel) {
        const LocalRelation* carrier = relation(*rel.spec->inherits_via);
        if (!carrier) return;
        const RelationId name = rel.spec->name;
        const RelationId via = carrier->spec->name;

        BitMatrix known(concepts_.size());
        BitMatrix derived(concepts_.size());
        std::vector<Pair> delta;
        for (auto [x, a] : rel.edges) {
            known.set(x, a);
            if (rel.derived_edge.test(x, a)) derived.set(x, a);
            delta.emplace_back(x, a);
        }

        struct Candidate {
            Vertex x, attr, via;
            auto operator<=>(const Candidate&) const = default;
        };
        std::vector<Candidate> candidates;
        while (!delta.empty()) {
            candidates.clear();
            for (auto [y, a] : delta)
                for (Vertex x : carrier->pred[y])
                    if (!known.test(x, a)) candidates.push_back({x, a, y});
            std::sort(candidates.begin(), candidates.end());

            delta.clear();
            for (const Candidate& c : candidates) {
                if (!known.set(c.x, c.attr)) continue;
                derived.set(c.x, c.attr);
                delta.emplace_back(c.x, c.attr);
                out_.push_back({edge(name, c.x, c.attr),
                                Rule::inherit,
                                {{edge(via, c.x, c.via), carrier->derived_edge.test(c.x, c.via)},
                                 {edge(name, c.via, c.attr), derived.test(c.via, c.attr)}}});
            }
        }
    }

    const FactStore& store_;
    DomainExpr domain_;
    std::vector<ConceptId> concepts_;  // sorted: local id order is lexicographic
    std::unordered_map<ConceptId, Vertex> local_;
    std::vector<LocalRelation> relations_;
    std::vector<DerivedFact> out_;
};

// Symmetric completion for cross and fusion relations.
std::vector<DerivedFact> complete_multi_domain(const FactStore& store) {
    std::vector<DerivedFact> out;
    for (const auto& spec : store.registry().all()) {
        if (spec.shape == RelationShape::intra || !spec.symmetric) continue;
        for (FactId id : store.by_relation(spec.name)) {
            const Fact& f = store.fact(id);
            Fact r = f.reversed();
            if (r == f) continue;
            out.push_back({std::move(r), Rule::symmetric, {{f, false}}});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return fact_less(a.fact, b.fact); });
    return out;
}

std::vector<DomainExpr> intra_domains(const FactStore& store) {
    std::set<DomainExpr> domains;
    for (const auto& spec : store.registry().all())
        if (spec.shape == RelationShape::intra)
            for (const auto& d : store.domains(spec.name)) domains.insert(d);
    return {domains.begin(), domains.end()};
}

}  // namespace

ClosureSet materialize(const FactStore& store, Execution execution) {
    const std::vector<DomainExpr> domains = intra_domains(store);
    const auto n = static_cast<std::ptrdiff_t>(domains.size());
    std::vector<std::vector<DerivedFact>> per_domain(domains.size());
    std::vector<std::exception_ptr> errors(domains.size());

    if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                per_domain[i] = DomainKernel(store, domains[i]).run();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        // First failure in domain order, matching serial evaluation.
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) per_domain[i] = DomainKernel(store, domains[i]).run();
    }

    std::size_t total = 0;
    for (const auto& v : per_domain) total += v.size();
    std::vector<DerivedFact> all;
    all.reserve(total);
    for (auto& v : per_domain) std::move(v.begin(), v.end(), std::back_inserter(all));
    for (auto& d : complete_multi_domain(store)) all.push_back(std::move(d));
    return ClosureSet(std::move(all), store.id(), store.generation());
}

// ---------------------------------------------------------------------------
// Naive reference

namespace {

struct FactOrder {
    bool operator()(const Fact& a, const Fact& b) const { return fact_less(a, b); }
};

class NaiveEvaluator {
public:
    explicit NaiveEvaluator(const FactStore& store) : store_(store) {
        for (const Fact& f : store.facts()) asserted_.insert(f);
    }

    ClosureSet run() {
        symmetric_and_reflexive();
        for (const auto& spec : store_.registry().all())
            if (spec.transitive) star(spec);
        for (const auto& spec : store_.registry().all())
            if (spec.inherits_via) inherit(spec);
        std::vector<DerivedFact> facts;
        for (auto& [_, d] : derived_) facts.push_back(std::move(d));
        return ClosureSet(std::move(facts), store_.id(), store_.generation());
    }

private:
    bool known(const Fact& f) const { return asserted_.contains(f) || derived_.contains(f); }
    Premise premise(const Fact& f) const { return {f, !asserted_.contains(f)}; }

    // Facts of relation r, asserted or derived so far.
    std::vector<Fact> current(RelationId r) const {
        std::vector<Fact> out;
        for (const Fact& f : asserted_)
            if (f.relation == r) out.push_back(f);
        for (const auto& [f, _] : derived_)
            if (f.relation == r) out.push_back(f);
        return out;
    }

    void symmetric_and_reflexive() {
        std::map<Fact, DerivedFact, FactOrder> found;
        for (const auto& spec : store_.registry().all()) {
            if (spec.symmetric) {
                for (const Fact& f : asserted_) {
                    if (f.relation != spec.name) continue;
                    Fact r = f.reversed();
                    if (!asserted_.contains(r) && !found.contains(r)) found.emplace(r, DerivedFact{r, Rule::symmetric, {{f, false}}});
                }
            }
            if (spec.reflexive) {
                for (const Fact& f : asserted_) {  // fact_less order: first mention wins
                    if (f.relation != spec.name) continue;
                    const auto& a = *f.as_intra();
                    for (ConceptId c : {a.subject, a.object}) {
                        Fact loop = Fact::intra(spec.name, c, c, a.domain);
                        if (!asserted_.contains(loop) && !found.contains(loop))
                            found.emplace(loop, DerivedFact{loop, Rule::reflexive, {{f, false}}});
                    }
                }
            }
        }
        for (auto& [f, d] : found) derived_.emplace(f, std::move(d));
    }

    void star(const RelationSpec& spec) {
        const RelationId star_rel(star_name(spec.name));
        const std::vector<Fact> edges = current(spec.name);
        for (const Fact& e : edges) {
            const auto& a = *e.as_intra();
            Fact s = Fact::intra(star_rel, a.subject, a.object, a.domain);
            derived_.emplace(s, DerivedFact{s, Rule::star_base, {premise(e)}});
        }
        for (;;) {
            std::map<Fact, DerivedFact, FactOrder> round;
            const std::vector<Fact> stars = current(star_rel);
            for (const Fact& e : edges) {
                const auto& ea = *e.as_intra();
                for (const Fact& s : stars) {
                    const auto& sa = *s.as_intra();
                    if (sa.subject != ea.object || sa.domain != ea.domain) continue;
                    Fact head = Fact::intra(star_rel, ea.subject, sa.object, ea.domain);
                    if (known(head)) continue;
                    DerivedFact d{head, Rule::star_step, {premise(e), {s, true}}};
                    auto [it, inserted] = round.emplace(head, d);
                    if (!inserted && ea.object < it->second.premises[0].fact.object()) it->second = d;
                }
            }
            if (round.empty()) break;
            for (auto& [f, d] : round) derived_.emplace(f, std::move(d));
        }
        for (const auto& [f, d] : derived_) {
            if (f.relation != star_rel || f.subject() != f.object() || !spec.acyclic) continue;
            throw CycleError(spec.name.str(), f.domain().format(), walk_back(f));
        }
    }

    // Closed walk x -> ... -> x recovered from the derivation of R*(x, x).
    std::vector<std::string> walk_back(const Fact& loop) const {
        std::vector<std::string> walk{loop.subject().str()};
        const Fact* cur = &loop;
        for (;;) {
            const DerivedFact& d = derived_.at(*cur);
            if (d.rule == Rule::star_base) break;
            walk.push_back(d.premises[0].fact.object().str());
            cur = &d.premises[1].fact;
        }
        walk.push_back(loop.object().str());
        return walk;
    }

    void inherit(const RelationSpec& spec) {
        const RelationId via = *spec.inherits_via;
        if (!store_.registry().contains(via)) return;
        const std::vector<Fact> carriers = current(via);
        for (;;) {
            std::map<Fact, DerivedFact, FactOrder> round;
            const std::vector<Fact> attrs = current(spec.name);
            for (const Fact& c : carriers) {
                const auto& ca = *c.as_intra();
                for (const Fact& at : attrs) {
                    const auto& aa = *at.as_intra();
                    if (aa.subject != ca.object || aa.domain != ca.domain) continue;
                    Fact head = Fact::intra(spec.name, ca.subject, aa.object, ca.domain);
                    if (known(head)) continue;
                    DerivedFact d{head, Rule::inherit, {premise(c), premise(at)}};
                    auto [it, inserted] = round.emplace(head, d);
                    if (!inserted && ca.object < it->second.premises[0].fact.object()) it->second = d;
                }
            }
            if (round.empty()) break;
            for (auto& [f, d] : round) derived_.emplace(f, std::move(d));
        }
    }

    const FactStore& store_;
    std::set<Fact, FactOrder> asserted_;
    std::map<Fact, DerivedFact, FactOrder> derived_;
};

}  // namespace

ClosureSet materialize_reference(const FactStore& store) { return NaiveEvaluator(store).run(); }

// ---------------------------------------------------------------------------
// Lazy single-source queries

namespace {

std::unordered_map<ConceptId, std::vector<ConceptId>> successors(const FactStore& store, const RelationSpec& spec,
                                                                 const DomainExpr& domain) {
    std::unordered_map<ConceptId, std::vector<ConceptId>> succ;
    for (FactId id : store.partition(spec.name, domain)) {
        const auto& a = *store.fact(id).as_intra();
        succ[a.subject].push_back(a.object);
        if (spec.symmetric) succ[a.object].push_back(a.subject);
        if (spec.reflexive) {
            succ[a.subject].push_back(a.subject);
            succ[a.object].push_back(a.object);
        }
    }
    return succ;
}

const RelationSpec& intra_spec(const FactStore& store, RelationId relation) {
    const RelationSpec& spec = store.registry().lookup(relation);
    if (spec.shape != RelationShape::intra)
        throw Error("relation " + relation.str() + " is not an intra-domain relation");
    return spec;
}

}  // namespace

std::vector<ConceptId> reachable(const FactStore& store, RelationId relation, ConceptId from,
                                 const DomainExpr& domain) {
    const auto succ = successors(store, intra_spec(store, relation), domain);
    std::unordered_set<ConceptId> seen;
    std::vector<ConceptId> stack;
    auto push_successors = [&](ConceptId v) {
        if (auto it = succ.find(v); it != succ.end())
            for (ConceptId w : it->second)
                if (seen.insert(w).second) stack.push_back(w);
    };
    push_successors(from);
    while (!stack.empty()) {
        ConceptId v = stack.back();
        stack.pop_back();
        push_successors(v);
    }
    std::vector<ConceptId> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ConceptId> reachable_star(const FactStore& store, RelationId relation, ConceptId from,
                                      const DomainExpr& domain) {
    if (!intra_spec(store, relation).transitive)
        throw Error(relation.str() + " is not transitive; no closure goal " + star_name(relation));
    return reachable(store, relation, from, domain);
}

std::vector<ConceptId> reachable_star(const ClosureSet& closure, const FactStore& store, RelationId relation,
                                      ConceptId from, const DomainExpr& domain) {
    if (!intra_spec(store, relation).transitive)
        throw Error(relation.str() + " is not transitive; no closure goal " + star_name(relation));
    FactPattern p{RelationId(star_name(relation))};
    p.subject = from;
    p.domain = domain;
    std::vector<ConceptId> out;
    for (const Fact& f : closure.match(p)) out.push_back(f.object());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ConceptId> all_prerequisites(const FactStore& store, ConceptId target, const DomainExpr& domain,
                                         RelationId requires_relation) {
    const RelationSpec& spec = intra_spec(store, requires_relation);
    std::vector<ConceptId> members = reachable(store, requires_relation, target, domain);
    members.push_back(target);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());

    std::unordered_map<ConceptId, Vertex> local;
    for (Vertex i = 0; i < members.size(); ++i) local.emplace(members[i], i);
    graph::Adjacency requires_edges(members.size());  // u -> v: u requires v
    for (const auto& [u, vs] : successors(store, spec, domain)) {
        auto iu = local.find(u);
        if (iu == local.end()) continue;
        for (ConceptId v : vs)
            if (auto iv = local.find(v); iv != local.end()) requires_edges[iu->second].push_back(iv->second);
    }
    for (auto& row : requires_edges) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    auto fail_with_cycle = [&] {
        auto cycle = graph::find_cycle(requires_edges);
        std::vector<std::string> names;
        if (cycle)
            for (Vertex v : *cycle) names.push_back(members[v].str());
        throw CycleError(requires_relation.str(), domain.format(), std::move(names));
    };

    const Vertex t = local.at(target);
    std::vector<std::size_t> outstanding(members.size());
    std::vector<std::vector<Vertex>> dependents(members.size());
    for (Vertex u = 0; u < members.size(); ++u) {
        outstanding[u] = requires_edges[u].size();
        for (Vertex v : requires_edges[u]) dependents[v].push_back(u);
    }
    // Local ids are in lexicographic order, so a min-heap on ids breaks ties
    // lexicographically.
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (Vertex v = 0; v < members.size(); ++v)
        if (outstanding[v] == 0) ready.push(v);

    std::vector<ConceptId> order;
    std::size_t emitted = 0;
    while (!ready.empty()) {
        Vertex v = ready.top();
        ready.pop();
        ++emitted;
        if (v != t) order.push_back(members[v]);
        for (Vertex u : dependents[v])
            if (--outstanding[u] == 0) ready.push(u);
    }
    if (emitted != members.size()) fail_with_cycle();
    return order;
}

std::vector<InheritedAttribute> inherited_attributes(const FactStore& store, ConceptId subject,
                                                     const DomainExpr& domain, RelationId attribute_relation) {
    const RelationSpec& spec = intra_spec(store, attribute_relation);
    std::vector<ConceptId> sources{subject};
    if (spec.inherits_via && store.registry().contains(*spec.inherits_via))
        for (ConceptId a : reachable(store, *spec.inherits_via, subject, domain))
            if (a != subject) sources.push_back(a);

    std::vector<InheritedAttribute> out;
    for (ConceptId source : sources) {
        FactPattern p{attribute_relation};
        p.subject = source;
        p.domain = domain;
        for (const Fact& f : store.match(p)) out.push_back({f.object(), source});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Analogy> analogy_search(const FactStore& store, ConceptId subject,
                                    const std::optional<DomainExpr>& source_domain, DomainMatch match,
                                    RelationId relation) {
    const RelationSpec& spec = store.registry().lookup(relation);
    if (spec.shape != RelationShape::cross) throw Error("relation " + relation.str() + " is not cross-domain");

    auto admits = [&](const DomainExpr& side) {
        if (!source_domain) return true;
        return match == DomainMatch::exact ? side == *source_domain : is_prefix_of(side, *source_domain);
    };
    std::vector<Analogy> out;
    FactPattern by_left{relation};
    by_left.subject = subject;
    for (const Fact& f : store.match(by_left)) {
        const auto& c = *f.as_cross();
        if (admits(c.left_domain)) out.push_back({c.right, c.left_domain, c.right_domain});
    }
    if (spec.symmetric) {
        FactPattern by_right{relation};
        by_right.object = subject;
        for (const Fact& f : store.match(by_right)) {
            const auto& c = *f.as_cross();
            if (admits(c.right_domain)) out.push_back({c.left, c.right_domain, c.left_domain});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Explanations

std::size_t DerivationTrace::depth() const noexcept {
    std::size_t deepest = 0;
    for (const auto& p : premises) deepest = std::max(deepest, p.depth());
    if (premises.empty()) return 0;
    return deepest + (rule == rule_name(Rule::star_base) ? 0 : 1);
}

std::vector<Fact> DerivationTrace::leaves() const {
    if (premises.empty()) return {fact};
    std::vector<Fact> out;
    for (const auto& p : premises) {
        auto sub = p.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

DerivationTrace explain(const ClosureSet& closure, const FactStore& store, const Fact& fact) {
    if (const Fact* stored = store.find_stored(fact); stored && *stored == fact) return {fact, "asserted", {}};
    const DerivedFact* d = closure.find(fact);
    if (!d) throw NotFoundError("not derivable: " + to_string(fact));
    DerivationTrace trace{fact, std::string(rule_name(d->rule)), {}};
    for (const Premise& p : d->premises) trace.premises.push_back(explain(closure, store, p.fact));
    return trace;
}

namespace {
void render(const DerivationTrace& t, std::size_t indent, std::string& out) {
    out.append(indent * 2, ' ');
    out += to_string(t.fact);
    out += "  [" + t.rule + "]\n";
    for (const auto& p : t.premises) render(p, indent + 1, out);
}
}  // namespace

std::string render_trace(const DerivationTrace& trace) {
    std::string out;
    render(trace, 0, out);
    return out;
}

}  // namespace cdc
