#include "cdc/consistency.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graph.hpp"

namespace cdc {

std::string_view to_string(Violation::Kind kind) noexcept {
    return kind == Violation::Kind::cycle ? "cycle" : "irreflexive";
}

std::string_view to_string(Lint::Kind kind) noexcept {
    switch (kind) {
        case Lint::Kind::case_variant_domain: return "case_variant_domain";
        case Lint::Kind::near_duplicate_domain: return "near_duplicate_domain";
        case Lint::Kind::duplicate_fact: return "duplicate_fact";
    }
    return "unknown";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

using graph::Vertex;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string arrow_path(const std::vector<ConceptId>& walk) {
    std::string out;
    for (std::size_t i = 0; i < walk.size(); ++i) {
        if (i) out += " -> ";
        out += walk[i].str();
    }
    return out;
}

void check_acyclic(const FactStore& store, const RelationSpec& spec, const DomainExpr& domain,
                   std::vector<Violation>& out) {
    std::vector<ConceptId> concepts;
    std::vector<Fact> facts;
    for (FactId id : store.partition(spec.name, domain)) {
        const Fact& f = store.fact(id);
        facts.push_back(f);
        concepts.push_back(f.subject());
        concepts.push_back(f.object());
    }
    std::sort(concepts.begin(), concepts.end());
    concepts.erase(std::unique(concepts.begin(), concepts.end()), concepts.end());
    auto local = [&](ConceptId c) {
        return static_cast<Vertex>(std::lower_bound(concepts.begin(), concepts.end(), c) - concepts.begin());
    };

    graph::Adjacency adjacency(concepts.size());
    std::sort(facts.begin(), facts.end(), fact_less);
    for (const Fact& f : facts) {
        if (f.subject() == f.object()) {
            out.push_back({Violation::Kind::irreflexive, spec.name, domain,
                           spec.name.str() + "(" + f.subject().str() + ", " + f.subject().str() +
                               ") is a self-loop in asymmetric relation " + spec.name.str() + " within \"" +
                               domain.format() + "\"",
                           {f}, {}});
            continue;
        }
        adjacency[local(f.subject())].push_back(local(f.object()));
    }
    for (auto& row : adjacency) std::sort(row.begin(), row.end());

    auto components = graph::strongly_connected_components(adjacency);
    std::sort(components.begin(), components.end());
    for (const auto& component : components) {
        if (component.size() < 2) continue;
        std::vector<Vertex> walk = graph::cycle_through(adjacency, component.front(), component);
        Violation v{Violation::Kind::cycle, spec.name, domain, {}, {}, {}};
        for (Vertex x : walk) v.cycle.push_back(concepts[x]);
        for (std::size_t i = 0; i + 1 < walk.size(); ++i)
            v.facts.push_back(Fact::intra(spec.name, concepts[walk[i]], concepts[walk[i + 1]], domain));
        v.description = "cycle in acyclic relation " + spec.name.str() + " within \"" + domain.format() +
                        "\": " + arrow_path(v.cycle);
        out.push_back(std::move(v));
    }
}

void collect_witnesses(const FactStore& store, const RelationSpec& spec, std::vector<SeparationWitness>& out) {
    std::map<ConceptId, std::vector<Fact>> by_subject;
    for (FactId id : store.by_relation(spec.name)) by_subject[store.fact(id).subject()].push_back(store.fact(id));
    for (auto& [subject, facts] : by_subject) {
        std::sort(facts.begin(), facts.end(), fact_less);
        for (std::size_t i = 0; i < facts.size(); ++i)
            for (std::size_t j = i + 1; j < facts.size(); ++j) {
                const auto& a = *facts[i].as_intra();
                const auto& b = *facts[j].as_intra();
                if (a.object != b.object && a.domain != b.domain)
                    out.push_back({subject, spec.name, a.object, a.domain, b.object, b.domain});
            }
    }
}

void collect_domain_lints(const FactStore& store, std::vector<Lint>& out) {
    const std::vector<DomainExpr> domains = store.domains();
    for (std::size_t i = 0; i < domains.size(); ++i)
        for (std::size_t j = i + 1; j < domains.size(); ++j) {
            const std::string& a = domains[i].format();
            const std::string& b = domains[j].format();
            if (lower(a) == lower(b)) {
                out.push_back({Lint::Kind::case_variant_domain,
                               "domains \"" + a + "\" and \"" + b + "\" differ only in case", {a, b}});
            } else if (std::max(a.size(), b.size()) - std::min(a.size(), b.size()) <= 2 &&
                       edit_distance(a, b) <= 2) {
                out.push_back({Lint::Kind::near_duplicate_domain,
                               "domains \"" + a + "\" and \"" + b + "\" are within edit distance 2", {a, b}});
            }
        }
}

}  // namespace

ConsistencyReport check(const FactStore& store) {
    ConsistencyReport report;
    for (const RelationSpec& spec : store.registry().all()) {
        if (spec.shape != RelationShape::intra) continue;
        if (spec.acyclic)
            for (const DomainExpr& d : store.domains(spec.name)) check_acyclic(store, spec, d, report.errors);
        collect_witnesses(store, spec, report.separation_witnesses);
    }
    collect_domain_lints(store, report.warnings);
    return report;
}

std::string render_text(const ConsistencyReport& report) {
    std::ostringstream out;
    for (const Violation& v : report.errors) out << "error: " << v.description << '\n';
    for (const Lint& l : report.warnings) out << "warning: " << l.description << '\n';
    for (const SeparationWitness& w : report.separation_witnesses) {
        out << "separation: " << w.relation.str() << '(' << w.subject.str() << ", " << w.object1.str() << ", \""
            << w.domain1.format() << "\") / " << w.relation.str() << '(' << w.subject.str() << ", "
            << w.object2.str() << ", \"" << w.domain2.format() << "\")\n";
    }
    out << report.errors.size() << " error(s), " << report.warnings.size() << " warning(s), "
        << report.separation_witnesses.size() << " separation witness(es)\n";
    return out.str();
}

std::string render_json_lines(const ConsistencyReport& report) {
    std::ostringstream out;
    for (const Violation& v : report.errors) {
        nlohmann::json j{{"type", "error"},
                         {"kind", to_string(v.kind)},
                         {"relation", v.relation.str()},
                         {"domain", v.domain.format()},
                         {"description", v.description}};
        j["facts"] = nlohmann::json::array();
        for (const Fact& f : v.facts) j["facts"].push_back(to_string(f));
        j["cycle"] = nlohmann::json::array();
        for (ConceptId c : v.cycle) j["cycle"].push_back(c.str());
        out << j.dump() << '\n';
    }
    for (const Lint& l : report.warnings) {
        nlohmann::json j{{"type", "warning"}, {"kind", to_string(l.kind)}, {"description", l.description},
                         {"subjects", l.subjects}};
        out << j.dump() << '\n';
    }
    for (const SeparationWitness& w : report.separation_witnesses) {
        nlohmann::json j{{"type", "separation_witness"},
                         {"relation", w.relation.str()},
                         {"concept", w.subject.str()},
                         {"object1", w.object1.str()},
                         {"domain1", w.domain1.format()},
                         {"object2", w.object2.str()},
                         {"domain2", w.domain2.format()}};
        out << j.dump() << '\n';
    }
    return out.str();
}

}  // namespace cdc
