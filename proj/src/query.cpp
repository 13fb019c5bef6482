#include "cdc/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cdc/error.hpp"

namespace cdc {

namespace {

enum class Slot { concept_slot, domain_slot };

std::vector<Slot> slots_for(const Query& q, const RelationRegistry& registry) {
    constexpr Slot C = Slot::concept_slot, D = Slot::domain_slot;
    switch (q.goal_kind) {
        case Query::Goal::relation:
            switch (registry.lookup(q.relation).shape) {
                case RelationShape::intra: return {C, C, D};
                case RelationShape::cross: return {C, C, D, D};
                case RelationShape::fusion: return {C, C, C, D};
            }
            break;
        case Query::Goal::star: return {C, C, D};
        case Query::Goal::all_prerequisites: return {C, D, C};
        case Query::Goal::inherited_attributes: return {C, D, C, C};
        case Query::Goal::analogy_search: return {C, C, D, D};
    }
    return {};
}

class QueryParser {
public:
    QueryParser(std::string_view text, const RelationRegistry& registry) : src_(text), registry_(registry) {}

    Query parse() {
        skip_ws();
        if (src_.substr(pos_, 2) == "?-") {
            pos_ += 2;
            skip_ws();
        }
        Query q;
        const std::size_t name_at = pos_;
        q.goal = atom();
        if (q.goal.empty()) fail("expected goal name");
        resolve_goal(q, name_at);

        skip_ws();
        expect('(');
        q.args.push_back(term());
        skip_ws();
        while (peek() == ',') {
            ++pos_;
            q.args.push_back(term());
            skip_ws();
        }
        if (peek() != ')') {
            if (pos_ >= src_.size()) fail("expected ',' or ')', found end of query");
            fail(std::string("expected ',' or ')', found '") + peek() + "'");
        }
        ++pos_;
        skip_ws();
        if (peek() == '.') {
            ++pos_;
            skip_ws();
        }
        if (pos_ < src_.size()) fail("unexpected text after query");
        check_arguments(q, name_at);
        return q;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw QueryError(message, pos_); }
    [[noreturn]] static void fail_at(const std::string& message, std::size_t at) { throw QueryError(message, at); }

    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            if (pos_ >= src_.size()) fail(std::string("expected '") + c + "', found end of query");
            fail(std::string("expected '") + c + "', found '" + peek() + "'");
        }
        ++pos_;
    }

    std::string atom() {
        std::string out;
        if (pos_ >= src_.size() || !is_atom_start(src_[pos_])) return out;
        while (pos_ < src_.size() && is_atom_char(src_[pos_])) {
            char c = src_[pos_];
            if ((c == '.' || c == '-') && (pos_ + 1 >= src_.size() || !is_atom_start(src_[pos_ + 1]))) break;
            out += c;
            ++pos_;
        }
        return out;
    }

    std::string quoted(char quote) {
        const std::size_t start = pos_;
        ++pos_;
        std::string out;
        while (pos_ < src_.size()) {
            char c = src_[pos_++];
            if (c == quote) {
                if (quote == '\'' && peek() == '\'') {
                    out += '\'';
                    ++pos_;
                    continue;
                }
                return out;
            }
            if (c == '\\' && pos_ < src_.size()) c = src_[pos_++];
            out += c;
        }
        fail_at(quote == '"' ? "unterminated domain literal" : "unterminated quoted atom", start);
    }

    QueryTerm term() {
        skip_ws();
        const std::size_t at = pos_;
        const char c = peek();
        if (c == '?') {
            ++pos_;
            std::string name;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                name += src_[pos_++];
            if (name.empty()) fail_at("expected variable name after '?'", at);
            return {QueryTerm::Kind::variable, "?" + name, at};
        }
        if (c == '"') return {QueryTerm::Kind::domain_literal, quoted('"'), at};
        if (c == '\'') {
            std::string text = quoted('\'');
            if (text.empty()) fail_at("empty quoted atom", at);
            return {QueryTerm::Kind::constant, std::move(text), at};
        }
        std::string text = atom();
        if (text.empty()) {
            if (pos_ >= src_.size()) fail("expected argument, found end of query");
            fail(std::string("expected argument, found '") + c + "'");
        }
        return {QueryTerm::Kind::constant, std::move(text), at};
    }

    void resolve_goal(Query& q, std::size_t at) const {
        if (q.goal == kAllPrerequisites) {
            q.goal_kind = Query::Goal::all_prerequisites;
            q.relation = RelationId("requires");
        } else if (q.goal == kInheritedAttributes) {
            q.goal_kind = Query::Goal::inherited_attributes;
            q.relation = RelationId("has_attribute");
        } else if (q.goal == kAnalogySearch) {
            q.goal_kind = Query::Goal::analogy_search;
            q.relation = RelationId("analogous_to");
        } else if (const RelationSpec* spec = registry_.find(q.goal)) {
            q.goal_kind = Query::Goal::relation;
            q.relation = spec->name;
            return;
        } else if (const RelationSpec* base = registry_.star_base(q.goal)) {
            q.goal_kind = Query::Goal::star;
            q.relation = base->name;
            return;
        } else {
            fail_at("unknown goal '" + q.goal + "'", at);
        }
        if (!registry_.contains(q.relation))
            fail_at("goal " + q.goal + " needs relation " + q.relation.str() + ", which is not registered", at);
    }

    void check_arguments(const Query& q, std::size_t name_at) const {
        const auto slots = slots_for(q, registry_);
        if (q.args.size() != slots.size()) {
            fail_at(q.goal + " expects " + std::to_string(slots.size()) + " arguments, got " +
                        std::to_string(q.args.size()),
                    name_at);
        }
        std::map<std::string, Slot> var_slots;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const QueryTerm& t = q.args[i];
            if (t.kind == QueryTerm::Kind::variable) {
                auto [it, inserted] = var_slots.emplace(t.text, slots[i]);
                if (!inserted && it->second != slots[i])
                    fail_at("variable " + t.text + " used as both concept and domain", t.offset);
                continue;
            }
            if (slots[i] == Slot::concept_slot) {
                if (t.kind == QueryTerm::Kind::domain_literal)
                    fail_at("domain literal in concept position", t.offset);
                continue;
            }
            try {
                (void)parse_domain(t.text);
            } catch (const DomainParseError& e) {
                const std::size_t skip = t.kind == QueryTerm::Kind::domain_literal ? 1 : 0;
                fail_at(std::string("invalid domain: ") + e.what(), t.offset + skip + e.offset());
            }
        }
    }

    std::string_view src_;
    const RelationRegistry& registry_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

using Row = std::array<std::string, 4>;

struct Bound {
    std::optional<ConceptId> concept_value;
    // Admissible fact domains (one for exact matching, every prefix otherwise).
    std::vector<DomainExpr> domains;
    bool is_domain = false;
    bool constant = false;
};

std::vector<DomainExpr> admissible(const DomainExpr& d, DomainMatch match) {
    if (match == DomainMatch::exact) return {d};
    std::vector<DomainExpr> out;
    const auto& segments = d.segments();
    for (std::size_t n = 1; n <= segments.size(); ++n)
        out.push_back(DomainExpr::from_segments({segments.begin(), segments.begin() + static_cast<std::ptrdiff_t>(n)}));
    return out;
}

class Evaluator {
public:
    Evaluator(const Query& q, const FactStore& store, const ClosureSet* closure, bool strict)
        : q_(q), store_(store), closure_(closure), strict_(strict) {
        const auto slots = slots_for(q, store.registry());
        for (std::size_t i = 0; i < q.args.size(); ++i) {
            Bound b;
            b.is_domain = slots[i] == Slot::domain_slot;
            if (q.args[i].kind != QueryTerm::Kind::variable) {
                b.constant = true;
                if (b.is_domain) b.domains = admissible(parse_domain(q.args[i].text), q.domain_match);
                else b.concept_value = ConceptId(q.args[i].text);
            }
            bounds_.push_back(std::move(b));
        }
    }

    BindingSet run() {
        std::vector<Row> rows;
        switch (q_.goal_kind) {
            case Query::Goal::relation: relation_rows(rows); break;
            case Query::Goal::star: star_rows(rows); break;
            case Query::Goal::all_prerequisites: prerequisite_rows(rows); break;
            case Query::Goal::inherited_attributes: inherited_rows(rows); break;
            case Query::Goal::analogy_search: analogy_rows(rows); break;
        }
        return unify(rows);
    }

private:
    const ClosureSet& closure() {
        if (closure_ && closure_->is_current_for(store_)) return *closure_;
        if (strict_) throw QueryError("closure is not materialized (run materialize first)", 0);
        if (!owned_) owned_ = materialize(store_);
        return *owned_;
    }

    // Domain choices for slot i: the admissible set for constants, or "any".
    std::vector<std::optional<DomainExpr>> domain_choices(std::size_t i) const {
        if (!bounds_[i].constant) return {std::nullopt};
        return {bounds_[i].domains.begin(), bounds_[i].domains.end()};
    }

    std::vector<DomainExpr> domains_or(std::size_t i, RelationId relation) const {
        if (bounds_[i].constant) return bounds_[i].domains;
        return store_.domains(relation);
    }

    static Row row_of(const Fact& f) {
        if (const auto* a = f.as_intra()) return {a->subject.str(), a->object.str(), a->domain.format(), {}};
        if (const auto* c = f.as_cross())
            return {c->left.str(), c->right.str(), c->left_domain.format(), c->right_domain.format()};
        const auto* u = f.as_fusion();
        return {u->left.str(), u->right.str(), u->fused.str(), u->domain.format()};
    }

    template <class Source>
    void scan(const Source& source, RelationId relation, std::vector<Row>& rows) const {
        const RelationShape shape = store_.registry().lookup(q_.relation).shape;
        FactPattern p{relation};
        p.subject = bounds_[0].concept_value;
        p.object = bounds_[1].concept_value;
        std::size_t primary = 2;
        std::optional<std::size_t> secondary;
        if (shape == RelationShape::cross) secondary = 3;
        if (shape == RelationShape::fusion) {
            p.fused = bounds_[2].concept_value;
            primary = 3;
        }
        for (const auto& d1 : domain_choices(primary)) {
            p.domain = d1;
            const auto seconds = secondary ? domain_choices(*secondary) : std::vector<std::optional<DomainExpr>>{std::nullopt};
            for (const auto& d2 : seconds) {
                p.right_domain = d2;
                for (const Fact& f : source.match(p)) rows.push_back(row_of(f));
            }
        }
    }

    bool derives(const RelationSpec& spec) const { return spec.symmetric || spec.reflexive || spec.inherits_via; }

    void relation_rows(std::vector<Row>& rows) {
        scan(store_, q_.relation, rows);
        if (q_.source == FactSource::all && derives(store_.registry().lookup(q_.relation)))
            scan(closure(), q_.relation, rows);
    }

    void star_rows(std::vector<Row>& rows) {
        if (q_.source == FactSource::asserted) scan(store_, q_.relation, rows);
        else scan(closure(), RelationId(star_name(q_.relation)), rows);
    }

    // Subjects of `relation` facts in domain d.
    std::vector<ConceptId> subjects(RelationId relation, const DomainExpr& d) const {
        std::vector<ConceptId> out;
        if (!store_.registry().contains(relation)) return out;
        for (FactId id : store_.partition(relation, d)) out.push_back(store_.fact(id).subject());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void prerequisite_rows(std::vector<Row>& rows) {
        for (const DomainExpr& d : domains_or(1, q_.relation)) {
            const auto targets = bounds_[0].concept_value ? std::vector<ConceptId>{*bounds_[0].concept_value}
                                                          : subjects(q_.relation, d);
            for (ConceptId t : targets) {
                std::vector<ConceptId> prereqs;
                if (q_.source == FactSource::asserted) {
                    FactPattern p{q_.relation};
                    p.subject = t;
                    p.domain = d;
                    for (const Fact& f : store_.match(p)) prereqs.push_back(f.object());
                } else {
                    prereqs = all_prerequisites(store_, t, d, q_.relation);
                }
                for (ConceptId p : prereqs) rows.push_back({t.str(), d.format(), p.str(), {}});
            }
        }
    }

    void inherited_rows(std::vector<Row>& rows) {
        const RelationSpec& spec = store_.registry().lookup(q_.relation);
        for (const DomainExpr& d : domains_or(1, q_.relation)) {
            std::vector<ConceptId> concepts;
            if (bounds_[0].concept_value) {
                concepts = {*bounds_[0].concept_value};
            } else {
                concepts = subjects(q_.relation, d);
                if (spec.inherits_via)
                    for (ConceptId c : subjects(*spec.inherits_via, d)) concepts.push_back(c);
                std::sort(concepts.begin(), concepts.end());
                concepts.erase(std::unique(concepts.begin(), concepts.end()), concepts.end());
            }
            for (ConceptId c : concepts)
                for (const InheritedAttribute& a : inherited_attributes(store_, c, d, q_.relation))
                    if (q_.source == FactSource::all || a.source == c)
                        rows.push_back({c.str(), d.format(), a.attribute.str(), a.source.str()});
        }
    }

    void analogy_rows(std::vector<Row>& rows) {
        std::vector<ConceptId> concepts;
        if (bounds_[0].concept_value) {
            concepts = {*bounds_[0].concept_value};
        } else {
            for (FactId id : store_.by_relation(q_.relation)) {
                concepts.push_back(store_.fact(id).subject());
                concepts.push_back(store_.fact(id).object());
            }
            std::sort(concepts.begin(), concepts.end());
            concepts.erase(std::unique(concepts.begin(), concepts.end()), concepts.end());
        }
        for (ConceptId c : concepts)
            for (const auto& d : domain_choices(2))
                for (const Analogy& a : analogy_search(store_, c, d, DomainMatch::exact, q_.relation))
                    rows.push_back({c.str(), a.counterpart.str(), a.concept_domain.format(), a.counterpart_domain.format()});
    }

    bool admits(std::size_t i, const std::string& value) const {
        const Bound& b = bounds_[i];
        if (!b.constant) return true;
        if (!b.is_domain) return b.concept_value->str() == value;
        return std::any_of(b.domains.begin(), b.domains.end(), [&](const DomainExpr& d) { return d.format() == value; });
    }

    BindingSet unify(const std::vector<Row>& rows) const {
        BindingSet out;
        out.variables = q_.variables();
        std::set<std::vector<std::string>> seen;
        for (const Row& row : rows) {
            std::vector<std::string> solution(out.variables.size());
            std::vector<bool> set(out.variables.size(), false);
            bool ok = true;
            for (std::size_t i = 0; i < q_.args.size() && ok; ++i) {
                if (q_.args[i].kind != QueryTerm::Kind::variable) {
                    ok = admits(i, row[i]);
                    continue;
                }
                const auto v = static_cast<std::size_t>(
                    std::find(out.variables.begin(), out.variables.end(), q_.args[i].text) - out.variables.begin());
                if (set[v]) ok = solution[v] == row[i];
                solution[v] = row[i];
                set[v] = true;
            }
            if (ok) seen.insert(std::move(solution));
        }
        out.solutions.assign(seen.begin(), seen.end());
        return out;
    }

    const Query& q_;
    const FactStore& store_;
    const ClosureSet* closure_;
    bool strict_;
    std::optional<ClosureSet> owned_;
    std::vector<Bound> bounds_;
};

}  // namespace

std::vector<std::string> Query::variables() const {
    std::vector<std::string> out;
    for (const QueryTerm& t : args)
        if (t.kind == QueryTerm::Kind::variable && std::find(out.begin(), out.end(), t.text) == out.end())
            out.push_back(t.text);
    return out;
}

Query parse_query(std::string_view text, const RelationRegistry& registry) {
    return QueryParser(text, registry).parse();
}

Query parse_query(std::string_view text) {
    static const RelationRegistry builtins = builtin_registry();
    return parse_query(text, builtins);
}

BindingSet eval_query(const Query& query, const FactStore& store, const ClosureSet* closure, bool strict) {
    if (!store.registry().contains(query.relation))
        throw QueryError("relation " + query.relation.str() + " is not registered in this store", 0);
    return Evaluator(query, store, closure, strict).run();
}

std::vector<std::string> BindingSet::column(std::string_view variable) const {
    std::vector<std::string> out;
    auto it = std::find(variables.begin(), variables.end(), variable);
    if (it == variables.end()) return out;
    const auto i = static_cast<std::size_t>(it - variables.begin());
    for (const auto& row : solutions) out.push_back(row[i]);
    return out;
}

std::string render_text(const BindingSet& bindings) {
    if (bindings.variables.empty()) return bindings.empty() ? "false.\n" : "true.\n";
    if (bindings.empty()) return "false.\n";
    std::string out;
    for (const auto& row : bindings.solutions) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ", ";
            out += bindings.variables[i] + " = " + row[i];
        }
        out += '\n';
    }
    return out;
}

std::string render_json_lines(const BindingSet& bindings) {
    std::string out;
    for (const auto& row : bindings.solutions) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) j[bindings.variables[i]] = row[i];
        out += j.dump() + '\n';
    }
    return out;
}

}  // namespace cdc
