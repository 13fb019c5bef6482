#include "cdc/fact.hpp"

#include <tuple>

namespace cdc {

ConceptId Fact::subject() const noexcept {
    return std::visit([](const auto& a) {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, IntraArgs>) return a.subject;
        else return a.left;
    }, args);
}

ConceptId Fact::object() const noexcept {
    return std::visit([](const auto& a) {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, IntraArgs>) return a.object;
        else return a.right;
    }, args);
}

DomainExpr Fact::domain() const noexcept {
    return std::visit([](const auto& a) {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, CrossArgs>) return a.left_domain;
        else return a.domain;
    }, args);
}

std::vector<DomainExpr> Fact::domains() const {
    if (const auto* c = as_cross()) {
        if (c->left_domain == c->right_domain) return {c->left_domain};
        return {c->left_domain, c->right_domain};
    }
    return {domain()};
}

Fact Fact::reversed() const {
    Fact out = *this;
    if (auto* a = std::get_if<IntraArgs>(&out.args)) std::swap(a->subject, a->object);
    else if (auto* c = std::get_if<CrossArgs>(&out.args)) {
        std::swap(c->left, c->right);
        std::swap(c->left_domain, c->right_domain);
    } else if (auto* f = std::get_if<FusionArgs>(&out.args)) std::swap(f->left, f->right);
    return out;
}

std::size_t Fact::hash() const noexcept {
    std::size_t h = relation.hash();
    h = hash_combine(h, args.index());
    std::visit([&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IntraArgs>) {
            h = hash_combine(h, a.subject.hash());
            h = hash_combine(h, a.object.hash());
            h = hash_combine(h, a.domain.hash());
        } else if constexpr (std::is_same_v<T, CrossArgs>) {
            h = hash_combine(h, a.left.hash());
            h = hash_combine(h, a.right.hash());
            h = hash_combine(h, a.left_domain.hash());
            h = hash_combine(h, a.right_domain.hash());
        } else {
            h = hash_combine(h, a.left.hash());
            h = hash_combine(h, a.right.hash());
            h = hash_combine(h, a.fused.hash());
            h = hash_combine(h, a.domain.hash());
        }
    }, args);
    return h;
}

Fact canonical(const Fact& f, const RelationSpec& spec) {
    if (!spec.symmetric) return f;
    if (const auto* a = f.as_intra()) return a->object < a->subject ? f.reversed() : f;
    if (const auto* c = f.as_cross()) {
        auto lhs = std::tie(c->left, c->left_domain);
        auto rhs = std::tie(c->right, c->right_domain);
        return rhs < lhs ? f.reversed() : f;
    }
    if (const auto* u = f.as_fusion()) return u->right < u->left ? f.reversed() : f;
    return f;
}

std::strong_ordering fact_compare(const Fact& a, const Fact& b) {
    if (auto c = a.relation <=> b.relation; c != 0) return c;
    if (auto c = a.domain() <=> b.domain(); c != 0) return c;
    if (auto c = a.subject() <=> b.subject(); c != 0) return c;
    if (auto c = a.object() <=> b.object(); c != 0) return c;
    if (auto c = a.args.index() <=> b.args.index(); c != 0) return c;
    if (const auto* x = a.as_cross()) return x->right_domain <=> b.as_cross()->right_domain;
    if (const auto* x = a.as_fusion()) return x->fused <=> b.as_fusion()->fused;
    return std::strong_ordering::equal;
}

bool fact_less(const Fact& a, const Fact& b) { return fact_compare(a, b) < 0; }

bool is_bare_atom(std::string_view text) noexcept {
    if (text.empty() || !is_atom_start(text.front())) return false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (!is_atom_char(c)) return false;
        // The reader only continues an atom through `.`/`-` when another atom
        // character follows, so `a.` would not read back as one token.
        if ((c == '.' || c == '-') && (i + 1 == text.size() || !is_atom_start(text[i + 1]))) return false;
    }
    return true;
}

std::string quote_atom(std::string_view text) {
    std::string out = "'";
    for (char c : text) {
        switch (c) {
            case '\'': out += "\\'"; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '\'';
    return out;
}

std::string render_concept(ConceptId c) { return is_bare_atom(c.str()) ? c.str() : quote_atom(c.str()); }

namespace {
std::string quoted_domain(const DomainExpr& d) { return "\"" + d.format() + "\""; }
}  // namespace

std::string to_string(const Fact& f, std::string_view relation_name) {
    std::string out(relation_name);
    out += '(';
    std::visit([&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IntraArgs>) {
            out += render_concept(a.subject) + ", " + render_concept(a.object) + ", " + quoted_domain(a.domain);
        } else if constexpr (std::is_same_v<T, CrossArgs>) {
            out += render_concept(a.left) + ", " + render_concept(a.right) + ", " + quoted_domain(a.left_domain) +
                   ", " + quoted_domain(a.right_domain);
        } else {
            out += render_concept(a.left) + ", " + render_concept(a.right) + ", " + render_concept(a.fused) +
                   ", " + quoted_domain(a.domain);
        }
    }, f.args);
    out += ')';
    return out;
}

std::string to_string(const Fact& f) { return to_string(f, f.relation.str()); }

bool FactPattern::matches(const Fact& f) const {
    if (f.relation != relation) return false;
    if (subject && f.subject() != *subject) return false;
    if (object && f.object() != *object) return false;
    if (domain && f.domain() != *domain) return false;
    if (fused) {
        const auto* u = f.as_fusion();
        if (!u || u->fused != *fused) return false;
    }
    if (right_domain) {
        const auto* c = f.as_cross();
        if (!c || c->right_domain != *right_domain) return false;
    }
    return true;
}

}  // namespace cdc
