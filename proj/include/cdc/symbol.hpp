#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace cdc {

namespace detail {
// Returns a pointer that stays valid for the life of the process. Thread-safe.
const std::string* intern_string(std::string_view text);
}  // namespace detail

// Interned identifier. Equality is pointer identity; ordering is lexicographic
// on the underlying text, so sorted output never depends on allocation order.
template <class Tag>
class Symbol {
public:
    Symbol() : text_(detail::intern_string({})) {}
    explicit Symbol(std::string_view text) : text_(detail::intern_string(text)) {}

    const std::string& str() const noexcept { return *text_; }
    bool empty() const noexcept { return text_->empty(); }

    friend bool operator==(Symbol a, Symbol b) noexcept { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(Symbol a, Symbol b) noexcept {
        if (a.text_ == b.text_) return std::strong_ordering::equal;
        return a.text_->compare(*b.text_) <=> 0;
    }

    std::size_t hash() const noexcept { return std::hash<const void*>{}(text_); }

private:
    const std::string* text_;
};

struct ConceptTag {};
struct RelationTag {};

using ConceptId = Symbol<ConceptTag>;
using RelationId = Symbol<RelationTag>;

inline std::size_t hash_combine(std::size_t seed, std::size_t v) noexcept {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace cdc

template <class Tag>
struct std::hash<cdc::Symbol<Tag>> {
    std::size_t operator()(cdc::Symbol<Tag> s) const noexcept { return s.hash(); }
};
