#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdc {

// One `@`-delimited piece of a domain path: a single atom, or a `+` fusion of
// two or more atoms. Fusion is a set: equality and formatting use the sorted,
// de-duplicated atoms; the order written in the source is kept separately.
class DomainSegment {
public:
    enum class Kind { atom, fusion };

    explicit DomainSegment(std::vector<std::string> atoms);

    Kind kind() const noexcept { return canonical_.size() == 1 ? Kind::atom : Kind::fusion; }
    const std::vector<std::string>& atoms() const noexcept { return canonical_; }
    const std::vector<std::string>& source_atoms() const noexcept { return source_; }
    std::string format() const;

    friend bool operator==(const DomainSegment& a, const DomainSegment& b) {
        return a.canonical_ == b.canonical_;
    }

private:
    std::vector<std::string> source_;
    std::vector<std::string> canonical_;
};

namespace detail {
struct DomainRep;
}

// Parsed domain path, outermost segment first. Values are interned and
// immutable, so copies are a pointer and safe to share across threads. Equality
// and ordering use the canonical text.
class DomainExpr {
public:
    // Parses `text` per the domain grammar; throws DomainParseError.
    static DomainExpr parse(std::string_view text);
    // Builds from already-validated segments.
    static DomainExpr from_segments(std::vector<DomainSegment> segments);

    const std::vector<DomainSegment>& segments() const noexcept;
    std::size_t depth() const noexcept { return segments().size(); }
    // Canonical form: fusion atoms sorted and de-duplicated.
    const std::string& format() const noexcept;
    // The text this value was parsed from (canonical text when built otherwise).
    const std::string& source() const noexcept;

    // Appends `child`'s segments below this path.
    DomainExpr refine(const DomainExpr& child) const;

    friend bool operator==(const DomainExpr& a, const DomainExpr& b) noexcept {
        return a.canonical_key() == b.canonical_key();
    }
    friend std::strong_ordering operator<=>(const DomainExpr& a, const DomainExpr& b) noexcept {
        if (a.canonical_key() == b.canonical_key()) return std::strong_ordering::equal;
        return a.format().compare(b.format()) <=> 0;
    }

    std::size_t hash() const noexcept { return std::hash<const void*>{}(canonical_key()); }

private:
    explicit DomainExpr(const detail::DomainRep* rep) : rep_(rep) {}
    const void* canonical_key() const noexcept;

    const detail::DomainRep* rep_;
};

inline DomainExpr parse_domain(std::string_view text) { return DomainExpr::parse(text); }
inline std::string format_domain(const DomainExpr& d) { return d.format(); }

// True iff general's segments are a leading sublist of specific's.
bool is_prefix_of(const DomainExpr& general, const DomainExpr& specific);

// Symmetric fusion of two domains into one fusion segment. Single-segment inputs
// contribute their atoms; a multi-segment input contributes one opaque atom
// derived from its canonical text (see opaque_atom).
DomainExpr fuse(const DomainExpr& a, const DomainExpr& b);

// Encodes a multi-segment path as a single atom: `@` -> `.`, `+` -> `-`.
std::string opaque_atom(const DomainExpr& d);

bool is_atom_char(char c) noexcept;
bool is_atom_start(char c) noexcept;
bool is_valid_atom(std::string_view atom) noexcept;

}  // namespace cdc

template <>
struct std::hash<cdc::DomainExpr> {
    std::size_t operator()(const cdc::DomainExpr& d) const noexcept { return d.hash(); }
};
