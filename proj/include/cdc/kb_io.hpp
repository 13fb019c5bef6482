#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdc/fact.hpp"
#include "cdc/fact_store.hpp"

namespace cdc {

struct SourceSpan {
    std::string file;
    std::size_t line = 0;    // 1-based
    std::size_t column = 0;  // 1-based, bytes
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity;
    SourceSpan span;
    std::string message;

    // `file:line:column: error: message`
    std::string render() const;
};

// native: the fact-file format; bare words are constants.
// prolog: ISO-style reading, capitalized words and `_x` are variables, and
// `:-` directives and rules are skipped. Used to read interop exports.
enum class Dialect { native, prolog };

struct Clause {
    std::variant<RelationSpec, Fact> value;  // `@relation` directive or fact
    SourceSpan span;
};

// Pull parser over one source text. Malformed clauses are reported and skipped
// up to the next terminating period.
class ClauseReader {
public:
    ClauseReader(std::string_view text, std::string file, Dialect dialect = Dialect::native);
    ~ClauseReader();
    ClauseReader(const ClauseReader&) = delete;
    ClauseReader& operator=(const ClauseReader&) = delete;

    // Facts are checked against `registry` (relation known, arity, domain
    // syntax). nullopt at end of input.
    std::optional<Clause> next(const RelationRegistry& registry, std::vector<Diagnostic>& diagnostics);

private:
    struct Impl;
    Impl* impl_;
};

struct LoadedFact {
    Fact fact;
    SourceSpan span;
};

struct LoadResult {
    // Newly asserted facts in source order.
    std::vector<LoadedFact> facts;
    std::vector<Diagnostic> diagnostics;

    std::size_t error_count() const;
    std::size_t warning_count() const { return diagnostics.size() - error_count(); }
    bool ok() const { return error_count() == 0; }
};

// Asserts every well-formed clause in order; keeps going after errors.
// Duplicates are warnings.
LoadResult load_text(FactStore& store, std::string_view text, std::string file = "<input>",
                     Dialect dialect = Dialect::native);
// Throws Error if the file cannot be read.
LoadResult load_file(FactStore& store, const std::filesystem::path& path, Dialect dialect = Dialect::native);

// Canonical native text: `@relation` lines for relations that are not
// builtins (or differ from them), then one fact per line in fact_less order.
std::string save_text(const FactStore& store);
void save_file(const FactStore& store, const std::filesystem::path& path);

// ISO-Prolog clause text: dynamic declarations, facts with lowercased concepts
// and quoted-atom domains, closure and inheritance rules.
std::string export_interop_text(const FactStore& store);
void export_interop(const FactStore& store, const std::filesystem::path& path);

// Concept or relation name as a Prolog atom: bare if it matches [a-z][A-Za-z0-9_]*,
// otherwise single-quoted.
std::string prolog_atom(std::string_view text);
std::string lowercase(std::string_view text);

// `education`, `enterprise`, `techdocs`, `cbt`.
std::vector<std::string> casestudy_names();
// Native source of a bundled knowledge base; throws NotFoundError.
std::string_view casestudy_text(std::string_view name);
LoadResult load_builtin_casestudy(FactStore& store, std::string_view name);

}  // namespace cdc
