#include "cdc/kb_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cdc/error.hpp"

namespace cdc {

std::string Diagnostic::render() const {
    std::ostringstream out;
    out << span.file << ':' << span.line << ':' << span.column << ": "
        << (severity == Severity::error ? "error" : "warning") << ": " << message;
    return out.str();
}

std::size_t LoadResult::error_count() const {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::error;
    }));
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { atom, variable, quoted, string, lparen, rparen, comma, end, at, neck, other, bad, eof };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    Lexer(std::string_view text, Dialect dialect) : src_(text), dialect_(dialect) {}

    Token next() {
        skip_blank();
        const std::size_t line = line_, column = column_;
        if (pos_ >= src_.size()) return {Tok::eof, {}, line, column};
        const char c = src_[pos_];
        auto single = [&](Tok kind) {
            advance();
            return Token{kind, std::string(1, c), line, column};
        };
        switch (c) {
            case '(': return single(Tok::lparen);
            case ')': return single(Tok::rparen);
            case ',': return single(Tok::comma);
            case '@': return single(Tok::at);
            case '\'': return quoted('\'', Tok::quoted, line, column);
            case '"': return quoted('"', Tok::string, line, column);
            case '.':
                if (pos_ + 1 >= src_.size() || std::isspace(static_cast<unsigned char>(src_[pos_ + 1])) ||
                    src_[pos_ + 1] == '%')
                    return single(Tok::end);
                return single(Tok::other);
            case ':':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
                    advance();
                    advance();
                    return {Tok::neck, ":-", line, column};
                }
                return single(Tok::other);
            default: break;
        }
        if (is_atom_start(c)) {
            std::string text;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (!is_atom_char(d)) break;
                if ((d == '.' || d == '-') && (pos_ + 1 >= src_.size() || !is_atom_start(src_[pos_ + 1]))) break;
                text += d;
                advance();
            }
            const bool variable = dialect_ == Dialect::prolog && (std::isupper(static_cast<unsigned char>(c)) || c == '_');
            return {variable ? Tok::variable : Tok::atom, std::move(text), line, column};
        }
        return single(Tok::other);
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token quoted(char quote, Tok kind, std::size_t line, std::size_t column) {
        advance();
        std::string text;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') break;
            if (c == quote) {
                if (quote == '\'' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
                    text += '\'';
                    advance();
                    advance();
                    continue;
                }
                advance();
                return {kind, std::move(text), line, column};
            }
            if (c == '\\' && pos_ + 1 < src_.size()) {
                advance();
                char e = src_[pos_];
                switch (e) {
                    case 'n': text += '\n'; break;
                    case 't': text += '\t'; break;
                    default: text += e;
                }
                advance();
                continue;
            }
            text += c;
            advance();
        }
        return {Tok::bad, quote == '"' ? "unterminated string" : "unterminated quoted atom", line, column};
    }

    std::string_view src_;
    Dialect dialect_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::eof: return "end of input";
        case Tok::end: return "'.'";
        case Tok::string: return "string \"" + t.text + "\"";
        case Tok::quoted: return "quoted atom '" + t.text + "'";
        default: return "'" + t.text + "'";
    }
}

struct SyntaxError {
    Token at;
    std::string message;
};

}  // namespace

// ---------------------------------------------------------------------------
// Parser

struct ClauseReader::Impl {
    Lexer lexer;
    std::string file;
    Dialect dialect;
    Token look;
    // Set once the current clause's period is consumed; errors raised after
    // that point must not skip into the next clause.
    bool terminated = false;

    Impl(std::string_view text, std::string f, Dialect d) : lexer(text, d), file(std::move(f)), dialect(d) {
        look = lexer.next();
    }

    SourceSpan span(const Token& t) const { return {file, t.line, t.column}; }

    Token take() {
        Token t = std::move(look);
        look = lexer.next();
        return t;
    }

    Token expect(Tok kind, std::string_view what) {
        if (look.kind == Tok::bad && kind != Tok::bad) throw SyntaxError{look, look.text};
        if (look.kind != kind) throw SyntaxError{look, "expected " + std::string(what) + ", found " + describe(look)};
        return take();
    }

    // Skips to just past the next terminating period.
    void recover() {
        while (look.kind != Tok::eof && look.kind != Tok::end) take();
        if (look.kind == Tok::end) take();
    }

    RelationSpec directive() {
        Token keyword = expect(Tok::atom, "'relation' after '@'");
        if (keyword.text != "relation") throw SyntaxError{keyword, "unknown directive @" + keyword.text};
        Token name = expect(Tok::atom, "relation name");
        Token shape_tok = expect(Tok::atom, "relation shape (intra, cross or fusion)");
        auto shape = parse_shape(shape_tok.text);
        if (!shape) throw SyntaxError{shape_tok, "unknown relation shape '" + shape_tok.text + "'"};
        RelationSpec spec{RelationId(name.text), *shape};
        while (look.kind != Tok::end) {
            Token flag = expect(Tok::atom, "relation flag or '.'");
            if (flag.text == "transitive") spec.transitive = true;
            else if (flag.text == "symmetric") spec.symmetric = true;
            else if (flag.text == "reflexive") spec.reflexive = true;
            else if (flag.text == "acyclic") spec.acyclic = true;
            else if (flag.text == "inherits_via") {
                expect(Tok::lparen, "'('");
                spec.inherits_via = RelationId(expect(Tok::atom, "relation name").text);
                expect(Tok::rparen, "')'");
            } else {
                throw SyntaxError{flag, "unknown relation flag '" + flag.text + "'"};
            }
        }
        take();
        return spec;
    }

    ConceptId concept_arg(const Token& t) const {
        switch (t.kind) {
            case Tok::atom:
            case Tok::quoted:
                if (t.text.empty()) throw SyntaxError{t, "empty concept name"};
                return ConceptId(t.text);
            case Tok::string: throw SyntaxError{t, "domain string in concept position"};
            case Tok::variable: throw SyntaxError{t, "variable " + t.text + " in fact"};
            default: throw SyntaxError{t, "expected concept, found " + describe(t)};
        }
    }

    DomainExpr domain_arg(const Token& t) const {
        if (t.kind == Tok::variable) throw SyntaxError{t, "variable " + t.text + " in fact"};
        if (t.kind != Tok::atom && t.kind != Tok::quoted && t.kind != Tok::string)
            throw SyntaxError{t, "expected domain, found " + describe(t)};
        try {
            return parse_domain(t.text);
        } catch (const DomainParseError& e) {
            Token at = t;
            at.column += (t.kind == Tok::atom ? 0 : 1) + e.offset();
            throw SyntaxError{at, std::string("invalid domain: ") + e.what()};
        }
    }

    std::optional<Fact> clause(const RelationRegistry& registry) {
        Token name = take();
        if (name.kind == Tok::variable) throw SyntaxError{name, "clause head cannot be a variable"};
        std::vector<Token> args;
        if (look.kind == Tok::lparen) {
            take();
            args.push_back(arg_token());
            while (look.kind == Tok::comma) {
                take();
                args.push_back(arg_token());
            }
            expect(Tok::rparen, "',' or ')'");
        }
        if (look.kind == Tok::neck && dialect == Dialect::prolog) {
            recover();  // rule
            return std::nullopt;
        }
        if (look.kind != Tok::end) throw SyntaxError{look, "expected '.' after clause, found " + describe(look)};
        take();
        terminated = true;

        const RelationSpec* spec = registry.find(name.text);
        if (!spec) throw SyntaxError{name, "unknown relation '" + name.text + "'"};
        const std::size_t want = arity(spec->shape);
        if (args.size() != want) {
            throw SyntaxError{name, "relation " + name.text + " expects " + std::to_string(want) + " arguments, got " +
                                        std::to_string(args.size())};
        }
        const RelationId r = spec->name;
        switch (spec->shape) {
            case RelationShape::intra:
                return Fact::intra(r, concept_arg(args[0]), concept_arg(args[1]), domain_arg(args[2]));
            case RelationShape::cross:
                return Fact::cross(r, concept_arg(args[0]), concept_arg(args[1]), domain_arg(args[2]),
                                   domain_arg(args[3]));
            case RelationShape::fusion:
                return Fact::fusion(r, concept_arg(args[0]), concept_arg(args[1]), concept_arg(args[2]),
                                    domain_arg(args[3]));
        }
        return std::nullopt;
    }

    Token arg_token() {
        switch (look.kind) {
            case Tok::atom:
            case Tok::variable:
            case Tok::quoted:
            case Tok::string: return take();
            case Tok::bad: throw SyntaxError{look, look.text};
            default: throw SyntaxError{look, "expected argument, found " + describe(look)};
        }
    }

    std::optional<Clause> next(const RelationRegistry& registry, std::vector<Diagnostic>& diagnostics) {
        while (look.kind != Tok::eof) {
            const Token start = look;
            terminated = false;
            try {
                switch (look.kind) {
                    case Tok::at:
                        take();
                        return Clause{directive(), span(start)};
                    case Tok::neck:
                        if (dialect == Dialect::prolog) {
                            recover();
                            continue;
                        }
                        throw SyntaxError{look, "directives other than @relation are not supported"};
                    case Tok::atom:
                    case Tok::quoted:
                    case Tok::variable:
                        if (auto f = clause(registry)) return Clause{*f, span(start)};
                        continue;
                    case Tok::bad: throw SyntaxError{look, look.text};
                    default: throw SyntaxError{look, "unexpected " + describe(look)};
                }
            } catch (const SyntaxError& e) {
                diagnostics.push_back({Diagnostic::Severity::error, span(e.at), e.message});
                if (!terminated) recover();
            }
        }
        return std::nullopt;
    }
};

ClauseReader::ClauseReader(std::string_view text, std::string file, Dialect dialect)
    : impl_(new Impl(text, std::move(file), dialect)) {}

ClauseReader::~ClauseReader() { delete impl_; }

std::optional<Clause> ClauseReader::next(const RelationRegistry& registry, std::vector<Diagnostic>& diagnostics) {
    return impl_->next(registry, diagnostics);
}

// ---------------------------------------------------------------------------
// Loading

LoadResult load_text(FactStore& store, std::string_view text, std::string file, Dialect dialect) {
    LoadResult result;
    ClauseReader reader(text, std::move(file), dialect);
    while (auto clause = reader.next(store.registry(), result.diagnostics)) {
        try {
            if (auto* spec = std::get_if<RelationSpec>(&clause->value)) {
                store.define_relation(*spec);
                continue;
            }
            const Fact& f = std::get<Fact>(clause->value);
            if (store.assert_fact(f)) {
                result.facts.push_back({f, clause->span});
            } else {
                result.diagnostics.push_back(
                    {Diagnostic::Severity::warning, clause->span, "duplicate fact " + to_string(f)});
            }
        } catch (const Error& e) {
            result.diagnostics.push_back({Diagnostic::Severity::error, clause->span, e.what()});
        }
    }
    return result;
}

namespace {
std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}
}  // namespace

LoadResult load_file(FactStore& store, const std::filesystem::path& path, Dialect dialect) {
    return load_text(store, read_file(path), path.string(), dialect);
}

// ---------------------------------------------------------------------------
// Saving

namespace {
std::string directive_text(const RelationSpec& spec) {
    std::string out = "@relation " + spec.name.str() + " " + std::string(to_string(spec.shape));
    if (spec.transitive) out += " transitive";
    if (spec.symmetric) out += " symmetric";
    if (spec.reflexive) out += " reflexive";
    if (spec.acyclic) out += " acyclic";
    if (spec.inherits_via) out += " inherits_via(" + spec.inherits_via->str() + ")";
    return out + ".";
}
}  // namespace

std::string save_text(const FactStore& store) {
    std::string out = "% cdc knowledge base\n";
    std::vector<RelationSpec> custom;
    for (const RelationSpec& spec : store.registry().all()) {
        const RelationSpec* builtin = builtin_spec(spec.name.str());
        if (!builtin || !(*builtin == spec)) custom.push_back(spec);
    }
    // inherits_via targets must be declared first.
    std::stable_sort(custom.begin(), custom.end(), [](const RelationSpec& a, const RelationSpec& b) {
        return !a.inherits_via && b.inherits_via;
    });
    for (const RelationSpec& spec : custom) out += directive_text(spec) + "\n";
    if (!custom.empty()) out += "\n";
    for (const Fact& f : store.facts()) out += to_string(f) + ".\n";
    return out;
}

void save_file(const FactStore& store, const std::filesystem::path& path) { write_file(path, save_text(store)); }

// ---------------------------------------------------------------------------
// Interop export

std::string lowercase(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string prolog_atom(std::string_view text) {
    const bool bare = !text.empty() && std::islower(static_cast<unsigned char>(text.front())) &&
                      std::all_of(text.begin(), text.end(), [](char c) {
                          return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                      });
    return bare ? std::string(text) : quote_atom(text);
}

namespace {
std::string interop_fact(const Fact& f) {
    auto c = [](ConceptId id) { return prolog_atom(lowercase(id.str())); };
    auto d = [](const DomainExpr& dom) { return quote_atom(dom.format()); };
    std::string out = prolog_atom(f.relation.str()) + "(";
    if (const auto* a = f.as_intra()) out += c(a->subject) + ", " + c(a->object) + ", " + d(a->domain);
    else if (const auto* x = f.as_cross())
        out += c(x->left) + ", " + c(x->right) + ", " + d(x->left_domain) + ", " + d(x->right_domain);
    else if (const auto* u = f.as_fusion())
        out += c(u->left) + ", " + c(u->right) + ", " + c(u->fused) + ", " + d(u->domain);
    return out + ").";
}
}  // namespace

std::string export_interop_text(const FactStore& store) {
    const auto specs = store.registry().all();
    std::ostringstream out;
    out << "% exported by cdc\n\n";
    for (const RelationSpec& spec : specs) out << ":- dynamic " << prolog_atom(spec.name.str()) << '/' << arity(spec.shape) << ".\n";

    const auto facts = store.facts();
    for (const RelationSpec& spec : specs) {
        const std::string r = prolog_atom(spec.name.str());
        bool header = false;
        for (const Fact& f : facts) {
            if (f.relation != spec.name) continue;
            if (!header) out << '\n';
            header = true;
            out << interop_fact(f) << '\n';
        }
        if (spec.inherits_via) {
            const std::string via = prolog_atom(spec.inherits_via->str());
            out << (header ? "" : "\n") << r << "(X, Attr, Domain) :-\n    " << via << "(X, Y, Domain),\n    " << r
                << "(Y, Attr, Domain).\n";
        }
    }
    for (const RelationSpec& spec : specs) {
        if (!spec.transitive) continue;
        const std::string r = prolog_atom(spec.name.str());
        const std::string s = prolog_atom(star_name(spec.name));
        out << '\n'
            << s << "(X, Y, Domain) :-\n    " << r << "(X, Y, Domain).\n"
            << s << "(X, Z, Domain) :-\n    " << r << "(X, Y, Domain),\n    " << s << "(Y, Z, Domain).\n";
    }
    if (const RelationSpec* req = store.registry().find("requires"); req && req->transitive) {
        out << "\nall_prerequisites(Target, Domain, Prereqs) :-\n"
               "    findall(Prereq, requires_star(Target, Prereq, Domain), Prereqs).\n";
    }
    return out.str();
}

void export_interop(const FactStore& store, const std::filesystem::path& path) {
    write_file(path, export_interop_text(store));
}

}  // namespace cdc
