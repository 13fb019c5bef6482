#include "cdc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cdc/consistency.hpp"
#include "cdc/error.hpp"
#include "cdc/kb_io.hpp"
#include "cdc/synthetic.hpp"

namespace cdc {

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kNo = 1;
constexpr int kFail = 2;

json trace_json(const DerivationTrace& t) {
    json j{{"fact", to_string(t.fact)}, {"rule", t.rule}};
    j["premises"] = json::array();
    for (const auto& p : t.premises) j["premises"].push_back(trace_json(p));
    return j;
}

std::string caret_line(std::size_t offset) { return std::string(offset, ' ') + "^"; }

class Session {
public:
    Session(CliConfig config, std::ostream& out, std::ostream& err)
        : cfg_(std::move(config)), out_(out), err_(err) {
        store_.set_strict(cfg_.strict);
    }

    // Loads every configured source. False (after printing diagnostics) if any
    // source is unreadable or has errors.
    bool load(bool require_source) {
        if (cfg_.kb_paths.empty() && cfg_.cases.empty()) {
            if (const char* env = std::getenv("CDC_KB_PATH"); env && *env) cfg_.kb_paths.emplace_back(env);
        }
        if (require_source && cfg_.kb_paths.empty() && cfg_.cases.empty()) {
            err_ << "error: no knowledge base given (use --kb, --case or CDC_KB_PATH)\n";
            return false;
        }
        bool ok = true;
        auto absorb = [&](LoadResult r) {
            loaded_ += r.facts.size();
            for (const auto& d : r.diagnostics) {
                err_ << d.render() << '\n';
                if (d.severity == Diagnostic::Severity::warning) warnings_.push_back(d);
                else ok = false;
            }
        };
        try {
            for (const auto& name : cfg_.cases) absorb(load_builtin_casestudy(store_, name));
            for (const auto& path : cfg_.kb_paths) absorb(load_file(store_, path));
        } catch (const Error& e) {
            err_ << "error: " << e.what() << '\n';
            return false;
        }
        return ok;
    }

    int cmd_load() {
        if (cfg_.json) {
            out_ << json{{"facts", store_.size()}, {"loaded", loaded_}, {"warnings", warnings_.size()}}.dump() << '\n';
        } else {
            out_ << "loaded " << loaded_ << " fact(s), " << warnings_.size() << " warning(s); store holds "
                 << store_.size() << " fact(s)\n";
        }
        return kOk;
    }

    int cmd_save(const std::string& path) {
        if (path == "-") out_ << save_text(store_);
        else save_file(store_, path);
        return kOk;
    }

    int cmd_export(const std::string& path) {
        if (path == "-") out_ << export_interop_text(store_);
        else export_interop(store_, path);
        return kOk;
    }

    int cmd_materialize() {
        try {
            const auto start = std::chrono::steady_clock::now();
            closure_ = materialize(store_);
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            if (cfg_.json) {
                json j{{"derived", closure_->size()}, {"ms", ms}};
                for (Rule r : {Rule::star_base, Rule::star_step, Rule::symmetric, Rule::reflexive, Rule::inherit})
                    j[std::string(rule_name(r))] = closure_->count(r);
                out_ << j.dump() << '\n';
            } else {
                out_ << "derived " << closure_->size() << " fact(s) in " << std::fixed << std::setprecision(1) << ms
                     << " ms (";
                bool first = true;
                for (Rule r : {Rule::star_base, Rule::star_step, Rule::symmetric, Rule::reflexive, Rule::inherit}) {
                    out_ << (first ? "" : ", ") << rule_name(r) << ' ' << closure_->count(r);
                    first = false;
                }
                out_ << ")\n";
                out_.unsetf(std::ios::floatfield);
            }
            return kOk;
        } catch (const CycleError& e) {
            err_ << "error: " << e.what() << '\n';
            return kFail;
        }
    }

    int cmd_query(const std::string& text, bool strict_closure) {
        try {
            Query q = parse_query(text, store_.registry());
            q.source = cfg_.source;
            q.domain_match = cfg_.domain_mode;
            const ClosureSet* c = closure_ ? &*closure_ : nullptr;
            BindingSet b = eval_query(q, store_, c, strict_closure);
            out_ << (cfg_.json ? render_json_lines(b) : render_text(b));
            return b.empty() ? kNo : kOk;
        } catch (const QueryError& e) {
            err_ << "error: " << e.what() << '\n' << "  " << text << '\n' << "  " << caret_line(e.offset()) << '\n';
            return kFail;
        } catch (const Error& e) {
            err_ << "error: " << e.what() << '\n';
            return kFail;
        }
    }

    int cmd_check() {
        ConsistencyReport report = check(store_);
        for (const auto& d : warnings_) {
            if (d.message.rfind("duplicate fact", 0) == 0)
                report.warnings.push_back({Lint::Kind::duplicate_fact, d.render(), {d.message.substr(15)}});
        }
        out_ << (cfg_.json ? render_json_lines(report) : render_text(report));
        return report.ok() ? kOk : kNo;
    }

    int cmd_explain(const std::string& text) {
        auto fact = read_fact(text, true);
        if (!fact) return kFail;
        try {
            if (!closure_ || !closure_->is_current_for(store_)) closure_ = materialize(store_);
            DerivationTrace t = explain(*closure_, store_, *fact);
            if (cfg_.json) out_ << trace_json(t).dump() << '\n';
            else out_ << render_trace(t);
            return kOk;
        } catch (const NotFoundError& e) {
            err_ << e.what() << '\n';
            return kNo;
        } catch (const Error& e) {
            err_ << "error: " << e.what() << '\n';
            return kFail;
        }
    }

    int cmd_prereqs(const std::string& concept_text, const std::string& domain_text) {
        try {
            const DomainExpr d = parse_domain(domain_text);
            auto list = all_prerequisites(store_, ConceptId(concept_text), d);
            std::vector<std::string> names;
            for (ConceptId c : list) names.push_back(c.str());
            if (cfg_.json) {
                out_ << json{{"concept", concept_text}, {"domain", d.format()}, {"prerequisites", names}}.dump()
                     << '\n';
            } else {
                out_ << "Prereqs = [";
                for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? ", " : "") << names[i];
                out_ << "]\n";
            }
            return list.empty() ? kNo : kOk;
        } catch (const Error& e) {
            err_ << "error: " << e.what() << '\n';
            return kFail;
        }
    }

    int cmd_stats() {
        const StoreStats s = store_.stats();
        std::size_t used = 0;
        for (const auto& spec : store_.registry().all()) used += store_.count(spec.name) > 0;
        if (cfg_.json) {
            out_ << json{{"facts", s.total_facts},
                         {"relations", store_.registry().size()},
                         {"relations_used", used},
                         {"domains", s.facts_per_domain}}
                        .dump()
                 << '\n';
        } else {
            out_ << "facts: " << s.total_facts << '\n'
                 << "relations: " << store_.registry().size() << " (" << used << " with facts)\n"
                 << "domains: " << s.facts_per_domain.size() << '\n';
            for (const auto& [d, n] : s.facts_per_domain) out_ << "  " << d << ": " << n << '\n';
        }
        return kOk;
    }

    int cmd_bench(long long n_facts, long long n_domains) {
        if (n_domains < 1 || n_facts < n_domains) {
            err_ << "error: bench needs n_facts >= n_domains >= 1\n";
            return kFail;
        }
        SyntheticConfig c;
        c.facts = static_cast<std::size_t>(n_facts);
        c.domains = static_cast<std::size_t>(n_domains);
        c.seed = cfg_.seed;
        const ScanReport r = run_scan_bench(c);
        if (cfg_.json) {
            out_ << json{{"facts", r.facts},
                         {"domains", r.domains},
                         {"queries", r.queries},
                         {"full_scan_entries", r.full_scan_entries},
                         {"partition_scan_entries", r.partition_scan_entries},
                         {"reduction_factor", r.reduction_factor},
                         {"derived_facts", r.derived_facts},
                         {"materialize_ms", r.materialize_ms}}
                        .dump()
                 << '\n';
        } else {
            out_ << "facts: " << r.facts << "  domains: " << r.domains << "  queries: " << r.queries << '\n'
                 << "full-scan entries: " << r.full_scan_entries << '\n'
                 << "partition-scan entries: " << r.partition_scan_entries << '\n'
                 << std::fixed << std::setprecision(2) << "reduction factor: " << r.reduction_factor << '\n'
                 << std::setprecision(1) << "materialize: " << r.materialize_ms << " ms (" << r.derived_facts
                 << " derived facts)\n";
            out_.unsetf(std::ios::floatfield);
        }
        return kOk;
    }

    int repl(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            line = line.substr(first);
            while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
            if (line[0] == '%') continue;
            if (line == ":quit" || line == ":q") break;
            repl_line(line);
        }
        return kOk;
    }

private:
    std::optional<Fact> read_fact(std::string text, bool allow_star = false) {
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
        if (text.empty() || text.back() != '.') text += '.';
        // A closure fact `R_star(...)` is read as an R fact and renamed.
        std::optional<RelationId> star;
        if (allow_star) {
            const auto paren = text.find('(');
            if (const RelationSpec* base = store_.registry().star_base(text.substr(0, paren)); base && paren != std::string::npos) {
                star = RelationId(star_name(base->name));
                text = base->name.str() + text.substr(paren);
            }
        }
        ClauseReader reader(text, "<fact>");
        std::vector<Diagnostic> diags;
        auto clause = reader.next(store_.registry(), diags);
        for (const auto& d : diags) err_ << d.render() << '\n';
        if (!diags.empty()) return std::nullopt;
        if (!clause || !std::holds_alternative<Fact>(clause->value)) {
            err_ << "error: expected a fact\n";
            return std::nullopt;
        }
        Fact f = std::get<Fact>(clause->value);
        if (star) f.relation = *star;
        return f;
    }

    static std::optional<std::string> unwrap(const std::string& line, std::string_view head) {
        if (line.rfind(head, 0) != 0) return std::nullopt;
        std::string body = line.substr(head.size());
        if (!body.empty() && body.back() == '.') body.pop_back();
        if (body.empty() || body.back() != ')') return std::nullopt;
        body.pop_back();
        return body;
    }

    void repl_line(const std::string& line) {
        if (line == ":help") {
            out_ << "?- goal(args)          query\n"
                    "fact(args).            assert a fact\n"
                    "assert(fact(args)).    assert a fact\n"
                    "retract(fact(args)).   retract a fact\n"
                    "@relation name shape flags.\n"
                    ":materialize  :explain fact  :check  :stats  :quit\n";
        } else if (line == ":materialize") {
            cmd_materialize();
        } else if (line == ":check") {
            cmd_check();
        } else if (line == ":stats") {
            cmd_stats();
        } else if (line.rfind(":explain", 0) == 0) {
            cmd_explain(line.substr(8));
        } else if (line[0] == ':') {
            err_ << "error: unknown command " << line << '\n';
        } else if (line.rfind("?-", 0) == 0) {
            const auto start = line.find_first_not_of(" \t", 2);
            cmd_query(start == std::string::npos ? std::string() : line.substr(start), cfg_.strict);
        } else if (auto body = unwrap(line, "retract(")) {
            if (auto f = read_fact(*body)) {
                try {
                    out_ << (store_.retract_fact(*f) ? "retracted.\n" : "not present.\n");
                } catch (const Error& e) {
                    err_ << "error: " << e.what() << '\n';
                }
            }
        } else {
            std::string clause = line;
            if (auto body = unwrap(line, "assert(")) clause = *body + ".";
            LoadResult r = load_text(store_, clause, "<repl>");
            for (const auto& d : r.diagnostics) err_ << d.render() << '\n';
            if (!r.facts.empty()) out_ << "asserted.\n";
        }
    }

    CliConfig cfg_;
    std::ostream& out_;
    std::ostream& err_;
    FactStore store_;
    std::optional<ClosureSet> closure_;
    std::vector<Diagnostic> warnings_;
    std::size_t loaded_ = 0;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Domain-contextualized concept graph engine", "cdc"};
    app.require_subcommand(1);
    app.fallthrough();

    CliConfig cfg;
    std::string domain_mode = "exact", format = "text", source = "all";
    app.add_option("--kb", cfg.kb_paths, "Knowledge base file (repeatable)")->allow_extra_args(false);
    app.add_option("--case", cfg.cases, "Bundled case study: education, enterprise, techdocs, cbt")
        ->allow_extra_args(false)
        ->check(CLI::IsMember(casestudy_names()));
    app.add_flag("--strict", cfg.strict, "Reject cycles at assert time; queries need materialize");
    app.add_option("--domain-mode", domain_mode, "Domain literal matching")->check(CLI::IsMember({"exact", "inherit"}));
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json-lines"}));
    app.add_option("--source", source, "Facts visible to queries")->check(CLI::IsMember({"asserted", "all"}));
    app.add_option("--seed", cfg.seed, "Seed for bench");

    std::string path, text, concept_text, domain_text;
    long long n_facts = 0, n_domains = 0;
    auto* load = app.add_subcommand("load", "Load and report");
    auto* save = app.add_subcommand("save", "Write the canonical fact file");
    save->add_option("out", path, "Output path, - for stdout")->required();
    auto* mat = app.add_subcommand("materialize", "Compute all derived facts");
    auto* query = app.add_subcommand("query", "Evaluate one query");
    query->add_option("query", text, "e.g. is_a_star(x, ?S, \"d\")")->required();
    auto* chk = app.add_subcommand("check", "Consistency report");
    auto* expl = app.add_subcommand("explain", "Derivation trace of a fact");
    expl->add_option("fact", text, "e.g. is_a_star(a, c, \"d\")")->required();
    auto* pre = app.add_subcommand("prereqs", "Ordered transitive prerequisites");
    pre->add_option("concept", concept_text)->required();
    pre->add_option("domain", domain_text)->required();
    auto* exp = app.add_subcommand("export-prolog", "Write an ISO-Prolog interop file");
    exp->add_option("out", path, "Output path, - for stdout")->required();
    auto* stats = app.add_subcommand("stats", "Fact counts");
    auto* bench = app.add_subcommand("bench", "Partition-scan benchmark on a synthetic KB");
    bench->add_option("n_facts", n_facts)->required();
    bench->add_option("n_domains", n_domains)->required();
    auto* repl = app.add_subcommand("repl", "Interactive session");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFail;
    }

    cfg.domain_mode = domain_mode == "inherit" ? DomainMatch::prefix : DomainMatch::exact;
    cfg.json = format == "json-lines";
    cfg.source = source == "asserted" ? FactSource::asserted : FactSource::all;

    Session session(cfg, out, err);
    if (bench->parsed()) return session.cmd_bench(n_facts, n_domains);
    if (!session.load(!repl->parsed())) return kFail;
    try {
        if (load->parsed()) return session.cmd_load();
        if (save->parsed()) return session.cmd_save(path);
        if (mat->parsed()) return session.cmd_materialize();
        if (query->parsed()) return session.cmd_query(text, false);
        if (chk->parsed()) return session.cmd_check();
        if (expl->parsed()) return session.cmd_explain(text);
        if (pre->parsed()) return session.cmd_prereqs(concept_text, domain_text);
        if (exp->parsed()) return session.cmd_export(path);
        if (stats->parsed()) return session.cmd_stats();
        if (repl->parsed()) return session.repl(in);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }
    return kFail;
}

}  // namespace cdc
