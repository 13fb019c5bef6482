#include "cdc/domain.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "cdc/error.hpp"

namespace cdc {

namespace detail {

struct DomainRep {
    std::vector<DomainSegment> segments;
    std::string source;
    std::string canonical;
    const DomainRep* canonical_rep = nullptr;
};

}  // namespace detail

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string format_segments(const std::vector<DomainSegment>& segments, bool canonical) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) out += '@';
        out += join(canonical ? segments[i].atoms() : segments[i].source_atoms(), '+');
    }
    return out;
}

class DomainTable {
public:
    // Interns by source text; every rep points at the rep of its canonical text.
    const detail::DomainRep* intern(std::vector<DomainSegment> segments) {
        std::string source = format_segments(segments, false);
        {
            std::shared_lock lock(mutex_);
            if (auto it = reps_.find(source); it != reps_.end()) return it->second.get();
        }
        std::unique_lock lock(mutex_);
        if (auto it = reps_.find(source); it != reps_.end()) return it->second.get();

        std::string canonical = format_segments(segments, true);
        const detail::DomainRep* canon_rep = nullptr;
        if (canonical != source) {
            auto it = reps_.find(canonical);
            if (it == reps_.end()) {
                std::vector<DomainSegment> canon_segments;
                for (const auto& s : segments) canon_segments.emplace_back(s.atoms());
                auto rep = std::make_unique<detail::DomainRep>();
                rep->segments = std::move(canon_segments);
                rep->source = canonical;
                rep->canonical = canonical;
                rep->canonical_rep = rep.get();
                it = reps_.emplace(canonical, std::move(rep)).first;
            }
            canon_rep = it->second.get();
        }

        auto rep = std::make_unique<detail::DomainRep>();
        rep->segments = std::move(segments);
        rep->source = source;
        rep->canonical = std::move(canonical);
        rep->canonical_rep = canon_rep ? canon_rep : rep.get();
        return reps_.emplace(std::move(source), std::move(rep)).first->second.get();
    }

private:
    std::shared_mutex mutex_;
    std::unordered_map<std::string, std::unique_ptr<detail::DomainRep>> reps_;
};

DomainTable& domain_table() {
    static DomainTable t;
    return t;
}

}  // namespace

bool is_atom_start(char c) noexcept {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_atom_char(char c) noexcept { return is_atom_start(c) || c == '.' || c == '-'; }

bool is_valid_atom(std::string_view atom) noexcept {
    if (atom.empty() || !is_atom_start(atom.front())) return false;
    return std::all_of(atom.begin(), atom.end(), is_atom_char);
}

DomainSegment::DomainSegment(std::vector<std::string> atoms) : source_(std::move(atoms)) {
    canonical_ = source_;
    std::sort(canonical_.begin(), canonical_.end());
    canonical_.erase(std::unique(canonical_.begin(), canonical_.end()), canonical_.end());
}

std::string DomainSegment::format() const { return join(canonical_, '+'); }

DomainExpr DomainExpr::parse(std::string_view text) {
    if (text.empty()) throw DomainParseError("empty domain", 0);

    std::vector<DomainSegment> segments;
    std::vector<std::string> atoms;
    std::size_t atom_start = 0;

    auto close_atom = [&](std::size_t end) {
        if (end == atom_start) {
            // `@@`, `+@`, leading/trailing separators
            bool segment_empty = atoms.empty() && (end >= text.size() || text[end] == '@');
            throw DomainParseError(segment_empty ? "empty segment" : "empty atom", end);
        }
        atoms.emplace_back(text.substr(atom_start, end - atom_start));
    };

    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '@') {
            close_atom(i);
            segments.emplace_back(std::move(atoms));
            atoms.clear();
            atom_start = i + 1;
        } else if (text[i] == '+') {
            close_atom(i);
            atom_start = i + 1;
        } else {
            char c = text[i];
            bool ok = (i == atom_start) ? is_atom_start(c) : is_atom_char(c);
            if (!ok) {
                std::string shown = (c >= 0x20 && c < 0x7f) ? std::string(1, c) : "\\x" + std::to_string(int(static_cast<unsigned char>(c)));
                throw DomainParseError("illegal character '" + shown + "'", i);
            }
        }
    }
    return DomainExpr(domain_table().intern(std::move(segments)));
}

DomainExpr DomainExpr::from_segments(std::vector<DomainSegment> segments) {
    if (segments.empty()) throw DomainParseError("empty domain", 0);
    for (const auto& s : segments) {
        if (s.atoms().empty()) throw DomainParseError("empty segment", 0);
        for (const auto& a : s.atoms())
            if (!is_valid_atom(a)) throw DomainParseError("invalid atom '" + a + "'", 0);
    }
    return DomainExpr(domain_table().intern(std::move(segments)));
}

const std::vector<DomainSegment>& DomainExpr::segments() const noexcept { return rep_->segments; }
const std::string& DomainExpr::format() const noexcept { return rep_->canonical; }
const std::string& DomainExpr::source() const noexcept { return rep_->source; }
const void* DomainExpr::canonical_key() const noexcept { return rep_->canonical_rep; }

DomainExpr DomainExpr::refine(const DomainExpr& child) const {
    auto segments = rep_->segments;
    segments.insert(segments.end(), child.segments().begin(), child.segments().end());
    return from_segments(std::move(segments));
}

bool is_prefix_of(const DomainExpr& general, const DomainExpr& specific) {
    const auto& g = general.segments();
    const auto& s = specific.segments();
    if (g.size() > s.size()) return false;
    return std::equal(g.begin(), g.end(), s.begin());
}

std::string opaque_atom(const DomainExpr& d) {
    std::string out = d.format();
    for (char& c : out) {
        if (c == '@') c = '.';
        else if (c == '+') c = '-';
    }
    return out;
}

DomainExpr fuse(const DomainExpr& a, const DomainExpr& b) {
    std::vector<std::string> atoms;
    for (const DomainExpr* d : {&a, &b}) {
        if (d->depth() == 1) {
            const auto& head = d->segments().front().atoms();
            atoms.insert(atoms.end(), head.begin(), head.end());
        } else {
            atoms.push_back(opaque_atom(*d));
        }
    }
    std::sort(atoms.begin(), atoms.end());
    return DomainExpr::from_segments({DomainSegment(std::move(atoms))});
}

}  // namespace cdc
