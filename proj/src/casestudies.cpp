#include <array>

#include "cdc/error.hpp"
#include "cdc/kb_io.hpp"

namespace cdc {

namespace {

constexpr std::string_view kEducation = R"(% Programming course for learners with different backgrounds.
is_a(function, programming_concept, 'cs@fundamentals').

context_value(student_alice, math_background, 'student@profile').
context_value(student_bob, design_background, 'student@profile').

strategy(explain_function, use_formal_definition, 'math_background@cs').
strategy(explain_function, use_workflow_metaphor, 'design_background@cs').

analogous_to(function, machine, 'cs@programming', 'engineering@systems').

% Facts behind the example queries.
is_a(quadratic_function, polynomial_function, 'math@algebra').
is_a(polynomial_function, function, 'math@algebra').
requires(calculus, algebra, 'highschool').
requires(algebra, arithmetic, 'highschool').
analogous_to(neural_network, biological_brain, 'ai@ml', 'biology@neuroscience').
)";

constexpr std::string_view kEnterprise = R"(% Product and engineering vocabularies.
analogous_to(user_story, functional_requirement, 'product@requirements', 'engineering@specs').

fuses_with(user_experience, technical_feasibility, integrated_product_spec, 'product+engineering').

conflicts_with(real_time_sync, battery_efficiency, 'product+engineering@mobile').
)";

// `16.8+` would end a fusion segment with an empty atom, so the hooks era is
// written `16.8_plus`.
constexpr std::string_view kTechdocs = R"(% Version-specific React documentation.
evolves_to(class_component, functional_component, 'react@paradigm_shift').

analogous_to(component_did_mount, use_effect, 'react@pre16.8', 'react@16.8_plus@hooks').

if_then(mobile_app, use_lazy_loading, 'react@mobile@perf').
)";

// Patient facts keep their original argument order: the third argument sits in
// the domain slot and is carried as an opaque label.
constexpr std::string_view kCbt = R"(% Cognitive behavioural therapy session knowledge.
@relation patient intra.
@relation cognitive_pattern intra.
@relation cbt_distortion intra.
@relation first_line_treatment intra.
@relation triggers intra.

patient('Zhang_San', 28, software_engineer).
cognitive_pattern('Zhang_San', all_or_nothing_thinking, 0.85).

cbt_distortion(all_or_nothing_thinking, always, "CBT@distortion").
cbt_distortion(all_or_nothing_thinking, never, "CBT@distortion").
cbt_distortion(all_or_nothing_thinking, terrible, "CBT@distortion").
first_line_treatment(all_or_nothing_thinking, evidence_examination, "CBT@treatment").

triggers(code_bug, self_negation, "CBT@situation").
)";

struct CaseStudy {
    std::string_view name;
    std::string_view text;
};

constexpr std::array<CaseStudy, 4> kCaseStudies{{
    {"education", kEducation},
    {"enterprise", kEnterprise},
    {"techdocs", kTechdocs},
    {"cbt", kCbt},
}};

}  // namespace

std::vector<std::string> casestudy_names() {
    std::vector<std::string> out;
    for (const auto& c : kCaseStudies) out.emplace_back(c.name);
    return out;
}

std::string_view casestudy_text(std::string_view name) {
    for (const auto& c : kCaseStudies)
        if (c.name == name) return c.text;
    throw NotFoundError("unknown case study '" + std::string(name) + "'");
}

LoadResult load_builtin_casestudy(FactStore& store, std::string_view name) {
    return load_text(store, casestudy_text(name), "<" + std::string(name) + ">");
}

}  // namespace cdc
