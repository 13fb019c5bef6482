#include "cdc/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "cdc/error.hpp"

namespace cdc {

namespace {

std::string domain_name(std::size_t i) { return "dom" + std::to_string(i) + "@synthetic"; }

std::string concept_name(std::size_t domain, std::size_t i) {
    return "d" + std::to_string(domain) + "_c" + std::to_string(i);
}

}  // namespace

FactStore make_synthetic_kb(const SyntheticConfig& config) {
    if (config.domains < 1 || config.facts < config.domains)
        throw Error("synthetic KB needs facts >= domains >= 1");

    const std::size_t per_domain = (config.facts + config.domains - 1) / config.domains;
    // Enough concepts that a domain can hold several times its expected share
    // of distinct edges.
    const auto pool = std::max<std::size_t>(
        {4, per_domain / 2, static_cast<std::size_t>(std::ceil(std::sqrt(8.0 * static_cast<double>(per_domain)))) + 2});
    const std::size_t capacity = pool * (pool - 1) / 2;

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::size_t> pick_domain(0, config.domains - 1);
    std::uniform_int_distribution<std::size_t> pick_concept(0, pool - 1);

    std::vector<DomainExpr> domains;
    for (std::size_t d = 0; d < config.domains; ++d) domains.push_back(parse_domain(domain_name(d)));
    std::vector<std::size_t> filled(config.domains, 0);

    FactStore store;
    const RelationId is_a("is_a");
    while (store.size() < config.facts) {
        const std::size_t d = pick_domain(rng);
        if (filled[d] == capacity) continue;
        std::size_t a = pick_concept(rng), b = pick_concept(rng);
        if (a == b) continue;
        if (a < b) std::swap(a, b);
        if (store.assert_fact(Fact::intra(is_a, ConceptId(concept_name(d, a)), ConceptId(concept_name(d, b)), domains[d])))
            ++filled[d];
    }
    return store;
}

ScanReport run_scan_bench(const SyntheticConfig& config, Execution execution) {
    const FactStore store = make_synthetic_kb(config);
    ScanReport report;
    report.facts = store.size();
    report.domains = config.domains;
    report.queries = config.queries;

    std::mt19937_64 rng(config.seed ^ 0x5bd1e995ULL);
    std::uniform_int_distribution<std::size_t> pick_domain(0, config.domains - 1);
    for (std::size_t q = 0; q < config.queries; ++q) {
        FactPattern p{RelationId("is_a")};
        p.domain = parse_domain(domain_name(pick_domain(rng)));
        report.full_scan_entries += store.scan_relation(p).scanned;
        report.partition_scan_entries += store.match_counted(p).scanned;
    }
    report.reduction_factor = report.partition_scan_entries == 0
                                  ? 0.0
                                  : static_cast<double>(report.full_scan_entries) /
                                        static_cast<double>(report.partition_scan_entries);

    const auto start = std::chrono::steady_clock::now();
    const ClosureSet closure = materialize(store, execution);
    const auto stop = std::chrono::steady_clock::now();
    report.derived_facts = closure.size();
    report.materialize_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return report;
}

}  // namespace cdc
