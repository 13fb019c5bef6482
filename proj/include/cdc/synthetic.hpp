#pragma once

#include <cstddef>
#include <cstdint>

#include "cdc/fact_store.hpp"
#include "cdc/inference.hpp"

namespace cdc {

struct SyntheticConfig {
    std::size_t facts = 10000;
    std::size_t domains = 50;
    std::uint64_t seed = 20240607;
    // Random domain-filtered queries issued by run_scan_bench.
    std::size_t queries = 1000;
};

// is_a facts spread uniformly at random over `domains` domains. Within each
// domain the edges point from higher to lower concept index, so every domain
// is a DAG. Throws Error unless facts >= domains >= 1.
FactStore make_synthetic_kb(const SyntheticConfig& config);

struct ScanReport {
    std::size_t facts = 0;
    std::size_t domains = 0;
    std::size_t queries = 0;
    // Index entries touched, summed over all queries.
    std::size_t full_scan_entries = 0;
    std::size_t partition_scan_entries = 0;
    double reduction_factor = 0;
    std::size_t derived_facts = 0;
    double materialize_ms = 0;
};

// Each query asks for all is_a facts of one random domain, answered once by a
// relation-wide scan and once through the domain partition index.
ScanReport run_scan_bench(const SyntheticConfig& config, Execution execution = Execution::parallel);

}  // namespace cdc
