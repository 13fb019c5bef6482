#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdc/inference.hpp"
#include "cdc/query.hpp"

namespace cdc {

struct CliConfig {
    std::vector<std::string> kb_paths;
    std::vector<std::string> cases;
    bool strict = false;
    DomainMatch domain_mode = DomainMatch::exact;
    bool json = false;
    std::uint64_t seed = 20240607;
    FactSource source = FactSource::all;
};

// Runs one command line (program name excluded) and returns the exit status.
// `in` feeds the repl.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cdc
