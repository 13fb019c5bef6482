#include "cdc/error.hpp"

namespace cdc {

namespace {
std::string describe_cycle(const std::string& relation, const std::string& domain,
                           const std::vector<std::string>& cycle) {
    std::string msg = "cycle in acyclic relation " + relation + " within domain \"" + domain + "\": ";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i) msg += " -> ";
        msg += cycle[i];
    }
    return msg;
}
}  // namespace

CycleError::CycleError(std::string relation, std::string domain, std::vector<std::string> cycle)
    : Error(describe_cycle(relation, domain, cycle)),
      relation_(std::move(relation)),
      domain_(std::move(domain)),
      cycle_(std::move(cycle)) {}

}  // namespace cdc
