#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "depas/overlay.hpp"
#include "depas/scaler.hpp"
#include "depas/traffic.hpp"
#include "depas/worker.hpp"

namespace depas {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeType {
    std::string label;
    double capacity = 0.0;
};

struct InitialPopulation {
    std::string label;
    int count = 0;
};

struct RunConfig {
    double horizon = 2600.0;
    double sample_period = 10.0;
    std::uint64_t seed = 1;
};

// Complete description of one experiment: simulator parameters, node type
// catalog, initial population, provisioning policy, and workload track.
struct Scenario {
    RunConfig run;
    ScalerConfig scaler;
    OverlayConfig overlay;
    AdmissionConfig admission;
    double monitoring_period = 60.0;
    EntryPointConfig entry_point;
    std::vector<NodeType> types;
    std::vector<InitialPopulation> initial;
    ProvisioningPolicy policy;
    WorkloadTrack track;

    // The bundled dynamic-workload experiment: 2600 s horizon, 100 capacity-1
    // nodes at start, high-capacity provisioning before t=1100 and
    // low-capacity afterwards, stepwise 70 -> 2200 -> 150 req/s track.
    static Scenario default_experiment();

    // Throws ScenarioError with a field-level message on the first violated
    // constraint.
    void validate() const;

    std::size_t type_index(const std::string& label) const;
    const NodeType& type_of(const std::string& label) const;
};

Scenario parse_scenario(std::istream& in, const std::string& origin);
Scenario load_scenario(const std::string& path);

// Human-readable echo of every resolved parameter, section by section.
std::string describe_scenario(const Scenario& scenario);

}  // namespace depas
