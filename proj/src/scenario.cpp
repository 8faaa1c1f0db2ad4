#include "depas/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace depas {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, const std::string& where) {
    std::size_t consumed = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw ScenarioError(where + ": expected a number, got '" + value + "'");
    }
    if (consumed != value.size()) {
        throw ScenarioError(where + ": trailing characters in number '" + value + "'");
    }
    return parsed;
}

std::uint64_t parse_u64(const std::string& value, const std::string& where) {
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        throw ScenarioError(where + ": expected an unsigned integer, got '" + value + "'");
    }
}

}  // namespace

Scenario Scenario::default_experiment() {
    Scenario s;
    s.run = RunConfig{2600.0, 10.0, 1};
    s.scaler = ScalerConfig{60.0, 0.7, 0.1, true};
    s.overlay = OverlayConfig{50, 0.5, 5, 25};
    s.admission = AdmissionConfig{3.0, 10, 1.0};
    s.monitoring_period = 60.0;
    s.entry_point = EntryPointConfig{50, 0.02, 120.0};
    s.types = {{"low", 1.0}, {"high", 5.0}};
    s.initial = {{"low", 100}};
    s.policy.epochs = {{0.0, "high", 5.0}, {1100.0, "low", 1.0}};
    // Stated anchors: 70 req/s at the start, a stepwise rise to a 2200 req/s
    // peak whose last burst lands at t=1100, then a stepwise fall. The
    // intermediate plateau values are choices of this scenario, each held
    // >= 300 s so the settled capacity can be measured.
    s.track.steps = {{0.0, 70.0},      {500.0, 350.0},  {800.0, 1000.0}, {1100.0, 2200.0},
                     {1700.0, 1000.0}, {2000.0, 400.0}, {2300.0, 150.0}};
    return s;
}

void Scenario::validate() const {
    if (!(run.horizon > 0.0)) throw ScenarioError("run.horizon: must be positive");
    if (!(run.sample_period > 0.0)) throw ScenarioError("run.sample_period: must be positive");

    if (!(scaler.cycle_period > 0.0)) throw ScenarioError("scaler.T: must be positive");
    if (!(scaler.desired_load > 0.0 && scaler.desired_load < 1.0)) {
        throw ScenarioError("scaler.L0: must lie in (0, 1)");
    }
    const double delta_cap = std::min(scaler.desired_load, 1.0 - scaler.desired_load);
    if (!(scaler.load_variation > 0.0 && scaler.load_variation < delta_cap)) {
        throw ScenarioError("scaler.delta: must lie in (0, min(L0, 1-L0))");
    }

    if (overlay.degree < 1) throw ScenarioError("overlay.degree: must be at least 1");
    if (!(overlay.cycle_period > 0.0)) throw ScenarioError("overlay.cycle: must be positive");
    if (overlay.healing > overlay.degree) throw ScenarioError("overlay.healing: must not exceed the degree");
    if (overlay.swap < 1 || overlay.swap > overlay.degree) {
        throw ScenarioError("overlay.swap: must lie in [1, degree]");
    }

    if (!(admission.max_queue_per_capacity > 0.0)) throw ScenarioError("admission.max_queue_size: must be positive");
    if (admission.max_hops < 1) throw ScenarioError("admission.max_hops: must be at least 1");
    if (!(admission.mean_execution_time > 0.0)) {
        throw ScenarioError("admission.mean_execution_time: must be positive");
    }

    // Loads are recomputed per second, so the window is whole seconds.
    if (!(monitoring_period >= 1.0) || monitoring_period != std::floor(monitoring_period)) {
        throw ScenarioError("monitoring.period: must be a positive whole number of seconds");
    }

    if (entry_point.min_size < 1) throw ScenarioError("entry_point.min_neighbors: must be at least 1");
    if (entry_point.fraction < 0.0 || entry_point.fraction > 1.0) {
        throw ScenarioError("entry_point.percent: must lie in [0, 100]");
    }
    if (!(entry_point.reshuffle_period > 0.0)) {
        throw ScenarioError("entry_point.reshuffle_period: must be positive");
    }

    if (types.empty()) throw ScenarioError("types: at least one node type is required");
    for (const auto& type : types) {
        // Capacity doubles as the number of parallel execution slots.
        if (!(type.capacity >= 1.0) || type.capacity != std::floor(type.capacity)) {
            throw ScenarioError("types." + type.label + ": capacity must be a positive integer");
        }
        if (1 != std::count_if(types.begin(), types.end(),
                               [&](const NodeType& t) { return t.label == type.label; })) {
            throw ScenarioError("types." + type.label + ": duplicate label");
        }
    }

    if (initial.empty()) throw ScenarioError("initial: at least one population entry is required");
    int initial_total = 0;
    for (const auto& entry : initial) {
        type_of(entry.label);
        if (entry.count < 0) throw ScenarioError("initial." + entry.label + ": count must be non-negative");
        initial_total += entry.count;
    }
    if (initial_total < 1) throw ScenarioError("initial: total population must be at least 1");

    if (policy.epochs.empty()) throw ScenarioError("policy: at least one epoch is required");
    if (policy.epochs.front().from_time != 0.0) {
        throw ScenarioError("policy: first epoch must start at t=0");
    }
    for (std::size_t i = 0; i < policy.epochs.size(); ++i) {
        type_of(policy.epochs[i].type_label);
        if (i > 0 && !(policy.epochs[i].from_time > policy.epochs[i - 1].from_time)) {
            throw ScenarioError("policy: epoch times must be strictly increasing");
        }
    }

    if (track.steps.empty()) throw ScenarioError("track: at least one step is required");
    if (track.steps.front().start_time != 0.0) throw ScenarioError("track: first step must start at t=0");
    for (std::size_t i = 0; i < track.steps.size(); ++i) {
        if (!(track.steps[i].mean_rate > 0.0)) {
            throw ScenarioError("track: mean rates must be positive");
        }
        if (i > 0 && !(track.steps[i].start_time > track.steps[i - 1].start_time)) {
            throw ScenarioError("track: step times must be strictly increasing");
        }
    }
}

std::size_t Scenario::type_index(const std::string& label) const {
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (types[i].label == label) {
            return i;
        }
    }
    throw ScenarioError("unknown node type label '" + label + "'");
}

const NodeType& Scenario::type_of(const std::string& label) const {
    return types[type_index(label)];
}

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario s = Scenario::default_experiment();
    // Sections that list entries replace the defaults wholesale once the file
    // mentions them.
    bool saw_types = false, saw_initial = false, saw_policy = false, saw_track = false;
    std::vector<std::pair<double, std::string>> policy_entries;

    std::string section;
    std::string line;
    int line_no = 0;

    const auto fail = [&](const std::string& message) {
        throw ScenarioError(origin + ":" + std::to_string(line_no) + ": " + message);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"run",        "scaler",  "overlay", "admission", "monitoring",
                                          "entry_point", "types",   "initial", "policy",    "track"};
            if (std::none_of(std::begin(known), std::end(known),
                             [&](const char* k) { return section == k; })) {
                fail("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail("empty key or value");
        const std::string where = "[" + section + "] " + key;

        if (section == "run") {
            if (key == "horizon") s.run.horizon = parse_number(value, where);
            else if (key == "sample_period") s.run.sample_period = parse_number(value, where);
            else if (key == "seed") s.run.seed = parse_u64(value, where);
            else fail("unknown key '" + key + "' in [run]");
        } else if (section == "scaler") {
            if (key == "T") s.scaler.cycle_period = parse_number(value, where);
            else if (key == "L0") s.scaler.desired_load = parse_number(value, where);
            else if (key == "delta") s.scaler.load_variation = parse_number(value, where);
            else if (key == "enabled") {
                if (value == "true") s.scaler.enabled = true;
                else if (value == "false") s.scaler.enabled = false;
                else fail("scaler.enabled: expected true or false");
            } else fail("unknown key '" + key + "' in [scaler]");
        } else if (section == "overlay") {
            if (key == "degree") s.overlay.degree = static_cast<std::size_t>(parse_u64(value, where));
            else if (key == "cycle") s.overlay.cycle_period = parse_number(value, where);
            else if (key == "healing") s.overlay.healing = static_cast<std::size_t>(parse_u64(value, where));
            else if (key == "swap") s.overlay.swap = static_cast<std::size_t>(parse_u64(value, where));
            else fail("unknown key '" + key + "' in [overlay]");
        } else if (section == "admission") {
            if (key == "max_queue_size") s.admission.max_queue_per_capacity = parse_number(value, where);
            else if (key == "max_hops") s.admission.max_hops = static_cast<int>(parse_u64(value, where));
            else if (key == "mean_execution_time") s.admission.mean_execution_time = parse_number(value, where);
            else fail("unknown key '" + key + "' in [admission]");
        } else if (section == "monitoring") {
            if (key == "period") s.monitoring_period = parse_number(value, where);
            else fail("unknown key '" + key + "' in [monitoring]");
        } else if (section == "entry_point") {
            if (key == "min_neighbors") s.entry_point.min_size = static_cast<std::size_t>(parse_u64(value, where));
            else if (key == "percent") s.entry_point.fraction = parse_number(value, where) / 100.0;
            else if (key == "reshuffle_period") s.entry_point.reshuffle_period = parse_number(value, where);
            else fail("unknown key '" + key + "' in [entry_point]");
        } else if (section == "types") {
            if (!saw_types) {
                s.types.clear();
                saw_types = true;
            }
            s.types.push_back(NodeType{key, parse_number(value, where)});
        } else if (section == "initial") {
            if (!saw_initial) {
                s.initial.clear();
                saw_initial = true;
            }
            s.initial.push_back(InitialPopulation{key, static_cast<int>(parse_u64(value, where))});
        } else if (section == "policy") {
            if (!saw_policy) {
                policy_entries.clear();
                saw_policy = true;
            }
            policy_entries.emplace_back(parse_number(key, "[policy] time"), value);
        } else if (section == "track") {
            if (!saw_track) {
                s.track.steps.clear();
                saw_track = true;
            }
            s.track.steps.push_back(WorkloadStep{parse_number(key, "[track] time"), parse_number(value, where)});
        } else {
            fail("key outside any section");
        }
    }

    if (saw_policy) {
        s.policy.epochs.clear();
        for (const auto& [time, label] : policy_entries) {
            const auto idx = std::find_if(s.types.begin(), s.types.end(),
                                          [&](const NodeType& t) { return t.label == label; });
            if (idx == s.types.end()) {
                throw ScenarioError(origin + ": [policy] references unknown type '" + label + "'");
            }
            s.policy.epochs.push_back(ProvisioningEpoch{time, label, idx->capacity});
        }
    } else if (saw_types) {
        // Re-resolve default policy capacities against the replaced catalog.
        for (auto& epoch : s.policy.epochs) {
            epoch.capacity = s.type_of(epoch.type_label).capacity;
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario file '" + path + "'");
    }
    return parse_scenario(in, path);
}

std::string describe_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[run]\n"
        << "  horizon             = " << s.run.horizon << " s\n"
        << "  sample_period       = " << s.run.sample_period << " s\n"
        << "  seed                = " << s.run.seed << "\n"
        << "[scaler]\n"
        << "  T                   = " << s.scaler.cycle_period << " s\n"
        << "  L0                  = " << s.scaler.desired_load << "\n"
        << "  delta               = " << s.scaler.load_variation << "\n"
        << "  enabled             = " << (s.scaler.enabled ? "true" : "false") << "\n"
        << "[overlay]\n"
        << "  degree              = " << s.overlay.degree << "\n"
        << "  cycle               = " << s.overlay.cycle_period << " s\n"
        << "  healing             = " << s.overlay.healing << "\n"
        << "  swap                = " << s.overlay.swap << "\n"
        << "[admission]\n"
        << "  max_queue_size      = " << s.admission.max_queue_per_capacity << "\n"
        << "  max_hops            = " << s.admission.max_hops << "\n"
        << "  mean_execution_time = " << s.admission.mean_execution_time << " s\n"
        << "[monitoring]\n"
        << "  period              = " << s.monitoring_period << " s\n"
        << "[entry_point]\n"
        << "  min_neighbors       = " << s.entry_point.min_size << "\n"
        << "  percent             = " << s.entry_point.fraction * 100.0 << "\n"
        << "  reshuffle_period    = " << s.entry_point.reshuffle_period << " s\n";
    out << "[types]\n";
    for (const auto& type : s.types) {
        out << "  " << type.label << " = " << type.capacity << " req/s\n";
    }
    out << "[initial]\n";
    for (const auto& entry : s.initial) {
        out << "  " << entry.label << " = " << entry.count << "\n";
    }
    out << "[policy]\n";
    for (const auto& epoch : s.policy.epochs) {
        out << "  from " << epoch.from_time << " s -> " << epoch.type_label << " (capacity "
            << epoch.capacity << ")\n";
    }
    out << "[track]\n";
    for (const auto& step : s.track.steps) {
        out << "  from " << step.start_time << " s -> " << step.mean_rate << " req/s\n";
    }
    return out.str();
}

}  // namespace depas
