#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "depas/scenario.hpp"

namespace depas {

// Capacity at which the given workload produces exactly the target load.
// Throws std::invalid_argument for a target outside (0, 1).
double optimal_capacity(double workload, double target_load);

// Signed capacity adjustment that brings a system of capacity `capacity` at
// load `load` back to `desired_load`: positive means remove, negative means
// add that much capacity.
double optimal_capacity_delta(double load, double desired_load, double capacity);

// One sample of the running system. The CSV columns are the fields up to
// `rejected`; the remaining fields are diagnostics that stay out of the file.
struct MetricsRecord {
    double time = 0.0;
    double total_capacity = 0.0;
    double c_opt_lo = 0.0;   // optimal capacity at L0 + delta (max load)
    double c_opt_mid = 0.0;  // optimal capacity at L0
    double c_opt_hi = 0.0;   // optimal capacity at L0 - delta (min load)
    std::size_t n_total = 0;
    std::vector<std::size_t> n_per_type;
    double true_load = 0.0;
    double offered_rate = 0.0;
    std::uint64_t completed = 0;  // within this sample window
    std::uint64_t rejected = 0;   // within this sample window

    // diagnostics (not part of the CSV)
    std::uint64_t issued_cumulative = 0;
    bool overlay_connected = true;
};

// Column names, in file order: time first, then one n_<label> per catalog type.
std::vector<std::string> csv_columns(const Scenario& scenario);

// Numeric row in the same order as csv_columns().
std::vector<double> csv_row(const MetricsRecord& record);

void write_csv(std::ostream& out, const Scenario& scenario, const std::vector<MetricsRecord>& series);
std::string csv_string(const Scenario& scenario, const std::vector<MetricsRecord>& series);

// Per-sample mean and standard deviation of every column across runs.
struct AggregateSeries {
    std::vector<std::string> columns;       // without the leading time column
    std::vector<double> time;
    std::vector<std::vector<double>> mean;  // [column][sample]
    std::vector<std::vector<double>> std_dev;

    std::size_t column_index(const std::string& name) const;
};

AggregateSeries aggregate_series(const Scenario& scenario,
                                 const std::vector<std::vector<MetricsRecord>>& runs);

void write_aggregate_csv(std::ostream& out, const AggregateSeries& series);
std::string aggregate_csv_string(const AggregateSeries& series);

}  // namespace depas
