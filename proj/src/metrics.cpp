#include "depas/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace depas {

double optimal_capacity(double workload, double target_load) {
    if (!(target_load > 0.0 && target_load < 1.0)) {
        throw std::invalid_argument("optimal_capacity: target load must lie in (0, 1), got " +
                                    std::to_string(target_load));
    }
    if (workload < 0.0) {
        throw std::invalid_argument("optimal_capacity: workload must be non-negative");
    }
    return workload / target_load;
}

double optimal_capacity_delta(double load, double desired_load, double capacity) {
    if (!(desired_load > 0.0 && desired_load < 1.0)) {
        throw std::invalid_argument("optimal_capacity_delta: desired load must lie in (0, 1)");
    }
    return (desired_load - load) / desired_load * capacity;
}

namespace {

std::string format_value(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", v);
    return buffer;
}

}  // namespace

std::vector<std::string> csv_columns(const Scenario& scenario) {
    std::vector<std::string> columns = {"time", "total_capacity", "c_opt_lo", "c_opt_mid", "c_opt_hi", "n_total"};
    for (const auto& type : scenario.types) {
        columns.push_back("n_" + type.label);
    }
    columns.insert(columns.end(), {"true_load", "offered_rate", "completed", "rejected"});
    return columns;
}

std::vector<double> csv_row(const MetricsRecord& r) {
    std::vector<double> row = {r.time, r.total_capacity, r.c_opt_lo, r.c_opt_mid, r.c_opt_hi,
                               static_cast<double>(r.n_total)};
    for (const std::size_t count : r.n_per_type) {
        row.push_back(static_cast<double>(count));
    }
    row.push_back(r.true_load);
    row.push_back(r.offered_rate);
    row.push_back(static_cast<double>(r.completed));
    row.push_back(static_cast<double>(r.rejected));
    return row;
}

void write_csv(std::ostream& out, const Scenario& scenario, const std::vector<MetricsRecord>& series) {
    const auto columns = csv_columns(scenario);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << columns[i];
    }
    out << "\n";
    for (const auto& record : series) {
        const auto row = csv_row(record);
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_value(row[i]);
        }
        out << "\n";
    }
}

std::string csv_string(const Scenario& scenario, const std::vector<MetricsRecord>& series) {
    std::ostringstream out;
    write_csv(out, scenario, series);
    return out.str();
}

std::size_t AggregateSeries::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw std::invalid_argument("aggregate series has no column '" + name + "'");
}

AggregateSeries aggregate_series(const Scenario& scenario,
                                 const std::vector<std::vector<MetricsRecord>>& runs) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate_series: need at least one run");
    }
    const std::size_t samples = runs.front().size();
    for (const auto& run : runs) {
        if (run.size() != samples) {
            throw std::logic_error("aggregate_series: runs disagree on sample count");
        }
        for (std::size_t i = 0; i < samples; ++i) {
            if (run[i].time != runs.front()[i].time) {
                throw std::logic_error("aggregate_series: runs disagree on sample timestamps");
            }
        }
    }

    auto columns = csv_columns(scenario);
    columns.erase(columns.begin());  // time handled separately

    AggregateSeries agg;
    agg.columns = columns;
    agg.time.resize(samples);
    agg.mean.assign(columns.size(), std::vector<double>(samples, 0.0));
    agg.std_dev.assign(columns.size(), std::vector<double>(samples, 0.0));

    std::vector<std::vector<std::vector<double>>> rows(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        rows[r].reserve(samples);
        for (const auto& record : runs[r]) {
            rows[r].push_back(csv_row(record));
        }
    }

    const double n = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < samples; ++i) {
        agg.time[i] = runs.front()[i].time;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < runs.size(); ++r) {
                sum += rows[r][i][c + 1];
            }
            const double mean = sum / n;
            double var = 0.0;
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const double diff = rows[r][i][c + 1] - mean;
                var += diff * diff;
            }
            agg.mean[c][i] = mean;
            agg.std_dev[c][i] = std::sqrt(var / n);
        }
    }
    return agg;
}

void write_aggregate_csv(std::ostream& out, const AggregateSeries& series) {
    out << "time";
    for (const auto& column : series.columns) {
        out << "," << column << "_mean," << column << "_std";
    }
    out << "\n";
    for (std::size_t i = 0; i < series.time.size(); ++i) {
        out << format_value(series.time[i]);
        for (std::size_t c = 0; c < series.columns.size(); ++c) {
            out << "," << format_value(series.mean[c][i]) << "," << format_value(series.std_dev[c][i]);
        }
        out << "\n";
    }
}

std::string aggregate_csv_string(const AggregateSeries& series) {
    std::ostringstream out;
    write_aggregate_csv(out, series);
    return out.str();
}

}  // namespace depas
