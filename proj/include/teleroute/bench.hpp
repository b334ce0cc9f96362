#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "teleroute/routing_graph.hpp"
#include "teleroute/teleport_optimizer.hpp"

namespace teleroute::bench {

struct RunRecord {
    LayoutName layout = LayoutName::Single;
    int q = 0;
    int g = 0;
    int d_l = 0;
    std::uint64_t seed = 0;
    int d_st = 0;
    int d_opt = 0;
    double seconds_st = 0;
    double seconds_opt = 0;

    /// Per-sample relative overhead; empty when d_st == d_l.
    [[nodiscard]] std::optional<double> r_tilde() const;
    [[nodiscard]] int delta() const { return d_st - d_opt; }
};

struct AggregateRow {
    LayoutName layout = LayoutName::Single;
    int q = 0;
    int g = 0;
    int d_l = 0;
    int samples = 0;
    double dst_mean = 0, dst_std = 0;
    double dopt_mean = 0, dopt_std = 0;
    std::optional<double> rtilde_mean, rtilde_std;  // over samples where r̃ is defined
    double delta_mean = 0, delta_std = 0;
    double delta_over_dst_mean = 0;
    int opt_worse = 0;  // samples with d_opt > d_st
};

struct SampleSeeds {
    std::uint64_t mapping = 0;
    std::uint64_t circuit = 0;
    std::uint64_t anneal = 0;
};

/// Independent mapping, circuit and search seeds for one sample seed (master + index).
SampleSeeds sample_seeds(std::uint64_t sample_seed);

class BenchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Compiles one random circuit with both compilers on a shared layout.
/// `seed` is the sample seed; the record stores it. With `check`, both schedules
/// are replayed through check_schedule and a violation throws BenchError.
RunRecord run_sample(LayoutName layout, int q, int g, int d_l, std::uint64_t seed, const AnnealConfig& cfg,
                     bool check = false);

/// Mean and sample standard deviation (n-1; 0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& xs);

AggregateRow aggregate(const std::vector<RunRecord>& records);

struct GridResult {
    std::vector<AggregateRow> rows;
    std::vector<RunRecord> records;
};

struct GridOptions {
    int samples = 10;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool log_progress = false;  // one line per finished sample on stderr
    bool check_schedules = false;
};

GridResult run_grid(const std::vector<LayoutName>& layouts, const std::vector<int>& depths, int q, int g,
                    const AnnealConfig& cfg, const GridOptions& opt);

struct SweepRow {
    AggregateRow row;
    int total_gates = 0;  // g * d_L actually compiled
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<RunRecord> records;
};

/// For each g, d_L = ceil(G/g). Throws std::invalid_argument if 2g > q.
SweepResult run_density_sweep(const std::vector<int>& g_values, int total_gates, int q, LayoutName layout,
                              const AnnealConfig& cfg, const GridOptions& opt);

struct LineFit {
    double slope = 0;
    double intercept = 0;
};

/// Ordinary least squares; throws std::invalid_argument with fewer than two distinct x.
LineFit linear_fit(const std::vector<std::pair<double, double>>& points);

inline constexpr const char* kCsvHeader =
    "layout,q,g,dL,samples,dst_mean,dst_std,dopt_mean,dopt_std,rtilde_mean,rtilde_std,delta_mean,delta_std,"
    "delta_over_dst_mean";

void write_csv(std::ostream& os, const std::vector<AggregateRow>& rows);
nlohmann::ordered_json records_to_json(const std::vector<RunRecord>& records);

}  // namespace teleroute::bench
