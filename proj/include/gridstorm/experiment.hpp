#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gridstorm/grid.hpp"
#include "gridstorm/planner.hpp"
#include "gridstorm/pricing.hpp"

namespace gridstorm {

/// Embedded copies of data/ieee14.case and data/ieee9.case.
std::string_view fixture_source(std::string_view name);
GridCase fixture(std::string_view name);

/// "ieee14"/"ieee9" resolve to the embedded fixtures, anything else is a path.
GridCase resolve_case(const std::string& name_or_path);

enum class SweepParam { capacity, resource, mgload };

std::string_view to_string(SweepParam p);
SweepParam parse_sweep_param(std::string_view s);

struct TariffOverride {
    double rate = 1.0;
    double max_rate_change = 0.5;
    double sensitivity = 0.0;
};

struct ExperimentConfig {
    std::string main_case = "ieee14";
    std::string microgrid_case = "ieee9";
    std::vector<int> attachments{13, 14};
    double capacity_headroom = 5.0;
    double capacity_reduction = 0.6;
    double resource_fraction = 0.2;
    // Summed nominal load of all microgrids. Ratings are assigned at the
    // rated total; the experiment then runs at microgrid_load_total.
    double microgrid_load_total = 13.5;
    double rated_microgrid_load = 13.5;
    double alpha = 1.0;
    int runs = 50;
    std::uint64_t seed = 42;
    double generator_attack_cost = 1.0;
    std::vector<SweepParam> sweeps{SweepParam::capacity, SweepParam::resource, SweepParam::mgload};
    std::map<SweepParam, std::vector<double>> sweep_values;  // falls back to default_sweep_values
    std::map<int, TariffOverride> tariff;    // by merged bus id
    std::map<int, double> generator_costs;   // by merged generator bus id
    std::string out_dir = "out";
    unsigned workers = 0;  // 0: hardware concurrency

    void validate() const;
};

std::vector<double> default_sweep_values(SweepParam p);
std::vector<double> sweep_values(const ExperimentConfig& cfg, SweepParam p);

/// Flat `key = value` text with optional [tariff] and [genattack] sections.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Fills '-' capacities with beta * max(|base flow|, 0.01), then scales every
/// capacity by (1 - reduction).
GridCase assign_capacities(GridCase grid, double beta, double reduction);

/// Composed variant: microgrid branches are rated for the larger of their
/// connected and stand-alone base flows; tie lines keep their rating.
ComposedGrid assign_capacities(ComposedGrid grid, double beta, double reduction);

/// Uniformly rescales microgrid loads so their sum equals `target`.
ComposedGrid scale_microgrid_load(ComposedGrid grid, double target);

/// Tie line rating = factor * nominal load of the microgrid it feeds.
ComposedGrid rate_tie_lines(ComposedGrid grid, double factor = 1.5);

/// Grid, tariff and generator costs for one experiment point.
AttackSetup build_setup(const ExperimentConfig& cfg);
double attack_budget(const AttackSetup& setup, double resource_fraction);

struct SweepRow {
    SweepParam param = SweepParam::capacity;
    double value = 0.0;
    std::string algorithm;
    int run = 0;
    std::uint64_t seed = 0;
    int total_failures = 0;
    int microgrids_islanded = 0;
    int microgrid_failures = 0;
    int lines_failed = 0;
    double budget_spent = 0.0;
};

struct SummaryRow {
    SweepParam param = SweepParam::capacity;
    double value = 0.0;
    std::string algorithm;
    double total_failures = 0.0;
    double microgrids_islanded = 0.0;
    double microgrid_failures = 0.0;
    double lines_failed = 0.0;
    double budget_spent = 0.0;
};

struct SweepResult {
    SweepParam param = SweepParam::capacity;
    std::vector<SweepRow> rows;  // sorted by (value index, algorithm, run)
    std::vector<SummaryRow> summary;
    std::vector<std::string> traces;  // pma trace per sweep value
};

/// Config with one sweep parameter set to `value`.
ExperimentConfig at_point(ExperimentConfig cfg, SweepParam p, double value);

SweepResult run_sweep(const ExperimentConfig& cfg, SweepParam p);

std::string sweep_csv(const SweepResult& r);
std::string summary_csv(const SweepResult& r);
std::string critical_nodes_csv(const std::vector<CriticalNode>& nodes);
std::string format_trace(const std::vector<PlanAction>& trace);

enum class Metric { total_failures, microgrids_islanded, microgrid_failures };
std::string_view to_string(Metric m);

/// Line chart of the per-value means, one series per algorithm.
std::string render_chart_svg(const SweepResult& r, Metric m);

struct RunArtifacts {
    std::vector<std::filesystem::path> files;
};

/// Runs every configured sweep and writes CSV, SVG, trace and critical-node outputs.
RunArtifacts run_experiments(const ExperimentConfig& cfg);

}  // namespace gridstorm
