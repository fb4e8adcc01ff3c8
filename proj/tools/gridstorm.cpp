#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridstorm/experiment.hpp"
#include "gridstorm/planner.hpp"

using namespace gridstorm;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> main_case;
    std::optional<std::string> microgrid_case;
    std::vector<int> attach;
    std::optional<double> capacity_reduction;
    std::optional<double> resource;
    std::optional<double> mgload;
    std::optional<double> alpha;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sweep;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "key = value experiment config file");
    cmd->add_option("--case", o.main_case, "main grid case file or fixture name (ieee14)");
    cmd->add_option("--microgrid-case", o.microgrid_case, "microgrid case file or fixture name (ieee9)");
    cmd->add_option("--attach", o.attach, "host bus for one microgrid; repeat per microgrid");
    cmd->add_option("--capacity-reduction", o.capacity_reduction, "line capacity reduction fraction")
        ->check(CLI::Range(0.0, 0.78));
    cmd->add_option("--resource", o.resource, "attacker budget as a fraction of the maximal attack")
        ->check(CLI::Range(0.0, 0.65));
    cmd->add_option("--mgload", o.mgload, "summed microgrid load");
    cmd->add_option("--alpha", o.alpha, "moving-average weight of the current flow")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--runs", o.runs, "random-baseline runs per sweep value")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--sweep", o.sweep, "capacity|resource|mgload; repeatable, default all three")
        ->check(CLI::IsMember({"capacity", "resource", "mgload"}));
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig cfg;
    if (!o.config.empty()) cfg = load_config(o.config);
    if (o.main_case) cfg.main_case = *o.main_case;
    if (o.microgrid_case) cfg.microgrid_case = *o.microgrid_case;
    if (!o.attach.empty()) cfg.attachments = o.attach;
    if (o.capacity_reduction) cfg.capacity_reduction = *o.capacity_reduction;
    if (o.resource) cfg.resource_fraction = *o.resource;
    if (o.mgload) cfg.microgrid_load_total = *o.mgload;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.runs) cfg.runs = *o.runs;
    if (o.seed) cfg.seed = *o.seed;
    if (!o.sweep.empty()) {
        cfg.sweeps.clear();
        for (const auto& s : o.sweep) cfg.sweeps.push_back(parse_sweep_param(s));
    }
    if (o.out) cfg.out_dir = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    cfg.validate();
    return cfg;
}

void print_plan(const char* name, const PlanResult& r) {
    std::cout << name << ": node failures " << r.total_node_failures << ", microgrids islanded " << r.s2.size()
              << ", failures inside microgrids " << r.s3.size() << ", lines failed " << r.s1.size() << ", spent "
              << r.ledger.spent() << " of " << r.ledger.total() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridstorm: price-modification attacks on grids with microgrids"};
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run = app.add_subcommand("run", "run the parameter sweeps and write CSV, SVG and logs");
    add_overrides(run, run_opts);

    Overrides plan_opts;
    auto* plan = app.add_subcommand("plan", "run one attack plan at the configured point and print its trace");
    add_overrides(plan, plan_opts);

    std::string check_path;
    auto* check = app.add_subcommand("check-case", "parse and validate a case file, print its size");
    check->add_option("case", check_path, "case file or fixture name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = resolve(run_opts);
            const auto art = run_experiments(cfg);
            for (const auto& f : art.files) std::cout << f.string() << '\n';
        } else if (*plan) {
            const auto cfg = resolve(plan_opts);
            const auto setup = build_setup(cfg);
            const double budget = attack_budget(setup, cfg.resource_fraction);
            const auto p = pma(setup, budget);
            std::cout << format_trace(p.trace);
            print_plan("pma", p);
            print_plan("random", random_baseline(setup, budget, cfg.seed));
        } else if (*check) {
            const auto grid = resolve_case(check_path);
            std::cout << grid.name() << ": " << grid.bus_count() << " buses, " << grid.generators().size()
                      << " generators, " << grid.load_positions().size() << " loads, " << grid.branch_count()
                      << " branches\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "gridstorm: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
