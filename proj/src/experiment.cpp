#include "gridstorm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "gridstorm/powerflow.hpp"

namespace gridstorm {

namespace fs = std::filesystem;

GridCase resolve_case(const std::string& name_or_path) {
    if (name_or_path == "ieee14" || name_or_path == "ieee9") return fixture(name_or_path);
    return load_case_file(name_or_path);
}

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::capacity: return "capacity";
        case SweepParam::resource: return "resource";
        case SweepParam::mgload: return "mgload";
    }
    return "capacity";
}

SweepParam parse_sweep_param(std::string_view s) {
    if (s == "capacity") return SweepParam::capacity;
    if (s == "resource") return SweepParam::resource;
    if (s == "mgload") return SweepParam::mgload;
    throw std::invalid_argument("unknown sweep parameter '" + std::string(s) + "'");
}

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::total_failures: return "total_failures";
        case Metric::microgrids_islanded: return "microgrids_islanded";
        case Metric::microgrid_failures: return "microgrid_failures";
    }
    return "total_failures";
}

void ExperimentConfig::validate() const {
    auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    if (!in(capacity_reduction, 0.0, 0.78)) throw ValidationError("capacity_reduction must lie in [0, 0.78]");
    if (!in(resource_fraction, 0.0, 0.65)) throw ValidationError("resource_fraction must lie in [0, 0.65]");
    if (runs < 1) throw ValidationError("runs must be at least 1");
    if (!(capacity_headroom > 0.0)) throw ValidationError("capacity_headroom must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
    if (!(microgrid_load_total > 0.0) || !(rated_microgrid_load > 0.0))
        throw ValidationError("microgrid loads must be positive");
    for (const auto& [p, values] : sweep_values)
        for (double v : values) {
            if (p == SweepParam::capacity && !in(v, 0.0, 0.78))
                throw ValidationError("capacity sweep value out of [0, 0.78]");
            if (p == SweepParam::resource && !in(v, 0.0, 0.65))
                throw ValidationError("resource sweep value out of [0, 0.65]");
            if (p == SweepParam::mgload && !(v > 0.0)) throw ValidationError("mgload sweep value must be positive");
        }
}

std::vector<double> default_sweep_values(SweepParam p) {
    switch (p) {
        case SweepParam::capacity: return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.78};
        case SweepParam::resource:
            return {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65};
        case SweepParam::mgload: return {13.5, 15.5, 17.5, 19.5, 21.5};
    }
    return {};
}

std::vector<double> sweep_values(const ExperimentConfig& cfg, SweepParam p) {
    if (auto it = cfg.sweep_values.find(p); it != cfg.sweep_values.end()) return it->second;
    return default_sweep_values(p);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double number(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw std::runtime_error("config line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

int integer(const std::string& s, std::size_t line) {
    const double v = number(s, line);
    if (v != std::floor(v))
        throw std::runtime_error("config line " + std::to_string(line) + ": expected integer, got '" + s + "'");
    return static_cast<int>(v);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg) {
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    bool sweeps_set = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("config line " + std::to_string(line_no) + ": bad section");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "tariff" && section != "genattack")
                throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));

        if (section == "tariff") {
            const auto parts = split_list(value);
            if (parts.size() != 3)
                throw std::runtime_error("config line " + std::to_string(line_no) + ": tariff needs r rho k");
            cfg.tariff[integer(key, line_no)] = {number(parts[0], line_no), number(parts[1], line_no),
                                                 number(parts[2], line_no)};
            continue;
        }
        if (section == "genattack") {
            cfg.generator_costs[integer(key, line_no)] = number(value, line_no);
            continue;
        }

        if (key == "case" || key == "main_case") cfg.main_case = value;
        else if (key == "microgrid_case") cfg.microgrid_case = value;
        else if (key == "attach" || key == "attachments") {
            cfg.attachments.clear();
            for (const auto& p : split_list(value)) cfg.attachments.push_back(integer(p, line_no));
        }
        else if (key == "capacity_headroom") cfg.capacity_headroom = number(value, line_no);
        else if (key == "capacity_reduction") cfg.capacity_reduction = number(value, line_no);
        else if (key == "resource_fraction") cfg.resource_fraction = number(value, line_no);
        else if (key == "microgrid_load_total") cfg.microgrid_load_total = number(value, line_no);
        else if (key == "rated_microgrid_load") cfg.rated_microgrid_load = number(value, line_no);
        else if (key == "alpha") cfg.alpha = number(value, line_no);
        else if (key == "runs") cfg.runs = integer(value, line_no);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(number(value, line_no));
        else if (key == "generator_attack_cost") cfg.generator_attack_cost = number(value, line_no);
        else if (key == "out") cfg.out_dir = value;
        else if (key == "workers") cfg.workers = static_cast<unsigned>(integer(value, line_no));
        else if (key == "sweep") {
            if (!sweeps_set) cfg.sweeps.clear();
            sweeps_set = true;
            for (const auto& p : split_list(value)) cfg.sweeps.push_back(parse_sweep_param(p));
        }
        else if (key.rfind("sweep.", 0) == 0) {
            std::vector<double> vals;
            for (const auto& p : split_list(value)) vals.push_back(number(p, line_no));
            cfg.sweep_values[parse_sweep_param(key.substr(6))] = std::move(vals);
        }
        else throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const fs::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), std::move(base));
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

namespace {

void check_fraction(double reduction) {
    if (!(reduction >= 0.0 && reduction < 1.0)) throw ValidationError("capacity reduction must lie in [0, 1)");
}

}  // namespace

GridCase assign_capacities(GridCase grid, double beta, double reduction) {
    check_fraction(reduction);
    for (auto& br : grid.branches()) br.alive = true;
    const auto base = solve_state(grid, nominal_demand(grid));
    auto& branches = grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        auto& br = branches[l];
        if (br.capacity_from_base)
            br.capacity = beta * std::max(std::abs(base.flows[static_cast<Eigen::Index>(l)]), 0.01);
        br.capacity *= 1.0 - reduction;
    }
    return grid;
}

ComposedGrid assign_capacities(ComposedGrid composed, double beta, double reduction) {
    check_fraction(reduction);
    auto& grid = composed.merged;
    for (auto& br : grid.branches()) br.alive = true;
    const auto demand = nominal_demand(grid);
    const Eigen::VectorXd connected = solve_state(grid, demand).flows.cwiseAbs();
    Eigen::VectorXd envelope = connected;
    std::vector<bool> tie(grid.branch_count(), false);
    for (const auto& mg : composed.microgrids) {
        GridCase alone = grid;
        for (int t : mg.tie_lines) {
            alone.kill_branch(t);
            tie[grid.branch_position(t)] = true;
        }
        const Eigen::VectorXd islanded = solve_state(alone, demand).flows.cwiseAbs();
        for (std::size_t l = 0; l < grid.branch_count(); ++l) {
            const auto& br = grid.branches()[l];
            const bool inside = std::find(mg.member_buses.begin(), mg.member_buses.end(), br.from) !=
                                    mg.member_buses.end() &&
                                std::find(mg.member_buses.begin(), mg.member_buses.end(), br.to) !=
                                    mg.member_buses.end();
            const auto i = static_cast<Eigen::Index>(l);
            if (inside) envelope[i] = std::max(envelope[i], islanded[i]);
        }
    }
    auto& branches = grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        auto& br = branches[l];
        if (tie[l]) continue;
        if (br.capacity_from_base) br.capacity = beta * std::max(envelope[static_cast<Eigen::Index>(l)], 0.01);
        br.capacity *= 1.0 - reduction;
    }
    return composed;
}

ComposedGrid scale_microgrid_load(ComposedGrid composed, double target) {
    if (!(target > 0.0)) throw ValidationError("microgrid load target must be positive");
    auto& grid = composed.merged;
    std::vector<std::size_t> loads;
    double total = 0.0;
    for (const auto& mg : composed.microgrids)
        for (int id : mg.member_buses) {
            const auto b = grid.bus_position(id);
            if (grid.buses()[b].kind != BusKind::load) continue;
            loads.push_back(b);
            total += grid.buses()[b].nominal_demand;
        }
    if (loads.empty() || !(total > 0.0)) throw ValidationError("grid has no microgrid load to scale");
    const double factor = target / total;
    for (auto b : loads) grid.set_nominal_demand(b, grid.buses()[b].nominal_demand * factor);
    return composed;
}

ComposedGrid rate_tie_lines(ComposedGrid composed, double factor) {
    auto& grid = composed.merged;
    for (const auto& mg : composed.microgrids) {
        double load = 0.0;
        for (int id : mg.member_buses) load += grid.buses()[grid.bus_position(id)].nominal_demand;
        for (int t : mg.tie_lines) grid.branch(t).capacity = factor * load;
    }
    return composed;
}

AttackSetup build_setup(const ExperimentConfig& cfg) {
    const auto main = resolve_case(cfg.main_case);
    const auto sub = resolve_case(cfg.microgrid_case);
    std::vector<std::pair<int, GridCase>> attach;
    for (int host : cfg.attachments) attach.emplace_back(host, sub);
    auto composed = compose(main, attach);
    if (!composed.microgrids.empty()) {
        composed = rate_tie_lines(scale_microgrid_load(std::move(composed), cfg.rated_microgrid_load));
        composed = assign_capacities(std::move(composed), cfg.capacity_headroom, cfg.capacity_reduction);
        composed = scale_microgrid_load(std::move(composed), cfg.microgrid_load_total);
    } else {
        composed.merged = assign_capacities(std::move(composed.merged), cfg.capacity_headroom, cfg.capacity_reduction);
    }

    auto setup = make_attack_setup(std::move(composed), cfg.alpha, cfg.generator_attack_cost);
    const auto& grid = setup.grid.merged;
    for (const auto& [bus, t] : cfg.tariff) {
        auto& lt = setup.tariff.per_bus.at(grid.bus_position(bus));
        lt.rate = t.rate;
        lt.max_rate_change = t.max_rate_change;
        lt.sensitivity = t.sensitivity;
    }
    setup.tariff.rebase_bills(grid);
    setup.tariff.validate(grid);
    for (const auto& [bus, c] : cfg.generator_costs) {
        bool found = false;
        for (std::size_t k = 0; k < grid.generators().size(); ++k)
            if (grid.generators()[k].bus == bus) {
                setup.generator_attack_cost[k] = c;
                found = true;
            }
        if (!found) throw ValidationError("[genattack] names bus " + std::to_string(bus) + " without a generator");
        if (!(c > 0.0)) throw ValidationError("generator attack cost must be positive");
    }
    return setup;
}

double attack_budget(const AttackSetup& setup, double resource_fraction) {
    return resource_fraction * setup.max_attack_cost();
}

ExperimentConfig at_point(ExperimentConfig cfg, SweepParam p, double value) {
    switch (p) {
        case SweepParam::capacity: cfg.capacity_reduction = value; break;
        case SweepParam::resource: cfg.resource_fraction = value; break;
        case SweepParam::mgload: cfg.microgrid_load_total = value; break;
    }
    return cfg;
}

namespace {

SweepRow make_row(SweepParam p, double value, std::string algo, int run, std::uint64_t seed, const PlanResult& r) {
    SweepRow row;
    row.param = p;
    row.value = value;
    row.algorithm = std::move(algo);
    row.run = run;
    row.seed = seed;
    row.total_failures = r.total_node_failures;
    row.microgrids_islanded = static_cast<int>(r.s2.size());
    row.microgrid_failures = static_cast<int>(r.s3.size());
    row.lines_failed = static_cast<int>(r.s1.size());
    row.budget_spent = r.ledger.spent();
    return row;
}

template <class Job>
void run_pool(std::size_t jobs, unsigned workers, Job&& job) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, SweepParam p) {
    cfg.validate();
    const auto values = sweep_values(cfg, p);
    const auto runs = static_cast<std::size_t>(cfg.runs);
    const std::size_t per_value = 1 + runs;  // one pma, `runs` random

    std::vector<AttackSetup> setups;
    std::vector<double> budgets;
    for (double v : values) {
        const auto point = at_point(cfg, p, v);
        setups.push_back(build_setup(point));
        budgets.push_back(attack_budget(setups.back(), point.resource_fraction));
    }

    std::vector<PlanResult> results(values.size() * per_value);
    run_pool(results.size(), cfg.workers, [&](std::size_t job) {
        const auto vi = job / per_value, k = job % per_value;
        if (k == 0)
            results[job] = pma(setups[vi], budgets[vi]);
        else
            results[job] = random_baseline(setups[vi], budgets[vi], cfg.seed + (k - 1));
    });

    SweepResult out;
    out.param = p;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        const auto& pma_result = results[vi * per_value];
        for (std::size_t r = 0; r < runs; ++r)
            out.rows.push_back(make_row(p, values[vi], "pma", static_cast<int>(r), cfg.seed + r, pma_result));
        for (std::size_t r = 0; r < runs; ++r)
            out.rows.push_back(
                make_row(p, values[vi], "random", static_cast<int>(r), cfg.seed + r, results[vi * per_value + 1 + r]));

        for (const char* algo : {"pma", "random"}) {
            SummaryRow s;
            s.param = p;
            s.value = values[vi];
            s.algorithm = algo;
            for (const auto& row : out.rows) {
                if (row.value != values[vi] || row.algorithm != algo) continue;
                s.total_failures += row.total_failures;
                s.microgrids_islanded += row.microgrids_islanded;
                s.microgrid_failures += row.microgrid_failures;
                s.lines_failed += row.lines_failed;
                s.budget_spent += row.budget_spent;
            }
            const auto n = static_cast<double>(runs);
            s.total_failures /= n;
            s.microgrids_islanded /= n;
            s.microgrid_failures /= n;
            s.lines_failed /= n;
            s.budget_spent /= n;
            out.summary.push_back(s);
        }
        std::ostringstream tr;
        tr << "== pma " << to_string(p) << " = " << fmt("%g", values[vi]) << " (budget "
           << fmt("%.6f", budgets[vi]) << ")\n"
           << format_trace(pma_result.trace);
        out.traces.push_back(tr.str());
    }
    return out;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "sweep_parameter,value,algorithm,run,seed,total_node_failures,microgrids_islanded,"
          "microgrid_node_failures,lines_failed,budget_spent\n";
    for (const auto& row : r.rows)
        os << to_string(row.param) << ',' << fmt("%g", row.value) << ',' << row.algorithm << ',' << row.run << ','
           << row.seed << ',' << row.total_failures << ',' << row.microgrids_islanded << ','
           << row.microgrid_failures << ',' << row.lines_failed << ',' << fmt("%.6f", row.budget_spent) << '\n';
    return os.str();
}

std::string summary_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "sweep_parameter,value,algorithm,mean_total_node_failures,mean_microgrids_islanded,"
          "mean_microgrid_node_failures,mean_lines_failed,mean_budget_spent\n";
    for (const auto& s : r.summary)
        os << to_string(s.param) << ',' << fmt("%g", s.value) << ',' << s.algorithm << ','
           << fmt("%.4f", s.total_failures) << ',' << fmt("%.4f", s.microgrids_islanded) << ','
           << fmt("%.4f", s.microgrid_failures) << ',' << fmt("%.4f", s.lines_failed) << ','
           << fmt("%.6f", s.budget_spent) << '\n';
    return os.str();
}

std::string critical_nodes_csv(const std::vector<CriticalNode>& nodes) {
    std::ostringstream os;
    os << "bus,role,total_zw\n";
    for (const auto& n : nodes) os << n.bus << ',' << n.role << ',' << fmt("%.6f", n.weight) << '\n';
    return os.str();
}

std::string format_trace(const std::vector<PlanAction>& trace) {
    std::ostringstream os;
    auto ids = [&](const std::vector<int>& v) {
        os << '{';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << '}';
    };
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& a = trace[i];
        os << i << ' ' << a.stage << " target=" << a.target << " mg=" << a.microgrid << " cost=" << fmt("%.6f", a.cost)
           << " dz={";
        for (std::size_t k = 0; k < a.dz.size(); ++k)
            os << (k ? "," : "") << a.dz[k].first << ':' << fmt("%.4f", a.dz[k].second);
        os << "} lines=";
        ids(a.lines_failed);
        os << " nodes=";
        ids(a.nodes_failed);
        os << " islanded=";
        ids(a.microgrids_islanded);
        os << '\n';
    }
    return os.str();
}

std::string render_chart_svg(const SweepResult& r, Metric m) {
    constexpr double width = 640, height = 400, left = 70, right = 140, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    auto metric = [&](const SummaryRow& s) {
        switch (m) {
            case Metric::total_failures: return s.total_failures;
            case Metric::microgrids_islanded: return s.microgrids_islanded;
            case Metric::microgrid_failures: return s.microgrid_failures;
        }
        return 0.0;
    };
    double xmin = 0, xmax = 1, ymax = 1;
    bool first = true;
    for (const auto& s : r.summary) {
        if (first) xmin = xmax = s.value;
        xmin = std::min(xmin, s.value);
        xmax = std::max(xmax, s.value);
        ymax = std::max(ymax, metric(s));
        first = false;
    }
    if (xmax == xmin) xmax = xmin + 1;
    ymax = std::ceil(ymax);
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + ph - y / ymax * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << to_string(m)
       << " vs " << to_string(r.param) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double yv = ymax * t / 4.0, xv = xmin + (xmax - xmin) * t / 4.0;
        os << "<text x=\"" << left - 8 << "\" y=\"" << fmt("%.1f", py(yv) + 4) << "\" text-anchor=\"end\">"
           << fmt("%g", yv) << "</text>\n";
        os << "<text x=\"" << fmt("%.1f", px(xv)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << fmt("%g", xv) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
       << to_string(r.param) << "</text>\n";

    const std::pair<const char*, const char*> series[] = {{"pma", "#c0392b"}, {"random", "#2c7fb8"}};
    int slot = 0;
    for (const auto& [algo, color] : series) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool sep = false;
        for (const auto& s : r.summary) {
            if (s.algorithm != algo) continue;
            os << (sep ? " " : "") << fmt("%.2f", px(s.value)) << ',' << fmt("%.2f", py(metric(s)));
            sep = true;
        }
        os << "\"/>\n";
        for (const auto& s : r.summary)
            if (s.algorithm == algo)
                os << "<circle cx=\"" << fmt("%.2f", px(s.value)) << "\" cy=\"" << fmt("%.2f", py(metric(s)))
                   << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = top + 10 + 20 * slot++;
        os << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << algo << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

namespace {

void write_file(const fs::path& path, const std::string& content, RunArtifacts& art) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
    art.files.push_back(path);
}

}  // namespace

RunArtifacts run_experiments(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

    RunArtifacts art;
    std::string traces;
    for (auto p : cfg.sweeps) {
        const auto result = run_sweep(cfg, p);
        const std::string name(to_string(p));
        write_file(dir / ("sweep_" + name + ".csv"), sweep_csv(result), art);
        write_file(dir / ("summary_" + name + ".csv"), summary_csv(result), art);
        for (auto m : {Metric::total_failures, Metric::microgrids_islanded, Metric::microgrid_failures})
            write_file(dir / ("chart_" + name + "_" + std::string(to_string(m)) + ".svg"), render_chart_svg(result, m),
                       art);
        for (const auto& t : result.traces) traces += t;
    }
    const auto setup = build_setup(cfg);
    write_file(dir / "critical_nodes.csv",
               critical_nodes_csv(critical_nodes(setup, attack_budget(setup, cfg.resource_fraction))), art);
    write_file(dir / "trace.log", traces, art);
    return art;
}

}  // namespace gridstorm
