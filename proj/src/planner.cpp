#include "gridstorm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace gridstorm {

void BudgetLedger::charge(std::string action, double cost) {
    if (cost < 0.0) throw std::logic_error("negative charge");
    if (!can_afford(cost)) throw std::logic_error("charge exceeds budget: " + action);
    spent_ += cost;
    entries_.push_back({std::move(action), cost});
}

double AttackSetup::max_attack_cost() const {
    double total = 0.0;
    for (auto b : grid.merged.load_positions()) total += tariff.per_bus[b].cost_weight;
    for (double c : generator_attack_cost) total += c;
    return total;
}

AttackSetup make_attack_setup(ComposedGrid grid, double alpha, double generator_attack_cost) {
    AttackSetup s;
    s.tariff = Tariff::defaults(grid.merged);
    s.generator_attack_cost.assign(grid.merged.generators().size(), generator_attack_cost);
    s.grid = std::move(grid);
    s.alpha = alpha;
    return s;
}

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

const MicrogridSpec& find_microgrid(const ComposedGrid& composed, int id) {
    for (const auto& mg : composed.microgrids)
        if (mg.microgrid_id == id) return mg;
    throw std::invalid_argument("unknown microgrid " + std::to_string(id));
}

std::vector<int> member_loads(const ComposedGrid& composed, const MicrogridSpec& mg) {
    std::vector<int> out;
    for (int id : mg.member_buses)
        if (composed.merged.buses()[composed.merged.bus_position(id)].kind == BusKind::load) out.push_back(id);
    return out;
}

std::vector<int> failed_load_ids(const GridCase& grid) {
    std::vector<int> out;
    for (auto b : unsupplied_loads(grid)) out.push_back(grid.buses()[b].id);
    return out;
}

}  // namespace

std::vector<int> islanded_microgrids(const ComposedGrid& composed, const GridCase& topology) {
    const auto label = island_labels(topology);
    std::vector<bool> mains(topology.bus_count(), false);
    for (const auto& g : topology.generators())
        if (!g.standby && g.p_max > 0.0) mains[label[topology.bus_position(g.bus)]] = true;
    std::vector<int> out;
    for (const auto& mg : composed.microgrids) {
        auto probe = member_loads(composed, mg);
        if (probe.empty()) probe = mg.member_buses;
        const bool connected = std::any_of(probe.begin(), probe.end(),
                                           [&](int id) { return mains[label[topology.bus_position(id)]]; });
        if (!connected) out.push_back(mg.microgrid_id);
    }
    return out;
}

AttackWorld start_world(const AttackSetup& setup) {
    AttackWorld w;
    const auto& grid = setup.grid.merged;
    w.z = no_attack(grid);
    auto out = run_cascade(grid, attacked_demand(grid, setup.tariff, w.z), w.policy, setup.alpha);
    w.grid = std::move(out.final);
    w.thermal = out.flows.flows;
    w.failed_lines = out.s1;
    w.failed_nodes = out.s2;
    w.islanded = islanded_microgrids(setup.grid, w.grid);
    return w;
}

void apply_attack(AttackWorld& world, const AttackSetup& setup, PlanAction action, const AttackVector& z,
                  const DispatchPolicy& policy) {
    for (std::size_t b = 0; b < world.grid.bus_count(); ++b) {
        const auto i = static_cast<Eigen::Index>(b);
        if (z[i] > world.z[i] + 1e-15) action.dz.emplace_back(world.grid.buses()[b].id, z[i] - world.z[i]);
    }
    world.z = z;
    world.policy = policy;
    auto out = run_cascade(world.grid, attacked_demand(world.grid, setup.tariff, world.z), world.policy,
                           setup.alpha, world.thermal);
    world.grid = std::move(out.final);
    world.thermal = std::move(out.moving_avg);
    for (int l : out.s1) {
        world.failed_lines.push_back(l);
        action.lines_failed.push_back(l);
    }
    for (int n : out.s2) {
        if (contains(world.failed_nodes, n)) continue;
        world.failed_nodes.push_back(n);
        action.nodes_failed.push_back(n);
    }
    for (int m : islanded_microgrids(setup.grid, world.grid)) {
        if (contains(world.islanded, m)) continue;
        world.islanded.push_back(m);
        action.microgrids_islanded.push_back(m);
    }
    world.trace.push_back(std::move(action));
}

LinePotential islanding_potential(int line, const AttackWorld& world, const AttackSetup& setup) {
    LinePotential p;
    p.line = line;
    GridCase cut = world.grid;
    cut.kill_branch(line);
    for (int m : islanded_microgrids(setup.grid, cut))
        if (!contains(world.islanded, m)) ++p.microgrids;
    if (p.microgrids == 0) return p;
    p.mcb = mcb(line, world.grid, setup.tariff, world.z, world.policy);
    if (!p.mcb.feasible) return p;
    p.potential = p.mcb.cost > 0.0 ? p.microgrids / p.mcb.cost : kUnboundedPotential;
    return p;
}

std::vector<LinePotential> rank_lines(const AttackWorld& world, const AttackSetup& setup) {
    std::vector<LinePotential> ranked;
    for (const auto& br : world.grid.branches()) {
        if (!br.alive) continue;
        auto p = islanding_potential(br.id, world, setup);
        if (p.potential > 0.0) ranked.push_back(std::move(p));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const LinePotential& a, const LinePotential& b) {
        if (a.potential != b.potential) return a.potential > b.potential;
        return a.line < b.line;
    });
    return ranked;
}

ImResult im(AttackWorld& world, const AttackSetup& setup, BudgetLedger& ledger) {
    ImResult out;
    while (world.islanded.size() < setup.grid.microgrids.size()) {
        const auto ranked = rank_lines(world, setup);
        auto pick = std::find_if(ranked.begin(), ranked.end(),
                                 [&](const LinePotential& p) { return ledger.can_afford(p.mcb.cost); });
        if (pick == ranked.end()) break;
        ledger.charge("im line " + std::to_string(pick->line), pick->mcb.cost);
        PlanAction action;
        action.stage = "im";
        action.target = pick->line;
        action.cost = pick->mcb.cost;
        const auto before = world.failed_lines.size();
        apply_attack(world, setup, std::move(action), pick->mcb.z, world.policy);
        out.failed_lines.insert(out.failed_lines.end(), world.failed_lines.begin() + static_cast<std::ptrdiff_t>(before),
                                world.failed_lines.end());
        for (int m : world.trace.back().microgrids_islanded) out.islanded.push_back(m);
        if (world.failed_lines.size() == before)
            throw std::logic_error("im attack on line " + std::to_string(pick->line) + " tripped nothing");
    }
    return out;
}

namespace {

// The islands holding some load of interest, cut out as a standalone case.
struct Scope {
    GridCase sub;
    std::vector<std::size_t> bus_map;  // sub bus position -> world bus position
    DispatchPolicy policy;
    Eigen::MatrixXd h;
};

Scope make_scope(const AttackWorld& world, const std::vector<int>& loads) {
    const auto& g = world.grid;
    const auto label = island_labels(g);
    std::vector<bool> keep_island(g.bus_count(), false);
    for (int id : loads) keep_island[label[g.bus_position(id)]] = true;

    Scope s;
    std::vector<Bus> buses;
    for (std::size_t b = 0; b < g.bus_count(); ++b)
        if (keep_island[label[b]]) {
            buses.push_back(g.buses()[b]);
            s.bus_map.push_back(b);
        }
    std::vector<Generator> gens;
    std::vector<std::size_t> gen_map(g.generators().size(), SIZE_MAX);
    for (std::size_t k = 0; k < g.generators().size(); ++k)
        if (keep_island[label[g.bus_position(g.generators()[k].bus)]]) {
            gen_map[k] = gens.size();
            gens.push_back(g.generators()[k]);
        }
    std::vector<Branch> branches;
    for (const auto& br : g.branches())
        if (br.alive && keep_island[label[g.bus_position(br.from)]]) branches.push_back(br);
    for (auto k : world.policy.priority)
        if (gen_map[k] != SIZE_MAX) s.policy.priority.push_back(gen_map[k]);
    s.sub = GridCase(g.name() + "/scope", std::move(buses), std::move(gens), std::move(branches));
    s.h = ptdf(s.sub);
    return s;
}

class BlEvaluator {
public:
    BlEvaluator(const Scope& scope, const AttackSetup& setup, const AttackWorld& world)
        : scope_(scope), setup_(setup), world_(world) {
        z_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scope.sub.bus_count()));
        for (std::size_t k = 0; k < scope.bus_map.size(); ++k)
            z_[static_cast<Eigen::Index>(k)] = world.z[static_cast<Eigen::Index>(scope.bus_map[k])];
        demand_ = Eigen::VectorXd::Zero(z_.size());
        for (std::size_t k = 0; k < scope.bus_map.size(); ++k)
            if (scope.sub.buses()[k].kind == BusKind::load)
                demand_[static_cast<Eigen::Index>(k)] =
                    demand_response(setup.tariff.per_bus[scope.bus_map[k]], z_[static_cast<Eigen::Index>(k)]);
    }

    // Sets z for a scope bus position.
    void set(std::size_t sub_pos, double z) {
        const auto i = static_cast<Eigen::Index>(sub_pos);
        z_[i] = z;
        demand_[i] = demand_response(setup_.tariff.per_bus[scope_.bus_map[sub_pos]], z);
    }
    double z(std::size_t sub_pos) const { return z_[static_cast<Eigen::Index>(sub_pos)]; }

    int overloads(std::vector<int>* lines = nullptr, double* stress = nullptr) const {
        const auto inj = balance(scope_.sub, demand_, scope_.policy).injection;
        const Eigen::VectorXd f = scope_.h * inj;
        int count = 0;
        double worst = 0.0;  // highest loading among lines still within rating
        const auto& brs = scope_.sub.branches();
        for (std::size_t l = 0; l < brs.size(); ++l) {
            const double a = std::abs(f[static_cast<Eigen::Index>(l)]);
            if (a > brs[l].capacity) {
                ++count;
                if (lines) lines->push_back(brs[l].id);
            } else if (brs[l].capacity > 0.0) {
                worst = std::max(worst, a / brs[l].capacity);
            }
        }
        if (stress) *stress = worst;
        return count;
    }

private:
    const Scope& scope_;
    const AttackSetup& setup_;
    const AttackWorld& world_;
    Eigen::VectorXd z_;
    Eigen::VectorXd demand_;
};

struct Candidate {
    std::size_t sub_pos;
    double weight;
    std::vector<double> levels;  // admissible z values, first is the current one
};

}  // namespace

BlChoice bl_search(const AttackWorld& world, const AttackSetup& setup, const std::vector<int>& scope_loads,
                   double budget, const BlOptions& opts) {
    BlChoice best;
    best.z = world.z;
    if (scope_loads.empty()) return best;
    const Scope scope = make_scope(world, scope_loads);
    BlEvaluator eval(scope, setup, world);

    const auto failed = unsupplied_loads(scope.sub);
    std::vector<Candidate> cands;
    for (int id : scope_loads) {
        const auto sp = scope.sub.bus_position(id);
        if (std::find(failed.begin(), failed.end(), sp) != failed.end()) continue;
        const auto& t = setup.tariff.per_bus[scope.bus_map[sp]];
        const double z0 = eval.z(sp);
        if (!(t.max_rate_change > 0.0) || z0 >= 1.0) continue;
        Candidate c{sp, t.cost_weight, {z0}};
        for (int l = 0; l < opts.levels; ++l) {
            const double v = static_cast<double>(l) / (opts.levels - 1);
            if (v > z0 + 1e-12) c.levels.push_back(v);
        }
        cands.push_back(std::move(c));
    }

    std::vector<int> lines;
    best.overloads = eval.overloads(&lines);
    best.lines = lines;
    std::vector<double> best_z(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) best_z[i] = cands[i].levels.front();

    auto consider = [&](double cost) {
        std::vector<int> ls;
        const int n = eval.overloads(&ls);
        if (n > best.overloads || (n == best.overloads && cost < best.cost - 1e-12)) {
            best.overloads = n;
            best.cost = cost;
            best.lines = std::move(ls);
            for (std::size_t i = 0; i < cands.size(); ++i) best_z[i] = eval.z(cands[i].sub_pos);
        }
    };

    if (cands.size() <= opts.exhaustive_max_loads) {
        // Every combination of levels that fits the budget.
        auto rec = [&](auto&& self, std::size_t i, double cost) -> void {
            if (i == cands.size()) {
                consider(cost);
                return;
            }
            const auto& c = cands[i];
            for (double v : c.levels) {
                const double add = c.weight * (v - c.levels.front());
                if (cost + add > budget + 1e-12) break;
                eval.set(c.sub_pos, v);
                self(self, i + 1, cost + add);
            }
            eval.set(c.sub_pos, c.levels.front());
        };
        rec(rec, 0, 0.0);
    } else {
        // Extra start: the best single-line cover, rounded up onto the level grid.
        std::vector<double> cover_start;
        {
            Tariff sub_tariff;
            AttackVector z0 = AttackVector::Zero(static_cast<Eigen::Index>(scope.sub.bus_count()));
            for (std::size_t k = 0; k < scope.bus_map.size(); ++k) {
                sub_tariff.per_bus.push_back(setup.tariff.per_bus[scope.bus_map[k]]);
                z0[static_cast<Eigen::Index>(k)] = eval.z(k);
            }
            int best_n = 0;
            double best_cost = 0.0;
            for (const auto& br : scope.sub.branches()) {
                const auto r = mcb(br.id, scope.sub, sub_tariff, z0, scope.policy);
                if (!r.feasible || r.cost <= 0.0 || r.cost > budget + 1e-12) continue;
                std::vector<double> start(cands.size());
                double cost = 0.0;
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    const auto& c = cands[i];
                    const double want = r.z[static_cast<Eigen::Index>(c.sub_pos)];
                    auto it = std::find_if(c.levels.begin(), c.levels.end(),
                                           [&](double v) { return v >= want - 1e-12; });
                    start[i] = it == c.levels.end() ? c.levels.back() : *it;
                    cost += c.weight * (start[i] - c.levels.front());
                }
                if (cost > budget + 1e-12) continue;
                for (std::size_t i = 0; i < cands.size(); ++i) eval.set(cands[i].sub_pos, start[i]);
                const int n = eval.overloads();
                if (n > best_n || (n == best_n && n > 0 && cost < best_cost)) {
                    best_n = n;
                    best_cost = cost;
                    cover_start = start;
                }
            }
            for (const auto& c : cands) eval.set(c.sub_pos, c.levels.front());
        }

        std::mt19937_64 rng(opts.seed);
        const int starts = opts.restarts + 1 + (cover_start.empty() ? 0 : 1);
        for (int r = 0; r < starts; ++r) {
            for (const auto& c : cands) eval.set(c.sub_pos, c.levels.front());
            double cost = 0.0;
            if (r == opts.restarts + 1) {
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    eval.set(cands[i].sub_pos, cover_start[i]);
                    cost += cands[i].weight * (cover_start[i] - cands[i].levels.front());
                }
            } else if (r > 0) {
                // Random affordable starting point.
                for (const auto& c : cands) {
                    std::uniform_int_distribution<std::size_t> pick(0, c.levels.size() - 1);
                    const double v = c.levels[pick(rng)];
                    const double add = c.weight * (v - c.levels.front());
                    if (cost + add <= budget + 1e-12) {
                        eval.set(c.sub_pos, v);
                        cost += add;
                    }
                }
            }
            // Ascent on (overloads, stress): stress lets single moves make
            // progress before any line crosses its rating.
            double stress = 0.0;
            int current = eval.overloads(nullptr, &stress);
            consider(cost);
            while (true) {
                int n_best = current;
                double s_best = stress;
                double cost_best = cost;
                std::size_t which = cands.size();
                double to = 0.0;
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    const auto& c = cands[i];
                    const double now = eval.z(c.sub_pos);
                    for (double v : c.levels) {
                        if (v <= now) continue;
                        const double add = c.weight * (v - now);
                        if (cost + add > budget + 1e-12) break;
                        eval.set(c.sub_pos, v);
                        double s = 0.0;
                        const int n = eval.overloads(nullptr, &s);
                        const bool better = n > n_best || (n == n_best && s > s_best + 1e-9) ||
                                            (n == n_best && which != cands.size() && std::abs(s - s_best) <= 1e-9 &&
                                             cost + add < cost_best);
                        if (better) {
                            n_best = n;
                            s_best = s;
                            cost_best = cost + add;
                            which = i;
                            to = v;
                        }
                    }
                    eval.set(c.sub_pos, now);
                }
                if (which == cands.size()) break;
                eval.set(cands[which].sub_pos, to);
                cost = cost_best;
                current = n_best;
                stress = s_best;
                consider(cost);
            }
        }
    }

    for (std::size_t i = 0; i < cands.size(); ++i)
        best.z[static_cast<Eigen::Index>(scope.bus_map[cands[i].sub_pos])] = best_z[i];
    return best;
}

std::vector<int> bl(AttackWorld& world, const AttackSetup& setup, int microgrid, BudgetLedger& ledger,
                    const BlOptions& opts) {
    std::vector<int> scope;
    if (microgrid == 0) {
        for (auto p : world.grid.load_positions()) scope.push_back(world.grid.buses()[p].id);
    } else {
        scope = member_loads(setup.grid, find_microgrid(setup.grid, microgrid));
    }
    std::vector<int> loads;
    for (int id : scope)
        if (!contains(world.failed_nodes, id)) loads.push_back(id);
    if (loads.empty()) return {};

    auto choice = bl_search(world, setup, loads, ledger.remaining(), opts);
    if (microgrid == 0 && choice.lines.empty()) return {};
    if (choice.cost > 0.0)
        ledger.charge(microgrid == 0 ? std::string("bl grid") : "bl microgrid " + std::to_string(microgrid),
                      choice.cost);
    PlanAction action;
    action.stage = "bl";
    action.target = microgrid;
    action.microgrid = microgrid;
    action.cost = choice.cost;
    apply_attack(world, setup, std::move(action), choice.z, world.policy);
    return choice.lines;
}

std::vector<int> bm(AttackWorld& world, const AttackSetup& setup, int microgrid, BudgetLedger& ledger,
                    const BlOptions& opts) {
    const auto& mg = find_microgrid(setup.grid, microgrid);
    const auto loads = member_loads(setup.grid, mg);
    const auto& gens = world.grid.generators();

    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < gens.size(); ++k)
        if (contains(mg.member_buses, gens[k].bus)) order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gens[a].p_max != gens[b].p_max) return gens[a].p_max < gens[b].p_max;
        return gens[a].bus < gens[b].bus;
    });

    auto all_failed = [&] {
        return std::all_of(loads.begin(), loads.end(), [&](int id) { return contains(world.failed_nodes, id); });
    };

    for (std::size_t k : order) {
        if (all_failed()) break;
        // Units already cut off from every live load of the microgrid are not worth a price cut.
        const auto label = island_labels(world.grid);
        const auto island = label[world.grid.bus_position(gens[k].bus)];
        const bool serves = std::any_of(loads.begin(), loads.end(), [&](int id) {
            return !contains(world.failed_nodes, id) && label[world.grid.bus_position(id)] == island;
        });
        if (!serves) continue;
        const double cost = setup.generator_attack_cost[k];
        if (!ledger.can_afford(cost)) break;
        ledger.charge("bm generator " + std::to_string(gens[k].bus), cost);

        DispatchPolicy policy = world.policy;
        policy.priority.push_back(k);
        PlanAction action;
        action.stage = "bm";
        action.target = gens[k].bus;
        action.microgrid = microgrid;
        action.cost = cost;
        apply_attack(world, setup, std::move(action), world.z, policy);
        bl(world, setup, microgrid, ledger, opts);
    }

    std::vector<int> failed;
    for (int id : loads)
        if (contains(world.failed_nodes, id)) failed.push_back(id);
    return failed;
}

namespace {

PlanResult summarize(const AttackWorld& world, const AttackSetup& setup, BudgetLedger ledger) {
    PlanResult r;
    r.s1 = world.failed_lines;
    r.s2 = islanded_microgrids(setup.grid, world.grid);
    const auto failed = failed_load_ids(world.grid);
    r.total_node_failures = static_cast<int>(failed.size());
    for (int id : failed)
        if (const auto* mg = setup.grid.microgrid_of_bus(id); mg && contains(r.s2, mg->microgrid_id))
            r.s3.push_back(id);
    r.ledger = std::move(ledger);
    r.trace = world.trace;
    return r;
}

}  // namespace

PlanResult pma(const AttackSetup& setup, double budget, const BlOptions& opts) {
    BudgetLedger ledger(budget);
    auto world = start_world(setup);
    std::vector<int> broken;  // microgrids BM already worked on

    while (true) {
        const auto before = world.trace.size();
        im(world, setup, ledger);
        bool acted = world.trace.size() != before;
        for (int m : std::vector<int>(world.islanded)) {
            if (contains(broken, m)) continue;
            broken.push_back(m);
            const auto n = world.trace.size();
            bm(world, setup, m, ledger, opts);
            acted |= world.trace.size() != n;
        }
        if (acted) continue;
        // Nothing left to island or break inside microgrids: spend what remains on the whole grid.
        if (ledger.remaining() <= 0.0 || bl(world, setup, 0, ledger, opts).empty()) break;
    }
    return summarize(world, setup, std::move(ledger));
}

PlanResult random_baseline(const AttackSetup& setup, double budget, std::uint64_t seed) {
    BudgetLedger ledger(budget);
    auto world = start_world(setup);
    const auto& grid = setup.grid.merged;
    const auto loads = grid.load_positions();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> step(1, 10);

    auto raise_cost = [&](std::size_t b, double dz) { return setup.tariff.per_bus[b].cost_weight * dz; };
    while (true) {
        std::vector<std::size_t> open;
        bool affordable = false;
        for (auto b : loads) {
            const double z = world.z[static_cast<Eigen::Index>(b)];
            if (z >= 1.0 - 1e-12) continue;
            open.push_back(b);
            affordable |= ledger.can_afford(raise_cost(b, std::min(0.1, 1.0 - z)));
        }
        if (!affordable) break;

        std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
        const auto b = open[pick(rng)];
        const double inc = 0.1 * step(rng);
        const double z = world.z[static_cast<Eigen::Index>(b)];
        const double next = std::min(1.0, z + inc);
        const double cost = raise_cost(b, next - z);
        if (!ledger.can_afford(cost)) continue;
        ledger.charge("random load " + std::to_string(grid.buses()[b].id), cost);
        AttackVector zn = world.z;
        zn[static_cast<Eigen::Index>(b)] = next;
        PlanAction action;
        action.stage = "random";
        action.target = grid.buses()[b].id;
        if (const auto* mg = setup.grid.microgrid_of_bus(action.target)) action.microgrid = mg->microgrid_id;
        action.cost = cost;
        apply_attack(world, setup, std::move(action), zn, world.policy);
    }
    return summarize(world, setup, std::move(ledger));
}

std::vector<CriticalNode> critical_nodes(const std::vector<PlanAction>& trace, const AttackSetup& setup) {
    std::map<std::pair<int, std::string>, double> acc;
    const auto& grid = setup.grid.merged;
    for (const auto& a : trace) {
        std::string role;
        if (a.stage == "im")
            role = "islanding-critical";
        else if (a.stage == "bl" || a.stage == "bm")
            role = "internal-critical";
        else
            continue;
        for (const auto& [bus, dz] : a.dz)
            acc[{bus, role}] += dz * setup.tariff.per_bus[grid.bus_position(bus)].cost_weight;
    }
    std::vector<CriticalNode> out;
    for (const auto& [key, w] : acc)
        if (w > 0.0) out.push_back({key.first, key.second, w});
    std::stable_sort(out.begin(), out.end(), [](const CriticalNode& a, const CriticalNode& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.bus < b.bus;
    });
    return out;
}

std::vector<CriticalNode> critical_nodes(const AttackSetup& setup, double budget) {
    return critical_nodes(pma(setup, budget).trace, setup);
}

}  // namespace gridstorm
