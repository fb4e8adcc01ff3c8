#include "gridstorm/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gridstorm {

namespace {

constexpr double kEps = 1e-12;

struct Participation {
    std::vector<std::size_t> gens;      // generator indices allowed to run
    std::vector<std::size_t> priority;  // positions into `gens`
};

// Regular units serve an island whenever one of them can; standby units
// take over only when the island holds no regular capacity.
Participation participation(const GridCase& grid, const std::vector<std::size_t>& label,
                            std::size_t island, const DispatchPolicy& policy) {
    const auto& gens = grid.generators();
    Participation p;
    bool regular = false;
    for (std::size_t g = 0; g < gens.size(); ++g)
        if (label[grid.bus_position(gens[g].bus)] == island && !gens[g].standby && gens[g].p_max > 0.0)
            regular = true;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        if (label[grid.bus_position(gens[g].bus)] != island || gens[g].p_max <= 0.0) continue;
        if (gens[g].standby == regular) continue;
        p.gens.push_back(g);
    }
    for (std::size_t g : policy.priority) {
        auto it = std::find(p.gens.begin(), p.gens.end(), g);
        if (it != p.gens.end()) p.priority.push_back(static_cast<std::size_t>(it - p.gens.begin()));
    }
    return p;
}

// Share of one extra unit of demand picked up by each participating unit,
// valid while the island is not saturated.
std::vector<double> marginal_shares(std::span<const double> p_max, double total_demand,
                                    std::span<const std::size_t> priority) {
    std::vector<double> share(p_max.size(), 0.0);
    double remaining = total_demand;
    std::vector<bool> is_prio(p_max.size(), false);
    for (std::size_t p : priority) {
        is_prio[p] = true;
        if (remaining < p_max[p]) {
            share[p] = 1.0;
            return share;
        }
        remaining -= p_max[p];
    }
    double rest = 0.0;
    for (std::size_t g = 0; g < p_max.size(); ++g)
        if (!is_prio[g]) rest += p_max[g];
    if (rest <= 0.0) return share;
    for (std::size_t g = 0; g < p_max.size(); ++g)
        if (!is_prio[g]) share[g] = p_max[g] / rest;
    return share;
}

std::string island_dump(const GridCase& grid, const std::vector<std::size_t>& buses) {
    std::ostringstream os;
    os << "island buses {";
    for (std::size_t i = 0; i < buses.size(); ++i)
        os << (i ? "," : "") << grid.buses()[buses[i]].id;
    os << "}";
    return os.str();
}

struct IslandSystem {
    std::vector<std::size_t> buses;  // bus positions, reference first
    Eigen::LDLT<Eigen::MatrixXd> factor;
};

// Reduced susceptance system per island; the reference bus (lowest id) is dropped.
std::vector<IslandSystem> factor_islands(const GridCase& grid, const std::vector<std::vector<std::size_t>>& comps,
                                         std::vector<std::ptrdiff_t>& local) {
    local.assign(grid.bus_count(), -1);
    std::vector<IslandSystem> out;
    out.reserve(comps.size());
    for (const auto& comp : comps) {
        IslandSystem sys;
        sys.buses = comp;
        auto ref = std::min_element(sys.buses.begin(), sys.buses.end(), [&](std::size_t a, std::size_t b) {
            return grid.buses()[a].id < grid.buses()[b].id;
        });
        std::iter_swap(sys.buses.begin(), ref);
        for (std::size_t k = 0; k < sys.buses.size(); ++k)
            local[sys.buses[k]] = static_cast<std::ptrdiff_t>(k) - 1;  // reference -> -1
        out.push_back(std::move(sys));
    }
    std::vector<Eigen::MatrixXd> b(out.size());
    const auto label = island_labels(grid);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto n = static_cast<Eigen::Index>(out[c].buses.size()) - 1;
        b[c] = Eigen::MatrixXd::Zero(n, n);
    }
    for (const auto& br : grid.branches()) {
        if (!br.alive) continue;
        const auto i = grid.bus_position(br.from), j = grid.bus_position(br.to);
        auto& m = b[label[i]];
        const double y = 1.0 / br.reactance;
        const auto li = local[i], lj = local[j];
        if (li >= 0) m(li, li) += y;
        if (lj >= 0) m(lj, lj) += y;
        if (li >= 0 && lj >= 0) {
            m(li, lj) -= y;
            m(lj, li) -= y;
        }
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        if (b[c].rows() == 0) continue;
        out[c].factor.compute(b[c]);
        if (out[c].factor.info() != Eigen::Success || !out[c].factor.isPositive() ||
            out[c].factor.vectorD().minCoeff() <= kEps)
            throw SingularSystemError("singular reduced susceptance system: " + island_dump(grid, out[c].buses));
    }
    return out;
}

}  // namespace

IslandDispatch balance_island(std::span<const double> p_max, std::span<const double> p_min,
                              std::span<const double> demands, std::span<const std::size_t> priority) {
    IslandDispatch out;
    out.generation.assign(p_max.size(), 0.0);
    out.served.assign(demands.begin(), demands.end());

    const double capacity = std::accumulate(p_max.begin(), p_max.end(), 0.0);
    const double total = std::accumulate(demands.begin(), demands.end(), 0.0);
    out.has_generator = capacity > 0.0;

    if (!out.has_generator) {
        std::fill(out.served.begin(), out.served.end(), 0.0);
        return out;
    }
    if (total >= capacity) {
        out.saturated = total > capacity;
        std::copy(p_max.begin(), p_max.end(), out.generation.begin());
        const double scale = capacity / total;
        for (auto& d : out.served) d *= scale;
    } else {
        double remaining = total;
        std::vector<bool> is_prio(p_max.size(), false);
        for (std::size_t p : priority) {
            is_prio[p] = true;
            const double g = std::min(p_max[p], remaining);
            out.generation[p] = g;
            remaining -= g;
        }
        double rest = 0.0;
        for (std::size_t g = 0; g < p_max.size(); ++g)
            if (!is_prio[g]) rest += p_max[g];
        if (remaining > 0.0 && rest > 0.0)
            for (std::size_t g = 0; g < p_max.size(); ++g)
                if (!is_prio[g]) out.generation[g] = p_max[g] * (remaining / rest);
    }
    for (std::size_t g = 0; g < p_max.size(); ++g)
        if (out.generation[g] > 0.0 && g < p_min.size() && out.generation[g] < p_min[g]) out.pmin_relaxed = true;
    return out;
}

Dispatch balance(const GridCase& grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy) {
    const auto n = static_cast<Eigen::Index>(grid.bus_count());
    const auto& gens = grid.generators();
    Dispatch out;
    out.generation = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gens.size()));
    out.served = Eigen::VectorXd::Zero(n);
    out.injection = Eigen::VectorXd::Zero(n);
    out.label = island_labels(grid);
    const auto comps = islands(grid);

    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto part = participation(grid, out.label, c, policy);
        std::vector<double> pmax, pmin, dem;
        std::vector<std::size_t> loads;
        for (auto g : part.gens) {
            pmax.push_back(gens[g].p_max);
            pmin.push_back(gens[g].p_min);
        }
        for (auto b : comps[c]) {
            if (grid.buses()[b].kind != BusKind::load) continue;
            loads.push_back(b);
            dem.push_back(std::max(0.0, demand[static_cast<Eigen::Index>(b)]));
        }
        const auto res = balance_island(pmax, pmin, dem, part.priority);

        IslandBalance ib;
        ib.buses = comps[c];
        ib.has_generator = res.has_generator;
        ib.saturated = res.saturated;
        ib.pmin_relaxed = res.pmin_relaxed;
        for (std::size_t k = 0; k < part.gens.size(); ++k) {
            const auto g = part.gens[k];
            out.generation[static_cast<Eigen::Index>(g)] = res.generation[k];
            out.injection[static_cast<Eigen::Index>(grid.bus_position(gens[g].bus))] += res.generation[k];
            ib.generation += res.generation[k];
        }
        for (std::size_t k = 0; k < loads.size(); ++k) {
            const auto b = static_cast<Eigen::Index>(loads[k]);
            out.served[b] = res.served[k];
            out.injection[b] -= res.served[k];
            ib.requested += dem[k];
            ib.served += res.served[k];
        }
        out.islands.push_back(std::move(ib));
    }
    return out;
}

std::vector<std::size_t> unsupplied_loads(const GridCase& grid) {
    const auto label = island_labels(grid);
    std::vector<bool> powered(grid.bus_count(), false);
    for (const auto& g : grid.generators())
        if (g.p_max > 0.0) powered[label[grid.bus_position(g.bus)]] = true;
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < grid.bus_count(); ++b)
        if (grid.buses()[b].kind == BusKind::load && !powered[label[b]]) out.push_back(b);
    return out;
}

FlowSolution solve_dc(const GridCase& grid, const Eigen::VectorXd& injection) {
    const auto comps = islands(grid);
    std::vector<std::ptrdiff_t> local;
    const auto systems = factor_islands(grid, comps, local);

    FlowSolution sol;
    sol.injection = injection;
    sol.angles = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.bus_count()));
    sol.flows = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.branch_count()));

    for (const auto& sys : systems) {
        const auto n = static_cast<Eigen::Index>(sys.buses.size()) - 1;
        if (n == 0) continue;
        Eigen::VectorXd rhs(n);
        for (Eigen::Index k = 0; k < n; ++k) rhs[k] = injection[static_cast<Eigen::Index>(sys.buses[k + 1])];
        const Eigen::VectorXd theta = sys.factor.solve(rhs);
        if (!theta.allFinite()) throw SingularSystemError("non-finite angles: " + island_dump(grid, sys.buses));
        for (Eigen::Index k = 0; k < n; ++k) sol.angles[static_cast<Eigen::Index>(sys.buses[k + 1])] = theta[k];
    }
    const auto& branches = grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        const auto& br = branches[l];
        if (!br.alive) continue;
        const auto i = static_cast<Eigen::Index>(grid.bus_position(br.from));
        const auto j = static_cast<Eigen::Index>(grid.bus_position(br.to));
        sol.flows[static_cast<Eigen::Index>(l)] = (sol.angles[i] - sol.angles[j]) / br.reactance;
    }
    return sol;
}

FlowSolution solve_state(const GridCase& grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy) {
    return solve_dc(grid, balance(grid, demand, policy).injection);
}

Eigen::MatrixXd ptdf(const GridCase& grid) {
    const auto comps = islands(grid);
    std::vector<std::ptrdiff_t> local;
    const auto systems = factor_islands(grid, comps, local);
    const auto label = island_labels(grid);

    // Angle response to unit injection at each bus, per island.
    const auto nb = static_cast<Eigen::Index>(grid.bus_count());
    std::vector<Eigen::MatrixXd> inv(systems.size());
    for (std::size_t c = 0; c < systems.size(); ++c) {
        const auto n = static_cast<Eigen::Index>(systems[c].buses.size()) - 1;
        if (n > 0) inv[c] = systems[c].factor.solve(Eigen::MatrixXd::Identity(n, n));
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.branch_count()), nb);
    const auto& branches = grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        const auto& br = branches[l];
        if (!br.alive) continue;
        const auto i = grid.bus_position(br.from), j = grid.bus_position(br.to);
        const auto c = label[i];
        const auto& sys = systems[c];
        const auto li = local[i], lj = local[j];
        for (std::size_t k = 1; k < sys.buses.size(); ++k) {
            const auto col = static_cast<Eigen::Index>(k) - 1;
            const double ti = li >= 0 ? inv[c](li, col) : 0.0;
            const double tj = lj >= 0 ? inv[c](lj, col) : 0.0;
            h(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(sys.buses[k])) = (ti - tj) / br.reactance;
        }
    }
    return h;
}

double SensitivityMatrix::at(std::size_t branch_pos, std::size_t load_bus_pos) const {
    auto it = std::find(loads.begin(), loads.end(), load_bus_pos);
    if (it == loads.end()) throw std::out_of_range("bus is not a load column");
    return entries(static_cast<Eigen::Index>(branch_pos), it - loads.begin());
}

SensitivityMatrix sensitivities(const GridCase& grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy) {
    return sensitivities(grid, demand, policy, ptdf(grid));
}

SensitivityMatrix sensitivities(const GridCase& grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy,
                                const Eigen::MatrixXd& h) {
    const auto label = island_labels(grid);
    const auto comps = islands(grid);
    const auto& gens = grid.generators();
    SensitivityMatrix out;
    out.loads = grid.load_positions();
    const auto nb = static_cast<Eigen::Index>(grid.bus_count());
    Eigen::MatrixXd dinj = Eigen::MatrixXd::Zero(nb, static_cast<Eigen::Index>(out.loads.size()));

    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto part = participation(grid, label, c, policy);
        std::vector<double> pmax;
        double capacity = 0.0;
        for (auto g : part.gens) {
            pmax.push_back(gens[g].p_max);
            capacity += gens[g].p_max;
        }
        if (capacity <= 0.0) continue;  // dead island: zero columns
        double total = 0.0;
        for (auto b : comps[c])
            if (grid.buses()[b].kind == BusKind::load) total += std::max(0.0, demand[static_cast<Eigen::Index>(b)]);

        for (std::size_t k = 0; k < out.loads.size(); ++k) {
            const auto lb = out.loads[k];
            if (label[lb] != c) continue;
            const auto col = static_cast<Eigen::Index>(k);
            if (total >= capacity) {
                // Generation pinned at p_max; served demand scales by capacity / total.
                const double s = capacity / total;
                for (auto b : comps[c]) {
                    if (grid.buses()[b].kind != BusKind::load) continue;
                    const double d = std::max(0.0, demand[static_cast<Eigen::Index>(b)]);
                    double ds = -d * s / total;
                    if (b == lb) ds += s;
                    dinj(static_cast<Eigen::Index>(b), col) -= ds;
                }
            } else {
                const auto share = marginal_shares(pmax, total, part.priority);
                for (std::size_t g = 0; g < part.gens.size(); ++g)
                    dinj(static_cast<Eigen::Index>(grid.bus_position(gens[part.gens[g]].bus)), col) += share[g];
                dinj(static_cast<Eigen::Index>(lb), col) -= 1.0;
            }
        }
    }
    out.entries = h * dinj;
    return out;
}

double kirchhoff_residual(const GridCase& grid, const FlowSolution& sol) {
    Eigen::VectorXd net = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.bus_count()));
    const auto& branches = grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        if (!branches[l].alive) continue;
        const double f = sol.flows[static_cast<Eigen::Index>(l)];
        net[static_cast<Eigen::Index>(grid.bus_position(branches[l].from))] += f;
        net[static_cast<Eigen::Index>(grid.bus_position(branches[l].to))] -= f;
    }
    return (net - sol.injection).cwiseAbs().maxCoeff();
}

double angle_residual(const GridCase& grid, const FlowSolution& sol) {
    double worst = 0.0;
    const auto& branches = grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        const auto& br = branches[l];
        if (!br.alive) continue;
        const double r = sol.angles[static_cast<Eigen::Index>(grid.bus_position(br.from))] -
                         sol.angles[static_cast<Eigen::Index>(grid.bus_position(br.to))] -
                         br.reactance * sol.flows[static_cast<Eigen::Index>(l)];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

Eigen::VectorXd nominal_demand(const GridCase& grid) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(grid.bus_count()));
    for (std::size_t b = 0; b < grid.bus_count(); ++b) d[static_cast<Eigen::Index>(b)] = grid.buses()[b].nominal_demand;
    return d;
}

}  // namespace gridstorm
