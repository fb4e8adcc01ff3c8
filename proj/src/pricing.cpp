#include "gridstorm/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gridstorm {

double demand_response(const LoadTariff& t, double z) {
    return (1.0 + t.sensitivity) * t.bill_target / (t.rate - z * t.max_rate_change);
}

Tariff Tariff::defaults(const GridCase& grid) {
    Tariff t;
    t.per_bus.resize(grid.bus_count());
    t.rebase_bills(grid);
    return t;
}

void Tariff::rebase_bills(const GridCase& grid) {
    per_bus.resize(grid.bus_count());
    for (std::size_t b = 0; b < grid.bus_count(); ++b)
        per_bus[b].bill_target = grid.buses()[b].nominal_demand * per_bus[b].rate;
}

void Tariff::validate(const GridCase& grid) const {
    if (per_bus.size() != grid.bus_count()) throw ValidationError("tariff size does not match grid");
    for (std::size_t b = 0; b < grid.bus_count(); ++b) {
        if (grid.buses()[b].kind != BusKind::load) continue;
        const auto& t = per_bus[b];
        const std::string tag = "tariff of bus " + std::to_string(grid.buses()[b].id);
        if (!(t.rate > 0.0)) throw ValidationError(tag + ": rate must be positive");
        if (!(t.max_rate_change >= 0.0 && t.max_rate_change < t.rate))
            throw ValidationError(tag + ": need 0 <= rho < r");
        if (!(t.sensitivity >= 0.0 && t.sensitivity <= 1.0)) throw ValidationError(tag + ": k must lie in [0, 1]");
        if (!(t.bill_target >= 0.0)) throw ValidationError(tag + ": negative bill target");
        if (!(t.cost_weight >= 0.0)) throw ValidationError(tag + ": negative cost weight");
    }
}

AttackVector no_attack(const GridCase& grid) {
    return AttackVector::Zero(static_cast<Eigen::Index>(grid.bus_count()));
}

Eigen::VectorXd attacked_demand(const GridCase& grid, const Tariff& tariff, const AttackVector& z) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.bus_count()));
    for (std::size_t b = 0; b < grid.bus_count(); ++b)
        if (grid.buses()[b].kind == BusKind::load)
            d[static_cast<Eigen::Index>(b)] = demand_response(tariff.per_bus[b], z[static_cast<Eigen::Index>(b)]);
    return d;
}

double attack_cost(const GridCase& grid, const AttackVector& z, const Tariff& tariff) {
    double c = 0.0;
    for (std::size_t b = 0; b < grid.bus_count(); ++b)
        if (grid.buses()[b].kind == BusKind::load) c += tariff.per_bus[b].cost_weight * z[static_cast<Eigen::Index>(b)];
    return c;
}

namespace {

struct PreparedItem {
    std::size_t index;
    double full_gain;  // contribution at z = 1
    double full_cost;  // cost of going to z = 1
};

double item_gain(const CoverItem& it, double z) {
    return it.slope * (demand_response(it.tariff, z) - demand_response(it.tariff, it.z_floor));
}

// Smallest z in [z_floor, 1] whose contribution reaches `gain`.
double item_inverse(const CoverItem& it, double gain) {
    if (gain <= 0.0) return it.z_floor;
    const double c = (1.0 + it.tariff.sensitivity) * it.tariff.bill_target;
    const double target = demand_response(it.tariff, it.z_floor) + gain / it.slope;
    const double z = (it.tariff.rate - c / target) / it.tariff.max_rate_change;
    return std::clamp(z, it.z_floor, 1.0);
}

class CoverSearch {
public:
    CoverSearch(const std::vector<CoverItem>& items, std::vector<PreparedItem> prepared)
        : items_(items), prep_(std::move(prepared)), state_(prep_.size(), Choice::undecided) {}

    CoverSolution run(double deficit) {
        dfs(0, 0.0, deficit);
        CoverSolution out;
        if (!std::isfinite(best_cost_)) return out;
        out.feasible = true;
        out.cost = best_cost_;
        out.z.resize(items_.size());
        for (std::size_t i = 0; i < items_.size(); ++i) out.z[i] = items_[i].z_floor;
        for (std::size_t k = 0; k < prep_.size(); ++k)
            if (best_state_[k] == Choice::included) out.z[prep_[k].index] = 1.0;
        if (best_partial_ != npos) out.z[prep_[best_partial_].index] = best_partial_z_;
        return out;
    }

private:
    enum class Choice { undecided, included, excluded };
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    void record(double cost, std::size_t partial, double partial_z) {
        if (cost < best_cost_ - 1e-15) {
            best_cost_ = cost;
            best_state_ = state_;
            best_partial_ = partial;
            best_partial_z_ = partial_z;
        }
    }

    // Cost of covering `deficit` with items treated as divisible at their
    // average gain rate. Gains are convex in z, so this never exceeds the
    // true cost of any completion.
    double relaxed_cost(double deficit) const {
        double cost = 0.0;
        for (std::size_t k = 0; k < prep_.size() && deficit > 0.0; ++k) {
            if (state_[k] == Choice::included) continue;
            const auto& p = prep_[k];
            if (p.full_gain >= deficit) return cost + p.full_cost * deficit / p.full_gain;
            cost += p.full_cost;
            deficit -= p.full_gain;
        }
        return deficit > 0.0 ? std::numeric_limits<double>::infinity() : cost;
    }

    void dfs(std::size_t depth, double cost, double deficit) {
        if (deficit <= 0.0) {
            record(cost, npos, 0.0);
            return;
        }
        // Complete with one partially raised load.
        for (std::size_t k = 0; k < prep_.size(); ++k) {
            if (state_[k] == Choice::included || prep_[k].full_gain < deficit) continue;
            const auto& it = items_[prep_[k].index];
            const double z = item_inverse(it, deficit);
            record(cost + it.tariff.cost_weight * (z - it.z_floor), k, z);
        }
        if (depth == prep_.size()) return;
        if (cost + relaxed_cost(deficit) >= best_cost_ - 1e-15) return;

        state_[depth] = Choice::included;
        dfs(depth + 1, cost + prep_[depth].full_cost, deficit - prep_[depth].full_gain);
        state_[depth] = Choice::excluded;
        dfs(depth + 1, cost, deficit);
        state_[depth] = Choice::undecided;
    }

    const std::vector<CoverItem>& items_;
    std::vector<PreparedItem> prep_;
    std::vector<Choice> state_;
    double best_cost_ = std::numeric_limits<double>::infinity();
    std::vector<Choice> best_state_;
    std::size_t best_partial_ = npos;
    double best_partial_z_ = 0.0;
};

}  // namespace

CoverSolution min_cost_cover(const std::vector<CoverItem>& items, double deficit) {
    if (deficit <= 0.0) {
        CoverSolution s;
        s.feasible = true;
        for (const auto& it : items) s.z.push_back(it.z_floor);
        return s;
    }
    std::vector<PreparedItem> prep;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        if (!(it.slope > 0.0) || !(it.tariff.max_rate_change > 0.0) || it.z_floor >= 1.0) continue;
        const double gain = item_gain(it, 1.0);
        if (!(gain > 0.0)) continue;
        prep.push_back({i, gain, it.tariff.cost_weight * (1.0 - it.z_floor)});
    }
    // Best average gain per unit cost first; ties by input order.
    std::stable_sort(prep.begin(), prep.end(), [](const PreparedItem& a, const PreparedItem& b) {
        return a.full_gain * b.full_cost > b.full_gain * a.full_cost;
    });
    return CoverSearch(items, std::move(prep)).run(deficit);
}

McbResult mcb(int target_line, const GridCase& grid, const Tariff& tariff, const AttackVector& z0,
              const DispatchPolicy& policy, const McbOptions& opts) {
    const auto line_pos = static_cast<Eigen::Index>(grid.branch_position(target_line));
    const auto& line = grid.branches()[static_cast<std::size_t>(line_pos)];
    if (!line.alive) throw std::invalid_argument("mcb target line is dead");
    const double threshold = line.capacity * (1.0 + opts.epsilon);

    McbResult out;
    out.z = z0;
    const Eigen::VectorXd d0 = attacked_demand(grid, tariff, z0);
    const double f0 = solve_state(grid, d0, policy).flows[line_pos];
    for (int dir : {1, -1}) {
        if (dir * f0 >= threshold) {
            out.feasible = true;
            out.direction = dir;
            out.achieved_flow = dir * f0;
            return out;
        }
    }

    const Eigen::MatrixXd h = ptdf(grid);
    Eigen::VectorXd linearize_at = d0;
    const std::size_t rounds = grid.generators().size() + 1;
    for (std::size_t round = 0; round < rounds; ++round) {
        const auto sens = sensitivities(grid, linearize_at, policy, h);
        bool have = false;
        CoverSolution best;
        int best_dir = 1;
        for (int dir : {1, -1}) {
            std::vector<CoverItem> items;
            for (std::size_t k = 0; k < sens.loads.size(); ++k) {
                const auto b = sens.loads[k];
                items.push_back({tariff.per_bus[b], z0[static_cast<Eigen::Index>(b)],
                                 dir * sens.entries(line_pos, static_cast<Eigen::Index>(k))});
            }
            auto sol = min_cost_cover(items, threshold - dir * f0);
            if (sol.feasible && (!have || sol.cost < best.cost)) {
                // Map back from load columns to bus positions.
                CoverSolution mapped = sol;
                mapped.z.assign(static_cast<std::size_t>(z0.size()), 0.0);
                for (std::size_t b = 0; b < mapped.z.size(); ++b) mapped.z[b] = z0[static_cast<Eigen::Index>(b)];
                for (std::size_t k = 0; k < sens.loads.size(); ++k) mapped.z[sens.loads[k]] = sol.z[k];
                best = std::move(mapped);
                best_dir = dir;
                have = true;
            }
        }
        if (!have) return out;

        AttackVector z = Eigen::Map<const Eigen::VectorXd>(best.z.data(), static_cast<Eigen::Index>(best.z.size()));
        const Eigen::VectorXd d = attacked_demand(grid, tariff, z);
        const double f = best_dir * solve_state(grid, d, policy).flows[line_pos];
        if (f > line.capacity) {
            out.feasible = true;
            out.z = std::move(z);
            out.cost = best.cost;
            out.achieved_flow = f;
            out.direction = best_dir;
            return out;
        }
        linearize_at = d;  // generators saturated somewhere; refresh the participation
    }
    return out;
}

}  // namespace gridstorm
