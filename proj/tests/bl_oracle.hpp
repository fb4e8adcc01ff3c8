#pragma once

#include <cmath>
#include <vector>

#include "gridstorm/planner.hpp"

namespace gridstorm::testing {

// World with microgrid `id` cut off by removing its tie line directly, then settled.
inline AttackWorld islanded_world(const AttackSetup& setup, int id) {
    auto w = start_world(setup);
    for (const auto& mg : setup.grid.microgrids)
        if (mg.microgrid_id == id)
            for (int t : mg.tie_lines) w.grid.kill_branch(t);
    PlanAction settle;
    settle.stage = "setup";
    apply_attack(w, setup, settle, w.z, w.policy);
    return w;
}

// Exhaustive search over the 21-level grid, every candidate checked by a full
// power-flow solve of the whole grid.
inline int exhaustive_overloads(const AttackWorld& w, const AttackSetup& setup, const std::vector<int>& loads,
                                double budget, int levels = 21) {
    std::vector<std::size_t> pos;
    for (int id : loads) pos.push_back(w.grid.bus_position(id));
    int best = 0;
    AttackVector z = w.z;
    auto count = [&] {
        const auto flows = solve_state(w.grid, attacked_demand(w.grid, setup.tariff, z), w.policy).flows;
        int n = 0;
        for (std::size_t l = 0; l < w.grid.branch_count(); ++l) {
            const auto& br = w.grid.branches()[l];
            if (br.alive && std::abs(flows[static_cast<Eigen::Index>(l)]) > br.capacity) ++n;
        }
        return n;
    };
    auto rec = [&](auto&& self, std::size_t i, double cost) -> void {
        if (i == pos.size()) {
            best = std::max(best, count());
            return;
        }
        const auto p = static_cast<Eigen::Index>(pos[i]);
        const double z0 = w.z[p];
        const double weight = setup.tariff.per_bus[pos[i]].cost_weight;
        for (int l = -1; l < levels; ++l) {
            const double v = l < 0 ? z0 : static_cast<double>(l) / (levels - 1);
            if (l >= 0 && v <= z0 + 1e-12) continue;
            const double add = weight * (v - z0);
            if (cost + add > budget + 1e-12) break;
            z[p] = v;
            self(self, i + 1, cost + add);
        }
        z[p] = z0;
    };
    rec(rec, 0, 0.0);
    return best;
}

}  // namespace gridstorm::testing
