#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gridstorm/grid.hpp"
#include "gridstorm/powerflow.hpp"

namespace gridstorm {

/// Price-response parameters of one load.
struct LoadTariff {
    double rate = 1.0;              // r
    double max_rate_change = 0.5;   // rho, the largest cut the attacker can push
    double sensitivity = 0.0;       // k in [0, 1]
    double bill_target = 0.0;       // B
    double cost_weight = 1.0;       // attacker cost per unit of z
};

/// Consumption under the bill cap (1 + k) B >= D (r - z rho), taken at equality.
double demand_response(const LoadTariff& t, double z);

/// Per bus position; entries for non-load buses are ignored.
struct Tariff {
    std::vector<LoadTariff> per_bus;

    /// r = 1, rho = 0.5 r, k = 0, B = D_nom r, w = 1 for every load.
    static Tariff defaults(const GridCase& grid);

    /// Bill targets follow the grid's current nominal demand (B = D_nom r).
    void rebase_bills(const GridCase& grid);
    void validate(const GridCase& grid) const;
};

/// Attack fraction per bus position, each in [0, 1]; zero on non-load buses.
using AttackVector = Eigen::VectorXd;

AttackVector no_attack(const GridCase& grid);
Eigen::VectorXd attacked_demand(const GridCase& grid, const Tariff& tariff, const AttackVector& z);

/// Sum of w_i z_i over loads.
double attack_cost(const GridCase& grid, const AttackVector& z, const Tariff& tariff);

struct McbResult {
    bool feasible = false;
    AttackVector z;            // absolute attack vector after the attack
    double cost = 0.0;         // incremental cost over the starting vector
    double achieved_flow = 0.0;  // true flow magnitude on the target, in the overloaded direction
    int direction = 1;         // +1: overloaded along from->to, -1: reverse
};

struct McbOptions {
    double epsilon = 1e-6;  // realizes the strict overload as f >= u (1 + epsilon)
};

/// Cheapest raise of the current attack vector `z0` that pushes the target
/// line's flow past its capacity. The cost is linear in z while demand is
/// convex in z, so the optimum sets every attacked load to z = 1 except at
/// most one; the subset is found by branch and bound with a linear-relaxation
/// bound. Sensitivities are re-linearized if generators saturate.
McbResult mcb(int target_line, const GridCase& grid, const Tariff& tariff, const AttackVector& z0,
              const DispatchPolicy& policy = {}, const McbOptions& opts = {});

/// Min-cost cover used by mcb, exposed for testing. Each item raises its
/// load from `z_floor` toward 1; its contribution is slope * (D(z) - D(z_floor)).
struct CoverItem {
    LoadTariff tariff;
    double z_floor = 0.0;
    double slope = 0.0;
};

struct CoverSolution {
    bool feasible = false;
    std::vector<double> z;
    double cost = 0.0;
};

CoverSolution min_cost_cover(const std::vector<CoverItem>& items, double deficit);

}  // namespace gridstorm
