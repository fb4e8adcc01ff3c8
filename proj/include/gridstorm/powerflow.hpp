#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gridstorm/grid.hpp"

namespace gridstorm {

/// Generator indices (into GridCase::generators()) whose price was cut, in the
/// order the cuts happened. These are loaded to p_max before anyone else.
struct DispatchPolicy {
    std::vector<std::size_t> priority;
};

struct IslandDispatch {
    std::vector<double> generation;  // per generator passed in
    std::vector<double> served;      // per demand passed in
    bool has_generator = false;
    bool saturated = false;     // capacity short of demand, loads scaled down
    bool pmin_relaxed = false;  // some running unit sits below its p_min
};

/// Supply/demand balance inside one island. `participating` marks generators
/// allowed to run; `priority` lists positions into `p_max` filled first.
IslandDispatch balance_island(std::span<const double> p_max, std::span<const double> p_min,
                              std::span<const double> demands,
                              std::span<const std::size_t> priority = {});

struct IslandBalance {
    std::vector<std::size_t> buses;  // bus positions
    double requested = 0.0;
    double generation = 0.0;
    double served = 0.0;
    bool has_generator = false;
    bool saturated = false;
    bool pmin_relaxed = false;
};

struct Dispatch {
    Eigen::VectorXd generation;  // per generator
    Eigen::VectorXd served;      // per bus position
    Eigen::VectorXd injection;   // per bus position, +P - D
    std::vector<std::size_t> label;  // island label per bus position
    std::vector<IslandBalance> islands;
};

/// Balances every island of `grid`. `demand` holds requested demand per bus position.
Dispatch balance(const GridCase& grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy = {});

/// Bus positions whose demand cannot be served because their island has no
/// generator with positive p_max.
std::vector<std::size_t> unsupplied_loads(const GridCase& grid);

struct FlowSolution {
    Eigen::VectorXd flows;      // per branch position, 0 on dead branches
    Eigen::VectorXd angles;     // per bus position
    Eigen::VectorXd injection;  // per bus position
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linearized DC power flow for a balanced injection. The lowest bus id of
/// each island is its angle reference.
FlowSolution solve_dc(const GridCase& grid, const Eigen::VectorXd& injection);

/// Balance then solve.
FlowSolution solve_state(const GridCase& grid, const Eigen::VectorXd& demand,
                         const DispatchPolicy& policy = {});

/// Injection-to-flow map for the current topology: flows = ptdf * injection
/// for any injection balanced per island.
Eigen::MatrixXd ptdf(const GridCase& grid);

/// d(flow on branch) / d(requested demand at load), rows by branch position,
/// columns following `loads` (bus positions). Added demand is covered by the
/// island's generators under the same rule as balance().
struct SensitivityMatrix {
    std::vector<std::size_t> loads;
    Eigen::MatrixXd entries;

    double at(std::size_t branch_pos, std::size_t load_bus_pos) const;
};

SensitivityMatrix sensitivities(const GridCase& grid, const Eigen::VectorXd& demand,
                                const DispatchPolicy& policy = {});
SensitivityMatrix sensitivities(const GridCase& grid, const Eigen::VectorXd& demand,
                                const DispatchPolicy& policy, const Eigen::MatrixXd& ptdf_matrix);

/// Per-bus Kirchhoff residual max |out - in - injection|.
double kirchhoff_residual(const GridCase& grid, const FlowSolution& sol);
/// max over alive branches |theta_from - theta_to - x f|.
double angle_residual(const GridCase& grid, const FlowSolution& sol);

Eigen::VectorXd nominal_demand(const GridCase& grid);

}  // namespace gridstorm
