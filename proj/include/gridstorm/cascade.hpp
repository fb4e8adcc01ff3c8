#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gridstorm/grid.hpp"
#include "gridstorm/powerflow.hpp"

namespace gridstorm {

struct CascadeState {
    GridCase grid;
    Eigen::VectorXd demand;  // requested demand per bus position
    DispatchPolicy policy;
    Eigen::VectorXd moving_avg;  // per branch position
    int step = 0;
    std::vector<int> failed_lines;  // branch ids, in failure order
    std::vector<int> failed_nodes;  // load bus ids, in failure order
    FlowSolution last_flow;
};

/// Fresh state with cold lines (zero thermal memory).
CascadeState make_cascade_state(GridCase grid, Eigen::VectorXd demand, DispatchPolicy policy = {});

struct CascadeStep {
    int step = 0;
    std::vector<int> lines_failed;
    std::vector<IslandBalance> balances;
};

/// One pass: balance, solve, update the moving average, trip every line
/// whose |moving average| exceeds its capacity, record unsupplied loads.
CascadeStep cascade_step(CascadeState& state, double alpha);

struct CascadeOutcome {
    std::vector<int> s1;  // failed branch ids
    std::vector<int> s2;  // failed load bus ids
    std::vector<CascadeStep> steps;
    GridCase final;
    Eigen::VectorXd moving_avg;
    FlowSolution flows;  // last solved state
};

class CascadeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Steps until no line trips and no alive line's steady flow exceeds its
/// capacity. `prior` is the thermal memory carried in from the previous
/// steady state (per branch position); without it lines start cold.
CascadeOutcome run_cascade(GridCase grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy,
                           double alpha, const std::optional<Eigen::VectorXd>& prior = std::nullopt);

}  // namespace gridstorm
