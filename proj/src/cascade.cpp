#include "gridstorm/cascade.hpp"

#include <algorithm>
#include <cmath>

namespace gridstorm {

CascadeState make_cascade_state(GridCase grid, Eigen::VectorXd demand, DispatchPolicy policy) {
    CascadeState s;
    const auto m = static_cast<Eigen::Index>(grid.branch_count());
    s.grid = std::move(grid);
    s.demand = std::move(demand);
    s.policy = std::move(policy);
    s.moving_avg = Eigen::VectorXd::Zero(m);
    return s;
}

CascadeStep cascade_step(CascadeState& state, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    CascadeStep rec;
    rec.step = ++state.step;

    const auto dispatch = balance(state.grid, state.demand, state.policy);
    rec.balances = dispatch.islands;
    state.last_flow = solve_dc(state.grid, dispatch.injection);

    auto& branches = state.grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l) {
        if (!branches[l].alive) continue;
        const auto i = static_cast<Eigen::Index>(l);
        state.moving_avg[i] = alpha * state.last_flow.flows[i] + (1.0 - alpha) * state.moving_avg[i];
    }
    // All overloaded lines trip together.
    for (std::size_t l = 0; l < branches.size(); ++l) {
        auto& br = branches[l];
        if (br.alive && std::abs(state.moving_avg[static_cast<Eigen::Index>(l)]) > br.capacity) {
            br.alive = false;
            rec.lines_failed.push_back(br.id);
            state.failed_lines.push_back(br.id);
        }
    }
    for (auto b : unsupplied_loads(state.grid)) {
        const int id = state.grid.buses()[b].id;
        if (std::find(state.failed_nodes.begin(), state.failed_nodes.end(), id) == state.failed_nodes.end())
            state.failed_nodes.push_back(id);
    }
    return rec;
}

namespace {

bool steady_overload(const CascadeState& s) {
    const auto& branches = s.grid.branches();
    for (std::size_t l = 0; l < branches.size(); ++l)
        if (branches[l].alive && std::abs(s.last_flow.flows[static_cast<Eigen::Index>(l)]) > branches[l].capacity)
            return true;
    return false;
}

}  // namespace

CascadeOutcome run_cascade(GridCase grid, const Eigen::VectorXd& demand, const DispatchPolicy& policy, double alpha,
                           const std::optional<Eigen::VectorXd>& prior) {
    const std::size_t edges = grid.branch_count();
    auto state = make_cascade_state(std::move(grid), demand, policy);
    if (prior) {
        if (prior->size() != state.moving_avg.size()) throw std::invalid_argument("prior size mismatch");
        state.moving_avg = *prior;
    }
    // Memoryless runs kill at least one line per non-final step; with memory a
    // line may need several steps to heat past its rating.
    const std::size_t limit = alpha >= 1.0 ? edges + 1 : (edges + 1) * 100000;

    CascadeOutcome out;
    while (true) {
        if (static_cast<std::size_t>(state.step) >= limit)
            throw CascadeError("cascade did not settle within " + std::to_string(limit) + " steps");
        auto rec = cascade_step(state, alpha);
        const bool quiet = rec.lines_failed.empty();
        out.steps.push_back(std::move(rec));
        if (quiet && !steady_overload(state)) break;
    }
    out.s1 = std::move(state.failed_lines);
    out.s2 = std::move(state.failed_nodes);
    out.final = std::move(state.grid);
    out.moving_avg = std::move(state.moving_avg);
    out.flows = std::move(state.last_flow);
    return out;
}

}  // namespace gridstorm
