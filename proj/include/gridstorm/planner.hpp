#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridstorm/cascade.hpp"
#include "gridstorm/grid.hpp"
#include "gridstorm/powerflow.hpp"
#include "gridstorm/pricing.hpp"

namespace gridstorm {

class BudgetLedger {
public:
    struct Entry {
        std::string action;
        double cost = 0.0;
    };

    explicit BudgetLedger(double total = 0.0) : total_(total) {}

    double total() const noexcept { return total_; }
    double spent() const noexcept { return spent_; }
    double remaining() const noexcept { return total_ - spent_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    bool can_afford(double cost) const noexcept { return spent_ + cost <= total_ + kSlack; }
    /// Throws std::logic_error if the charge would overdraw the budget.
    void charge(std::string action, double cost);

private:
    static constexpr double kSlack = 1e-12;
    double total_;
    double spent_ = 0.0;
    std::vector<Entry> entries_;
};

/// Everything an attack plan needs about the target: the composed grid with
/// capacities assigned, the load tariffs and the price of cutting each
/// generator's rate (per generator index).
struct AttackSetup {
    ComposedGrid grid;
    Tariff tariff;
    std::vector<double> generator_attack_cost;
    double alpha = 1.0;

    /// Cost of z = 1 on every load plus every generator attack.
    double max_attack_cost() const;
};

AttackSetup make_attack_setup(ComposedGrid grid, double alpha = 1.0, double generator_attack_cost = 1.0);

struct PlanAction {
    std::string stage;  // "im", "bm", "bl", "random"
    int target = 0;     // line id (im), generator bus id (bm), microgrid id (bl), load bus id (random)
    int microgrid = 0;  // microgrid the action works on, 0 for the main grid
    double cost = 0.0;
    std::vector<std::pair<int, double>> dz;  // load bus id, raise in z
    std::vector<int> lines_failed;
    std::vector<int> nodes_failed;
    std::vector<int> microgrids_islanded;
};

/// Live state of a grid under attack. Attacks touch the physics only through
/// the attack vector and dispatch policy, followed by a cascade.
struct AttackWorld {
    GridCase grid;
    AttackVector z;
    DispatchPolicy policy;
    Eigen::VectorXd thermal;  // moving-average flow carried between cascades
    std::vector<int> failed_lines;
    std::vector<int> failed_nodes;
    std::vector<int> islanded;  // microgrid ids, in islanding order
    std::vector<PlanAction> trace;
};

/// Settles the unattacked grid (one cascade from cold lines at base flow).
AttackWorld start_world(const AttackSetup& setup);

/// Applies a new attack vector / policy, runs the cascade, logs the action.
void apply_attack(AttackWorld& world, const AttackSetup& setup, PlanAction action, const AttackVector& z,
                  const DispatchPolicy& policy);

/// Microgrid ids whose load buses share no island with a regular (main grid) generator.
std::vector<int> islanded_microgrids(const ComposedGrid& composed, const GridCase& topology);

inline constexpr double kUnboundedPotential = std::numeric_limits<double>::infinity();

struct LinePotential {
    int line = 0;
    int microgrids = 0;  // not-yet-islanded microgrids cut off if the line dies
    McbResult mcb;
    double potential = 0.0;
};

LinePotential islanding_potential(int line, const AttackWorld& world, const AttackSetup& setup);

/// Candidates in attack order: decreasing potential, ties by ascending line id.
std::vector<LinePotential> rank_lines(const AttackWorld& world, const AttackSetup& setup);

struct ImResult {
    std::vector<int> failed_lines;
    std::vector<int> islanded;
};

ImResult im(AttackWorld& world, const AttackSetup& setup, BudgetLedger& ledger);

struct BlOptions {
    int levels = 21;              // z grid {0, 1/(levels-1), ..., 1}
    std::size_t exhaustive_max_loads = 6;
    int restarts = 3;             // greedy fallback
    std::uint64_t seed = 0;
};

struct BlChoice {
    AttackVector z;
    double cost = 0.0;
    int overloads = 0;
    std::vector<int> lines;  // overloaded line ids at the choice
};

/// Search part of BL over the islands holding `scope_loads`, without applying.
BlChoice bl_search(const AttackWorld& world, const AttackSetup& setup, const std::vector<int>& scope_loads,
                   double budget, const BlOptions& opts = {});

/// BL: picks and applies the attack vector maximizing overloaded lines over the
/// microgrid's live loads, or over every live load when `microgrid` is 0.
std::vector<int> bl(AttackWorld& world, const AttackSetup& setup, int microgrid, BudgetLedger& ledger,
                    const BlOptions& opts = {});

/// BM: generator-price attacks in ascending p_max, each followed by BL.
/// Returns the microgrid's failed load buses.
std::vector<int> bm(AttackWorld& world, const AttackSetup& setup, int microgrid, BudgetLedger& ledger,
                    const BlOptions& opts = {});

struct PlanResult {
    std::vector<int> s1;  // failed lines
    std::vector<int> s2;  // islanded microgrid ids
    std::vector<int> s3;  // failed load buses inside microgrids
    int total_node_failures = 0;
    BudgetLedger ledger;
    std::vector<PlanAction> trace;
};

/// IM then BM per newly islanded microgrid, repeated; leftover budget goes to
/// grid-wide BL while that still fails lines.
PlanResult pma(const AttackSetup& setup, double budget, const BlOptions& opts = {});

/// Blind attacker: random load, random z raise in steps of 0.1.
PlanResult random_baseline(const AttackSetup& setup, double budget, std::uint64_t seed);

struct CriticalNode {
    int bus = 0;
    std::string role;  // "islanding-critical" or "internal-critical"
    double weight = 0.0;  // total z * w spent on the bus in that role
};

std::vector<CriticalNode> critical_nodes(const std::vector<PlanAction>& trace, const AttackSetup& setup);
std::vector<CriticalNode> critical_nodes(const AttackSetup& setup, double budget);

}  // namespace gridstorm
