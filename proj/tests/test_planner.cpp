#include <doctest.h>

#include <algorithm>
#include <set>

#include "bl_oracle.hpp"
#include "gridstorm/experiment.hpp"
#include "gridstorm/planner.hpp"

using namespace gridstorm;
using doctest::Approx;

namespace {

const AttackSetup& default_setup() {
    static const AttackSetup s = build_setup(ExperimentConfig{});
    return s;
}

double default_budget() { return attack_budget(default_setup(), 0.2); }

std::vector<int> microgrid_loads(const AttackSetup& s, int id) {
    std::vector<int> out;
    for (const auto& mg : s.grid.microgrids)
        if (mg.microgrid_id == id)
            for (int b : mg.member_buses)
                if (s.grid.merged.buses()[s.grid.merged.bus_position(b)].kind == BusKind::load) out.push_back(b);
    return out;
}

void check_plan_invariants(const PlanResult& r, const AttackSetup& s, double budget) {
    CHECK(r.ledger.spent() <= budget + 1e-9);
    double sum = 0.0;
    for (const auto& e : r.ledger.entries()) sum += e.cost;
    CHECK(sum == Approx(r.ledger.spent()));

    std::set<int> declared;
    for (const auto& mg : s.grid.microgrids) declared.insert(mg.microgrid_id);
    for (int m : r.s2) CHECK(declared.contains(m));
    for (int b : r.s3) {
        const auto* mg = s.grid.microgrid_of_bus(b);
        REQUIRE(mg != nullptr);
        CHECK(std::find(r.s2.begin(), r.s2.end(), mg->microgrid_id) != r.s2.end());
        CHECK(s.grid.merged.buses()[s.grid.merged.bus_position(b)].kind == BusKind::load);
    }
    CHECK(r.total_node_failures >= static_cast<int>(r.s3.size()));

    // bm never precedes the im action that islanded its microgrid
    std::set<int> islanded;
    for (const auto& a : r.trace) {
        if (a.stage == "bm") CHECK(islanded.contains(a.microgrid));
        for (int m : a.microgrids_islanded) islanded.insert(m);
    }
}

}  // namespace

TEST_CASE("budget ledger") {
    BudgetLedger ledger(2.0);
    CHECK(ledger.can_afford(2.0));
    ledger.charge("a", 1.5);
    CHECK(ledger.remaining() == Approx(0.5));
    CHECK_FALSE(ledger.can_afford(0.6));
    CHECK_THROWS_AS(ledger.charge("b", 0.6), std::logic_error);
    CHECK_THROWS_AS(ledger.charge("c", -0.1), std::logic_error);
    ledger.charge("d", 0.5);
    CHECK(ledger.spent() == Approx(2.0));
    CHECK(ledger.entries().size() == 2);
}

TEST_CASE("budget normalization") {
    const auto& s = default_setup();
    // 14 loads plus 11 generators at unit cost
    CHECK(s.max_attack_cost() == Approx(25.0));
    CHECK(attack_budget(s, 0.2) == Approx(5.0));
    CHECK(attack_budget(s, 0.4) == Approx(2.0 * attack_budget(s, 0.2)));
}

TEST_CASE("zero budget does nothing") {
    const auto& s = default_setup();
    const auto p = pma(s, 0.0);
    CHECK(p.s1.empty());
    CHECK(p.s2.empty());
    CHECK(p.s3.empty());
    CHECK(p.total_node_failures == 0);
    CHECK(p.trace.empty());
    const auto r = random_baseline(s, 0.0, 1);
    CHECK(r.total_node_failures == 0);
    CHECK(r.s2.empty());
    CHECK(r.ledger.spent() == 0.0);
    CHECK(critical_nodes(s, 0.0).empty());

    auto w = start_world(s);
    BudgetLedger ledger(0.0);
    const auto res = im(w, s, ledger);
    CHECK(res.islanded.empty());
    CHECK(res.failed_lines.empty());
}

TEST_CASE("islanding potential") {
    const auto& s = default_setup();
    const auto w = start_world(s);

    SUBCASE("interior main-grid line isolates nothing") {
        const auto p = islanding_potential(1, w, s);
        CHECK(p.microgrids == 0);
        CHECK(p.potential == 0.0);
    }
    SUBCASE("tie line of MG1 scores one over its break cost") {
        const auto p = islanding_potential(199, w, s);
        // connectivity oracle: remove the line and look
        auto cut = w.grid;
        cut.kill_branch(199);
        CHECK(islanded_microgrids(s.grid, cut) == std::vector<int>{1});
        REQUIRE(p.mcb.feasible);
        CHECK(p.microgrids == 1);
        CHECK(p.potential == Approx(1.0 / p.mcb.cost));
        // grid-search oracle over the microgrid's loads, step 0.05
        double best = INFINITY;
        const auto& g = w.grid;
        const auto line = static_cast<Eigen::Index>(g.branch_position(199));
        const double u = g.branch(199).capacity;
        const auto a = static_cast<Eigen::Index>(g.bus_position(105));
        const auto b = static_cast<Eigen::Index>(g.bus_position(107));
        const auto c = static_cast<Eigen::Index>(g.bus_position(109));
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j)
                for (int k = 0; k <= 20; ++k) {
                    AttackVector z = w.z;
                    z[a] = i / 20.0;
                    z[b] = j / 20.0;
                    z[c] = k / 20.0;
                    if (std::abs(solve_state(g, attacked_demand(g, s.tariff, z)).flows[line]) > u)
                        best = std::min(best, attack_cost(g, z, s.tariff));
                }
        CHECK(p.mcb.cost <= best + 1e-9);
        CHECK(p.mcb.cost >= best - 0.1);
    }
    SUBCASE("infeasible line scores zero") {
        auto flat = s;
        for (auto& t : flat.tariff.per_bus) t.max_rate_change = 0.0;
        const auto p = islanding_potential(199, start_world(flat), flat);
        CHECK(p.microgrids == 1);
        CHECK_FALSE(p.mcb.feasible);
        CHECK(p.potential == 0.0);
    }
    SUBCASE("ranking is by decreasing potential then line id") {
        const auto ranked = rank_lines(w, s);
        REQUIRE(ranked.size() >= 2);
        for (std::size_t i = 1; i < ranked.size(); ++i) {
            CHECK(ranked[i - 1].potential >= ranked[i].potential);
            if (ranked[i - 1].potential == ranked[i].potential) CHECK(ranked[i - 1].line < ranked[i].line);
        }
        for (const auto& p : ranked) CHECK(p.potential > 0.0);
    }
}

TEST_CASE("im islands both microgrids at the defaults") {
    const auto& s = default_setup();
    auto w = start_world(s);
    BudgetLedger ledger(default_budget());
    const auto res = im(w, s, ledger);
    std::vector<int> got = res.islanded;
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<int>{1, 2});
    CHECK(ledger.spent() <= default_budget());
    for (const auto& a : w.trace) CHECK(a.stage == "im");
}

TEST_CASE("im without microgrids spends nothing") {
    AttackSetup s = make_attack_setup(compose(fixture("ieee14"), {}));
    auto w = start_world(s);
    BudgetLedger ledger(5.0);
    const auto res = im(w, s, ledger);
    CHECK(res.islanded.empty());
    CHECK(ledger.spent() == 0.0);
}

TEST_CASE("bl examples on an islanded microgrid") {
    const auto& s = default_setup();
    const auto w = testing::islanded_world(s, 1);
    REQUIRE(w.islanded == std::vector<int>{1});
    const auto loads = microgrid_loads(s, 1);

    SUBCASE("zero budget leaves z alone") {
        const auto c = bl_search(w, s, loads, 0.0);
        CHECK(c.cost == 0.0);
        CHECK(c.overloads == 0);
        CHECK((c.z - w.z).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("huge capacities cannot be broken") {
        auto big = s;
        for (auto& br : big.grid.merged.branches()) br.capacity = 1e12;
        const auto wb = testing::islanded_world(big, 1);
        CHECK(bl_search(wb, big, loads, 100.0).overloads == 0);
    }
    SUBCASE("matches exhaustive enumeration with true solves") {
        for (double budget : {0.4, 1.0, 3.0}) {
            CAPTURE(budget);
            const auto c = bl_search(w, s, loads, budget);
            CHECK(c.overloads == testing::exhaustive_overloads(w, s, loads, budget));
            CHECK(c.cost <= budget + 1e-12);
        }
    }
}

TEST_CASE("bm examples") {
    const auto& s = default_setup();
    SUBCASE("budget below a generator attack does nothing") {
        auto w = testing::islanded_world(s, 2);
        BudgetLedger ledger(0.5);
        const auto before = w.trace.size();
        CHECK(bm(w, s, 2, ledger).empty());
        CHECK(ledger.spent() == 0.0);
        CHECK(w.trace.size() == before);
    }
    SUBCASE("first target is the smallest unit") {
        auto w = testing::islanded_world(s, 2);
        BudgetLedger ledger(1.0);
        bm(w, s, 2, ledger);
        auto first = std::find_if(w.trace.begin(), w.trace.end(), [](const PlanAction& a) { return a.stage == "bm"; });
        REQUIRE(first != w.trace.end());
        double smallest = INFINITY;
        int bus = 0;
        for (const auto& g : s.grid.merged.generators())
            if (g.bus > 200 && g.p_max < smallest) {
                smallest = g.p_max;
                bus = g.bus;
            }
        CHECK(first->target == bus);
    }
    SUBCASE("fully failed microgrid costs nothing") {
        auto w = testing::islanded_world(s, 2);
        for (const auto& br : s.grid.microgrids[1].internal_case.branches()) w.grid.kill_branch(br.id + 200);
        PlanAction settle;
        settle.stage = "setup";
        apply_attack(w, s, settle, w.z, w.policy);
        BudgetLedger ledger(10.0);
        const auto failed = bm(w, s, 2, ledger);
        CHECK(failed.size() == 3);
        CHECK(ledger.spent() == 0.0);
    }
}

TEST_CASE("pma at the defaults") {
    const auto& s = default_setup();
    const auto p = pma(s, default_budget());
    check_plan_invariants(p, s, default_budget());
    CHECK(p.s2.size() >= 1);
    CHECK(p.s3.size() >= 1);
    // golden values from the first verified run
    CHECK(p.s2.size() == 2);
    CHECK(p.s3.size() == 3);
    CHECK(p.total_node_failures == 3);
    REQUIRE_FALSE(p.trace.empty());
    CHECK(p.trace.front().stage == "im");
}

TEST_CASE("pma with an unbounded budget islands every microgrid") {
    const auto& s = default_setup();
    // both tie lines are breakable at 60% reduction
    const auto w = start_world(s);
    for (int tie : {199, 299}) CHECK(mcb(tie, w.grid, s.tariff, w.z).feasible);
    const auto p = pma(s, 1e9);
    CHECK(p.s2.size() == 2);
    check_plan_invariants(p, s, 1e9);
}

TEST_CASE("plan invariants across budgets and stress") {
    for (double reduction : {0.3, 0.6, 0.78})
        for (double resource : {0.05, 0.2, 0.5}) {
            ExperimentConfig cfg;
            cfg.capacity_reduction = reduction;
            const auto s = build_setup(cfg);
            const double a = attack_budget(s, resource);
            CAPTURE(reduction);
            CAPTURE(resource);
            check_plan_invariants(pma(s, a), s, a);
            for (std::uint64_t seed : {1u, 2u, 3u}) check_plan_invariants(random_baseline(s, a, seed), s, a);
        }
}

TEST_CASE("random baseline is determined by its seed") {
    const auto& s = default_setup();
    const auto a = random_baseline(s, default_budget(), 99);
    const auto b = random_baseline(s, default_budget(), 99);
    CHECK(a.s1 == b.s1);
    CHECK(a.s2 == b.s2);
    CHECK(a.s3 == b.s3);
    CHECK(a.ledger.spent() == b.ledger.spent());
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].target == b.trace[i].target);
        CHECK(a.trace[i].dz == b.trace[i].dz);
    }
    for (const auto& act : a.trace) {
        CHECK(act.stage == "random");
        REQUIRE(act.dz.size() == 1);
        const double steps = act.dz.front().second * 10.0;
        CHECK(steps == Approx(std::round(steps)));
    }
}

TEST_CASE("critical nodes") {
    const auto& s = default_setup();
    const auto p = pma(s, default_budget());
    const auto nodes = critical_nodes(p.trace, s);
    REQUIRE_FALSE(nodes.empty());
    for (std::size_t i = 1; i < nodes.size(); ++i) CHECK(nodes[i - 1].weight >= nodes[i].weight);

    // islanding-critical set equals the loads raised by im actions
    std::set<int> from_trace, reported;
    for (const auto& a : p.trace)
        if (a.stage == "im")
            for (const auto& [bus, dz] : a.dz) from_trace.insert(bus);
    for (const auto& n : nodes)
        if (n.role == "islanding-critical") reported.insert(n.bus);
    CHECK(reported == from_trace);
    // the loads feeding both tie lines are inside the microgrids
    CHECK(std::any_of(reported.begin(), reported.end(), [](int b) { return b > 100 && b < 200; }));
    CHECK(std::any_of(reported.begin(), reported.end(), [](int b) { return b > 200; }));

    auto flat = s;
    for (auto& t : flat.tariff.per_bus) t.max_rate_change = 0.0;
    for (auto& c : flat.generator_attack_cost) c = 1e6;
    CHECK(critical_nodes(flat, 100.0).empty());
}
