#include <doctest.h>

#include <random>
#include <set>

#include "gridstorm/cascade.hpp"
#include "gridstorm/experiment.hpp"
#include "support.hpp"

using namespace gridstorm;
using doctest::Approx;

TEST_CASE("triangle step by step") {
    auto state = make_cascade_state(testing::triangle(0.9, 1.5, 1.0), nominal_demand(testing::triangle()));

    // |f12| = 1.0 > 0.9, f13 = 1.0 < 1.5, f23 = 0
    auto s1 = cascade_step(state, 1.0);
    CHECK(s1.lines_failed == std::vector<int>{12});
    CHECK(state.failed_nodes.empty());

    // radial 1-3-2: f13 = 2.0 > 1.5, f23 = 1.0 survives at capacity
    auto s2 = cascade_step(state, 1.0);
    CHECK(s2.lines_failed == std::vector<int>{13});
    CHECK(state.failed_nodes == std::vector<int>{2, 3});

    auto s3 = cascade_step(state, 1.0);
    CHECK(s3.lines_failed.empty());
}

TEST_CASE("triangle full cascade") {
    const auto g = testing::triangle(0.9, 1.5, 1.0);
    const auto out = run_cascade(g, nominal_demand(g), {}, 1.0);
    CHECK(out.s1 == std::vector<int>{12, 13});
    CHECK(out.s2 == std::vector<int>{2, 3});
    CHECK(out.steps.size() == 3);
    CHECK(out.final.branch(23).alive);
}

TEST_CASE("moving average delays the first trip") {
    const auto g = testing::triangle(0.9, 1.5, 1.0);
    const auto out = run_cascade(g, nominal_demand(g), {}, 0.5);
    // cold start: 0.5, 0.75, 0.875, 0.9375 on line 12
    std::size_t first = 0;
    while (first < out.steps.size() && out.steps[first].lines_failed.empty()) ++first;
    REQUIRE(first < out.steps.size());
    CHECK(first + 1 == 4);
    CHECK(out.s1 == std::vector<int>{12, 13});
    CHECK(out.s2 == std::vector<int>{2, 3});
}

TEST_CASE("memoryless moving average equals the flow") {
    auto state = make_cascade_state(testing::triangle(), nominal_demand(testing::triangle()));
    cascade_step(state, 1.0);
    CHECK((state.moving_avg - state.last_flow.flows).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("huge capacities never trip") {
    const auto g = testing::triangle(1e12, 1e12, 1e12);
    auto state = make_cascade_state(g, nominal_demand(g));
    const auto step = cascade_step(state, 1.0);
    CHECK(step.lines_failed.empty());
    CHECK(state.grid == g);
    CHECK(state.moving_avg.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("grid without branches is stable at once") {
    GridCase g("bare", {{1, BusKind::generator, 0.0}, {2, BusKind::load, 1.0}, {3, BusKind::load, 2.0}},
               {{1, 0.0, 5.0}}, {});
    const auto out = run_cascade(g, nominal_demand(g), {}, 1.0);
    CHECK(out.s1.empty());
    CHECK(out.s2 == std::vector<int>{2, 3});
    CHECK(out.steps.size() == 1);
}

TEST_CASE("alpha outside (0, 1] is rejected") {
    auto state = make_cascade_state(testing::triangle(), nominal_demand(testing::triangle()));
    CHECK_THROWS(cascade_step(state, 0.0));
    CHECK_THROWS(cascade_step(state, 1.5));
}

TEST_CASE("reverse flows trip on magnitude") {
    // Branch drawn load -> generator so the flow is negative.
    GridCase g("reverse", {{1, BusKind::generator, 0.0}, {2, BusKind::load, 1.0}}, {{1, 0.0, 5.0}},
               {{1, 2, 1, 0.1, 0.5}});
    const auto out = run_cascade(g, nominal_demand(g), {}, 1.0);
    CHECK(out.s1 == std::vector<int>{1});
    CHECK(out.s2 == std::vector<int>{2});
}

TEST_CASE("intact composite at zero reduction is quiet") {
    ExperimentConfig cfg;
    cfg.capacity_reduction = 0.0;
    const auto setup = build_setup(cfg);
    const auto& g = setup.grid.merged;
    const auto out = run_cascade(g, nominal_demand(g), {}, 1.0);
    CHECK(out.s1.empty());
    CHECK(out.s2.empty());
}

TEST_CASE("cascade properties on random stressed grids") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> cap(0.2, 3.0);
    std::uniform_real_distribution<double> alpha(0.05, 1.0);
    for (int t = 0; t < 80; ++t) {
        auto g = testing::random_connected(rng, 4 + static_cast<int>(rng() % 20));
        for (auto& br : g.branches()) br.capacity = cap(rng);
        const double a = t % 2 == 0 ? 1.0 : alpha(rng);
        const auto demand = nominal_demand(g);

        auto state = make_cascade_state(g, demand);
        std::set<int> lines_before, nodes_before;
        while (true) {
            std::vector<bool> was_alive;
            for (const auto& br : state.grid.branches()) was_alive.push_back(br.alive);
            const auto step = cascade_step(state, a);
            // every tripped line had |f~| > u at its failure step
            for (int id : step.lines_failed) {
                const auto pos = g.branch_position(id);
                CHECK(std::abs(state.moving_avg[static_cast<Eigen::Index>(pos)]) > g.branches()[pos].capacity);
            }
            // f~ of lines already down stays frozen
            if (a == 1.0)
                for (std::size_t l = 0; l < was_alive.size(); ++l)
                    if (was_alive[l])
                        CHECK(state.moving_avg[static_cast<Eigen::Index>(l)] ==
                              state.last_flow.flows[static_cast<Eigen::Index>(l)]);
            const std::set<int> lines(state.failed_lines.begin(), state.failed_lines.end());
            const std::set<int> nodes(state.failed_nodes.begin(), state.failed_nodes.end());
            CHECK(std::includes(lines.begin(), lines.end(), lines_before.begin(), lines_before.end()));
            CHECK(std::includes(nodes.begin(), nodes.end(), nodes_before.begin(), nodes_before.end()));
            lines_before = lines;
            nodes_before = nodes;
            for (const auto& br : state.grid.branches()) CHECK(br.alive != lines.contains(br.id));
            const auto cut = unsupplied_loads(state.grid);
            for (int id : nodes) {
                const auto pos = g.bus_position(id);
                CHECK(g.buses()[pos].kind == BusKind::load);
                CHECK(std::find(cut.begin(), cut.end(), pos) != cut.end());
            }
            if (step.lines_failed.empty()) break;
        }

        const auto out = run_cascade(g, demand, {}, a);
        if (a == 1.0) CHECK(out.steps.size() <= g.branch_count() + 1);
        CHECK(out.s1.size() == std::set<int>(out.s1.begin(), out.s1.end()).size());
        for (std::size_t l = 0; l < out.final.branch_count(); ++l) {
            const auto& br = out.final.branches()[l];
            if (!br.alive) continue;
            CHECK(std::abs(out.moving_avg[static_cast<Eigen::Index>(l)]) <= br.capacity);
            CHECK(std::abs(out.flows.flows[static_cast<Eigen::Index>(l)]) <= br.capacity);
        }
    }
}

TEST_CASE("thermal prior lets a warm line trip at once") {
    const auto g = testing::triangle(0.9, 1.5, 1.0);
    Eigen::VectorXd prior = Eigen::VectorXd::Zero(3);
    prior[0] = 1.0;
    const auto warm = run_cascade(g, nominal_demand(g), {}, 0.5, prior);
    REQUIRE_FALSE(warm.steps.empty());
    CHECK(warm.steps.front().lines_failed == std::vector<int>{12});
}
