#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gridstorm/grid.hpp"
#include "gridstorm/powerflow.hpp"

namespace gridstorm::testing {

// gen at bus 1, loads of 1.0 at buses 2 and 3, every reactance 0.1.
inline GridCase triangle(double u12 = 10.0, double u13 = 10.0, double u23 = 10.0, double p_max = 2.0) {
    return GridCase("triangle",
                    {{1, BusKind::generator, 0.0}, {2, BusKind::load, 1.0}, {3, BusKind::load, 1.0}},
                    {{1, 0.0, p_max}},
                    {{12, 1, 2, 0.1, u12}, {13, 1, 3, 0.1, u13}, {23, 2, 3, 0.1, u23}});
}

inline GridCase two_bus(double capacity = 10.0, double demand = 1.0, double p_max = 5.0) {
    return GridCase("two-bus", {{1, BusKind::generator, 0.0}, {2, BusKind::load, demand}}, {{1, 0.0, p_max}},
                    {{1, 1, 2, 0.1, capacity}});
}

// Random connected grid: a random spanning tree plus a few chords. One to three
// generators with ample p_max, the rest loads or junctions.
inline GridCase random_connected(std::mt19937_64& rng, int n, double capacity = 1e6) {
    std::uniform_real_distribution<double> x(0.02, 0.5);
    std::uniform_real_distribution<double> d(0.1, 3.0);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);

    const int n_gen = std::min(n - 1, 1 + static_cast<int>(rng() % 3));
    std::vector<Bus> buses;
    std::vector<Generator> gens;
    for (int i = 0; i < n; ++i) {
        const int id = order[static_cast<std::size_t>(i)];
        if (i < n_gen) {
            buses.push_back({id, BusKind::generator, 0.0});
            gens.push_back({id, 0.0, 1000.0});
        } else if (rng() % 5 == 0) {
            buses.push_back({id, BusKind::junction, 0.0});
        } else {
            buses.push_back({id, BusKind::load, d(rng)});
        }
    }
    std::sort(buses.begin(), buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });

    std::vector<Branch> branches;
    int next = 1;
    for (int i = 1; i < n; ++i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
        branches.push_back({next++, order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(i)], x(rng),
                            capacity});
    }
    const int chords = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    for (int c = 0; c < chords; ++c) {
        const int a = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        const int b = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        if (a != b) branches.push_back({next++, a, b, x(rng), capacity});
    }
    return GridCase("random", std::move(buses), std::move(gens), std::move(branches));
}

// Breadth-first component label per bus position, independent of the union-find in the library.
inline std::vector<int> bfs_components(const GridCase& g) {
    const auto n = g.bus_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& br : g.branches())
        if (br.alive) {
            adj[g.bus_position(br.from)].push_back(g.bus_position(br.to));
            adj[g.bus_position(br.to)].push_back(g.bus_position(br.from));
        }
    std::vector<int> comp(n, -1);
    int c = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::queue<std::size_t> q;
        q.push(s);
        comp[s] = c;
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (auto v : adj[u])
                if (comp[v] < 0) {
                    comp[v] = c;
                    q.push(v);
                }
        }
        ++c;
    }
    return comp;
}

// Dense oracle for DC flow: pseudo-inverse of the full Laplacian, then each
// component shifted so its lowest-id bus sits at angle 0.
struct DenseFlow {
    Eigen::VectorXd flows;
    Eigen::VectorXd angles;
};

inline DenseFlow dense_dc(const GridCase& g, const Eigen::VectorXd& injection) {
    const auto n = static_cast<Eigen::Index>(g.bus_count());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const auto& br : g.branches()) {
        if (!br.alive) continue;
        const auto i = static_cast<Eigen::Index>(g.bus_position(br.from));
        const auto j = static_cast<Eigen::Index>(g.bus_position(br.to));
        const double b = 1.0 / br.reactance;
        lap(i, i) += b;
        lap(j, j) += b;
        lap(i, j) -= b;
        lap(j, i) -= b;
    }
    Eigen::VectorXd theta = lap.completeOrthogonalDecomposition().solve(injection);
    const auto comp = bfs_components(g);
    const int nc = *std::max_element(comp.begin(), comp.end()) + 1;
    for (int c = 0; c < nc; ++c) {
        std::size_t ref = g.bus_count();
        for (std::size_t b = 0; b < g.bus_count(); ++b)
            if (comp[b] == c && (ref == g.bus_count() || g.buses()[b].id < g.buses()[ref].id)) ref = b;
        const double shift = theta[static_cast<Eigen::Index>(ref)];
        for (std::size_t b = 0; b < g.bus_count(); ++b)
            if (comp[b] == c) theta[static_cast<Eigen::Index>(b)] -= shift;
    }
    DenseFlow out;
    out.angles = theta;
    out.flows = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.branch_count()));
    for (std::size_t l = 0; l < g.branch_count(); ++l) {
        const auto& br = g.branches()[l];
        if (!br.alive) continue;
        out.flows[static_cast<Eigen::Index>(l)] =
            (theta[static_cast<Eigen::Index>(g.bus_position(br.from))] -
             theta[static_cast<Eigen::Index>(g.bus_position(br.to))]) /
            br.reactance;
    }
    return out;
}

}  // namespace gridstorm::testing
