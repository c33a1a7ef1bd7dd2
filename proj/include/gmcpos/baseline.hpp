#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gmcpos/coverage.hpp"
#include "gmcpos/errors.hpp"
#include "gmcpos/occupancy_grid.hpp"
#include "gmcpos/planner.hpp"
#include "gmcpos/rng.hpp"

namespace gmcpos {

struct RandomPlacement {
    std::vector<WorldPoint> positions;              // successfully placed, in step order
    std::uint64_t seed = 0;
    std::vector<int> exhausted_steps;               // steps whose anchored set was empty
    std::vector<std::optional<WorldPoint>> by_step; // per-step outcome, for anchor chaining
};

/// Conditional Random baseline: each robot draws uniformly from the free
/// cells inside the Euclidean annulus [alpha, 2r) around its anchor. The
/// anchor is the operator for the first two steps and the position placed
/// two steps earlier afterwards. An empty annulus re-anchors that step to
/// the operator; if still empty the step is skipped and recorded.
inline RandomPlacement conditional_random(const OccupancyGrid& grid, const Scenario& sc) {
    if (!grid.contains(sc.operator_pos))
        throw ValidationError("operator position lies outside the map rectangle");
    if (sc.robot_count < 1)
        throw ValidationError("robot count must be >= 1");

    const double alpha = compute_alpha(grid, sc.robot_count);
    const double outer = 2.0 * sc.coverage_radius;

    // free cells in ascending (row, col) order; erased as they are taken
    std::vector<WorldPoint> open;
    for (int r = 0; r < grid.height_cells; ++r)
        for (int c = 0; c < grid.width_cells; ++c)
            if (grid.state(r, c) == CellState::Free)
                open.push_back(grid.cell_center(r, c));
    if (open.empty())
        throw ValidationError("map has no free cells");

    SplitMix64 rng(sc.seed);
    RandomPlacement result;
    result.seed = sc.seed;
    result.by_step.resize(sc.robot_count);

    auto annulus = [&](const WorldPoint& anchor) {
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < open.size(); ++i) {
            const double d = euclidean(open[i], anchor);
            if (d >= alpha && d < outer) hits.push_back(i);
        }
        return hits;
    };

    for (int step = 0; step < sc.robot_count; ++step) {
        WorldPoint anchor = sc.operator_pos;
        if (step >= 2 && result.by_step[step - 2].has_value())
            anchor = *result.by_step[step - 2];

        std::vector<std::size_t> candidates = annulus(anchor);
        if (candidates.empty()) {
            result.exhausted_steps.push_back(step);
            candidates = annulus(sc.operator_pos); // re-anchor once
            if (candidates.empty()) continue;      // skip this robot
        }
        const std::size_t pick = candidates[rng.uniform(candidates.size())];
        const WorldPoint chosen = open[pick];
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        result.by_step[step] = chosen;
        result.positions.push_back(chosen);
    }
    return result;
}

struct BaselineStats {
    int iterations = 0;
    double mean_acp = 0.0;
    double min_acp = 0.0;
    double max_acp = 0.0;
    double stddev = 0.0; // population standard deviation
    std::vector<double> per_iteration;

    nlohmann::json to_json() const {
        return {{"iterations", iterations},
                {"mean_acp", mean_acp},
                {"min", min_acp},
                {"max", max_acp},
                {"stddev", stddev},
                {"per_iteration", per_iteration}};
    }
};

/// ACP statistics of the Conditional Random baseline over seeded
/// iterations. Iteration k uses seed sc.seed + k, so the seed stream does
/// not depend on how the iterations are distributed over workers.
inline BaselineStats average_acp(const OccupancyGrid& grid, const Scenario& sc, int iterations,
                                 Universe universe = Universe::Known, int workers = 1) {
    if (iterations < 1)
        throw ValidationError("baseline iterations must be >= 1");

    BaselineStats stats;
    stats.iterations = iterations;
    stats.per_iteration.assign(iterations, 0.0);

    auto run_range = [&](int from, int to) {
        for (int k = from; k < to; ++k) {
            Scenario it = sc;
            it.seed = sc.seed + static_cast<std::uint64_t>(k);
            const RandomPlacement placement = conditional_random(grid, it);
            stats.per_iteration[k] =
                acp_report(grid, placement.positions, sc.operator_pos, sc.coverage_radius, universe).acp;
        }
    };

    workers = std::max(1, std::min(workers, iterations));
    if (workers == 1) {
        run_range(0, iterations);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (iterations + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int from = w * chunk;
            const int to = std::min(iterations, from + chunk);
            if (from < to) pool.emplace_back(run_range, from, to);
        }
        for (std::thread& t : pool) t.join();
    }

    double sum = 0.0;
    stats.min_acp = stats.per_iteration[0];
    stats.max_acp = stats.per_iteration[0];
    for (double v : stats.per_iteration) {
        sum += v;
        stats.min_acp = std::min(stats.min_acp, v);
        stats.max_acp = std::max(stats.max_acp, v);
    }
    stats.mean_acp = sum / iterations;
    double var = 0.0;
    for (double v : stats.per_iteration)
        var += (v - stats.mean_acp) * (v - stats.mean_acp);
    stats.stddev = std::sqrt(var / iterations);
    return stats;
}

} // namespace gmcpos
