#include "gridformer/placement.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gridformer/svd.hpp"

namespace gridformer {

namespace {

double total_capacity(const std::map<int, double>& assignment) {
    double sum = 0.0;
    for (const auto& [bus, cap] : assignment)
        sum += cap;
    return sum;
}

// Lexicographic order over the per-candidate level vectors; used for
// deterministic tie-breaking.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

void PlacementProblem::validate() const {
    if (candidates.empty())
        throw DimensionMismatch("placement needs at least one candidate bus");
    for (int bus : candidates)
        if (bus < base.net.n_devices() || bus >= base.net.n_buses())
            throw DimensionMismatch("candidate buses must be interior buses");
    if (sizes.empty())
        throw DimensionMismatch("placement needs at least one capacity level");
    double prev = 0.0;
    for (double s : sizes) {
        if (!(s > prev))
            throw DimensionMismatch("capacity levels must be positive and ascending");
        prev = s;
    }
    if (S_tot < 0.0)
        throw DimensionMismatch("budget must be nonnegative");
    device.validate();
}

double placement_objective(const PlacementProblem& problem,
                           const std::map<int, double>& assignment,
                           const FrequencyGrid& grid) {
    std::vector<int> buses;
    std::vector<double> caps;
    for (const auto& [bus, cap] : assignment) {
        buses.push_back(bus);
        caps.push_back(cap);
    }

    NetworkModel net = problem.base.net.with_device_buses(buses, caps);
    std::vector<StateSpaceModel> models = problem.base.models;
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const int dev_index = problem.base.net.n_devices() + static_cast<int>(i);
        DeviceSpec spec = problem.device;
        spec.capacity = caps[i];
        const LineParams line = thevenin_line(net, dev_index);
        const OperatingPoint op = solve_operating_point(
            problem.p_ref, problem.qv_ref, spec.ref_mode(), line, 1.0);
        models.push_back(build_admittance(spec, op, net.omega0()));
    }

    const ScaledGridOperator netop(net);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::min(worst,
                         sigma_min(closed_loop_admittance(models, netop, grid[i])));
    return worst;
}

PlacementResult place_exhaustive(const PlacementProblem& problem,
                                 const FrequencyGrid& grid) {
    problem.validate();
    const std::size_t n_cand = problem.candidates.size();
    const std::size_t levels = problem.sizes.size() + 1; // level 0 = absent

    double lattice = 1.0;
    for (std::size_t i = 0; i < n_cand; ++i)
        lattice *= static_cast<double>(levels);
    if (lattice > 1e5)
        throw SearchSpaceTooLarge("placement lattice has " + std::to_string(lattice) +
                                  " points (limit 1e5); try the greedy search");

    PlacementResult result;
    result.baseline = placement_objective(problem, {}, grid);
    result.achieved = result.baseline;
    ++result.evaluations;

    std::vector<int> level(n_cand, 0);
    std::vector<int> best_level = level;
    double best_total = 0.0;

    // Odometer enumeration in lexicographic order (level 0 first).
    while (true) {
        std::size_t pos = 0;
        while (pos < n_cand) {
            if (level[pos] + 1 < static_cast<int>(levels)) {
                ++level[pos];
                std::fill(level.begin(), level.begin() + static_cast<long>(pos), 0);
                break;
            }
            ++pos;
        }
        if (pos == n_cand)
            break;

        std::map<int, double> assignment;
        double total = 0.0;
        for (std::size_t i = 0; i < n_cand; ++i) {
            if (level[i] > 0) {
                const double cap = problem.sizes[static_cast<std::size_t>(level[i] - 1)];
                assignment[problem.candidates[i]] = cap;
                total += cap;
            }
        }
        if (total > problem.S_tot + 1e-12)
            continue;

        const double value = placement_objective(problem, assignment, grid);
        ++result.evaluations;
        const bool better =
            value > result.achieved ||
            (value == result.achieved &&
             (total < best_total ||
              (total == best_total && lex_less(level, best_level))));
        if (better) {
            result.achieved = value;
            result.assignment = assignment;
            best_level = level;
            best_total = total;
        }
    }
    return result;
}

PlacementResult place_greedy(const PlacementProblem& problem, const FrequencyGrid& grid) {
    problem.validate();
    const std::size_t n_cand = problem.candidates.size();

    PlacementResult result;
    result.baseline = placement_objective(problem, {}, grid);
    result.achieved = result.baseline;
    ++result.evaluations;

    std::vector<int> level(n_cand, 0);
    double total = 0.0;
    while (true) {
        double best_value = result.achieved + 1e-6;
        std::size_t best_i = n_cand;
        std::map<int, double> best_assignment;
        for (std::size_t i = 0; i < n_cand; ++i) {
            if (level[i] + 1 > static_cast<int>(problem.sizes.size()))
                continue;
            const double old_cap =
                level[i] > 0 ? problem.sizes[static_cast<std::size_t>(level[i] - 1)] : 0.0;
            const double new_cap = problem.sizes[static_cast<std::size_t>(level[i])];
            if (total - old_cap + new_cap > problem.S_tot + 1e-12)
                continue;

            std::map<int, double> assignment;
            for (std::size_t j = 0; j < n_cand; ++j) {
                const int lv = static_cast<int>(j) == static_cast<int>(i)
                                   ? level[j] + 1
                                   : level[j];
                if (lv > 0)
                    assignment[problem.candidates[j]] =
                        problem.sizes[static_cast<std::size_t>(lv - 1)];
            }
            const double value = placement_objective(problem, assignment, grid);
            ++result.evaluations;
            if (value > best_value) {
                best_value = value;
                best_i = i;
                best_assignment = assignment;
            }
        }
        if (best_i == n_cand)
            break;
        const double old_cap = level[best_i] > 0
                                   ? problem.sizes[static_cast<std::size_t>(level[best_i] - 1)]
                                   : 0.0;
        ++level[best_i];
        total += problem.sizes[static_cast<std::size_t>(level[best_i] - 1)] - old_cap;
        result.achieved = best_value;
        result.assignment = best_assignment;
    }
    return result;
}

std::string placement_result_json(const PlacementResult& result) {
    nlohmann::json j;
    j["assignment"] = nlohmann::json::object();
    for (const auto& [bus, cap] : result.assignment)
        j["assignment"][std::to_string(bus)] = cap;
    j["achieved"] = result.achieved;
    j["baseline"] = result.baseline;
    j["total_capacity"] = total_capacity(result.assignment);
    j["evaluations"] = result.evaluations;
    return j.dump(2);
}

} // namespace gridformer
