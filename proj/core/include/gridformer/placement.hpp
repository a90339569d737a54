#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridformer/strength.hpp"
#include "gridformer/system.hpp"

namespace gridformer {

/// Discrete search for grid-forming capacity placement maximizing the
/// worst-frequency system strength under a total-capacity budget.
struct PlacementProblem {
    SystemModel base;
    std::vector<int> candidates;     ///< interior bus indices
    DeviceSpec device;               ///< template; its capacity field is unused
    std::vector<double> sizes;       ///< allowed capacity levels, ascending
    double S_tot = 1.0;              ///< budget
    double p_ref = 0.5;              ///< dispatch of placed units
    double qv_ref = 1.0;

    void validate() const;
};

struct PlacementResult {
    std::map<int, double> assignment; ///< bus -> placed capacity
    double achieved = 0.0;            ///< min-over-grid kappa with placement
    double baseline = 0.0;            ///< min-over-grid kappa without
    long evaluations = 0;
};

/// Worst-frequency system strength of the base case with the given
/// placement applied. The shared evaluator behind both searches.
double placement_objective(const PlacementProblem& problem,
                           const std::map<int, double>& assignment,
                           const FrequencyGrid& grid);

/// Enumerates every feasible assignment (lattice of per-candidate levels
/// within the budget) and returns the best; ties prefer smaller total
/// capacity, then the lexicographically smallest assignment. Throws
/// SearchSpaceTooLarge when the lattice exceeds 1e5 points.
PlacementResult place_exhaustive(const PlacementProblem& problem,
                                 const FrequencyGrid& grid);

/// Moves one candidate bus up one capacity level at a time, always
/// choosing the step with the largest strength improvement, until the
/// budget is exhausted or no step improves by more than 1e-6.
PlacementResult place_greedy(const PlacementProblem& problem,
                             const FrequencyGrid& grid);

std::string placement_result_json(const PlacementResult& result);

} // namespace gridformer
