#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srcrt/map_cluster.hpp"
#include "srcrt/modular.hpp"
#include "srcrt/types.hpp"

namespace srcrt {

/// Assign one modulus column to the current common-residue estimates.
///
/// Sort both sides and try the N cyclic rotations of the sorted column against
/// the sorted estimates; the rotation with the smallest sum of squared wrapped
/// distances wins (ties: smallest rotation). Returned perm[i] is the column row
/// matched to mu[i].
std::vector<std::size_t> match_step(std::span<const double> column, std::span<const double> mu,
                                    double gamma);

/// Sum of squared wrapped distances of a matching.
double matching_cost(std::span<const double> column, std::span<const double> mu,
                     std::span<const std::size_t> perm, double gamma);

/// Per-cluster circular weighted mean (see estimate_common_residue).
std::vector<double> update_step(const std::vector<std::vector<double>>& clusters,
                                std::span<const double> weights, double gamma);

struct IterationState {
    std::vector<double> mu;
    Clustering clustering;
    double objective = 0.0;          ///< sum_l sum_i w_l d^2(r_{K_l(i) l}, mu_i)
    /// Matching passes run, counting the one that found the clustering unchanged
    /// (a run that is stationary from the start reports 2).
    std::size_t iteration = 0;
    bool converged = false;          ///< false if max_iters ran out first
    std::vector<double> history;     ///< objective after each executed iteration
};

enum class InitStrategy {
    FirstColumn,  ///< common residues of the first modulus column
    EveryColumn,  ///< one run per column, lowest final objective kept
};

struct IterateOptions {
    std::size_t max_iters = 50;
    InitStrategy init = InitStrategy::FirstColumn;
    std::size_t random_restarts = 0;  ///< extra runs from uniform random starts
    std::uint64_t seed = 0;
};

/// Alternate match_step (every column) and update_step until the clustering
/// repeats or max_iters is reached. Non-convergence is reported in the state.
IterationState iterate(const ObservationMatrix& observations, const ModulusSet& ms,
                       std::span<const double> init, std::size_t max_iters = 50);

/// iterate() from the starts selected by options; keeps the lowest objective
/// (earliest start on ties).
IterationState iterate_multi(const ObservationMatrix& observations, const ModulusSet& ms,
                             const IterateOptions& options);

/// Iterative joint clustering / common-residue estimation followed by quotient
/// reconstruction with the converged common residues.
Reconstruction reconstruct_algo2(const ObservationMatrix& observations, const ModulusSet& ms,
                                 const IterateOptions& options = {});

}  // namespace srcrt
