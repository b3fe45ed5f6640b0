#pragma once

#include <span>
#include <vector>

#include "srcrt/modular.hpp"
#include "srcrt/types.hpp"

namespace srcrt {

/// Common residues after cutting the circle at tau and straightening it:
/// values above tau are moved down by gamma, unless tau lies outside the
/// observed range, in which case nothing moves.
struct ShiftedResidues {
    ResidueMatrix values;
    double tau = 0.0;
};

ShiftedResidues shift_residues(const ResidueMatrix& commons, double tau, double gamma);

/// Sum over groups of (sum_l w_l x_l)^2 / sum_l w_l - sum_l w_l x_l^2, i.e. minus
/// the weighted within-group scatter. Always <= 0; zero iff every group is constant.
double cluster_score(const std::vector<std::vector<double>>& groups,
                     std::span<const double> weights);

struct MapClusteringResult {
    Clustering clustering;
    double tau_star = 0.0;
    double score = 0.0;
};

/// Conditional MAP clustering by cutting-point enumeration.
///
/// Every observed common residue is tried as the cut tau. For each cut the
/// shifted columns are sorted and the i-th smallest entries of all columns form
/// group i; the cut whose grouping scores highest wins. Scores within 1e-9 are
/// treated as equal and the smaller tau is kept.
MapClusteringResult map_clustering(const ResidueMatrix& commons, const ModulusSet& ms);

/// Common residues of every observation.
ResidueMatrix common_residues(const ObservationMatrix& observations, double gamma);

struct Reconstruction {
    std::vector<Estimate> estimates;
    Clustering clustering;
    std::size_t iterations = 0;  ///< zero for non-iterative decoders
    bool converged = true;
};

/// Shape and range checks shared by every multi-number decoder.
void validate_observations(const ObservationMatrix& observations, const ModulusSet& ms);

/// Reconstruct each estimand from the observations a clustering assigns to it.
std::vector<Estimate> reconstruct_clustered(const ObservationMatrix& observations,
                                            const Clustering& clustering, const ModulusSet& ms);

/// MAP clustering followed by N single-number reconstructions.
Reconstruction reconstruct_algo1(const ObservationMatrix& observations, const ModulusSet& ms);

}  // namespace srcrt
