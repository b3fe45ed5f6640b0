#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "srcrt/modular.hpp"
#include "srcrt/single.hpp"
#include "srcrt/types.hpp"

// Brute-force reference implementations. Slow on purpose; used to check the
// fast decoders on small instances.
namespace srcrt::oracle {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleBudget {
    std::size_t max_n = 3;            ///< clustering enumeration
    std::size_t max_l = 3;
    std::size_t max_matching_n = 6;
    std::size_t wrap_terms = 5;       ///< wrap sums truncated to |j| <= wrap_terms
    std::size_t steps = 2000;         ///< Simpson panels over [0, gamma); must be even
    std::size_t max_clusterings = 100000;   ///< cap on (N!)^(L-1)
    double max_quotients = 1e6;       ///< cap on prod M_l for exhaustive_reconstruct
};

/// Log of the clustering likelihood up to a clustering-independent constant:
///   sum_i log int_0^gamma prod_l sum_j exp(-w_l (r_{K_l(i) l} - mu + j gamma)^2) dmu
/// evaluated with a composite Simpson rule in the log domain.
double evaluate_likelihood(const Clustering& clustering, const ResidueMatrix& commons,
                           const ModulusSet& ms, const OracleBudget& budget = {});

/// Exhaustive MAP clustering. K_1 is fixed to the identity and the remaining
/// (N!)^(L-1) choices are visited in lexicographic order; the first maximum wins.
Clustering brute_force_map_clustering(const ResidueMatrix& commons, const ModulusSet& ms,
                                      const OracleBudget& budget = {});

/// Permutation minimizing sum_i d_gamma(column[perm[i]], mu[i])^2 over all N!
/// candidates (first in lexicographic order on ties).
std::vector<std::size_t> brute_force_matching(std::span<const double> column,
                                              std::span<const double> mu, double gamma,
                                              const OracleBudget& budget = {});

/// Single-number reconstruction by enumerating every quotient k in [0, prod M)
/// and minimizing sum_l w_l min_j (R_l - (k mod M_l) gamma - mu - j m_l)^2 exactly
/// over mu in [0, gamma). The smallest k wins ties.
Estimate exhaustive_reconstruct(const ClusterResidues& cluster, const ModulusSet& ms,
                                const OracleBudget& budget = {});

}  // namespace srcrt::oracle
