#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srcrt/iterative.hpp"
#include "srcrt/map_cluster.hpp"
#include "srcrt/modular.hpp"
#include "srcrt/single.hpp"
#include "srcrt/types.hpp"

namespace srcrt {

enum class Decoder { MapCutting, Iterative };

/// Minimal prefix length L0 such that gamma * M_1 * ... * M_L0 covers [0, range):
/// the smallest L0 with prod_{l <= L0} M_l * gamma >= range. Moduli are taken in
/// ascending order of M_l. Throws if even the full set is too small.
std::size_t minimal_prefix(const ModulusSet& ms, Quotient quotient_bound);

/// Moduli-regrouping parameters.
struct VotingConfig {
    std::size_t group_size = 2;
    std::size_t l0 = 2;
    /// Numbers are assumed to lie in [0, gamma * quotient_bound).
    Quotient quotient_bound = 1;

    /// Derives l0 for the given range; throws if group_size < l0.
    static VotingConfig make(const ModulusSet& ms, Quotient quotient_bound, std::size_t group_size);
};

/// All group_size-subsets of {0..L-1} (lexicographic order) whose product of
/// M_l reaches the quotient bound. Throws if group_size < cfg.l0 or > L.
std::vector<std::vector<std::size_t>> regroup_moduli(const ModulusSet& ms, const VotingConfig& cfg);

/// Majority vote over candidate (quotient, mu) pairs.
///
/// A candidate (Q + 1, mu_b) is read as (Q, mu_b + gamma) when some candidate
/// (Q, mu_a) sits on the other side of the wrap point (mu_a >= gamma/2 > mu_b)
/// with d_gamma(mu_a, mu_b) < gamma/4. The n most supported quotients win (ties:
/// smaller quotient); each estimate is Q * gamma + mean of its supporters' mu.
struct VoteOutcome {
    std::vector<Estimate> estimates;   ///< always n entries
    std::vector<std::size_t> support;  ///< supporters per estimate
    std::size_t distinct_quotients = 0;
    /// Fewer than n distinct quotients: the missing slots repeat the winners in rank order.
    bool degenerate = false;
    double mean_iterations = 0.0;      ///< per subset run, iterative decoder only
    std::vector<std::size_t> iterations;  ///< one entry per subset run
};

VoteOutcome tally_votes(std::span<const Estimate> candidates, std::size_t n, double gamma);

/// Run the decoder on each regrouped moduli subset and vote on the quotients.
VoteOutcome vote_reconstruct(const ObservationMatrix& observations, const ModulusSet& ms,
                             const VotingConfig& cfg, Decoder decoder,
                             const IterateOptions& options = {});

struct DecodeResult {
    double y_hat = 0.0;
    Quotient quotient = 0;
    double mu_hat = 0.0;
    double confidence = 0.0;      ///< fraction of L0-subsets supporting the winning quotient
    std::size_t consistent = 0;   ///< residues used in the final common-residue fit
    bool low_confidence = false;  ///< winning quotient backed by at most one subset
};

/// Error-tolerant single-number decoding: reconstruct from every L0-subset of the
/// residues, take the modal quotient, then refit the common residue on the
/// residues that agree with it. Tolerates floor((L - L0) / 2) arbitrary residues.
/// Requires L > l0.
DecodeResult decode_with_errors(const ClusterResidues& cluster, const ModulusSet& ms,
                                std::size_t l0);

/// All size-k subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k);

}  // namespace srcrt
