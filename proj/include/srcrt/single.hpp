#pragma once

#include <span>
#include <vector>

#include "srcrt/modular.hpp"
#include "srcrt/types.hpp"

namespace srcrt {

/// The L raw observations already assigned to one estimand, one per modulus,
/// together with their common residues (raw mod gamma).
class ClusterResidues {
public:
    /// Validates length against ms and that each raw value lies in [0, m_l).
    ClusterResidues(std::vector<double> raws, const ModulusSet& ms);

    const std::vector<double>& raws() const { return raws_; }
    const std::vector<double>& commons() const { return commons_; }
    std::size_t size() const { return raws_.size(); }

private:
    std::vector<double> raws_;
    std::vector<double> commons_;
};

struct CommonResidueFit {
    double mu_hat = 0.0;  ///< in [0, gamma)
    double loss = 0.0;    ///< sum_l w_l d_gamma(mu_hat, r_l)^2
};

/// Minimizes sum_l w_l d_gamma(x, r_l)^2 over the circle.
///
/// The minimizer is one of L wrapped weighted means: sort the residues, lift the
/// first j of them by gamma and take the weighted mean, j = 0..L-1. Each is
/// scored and the lowest loss wins; equal losses keep the smallest j.
CommonResidueFit estimate_common_residue(std::span<const double> commons,
                                         std::span<const double> weights, double gamma);

/// Weighted circular least-squares loss of a candidate common residue.
double common_residue_loss(double x, std::span<const double> commons,
                           std::span<const double> weights, double gamma);

/// Nearest integer, exact halves rounded to even.
double round_half_even(double x);

/// Quotient extraction for a fixed common residue: j_l = round((R_l - mu) / gamma)
/// (ties to even), q_l = j_l mod M_l, Q = CRT(q), y_hat = Q * gamma + mu.
Estimate reconstruct_with_mu(std::span<const double> raws, double mu_hat, const ModulusSet& ms);

/// Robust CRT for one number whose residues are already clustered.
Estimate reconstruct_single(const ClusterResidues& cluster, const ModulusSet& ms);

}  // namespace srcrt
