#include "srcrt/single.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace srcrt {

namespace {

constexpr double kLossTieTolerance = 1e-12;

}  // namespace

double round_half_even(double x)
{
    const double r = std::round(x);
    if (std::fabs(x - std::trunc(x)) == 0.5) return 2.0 * std::round(x / 2.0);
    return r;
}

ClusterResidues::ClusterResidues(std::vector<double> raws, const ModulusSet& ms)
    : raws_(std::move(raws))
{
    if (raws_.size() != ms.size())
        throw ValidationError("cluster: expected " + std::to_string(ms.size()) +
                              " residues, got " + std::to_string(raws_.size()));
    commons_.reserve(raws_.size());
    for (std::size_t l = 0; l < raws_.size(); ++l) {
        const double r = raws_[l];
        if (!(r >= 0.0) || !(r < ms.modulus(l)))
            throw ValidationError("cluster: residue " + std::to_string(r) +
                                  " outside [0, m_" + std::to_string(l) + ")");
        commons_.push_back(project_common(r, ms.gamma()));
    }
}

double common_residue_loss(double x, std::span<const double> commons,
                           std::span<const double> weights, double gamma)
{
    double loss = 0.0;
    for (std::size_t l = 0; l < commons.size(); ++l) {
        const double d = wrapped_distance(x, commons[l], gamma);
        loss += weights[l] * d * d;
    }
    return loss;
}

CommonResidueFit estimate_common_residue(std::span<const double> commons,
                                         std::span<const double> weights, double gamma)
{
    if (commons.empty()) throw ValidationError("common residue: no residues");
    if (commons.size() != weights.size())
        throw ValidationError("common residue: residue and weight counts differ");

    const std::size_t count = commons.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return commons[a] < commons[b]; });

    double total_w = 0.0;
    double weighted_sum = 0.0;
    for (std::size_t k : order) {
        total_w += weights[k];
        weighted_sum += weights[k] * commons[k];
    }

    CommonResidueFit best;
    double lifted_w = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        if (j > 0) lifted_w += weights[order[j - 1]];
        const double candidate = wrap((weighted_sum + gamma * lifted_w) / total_w, gamma);
        const double loss = common_residue_loss(candidate, commons, weights, gamma);
        if (j == 0 || loss < best.loss - kLossTieTolerance * std::max(1.0, best.loss))
            best = {candidate, loss};
    }
    return best;
}

Estimate reconstruct_with_mu(std::span<const double> raws, double mu_hat, const ModulusSet& ms)
{
    if (raws.size() != ms.size()) throw ValidationError("reconstruct: residue count mismatch");
    const double gamma = ms.gamma();
    std::vector<std::uint64_t> q(raws.size());
    for (std::size_t l = 0; l < raws.size(); ++l) {
        const auto j = static_cast<std::int64_t>(round_half_even((raws[l] - mu_hat) / gamma));
        q[l] = mod_floor(j, ms.coprimes()[l]);
    }

    Estimate out;
    out.quotient = crt_reconstruct(q, ms.coprimes());
    out.mu_hat = mu_hat;
    out.y_hat = static_cast<double>(out.quotient) * gamma + mu_hat;
    return out;
}

Estimate reconstruct_single(const ClusterResidues& cluster, const ModulusSet& ms)
{
    if (cluster.size() != ms.size()) throw ValidationError("reconstruct: residue count mismatch");
    const auto fit = estimate_common_residue(cluster.commons(), ms.weights(), ms.gamma());
    return reconstruct_with_mu(cluster.raws(), fit.mu_hat, ms);
}

}  // namespace srcrt
