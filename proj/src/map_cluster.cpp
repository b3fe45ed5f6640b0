#include "srcrt/map_cluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "srcrt/single.hpp"

namespace srcrt {

namespace {

constexpr double kScoreTolerance = 1e-9;

// Indices of a column sorted by (value, original index).
std::vector<std::size_t> sorted_order(const ResidueMatrix& m, std::size_t l)
{
    std::vector<std::size_t> order(m.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m(a, l) < m(b, l); });
    return order;
}

double group_score(std::span<const double> values, std::span<const double> weights)
{
    double total_w = 0.0, sum = 0.0;
    for (std::size_t l = 0; l < values.size(); ++l) {
        total_w += weights[l];
        sum += weights[l] * values[l];
    }
    const double mean = sum / total_w;
    double scatter = 0.0;
    for (std::size_t l = 0; l < values.size(); ++l) {
        const double d = values[l] - mean;
        scatter += weights[l] * d * d;
    }
    return -scatter;
}

}  // namespace

ShiftedResidues shift_residues(const ResidueMatrix& commons, double tau, double gamma)
{
    ShiftedResidues out{commons, tau};
    if (commons.rows() == 0 || commons.cols() == 0) return out;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < commons.rows(); ++i)
        for (std::size_t l = 0; l < commons.cols(); ++l) {
            lo = std::min(lo, commons(i, l));
            hi = std::max(hi, commons(i, l));
        }
    if (tau <= lo || tau >= hi) return out;

    for (std::size_t i = 0; i < commons.rows(); ++i)
        for (std::size_t l = 0; l < commons.cols(); ++l)
            if (commons(i, l) > tau) out.values(i, l) = commons(i, l) - gamma;
    return out;
}

double cluster_score(const std::vector<std::vector<double>>& groups,
                     std::span<const double> weights)
{
    // -sum w (x - mean)^2 is the same quantity as (sum w x)^2 / sum w - sum w x^2
    // without the cancellation.
    double score = 0.0;
    for (const auto& g : groups) {
        if (g.size() != weights.size())
            throw ValidationError("cluster score: group length differs from weight count");
        score += group_score(g, weights);
    }
    return score;
}

MapClusteringResult map_clustering(const ResidueMatrix& commons, const ModulusSet& ms)
{
    const std::size_t n = commons.rows();
    const std::size_t l_count = commons.cols();
    if (n == 0 || l_count == 0) throw ValidationError("map clustering: empty residue matrix");
    if (l_count != ms.size()) throw ValidationError("map clustering: column count mismatch");

    std::vector<double> cuts;
    cuts.reserve(n * l_count);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < l_count; ++l) cuts.push_back(commons(i, l));
    std::sort(cuts.begin(), cuts.end());

    const auto& w = ms.weights();
    MapClusteringResult best;
    bool have_best = false;
    std::vector<double> group(l_count);
    Clustering candidate;
    candidate.perms.resize(l_count);

    for (double tau : cuts) {
        const auto shifted = shift_residues(commons, tau, ms.gamma());
        for (std::size_t l = 0; l < l_count; ++l) candidate.perms[l] = sorted_order(shifted.values, l);

        double score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < l_count; ++l)
                group[l] = shifted.values(candidate.perms[l][i], l);
            score += group_score(group, w);
        }
        // cuts ascend, so a tie keeps the earlier (smaller) tau
        if (!have_best || score > best.score + kScoreTolerance) {
            best = {candidate, tau, score};
            have_best = true;
        }
    }
    return best;
}

ResidueMatrix common_residues(const ObservationMatrix& observations, double gamma)
{
    ResidueMatrix out(observations.rows(), observations.cols());
    for (std::size_t i = 0; i < observations.rows(); ++i)
        for (std::size_t l = 0; l < observations.cols(); ++l)
            out(i, l) = project_common(observations(i, l), gamma);
    return out;
}

void validate_observations(const ObservationMatrix& observations, const ModulusSet& ms)
{
    if (observations.rows() == 0) throw ValidationError("observations: no estimands");
    if (observations.cols() != ms.size())
        throw ValidationError("observations: expected " + std::to_string(ms.size()) +
                              " columns, got " + std::to_string(observations.cols()));
    for (std::size_t l = 0; l < observations.cols(); ++l) {
        const double m = ms.modulus(l);
        for (std::size_t i = 0; i < observations.rows(); ++i) {
            const double r = observations(i, l);
            if (!(r >= 0.0) || !(r < m))
                throw ValidationError("observations: R(" + std::to_string(i) + "," +
                                      std::to_string(l) + ")=" + std::to_string(r) +
                                      " outside [0, m_l)");
        }
    }
}

std::vector<Estimate> reconstruct_clustered(const ObservationMatrix& observations,
                                            const Clustering& clustering, const ModulusSet& ms)
{
    if (clustering.l() != observations.cols() || clustering.n() != observations.rows() ||
        !clustering.valid())
        throw ValidationError("clustering does not match the observation matrix");
    std::vector<Estimate> out;
    out.reserve(observations.rows());
    for (std::size_t i = 0; i < observations.rows(); ++i)
        out.push_back(reconstruct_single(ClusterResidues(clustering.gather(observations, i), ms), ms));
    return out;
}

Reconstruction reconstruct_algo1(const ObservationMatrix& observations, const ModulusSet& ms)
{
    validate_observations(observations, ms);
    const auto map = map_clustering(common_residues(observations, ms.gamma()), ms);
    Reconstruction out;
    out.estimates = reconstruct_clustered(observations, map.clustering, ms);
    out.clustering = map.clustering;
    return out;
}

}  // namespace srcrt
