#include "srcrt/voting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace srcrt {

namespace {

struct VoteGroup {
    Quotient quotient = 0;
    std::size_t count = 0;
    double mu_sum = 0.0;
};

Quotient product_of(const ModulusSet& ms, std::span<const std::size_t> indices)
{
    Quotient p = 1;
    for (std::size_t idx : indices) p *= ms.coprimes()[idx];
    return p;
}

}  // namespace

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k)
{
    std::vector<std::vector<std::size_t>> out;
    if (k > n) return out;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        out.push_back(idx);
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

std::size_t minimal_prefix(const ModulusSet& ms, Quotient quotient_bound)
{
    auto sorted = ms.coprimes();
    std::sort(sorted.begin(), sorted.end());
    Quotient p = 1;
    for (std::size_t l = 0; l < sorted.size(); ++l) {
        p *= sorted[l];
        if (p >= quotient_bound) return l + 1;
    }
    throw ValidationError("voting: the full modulus set does not cover the requested range");
}

VotingConfig VotingConfig::make(const ModulusSet& ms, Quotient quotient_bound, std::size_t group_size)
{
    if (quotient_bound == 0) throw ValidationError("voting: quotient bound must be positive");
    VotingConfig cfg;
    cfg.quotient_bound = quotient_bound;
    cfg.l0 = minimal_prefix(ms, quotient_bound);
    cfg.group_size = group_size;
    if (group_size < cfg.l0)
        throw ValidationError("voting: group size " + std::to_string(group_size) +
                              " is below L0 = " + std::to_string(cfg.l0));
    return cfg;
}

std::vector<std::vector<std::size_t>> regroup_moduli(const ModulusSet& ms, const VotingConfig& cfg)
{
    if (cfg.group_size < cfg.l0)
        throw ValidationError("voting: group size " + std::to_string(cfg.group_size) +
                              " is below L0 = " + std::to_string(cfg.l0));
    if (cfg.group_size == 0 || cfg.group_size > ms.size())
        throw ValidationError("voting: group size must lie in [1, L]");
    std::vector<std::vector<std::size_t>> out;
    for (auto& subset : combinations(ms.size(), cfg.group_size))
        if (product_of(ms, subset) >= cfg.quotient_bound) out.push_back(std::move(subset));
    return out;
}

VoteOutcome tally_votes(std::span<const Estimate> candidates, std::size_t n, double gamma)
{
    if (n == 0) throw ValidationError("voting: n must be positive");

    // mu values seen per quotient, for the wrap-merge test
    std::map<Quotient, std::vector<double>> by_quotient;
    for (const auto& c : candidates) by_quotient[c.quotient].push_back(c.mu_hat);

    auto merges_down = [&](const Estimate& c) {
        if (c.quotient == 0 || !(c.mu_hat < gamma / 2)) return false;
        const auto below = by_quotient.find(c.quotient - 1);
        if (below == by_quotient.end()) return false;
        return std::any_of(below->second.begin(), below->second.end(), [&](double mu_a) {
            return mu_a >= gamma / 2 && wrapped_distance(mu_a, c.mu_hat, gamma) < gamma / 4;
        });
    };

    std::map<Quotient, VoteGroup> groups;
    for (const auto& c : candidates) {
        Quotient q = c.quotient;
        double mu = c.mu_hat;
        if (merges_down(c)) {
            q -= 1;
            mu += gamma;
        }
        auto& g = groups[q];
        g.quotient = q;
        ++g.count;
        g.mu_sum += mu;
    }

    std::vector<VoteGroup> ranked;
    ranked.reserve(groups.size());
    for (const auto& [q, g] : groups) ranked.push_back(g);
    // map iteration is ascending in quotient, so a stable sort keeps smaller quotients first on ties
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const VoteGroup& a, const VoteGroup& b) { return a.count > b.count; });

    VoteOutcome out;
    out.distinct_quotients = ranked.size();
    out.degenerate = ranked.size() < n;
    if (ranked.empty()) return out;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& g = ranked[k % ranked.size()];
        const double mu = g.mu_sum / static_cast<double>(g.count);
        out.estimates.push_back({static_cast<double>(g.quotient) * gamma + mu, g.quotient, mu});
        out.support.push_back(g.count);
    }
    return out;
}

VoteOutcome vote_reconstruct(const ObservationMatrix& observations, const ModulusSet& ms,
                             const VotingConfig& cfg, Decoder decoder, const IterateOptions& options)
{
    validate_observations(observations, ms);
    const auto subsets = regroup_moduli(ms, cfg);
    if (subsets.empty()) throw ValidationError("voting: no admissible moduli subsets");

    std::vector<Estimate> candidates;
    candidates.reserve(subsets.size() * observations.rows());
    std::vector<std::size_t> iterations;
    iterations.reserve(subsets.size());
    for (const auto& subset : subsets) {
        const auto sub_ms = ms.subset(subset);
        const auto sub_obs = observations.select_columns(subset);
        const auto rec = decoder == Decoder::MapCutting ? reconstruct_algo1(sub_obs, sub_ms)
                                                        : reconstruct_algo2(sub_obs, sub_ms, options);
        candidates.insert(candidates.end(), rec.estimates.begin(), rec.estimates.end());
        iterations.push_back(rec.iterations);
    }
    auto out = tally_votes(candidates, observations.rows(), ms.gamma());
    const auto total = std::accumulate(iterations.begin(), iterations.end(), std::size_t{0});
    out.mean_iterations = static_cast<double>(total) / static_cast<double>(subsets.size());
    out.iterations = std::move(iterations);
    return out;
}

DecodeResult decode_with_errors(const ClusterResidues& cluster, const ModulusSet& ms, std::size_t l0)
{
    const std::size_t l_count = ms.size();
    if (cluster.size() != l_count) throw ValidationError("decode: residue count mismatch");
    if (l0 == 0 || l_count <= l0)
        throw ValidationError("decode: need more residues than L0 for error tolerance");

    const double gamma = ms.gamma();
    const auto subsets = combinations(l_count, l0);
    std::vector<Estimate> candidates;
    candidates.reserve(subsets.size());
    for (const auto& subset : subsets) {
        const auto sub_ms = ms.subset(subset);
        std::vector<double> raws;
        for (std::size_t idx : subset) raws.push_back(cluster.raws()[idx]);
        candidates.push_back(reconstruct_single(ClusterResidues(std::move(raws), sub_ms), sub_ms));
    }
    const auto vote = tally_votes(candidates, 1, gamma);
    const Estimate& modal = vote.estimates.front();

    // refit mu on the residues that sit within gamma/2 of the voted position
    double w_sum = 0.0, wx_sum = 0.0;
    std::size_t consistent = 0;
    for (std::size_t l = 0; l < l_count; ++l) {
        const double m = ms.modulus(l);
        const auto j = static_cast<double>(modal.quotient % ms.coprimes()[l]);
        const double diff = wrap(cluster.raws()[l] - j * gamma - modal.mu_hat + m / 2, m) - m / 2;
        if (std::abs(diff) < gamma / 2) {
            w_sum += ms.weights()[l];
            wx_sum += ms.weights()[l] * (modal.mu_hat + diff);
            ++consistent;
        }
    }

    DecodeResult out;
    out.quotient = modal.quotient;
    out.mu_hat = consistent > 0 ? wx_sum / w_sum : modal.mu_hat;
    out.y_hat = static_cast<double>(out.quotient) * gamma + out.mu_hat;
    out.confidence = static_cast<double>(vote.support.front()) / static_cast<double>(subsets.size());
    out.consistent = consistent;
    out.low_confidence = vote.support.front() <= 1;
    return out;
}

}  // namespace srcrt
