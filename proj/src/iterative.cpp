#include "srcrt/iterative.hpp"

#include <algorithm>
#include <numeric>

#include "srcrt/rng.hpp"
#include "srcrt/single.hpp"

namespace srcrt {

namespace {

constexpr double kCostTieTolerance = 1e-12;

std::vector<std::size_t> ascending_order(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

double clustering_objective(const ResidueMatrix& commons, const Clustering& clustering,
                            std::span<const double> mu, const ModulusSet& ms)
{
    double total = 0.0;
    for (std::size_t l = 0; l < commons.cols(); ++l) {
        const auto column = commons.column(l);
        total += ms.weights()[l] * matching_cost(column, mu, clustering.perms[l], ms.gamma());
    }
    return total;
}

}  // namespace

double matching_cost(std::span<const double> column, std::span<const double> mu,
                     std::span<const std::size_t> perm, double gamma)
{
    double cost = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double d = wrapped_distance(column[perm[i]], mu[i], gamma);
        cost += d * d;
    }
    return cost;
}

std::vector<std::size_t> match_step(std::span<const double> column, std::span<const double> mu,
                                    double gamma)
{
    const std::size_t n = mu.size();
    if (column.size() != n) throw ValidationError("match step: column and mu sizes differ");
    if (n == 0) return {};

    const auto col_order = ascending_order(column);
    const auto mu_order = ascending_order(mu);

    std::size_t best_shift = 0;
    double best_cost = 0.0;
    for (std::size_t shift = 0; shift < n; ++shift) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = wrapped_distance(column[col_order[(i + shift) % n]], mu[mu_order[i]], gamma);
            cost += d * d;
        }
        if (shift == 0 || cost < best_cost - kCostTieTolerance * std::max(1.0, best_cost)) {
            best_cost = cost;
            best_shift = shift;
        }
    }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[mu_order[i]] = col_order[(i + best_shift) % n];
    return perm;
}

std::vector<double> update_step(const std::vector<std::vector<double>>& clusters,
                                std::span<const double> weights, double gamma)
{
    std::vector<double> mu;
    mu.reserve(clusters.size());
    for (const auto& c : clusters) mu.push_back(estimate_common_residue(c, weights, gamma).mu_hat);
    return mu;
}

IterationState iterate(const ObservationMatrix& observations, const ModulusSet& ms,
                       std::span<const double> init, std::size_t max_iters)
{
    validate_observations(observations, ms);
    const std::size_t n = observations.rows();
    if (init.size() != n) throw ValidationError("iterate: init must hold one value per estimand");
    if (max_iters == 0) throw ValidationError("iterate: max_iters must be positive");
    const double gamma = ms.gamma();
    for (double m : init)
        if (!(m >= 0.0) || !(m < gamma)) throw ValidationError("iterate: init outside [0, gamma)");

    const auto commons = common_residues(observations, gamma);
    const std::size_t l_count = commons.cols();

    IterationState state;
    state.mu.assign(init.begin(), init.end());
    std::vector<std::vector<double>> clusters(n, std::vector<double>(l_count));

    for (std::size_t t = 1; t <= max_iters; ++t) {
        Clustering next;
        next.perms.reserve(l_count);
        for (std::size_t l = 0; l < l_count; ++l)
            next.perms.push_back(match_step(commons.column(l), state.mu, gamma));

        if (t > 1 && next == state.clustering) {
            state.converged = true;
            state.iteration = t;
            return state;
        }

        for (std::size_t i = 0; i < n; ++i) clusters[i] = next.gather(commons, i);
        state.mu = update_step(clusters, ms.weights(), gamma);
        state.clustering = std::move(next);
        state.objective = clustering_objective(commons, state.clustering, state.mu, ms);
        state.history.push_back(state.objective);
        state.iteration = t;
    }
    return state;
}

IterationState iterate_multi(const ObservationMatrix& observations, const ModulusSet& ms,
                             const IterateOptions& options)
{
    validate_observations(observations, ms);
    const auto commons = common_residues(observations, ms.gamma());

    std::vector<std::vector<double>> starts;
    starts.push_back(commons.column(0));
    if (options.init == InitStrategy::EveryColumn)
        for (std::size_t l = 1; l < commons.cols(); ++l) starts.push_back(commons.column(l));
    for (std::size_t k = 0; k < options.random_restarts; ++k) {
        auto rng = CounterRng::substream(options.seed, k);
        std::vector<double> mu(commons.rows());
        for (double& m : mu) m = rng.uniform(0.0, ms.gamma());
        starts.push_back(std::move(mu));
    }

    IterationState best;
    bool have_best = false;
    for (const auto& start : starts) {
        auto state = iterate(observations, ms, start, options.max_iters);
        if (!have_best || state.objective < best.objective - kCostTieTolerance * std::max(1.0, best.objective)) {
            best = std::move(state);
            have_best = true;
        }
    }
    return best;
}

Reconstruction reconstruct_algo2(const ObservationMatrix& observations, const ModulusSet& ms,
                                 const IterateOptions& options)
{
    const auto state = iterate_multi(observations, ms, options);
    Reconstruction out;
    out.estimates.reserve(observations.rows());
    for (std::size_t i = 0; i < observations.rows(); ++i)
        out.estimates.push_back(
            reconstruct_with_mu(state.clustering.gather(observations, i), state.mu[i], ms));
    out.clustering = state.clustering;
    out.iterations = state.iteration;
    out.converged = state.converged;
    return out;
}

}  // namespace srcrt
