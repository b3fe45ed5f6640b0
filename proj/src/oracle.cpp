#include "srcrt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace srcrt::oracle {

namespace {

constexpr double kTieTolerance = 1e-12;

double factorial(std::size_t n)
{
    double f = 1.0;
    for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return f;
}

double log_sum_exp(std::span<const double> xs)
{
    const double top = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - top);
    return top + std::log(s);
}

void check_shape(std::size_t n, std::size_t l, const OracleBudget& budget)
{
    if (n > budget.max_n || l > budget.max_l)
        throw BudgetExceeded("oracle: N=" + std::to_string(n) + ", L=" + std::to_string(l) +
                             " exceeds the budget (N <= " + std::to_string(budget.max_n) +
                             ", L <= " + std::to_string(budget.max_l) + ")");
    if (budget.steps < 2 || budget.steps % 2 != 0)
        throw ValidationError("oracle: Simpson panel count must be even and positive");
}

// table[l][row][k] = log sum_j exp(-w_l (r - mu_k + j gamma)^2) on the quadrature nodes
class WrapTable {
public:
    WrapTable(const ResidueMatrix& commons, const ModulusSet& ms, const OracleBudget& budget)
        : nodes_(budget.steps + 1), n_(commons.rows())
    {
        const double gamma = ms.gamma();
        const double h = gamma / static_cast<double>(budget.steps);
        const auto jmax = static_cast<long>(budget.wrap_terms);
        std::vector<double> terms(2 * budget.wrap_terms + 1);

        values_.resize(commons.cols() * n_ * nodes_);
        for (std::size_t l = 0; l < commons.cols(); ++l) {
            const double w = ms.weights()[l];
            for (std::size_t row = 0; row < n_; ++row) {
                const double r = commons(row, l);
                for (std::size_t k = 0; k < nodes_; ++k) {
                    const double mu = h * static_cast<double>(k);
                    for (long j = -jmax; j <= jmax; ++j) {
                        const double d = r - mu + static_cast<double>(j) * gamma;
                        terms[static_cast<std::size_t>(j + jmax)] = -w * d * d;
                    }
                    values_[(l * n_ + row) * nodes_ + k] = log_sum_exp(terms);
                }
            }
        }

        log_weights_.resize(nodes_);
        for (std::size_t k = 0; k < nodes_; ++k) {
            const double c = (k == 0 || k + 1 == nodes_) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            log_weights_[k] = std::log(c * h / 3.0);
        }
    }

    double log_likelihood(const Clustering& clustering) const
    {
        std::vector<double> integrand(nodes_);
        double total = 0.0;
        for (std::size_t i = 0; i < clustering.n(); ++i) {
            std::copy(log_weights_.begin(), log_weights_.end(), integrand.begin());
            for (std::size_t l = 0; l < clustering.l(); ++l) {
                const double* t = &values_[(l * n_ + clustering.perms[l][i]) * nodes_];
                for (std::size_t k = 0; k < nodes_; ++k) integrand[k] += t[k];
            }
            total += log_sum_exp(integrand);
        }
        return total;
    }

private:
    std::size_t nodes_;
    std::size_t n_;
    std::vector<double> values_;
    std::vector<double> log_weights_;
};

void check_clustering(const Clustering& clustering, const ResidueMatrix& commons)
{
    if (clustering.l() != commons.cols() || clustering.n() != commons.rows() || !clustering.valid())
        throw ValidationError("oracle: clustering does not fit the residue matrix");
}

}  // namespace

double evaluate_likelihood(const Clustering& clustering, const ResidueMatrix& commons,
                           const ModulusSet& ms, const OracleBudget& budget)
{
    if (commons.cols() != ms.size()) throw ValidationError("oracle: column count differs from L");
    check_shape(commons.rows(), commons.cols(), budget);
    check_clustering(clustering, commons);
    return WrapTable(commons, ms, budget).log_likelihood(clustering);
}

Clustering brute_force_map_clustering(const ResidueMatrix& commons, const ModulusSet& ms,
                                      const OracleBudget& budget)
{
    const std::size_t n = commons.rows();
    const std::size_t l_count = commons.cols();
    if (l_count != ms.size()) throw ValidationError("oracle: column count differs from L");
    if (n == 0 || l_count == 0) throw ValidationError("oracle: empty residue matrix");
    check_shape(n, l_count, budget);
    const double count = std::pow(factorial(n), static_cast<double>(l_count - 1));
    if (count > static_cast<double>(budget.max_clusterings))
        throw BudgetExceeded("oracle: " + std::to_string(count) + " clusterings exceed the cap");

    const WrapTable table(commons, ms, budget);
    Clustering current = Clustering::identity(n, l_count);
    Clustering best = current;
    double best_value = table.log_likelihood(current);

    // odometer over perms[1..L-1]; the last column varies fastest, so the visit
    // order is lexicographic in (perms[1], ..., perms[L-1])
    while (true) {
        std::size_t l = l_count;
        while (l > 1) {
            auto& p = current.perms[l - 1];
            if (std::next_permutation(p.begin(), p.end())) break;
            // next_permutation already wrapped p back to the identity
            --l;
        }
        if (l <= 1) break;
        const double value = table.log_likelihood(current);
        if (value > best_value + kTieTolerance * std::max(1.0, std::abs(best_value))) {
            best_value = value;
            best = current;
        }
    }
    return best;
}

std::vector<std::size_t> brute_force_matching(std::span<const double> column,
                                              std::span<const double> mu, double gamma,
                                              const OracleBudget& budget)
{
    const std::size_t n = mu.size();
    if (column.size() != n) throw ValidationError("oracle: column and mu sizes differ");
    if (n > budget.max_matching_n)
        throw BudgetExceeded("oracle: matching of size " + std::to_string(n) + " exceeds the budget");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto cost_of = [&](const std::vector<std::size_t>& p) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = wrapped_distance(column[p[i]], mu[i], gamma);
            c += d * d;
        }
        return c;
    };
    auto best = perm;
    double best_cost = cost_of(perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double c = cost_of(perm);
        if (c < best_cost - kTieTolerance * std::max(1.0, best_cost)) {
            best_cost = c;
            best = perm;
        }
    }
    return best;
}

Estimate exhaustive_reconstruct(const ClusterResidues& cluster, const ModulusSet& ms,
                                const OracleBudget& budget)
{
    if (cluster.size() != ms.size()) throw ValidationError("oracle: residue count mismatch");
    const Quotient range = ms.quotient_range();
    if (static_cast<double>(range) > budget.max_quotients)
        throw BudgetExceeded("oracle: quotient range " + to_string(range) + " exceeds the budget");

    const double gamma = ms.gamma();
    const std::size_t l_count = ms.size();
    const auto& weights = ms.weights();
    double total_w = 0.0;
    for (double w : weights) total_w += w;

    std::vector<double> a(l_count);
    std::vector<double> cuts;
    std::vector<double> shifts(l_count);

    Estimate best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (Quotient k = 0; k < range; ++k) {
        // a_l - mu should sit near a multiple of m_l; the best multiple switches
        // where a_l - mu crosses an odd multiple of m_l / 2
        cuts.assign({0.0, gamma});
        for (std::size_t l = 0; l < l_count; ++l) {
            const double m = ms.modulus(l);
            a[l] = cluster.raws()[l] - static_cast<double>(k % ms.coprimes()[l]) * gamma;
            const double first = wrap(a[l] - m / 2, m);
            for (double c = first; c < gamma; c += m)
                if (c > 0.0) cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());

        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double lo = cuts[s], hi = cuts[s + 1];
            if (!(hi > lo)) continue;
            const double mid = 0.5 * (lo + hi);
            double wsum = 0.0;
            for (std::size_t l = 0; l < l_count; ++l) {
                const double m = ms.modulus(l);
                shifts[l] = std::round((a[l] - mid) / m) * m;
                wsum += weights[l] * (a[l] - shifts[l]);
            }
            const double mu = std::clamp(wsum / total_w, lo, hi);
            double cost = 0.0;
            for (std::size_t l = 0; l < l_count; ++l) {
                const double d = a[l] - shifts[l] - mu;
                cost += weights[l] * d * d;
            }
            if (!std::isfinite(best_cost) || cost < best_cost - kTieTolerance * std::max(1.0, best_cost)) {
                best_cost = cost;
                best = {static_cast<double>(k) * gamma + mu, k, mu};
            }
        }
    }
    return best;
}

}  // namespace srcrt::oracle
