#include "srcrt/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "srcrt/rng.hpp"

namespace srcrt {

double sigma_from_snr(double snr_db)
{
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return std::pow(10.0, -snr_db / 20.0);
}

InstanceSpec InstanceSpec::from_snr(std::size_t n, double gamma, std::vector<std::uint64_t> coprimes,
                                    double snr_db, std::uint64_t seed, double range)
{
    const double sigma = sigma_from_snr(snr_db);
    auto ms = ModulusSet::uniform(gamma, std::move(coprimes), sigma > 0.0 ? sigma : 1.0);
    return InstanceSpec{n, std::move(ms), snr_db, seed, range};
}

Instance sample_instance(const InstanceSpec& spec)
{
    if (spec.n == 0) throw ValidationError("instance: n must be positive");
    const auto& ms = spec.ms;
    const std::size_t n = spec.n;
    const std::size_t l_count = ms.size();
    const double range = spec.effective_range();
    const double sigma = spec.noise_sigma();

    CounterRng rng(mix64(spec.seed));
    Instance inst;
    auto& truth = inst.truth;
    truth.ys.resize(n);
    for (double& y : truth.ys) y = rng.uniform(0.0, range);

    truth.noises = ResidueMatrix(n, l_count);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < l_count; ++l) truth.noises(i, l) = sigma * rng.normal();

    truth.true_perms = Clustering::identity(n, l_count);
    inst.observations = ObservationMatrix(n, l_count);
    for (std::size_t l = 0; l < l_count; ++l) {
        auto& perm = truth.true_perms.perms[l];
        rng.shuffle(std::span<std::size_t>(perm));
        const double m = ms.modulus(l);
        for (std::size_t i = 0; i < n; ++i)
            inst.observations(perm[i], l) = wrap(truth.ys[i] + truth.noises(i, l), m);
    }
    return inst;
}

bool assumption1_holds(const GroundTruth& truth, double gamma)
{
    const std::size_t n = truth.ys.size();
    std::vector<std::pair<double, double>> arcs;  // [start, end) pieces on [0, gamma)
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = truth.noises.row(i);
        const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
        const double length = *hi - *lo;
        if (!(length < gamma / 2)) return false;
        const double start = wrap(truth.ys[i] + *lo, gamma);
        const double end = start + length;
        if (end <= gamma) {
            arcs.emplace_back(start, end);
        } else {
            arcs.emplace_back(start, gamma);
            arcs.emplace_back(0.0, end - gamma);
        }
    }
    std::sort(arcs.begin(), arcs.end());
    // the arcs are closed, so a gap must have positive length
    double reach = 0.0;
    bool first = true;
    for (const auto& [start, end] : arcs) {
        if (first) {
            if (start > 0.0) return true;
            first = false;
        } else if (start > reach) {
            return true;
        }
        reach = std::max(reach, end);
    }
    if (first) return true;
    // [reach, gamma) uncovered unless it closes up with a point at 0
    return reach < gamma;
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double separation_probability(double sigma, double gamma, std::size_t n, std::size_t l)
{
    if (!(sigma > 0.0) || !(gamma > 0.0) || n == 0 || l == 0)
        throw ValidationError("separation probability: parameters must be positive");
    if (l == 1) return 1.0;
    const double delta = gamma / (2.0 * static_cast<double>(n));
    const double scaled = delta / sigma;
    const auto power = static_cast<double>(l - 1);

    // integrate over the standardized variable z = x / sigma
    auto integrand = [&](double z) {
        const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        const double mass = normal_cdf(z + scaled) - normal_cdf(z);
        return density * std::pow(mass, power);
    };
    double error = 0.0;
    const double per_estimand = static_cast<double>(l) *
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, -8.0, 8.0, 30, 1e-12,
                                                                      &error);
    const double p = std::pow(std::clamp(per_estimand, 0.0, 1.0), static_cast<double>(n));
    return std::clamp(p, 0.0, 1.0);
}

double separation_bound(double sigma, double gamma, std::size_t n, std::size_t l)
{
    if (!(sigma > 0.0) || !(gamma > 0.0) || n == 0 || l == 0)
        throw ValidationError("separation bound: parameters must be positive");
    const double delta = gamma / (2.0 * static_cast<double>(n));
    const double inner = normal_cdf(delta / sigma) - normal_cdf(-delta / sigma);
    return std::pow(inner, static_cast<double>(n) * static_cast<double>(l - 1));
}

double separation_frequency(double sigma, double gamma, std::size_t n, std::size_t l,
                            std::size_t draws, std::uint64_t seed)
{
    if (draws == 0) throw ValidationError("separation frequency: draws must be positive");
    const double delta = gamma / (2.0 * static_cast<double>(n));
    std::size_t hits = 0;
    for (std::size_t d = 0; d < draws; ++d) {
        auto rng = CounterRng::substream(seed, d);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            double lo = 0.0, hi = 0.0;
            for (std::size_t k = 0; k < l; ++k) {
                const double x = sigma * rng.normal();
                lo = k == 0 ? x : std::min(lo, x);
                hi = k == 0 ? x : std::max(hi, x);
            }
            ok = ok && hi - lo < delta;
        }
        hits += ok ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace srcrt
