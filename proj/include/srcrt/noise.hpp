#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "srcrt/modular.hpp"
#include "srcrt/types.hpp"

namespace srcrt {

/// Noise variance for a signal-to-noise ratio in dB: sigma^2 = 10^(-snr/10).
/// +inf maps to zero noise.
double sigma_from_snr(double snr_db);

/// One random problem instance. The noise level comes from snr_db and is the
/// same on every modulus; ms supplies the moduli and the decoder weights.
struct InstanceSpec {
    std::size_t n = 1;
    ModulusSet ms;
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    /// Numbers are drawn from [0, range); zero means the full dynamic range.
    double range = 0.0;

    double noise_sigma() const { return sigma_from_snr(snr_db); }
    double effective_range() const { return range > 0.0 ? range : ms.dynamic_range(); }

    /// Moduli gamma * M_l with weights matching the SNR (unit weights when noiseless).
    static InstanceSpec from_snr(std::size_t n, double gamma, std::vector<std::uint64_t> coprimes,
                                 double snr_db, std::uint64_t seed, double range = 0.0);
};

struct GroundTruth {
    std::vector<double> ys;   ///< true numbers
    ResidueMatrix noises;     ///< noises(i, l) = Delta_il for estimand i
    Clustering true_perms;    ///< observation row of estimand i in column l
};

struct Instance {
    GroundTruth truth;
    ObservationMatrix observations;
};

/// Y_i uniform on [0, range), Delta_il ~ N(0, sigma^2), R = (Y_i + Delta_il) mod m_l,
/// each column shuffled by an independent uniform permutation. Deterministic in seed.
Instance sample_instance(const InstanceSpec& spec);

/// Whether a cutting point exists: every noise interval
/// [mu_i + min_l Delta_il, mu_i + max_l Delta_il] is shorter than gamma/2 and
/// together they leave some point of the circle uncovered.
bool assumption1_holds(const GroundTruth& truth, double gamma);

/// Standard normal CDF.
double normal_cdf(double x);

/// Probability that every estimand's noise spread max_l Delta - min_l Delta
/// stays below delta = gamma / (2n) with L i.i.d. N(0, sigma^2) noises:
///     ( L * int p(x) (Phi(x + delta) - Phi(x))^(L-1) dx )^n.
/// Integrated by adaptive Gauss-Kronrod over [-8 sigma, 8 sigma].
double separation_probability(double sigma, double gamma, std::size_t n, std::size_t l);

/// Upper bound (Phi(delta) - Phi(-delta))^(n (L - 1)) with Phi the N(0, sigma^2) CDF.
double separation_bound(double sigma, double gamma, std::size_t n, std::size_t l);

/// Monte Carlo frequency of the same event over `draws` independent draws of
/// n x l noises. Deterministic in seed.
double separation_frequency(double sigma, double gamma, std::size_t n, std::size_t l,
                            std::size_t draws, std::uint64_t seed);

}  // namespace srcrt
