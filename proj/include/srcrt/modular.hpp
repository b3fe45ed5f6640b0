#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srcrt/types.hpp"

namespace srcrt {

/// Moduli of the form m_l = gamma * M_l with pairwise co-prime integer factors M_l,
/// plus the per-modulus noise model (sigma_l) and weights w_l.
///
/// Validated once at construction: gamma finite and positive, every M_l >= 1,
/// pairwise co-prime, and prod(M_l) representable in 128 bits. Immutable afterwards.
class ModulusSet {
public:
    /// Weights derived as w_l = 1 / (2 sigma_l^2).
    ModulusSet(double gamma, std::vector<std::uint64_t> coprimes, std::vector<double> sigmas);

    /// Same noise level on every modulus.
    static ModulusSet uniform(double gamma, std::vector<std::uint64_t> coprimes, double sigma);

    /// Explicit weights; sigmas are back-filled as sqrt(1 / (2 w_l)).
    static ModulusSet with_weights(double gamma, std::vector<std::uint64_t> coprimes,
                                   std::vector<double> weights);

    double gamma() const { return gamma_; }
    std::size_t size() const { return coprimes_.size(); }
    const std::vector<std::uint64_t>& coprimes() const { return coprimes_; }
    const std::vector<double>& sigmas() const { return sigmas_; }
    const std::vector<double>& weights() const { return weights_; }

    /// m_l = gamma * M_l.
    double modulus(std::size_t l) const { return gamma_ * static_cast<double>(coprimes_[l]); }
    /// prod(M_l): number of distinct quotients.
    Quotient quotient_range() const { return quotient_range_; }
    /// D = gamma * prod(M_l).
    double dynamic_range() const;

    /// Restriction to a subset of moduli (indices into this set).
    ModulusSet subset(std::span<const std::size_t> indices) const;

private:
    ModulusSet(double gamma, std::vector<std::uint64_t> coprimes, std::vector<double> sigmas,
               std::vector<double> weights);
    void validate();

    double gamma_;
    std::vector<std::uint64_t> coprimes_;
    std::vector<double> sigmas_;
    std::vector<double> weights_;
    Quotient quotient_range_ = 1;
};

/// Unique x in [0, prod(moduli)) with x = residues[l] (mod moduli[l]).
/// Incremental (Garner-style) combination in 128-bit arithmetic.
/// Throws ValidationError on empty input, zero moduli, residues out of range,
/// non-co-prime moduli, or a product that does not fit in 128 bits.
Quotient crt_reconstruct(std::span<const std::uint64_t> residues,
                         std::span<const std::uint64_t> moduli);

/// Non-negative remainder of x modulo m (m > 0), always in [0, m).
double wrap(double x, double m);

/// Common residue of a raw observation: R mod gamma, in [0, gamma).
inline double project_common(double r, double gamma) { return wrap(r, gamma); }

/// d_gamma(a, b) = min_j |a - b + j*gamma|, in [0, gamma/2].
double wrapped_distance(double a, double b, double gamma);

/// Non-negative residue of a signed integer modulo m.
std::uint64_t mod_floor(std::int64_t value, std::uint64_t m);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

}  // namespace srcrt
