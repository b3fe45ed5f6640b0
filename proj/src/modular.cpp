#include "srcrt/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace srcrt {

namespace {

constexpr Quotient kQuotientMax = ~Quotient{0};

bool mul_overflows(Quotient a, Quotient b)
{
    return a != 0 && b > kQuotientMax / a;
}

// Inverse of a modulo m via extended Euclid; requires gcd(a, m) == 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m)
{
    __int128 t = 0, new_t = 1;
    __int128 r = m, new_r = a % m;
    while (new_r != 0) {
        const __int128 q = r / new_r;
        __int128 tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw ValidationError("moduli are not pairwise co-prime");
    if (t < 0) t += m;
    return static_cast<std::uint64_t>(t);
}

}  // namespace

std::uint64_t gcd(std::uint64_t a, std::uint64_t b)
{
    return std::gcd(a, b);
}

std::uint64_t mod_floor(std::int64_t value, std::uint64_t m)
{
    const auto sm = static_cast<__int128>(m);
    __int128 r = static_cast<__int128>(value) % sm;
    if (r < 0) r += sm;
    return static_cast<std::uint64_t>(r);
}

Quotient crt_reconstruct(std::span<const std::uint64_t> residues,
                         std::span<const std::uint64_t> moduli)
{
    if (residues.empty() || moduli.empty()) throw ValidationError("crt: empty input");
    if (residues.size() != moduli.size())
        throw ValidationError("crt: residue and modulus counts differ");

    Quotient x = 0;
    Quotient product = 1;
    for (std::size_t l = 0; l < moduli.size(); ++l) {
        const std::uint64_t m = moduli[l];
        if (m == 0) throw ValidationError("crt: zero modulus");
        if (residues[l] >= m)
            throw ValidationError("crt: residue " + std::to_string(residues[l]) +
                                  " not below modulus " + std::to_string(m));
        if (mul_overflows(product, m)) throw ValidationError("crt: modulus product exceeds 128 bits");
        if (m == 1) continue;

        // x + product * t = residues[l] (mod m)
        const auto x_mod = static_cast<std::uint64_t>(x % m);
        const auto p_mod = static_cast<std::uint64_t>(product % m);
        const std::uint64_t inv = inverse_mod(p_mod, m);
        const std::uint64_t diff = (residues[l] + m - x_mod) % m;
        const auto t = static_cast<std::uint64_t>((static_cast<Quotient>(diff) * inv) % m);
        x += product * t;
        product *= m;
    }
    return x;
}

double wrap(double x, double m)
{
    double r = std::fmod(x, m);
    if (r < 0.0) r += m;
    // fmod is exact; the addition above can round up to m itself
    if (r >= m) r = 0.0;
    return r;
}

double wrapped_distance(double a, double b, double gamma)
{
    const double d = wrap(a - b, gamma);
    return std::min(d, gamma - d);
}

ModulusSet::ModulusSet(double gamma, std::vector<std::uint64_t> coprimes,
                       std::vector<double> sigmas)
    : gamma_(gamma), coprimes_(std::move(coprimes)), sigmas_(std::move(sigmas))
{
    if (sigmas_.size() != coprimes_.size())
        throw ValidationError("modulus set: expected one sigma per modulus");
    weights_.reserve(sigmas_.size());
    for (double s : sigmas_) {
        if (!(s > 0.0) || !std::isfinite(s))
            throw ValidationError("modulus set: sigma must be positive and finite");
        weights_.push_back(1.0 / (2.0 * s * s));
    }
    validate();
}

ModulusSet::ModulusSet(double gamma, std::vector<std::uint64_t> coprimes,
                       std::vector<double> sigmas, std::vector<double> weights)
    : gamma_(gamma),
      coprimes_(std::move(coprimes)),
      sigmas_(std::move(sigmas)),
      weights_(std::move(weights))
{
    validate();
}

ModulusSet ModulusSet::uniform(double gamma, std::vector<std::uint64_t> coprimes, double sigma)
{
    std::vector<double> sigmas(coprimes.size(), sigma);
    return {gamma, std::move(coprimes), std::move(sigmas)};
}

ModulusSet ModulusSet::with_weights(double gamma, std::vector<std::uint64_t> coprimes,
                                    std::vector<double> weights)
{
    if (weights.size() != coprimes.size())
        throw ValidationError("modulus set: expected one weight per modulus");
    std::vector<double> sigmas;
    sigmas.reserve(weights.size());
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw ValidationError("modulus set: weight must be positive and finite");
        sigmas.push_back(std::sqrt(1.0 / (2.0 * w)));
    }
    return {gamma, std::move(coprimes), std::move(sigmas), std::move(weights)};
}

void ModulusSet::validate()
{
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
        throw ValidationError("modulus set: gamma must be positive and finite");
    if (coprimes_.empty()) throw ValidationError("modulus set: no moduli");
    if (weights_.size() != coprimes_.size() || sigmas_.size() != coprimes_.size())
        throw ValidationError("modulus set: per-modulus vectors have mismatched lengths");

    quotient_range_ = 1;
    for (std::size_t a = 0; a < coprimes_.size(); ++a) {
        if (coprimes_[a] == 0) throw ValidationError("modulus set: M_l must be >= 1");
        for (std::size_t b = 0; b < a; ++b)
            if (std::gcd(coprimes_[a], coprimes_[b]) != 1)
                throw ValidationError("modulus set: M_" + std::to_string(b) + "=" +
                                      std::to_string(coprimes_[b]) + " and M_" +
                                      std::to_string(a) + "=" + std::to_string(coprimes_[a]) +
                                      " are not co-prime");
        if (mul_overflows(quotient_range_, coprimes_[a]))
            throw ValidationError("modulus set: product of M_l exceeds 128 bits");
        quotient_range_ *= coprimes_[a];
    }
}

double ModulusSet::dynamic_range() const
{
    return gamma_ * static_cast<double>(quotient_range_);
}

ModulusSet ModulusSet::subset(std::span<const std::size_t> indices) const
{
    std::vector<std::uint64_t> m;
    std::vector<double> s, w;
    for (std::size_t idx : indices) {
        if (idx >= coprimes_.size()) throw ValidationError("modulus subset index out of range");
        m.push_back(coprimes_[idx]);
        s.push_back(sigmas_[idx]);
        w.push_back(weights_[idx]);
    }
    return {gamma_, std::move(m), std::move(s), std::move(w)};
}

}  // namespace srcrt
