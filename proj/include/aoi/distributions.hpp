// distributions.hpp - transmission-time models for the round-robin update system.
//
// Every model exposes exact sampling, closed-form moments and the closed-form
// log-moment generating function Lambda(theta) = log E[exp(theta V)] together
// with the open domain (-inf, upper_limit) on which it is finite.

#ifndef AOI_DISTRIBUTIONS_HPP
#define AOI_DISTRIBUTIONS_HPP

#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoi {

using Rng = std::mt19937_64;

// Thrown for malformed or out-of-range user input (model specs, configs).
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ThetaDomain
{
    double upper_limit;  // +inf when the MGF is entire

    bool contains(double theta) const { return theta < upper_limit; }
};

enum class Family { deterministic, poisson, exponential, geometric, discrete_finite };

class TransmissionModel
{
public:
    struct Atom
    {
        double value;
        double prob;
    };

    static TransmissionModel deterministic(double value);
    static TransmissionModel poisson(double rate);
    static TransmissionModel exponential(double rate);
    // Failures before the first success: P(V = k) = p (1-p)^k, k = 0, 1, ...
    static TransmissionModel geometric(double p);
    static TransmissionModel discrete(std::vector<Atom> atoms);

    // Parses `det:<v>`, `poisson:<l>`, `exp:<mu>`, `geom:<p>`, `disc:<v1>:<p1>,<v2>:<p2>,...`.
    static TransmissionModel parse(std::string_view spec);

    Family family() const { return family_; }
    std::string to_string() const;

    double sample(Rng& rng) const;
    // Fills `out` with i.i.d. draws, building the sampler once.
    void sample_into(Rng& rng, std::span<double> out) const;

    // Throws std::domain_error when theta is outside mgf_domain().
    double log_mgf(double theta) const;
    ThetaDomain mgf_domain() const;

    double mean() const;
    double variance() const;

    // Largest support point for bounded-support models (deterministic,
    // discrete, geometric with p = 1); empty otherwise.
    std::optional<double> support_max() const;
    // P(V = support_max()); only meaningful when support_max() is set.
    double support_max_prob() const;

private:
    TransmissionModel() = default;

    Family family_ = Family::deterministic;
    double param_ = 0.0;
    std::vector<Atom> atoms_;
};

}  // namespace aoi

#endif
