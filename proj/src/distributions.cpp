#include "aoi/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace aoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(std::string_view text, std::string_view what)
{
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ValidationError("malformed number '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

TransmissionModel TransmissionModel::deterministic(double value)
{
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ValidationError("deterministic service time must be a finite value >= 0");
    }
    TransmissionModel m;
    m.family_ = Family::deterministic;
    m.param_ = value;
    return m;
}

TransmissionModel TransmissionModel::poisson(double rate)
{
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ValidationError("poisson rate must be finite and > 0");
    }
    TransmissionModel m;
    m.family_ = Family::poisson;
    m.param_ = rate;
    return m;
}

TransmissionModel TransmissionModel::exponential(double rate)
{
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ValidationError("exponential rate must be finite and > 0");
    }
    TransmissionModel m;
    m.family_ = Family::exponential;
    m.param_ = rate;
    return m;
}

TransmissionModel TransmissionModel::geometric(double p)
{
    if (!(p > 0.0 && p <= 1.0)) {
        throw ValidationError("geometric success probability must lie in (0, 1]");
    }
    TransmissionModel m;
    m.family_ = Family::geometric;
    m.param_ = p;
    return m;
}

TransmissionModel TransmissionModel::discrete(std::vector<Atom> atoms)
{
    if (atoms.empty()) {
        throw ValidationError("discrete distribution needs at least one (value, prob) pair");
    }
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.value >= 0.0) || !std::isfinite(a.value)) {
            throw ValidationError("discrete support values must be finite and >= 0");
        }
        if (!(a.prob >= 0.0 && a.prob <= 1.0)) {
            throw ValidationError("discrete probabilities must lie in [0, 1]");
        }
        total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "discrete probabilities sum to " << total
            << (total > 1.0 ? " (exceed 1)" : " (below 1)") << ", expected 1";
        throw ValidationError(msg.str());
    }
    std::erase_if(atoms, [](const Atom& a) { return a.prob == 0.0; });
    TransmissionModel m;
    m.family_ = Family::discrete_finite;
    m.atoms_ = std::move(atoms);
    return m;
}

TransmissionModel TransmissionModel::parse(std::string_view spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw ValidationError("distribution spec '" + std::string(spec) +
                              "' must look like det:<v>, poisson:<l>, exp:<mu>, geom:<p> or disc:<v>:<p>,...");
    }
    const auto name = spec.substr(0, colon);
    const auto args = spec.substr(colon + 1);
    if (name == "det") {
        return deterministic(parse_number(args, "det value"));
    }
    if (name == "poisson") {
        return poisson(parse_number(args, "poisson rate"));
    }
    if (name == "exp") {
        return exponential(parse_number(args, "exponential rate"));
    }
    if (name == "geom") {
        return geometric(parse_number(args, "geometric probability"));
    }
    if (name == "disc") {
        std::vector<Atom> atoms;
        for (auto pair : split(args, ',')) {
            const auto fields = split(pair, ':');
            if (fields.size() != 2) {
                throw ValidationError("discrete atom '" + std::string(pair) + "' must be <value>:<prob>");
            }
            atoms.push_back({parse_number(fields[0], "discrete value"), parse_number(fields[1], "discrete probability")});
        }
        return discrete(std::move(atoms));
    }
    throw ValidationError("unknown distribution family '" + std::string(name) + "'");
}

std::string TransmissionModel::to_string() const
{
    switch (family_) {
    case Family::deterministic:
        return "det:" + format_number(param_);
    case Family::poisson:
        return "poisson:" + format_number(param_);
    case Family::exponential:
        return "exp:" + format_number(param_);
    case Family::geometric:
        return "geom:" + format_number(param_);
    case Family::discrete_finite: {
        std::string out = "disc:";
        for (std::size_t j = 0; j < atoms_.size(); ++j) {
            if (j > 0) {
                out += ',';
            }
            out += format_number(atoms_[j].value) + ":" + format_number(atoms_[j].prob);
        }
        return out;
    }
    }
    return {};
}

double TransmissionModel::sample(Rng& rng) const
{
    double v = 0.0;
    sample_into(rng, std::span<double>(&v, 1));
    return v;
}

void TransmissionModel::sample_into(Rng& rng, std::span<double> out) const
{
    switch (family_) {
    case Family::deterministic:
        std::fill(out.begin(), out.end(), param_);
        return;
    case Family::poisson: {
        std::poisson_distribution<long long> dist(param_);
        for (auto& v : out) {
            v = static_cast<double>(dist(rng));
        }
        return;
    }
    case Family::exponential: {
        std::exponential_distribution<double> dist(param_);
        for (auto& v : out) {
            v = dist(rng);
        }
        return;
    }
    case Family::geometric: {
        if (param_ == 1.0) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        std::geometric_distribution<long long> dist(param_);
        for (auto& v : out) {
            v = static_cast<double>(dist(rng));
        }
        return;
    }
    case Family::discrete_finite: {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (auto& v : out) {
            const double u = unif(rng);
            double cdf = 0.0;
            v = atoms_.back().value;
            for (const auto& a : atoms_) {
                cdf += a.prob;
                if (u < cdf) {
                    v = a.value;
                    break;
                }
            }
        }
        return;
    }
    }
}

ThetaDomain TransmissionModel::mgf_domain() const
{
    switch (family_) {
    case Family::exponential:
        return {param_};
    case Family::geometric:
        return {param_ == 1.0 ? kInf : -std::log1p(-param_)};
    default:
        return {kInf};
    }
}

double TransmissionModel::log_mgf(double theta) const
{
    if (!mgf_domain().contains(theta)) {
        std::ostringstream msg;
        msg << "log-MGF of " << to_string() << " is infinite at theta=" << theta
            << " (domain limit " << mgf_domain().upper_limit << ")";
        throw std::domain_error(msg.str());
    }
    if (theta == 0.0) {
        return 0.0;
    }
    switch (family_) {
    case Family::deterministic:
        return theta * param_;
    case Family::poisson:
        return param_ * std::expm1(theta);
    case Family::exponential:
        return -std::log1p(-theta / param_);
    case Family::geometric:
        if (param_ == 1.0) {
            return 0.0;
        }
        return std::log(param_) - std::log1p(-(1.0 - param_) * std::exp(theta));
    case Family::discrete_finite: {
        // log-sum-exp over the atoms
        double peak = -kInf;
        for (const auto& a : atoms_) {
            peak = std::max(peak, std::log(a.prob) + theta * a.value);
        }
        double acc = 0.0;
        for (const auto& a : atoms_) {
            acc += std::exp(std::log(a.prob) + theta * a.value - peak);
        }
        return peak + std::log(acc);
    }
    }
    return 0.0;
}

double TransmissionModel::mean() const
{
    switch (family_) {
    case Family::deterministic:
        return param_;
    case Family::poisson:
        return param_;
    case Family::exponential:
        return 1.0 / param_;
    case Family::geometric:
        return (1.0 - param_) / param_;
    case Family::discrete_finite: {
        double m = 0.0;
        for (const auto& a : atoms_) {
            m += a.prob * a.value;
        }
        return m;
    }
    }
    return 0.0;
}

double TransmissionModel::variance() const
{
    switch (family_) {
    case Family::deterministic:
        return 0.0;
    case Family::poisson:
        return param_;
    case Family::exponential:
        return 1.0 / (param_ * param_);
    case Family::geometric:
        return (1.0 - param_) / (param_ * param_);
    case Family::discrete_finite: {
        const double m = mean();
        double var = 0.0;
        for (const auto& a : atoms_) {
            var += a.prob * (a.value - m) * (a.value - m);
        }
        return var;
    }
    }
    return 0.0;
}

std::optional<double> TransmissionModel::support_max() const
{
    switch (family_) {
    case Family::deterministic:
        return param_;
    case Family::geometric:
        if (param_ == 1.0) {
            return 0.0;
        }
        return std::nullopt;
    case Family::discrete_finite: {
        double top = 0.0;
        for (const auto& a : atoms_) {
            top = std::max(top, a.value);
        }
        return top;
    }
    default:
        return std::nullopt;
    }
}

double TransmissionModel::support_max_prob() const
{
    if (family_ != Family::discrete_finite) {
        return 1.0;
    }
    const double top = *support_max();
    double mass = 0.0;
    for (const auto& a : atoms_) {
        if (a.value == top) {
            mass += a.prob;
        }
    }
    return mass;
}

}  // namespace aoi
