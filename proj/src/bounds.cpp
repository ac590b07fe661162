#include "aoi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace aoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;
constexpr double kThetaTol = 1e-9;
constexpr double kRootTol = 1e-12;

struct Maximum
{
    double theta;
    double value;
};

// Golden-section search for the maximum of a concave f on (lo, hi); the
// returned point is the best probe, so it never leaves the open interval.
template <class F>
Maximum golden_max(F f, double lo, double hi, double tol = kThetaTol)
{
    double a = lo;
    double b = hi;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = f(c);
    double fd = f(d);
    Maximum best = fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
    for (int iter = 0; iter < 400 && (b - a) > tol; ++iter) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
            if (fc > best.value) {
                best = {c, fc};
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
            if (fd > best.value) {
                best = {d, fd};
            }
        }
    }
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm >= best.value) {
        best = {mid, fm};
    }
    return best;
}

double log_sum_exp(const std::vector<double>& logs)
{
    double peak = -kInf;
    for (double v : logs) {
        peak = std::max(peak, v);
    }
    if (peak == -kInf) {
        return -kInf;
    }
    double acc = 0.0;
    for (double v : logs) {
        acc += std::exp(v - peak);
    }
    return peak + std::log(acc);
}

}  // namespace

std::string to_string(BoundKind kind)
{
    switch (kind) {
    case BoundKind::fcfs_upper_series:
        return "fcfs-upper-series";
    case BoundKind::fcfs_lower:
        return "fcfs-lower";
    case BoundKind::sp_upper:
        return "sp-upper";
    }
    return {};
}

double BoundValue::probability() const
{
    return std::exp(std::min(0.0, log_value));
}

double stability_root(const TransmissionModel& model, double b)
{
    if (!(model.mean() < b)) {
        throw UnstableSystemError("stability region is empty: E[V] >= b");
    }
    if (const auto top = model.support_max(); top && *top <= b) {
        return kInf;  // Lambda(theta) <= theta * max V < theta * b for all theta > 0
    }
    const double limit = model.mgf_domain().upper_limit;
    auto gap = [&](double theta) { return model.log_mgf(theta) - theta * b; };

    double lo = 0.0;
    double hi = std::isfinite(limit) ? std::min(1.0, 0.5 * limit) : 1.0;
    while (true) {
        if (hi >= limit) {
            hi = limit;  // Lambda diverges at the domain edge
            break;
        }
        if (gap(hi) >= 0.0) {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) {
            return kInf;
        }
    }
    for (int iter = 0; iter < 300 && hi - lo > kRootTol * std::max(1.0, lo); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid >= limit || gap(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return lo;
}

RateResult legendre_sup(double x_arg, double coeff, const TransmissionModel& model, RateConstraint constraint)
{
    if (!(coeff > 0.0)) {
        throw std::invalid_argument("legendre_sup: coefficient must be > 0");
    }
    RateResult result;
    double upper = model.mgf_domain().upper_limit;
    if (constraint.b) {
        if (!(model.mean() < *constraint.b)) {
            std::ostringstream msg;
            msg << "no theta > 0 with Lambda(theta) < theta*b: E[V] = " << model.mean() << " >= b = " << *constraint.b;
            result.feasible = false;
            result.diagnostic = msg.str();
            return result;
        }
        upper = std::min(upper, stability_root(model, *constraint.b));
    }

    // Concave objective with zero value and slope x_arg - coeff*E[V] at 0+.
    if (x_arg <= coeff * model.mean()) {
        return result;
    }
    auto objective = [&](double theta) { return theta * x_arg - coeff * model.log_mgf(theta); };

    if (!std::isfinite(upper)) {
        if (const auto top = model.support_max()) {
            // Lambda(theta) = theta*top + log P(V = top) + o(1) as theta -> infinity.
            const double edge = coeff * *top;
            if (std::abs(x_arg - edge) <= 1e-12 * std::max(1.0, edge)) {
                result.value = -coeff * std::log(model.support_max_prob());
                return result;
            }
            if (x_arg > edge) {
                result.value = kInf;
                result.diagnostic = "objective grows linearly without bound";
                return result;
            }
        }
        double h = 1.0;
        while (objective(2.0 * h) > objective(h)) {
            h *= 2.0;
            if (h > 1e300) {
                result.value = kInf;
                result.diagnostic = "no finite maximizer found";
                return result;
            }
        }
        upper = 2.0 * h;
    }

    const Maximum best = golden_max(objective, 0.0, upper);
    if (best.value > 0.0) {
        result.value = best.value;
        result.theta_star = best.theta;
    }
    return result;
}

void RateQuery::validate() const
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError("threshold scale x must be finite and > 0");
    }
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw ValidationError("b must be finite and > 0");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha = i/n must lie in (0, 1]");
    }
}

RateResult fcfs_term(const RateQuery& query, int r)
{
    if (r < 1) {
        throw std::invalid_argument("fcfs_term: r must be >= 1");
    }
    const double rr = static_cast<double>(r);
    const double arg = query.x / rr + (rr - 2.0) * query.b / rr;
    const double coeff = (rr + 1.0 - query.alpha) / rr;
    RateResult term = legendre_sup(arg, coeff, query.model, RateConstraint::below_theta_b(query.b));
    term.value *= rr;
    term.r_star = r;
    return term;
}

RateResult fcfs_rate(const RateQuery& query, int r_max)
{
    query.validate();
    if (r_max < 1) {
        throw std::invalid_argument("fcfs_rate: r_max must be >= 1");
    }
    RateResult best = fcfs_term(query, 1);
    if (!best.feasible) {
        return best;
    }
    int stale = 0;
    for (int r = 2; r <= r_max && stale < 10; ++r) {
        RateResult term = fcfs_term(query, r);
        if (term.value < best.value) {
            best = std::move(term);
            stale = 0;
        } else {
            ++stale;
        }
    }
    return best;
}

BoundValue fcfs_upper_bound_series(int n, const RateQuery& query, int r_max)
{
    if (n < 1) {
        throw std::invalid_argument("n must be >= 1");
    }
    const RateResult rate = fcfs_rate(query, r_max);
    if (!rate.feasible) {
        throw UnstableSystemError(rate.diagnostic);
    }
    BoundValue bound;
    bound.n = n;
    bound.kind = BoundKind::fcfs_upper_series;
    if (rate.value == kInf) {
        bound.log_value = -kInf;
        return bound;
    }

    const int horizon = std::max(*rate.r_star + 10, 20);
    std::vector<double> logs;
    for (int r = 1; r < horizon; ++r) {
        logs.push_back(-n * fcfs_term(query, r).value);
    }

    // Terms r >= horizon, bounded for one fixed theta in the stability region:
    //   exp(-n r c) * exp(-n (theta x - 2 theta b - (1-alpha) Lambda)),  c = theta b - Lambda > 0,
    // summed as a geometric series.
    const TransmissionModel& model = query.model;
    const double nn = n;
    auto log_tail = [&](double theta) {
        const double lam = model.log_mgf(theta);
        const double c = theta * query.b - lam;
        if (!(c > 0.0)) {
            return kInf;
        }
        const double head = theta * query.x - 2.0 * theta * query.b - (1.0 - query.alpha) * lam;
        return -nn * horizon * c - nn * head - std::log(-std::expm1(-nn * c));
    };
    double theta_hi = stability_root(model, query.b);
    if (!std::isfinite(theta_hi)) {
        theta_hi = 64.0;
    }
    // Any admissible theta gives a valid tail bound; grid then refine for tightness.
    constexpr int kGrid = 400;
    double best_theta = theta_hi * 0.5;
    double best_val = log_tail(best_theta);
    for (int j = 1; j < kGrid; ++j) {
        const double theta = theta_hi * j / kGrid;
        const double v = log_tail(theta);
        if (v < best_val) {
            best_val = v;
            best_theta = theta;
        }
    }
    const double step = theta_hi / kGrid;
    const Maximum refined = golden_max([&](double t) { return -log_tail(t); }, std::max(0.0, best_theta - step),
                                       std::min(theta_hi, best_theta + step), 1e-12);
    logs.push_back(std::min(best_val, -refined.value));

    bound.log_value = std::min(0.0, log_sum_exp(logs));
    return bound;
}

BoundValue fcfs_lower_bound(int n, const RateQuery& query, int r, double epsilon)
{
    query.validate();
    if (n < 1 || r < 1 || !(epsilon > 0.0)) {
        throw std::invalid_argument("fcfs_lower_bound needs n >= 1, r >= 1 and epsilon > 0");
    }
    const RateResult term = fcfs_term(query, r);
    if (!term.feasible) {
        throw UnstableSystemError(term.diagnostic);
    }
    BoundValue bound;
    bound.n = n;
    bound.kind = BoundKind::fcfs_lower;
    bound.epsilon = epsilon;
    bound.log_value = term.value == kInf ? -kInf : std::min(0.0, -n * term.value - epsilon);
    return bound;
}

RateResult sp_upper_rate(int n, double x, double b, const TransmissionModel& model)
{
    if (n < 1) {
        throw std::invalid_argument("n must be >= 1");
    }
    if (x <= b) {
        RateResult vacuous;
        vacuous.diagnostic = "x <= b: bound is vacuous";
        return vacuous;
    }
    const double coeff = (static_cast<double>(n) + 1.0) / static_cast<double>(n);
    return legendre_sup(x - b, coeff, model, RateConstraint::none());
}

BoundValue sp_upper_bound(int n, double x, double b, const TransmissionModel& model)
{
    const RateResult rate = sp_upper_rate(n, x, b, model);
    BoundValue bound;
    bound.n = n;
    bound.kind = BoundKind::sp_upper;
    bound.log_value = rate.value == kInf ? -kInf : std::min(0.0, -n * rate.value);
    return bound;
}

RateResult sp_asymptotic_rate(double x, double b, const TransmissionModel& model)
{
    return legendre_sup(x - b, 1.0, model, RateConstraint::none());
}

CoincidenceReport rates_coincide_check(const RateQuery& query, double tolerance)
{
    CoincidenceReport report;
    report.fcfs = fcfs_rate(query);
    report.single_packet = sp_asymptotic_rate(query.x, query.b, query.model);
    report.r_star = report.fcfs.r_star.value_or(0);
    const double a = report.fcfs.value;
    const double s = report.single_packet.value;
    if (a == kInf && s == kInf) {
        report.difference = 0.0;
        report.equal = true;
    } else {
        report.difference = a - s;
        report.equal = report.fcfs.feasible && std::abs(a - s) <= tolerance;
    }
    return report;
}

}  // namespace aoi
