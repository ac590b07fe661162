// bounds.hpp - Chernoff-type rate functions and outage bounds for the
// round-robin system with FCFS and single-packet queues.
//
// Every rate here is a Legendre-type supremum
//     sup_{0 < theta < theta_max} [ theta * a - c * Lambda(theta) ]
// of the service-time log-MGF Lambda, optionally restricted to the stability
// region Lambda(theta) < theta * b.

#ifndef AOI_BOUNDS_HPP
#define AOI_BOUNDS_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "aoi/distributions.hpp"

namespace aoi {

// FCFS bounds need E[V] < b; otherwise the stability region is empty.
class UnstableSystemError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

struct RateConstraint
{
    std::optional<double> b;  // restrict to Lambda(theta) - theta*b < 0 when set

    static RateConstraint none() { return {}; }
    static RateConstraint below_theta_b(double b) { return {b}; }
};

struct RateResult
{
    double value = 0.0;                // >= 0, +inf when unbounded
    std::optional<double> theta_star;  // empty when the sup is approached at 0+ or at infinity
    bool feasible = true;
    std::optional<int> r_star;
    std::string diagnostic;
};

enum class BoundKind { fcfs_upper_series, fcfs_lower, sp_upper };

std::string to_string(BoundKind kind);

struct BoundValue
{
    double log_value = 0.0;  // natural log of the probability bound, <= 0
    int n = 1;
    BoundKind kind = BoundKind::fcfs_upper_series;
    double epsilon = 0.0;

    double probability() const;
};

// sup over theta in (0, theta_max) of theta*x_arg - coeff*Lambda(theta), where
// theta_max is the smaller of the MGF domain limit and, when constrained, the
// positive root of Lambda(theta) = theta*b. Golden-section (ternary) search to
// 1e-9 in theta; the root is bracketed by doubling and bisected to 1e-12.
// An empty constraint set returns feasible = false and value 0.
RateResult legendre_sup(double x_arg, double coeff, const TransmissionModel& model, RateConstraint constraint);

// Largest theta found with Lambda(theta) - theta*b < 0 below the positive root
// (+inf when no root exists). Requires mean < b.
double stability_root(const TransmissionModel& model, double b);

struct RateQuery
{
    double x = 1.0;      // threshold scale; the age threshold is n*x
    double b = 1.0;
    double alpha = 1.0;  // i/n
    TransmissionModel model = TransmissionModel::deterministic(0.0);

    // Throws ValidationError.
    void validate() const;
};

// r * I(x/r + (r-2)b/r) with coefficient (r+1-alpha)/r, under the stability constraint.
RateResult fcfs_term(const RateQuery& query, int r);

// min over r in [1, r_max] of fcfs_term, stopping after 10 consecutive
// non-improving r.
RateResult fcfs_rate(const RateQuery& query, int r_max = 1000);

// Finite-n union bound: explicit terms r < R plus a geometric tail from R on,
// R = max(r_star + 10, 20). Throws UnstableSystemError when E[V] >= b.
BoundValue fcfs_upper_bound_series(int n, const RateQuery& query, int r_max = 1000);

// -n * fcfs_term(r) - epsilon; an asymptotic (large-n) statement only.
BoundValue fcfs_lower_bound(int n, const RateQuery& query, int r, double epsilon);

// I^U(x - b) = sup_{theta>0} [theta (x-b) - (n+1)/n Lambda(theta)]; 0 when x <= b.
RateResult sp_upper_rate(int n, double x, double b, const TransmissionModel& model);
// exp(-n * sp_upper_rate), valid for every finite n.
BoundValue sp_upper_bound(int n, double x, double b, const TransmissionModel& model);
// sup_{theta>0} [theta (x-b) - Lambda(theta)], the n -> infinity limit of sp_upper_rate.
RateResult sp_asymptotic_rate(double x, double b, const TransmissionModel& model);

struct CoincidenceReport
{
    RateResult fcfs;
    RateResult single_packet;
    int r_star = 0;
    bool equal = false;
    double difference = 0.0;  // fcfs - single_packet (0 when both infinite)
};

CoincidenceReport rates_coincide_check(const RateQuery& query, double tolerance = 1e-9);

}  // namespace aoi

#endif
