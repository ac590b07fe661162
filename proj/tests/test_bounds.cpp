#include <cmath>
#include <vector>

#include "aoi/bounds.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aoi;

namespace {

const TransmissionModel kPoisson3 = TransmissionModel::poisson(3);

RateQuery query(double x, double b, double alpha, const TransmissionModel& m)
{
    return RateQuery{x, b, alpha, m};
}

}  // namespace

TEST_CASE("legendre: poisson closed form")
{
    const RateResult r = legendre_sup(5, 1, kPoisson3, RateConstraint::none());
    CHECK(r.feasible);
    CHECK(r.value == doctest::Approx(oracle::poisson_legendre(5, 1, 3)).epsilon(1e-10));
    CHECK(r.value == doctest::Approx(5 * std::log(5.0 / 3.0) - 2).epsilon(1e-10));
    REQUIRE(r.theta_star);
    CHECK(*r.theta_star == doctest::Approx(std::log(5.0 / 3.0)).epsilon(1e-6));
    // quoted to five digits as 0.55430; the exact value is 0.554128...
    CHECK(std::abs(r.value - 0.55430) < 2e-4);
}

TEST_CASE("legendre: zero at the scaled mean")
{
    for (const auto& m : {kPoisson3, TransmissionModel::exponential(0.5), TransmissionModel::geometric(0.4),
                          TransmissionModel::deterministic(2), TransmissionModel::discrete({{1, 0.5}, {3, 0.5}})}) {
        for (double c : {0.5, 1.0, 1.7}) {
            const RateResult r = legendre_sup(c * m.mean(), c, m, RateConstraint::none());
            CHECK(r.value == 0.0);
            CHECK_FALSE(r.theta_star);
        }
    }
}

TEST_CASE("legendre: linear objective diverges")
{
    const RateResult r = legendre_sup(9, 1, TransmissionModel::deterministic(1), RateConstraint::none());
    CHECK(std::isinf(r.value));
    CHECK_FALSE(r.theta_star);
}

TEST_CASE("legendre: bounded support edge")
{
    const auto d = TransmissionModel::discrete({{1, 0.25}, {3, 0.75}});
    const RateResult at_edge = legendre_sup(3, 1, d, RateConstraint::none());
    CHECK(at_edge.value == doctest::Approx(-std::log(0.75)).epsilon(1e-9));
    CHECK(std::isinf(legendre_sup(3.1, 1, d, RateConstraint::none()).value));
    const RateResult inside = legendre_sup(2.5, 1, d, RateConstraint::none());
    CHECK(inside.value == doctest::Approx(oracle::legendre(2.5, 1, d).value).epsilon(1e-7));
}

TEST_CASE("legendre: infeasible constraint")
{
    const RateResult r = legendre_sup(5, 1, kPoisson3, RateConstraint::below_theta_b(3));
    CHECK_FALSE(r.feasible);
    CHECK(r.value == 0.0);
    CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("legendre matches the grid oracle")
{
    Rng rng(31);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<TransmissionModel> models{kPoisson3, TransmissionModel::exponential(0.8),
                                                TransmissionModel::geometric(0.35),
                                                TransmissionModel::discrete({{0, 0.3}, {2, 0.4}, {5, 0.3}})};
    for (const auto& m : models) {
        for (int q = 0; q < 15; ++q) {
            const double c = 0.5 + 1.5 * u(rng);
            double a = c * m.mean() * (1 + 2 * u(rng));
            if (const auto top = m.support_max()) {
                a = std::min(a, 0.95 * c * *top);
            }
            const bool constrained = q % 2 == 0;
            const double b = m.mean() * (1.1 + u(rng));
            const RateResult got =
                legendre_sup(a, c, m, constrained ? RateConstraint::below_theta_b(b) : RateConstraint::none());
            const auto want = oracle::legendre(a, c, m, constrained ? b : 0.0);
            CAPTURE(m.to_string());
            CAPTURE(a);
            CAPTURE(c);
            CHECK(std::abs(got.value - want.value) <= 1e-6);
            if (got.theta_star) {
                CHECK(m.mgf_domain().contains(*got.theta_star));
                if (constrained) {
                    CHECK(m.log_mgf(*got.theta_star) - *got.theta_star * b < 0);
                }
            }
        }
    }
}

TEST_CASE("legendre monotonicity")
{
    const auto m = TransmissionModel::geometric(0.3);
    double prev = 0;
    for (double a = 2.0; a < 12; a += 0.5) {
        const double v = legendre_sup(a, 1.2, m, RateConstraint::none()).value;
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    prev = oracle::kInf;
    for (double c = 0.3; c < 3; c += 0.1) {
        const double v = legendre_sup(8, c, m, RateConstraint::below_theta_b(4)).value;
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("stability root")
{
    const double root = stability_root(kPoisson3, 5);
    CHECK(3 * std::expm1(root) - 5 * root == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(root == doctest::Approx(oracle::stability_root(kPoisson3, 5)).epsilon(1e-9));
    CHECK(std::isinf(stability_root(TransmissionModel::deterministic(1), 5)));
    CHECK_THROWS_AS(stability_root(kPoisson3, 3), UnstableSystemError);
    // exponential root bounded by the domain limit
    const double er = stability_root(TransmissionModel::exponential(0.5), 4);
    CHECK(er < 0.5);
    CHECK(-std::log1p(-er / 0.5) - 4 * er == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fcfs rate: poisson(3), b=5, x=10")
{
    const RateResult r = fcfs_rate(query(10, 5, 1, kPoisson3));
    REQUIRE(r.r_star);
    CHECK(*r.r_star == 1);
    CHECK(r.value == doctest::Approx(5 * std::log(5.0 / 3.0) - 2).epsilon(1e-10));
    // terms grow with r
    const double root = oracle::stability_root(kPoisson3, 5);
    double prev = 0;
    for (int rr = 1; rr <= 6; ++rr) {
        const double t = fcfs_term(query(10, 5, 1, kPoisson3), rr).value;
        CHECK(t == doctest::Approx(oracle::poisson_fcfs_term(rr, 10, 5, 3, root)).epsilon(1e-9));
        CHECK(t > prev);
        prev = t;
    }
    CHECK(fcfs_term(query(10, 5, 1, kPoisson3), 2).value == doctest::Approx(1.109).epsilon(1e-3));
    CHECK(fcfs_term(query(10, 5, 1, kPoisson3), 3).value == doctest::Approx(1.663).epsilon(1e-3));
}

TEST_CASE("fcfs rate vanishes at x = b + mean")
{
    const RateResult r = fcfs_rate(query(8, 5, 1, kPoisson3));
    CHECK(r.value == 0.0);
    CHECK(*r.r_star == 1);
}

TEST_CASE("fcfs rate for a deterministic system is infinite")
{
    CHECK(std::isinf(fcfs_rate(query(10, 5, 1, TransmissionModel::deterministic(1))).value));
}

TEST_CASE("fcfs rate propagates instability")
{
    const RateResult r = fcfs_rate(query(10, 3, 1, kPoisson3));
    CHECK_FALSE(r.feasible);
    CHECK_THROWS_AS(fcfs_upper_bound_series(10, query(10, 3, 1, kPoisson3)), UnstableSystemError);
    CHECK_THROWS_AS(fcfs_lower_bound(10, query(10, 3, 1, kPoisson3), 1, 0.01), UnstableSystemError);
}

TEST_CASE("fcfs rate with the stability constraint binding")
{
    // unconstrained maximizer ln 5 lies outside the stability region
    const auto q = query(20, 5, 1, kPoisson3);
    const RateResult r = fcfs_rate(q);
    const double root = oracle::stability_root(kPoisson3, 5);
    CHECK(std::log(5.0) > root);
    CHECK(*r.r_star == 1);
    CHECK(r.value == doctest::Approx(oracle::poisson_fcfs_term(1, 20, 5, 3, root)).epsilon(1e-8));
    const RateResult sp = sp_asymptotic_rate(20, 5, kPoisson3);
    CHECK(sp.value == doctest::Approx(oracle::poisson_legendre(15, 1, 3)).epsilon(1e-9));
    const CoincidenceReport rep = rates_coincide_check(q);
    CHECK(rep.r_star == 1);
    CHECK_FALSE(rep.equal);
    CHECK(rep.difference < 0);
}

TEST_CASE("fcfs series bound against a brute-force partial sum")
{
    const auto q = query(10, 5, 1, kPoisson3);
    const BoundValue bound = fcfs_upper_bound_series(10, q);
    const double partial = oracle::poisson_fcfs_partial_sum(10, 10, 5, 3, 1'000'000);
    CHECK(bound.log_value >= partial - 1e-12);
    CHECK(bound.log_value - partial <= 1e-6);
    CHECK(bound.log_value >= -10 * fcfs_rate(q).value);
    CHECK(bound.log_value <= 0.0);
}

TEST_CASE("fcfs series bound is at least its largest term")
{
    Rng rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int j = 0; j < 20; ++j) {
        const auto m = TransmissionModel::poisson(0.5 + 3 * u(rng));
        const double b = m.mean() * (1.2 + u(rng));
        const auto q = query(b + m.mean() * (1 + 2 * u(rng)), b, 0.2 + 0.8 * u(rng), m);
        for (int n : {1, 5, 30}) {
            const BoundValue bound = fcfs_upper_bound_series(n, q);
            CHECK(bound.log_value >= std::max(-1e300, -n * fcfs_rate(q).value) - 1e-9);
            CHECK(bound.log_value <= 0.0);
        }
    }
}

TEST_CASE("fcfs series bound decays at the fcfs rate")
{
    const auto q = query(10, 5, 1, kPoisson3);
    const double rate = fcfs_rate(q).value;
    CHECK(std::abs(fcfs_upper_bound_series(200, q).log_value / 200 + rate) <= 1e-3);
    const auto q2 = query(12, 4, 0.5, TransmissionModel::geometric(0.4));
    const double rate2 = fcfs_rate(q2).value;
    CHECK(std::abs(fcfs_upper_bound_series(200, q2).log_value / 200 + rate2) <= 1e-3);
}

TEST_CASE("fcfs series bound for a deterministic system is zero probability")
{
    const BoundValue b = fcfs_upper_bound_series(10, query(10, 5, 1, TransmissionModel::deterministic(1)));
    CHECK(b.log_value == -oracle::kInf);
    CHECK(b.probability() == 0.0);
}

TEST_CASE("fcfs lower bound")
{
    const auto q = query(10, 5, 1, kPoisson3);
    const double rate = 5 * std::log(5.0 / 3.0) - 2;
    const BoundValue lb = fcfs_lower_bound(10, q, 1, 0.01);
    CHECK(lb.log_value == doctest::Approx(-10 * rate - 0.01).epsilon(1e-10));
    CHECK(lb.epsilon == 0.01);
    CHECK(lb.kind == BoundKind::fcfs_lower);
    // r_star gives the largest lower bound
    for (int r = 2; r <= 6; ++r) {
        CHECK(fcfs_lower_bound(10, q, r, 0.01).log_value < lb.log_value);
    }
    CHECK(fcfs_lower_bound(10, q, 1, 1e-12).log_value == doctest::Approx(-10 * rate).epsilon(1e-10));
    CHECK_THROWS(fcfs_lower_bound(10, q, 1, 0.0));
    CHECK_THROWS(fcfs_lower_bound(10, q, 0, 0.1));
    CHECK(fcfs_lower_bound(10, q, 1, 0.01).log_value <= fcfs_upper_bound_series(10, q).log_value);
}

TEST_CASE("single packet upper bound")
{
    const RateResult r = sp_upper_rate(10, 10, 5, kPoisson3);
    CHECK(r.value == doctest::Approx(oracle::poisson_legendre(5, 1.1, 3)).epsilon(1e-10));
    CHECK(*r.theta_star == doctest::Approx(std::log(50.0 / 33.0)).epsilon(1e-6));
    // quoted to five digits as 0.37767; the exact value is 0.377575...
    CHECK(std::abs(r.value - 0.37767) < 2e-4);
    const BoundValue b = sp_upper_bound(10, 10, 5, kPoisson3);
    CHECK(b.probability() == doctest::Approx(std::exp(-10 * r.value)).epsilon(1e-12));
    CHECK(b.probability() == doctest::Approx(0.0229).epsilon(2e-3));

    CHECK(sp_upper_bound(10, 5, 5, kPoisson3).probability() == 1.0);
    CHECK(sp_upper_bound(10, 4, 5, kPoisson3).log_value == 0.0);
    CHECK(sp_upper_bound(10, 10, 5, TransmissionModel::deterministic(1)).probability() == 0.0);
}

TEST_CASE("single packet asymptotic rate")
{
    CHECK(sp_asymptotic_rate(10, 5, kPoisson3).value == doctest::Approx(5 * std::log(5.0 / 3.0) - 2).epsilon(1e-10));
    CHECK(sp_asymptotic_rate(8, 5, kPoisson3).value == 0.0);
    const double limit = sp_asymptotic_rate(10, 5, kPoisson3).value;
    // envelope expansion: rate(n) = limit - Lambda(theta*)/n + O(1/n^2), Lambda(theta*) = 2 here
    const double gap = limit - sp_upper_rate(1'000'000, 10, 5, kPoisson3).value;
    CHECK(std::abs(gap - 2e-6) <= 1e-9);
    CHECK(limit - sp_upper_rate(10'000'000, 10, 5, kPoisson3).value <= 1e-6);
    for (int n = 1; n < 50; ++n) {
        CHECK(sp_upper_rate(n, 10, 5, kPoisson3).value < sp_upper_rate(n + 1, 10, 5, kPoisson3).value);
    }
}

TEST_CASE("rates coincide in the light-load regime")
{
    for (double lambda : {1.0, 3.0}) {
        const CoincidenceReport rep = rates_coincide_check(query(10, 5, 1, TransmissionModel::poisson(lambda)));
        CHECK(rep.equal);
        CHECK(rep.r_star == 1);
        CHECK(rep.single_packet.value ==
              doctest::Approx(oracle::legendre(5, 1, TransmissionModel::poisson(lambda)).value).epsilon(1e-7));
    }
}

TEST_CASE("rates differ for a middle source")
{
    const CoincidenceReport rep = rates_coincide_check(query(10, 5, 0.5, kPoisson3));
    CHECK_FALSE(rep.equal);
    CHECK(rep.r_star == 1);
    CHECK(rep.fcfs.value == doctest::Approx(oracle::poisson_legendre(5, 1.5, 3)).epsilon(1e-9));
}

TEST_CASE("rate query validation")
{
    CHECK_THROWS_AS(fcfs_rate(query(0, 5, 1, kPoisson3)), ValidationError);
    CHECK_THROWS_AS(fcfs_rate(query(10, -1, 1, kPoisson3)), ValidationError);
    CHECK_THROWS_AS(fcfs_rate(query(10, 5, 0, kPoisson3)), ValidationError);
    CHECK_THROWS_AS(fcfs_rate(query(10, 5, 1.5, kPoisson3)), ValidationError);
    CHECK_THROWS(legendre_sup(1, 0, kPoisson3, RateConstraint::none()));
    CHECK_THROWS(fcfs_term(query(10, 5, 1, kPoisson3), 0));
}

TEST_CASE("bound kind names")
{
    CHECK(to_string(BoundKind::fcfs_upper_series) == "fcfs-upper-series");
    CHECK(to_string(BoundKind::fcfs_lower) == "fcfs-lower");
    CHECK(to_string(BoundKind::sp_upper) == "sp-upper");
}
