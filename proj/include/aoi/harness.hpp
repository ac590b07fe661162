// harness.hpp - sweeps over the number of sources, joining simulated outage
// estimates with the analytical bounds.

#ifndef AOI_HARNESS_HPP
#define AOI_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/bounds.hpp"
#include "aoi/distributions.hpp"
#include "aoi/engine.hpp"

namespace aoi {

struct ExperimentSpec
{
    std::vector<int> n_list{10};
    double b = 5.0;
    double x = 10.0;
    std::string dist_spec;
    TransmissionModel model = TransmissionModel::deterministic(0.0);
    std::vector<Discipline> disciplines{Discipline::fcfs, Discipline::single_packet};
    std::int64_t rounds = 1'000'000;
    std::int64_t burn_in = 1'000;
    int replications = 1;
    std::uint64_t seed = 1;
    std::optional<int> source;  // default: i = n
    bool bounds = true;
    int batches_per_replication = 20;
    std::string out_path;      // empty: stdout
    std::string bounds_path;   // empty: derived from out_path
    std::string records_path;  // empty: no record dump

    int source_for(int n) const { return source.value_or(n); }
    // Throws ValidationError.
    void validate() const;
};

// Raised by parse_spec for --help; what() is the usage text.
class HelpRequested : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Flags (see README): --dist --b --x --n --sweep-n --discipline --rounds
// --burnin --reps --seed --source --bounds --batches --out --bounds-out
// --records --config. A config file holds `key = value` lines named like the
// flags; command-line flags win. Throws ValidationError or HelpRequested.
ExperimentSpec parse_spec(const std::vector<std::string>& args);

struct SweepRow
{
    int n = 0;
    Discipline discipline = Discipline::fcfs;
    int source = 0;
    double alpha = 1.0;
    OutageEstimate estimate;
    double log_p_hat = 0.0;
    // FCFS: min_r rate and its r_star; single-packet: the n -> infinity rate.
    double rate = std::numeric_limits<double>::quiet_NaN();
    std::optional<int> r_star;
    // FCFS: finite-n series upper bound; single-packet: finite-n upper bound.
    double log_upper = std::numeric_limits<double>::quiet_NaN();
    // FCFS only: lower bound at r_star.
    double log_lower = std::numeric_limits<double>::quiet_NaN();
};

struct BoundRow
{
    int n = 0;
    BoundKind kind = BoundKind::fcfs_upper_series;
    Discipline discipline = Discipline::fcfs;
    double x = 0, b = 0, alpha = 1;
    double rate = 0;
    std::optional<int> r_star;
    std::optional<double> theta_star;
    double log_bound = 0;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    std::vector<BoundRow> bounds;
};

// Epsilon used for the FCFS lower bound in sweep output.
inline constexpr double kLowerBoundEpsilon = 0.01;

// One shared ServiceMatrix per (n, replication), seeded with
// derive_seed(seed, n, replication), drives every selected discipline.
// Warnings (e.g. FCFS instability) go to `diagnostics` when non-null.
SweepResult run_sweep(const ExperimentSpec& spec, std::ostream* diagnostics = nullptr);

struct DecayPoint
{
    int n;
    double p_hat;
    std::int64_t samples;
};

struct DecayFit
{
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // RMS of ln p_hat residuals
    int points = 0;
    int n_min = 0;
    int n_max = 0;
};

// Least-squares fit of ln p_hat against n. Only points with at least 10
// expected outage events (p_hat * samples >= 10) are eligible; of those the
// largest max(3, ceil(m/2)) values of n are used. Throws std::runtime_error
// with fewer than 3 eligible points.
DecayFit fit_decay_slope(std::span<const DecayPoint> points);
DecayFit fit_decay_slope(std::span<const SweepRow> rows, Discipline discipline);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void emit_csv(std::span<const SweepRow> rows, const std::string& path);

// Header `n,kind,discipline,x,b,alpha,rate,r_star,theta_star,log_bound`.
void write_bounds_csv(std::ostream& out, std::span<const BoundRow> rows);
void emit_bounds_csv(std::span<const BoundRow> rows, const std::string& path);

// 9 significant digits; inf/-inf/nan spelled out.
std::string format_sig9(double v);

}  // namespace aoi

#endif
