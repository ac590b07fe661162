// engine.hpp - n-source round-robin update system with bulk periodic arrivals.
//
// All n sources generate a packet simultaneously every n*b time units (batch k
// arrives at k*n*b, k = 1, 2, ...). A single server visits the sources in the
// fixed cyclic order 1..n. Round r is the r-th visit to every source; the
// service time of source u in round r is V(u, r), taken from a ServiceMatrix
// so that both queue disciplines can be driven by the same draws.
//
// Indices exposed by this header are 1-based (sources 1..n, rounds 1..K).

#ifndef AOI_ENGINE_HPP
#define AOI_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aoi/distributions.hpp"

namespace aoi {

enum class Discipline { fcfs, single_packet };

std::string to_string(Discipline d);

struct SystemConfig
{
    int n = 1;
    double b = 1.0;
    Discipline discipline = Discipline::fcfs;
    std::int64_t rounds = 1;   // K
    std::int64_t burn_in = 0;  // records with k <= burn_in are transient
    std::uint64_t seed = 1;

    double batch_period() const { return n * b; }
    // Throws ValidationError.
    void validate() const;
};

class ServiceMatrix
{
public:
    ServiceMatrix() = default;
    ServiceMatrix(int n, std::int64_t rounds, double fill = 0.0);

    int sources() const { return n_; }
    std::int64_t rounds() const { return rounds_; }

    double operator()(int source, std::int64_t round) const
    {
        return data_[static_cast<std::size_t>(round - 1) * n_ + (source - 1)];
    }
    double& operator()(int source, std::int64_t round)
    {
        return data_[static_cast<std::size_t>(round - 1) * n_ + (source - 1)];
    }

    // Service times of sources 1..n in the given round.
    std::span<const double> round(std::int64_t r) const
    {
        return {data_.data() + static_cast<std::size_t>(r - 1) * n_, static_cast<std::size_t>(n_)};
    }
    std::span<double> round(std::int64_t r)
    {
        return {data_.data() + static_cast<std::size_t>(r - 1) * n_, static_cast<std::size_t>(n_)};
    }

    bool operator==(const ServiceMatrix&) const = default;

private:
    int n_ = 0;
    std::int64_t rounds_ = 0;
    std::vector<double> data_;
};

// Draws V(u, r) i.i.d. from `model`, round by round, from an mt19937_64
// seeded with `seed`.
ServiceMatrix generate_service_matrix(const TransmissionModel& model, int n, std::int64_t rounds,
                                      std::uint64_t seed);

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
// Seed for an independent stream: mix64(mix64(mix64(master) ^ a) ^ b).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// One delivered update k of source i.
struct PeakAgeRecord
{
    int source = 0;               // i
    std::int64_t k = 0;           // update index (= service round)
    double generation_prev = 0;   // S_i(k-1); 0 for k = 1
    double arrival = 0;           // S_i(k)
    double waiting = 0;           // W_i(k)
    double service = 0;           // V_i(k)
    double idle = 0;              // N_i(k-1), single-packet only
    std::int64_t preempted = 0;   // p_i(k-1), single-packet only
    double departure = 0;         // D_i(k)
    double peak_age = 0;          // A_i(k) = D_i(k) - S_i(k-1)

    bool operator==(const PeakAgeRecord&) const = default;
};

using RecordSink = std::function<void(const PeakAgeRecord&)>;

struct RunStats
{
    double busy_time = 0;
    double idle_time = 0;
    std::int64_t services = 0;
    std::int64_t preemptions = 0;
    // Times the server went idle while some queue still held a packet.
    std::int64_t work_conservation_violations = 0;
};

// FCFS via the waiting-time recursion
//   W_1(k) = (W_1(k-1) + sum_u V_u(k-1) - nb)^+,  W_1(1) = 0,
//   W_i(k) = W_1(k) + sum_{u<i} V_u(k),
//   A_i(k) = W_1(k) + sum_{u<=i} V_u(k) + nb.
// Records are emitted in departure order (k, then i).
RunStats run_fcfs_recursive(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink);
std::vector<PeakAgeRecord> run_fcfs_recursive(const SystemConfig& config, const ServiceMatrix& matrix);

// FCFS by explicit event simulation (per-source FIFO queues, server timeline).
RunStats run_fcfs_event_driven(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink);
std::vector<PeakAgeRecord> run_fcfs_event_driven(const SystemConfig& config, const ServiceMatrix& matrix);

// Peak age of update k of source i as the maximum over lookback start s:
//   max_{1<=s<=k} { sum_{r=s}^{k-1} sum_u V_u(r) + sum_{u<=i} V_u(k) - (k-s-1) nb }.
// Brute force, O(k n).
double fcfs_peak_age_oracle(const ServiceMatrix& matrix, int n, double b, int i, std::int64_t k);

// Single-packet queue: each batch overwrites every source's waiting packet;
// a packet already in service always completes. The simulation keeps
// generating batches until every source has delivered `rounds` updates, so
// exactly K records per source are produced.
//
// The idle field of update k is the server idle time accumulated between
// D_i(k-1) (time 0 for k = 1) and the service start of update k; with it,
//   A_i(k) = W_i(k-1) + sum_{u>=i} V_u(k-1) + N_i(k-1) + sum_{u<=i} V_u(k)
// holds as an identity.
RunStats run_single_packet(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink);
std::vector<PeakAgeRecord> run_single_packet(const SystemConfig& config, const ServiceMatrix& matrix);

// Dispatches on config.discipline (FCFS uses the recursion).
RunStats run_engine(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink);

// Right-hand side of the single-packet peak-age identity for consecutive
// updates (prev.k + 1 == cur.k) of the same source. Throws std::invalid_argument
// on mismatched records.
double lemma3_rhs(const PeakAgeRecord& prev, const PeakAgeRecord& cur, const ServiceMatrix& matrix);

// floor((X - nb) / nb) with X = W_i(k-1) + sum_{u>=i} V_u(k-1) + N_i(k-1) + sum_{u<i} V_u(k),
// i.e. the number of source-i packets preempted between updates k-1 and k.
// Pass prev = nullptr for k = 1 (virtual update generated at time 0 with no
// waiting or service). Quotients within 1e-9 of an integer are snapped before
// flooring.
std::int64_t lemma2_preemptions(const PeakAgeRecord* prev, const PeakAgeRecord& cur, const ServiceMatrix& matrix,
                                double nb);

// --- age process -----------------------------------------------------------

struct AgePoint
{
    double t;
    double age;
};

struct AgeSamplePath
{
    // Indexed by source - 1; sources without records are empty.
    std::vector<std::vector<AgePoint>> per_source;

    const std::vector<AgePoint>& source(int i) const { return per_source.at(static_cast<std::size_t>(i - 1)); }
};

// Delta_i(t) = t - U_i(t), U_i(t) the generation time of the latest update of
// source i departed by t (U_i = 0 before the first departure). Records must be
// in departure order per source. Throws std::invalid_argument on an empty set.
AgeSamplePath reconstruct_age_process(std::span<const PeakAgeRecord> records, std::span<const double> grid);

// --- outage estimation -----------------------------------------------------

struct OutageEstimate
{
    double p_hat = 0;
    double ci_low = 0;
    double ci_high = 0;
    double half_width = 0;  // 95% batch-means half width
    std::int64_t samples = 0;
    std::int64_t events = 0;
    int batches = 0;
};

// Fraction of peak ages >= n*x with a 95% normal-approximation confidence
// interval from `batches` contiguous batch means. Throws std::invalid_argument
// when there are fewer ages than batches.
OutageEstimate estimate_outage(std::span<const double> peak_ages, double x, int n, int batches);
OutageEstimate estimate_outage(std::span<const PeakAgeRecord> records, double x, int n, int batches);

// --- CSV -------------------------------------------------------------------

// Header `source,k,S_prev,S,W,V,N,p,D,A`, 9 significant digits.
void write_records_csv(std::ostream& out, std::span<const PeakAgeRecord> records);
void emit_records(std::span<const PeakAgeRecord> records, const std::string& path);

}  // namespace aoi

#endif
