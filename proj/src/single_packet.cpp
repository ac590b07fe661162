#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aoi/engine.hpp"
#include "round_robin_server.hpp"

namespace aoi {

RunStats run_single_packet(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink)
{
    config.validate();
    if (matrix.sources() != config.n || matrix.rounds() < config.rounds) {
        throw std::invalid_argument("service matrix is smaller than n x K");
    }
    detail::SingleSlotQueues queues(config.n);
    return detail::simulate_round_robin(config, matrix, queues, std::numeric_limits<std::int64_t>::max(), true,
                                        sink);
}

std::vector<PeakAgeRecord> run_single_packet(const SystemConfig& config, const ServiceMatrix& matrix)
{
    std::vector<PeakAgeRecord> records;
    records.reserve(static_cast<std::size_t>(config.n) * static_cast<std::size_t>(config.rounds));
    run_single_packet(config, matrix, [&records](const PeakAgeRecord& r) { records.push_back(r); });
    return records;
}

namespace {

// sum_{u=from}^{to} V_u(round)
double partial_round(const ServiceMatrix& matrix, std::int64_t round, int from, int to)
{
    double sum = 0.0;
    for (int u = from; u <= to; ++u) {
        sum += matrix(u, round);
    }
    return sum;
}

void check_pair(const PeakAgeRecord& prev, const PeakAgeRecord& cur, const ServiceMatrix& matrix)
{
    if (prev.source != cur.source || prev.k + 1 != cur.k) {
        throw std::invalid_argument("records are not consecutive updates of the same source");
    }
    if (cur.source < 1 || cur.source > matrix.sources() || cur.k > matrix.rounds()) {
        throw std::invalid_argument("record indices fall outside the service matrix");
    }
}

}  // namespace

double lemma3_rhs(const PeakAgeRecord& prev, const PeakAgeRecord& cur, const ServiceMatrix& matrix)
{
    check_pair(prev, cur, matrix);
    const int i = cur.source;
    const int n = matrix.sources();
    return prev.waiting + partial_round(matrix, prev.k, i, n) + cur.idle + partial_round(matrix, cur.k, 1, i);
}

std::int64_t lemma2_preemptions(const PeakAgeRecord* prev, const PeakAgeRecord& cur, const ServiceMatrix& matrix,
                                double nb)
{
    const int i = cur.source;
    double elapsed = cur.idle + partial_round(matrix, cur.k, 1, i - 1);
    if (prev != nullptr) {
        check_pair(*prev, cur, matrix);
        elapsed += prev->waiting + partial_round(matrix, prev->k, i, matrix.sources());
    } else if (cur.k != 1) {
        throw std::invalid_argument("a missing previous record is only valid for k = 1");
    }
    double q = (elapsed - nb) / nb;
    const double nearest = std::round(q);
    if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, std::abs(q))) {
        q = nearest;
    }
    return static_cast<std::int64_t>(std::floor(q));
}

}  // namespace aoi
