#include <algorithm>
#include <limits>
#include <stdexcept>

#include "aoi/engine.hpp"
#include "round_robin_server.hpp"

namespace aoi {

namespace {

void check_inputs(const SystemConfig& config, const ServiceMatrix& matrix)
{
    config.validate();
    if (matrix.sources() != config.n || matrix.rounds() < config.rounds) {
        throw std::invalid_argument("service matrix is smaller than n x K");
    }
}

template <class Runner>
std::vector<PeakAgeRecord> collect(Runner run, const SystemConfig& config, const ServiceMatrix& matrix)
{
    std::vector<PeakAgeRecord> records;
    records.reserve(static_cast<std::size_t>(config.n) * static_cast<std::size_t>(config.rounds));
    run(config, matrix, [&records](const PeakAgeRecord& r) { records.push_back(r); });
    return records;
}

}  // namespace

RunStats run_fcfs_recursive(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink)
{
    check_inputs(config, matrix);
    const int n = config.n;
    const double nb = config.batch_period();

    RunStats stats;
    double w1 = 0.0;
    double prev_round_total = 0.0;
    for (std::int64_t k = 1; k <= config.rounds; ++k) {
        if (k > 1) {
            const double slack = w1 + prev_round_total - nb;
            if (slack < 0.0) {
                stats.idle_time += -slack;
            }
            w1 = std::max(0.0, slack);
        } else {
            stats.idle_time += nb;
        }
        const double arrival = static_cast<double>(k) * nb;
        double head = 0.0;  // sum_{u<i} V_u(k)
        for (int i = 1; i <= n; ++i) {
            PeakAgeRecord rec;
            rec.source = i;
            rec.k = k;
            rec.generation_prev = static_cast<double>(k - 1) * nb;
            rec.arrival = arrival;
            rec.waiting = w1 + head;
            rec.service = matrix(i, k);
            rec.departure = arrival + rec.waiting + rec.service;
            head += rec.service;
            rec.peak_age = w1 + head + nb;
            sink(rec);
            ++stats.services;
            stats.busy_time += rec.service;
        }
        prev_round_total = head;
    }
    return stats;
}

std::vector<PeakAgeRecord> run_fcfs_recursive(const SystemConfig& config, const ServiceMatrix& matrix)
{
    return collect([](auto&&... a) { return run_fcfs_recursive(a...); }, config, matrix);
}

RunStats run_fcfs_event_driven(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink)
{
    check_inputs(config, matrix);
    detail::FifoQueues queues(config.n);
    return detail::simulate_round_robin(config, matrix, queues, config.rounds, false, sink);
}

std::vector<PeakAgeRecord> run_fcfs_event_driven(const SystemConfig& config, const ServiceMatrix& matrix)
{
    return collect([](auto&&... a) { return run_fcfs_event_driven(a...); }, config, matrix);
}

double fcfs_peak_age_oracle(const ServiceMatrix& matrix, int n, double b, int i, std::int64_t k)
{
    if (i < 1 || i > n || n != matrix.sources() || k < 1 || k > matrix.rounds()) {
        throw std::invalid_argument("fcfs_peak_age_oracle: index out of range");
    }
    const double nb = n * b;
    double head = 0.0;
    for (int u = 1; u <= i; ++u) {
        head += matrix(u, k);
    }
    // s runs from k down to 1 so the backlog sum over rounds s..k-1 grows by one round per step.
    double best = -std::numeric_limits<double>::infinity();
    double backlog = 0.0;
    for (std::int64_t s = k; s >= 1; --s) {
        if (s < k) {
            for (int u = 1; u <= n; ++u) {
                backlog += matrix(u, s);
            }
        }
        best = std::max(best, backlog + head - static_cast<double>(k - s - 1) * nb);
    }
    return best;
}

}  // namespace aoi
