// Internal: event-driven round-robin server shared by the FCFS and
// single-packet simulations. The queue policy decides what an arrival does to
// a source's buffer; everything else (event ordering, cyclic visiting,
// idling, record bookkeeping) is common.

#ifndef AOI_ROUND_ROBIN_SERVER_HPP
#define AOI_ROUND_ROBIN_SERVER_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <vector>

#include "aoi/engine.hpp"

namespace aoi::detail {

struct Packet
{
    std::int64_t batch;
    double arrival;
};

class FifoQueues
{
public:
    explicit FifoQueues(int n) : queues_(static_cast<std::size_t>(n)) {}

    void arrive(int source, Packet p, RunStats&) { queues_[source - 1].push_back(p); }
    bool empty(int source) const { return queues_[source - 1].empty(); }
    Packet take(int source)
    {
        auto& q = queues_[source - 1];
        Packet p = q.front();
        q.pop_front();
        return p;
    }
    bool any() const
    {
        for (const auto& q : queues_) {
            if (!q.empty()) {
                return true;
            }
        }
        return false;
    }

private:
    std::vector<std::deque<Packet>> queues_;
};

class SingleSlotQueues
{
public:
    explicit SingleSlotQueues(int n) : slots_(static_cast<std::size_t>(n)) {}

    void arrive(int source, Packet p, RunStats& stats)
    {
        auto& slot = slots_[source - 1];
        if (slot) {
            ++stats.preemptions;
        }
        slot = p;
    }
    bool empty(int source) const { return !slots_[source - 1].has_value(); }
    Packet take(int source)
    {
        auto& slot = slots_[source - 1];
        Packet p = *slot;
        slot.reset();
        return p;
    }
    bool any() const
    {
        for (const auto& s : slots_) {
            if (s) {
                return true;
            }
        }
        return false;
    }

private:
    std::vector<std::optional<Packet>> slots_;
};

enum class EventKind : int { arrival = 0, departure = 1 };

struct Event
{
    double time;
    EventKind kind;  // arrivals sort before departures at equal times
    std::uint64_t seq;
    std::int64_t batch;  // arrival only
};

struct EventLater
{
    bool operator()(const Event& a, const Event& b) const
    {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        if (a.kind != b.kind) {
            return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        }
        return a.seq > b.seq;
    }
};

// Runs until source n has delivered `config.rounds` updates. Arrivals stop
// after batch `max_batches`.
template <class Queues>
RunStats simulate_round_robin(const SystemConfig& config, const ServiceMatrix& matrix, Queues& queues,
                              std::int64_t max_batches, bool track_idle, const RecordSink& sink)
{
    const int n = config.n;
    const double nb = config.batch_period();
    const std::int64_t rounds = config.rounds;

    struct SourceState
    {
        std::int64_t delivered = 0;
        double generation_prev = 0.0;
        std::int64_t batch_prev = 0;
        double idle_mark = 0.0;  // idle_total at this source's last departure
    };
    std::vector<SourceState> state(static_cast<std::size_t>(n));

    std::priority_queue<Event, std::vector<Event>, EventLater> events;
    std::uint64_t seq = 0;
    events.push({nb, EventKind::arrival, seq++, 1});

    RunStats stats;
    bool busy = false;
    int next_source = 1;
    double idle_since = 0.0;
    double idle_total = 0.0;
    PeakAgeRecord in_service;
    std::int64_t in_service_batch = 0;

    auto try_start = [&](double now) {
        if (queues.empty(next_source)) {
            if (queues.any()) {
                ++stats.work_conservation_violations;
            }
            return;
        }
        idle_total += now - idle_since;
        const int i = next_source;
        auto& st = state[i - 1];
        const Packet packet = queues.take(i);

        in_service = PeakAgeRecord{};
        in_service.source = i;
        in_service.k = st.delivered + 1;
        in_service.generation_prev = st.generation_prev;
        in_service.arrival = packet.arrival;
        in_service.waiting = now - packet.arrival;
        in_service.service = matrix(i, in_service.k);
        if (track_idle) {
            in_service.idle = idle_total - st.idle_mark;
            in_service.preempted = packet.batch - st.batch_prev - 1;
        }
        in_service_batch = packet.batch;
        busy = true;
        events.push({now + in_service.service, EventKind::departure, seq++, 0});
    };

    while (!events.empty()) {
        const Event ev = events.top();
        events.pop();
        const double now = ev.time;

        if (ev.kind == EventKind::arrival) {
            for (int i = 1; i <= n; ++i) {
                queues.arrive(i, Packet{ev.batch, now}, stats);
            }
            if (ev.batch < max_batches) {
                events.push({static_cast<double>(ev.batch + 1) * nb, EventKind::arrival, seq++, ev.batch + 1});
            }
        } else {
            auto& st = state[in_service.source - 1];
            in_service.departure = now;
            in_service.peak_age = now - in_service.generation_prev;
            sink(in_service);

            ++stats.services;
            stats.busy_time += in_service.service;
            ++st.delivered;
            st.generation_prev = in_service.arrival;
            st.batch_prev = in_service_batch;
            st.idle_mark = idle_total;

            busy = false;
            idle_since = now;
            next_source = in_service.source % n + 1;
            if (in_service.source == n && st.delivered == rounds) {
                break;
            }
        }
        if (!busy) {
            try_start(now);
        }
    }
    stats.idle_time = idle_total;
    return stats;
}

}  // namespace aoi::detail

#endif
