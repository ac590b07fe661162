#include <algorithm>
#include <stdexcept>

#include "aoi/engine.hpp"

namespace aoi {

AgeSamplePath reconstruct_age_process(std::span<const PeakAgeRecord> records, std::span<const double> grid)
{
    if (records.empty()) {
        throw std::invalid_argument("cannot reconstruct an age process from an empty record set");
    }
    int sources = 0;
    for (const auto& r : records) {
        if (r.source < 1) {
            throw std::invalid_argument("record with source index < 1");
        }
        sources = std::max(sources, r.source);
    }

    // (departure, generation) per source, in departure order
    std::vector<std::vector<std::pair<double, double>>> deliveries(static_cast<std::size_t>(sources));
    for (const auto& r : records) {
        auto& d = deliveries[r.source - 1];
        if (!d.empty() && r.departure < d.back().first) {
            throw std::invalid_argument("records must be sorted by departure within each source");
        }
        d.emplace_back(r.departure, r.arrival);
    }

    AgeSamplePath path;
    path.per_source.resize(static_cast<std::size_t>(sources));
    for (int i = 1; i <= sources; ++i) {
        const auto& d = deliveries[i - 1];
        if (d.empty()) {
            continue;
        }
        auto& out = path.per_source[i - 1];
        out.reserve(grid.size());
        for (double t : grid) {
            // latest delivery with departure <= t
            auto it = std::upper_bound(d.begin(), d.end(), t,
                                       [](double value, const auto& entry) { return value < entry.first; });
            const double latest_generation = it == d.begin() ? 0.0 : std::prev(it)->second;
            out.push_back({t, t - latest_generation});
        }
    }
    return path;
}

}  // namespace aoi
