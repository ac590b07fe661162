#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aoi/engine.hpp"

namespace aoi {

namespace {

constexpr double kZ975 = 1.959963984540054;

}  // namespace

OutageEstimate estimate_outage(std::span<const double> peak_ages, double x, int n, int batches)
{
    if (batches < 1) {
        throw std::invalid_argument("batch count must be >= 1");
    }
    if (peak_ages.size() < static_cast<std::size_t>(batches)) {
        throw std::invalid_argument("fewer peak-age samples than batches");
    }
    const double threshold = n * x;
    const std::size_t total = peak_ages.size();
    const auto nbatch = static_cast<std::size_t>(batches);

    // Sample j belongs to batch floor(j * B / N); batch sizes differ by at most one.
    std::vector<std::int64_t> hits(nbatch, 0);
    std::vector<std::int64_t> sizes(nbatch, 0);
    std::int64_t events = 0;
    for (std::size_t j = 0; j < total; ++j) {
        const std::size_t batch = static_cast<std::size_t>((static_cast<unsigned __int128>(j) * nbatch) / total);
        ++sizes[batch];
        if (peak_ages[j] >= threshold) {
            ++hits[batch];
            ++events;
        }
    }

    OutageEstimate est;
    est.samples = static_cast<std::int64_t>(total);
    est.events = events;
    est.batches = batches;
    est.p_hat = static_cast<double>(events) / static_cast<double>(total);

    if (batches < 2) {
        est.half_width = std::numeric_limits<double>::infinity();
    } else {
        double mean = 0.0;
        std::vector<double> fractions(nbatch);
        for (std::size_t b = 0; b < nbatch; ++b) {
            fractions[b] = static_cast<double>(hits[b]) / static_cast<double>(sizes[b]);
            mean += fractions[b];
        }
        mean /= static_cast<double>(nbatch);
        double ss = 0.0;
        for (double f : fractions) {
            ss += (f - mean) * (f - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(nbatch - 1));
        est.half_width = kZ975 * sd / std::sqrt(static_cast<double>(nbatch));
    }
    est.ci_low = std::max(0.0, est.p_hat - est.half_width);
    est.ci_high = std::min(1.0, est.p_hat + est.half_width);
    return est;
}

OutageEstimate estimate_outage(std::span<const PeakAgeRecord> records, double x, int n, int batches)
{
    std::vector<double> ages;
    ages.reserve(records.size());
    for (const auto& r : records) {
        ages.push_back(r.peak_age);
    }
    return estimate_outage(std::span<const double>(ages), x, n, batches);
}

}  // namespace aoi
