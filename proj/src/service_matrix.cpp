#include "aoi/engine.hpp"

#include <cmath>

namespace aoi {

std::string to_string(Discipline d)
{
    return d == Discipline::fcfs ? "fcfs" : "spq";
}

void SystemConfig::validate() const
{
    if (n < 1) {
        throw ValidationError("number of sources n must be >= 1");
    }
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw ValidationError("inter-arrival parameter b must be finite and > 0");
    }
    if (rounds < 1) {
        throw ValidationError("rounds K must be >= 1");
    }
    if (burn_in < 0 || burn_in >= rounds) {
        throw ValidationError("burn-in must satisfy 0 <= burn_in < K");
    }
}

ServiceMatrix::ServiceMatrix(int n, std::int64_t rounds, double fill)
    : n_(n), rounds_(rounds), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(rounds), fill)
{
    if (n < 1 || rounds < 1) {
        throw std::invalid_argument("service matrix needs n >= 1 and K >= 1");
    }
}

ServiceMatrix generate_service_matrix(const TransmissionModel& model, int n, std::int64_t rounds,
                                      std::uint64_t seed)
{
    ServiceMatrix matrix(n, rounds);
    Rng rng(seed);
    for (std::int64_t r = 1; r <= rounds; ++r) {
        model.sample_into(rng, matrix.round(r));
    }
    return matrix;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b)
{
    return mix64(mix64(mix64(master) ^ a) ^ b);
}

RunStats run_engine(const SystemConfig& config, const ServiceMatrix& matrix, const RecordSink& sink)
{
    if (config.discipline == Discipline::fcfs) {
        return run_fcfs_recursive(config, matrix, sink);
    }
    return run_single_packet(config, matrix, sink);
}

}  // namespace aoi
