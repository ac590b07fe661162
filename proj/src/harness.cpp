#include "aoi/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"

namespace aoi {

namespace {

int parse_int(const std::string& text, const std::string& what)
{
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError("malformed integer '" + text + "' in " + what);
    }
    return value;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<int> parse_sweep(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw ValidationError("--sweep-n expects lo:step:hi, got '" + text + "'");
    }
    const int lo = parse_int(parts[0], "--sweep-n");
    const int step = parse_int(parts[1], "--sweep-n");
    const int hi = parse_int(parts[2], "--sweep-n");
    if (lo < 1 || step < 1 || hi < lo) {
        throw ValidationError("--sweep-n needs 1 <= lo <= hi and step >= 1");
    }
    std::vector<int> out;
    for (int n = lo; n <= hi; n += step) {
        out.push_back(n);
    }
    return out;
}

std::string records_path_for(const ExperimentSpec& spec, int n, Discipline d)
{
    if (spec.n_list.size() == 1 && spec.disciplines.size() == 1) {
        return spec.records_path;
    }
    std::filesystem::path p(spec.records_path);
    const std::string stem = p.stem().string() + "_n" + std::to_string(n) + "_" + to_string(d);
    return (p.parent_path() / (stem + p.extension().string())).string();
}

}  // namespace

void ExperimentSpec::validate() const
{
    if (n_list.empty()) {
        throw ValidationError("no values of n to simulate");
    }
    for (std::size_t j = 0; j < n_list.size(); ++j) {
        if (n_list[j] < 1) {
            throw ValidationError("every n must be >= 1");
        }
        if (j > 0 && n_list[j] <= n_list[j - 1]) {
            throw ValidationError("n values must be strictly increasing");
        }
    }
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw ValidationError("--b must be finite and > 0");
    }
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError("--x must be finite and > 0");
    }
    if (disciplines.empty()) {
        throw ValidationError("no queue discipline selected");
    }
    if (burn_in < 0 || rounds <= burn_in) {
        throw ValidationError("--rounds must exceed --burnin (and --burnin must be >= 0)");
    }
    if (replications < 1) {
        throw ValidationError("--reps must be >= 1");
    }
    if (batches_per_replication < 1 || rounds - burn_in < batches_per_replication) {
        throw ValidationError("--batches must be >= 1 and no larger than rounds - burnin");
    }
    if (source && (*source < 1 || *source > n_list.front())) {
        throw ValidationError("--source must lie in [1, smallest n]");
    }
}

ExperimentSpec parse_spec(const std::vector<std::string>& args)
{
    ExperimentSpec spec;
    CLI::App app{"Peak-age outage probability of an n-source round-robin system: simulation and bounds",
                 "aoi_outage"};
    app.set_config("--config", "", "Read `key = value` settings (flag names without dashes)");
    app.allow_config_extras(false);

    std::string n_text;
    std::string sweep_text;
    std::string discipline = "both";
    std::string bounds = "on";
    int source = 0;

    app.add_option("--dist", spec.dist_spec, "Service time: det:<v> poisson:<l> exp:<mu> geom:<p> disc:<v>:<p>,...")
        ->required();
    app.add_option("--b", spec.b, "Per-source inter-arrival parameter (batch period n*b)");
    app.add_option("--x", spec.x, "Threshold scale; outage means peak age >= n*x");
    auto* n_opt = app.add_option("--n", n_text, "Number of sources (comma-separated list allowed)");
    auto* sweep_opt = app.add_option("--sweep-n", sweep_text, "Sweep n as lo:step:hi");
    n_opt->excludes(sweep_opt);
    app.add_option("--discipline", discipline, "fcfs | spq | both")
        ->check(CLI::IsMember({"fcfs", "spq", "both", "single-packet"}));
    app.add_option("--rounds", spec.rounds, "Rounds K per replication, burn-in included");
    app.add_option("--burnin", spec.burn_in, "Leading rounds discarded before estimation");
    app.add_option("--reps", spec.replications, "Independent replications");
    app.add_option("--seed", spec.seed, "Master seed");
    auto* source_opt = app.add_option("--source", source, "Source index i under study (default: n)");
    app.add_option("--bounds", bounds, "on | off")->check(CLI::IsMember({"on", "off"}));
    app.add_option("--batches", spec.batches_per_replication, "Batch-means blocks per replication");
    app.add_option("--out", spec.out_path, "Sweep CSV path (default: stdout)");
    app.add_option("--bounds-out", spec.bounds_path, "Bounds CSV path (default: <out stem>_bounds.csv)");
    app.add_option("--records", spec.records_path, "Dump per-update records of replication 0");

    std::vector<std::string> argv_storage{"aoi_outage"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) {
        argv.push_back(a.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ValidationError(e.what());
    }

    spec.model = TransmissionModel::parse(spec.dist_spec);
    if (!n_text.empty()) {
        spec.n_list.clear();
        for (const auto& part : split(n_text, ',')) {
            spec.n_list.push_back(parse_int(part, "--n"));
        }
    } else if (!sweep_text.empty()) {
        spec.n_list = parse_sweep(sweep_text);
    }
    if (discipline == "fcfs") {
        spec.disciplines = {Discipline::fcfs};
    } else if (discipline == "spq" || discipline == "single-packet") {
        spec.disciplines = {Discipline::single_packet};
    }
    spec.bounds = bounds == "on";
    if (source_opt->count() > 0) {
        spec.source = source;
    }
    if (spec.bounds_path.empty() && !spec.out_path.empty()) {
        std::filesystem::path p(spec.out_path);
        spec.bounds_path = (p.parent_path() / (p.stem().string() + "_bounds.csv")).string();
    }
    spec.validate();
    return spec;
}

SweepResult run_sweep(const ExperimentSpec& spec, std::ostream* diagnostics)
{
    spec.validate();
    SweepResult result;
    const auto post_burn = static_cast<std::size_t>(spec.rounds - spec.burn_in);

    for (int n : spec.n_list) {
        const int source = spec.source_for(n);
        const double alpha = static_cast<double>(source) / n;

        std::vector<std::vector<double>> ages(spec.disciplines.size());
        for (auto& a : ages) {
            a.reserve(post_burn * static_cast<std::size_t>(spec.replications));
        }

        for (int rep = 0; rep < spec.replications; ++rep) {
            // Common random numbers: every discipline consumes this matrix.
            const ServiceMatrix matrix = generate_service_matrix(
                spec.model, n, spec.rounds,
                derive_seed(spec.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)));

            for (std::size_t d = 0; d < spec.disciplines.size(); ++d) {
                SystemConfig config;
                config.n = n;
                config.b = spec.b;
                config.discipline = spec.disciplines[d];
                config.rounds = spec.rounds;
                config.burn_in = spec.burn_in;
                config.seed = spec.seed;

                const bool dump = !spec.records_path.empty() && rep == 0;
                std::vector<PeakAgeRecord> records;
                auto& sink_ages = ages[d];
                run_engine(config, matrix, [&](const PeakAgeRecord& rec) {
                    if (rec.source == source && rec.k > spec.burn_in) {
                        sink_ages.push_back(rec.peak_age);
                    }
                    if (dump) {
                        records.push_back(rec);
                    }
                });
                if (dump) {
                    emit_records(records, records_path_for(spec, n, config.discipline));
                }
            }
        }

        for (std::size_t d = 0; d < spec.disciplines.size(); ++d) {
            SweepRow row;
            row.n = n;
            row.discipline = spec.disciplines[d];
            row.source = source;
            row.alpha = alpha;
            row.estimate = estimate_outage(std::span<const double>(ages[d]), spec.x, n,
                                           spec.batches_per_replication * spec.replications);
            row.log_p_hat = row.estimate.p_hat > 0.0 ? std::log(row.estimate.p_hat)
                                                     : -std::numeric_limits<double>::infinity();

            if (spec.bounds && row.discipline == Discipline::fcfs) {
                const RateQuery query{spec.x, spec.b, alpha, spec.model};
                if (!(spec.model.mean() < spec.b)) {
                    if (diagnostics != nullptr) {
                        *diagnostics << "warning: n=" << n << ": E[V] = " << spec.model.mean() << " >= b = " << spec.b
                                     << "; FCFS queue is unstable, bounds skipped\n";
                    }
                } else {
                    const RateResult rate = fcfs_rate(query);
                    const BoundValue upper = fcfs_upper_bound_series(n, query);
                    const BoundValue lower = fcfs_lower_bound(n, query, *rate.r_star, kLowerBoundEpsilon);
                    row.rate = rate.value;
                    row.r_star = rate.r_star;
                    row.log_upper = upper.log_value;
                    row.log_lower = lower.log_value;
                    result.bounds.push_back({n, BoundKind::fcfs_upper_series, Discipline::fcfs, spec.x, spec.b, alpha,
                                             rate.value, rate.r_star, rate.theta_star, upper.log_value});
                    result.bounds.push_back({n, BoundKind::fcfs_lower, Discipline::fcfs, spec.x, spec.b, alpha,
                                             rate.value, rate.r_star, rate.theta_star, lower.log_value});
                }
            } else if (spec.bounds) {
                const RateResult finite = sp_upper_rate(n, spec.x, spec.b, spec.model);
                const BoundValue upper = sp_upper_bound(n, spec.x, spec.b, spec.model);
                row.rate = sp_asymptotic_rate(spec.x, spec.b, spec.model).value;
                row.log_upper = upper.log_value;
                result.bounds.push_back({n, BoundKind::sp_upper, Discipline::single_packet, spec.x, spec.b, alpha,
                                         finite.value, std::nullopt, finite.theta_star, upper.log_value});
            }
            result.rows.push_back(row);
        }
    }
    return result;
}

DecayFit fit_decay_slope(std::span<const DecayPoint> points)
{
    std::vector<DecayPoint> eligible;
    for (const auto& p : points) {
        if (p.p_hat > 0.0 && p.p_hat * static_cast<double>(p.samples) >= 10.0 - 1e-9) {
            eligible.push_back(p);
        }
    }
    if (eligible.size() < 3) {
        throw std::runtime_error("insufficient positive estimates: need 3 points with >= 10 outage events, have " +
                                 std::to_string(eligible.size()));
    }
    std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    const std::size_t keep = std::max<std::size_t>(3, (eligible.size() + 1) / 2);
    const std::span<const DecayPoint> used(eligible.data() + (eligible.size() - keep), keep);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : used) {
        const double xv = p.n;
        const double yv = std::log(p.p_hat);
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
    }
    const double m = static_cast<double>(used.size());
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) {
        throw std::runtime_error("decay fit needs at least two distinct n");
    }
    DecayFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss = 0;
    for (const auto& p : used) {
        const double e = std::log(p.p_hat) - (fit.intercept + fit.slope * p.n);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    fit.points = static_cast<int>(used.size());
    fit.n_min = used.front().n;
    fit.n_max = used.back().n;
    return fit;
}

DecayFit fit_decay_slope(std::span<const SweepRow> rows, Discipline discipline)
{
    std::vector<DecayPoint> points;
    for (const auto& r : rows) {
        if (r.discipline == discipline) {
            points.push_back({r.n, r.estimate.p_hat, r.estimate.samples});
        }
    }
    return fit_decay_slope(points);
}

}  // namespace aoi
