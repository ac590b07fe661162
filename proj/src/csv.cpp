#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "aoi/engine.hpp"
#include "aoi/harness.hpp"

namespace aoi {

namespace {

template <class Writer>
void write_file(const std::string& path, Writer write)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write(out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

template <class T>
std::string optional_field(const std::optional<T>& v)
{
    if (!v) {
        return {};
    }
    if constexpr (std::is_integral_v<T>) {
        return std::to_string(*v);
    } else {
        return format_sig9(*v);
    }
}

}  // namespace

std::string format_sig9(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_records_csv(std::ostream& out, std::span<const PeakAgeRecord> records)
{
    out << "source,k,S_prev,S,W,V,N,p,D,A\n";
    for (const auto& r : records) {
        out << r.source << ',' << r.k << ',' << format_sig9(r.generation_prev) << ',' << format_sig9(r.arrival) << ','
            << format_sig9(r.waiting) << ',' << format_sig9(r.service) << ',' << format_sig9(r.idle) << ','
            << r.preempted << ',' << format_sig9(r.departure) << ',' << format_sig9(r.peak_age) << '\n';
    }
}

void emit_records(std::span<const PeakAgeRecord> records, const std::string& path)
{
    write_file(path, [&](std::ostream& out) { write_records_csv(out, records); });
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows)
{
    out << "n,discipline,source,alpha,samples,events,p_hat,ci_low,ci_high,ci_half_width,log_p_hat,rate,r_star,"
           "log_upper_bound,log_lower_bound\n";
    for (const auto& r : rows) {
        out << r.n << ',' << to_string(r.discipline) << ',' << r.source << ',' << format_sig9(r.alpha) << ','
            << r.estimate.samples << ',' << r.estimate.events << ',' << format_sig9(r.estimate.p_hat) << ','
            << format_sig9(r.estimate.ci_low) << ',' << format_sig9(r.estimate.ci_high) << ','
            << format_sig9(r.estimate.half_width) << ',' << format_sig9(r.log_p_hat) << ',' << format_sig9(r.rate)
            << ',' << optional_field(r.r_star) << ',' << format_sig9(r.log_upper) << ',' << format_sig9(r.log_lower)
            << '\n';
    }
}

void emit_csv(std::span<const SweepRow> rows, const std::string& path)
{
    write_file(path, [&](std::ostream& out) { write_sweep_csv(out, rows); });
}

void write_bounds_csv(std::ostream& out, std::span<const BoundRow> rows)
{
    out << "n,kind,discipline,x,b,alpha,rate,r_star,theta_star,log_bound\n";
    for (const auto& r : rows) {
        out << r.n << ',' << to_string(r.kind) << ',' << to_string(r.discipline) << ',' << format_sig9(r.x) << ','
            << format_sig9(r.b) << ',' << format_sig9(r.alpha) << ',' << format_sig9(r.rate) << ','
            << optional_field(r.r_star) << ',' << optional_field(r.theta_star) << ',' << format_sig9(r.log_bound)
            << '\n';
    }
}

void emit_bounds_csv(std::span<const BoundRow> rows, const std::string& path)
{
    write_file(path, [&](std::ostream& out) { write_bounds_csv(out, rows); });
}

}  // namespace aoi
