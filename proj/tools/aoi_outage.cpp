// aoi_outage: simulate peak-age outage over a sweep of n and tabulate bounds.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "aoi/harness.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const aoi::ExperimentSpec spec = aoi::parse_spec(args);
        const aoi::SweepResult result = aoi::run_sweep(spec, &std::cerr);
        if (spec.out_path.empty()) {
            aoi::write_sweep_csv(std::cout, result.rows);
        } else {
            aoi::emit_csv(result.rows, spec.out_path);
        }
        if (spec.bounds && !result.bounds.empty()) {
            if (spec.bounds_path.empty()) {
                std::cout << '\n';
                aoi::write_bounds_csv(std::cout, result.bounds);
            } else {
                aoi::emit_bounds_csv(result.bounds, spec.bounds_path);
            }
        }
    } catch (const aoi::HelpRequested& help) {
        std::cout << help.what();
        return 0;
    } catch (const aoi::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
