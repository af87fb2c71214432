// Command-line front end: ndt | sweep | simulate | verify.
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fran/model.hpp"

namespace fran::cli {

inline constexpr int kSchemaVersion = 1;

/// "2^36", "1e6" or "1024". Throws std::invalid_argument.
double parse_power(std::string_view text);
/// Comma-separated list of parse_power values.
std::vector<double> parse_power_list(std::string_view text);
/// "start:stop:step" (inclusive), "a,b,c" or a single value; sorted, unique.
std::vector<double> parse_grid(std::string_view text);

/// "inf" or a 12-significant-digit value.
std::string format_number(double v);

struct SweepRow {
    SystemParams params;
    std::string regime;
    NdtValue ndt_min;
    NdtValue ndt_lower;
    NdtValue ndt_achievable;
    std::string mix;
};

/// One row per grid point, sorted by (mu, r_F, r_D).
std::vector<SweepRow> sweep_rows(const std::vector<double>& mu_grid, const std::vector<double>& rf_grid,
                                 const std::vector<double>& rd_grid);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

/// Entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fran::cli
