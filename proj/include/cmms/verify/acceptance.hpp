#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cmms::acceptance {

enum class Status { pass, fail, skip };

struct CheckResult {
    std::string name;
    Status status = Status::fail;
    std::string detail;
};

CheckResult monotone_convergence();
CheckResult similarity_rows();
CheckResult r_trace_identity();
CheckResult generalized_eigensolver();
CheckResult f_gradient();
CheckResult lambda_grid();
CheckResult synthetic_uda();
CheckResult sda_reduction();
/// Needs the benchmark feature files under data_dir (see README); skipped
/// when data_dir is empty or holds none of the expected suites.
CheckResult benchmark_reproduction(const std::optional<std::filesystem::path>& data_dir);
CheckResult ablation_ordering();

/// Every check in order. benchmark_data defaults to $CMMS_BENCHMARK_DATA.
std::vector<CheckResult> run_all(std::optional<std::filesystem::path> benchmark_data = std::nullopt);

/// "PASS  name  detail" style line.
std::string format_line(const CheckResult& result);

/// Prints one line per check as it completes; returns true when nothing failed.
bool run_and_print(std::ostream& out, std::optional<std::filesystem::path> benchmark_data = std::nullopt);

}  // namespace cmms::acceptance
