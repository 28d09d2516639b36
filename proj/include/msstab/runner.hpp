#pragma once

// Batch front door used by the command-line tool and the acceptance suite:
// dispatches analyze / search / synthesize / simulate / convert / reproduce
// jobs described by a JSON config, writes report.json plus CSV series, and
// maps outcomes to process exit codes.

#include "msstab/json_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msstab {

struct RunOptions {
    std::string mode;      // "exact" | "pwl" | "lifted" | "spectral" (task-dependent default)
    int pwl_n = 100;
    int grid_n = 201;
    double eps = 1e-6;
    double tol = 1e-4;
    uint64_t seed = 1;
    int paths = 10000;
    int threads = 0;
    std::string table;     // reproduce: T1..T5
};

// exit codes: 0 completed, stable/feasible; 1 completed, unstable/infeasible
// (or no threshold in range); 2 usage/config error; 3 numerical failure
struct RunOutcome {
    int exit_code = 0;
    json report;
    std::vector<std::string> files_written;
};

// Execute one task. `command` is one of analyze, search, synthesize,
// simulate, convert, reproduce; config supplies the system/task blocks.
// Reports and CSV files are written under out_dir (empty: no files).
RunOutcome run_task(const std::string& command, const json& config, const RunOptions& opts,
                    const std::string& out_dir);

// Convenience wrapper reading the config from a file.
RunOutcome run_config_file(const std::string& command, const std::string& config_path, const RunOptions& opts,
                           const std::string& out_dir);

// Reproduction sweeps of the bundled benchmark tables (T1..T5): side-by-side
// reference-vs-computed values with per-cell deviations.
json reproduce_table(const std::string& table_id, const RunOptions& opts);

} // namespace msstab
