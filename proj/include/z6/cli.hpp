#pragma once

// Command-line front end. Records are built as ordered JSON objects and written as JSON lines,
// CSV or aligned key/value text, with every double printed to 17 significant digits.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "z6/core_model.hpp"
#include "z6/dynamics.hpp"
#include "z6/equilibria.hpp"

namespace z6::cli {

using Record = nlohmann::ordered_json;

enum class Format { Text, Jsonl, Csv };

struct Tolerances {
    double integrate = kDefaultIntegrateTol;
    double fixed_point = kDefaultFixedPointTol;
    double q_zero = kQZeroTol;
};

/// JSON with doubles as %.17g and non-finite values as null.
std::string dump_json(const Record& r);
/// Nested keys joined by '.', array elements by index.
std::vector<std::pair<std::string, Record>> flatten(const Record& r);
std::string csv_header(const Record& r);
std::string csv_row(const Record& r);
void write_records(std::ostream& out, const std::vector<Record>& records, Format format);

/// Parameters, region report, origin and infinity reports, equilibria and (optionally) the
/// limit cycles found by a scan.
Record analysis_record(const SystemParams& params, const Tolerances& tol, bool with_cycles = true,
                       int scan_nodes = 200);

struct SweepSpec {
    /// fig1 (s1, p1), fig2 (p1, p2), fig3 (p1 intervals) or grid (any two names).
    std::string mode = "grid";
    SystemParams fixed;
    std::string x_name = "p1";
    std::string y_name = "p2";
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;
    int nx = 11;
    int ny = 11;
    int jobs = 1;
    bool cycles = false;
    Tolerances tol;

    /// Throws InvalidInput on unknown names, equal swept names or resolutions below 2.
    void validate() const;
};

/// One record per grid node in row-major (y outer, x inner) order; fig3 emits interval records.
/// Nodes that fail carry an "error" field instead of the classification.
std::vector<Record> run_sweep(const SweepSpec& spec);

/// The worked-example pipeline as a list of checks {name, kind, expected, value, tolerance, pass}.
Record example42_report(const SystemParams& params, const Tolerances& tol);

/// Entry point; returns the process exit code (0 success, 1 failed checks, 2 regime or usage
/// error, 3 numerical failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace z6::cli
