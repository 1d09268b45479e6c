#include "z6/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "z6/abel.hpp"
#include "z6/errors.hpp"
#include "z6/geometry.hpp"
#include "z6/stability.hpp"

namespace z6::cli {

namespace {

// ---------------------------------------------------------------- formatting

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_into(std::string& s, const Record& r)
{
    switch (r.type()) {
    case Record::value_t::object: {
        s += '{';
        bool first = true;
        for (const auto& [k, v] : r.items()) {
            if (!first) {
                s += ',';
            }
            first = false;
            s += Record(k).dump();
            s += ':';
            dump_into(s, v);
        }
        s += '}';
        break;
    }
    case Record::value_t::array: {
        s += '[';
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i > 0) {
                s += ',';
            }
            dump_into(s, r[i]);
        }
        s += ']';
        break;
    }
    case Record::value_t::number_float: {
        const double v = r.get<double>();
        s += std::isfinite(v) ? format_double(v) : "null";
        break;
    }
    default:
        s += r.dump();
    }
}

void flatten_into(std::vector<std::pair<std::string, Record>>& out, const std::string& prefix, const Record& r)
{
    if (r.is_object()) {
        for (const auto& [k, v] : r.items()) {
            flatten_into(out, prefix.empty() ? k : prefix + "." + k, v);
        }
    } else if (r.is_array()) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            flatten_into(out, prefix + "." + std::to_string(i), r[i]);
        }
    } else {
        out.emplace_back(prefix, r);
    }
}

std::string scalar_text(const Record& v)
{
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_null()) {
        return "";
    }
    return v.dump();
}

std::string csv_cell(const Record& v)
{
    std::string s = scalar_text(v);
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) {
            q += c;
            if (c == '"') {
                q += '"';
            }
        }
        return q + "\"";
    }
    return s;
}

// ---------------------------------------------------------------- logging

enum class LogLevel { Off, Error, Warn, Info, Debug };

LogLevel log_level()
{
    const char* env = std::getenv("Z6_LOG");
    if (env == nullptr) {
        return LogLevel::Warn;
    }
    const std::string v = env;
    if (v == "off" || v == "0") {
        return LogLevel::Off;
    }
    if (v == "error" || v == "1") {
        return LogLevel::Error;
    }
    if (v == "info" || v == "3") {
        return LogLevel::Info;
    }
    if (v == "debug" || v == "4") {
        return LogLevel::Debug;
    }
    return LogLevel::Warn;
}

class Logger {
public:
    explicit Logger(std::ostream& err) : err_(err), level_(log_level()) {}
    void log(LogLevel level, const std::string& msg) const
    {
        static const char* names[] = {"off", "error", "warn", "info", "debug"};
        if (level != LogLevel::Off && level <= level_) {
            err_ << "[z6 " << names[static_cast<int>(level)] << "] " << msg << '\n';
        }
    }

private:
    std::ostream& err_;
    LogLevel level_;
};

// ---------------------------------------------------------------- records

const char* error_name(const std::exception& e)
{
    if (dynamic_cast<const SectionBreakdown*>(&e)) return "SectionBreakdown";
    if (dynamic_cast<const BlowUp*>(&e)) return "BlowUp";
    if (dynamic_cast<const NotFound*>(&e)) return "NotFound";
    if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
    if (dynamic_cast<const RegimeError*>(&e)) return "RegimeError";
    if (dynamic_cast<const DegenerateError*>(&e)) return "DegenerateError";
    if (dynamic_cast<const InvalidInput*>(&e)) return "InvalidInput";
    if (dynamic_cast<const SingularTransform*>(&e)) return "SingularTransform";
    if (dynamic_cast<const ConsistencyError*>(&e)) return "ConsistencyError";
    if (dynamic_cast<const ConstructionFailure*>(&e)) return "ConstructionFailure";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "Exception";
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const RegimeError*>(&e) || dynamic_cast<const InvalidInput*>(&e)) {
        return 2;
    }
    return 3;
}

Record params_record(const SystemParams& p)
{
    Record r;
    r["p1"] = p.p1;
    r["p2"] = p.p2;
    r["s1"] = p.s1;
    r["s2"] = p.s2;
    return r;
}

Record region_record(const RegionReport& rr)
{
    Record r;
    r["q"] = rr.q.value;
    r["q_sign"] = to_string(rr.q.sign);
    r["equilibria_count"] = rr.equilibria_count;
    r["condition_i"] = rr.condition_i;
    r["condition_ii"] = rr.condition_ii;
    r["a_keeps_sign"] = rr.a_keeps_sign;
    r["b_keeps_sign"] = rr.b_keeps_sign;
    r["certificate"] = to_string(rr.certificate);
    r["sigma_a_minus"] = rr.thresholds.sigma_a_minus;
    r["sigma_a_plus"] = rr.thresholds.sigma_a_plus;
    r["sigma_b_minus"] = rr.thresholds.sigma_b_minus;
    r["sigma_b_plus"] = rr.thresholds.sigma_b_plus;
    r["abel_b_minus"] = rr.thresholds.abel_b_minus;
    r["abel_b_plus"] = rr.thresholds.abel_b_plus;
    return r;
}

Record origin_record(const OriginReport& o)
{
    Record r;
    r["monodromic"] = o.monodromic;
    r["v1"] = o.v1;
    r["v2"] = o.v2 ? Record(*o.v2) : Record(nullptr);
    r["stability"] = to_string(o.stability);
    return r;
}

Record infinity_record(const InfinityReport& i)
{
    Record r;
    r["regular"] = i.regular;
    r["stability"] = to_string(i.stability);
    r["integral"] = i.integral_value + 0.0;
    r["neutral"] = i.neutral;
    return r;
}

Record equilibrium_record(const Equilibrium& e)
{
    Record r;
    r["r"] = e.r;
    r["theta"] = e.theta;
    r["x"] = e.x;
    r["y"] = e.y;
    r["kind"] = e.is_origin() ? "Origin" : to_string(e.kind);
    r["index"] = e.index_hint;
    r["lambda1_re"] = e.eigenvalues[0].real();
    r["lambda1_im"] = e.eigenvalues[0].imag();
    r["lambda2_re"] = e.eigenvalues[1].real();
    r["lambda2_im"] = e.eigenvalues[1].imag();
    return r;
}

Record cycle_record(const LimitCycle& c)
{
    Record r;
    r["rho_star"] = c.rho_star;
    r["residual"] = c.residual;
    r["multiplier"] = c.multiplier;
    r["stability"] = to_string(c.stability);
    r["hyperbolicity"] = to_string(c.hyperbolicity);
    r["orientation"] = c.orientation;
    r["surrounded_equilibria"] = c.surrounded_equilibria;
    r["orbit_samples"] = c.orbit.size();
    return r;
}

ScanOptions scan_options(const Tolerances& tol)
{
    ScanOptions so;
    so.return_map.tol = tol.integrate;
    so.cycle.tol_integrate = tol.integrate;
    so.cycle.tol_fixed_point = tol.fixed_point;
    so.cycle.equilibria.q_zero_tol = tol.q_zero;
    return so;
}

Record equilibria_record(const std::vector<Equilibrium>& eqs)
{
    Record r;
    r["count"] = eqs.size();
    Record kinds = Record::object();
    for (const Equilibrium& e : eqs) {
        const std::string k = e.is_origin() ? "Origin" : to_string(e.kind);
        kinds[k] = kinds.contains(k) ? kinds[k].get<int>() + 1 : 1;
    }
    r["by_kind"] = kinds;
    Record list = Record::array();
    for (const Equilibrium& e : eqs) {
        list.push_back(equilibrium_record(e));
    }
    r["list"] = list;
    return r;
}

Record scan_record(const ScanResult& scan)
{
    Record r;
    r["status"] = scan.degenerate ? "Degenerate" : (scan.cycles.empty() ? "None" : "Found");
    r["count"] = scan.cycles.size();
    r["gaps"] = scan.gaps.size();
    Record list = Record::array();
    for (const LimitCycle& c : scan.cycles) {
        list.push_back(cycle_record(c));
    }
    r["list"] = list;
    return r;
}

// ---------------------------------------------------------------- sweeps

const std::set<std::string> kParamNames{"p1", "p2", "s1", "s2"};

double& param_ref(SystemParams& p, const std::string& name)
{
    if (name == "p1") return p.p1;
    if (name == "p2") return p.p2;
    if (name == "s1") return p.s1;
    if (name == "s2") return p.s2;
    throw InvalidInput("unknown parameter name '" + name + "'");
}

double grid_value(double lo, double hi, int n, int i)
{
    return i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
}

Record grid_node(const SweepSpec& spec, const SystemParams& p)
{
    Record r;
    EquilibriaOptions eo;
    eo.q_zero_tol = spec.tol.q_zero;
    if (spec.mode == "fig1") {
        const RegionReport rr = region_report(p, eo);
        const SigmaThresholds& t = rr.thresholds;
        r["sigma_a_minus"] = t.sigma_a_minus;
        r["sigma_a_plus"] = t.sigma_a_plus;
        r["sigma_b_minus"] = t.sigma_b_minus;
        r["sigma_b_plus"] = t.sigma_b_plus;
        r["in_sigma_a"] = p.p1 > t.sigma_a_minus && p.p1 < t.sigma_a_plus;
        r["in_sigma_b"] = p.p1 > t.sigma_b_minus && p.p1 < t.sigma_b_plus;
        r["certificate"] = to_string(rr.certificate);
        return r;
    }
    if (spec.mode == "fig2") {
        const QuadraticFormValue q = quadratic_form(p, spec.tol.q_zero);
        r["q"] = q.value;
        r["q_sign"] = to_string(q.sign);
        r["equilibria_count"] = equilibrium_count(p, eo);
        // The Q = 0 lines, as p1 at this p2.
        const SigmaThresholds t = sigma_thresholds(p);
        r["q_zero_p1_minus"] = t.sigma_a_minus;
        r["q_zero_p1_plus"] = t.sigma_a_plus;
        return r;
    }
    const RegionReport rr = region_report(p, eo);
    r["q"] = rr.q.value;
    r["q_sign"] = to_string(rr.q.sign);
    r["equilibria_count"] = rr.equilibria_count;
    r["condition_i"] = rr.condition_i;
    r["condition_ii"] = rr.condition_ii;
    r["certificate"] = to_string(rr.certificate);
    r["origin"] = to_string(origin_report(p).stability);
    r["infinity"] = to_string(infinity_report(p).stability);
    if (spec.cycles) {
        const ScanResult scan = scan_cycles(p, default_scan_radius(p), 120, scan_options(spec.tol));
        r["cycles_status"] = scan.degenerate ? "Degenerate" : (scan.cycles.empty() ? "None" : "Found");
        r["cycles_count"] = scan.cycles.size();
        r["cycles_gaps"] = scan.gaps.size();
    }
    return r;
}

std::vector<Record> fig3_records(const SweepSpec& spec)
{
    const SigmaThresholds t = sigma_thresholds(spec.fixed);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Record> out;
    auto add = [&](const char* set, double lo, double hi) {
        Record r;
        r["p2"] = spec.fixed.p2;
        r["s1"] = spec.fixed.s1;
        r["s2"] = spec.fixed.s2;
        r["set"] = set;
        r["lo"] = lo;
        r["hi"] = hi;
        out.push_back(r);
    };
    add("a_keeps_sign", -inf, t.sigma_a_minus);
    add("a_keeps_sign", t.sigma_a_plus, inf);
    add("b_keeps_sign", -inf, t.abel_b_minus);
    add("b_keeps_sign", t.abel_b_plus, inf);
    add("condition_ii", -inf, t.sigma_b_minus);
    add("condition_ii", t.sigma_b_plus, inf);
    if (spec.fixed.s2 * spec.fixed.p2 < 0.0) {
        add("thirteen_equilibria", t.sigma_a_minus, t.sigma_a_plus);
    }
    return out;
}

// ---------------------------------------------------------------- example pipeline

struct Check {
    std::string name;
    std::string kind;
    double expected;
    double value;
    double tolerance;
    bool pass;
};

Record check_record(const Check& c)
{
    Record r;
    r["name"] = c.name;
    r["kind"] = c.kind;
    r["expected"] = c.expected;
    r["value"] = c.value;
    r["tolerance"] = c.tolerance;
    r["pass"] = c.pass;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- public

std::string dump_json(const Record& r)
{
    std::string s;
    dump_into(s, r);
    return s;
}

std::vector<std::pair<std::string, Record>> flatten(const Record& r)
{
    std::vector<std::pair<std::string, Record>> out;
    flatten_into(out, "", r);
    return out;
}

std::string csv_header(const Record& r)
{
    std::string s;
    for (const auto& [k, v] : flatten(r)) {
        s += (s.empty() ? "" : ",") + k;
    }
    return s;
}

std::string csv_row(const Record& r)
{
    std::string s;
    bool first = true;
    for (const auto& [k, v] : flatten(r)) {
        s += (first ? "" : ",") + csv_cell(v);
        first = false;
    }
    return s;
}

void write_records(std::ostream& out, const std::vector<Record>& records, Format format)
{
    switch (format) {
    case Format::Jsonl:
        for (const Record& r : records) {
            out << dump_json(r) << '\n';
        }
        break;
    case Format::Csv: {
        // Union of columns in first-seen order; records without a column leave it empty.
        std::vector<std::string> columns;
        std::set<std::string> seen;
        std::vector<std::vector<std::pair<std::string, Record>>> flat;
        for (const Record& r : records) {
            flat.push_back(flatten(r));
            for (const auto& kv : flat.back()) {
                if (seen.insert(kv.first).second) {
                    columns.push_back(kv.first);
                }
            }
        }
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << columns[i];
        }
        out << '\n';
        for (const auto& row : flat) {
            for (std::size_t i = 0; i < columns.size(); ++i) {
                auto it = std::find_if(row.begin(), row.end(), [&](const auto& kv) { return kv.first == columns[i]; });
                out << (i ? "," : "") << (it == row.end() ? std::string() : csv_cell(it->second));
            }
            out << '\n';
        }
        break;
    }
    case Format::Text:
        for (std::size_t n = 0; n < records.size(); ++n) {
            if (n > 0) {
                out << '\n';
            }
            const auto flat = flatten(records[n]);
            std::size_t width = 0;
            for (const auto& kv : flat) {
                width = std::max(width, kv.first.size());
            }
            for (const auto& [k, v] : flat) {
                out << k << std::string(width + 2 - k.size(), ' ') << scalar_text(v) << '\n';
            }
        }
        break;
    }
}

Record analysis_record(const SystemParams& params, const Tolerances& tol, bool with_cycles, int scan_nodes)
{
    params.require_regular_regime("analyze");
    EquilibriaOptions eo;
    eo.q_zero_tol = tol.q_zero;
    Record r;
    r["params"] = params_record(params);
    Record warnings = Record::array();
    for (const std::string& w : params.boundary_warnings()) {
        warnings.push_back(w);
    }
    r["warnings"] = warnings;
    r["region"] = region_record(region_report(params, eo));
    r["origin"] = origin_record(origin_report(params));
    r["infinity"] = infinity_record(infinity_report(params));
    r["equilibria"] = equilibria_record(solve_equilibria(params, eo));
    if (with_cycles) {
        r["cycles"] = scan_record(scan_cycles(params, default_scan_radius(params), scan_nodes, scan_options(tol)));
    }
    return r;
}

void SweepSpec::validate() const
{
    static const std::set<std::string> modes{"fig1", "fig2", "fig3", "grid"};
    if (!modes.contains(mode)) {
        throw InvalidInput("unknown sweep mode '" + mode + "'");
    }
    if (mode == "fig3") {
        return;
    }
    if (!kParamNames.contains(x_name) || !kParamNames.contains(y_name)) {
        throw InvalidInput("swept names must be among p1, p2, s1, s2");
    }
    if (x_name == y_name) {
        throw InvalidInput("swept names must be distinct");
    }
    if (nx < 2 || ny < 2) {
        throw InvalidInput("grid resolutions must be at least 2");
    }
    if (jobs < 1) {
        throw InvalidInput("--jobs must be at least 1");
    }
}

std::vector<Record> run_sweep(const SweepSpec& spec_in)
{
    SweepSpec spec = spec_in;
    if (spec.mode == "fig1") {
        spec.x_name = "s1";
        spec.y_name = "p1";
    } else if (spec.mode == "fig2") {
        spec.x_name = "p1";
        spec.y_name = "p2";
    }
    spec.validate();
    if (spec.mode == "fig3") {
        return fig3_records(spec);
    }

    const std::size_t total = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
    std::vector<Record> out(total);
    auto evaluate = [&](std::size_t k) {
        const int i = static_cast<int>(k % spec.nx);
        const int j = static_cast<int>(k / spec.nx);
        SystemParams p = spec.fixed;
        const double x = grid_value(spec.x_min, spec.x_max, spec.nx, i);
        const double y = grid_value(spec.y_min, spec.y_max, spec.ny, j);
        param_ref(p, spec.x_name) = x;
        param_ref(p, spec.y_name) = y;
        Record r;
        r["i"] = i;
        r["j"] = j;
        r[spec.x_name] = x;
        r[spec.y_name] = y;
        try {
            const Record node = grid_node(spec, p);
            for (const auto& [key, value] : node.items()) {
                r[key] = value;
            }
        } catch (const std::exception& e) {
            r["error"] = std::string(error_name(e)) + ": " + e.what();
        }
        out[k] = std::move(r);
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), total);
    if (workers <= 1) {
        for (std::size_t k = 0; k < total; ++k) {
            evaluate(k);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < total; k = next++) {
                evaluate(k);
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    return out;
}

Record example42_report(const SystemParams& params, const Tolerances& tol)
{
    std::vector<Check> checks;
    auto near = [&](const std::string& name, const std::string& kind, double expected, double value, double t) {
        checks.push_back({name, kind, expected, value, t, std::abs(value - expected) <= t});
    };
    auto flag = [&](const std::string& name, const std::string& kind, bool ok) {
        checks.push_back({name, kind, 1.0, ok ? 1.0 : 0.0, 0.0, ok});
    };

    EquilibriaOptions eo;
    eo.q_zero_tol = tol.q_zero;
    const SigmaThresholds t = sigma_thresholds(params);
    near("sigma_a_minus", "reference", -0.52423, t.sigma_a_minus, 1e-4);
    near("sigma_a_plus", "reference", 3.25151, t.sigma_a_plus, 1e-4);

    const SystemParams at = at_sigma_a(params.p2, params.s1, params.s2, true);
    const auto eqs = solve_equilibria(at, eo);
    near("equilibria_at_sigma_a_plus", "invariant", 7.0, static_cast<double>(eqs.size()), 0.0);

    const SaddleNodeData sn = saddle_node_data(at, eo);
    const CartesianState z0{sn.equilibrium.x, sn.equilibrium.y};
    near("saddle_node_x", "reference", 1.358, z0.x, 5e-3);
    near("saddle_node_y", "reference", 1.5, z0.y, 5e-3);
    {
        const double vx = kExampleNormalY;  // the reference eigenvector (-0.8594, -0.5114)
        const double vy = -kExampleNormalX;
        const double cross = sn.eigenvector.x * vy - sn.eigenvector.y * vx;
        const double dotp = sn.eigenvector.x * vx + sn.eigenvector.y * vy;
        near("eigenvector_angle", "reference", 0.0, std::abs(std::atan(cross / dotp)), 1e-3);
    }

    // Line R through the computed saddle-node with the reference slope and normal, parameterized by x.
    const double slope = -kExampleNormalX / kExampleNormalY;
    const RealPoly quintic =
        scalar_product_poly(at, {0.0, z0.y - slope * z0.x}, {1.0, slope}, {kExampleNormalX, kExampleNormalY});
    static const double reference[6] = {-0.92289951077311, -2.33924612305747, -2.71272659052423,
                                      4.86235167862649,  2.34410741916533,  -2.39191647949065};
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        worst = std::max(worst, std::abs(quintic[i] - reference[i]) / std::abs(reference[i]));
    }
    near("quintic_coefficients_rel", "reference", 0.0, worst, 1e-6);
    std::vector<double> crossing;
    for (const RealRoot& r : real_roots(quintic)) {
        if (r.crossing) {
            crossing.push_back(r.value);
        }
    }
    near("quintic_sign_changing_roots", "reference", 1.0, static_cast<double>(crossing.size()), 0.0);
    const double root = crossing.empty() ? std::numeric_limits<double>::quiet_NaN() : crossing.front();
    near("quintic_root", "reference", -1.1737, root, 1e-3);
    {
        // Negative on (root, root + 10], away from the double root at the saddle-node.
        bool negative = crossing.size() == 1;
        for (int k = 1; k <= 2000 && negative; ++k) {
            const double x = root + 0.005 * k;
            negative = quintic(x) < 0.0 || std::abs(x - z0.x) < kRootClusterTol;
        }
        flag("quintic_negative_beyond_root", "reference", negative);
    }

    // Restriction of the field to the diagonal: (y' - x') = 4 x^3 (p2 + 2 (s2 - 1) x^2).
    {
        const RealPoly diag = scalar_product_poly(at, {0.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0});
        const RealPoly expected{0.0, 0.0, 0.0, 4.0 * at.p2, 0.0, 8.0 * (at.s2 - 1.0)};
        double err = 0.0;
        for (int i = 0; i <= 5; ++i) {
            err = std::max(err, std::abs(diag[i] - expected[i]));
        }
        near("diagonal_restriction", "invariant", 0.0, err, 1e-12 * (1.0 + std::abs(at.p2) + std::abs(at.s2)));
        const double end = 2.0 * std::sqrt(-at.p2 / (9.0 * at.s2 - 8.0));
        const TransversalityReport rep =
            verify_transversality(at, Segment::between({0.0, 0.0}, {end, end}));
        flag("diagonal_segment_negative", "reference", rep.sign == TransversalSign::AlwaysNegative);
    }

    const Polygonal poly = example_polygonal(at);
    near("polygonal_x1", "reference", 1.4250, poly.segments[1].end().x, 1e-3);
    near("polygonal_y1", "reference", 1.5399, poly.segments[1].end().y, 1e-3);
    bool certified = true;
    for (const TransversalityReport& rep : poly.reports) {
        certified = certified && rep.sign == TransversalSign::AlwaysNegative;
    }
    flag("polygonal_certified", "reference", certified);

    flag("origin_repels", "invariant", origin_report(at).stability == OriginStability::Repellor);
    flag("infinity_repels", "invariant", infinity_report(at).stability == InfinityStability::Repellor);

    CycleOptions co;
    co.tol_integrate = tol.integrate;
    co.tol_fixed_point = tol.fixed_point;
    co.equilibria = eo;
    ScanOptions so = scan_options(tol);
    const ScanResult scan = scan_cycles(at, default_scan_radius(at), 200, so);
    near("cycle_count", "invariant", 1.0, static_cast<double>(scan.cycles.size()), 0.0);
    if (scan.cycles.size() == 1) {
        const LimitCycle& c = scan.cycles.front();
        near("cycle_surrounded_equilibria", "invariant", 7.0, c.surrounded_equilibria, 0.0);
        // The cycle must enclose every vertex of the polygonal and of its rotated copies.
        std::vector<CartesianState> vertices;
        for (int k = 0; k < 6; ++k) {
            const Complex g = std::polar(1.0, k * kSextant);
            for (const Segment& s : poly.segments) {
                const Complex z = g * Complex(s.end().x, s.end().y);
                vertices.push_back({z.real(), z.imag()});
            }
        }
        near("cycle_encloses_polygonal", "invariant", static_cast<double>(vertices.size()),
             count_enclosed(c.orbit_points(), vertices), 0.0);
        flag("cycle_stable", "invariant", c.stability == CycleStability::Stable);
    }

    Record r;
    r["params"] = params_record(params);
    Record list = Record::array();
    int failed = 0;
    for (const Check& c : checks) {
        list.push_back(check_record(c));
        failed += c.pass ? 0 : 1;
    }
    r["checks"] = list;
    r["passed"] = static_cast<int>(checks.size()) - failed;
    r["failed"] = failed;
    return r;
}

// ---------------------------------------------------------------- entry point

namespace {

struct ParamArgs {
    std::string p1 = "0";
    double p2 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

double parse_number(const std::string& s, const char* what)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
        throw InvalidInput(std::string("cannot parse ") + what + " value '" + s + "'");
    }
    return v;
}

SystemParams resolve(const ParamArgs& a)
{
    if (a.p1 == "sigma_a+" || a.p1 == "sigma_a-") {
        return SystemParams::make(at_sigma_a(a.p2, a.s1, a.s2, a.p1 == "sigma_a+").p1, a.p2, a.s1, a.s2);
    }
    return SystemParams::make(parse_number(a.p1, "--p1"), a.p2, a.s1, a.s2);
}

void add_param_options(CLI::App* sub, ParamArgs& a, bool p1 = true)
{
    if (p1) {
        sub->add_option("--p1", a.p1, "p1, or sigma_a+ / sigma_a- for the thresholds of (p2, s1, s2)");
    }
    sub->add_option("--p2", a.p2, "p2");
    sub->add_option("--s1", a.s1, "s1");
    sub->add_option("--s2", a.s2, "s2");
}

Format parse_format(const std::string& s)
{
    if (s == "jsonl") return Format::Jsonl;
    if (s == "csv") return Format::Csv;
    return Format::Text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Phase-portrait analysis of the quintic Z6-equivariant planar field"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Tolerances tol;
    std::string format = "text";
    std::string output;
    auto add_common = [&](CLI::App* sub, const char* default_format) {
        sub->add_option("--tol-integrate", tol.integrate, "local integration tolerance");
        sub->add_option("--tol-fixed-point", tol.fixed_point, "fixed-point residual tolerance");
        sub->add_option("--tol-q-zero", tol.q_zero, "relative zero tolerance of Q");
        sub->add_option("--format", format, "text, jsonl or csv")
            ->check(CLI::IsMember({"text", "jsonl", "csv"}))
            ->default_str(default_format);
        sub->add_option("-o,--output", output, "write records to a file instead of standard output");
    };

    ParamArgs pa;
    auto* analyze = app.add_subcommand("analyze", "full classification at one parameter point");
    add_param_options(analyze, pa);
    add_common(analyze, "text");
    bool no_cycles = false;
    int scan_nodes = 200;
    analyze->add_flag("--no-cycles", no_cycles, "skip the limit-cycle scan");
    analyze->add_option("--scan-nodes", scan_nodes, "radii sampled by the limit-cycle scan")->check(CLI::Range(100, 100000));

    SweepSpec spec;
    auto* sweep = app.add_subcommand("sweep", "parameter-plane sweeps and figure data");
    sweep->add_option("--mode", spec.mode, "fig1, fig2, fig3 or grid")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "grid"}));
    sweep->add_option("--p1", spec.fixed.p1, "fixed p1");
    sweep->add_option("--p2", spec.fixed.p2, "fixed p2");
    sweep->add_option("--s1", spec.fixed.s1, "fixed s1");
    sweep->add_option("--s2", spec.fixed.s2, "fixed s2");
    sweep->add_option("--x", spec.x_name, "first swept parameter (grid mode)");
    sweep->add_option("--y", spec.y_name, "second swept parameter (grid mode)");
    sweep->add_option("--x-min", spec.x_min);
    sweep->add_option("--x-max", spec.x_max);
    sweep->add_option("--y-min", spec.y_min);
    sweep->add_option("--y-max", spec.y_max);
    sweep->add_option("--nx", spec.nx, "grid points along x");
    sweep->add_option("--ny", spec.ny, "grid points along y");
    sweep->add_option("--jobs", spec.jobs, "worker threads");
    sweep->add_flag("--cycles", spec.cycles, "scan for limit cycles at every node (grid mode)");
    add_common(sweep, "jsonl");

    ParamArgs sa;
    auto* sigma = app.add_subcommand("sigma", "thresholds in p1 for fixed (p2, s1, s2)");
    add_param_options(sigma, sa, false);
    add_common(sigma, "text");

    ParamArgs ea;
    int brute = 0;
    auto* equilibria = app.add_subcommand("equilibria", "closed-form equilibria and their classification");
    add_param_options(equilibria, ea);
    add_common(equilibria, "text");
    equilibria->add_option("--brute-force", brute, "also run a grid search with this resolution (>= 100)");

    ParamArgs la;
    double rho_lo = 0.0;
    double rho_hi = 0.0;
    auto* cycle = app.add_subcommand("limit-cycle", "limit cycle in a bracket on the section theta = 0");
    add_param_options(cycle, la);
    add_common(cycle, "text");
    cycle->add_option("--rho-lo", rho_lo, "inner end of the bracket (default: automatic)");
    cycle->add_option("--rho-hi", rho_hi, "outer end of the bracket (default: automatic)");
    bool dump_orbit = false;
    cycle->add_flag("--orbit", dump_orbit, "emit the orbit samples");

    ParamArgs ta;
    std::vector<double> from;
    std::vector<double> to;
    bool polygonal = false;
    auto* trans = app.add_subcommand("transversality", "scalar product of the field with a segment normal");
    add_param_options(trans, ta);
    add_common(trans, "text");
    trans->add_option("--from", from, "start point x y")->expected(2);
    trans->add_option("--to", to, "end point x y")->expected(2);
    trans->add_flag("--polygonal", polygonal, "build and certify the no-contact polygonal");

    ParamArgs xa;
    xa.p2 = -1.0;
    xa.s1 = -0.5;
    xa.s2 = 1.2;
    bool json = false;
    auto* example = app.add_subcommand("example42", "worked-example pipeline with reference checks");
    add_param_options(example, xa, false);
    add_common(example, "text");
    example->add_flag("--json", json, "machine-readable check list (one JSON line)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Logger logger(err);
    Format fmt = parse_format(format);
    if (format == "text" && sweep->parsed()) {
        fmt = Format::Jsonl;
    }
    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) {
            err << "error: cannot open " << output << '\n';
            return 2;
        }
    }
    std::ostream& sink = output.empty() ? out : file;

    try {
        if (analyze->parsed()) {
            const SystemParams p = resolve(pa);
            for (const std::string& w : p.boundary_warnings()) {
                logger.log(LogLevel::Warn, w);
            }
            logger.log(LogLevel::Info, "analyze p1=" + format_double(p.p1));
            write_records(sink, {analysis_record(p, tol, !no_cycles, scan_nodes)}, fmt);
            return 0;
        }
        if (sweep->parsed()) {
            if (!sweep->count("--format")) {
                fmt = Format::Jsonl;
            }
            spec.tol = tol;
            const auto records = run_sweep(spec);
            std::size_t failures = 0;
            for (const Record& r : records) {
                failures += r.contains("error") ? 1 : 0;
            }
            logger.log(LogLevel::Info, std::to_string(records.size()) + " records, " + std::to_string(failures) +
                                           " with errors");
            write_records(sink, records, fmt);
            return 0;
        }
        if (sigma->parsed()) {
            const SystemParams p = SystemParams::make(0.0, sa.p2, sa.s1, sa.s2);
            const SigmaThresholds t = sigma_thresholds(p);
            Record r;
            r["p2"] = p.p2;
            r["s1"] = p.s1;
            r["s2"] = p.s2;
            r["sigma_a_minus"] = t.sigma_a_minus;
            r["sigma_a_plus"] = t.sigma_a_plus;
            r["sigma_b_minus"] = t.sigma_b_minus;
            r["sigma_b_plus"] = t.sigma_b_plus;
            r["abel_b_minus"] = t.abel_b_minus;
            r["abel_b_plus"] = t.abel_b_plus;
            write_records(sink, {r}, fmt);
            return 0;
        }
        if (equilibria->parsed()) {
            const SystemParams p = resolve(ea);
            EquilibriaOptions eo;
            eo.q_zero_tol = tol.q_zero;
            const auto eqs = solve_equilibria(p, eo);
            std::vector<Record> records;
            for (const Equilibrium& e : eqs) {
                Record r = equilibrium_record(e);
                r["residual"] = equilibrium_residual(p, e);
                records.push_back(r);
            }
            if (brute > 0) {
                const auto found = brute_force_equilibria(p, brute);
                logger.log(LogLevel::Info, "grid search found " + std::to_string(found.size()) + " nonzero equilibria");
                if (found.size() + 1 != eqs.size()) {
                    err << "warning: grid search found " << found.size() + 1 << " equilibria, closed form "
                        << eqs.size() << '\n';
                }
            }
            write_records(sink, records, fmt);
            return 0;
        }
        if (cycle->parsed()) {
            const SystemParams p = resolve(la);
            std::pair<double, double> bracket = default_bracket(p);
            if (rho_lo > 0.0) {
                bracket.first = rho_lo;
            }
            if (rho_hi > 0.0) {
                bracket.second = rho_hi;
            }
            CycleOptions co;
            co.tol_integrate = tol.integrate;
            co.tol_fixed_point = tol.fixed_point;
            co.equilibria.q_zero_tol = tol.q_zero;
            const LimitCycle c = find_limit_cycle(p, bracket, co);
            std::vector<Record> records{cycle_record(c)};
            if (dump_orbit) {
                records.clear();
                for (std::size_t i = 0; i < c.orbit.size(); ++i) {
                    const CartesianState q = to_cartesian(PolarState{c.orbit.value(i), c.orbit.independent[i]});
                    Record r;
                    r["theta"] = c.orbit.independent[i];
                    r["r"] = c.orbit.value(i);
                    r["x"] = q.x;
                    r["y"] = q.y;
                    records.push_back(r);
                }
            }
            write_records(sink, records, fmt);
            return 0;
        }
        if (trans->parsed()) {
            const SystemParams p = resolve(ta);
            std::vector<TransversalityReport> reports;
            if (polygonal) {
                reports = build_polygonal(p).reports;
            } else {
                if (from.size() != 2 || to.size() != 2) {
                    throw InvalidInput("transversality needs --from x y and --to x y, or --polygonal");
                }
                reports.push_back(verify_transversality(p, Segment::between({from[0], from[1]}, {to[0], to[1]})));
            }
            std::vector<Record> records;
            for (const TransversalityReport& rep : reports) {
                Record r;
                r["x0"] = rep.segment.start().x;
                r["y0"] = rep.segment.start().y;
                r["x1"] = rep.segment.end().x;
                r["y1"] = rep.segment.end().y;
                r["normal_x"] = rep.segment.normal.x;
                r["normal_y"] = rep.segment.normal.y;
                r["sign"] = to_string(rep.sign);
                r["margin"] = rep.margin;
                r["empty_domain"] = rep.empty_domain;
                Record coeffs = Record::array();
                for (int i = 0; i <= 5; ++i) {
                    coeffs.push_back(rep.poly[i]);
                }
                r["coefficients"] = coeffs;
                r["crossing_roots"] = rep.crossing_roots;
                r["touching_roots"] = rep.touching_roots;
                records.push_back(r);
            }
            write_records(sink, records, fmt);
            return 0;
        }
        if (example->parsed()) {
            const SystemParams p = SystemParams::make(0.0, xa.p2, xa.s1, xa.s2);
            const Record report = example42_report(p, tol);
            if (json) {
                sink << dump_json(report) << '\n';
            } else if (fmt == Format::Text) {
                for (const Record& c : report["checks"]) {
                    char line[200];
                    std::snprintf(line, sizeof line, "%-4s %-30s %-9s value=%-24s expected=%-12s tol=%s\n",
                                  c["pass"].get<bool>() ? "PASS" : "FAIL", c["name"].get<std::string>().c_str(),
                                  c["kind"].get<std::string>().c_str(),
                                  format_double(c["value"].get<double>()).c_str(),
                                  format_double(c["expected"].get<double>()).c_str(),
                                  format_double(c["tolerance"].get<double>()).c_str());
                    sink << line;
                }
                sink << report["passed"].get<int>() << " passed, " << report["failed"].get<int>() << " failed\n";
            } else {
                std::vector<Record> rows(report["checks"].begin(), report["checks"].end());
                write_records(sink, rows, fmt);
            }
            return report["failed"].get<int>() == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        Record diag;
        diag["error"] = error_name(e);
        diag["message"] = e.what();
        err << dump_json(diag) << '\n';
        return exit_code_for(e);
    }
    return 2;
}

}  // namespace z6::cli
