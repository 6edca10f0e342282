///
/// \file sweep.hpp
///
/// Declarative parameter sweeps: configuration parsing, analytic/asymptotic/
/// Monte Carlo evaluation along one axis, MC-vs-analytic validation, required
/// SNR tables, and CSV output.
///
/// Configuration is a JSON object. Every key is optional except "axis";
/// unknown keys are rejected at every level.
///
///     {
///       "base": {                      // SystemConfig, defaults shown
///         "n_reflectors": 64, "tx_power": 1.0, "noise_power": 1.0,
///         "dist_sr": 1.0, "dist_rd": 1.0, "pathloss_exp": 2.0,
///         "rate": 1.0, "max_rounds": 1
///       },
///       "axis": "snr_db" | "n_reflectors" | "rounds" | "pathloss_exp",
///       "grid": [v0, v1, ...] | {"start": a, "stop": b, "step": h},
///       "engines": ["analytic", "asymptotic", "mc_exact", "mc_clt"],  // default ["analytic"]
///       "mc": {"trials": 1000000, "seed": 0, "shards": <hardware threads>},
///       "target_pout": 0.001,          // used by the gain table
///       "output_path": ""              // empty: standard output
///     }
///
/// Default grids: snr_db -10..30 step 2; n_reflectors 8,16,32,64,128,256;
/// rounds 1,2,3,4; pathloss_exp 2..4 step 0.25. The snr_db axis is the
/// transmit SNR Ps/N0 in dB; it sets tx_power = noise_power * 10^(v/10).
///
#ifndef IRS_HARQ_SWEEP_HPP
#define IRS_HARQ_SWEEP_HPP

#include <irs_harq/analysis.hpp>
#include <irs_harq/channel_model.hpp>
#include <irs_harq/errors.hpp>
#include <irs_harq/mc_simulator.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <limits>
#include <vector>

namespace irs_harq
{

/// Malformed or invalid configuration document.
class config_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Axis
{
    snr_db,
    n_reflectors,
    rounds,
    pathloss_exp,
};

/// Declaration order is the row order within one axis value.
enum class Engine
{
    analytic,
    asymptotic,
    mc_exact,
    mc_clt,
};

inline std::string_view to_string(Axis a)
{
    switch (a)
    {
    case Axis::snr_db: return "snr_db";
    case Axis::n_reflectors: return "n_reflectors";
    case Axis::rounds: return "rounds";
    case Axis::pathloss_exp: return "pathloss_exp";
    }
    return "?";
}

inline std::string_view to_string(Engine e)
{
    switch (e)
    {
    case Engine::analytic: return "analytic";
    case Engine::asymptotic: return "asymptotic";
    case Engine::mc_exact: return "mc_exact";
    case Engine::mc_clt: return "mc_clt";
    }
    return "?";
}

inline bool is_monte_carlo(Engine e) { return e == Engine::mc_exact || e == Engine::mc_clt; }

struct McSettings
{
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed   = 0;
    unsigned shards      = default_shard_count();

    bool operator==(const McSettings&) const = default;
};

struct SweepSpec
{
    SystemConfig base;
    Axis axis = Axis::snr_db;
    std::vector<double> grid;
    std::vector<Engine> engines{Engine::analytic};
    McSettings mc;
    double target_pout = 1e-3;
    std::string output_path;

    bool operator==(const SweepSpec& o) const
    {
        const auto base_tuple = [](const SystemConfig& c)
        {
            return std::tie(c.n_reflectors, c.tx_power, c.noise_power, c.dist_sr, c.dist_rd,
                            c.pathloss_exp, c.rate, c.max_rounds);
        };
        return base_tuple(base) == base_tuple(o.base) && axis == o.axis && grid == o.grid &&
               engines == o.engines && mc == o.mc && target_pout == o.target_pout &&
               output_path == o.output_path;
    }
};

//==============================================================================
// Number formatting
//==============================================================================

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

//==============================================================================
// Parsing
//==============================================================================
namespace detail
{

inline std::vector<double> default_grid(Axis axis)
{
    switch (axis)
    {
    case Axis::snr_db:
    {
        std::vector<double> g;
        for (int v = -10; v <= 30; v += 2)
        {
            g.push_back(v);
        }
        return g;
    }
    case Axis::n_reflectors: return {8, 16, 32, 64, 128, 256};
    case Axis::rounds: return {1, 2, 3, 4};
    case Axis::pathloss_exp: return {2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0};
    }
    return {};
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::string_view where,
                                std::initializer_list<std::string_view> allowed)
{
    for (const auto& item : obj.items())
    {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
        {
            throw config_error("unknown key '" + item.key() + "' in " + std::string(where));
        }
    }
}

inline const nlohmann::json& require_object(const nlohmann::json& j, std::string_view field)
{
    if (!j.is_object())
    {
        throw config_error("field '" + std::string(field) + "': expected an object");
    }
    return j;
}

inline double read_real(const nlohmann::json& j, std::string_view field)
{
    if (!j.is_number())
    {
        throw config_error("field '" + std::string(field) + "': expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v))
    {
        throw config_error("field '" + std::string(field) + "': must be finite");
    }
    return v;
}

inline std::int64_t read_integer(const nlohmann::json& j, std::string_view field)
{
    if (!j.is_number_integer())
    {
        throw config_error("field '" + std::string(field) + "': expected an integer");
    }
    return j.get<std::int64_t>();
}

inline std::uint64_t read_unsigned(const nlohmann::json& j, std::string_view field)
{
    if (!j.is_number_unsigned())
    {
        throw config_error("field '" + std::string(field) + "': expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

inline std::string line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col  = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
        {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline Axis parse_axis(const nlohmann::json& j)
{
    if (!j.is_string())
    {
        throw config_error("field 'axis': expected a string");
    }
    const auto name = j.get<std::string>();
    for (Axis a : {Axis::snr_db, Axis::n_reflectors, Axis::rounds, Axis::pathloss_exp})
    {
        if (name == to_string(a))
        {
            return a;
        }
    }
    throw config_error("field 'axis': unknown axis '" + name + "'");
}

inline Engine parse_engine(const nlohmann::json& j)
{
    if (!j.is_string())
    {
        throw config_error("field 'engines': entries must be strings");
    }
    const auto name = j.get<std::string>();
    for (Engine e : {Engine::analytic, Engine::asymptotic, Engine::mc_exact, Engine::mc_clt})
    {
        if (name == to_string(e))
        {
            return e;
        }
    }
    throw config_error("field 'engines': unknown engine '" + name + "'");
}

inline std::vector<double> parse_grid(const nlohmann::json& j)
{
    std::vector<double> grid;
    if (j.is_array())
    {
        for (const auto& v : j)
        {
            grid.push_back(read_real(v, "grid"));
        }
        return grid;
    }
    if (j.is_object())
    {
        reject_unknown_keys(j, "grid", {"start", "stop", "step"});
        if (!j.contains("start") || !j.contains("stop") || !j.contains("step"))
        {
            throw config_error("field 'grid': range form needs start, stop and step");
        }
        const double start = read_real(j.at("start"), "grid.start");
        const double stop  = read_real(j.at("stop"), "grid.stop");
        const double step  = read_real(j.at("step"), "grid.step");
        if (step <= 0.0 || stop < start)
        {
            throw config_error("field 'grid': range needs step > 0 and stop >= start");
        }
        const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000)
        {
            throw config_error("field 'grid': range has too many points");
        }
        for (std::int64_t i = 0; i < count; ++i)
        {
            grid.push_back(start + static_cast<double>(i) * step);
        }
        return grid;
    }
    throw config_error("field 'grid': expected an array or a {start, stop, step} object");
}

inline void validate_grid(Axis axis, const std::vector<double>& grid)
{
    if (grid.empty())
    {
        throw config_error("field 'grid': must not be empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
    {
        if (!(grid[i] > grid[i - 1]))
        {
            throw config_error("field 'grid': values must be strictly increasing (no duplicates)");
        }
    }
    for (double v : grid)
    {
        switch (axis)
        {
        case Axis::n_reflectors:
        case Axis::rounds:
            if (v < 1.0 || v != std::floor(v) || v > 1e9)
            {
                throw config_error("field 'grid': " + std::string(to_string(axis)) +
                                   " values must be positive integers");
            }
            break;
        case Axis::pathloss_exp:
            if (v < 1.0)
            {
                throw config_error("field 'grid': pathloss_exp values must be >= 1");
            }
            break;
        case Axis::snr_db: break;
        }
    }
}

} // namespace detail

/// Parses and validates a configuration document.
inline SweepSpec parse_config(std::string_view text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text.begin(), text.end());
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw config_error("config parse error at " + detail::line_column(text, e.byte) + ": " +
                           e.what());
    }
    if (!doc.is_object())
    {
        throw config_error("config: top level must be an object");
    }
    detail::reject_unknown_keys(doc, "config",
                                {"base", "axis", "grid", "engines", "mc", "target_pout",
                                 "output_path"});

    SweepSpec spec;
    if (doc.contains("base"))
    {
        const auto& base = detail::require_object(doc.at("base"), "base");
        detail::reject_unknown_keys(base, "base",
                                    {"n_reflectors", "tx_power", "noise_power", "dist_sr",
                                     "dist_rd", "pathloss_exp", "rate", "max_rounds"});
        SystemConfig& c = spec.base;
        auto real       = [&](const char* key, double& out)
        {
            if (base.contains(key))
            {
                out = detail::read_real(base.at(key), std::string("base.") + key);
            }
        };
        auto integer = [&](const char* key, std::int64_t& out)
        {
            if (base.contains(key))
            {
                out = detail::read_integer(base.at(key), std::string("base.") + key);
            }
        };
        integer("n_reflectors", c.n_reflectors);
        real("tx_power", c.tx_power);
        real("noise_power", c.noise_power);
        real("dist_sr", c.dist_sr);
        real("dist_rd", c.dist_rd);
        real("pathloss_exp", c.pathloss_exp);
        real("rate", c.rate);
        integer("max_rounds", c.max_rounds);
    }
    try
    {
        spec.base.validate();
    }
    catch (const domain_error& e)
    {
        throw config_error(std::string("field 'base': ") + e.what());
    }

    if (!doc.contains("axis"))
    {
        throw config_error("field 'axis': required");
    }
    spec.axis = detail::parse_axis(doc.at("axis"));
    spec.grid = doc.contains("grid") ? detail::parse_grid(doc.at("grid"))
                                     : detail::default_grid(spec.axis);
    detail::validate_grid(spec.axis, spec.grid);

    if (doc.contains("engines"))
    {
        const auto& engines = doc.at("engines");
        if (!engines.is_array())
        {
            throw config_error("field 'engines': expected an array");
        }
        std::set<Engine> chosen;
        for (const auto& e : engines)
        {
            chosen.insert(detail::parse_engine(e));
        }
        if (chosen.empty())
        {
            throw config_error("field 'engines': must not be empty");
        }
        spec.engines.assign(chosen.begin(), chosen.end());
    }

    if (doc.contains("mc"))
    {
        const auto& mc = detail::require_object(doc.at("mc"), "mc");
        detail::reject_unknown_keys(mc, "mc", {"trials", "seed", "shards"});
        if (mc.contains("trials"))
        {
            spec.mc.trials = detail::read_unsigned(mc.at("trials"), "mc.trials");
        }
        if (mc.contains("seed"))
        {
            spec.mc.seed = detail::read_unsigned(mc.at("seed"), "mc.seed");
        }
        if (mc.contains("shards"))
        {
            const auto shards = detail::read_unsigned(mc.at("shards"), "mc.shards");
            if (shards < 1 || shards > 4096)
            {
                throw config_error("field 'mc.shards': must be in [1, 4096]");
            }
            spec.mc.shards = static_cast<unsigned>(shards);
        }
    }
    if (spec.mc.trials < 1000)
    {
        throw config_error("field 'mc.trials': must be >= 1000");
    }

    if (doc.contains("target_pout"))
    {
        spec.target_pout = detail::read_real(doc.at("target_pout"), "target_pout");
        if (!(spec.target_pout > 0.0 && spec.target_pout < 1.0))
        {
            throw config_error("field 'target_pout': must lie in (0, 1)");
        }
    }
    if (doc.contains("output_path"))
    {
        if (!doc.at("output_path").is_string())
        {
            throw config_error("field 'output_path': expected a string");
        }
        spec.output_path = doc.at("output_path").get<std::string>();
    }
    return spec;
}

/// Canonical document for a spec; parse_config(serialize_config(s)) == s.
inline std::string serialize_config(const SweepSpec& spec)
{
    nlohmann::json doc;
    const SystemConfig& c = spec.base;
    doc["base"] = {{"n_reflectors", c.n_reflectors}, {"tx_power", c.tx_power},
                   {"noise_power", c.noise_power},   {"dist_sr", c.dist_sr},
                   {"dist_rd", c.dist_rd},           {"pathloss_exp", c.pathloss_exp},
                   {"rate", c.rate},                 {"max_rounds", c.max_rounds}};
    doc["axis"] = std::string(to_string(spec.axis));
    doc["grid"] = spec.grid;
    auto engines = nlohmann::json::array();
    for (Engine e : spec.engines)
    {
        engines.push_back(std::string(to_string(e)));
    }
    doc["engines"]     = engines;
    doc["mc"]          = {{"trials", spec.mc.trials}, {"seed", spec.mc.seed}, {"shards", spec.mc.shards}};
    doc["target_pout"] = spec.target_pout;
    doc["output_path"] = spec.output_path;
    return doc.dump(2) + "\n";
}

//==============================================================================
// Evaluation
//==============================================================================

/// Base configuration with the axis parameter set to value.
inline SystemConfig config_at(const SweepSpec& spec, double value)
{
    SystemConfig cfg = spec.base;
    switch (spec.axis)
    {
    case Axis::snr_db: cfg.tx_power = cfg.noise_power * from_db(value); break;
    case Axis::n_reflectors: cfg.n_reflectors = static_cast<std::int64_t>(value); break;
    case Axis::rounds: cfg.max_rounds = static_cast<std::int64_t>(value); break;
    case Axis::pathloss_exp: cfg.pathloss_exp = value; break;
    }
    return cfg;
}

inline McRunSpec mc_run_spec(const SweepSpec& spec, const SystemConfig& cfg, Engine engine)
{
    McRunSpec run;
    run.cfg    = cfg;
    run.mode   = engine == Engine::mc_exact ? FadingMode::exact : FadingMode::clt;
    run.trials = spec.mc.trials;
    run.seed   = spec.mc.seed;
    run.shards = spec.mc.shards;
    return run;
}

struct SweepRow
{
    Axis axis;
    double axis_value;
    Engine engine;
    std::optional<double> p_out;
    std::optional<double> std_err;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> ratio_to_analytic;
    std::string error;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;

    bool has_errors() const
    {
        return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
    }
};

using ProgressFn = std::function<void(const SweepRow&)>;

/// One row per (axis value, engine), axis-major. Failures land in the row's
/// error column; the sweep continues. Every MC row uses the same seed so rows
/// are paired.
inline SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress = {})
{
    SweepResult result;
    for (double value : spec.grid)
    {
        const SystemConfig cfg = config_at(spec, value);
        std::optional<double> analytic;
        std::string analytic_error;
        try
        {
            analytic = outage_probability(OutageQuery::from_config(cfg));
        }
        catch (const std::exception& e)
        {
            analytic_error = e.what();
        }

        for (Engine engine : spec.engines)
        {
            SweepRow row{spec.axis, value, engine, {}, {}, {}, {}, {}, {}};
            try
            {
                switch (engine)
                {
                case Engine::analytic:
                    if (!analytic)
                    {
                        throw std::runtime_error(analytic_error);
                    }
                    row.p_out = analytic;
                    break;
                case Engine::asymptotic:
                    row.p_out = outage_asymptotic(OutageQuery::from_config(cfg));
                    if (analytic && *analytic > 0.0)
                    {
                        row.ratio_to_analytic = *row.p_out / *analytic;
                    }
                    break;
                case Engine::mc_exact:
                case Engine::mc_clt:
                {
                    const McEstimate est = run_outage_mc(mc_run_spec(spec, cfg, engine));
                    row.p_out   = est.p_hat;
                    row.std_err = est.std_err;
                    row.trials  = est.trials;
                    row.seed    = est.seed;
                    if (est.p_hat == 0.0 || est.std_err / est.p_hat > 0.1)
                    {
                        result.warnings.push_back(
                            std::string(to_string(spec.axis)) + "=" + format_double(value) + " " +
                            std::string(to_string(engine)) +
                            ": relative standard error above 10%; increase trials");
                    }
                    break;
                }
                }
            }
            catch (const std::exception& e)
            {
                row.error = e.what();
                if (row.error.empty())
                {
                    row.error = "evaluation failed";
                }
            }
            if (progress)
            {
                progress(row);
            }
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

namespace detail
{

template <class T>
std::string optional_cell(const std::optional<T>& v)
{
    if (!v)
    {
        return {};
    }
    if constexpr (std::is_floating_point_v<T>)
    {
        return format_double(*v);
    }
    else
    {
        return std::to_string(*v);
    }
}

/// CSV field quoting for free text.
inline std::string csv_text(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
    {
        return std::string(s);
    }
    std::string out = "\"";
    for (char ch : s)
    {
        out += ch == '"' ? std::string("\"\"") : (ch == '\n' ? std::string(" ") : std::string(1, ch));
    }
    return out + "\"";
}

} // namespace detail

inline constexpr std::string_view sweep_csv_header =
    "axis_name,axis_value,engine,p_out,std_err,trials,seed,ratio_to_analytic,error";

inline void write_sweep_csv(const SweepResult& result, std::ostream& out)
{
    out << sweep_csv_header << '\n';
    for (const SweepRow& r : result.rows)
    {
        out << to_string(r.axis) << ',' << format_double(r.axis_value) << ',' << to_string(r.engine)
            << ',' << detail::optional_cell(r.p_out) << ',' << detail::optional_cell(r.std_err) << ','
            << detail::optional_cell(r.trials) << ',' << detail::optional_cell(r.seed) << ','
            << detail::optional_cell(r.ratio_to_analytic) << ',' << detail::csv_text(r.error) << '\n';
    }
}

//==============================================================================
// Validation
//==============================================================================

struct ValidationRow
{
    Axis axis;
    double axis_value;
    Engine engine;
    double analytic = 0.0;
    McEstimate estimate;
    double z    = 0.0;
    double bias = 0.0; ///< p_hat - analytic
    bool within = false;
    std::string error;
};

struct ValidationReport
{
    std::vector<ValidationRow> rows;
    double pass_fraction = 0.0;
    bool passed          = false;
};

inline constexpr double validation_z_limit         = 3.0;
inline constexpr double validation_required_fraction = 0.95;

/// MC-vs-analytic z-test for every (axis value, MC engine). A row passes at
/// |z| <= 3; the report passes when at least 95% of rows do.
inline ValidationReport run_validation(const SweepSpec& spec, const ProgressFn& progress = {})
{
    const bool has_analytic = std::find(spec.engines.begin(), spec.engines.end(),
                                        Engine::analytic) != spec.engines.end();
    const bool has_mc = std::any_of(spec.engines.begin(), spec.engines.end(), is_monte_carlo);
    if (!has_analytic || !has_mc)
    {
        throw config_error("validate needs the analytic engine and at least one MC engine");
    }

    ValidationReport report;
    std::size_t good = 0;
    for (double value : spec.grid)
    {
        const SystemConfig cfg = config_at(spec, value);
        for (Engine engine : spec.engines)
        {
            if (!is_monte_carlo(engine))
            {
                continue;
            }
            ValidationRow row{spec.axis, value, engine, 0.0, {}, 0.0, 0.0, false, {}};
            try
            {
                row.analytic = outage_probability(OutageQuery::from_config(cfg));
                row.estimate = run_outage_mc(mc_run_spec(spec, cfg, engine));
                row.bias     = row.estimate.p_hat - row.analytic;
                double se    = row.estimate.std_err;
                if (se == 0.0)
                {
                    se = std::sqrt(row.analytic * (1.0 - row.analytic) /
                                   static_cast<double>(row.estimate.trials));
                }
                row.z      = se > 0.0 ? row.bias / se : (row.bias == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
                row.within = std::abs(row.z) <= validation_z_limit;
            }
            catch (const std::exception& e)
            {
                row.error = e.what();
            }
            good += row.within ? 1 : 0;
            if (progress)
            {
                progress(SweepRow{row.axis, row.axis_value, row.engine, row.estimate.p_hat,
                                  row.estimate.std_err, row.estimate.trials, row.estimate.seed,
                                  {}, row.error});
            }
            report.rows.push_back(std::move(row));
        }
    }
    report.pass_fraction = static_cast<double>(good) / static_cast<double>(report.rows.size());
    report.passed        = report.pass_fraction >= validation_required_fraction;
    return report;
}

inline constexpr std::string_view validation_csv_header =
    "axis_name,axis_value,engine,analytic,p_hat,std_err,trials,seed,z,bias,relative_bias,pass,error";

inline void write_validation_csv(const ValidationReport& report, std::ostream& out)
{
    out << validation_csv_header << '\n';
    for (const ValidationRow& r : report.rows)
    {
        const double rel = r.analytic > 0.0 ? r.bias / r.analytic : 0.0;
        out << to_string(r.axis) << ',' << format_double(r.axis_value) << ',' << to_string(r.engine)
            << ',' << format_double(r.analytic) << ',' << format_double(r.estimate.p_hat) << ','
            << format_double(r.estimate.std_err) << ',' << r.estimate.trials << ','
            << r.estimate.seed << ',' << format_double(r.z) << ',' << format_double(r.bias) << ','
            << format_double(rel) << ',' << (r.within ? "pass" : "fail") << ','
            << detail::csv_text(r.error) << '\n';
    }
}

//==============================================================================
// Required SNR
//==============================================================================

struct GainRow
{
    Axis axis;
    double axis_value;
    double target_pout;
    std::optional<double> required_gamma_bar_db;
    std::optional<double> required_tx_snr_db;
    std::optional<double> gain_db; ///< previous row's tx SNR minus this row's
    std::string error;
};

/// Required per-round SNR to reach target_pout at every grid point, and the
/// transmit SNR that implies after path loss. Not defined on the snr_db axis.
inline std::vector<GainRow> run_gain_table(const SweepSpec& spec)
{
    if (spec.axis == Axis::snr_db)
    {
        throw config_error("gain needs an axis other than snr_db");
    }
    std::vector<GainRow> rows;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (double value : spec.grid)
    {
        const SystemConfig cfg = config_at(spec, value);
        GainRow row{spec.axis, value, spec.target_pout, {}, {}, {}, {}};
        try
        {
            const double gbar_db = required_snr_db(OutageQuery::from_config(cfg), spec.target_pout);
            const double loss_db =
                10.0 * cfg.pathloss_exp * (std::log10(cfg.dist_sr) + std::log10(cfg.dist_rd));
            row.required_gamma_bar_db = gbar_db;
            row.required_tx_snr_db    = gbar_db + loss_db;
            if (!std::isnan(previous))
            {
                row.gain_db = previous - *row.required_tx_snr_db;
            }
            previous = *row.required_tx_snr_db;
        }
        catch (const std::exception& e)
        {
            row.error = e.what();
            previous = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline constexpr std::string_view gain_csv_header =
    "axis_name,axis_value,target_pout,required_gamma_bar_db,required_tx_snr_db,gain_db,error";

inline void write_gain_csv(const std::vector<GainRow>& rows, std::ostream& out)
{
    out << gain_csv_header << '\n';
    for (const GainRow& r : rows)
    {
        out << to_string(r.axis) << ',' << format_double(r.axis_value) << ','
            << format_double(r.target_pout) << ',' << detail::optional_cell(r.required_gamma_bar_db)
            << ',' << detail::optional_cell(r.required_tx_snr_db) << ','
            << detail::optional_cell(r.gain_db) << ',' << detail::csv_text(r.error) << '\n';
    }
}

} // namespace irs_harq

#endif // IRS_HARQ_SWEEP_HPP
