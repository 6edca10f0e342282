// Command-line runner for outage sweeps, MC validation and required-SNR tables.
//
//   irs_harq sweep    --config cfg.json [--out file.csv] [--seed S] [--trials T] [--quiet]
//   irs_harq validate --config cfg.json ...
//   irs_harq gain     --config cfg.json ...
//
// Exit status: 0 success, 1 usage/config error, 2 validation failure,
// 3 numeric/convergence error.

#include <irs_harq/sweep.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace
{

enum ExitCode : int
{
    exit_ok         = 0,
    exit_usage      = 1,
    exit_validation = 2,
    exit_numeric    = 3,
};

struct CommonOptions
{
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    bool quiet = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts)
{
    cmd->add_option("--config", opts.config_path, "configuration file (JSON)")->required();
    cmd->add_option("--out", opts.out_path, "output CSV path (overrides output_path)");
    cmd->add_option("--seed", opts.seed, "Monte Carlo seed (overrides mc.seed)");
    cmd->add_option("--trials", opts.trials, "Monte Carlo trials (overrides mc.trials)");
    cmd->add_flag("--quiet", opts.quiet, "suppress progress and warnings");
}

irs_harq::SweepSpec load_spec(const CommonOptions& opts)
{
    std::ifstream in(opts.config_path);
    if (!in)
    {
        throw irs_harq::config_error("cannot open config file '" + opts.config_path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    irs_harq::SweepSpec spec = irs_harq::parse_config(buffer.str());
    if (opts.seed)
    {
        spec.mc.seed = *opts.seed;
    }
    if (opts.trials)
    {
        if (*opts.trials < 1000)
        {
            throw irs_harq::config_error("--trials must be >= 1000");
        }
        spec.mc.trials = *opts.trials;
    }
    if (!opts.out_path.empty())
    {
        spec.output_path = opts.out_path;
    }
    return spec;
}

template <class Writer>
void emit(const irs_harq::SweepSpec& spec, Writer&& write)
{
    if (spec.output_path.empty())
    {
        write(std::cout);
        return;
    }
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out)
    {
        throw irs_harq::config_error("cannot write '" + spec.output_path + "'");
    }
    write(out);
}

irs_harq::ProgressFn progress_printer(bool quiet)
{
    if (quiet)
    {
        return {};
    }
    return [](const irs_harq::SweepRow& row)
    {
        std::cerr << to_string(row.axis) << '=' << irs_harq::format_double(row.axis_value) << ' '
                  << to_string(row.engine) << ": "
                  << (row.p_out ? irs_harq::format_double(*row.p_out) : std::string("-"))
                  << (row.error.empty() ? "" : "  error: " + row.error) << '\n';
    };
}

int cmd_sweep(const CommonOptions& opts)
{
    const auto spec   = load_spec(opts);
    const auto result = irs_harq::run_sweep(spec, progress_printer(opts.quiet));
    emit(spec, [&](std::ostream& os) { irs_harq::write_sweep_csv(result, os); });
    if (!opts.quiet)
    {
        for (const auto& w : result.warnings)
        {
            std::cerr << "warning: " << w << '\n';
        }
    }
    return result.has_errors() ? exit_numeric : exit_ok;
}

int cmd_validate(const CommonOptions& opts)
{
    const auto spec   = load_spec(opts);
    const auto report = irs_harq::run_validation(spec, progress_printer(opts.quiet));
    emit(spec, [&](std::ostream& os) { irs_harq::write_validation_csv(report, os); });
    if (!opts.quiet)
    {
        std::cerr << (report.passed ? "PASS" : "FAIL") << ": "
                  << irs_harq::format_double(100.0 * report.pass_fraction)
                  << "% of rows within 3 standard errors\n";
    }
    for (const auto& row : report.rows)
    {
        if (!row.error.empty())
        {
            return exit_numeric;
        }
    }
    return report.passed ? exit_ok : exit_validation;
}

int cmd_gain(const CommonOptions& opts)
{
    const auto spec = load_spec(opts);
    const auto rows = irs_harq::run_gain_table(spec);
    emit(spec, [&](std::ostream& os) { irs_harq::write_gain_csv(rows, os); });
    for (const auto& row : rows)
    {
        if (!row.error.empty())
        {
            return exit_numeric;
        }
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outage analysis of HARQ chase combining over reflecting-surface links"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* sweep    = app.add_subcommand("sweep", "evaluate outage along one parameter axis");
    auto* validate = app.add_subcommand("validate", "compare Monte Carlo engines with the closed form");
    auto* gain     = app.add_subcommand("gain", "required SNR for a target outage along one axis");
    for (auto* cmd : {sweep, validate, gain})
    {
        add_common_options(cmd, opts);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*sweep)
        {
            return cmd_sweep(opts);
        }
        if (*validate)
        {
            return cmd_validate(opts);
        }
        return cmd_gain(opts);
    }
    catch (const irs_harq::config_error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const irs_harq::domain_error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
