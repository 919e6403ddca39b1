#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "shiftgamma/cli.hpp"
#include "shiftgamma/errors.hpp"

namespace {

struct CommandSetup {
    shiftgamma::RunConfig cfg;
    std::string config_path;
    CLI::App* sub = nullptr;
    std::map<std::string, CLI::Option*> opts;
};

void add_output_options(CommandSetup& c) {
    c.opts["format"] = c.sub->add_option("--format", c.cfg.format, "Report format: csv or json");
    c.opts["output"] =
        c.sub->add_option("--output", c.cfg.output_path, "Write the report to this file");
    c.opts["emit_plot_data"] = c.sub->add_option(
        "--emit-plot-data", c.cfg.plot_path, "Write (N, product half-exponent) pairs to this file");
    c.sub->add_option("--config", c.config_path,
                      "key=value defaults; explicit flags win over the file");
}

void add_metric_options(CommandSetup& c) {
    c.opts["lambda"] = c.sub->add_option("--lambda", c.cfg.lambda, "Metric base (> 1)");
    c.opts["n_max"] = c.sub->add_option("--n-max", c.cfg.n_max, "Largest shift power to report");
}

void add_sft_option(CommandSetup& c) {
    c.opts["sft"] = c.sub->add_option("--sft", c.cfg.sft_path, "Forbidden-word system file");
}

// Config file keys fill in whatever the command line left untouched.
int merge_config(CommandSetup& c, std::ostream& err) {
    if (c.config_path.empty())
        return shiftgamma::kExitOk;
    std::ifstream in(c.config_path, std::ios::binary);
    if (!in) {
        err << "cannot read " << c.config_path << "\n";
        return shiftgamma::kExitInput;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    shiftgamma::RunConfig file_cfg;
    file_cfg.command = c.cfg.command;
    try {
        shiftgamma::apply_config_text(file_cfg, ss.str(), c.config_path);
    } catch (const shiftgamma::ParseError& e) {
        err << e.what() << "\n";
        return shiftgamma::kExitInput;
    }
    auto flag_given = [&](const char* key) {
        auto it = c.opts.find(key);
        return it != c.opts.end() && it->second->count() > 0;
    };
    if (!flag_given("sft"))
        c.cfg.sft_path = file_cfg.sft_path;
    if (!flag_given("a"))
        c.cfg.a_expr = file_cfg.a_expr;
    if (!flag_given("b"))
        c.cfg.b_expr = file_cfg.b_expr;
    if (!flag_given("lambda"))
        c.cfg.lambda = file_cfg.lambda;
    if (!flag_given("n_max"))
        c.cfg.n_max = file_cfg.n_max;
    if (!flag_given("horizon"))
        c.cfg.horizon = file_cfg.horizon;
    if (!flag_given("format"))
        c.cfg.format = file_cfg.format;
    if (!flag_given("output"))
        c.cfg.output_path = file_cfg.output_path;
    if (!flag_given("emit_plot_data"))
        c.cfg.plot_path = file_cfg.plot_path;
    if (!flag_given("cache_dir"))
        c.cfg.cache_dir = file_cfg.cache_dir;
    if (!flag_given("seed"))
        c.cfg.seed = file_cfg.seed;
    if (!flag_given("witness"))
        c.cfg.witness = file_cfg.witness;
    if (!flag_given("oracle_check"))
        c.cfg.oracle_check = file_cfg.oracle_check;
    return shiftgamma::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expansivity exponents of shift powers: exact gamma reports for "
                 "forbidden-word systems and empirical decay bounds for coded interval "
                 "exchanges"};
    app.require_subcommand(1);

    CommandSetup gamma, homoclinic, mt, iet;

    gamma.cfg.command = "gamma";
    gamma.sub = app.add_subcommand("gamma",
                                   "Exact gamma(sigma^N) table with disagreement witnesses");
    add_sft_option(gamma);
    add_metric_options(gamma);
    gamma.opts["witness"] =
        gamma.sub->add_flag("--witness", gamma.cfg.witness, "Embed witnesses in JSON output");
    gamma.opts["oracle_check"] = gamma.sub->add_flag("--oracle-check", gamma.cfg.oracle_check,
                                                     "Replay every witness before printing");
    add_output_options(gamma);

    homoclinic.cfg.command = "homoclinic";
    homoclinic.sub =
        app.add_subcommand("homoclinic", "Search for a doubly-asymptotic pair, print it as JSON");
    add_sft_option(homoclinic);
    homoclinic.opts["output"] = homoclinic.sub->add_option("--output", homoclinic.cfg.output_path,
                                                           "Write the witness to this file");
    homoclinic.sub->add_option("--config", homoclinic.config_path,
                               "key=value defaults; explicit flags win over the file");

    mt.cfg.command = "mt-check";
    mt.sub = app.add_subcommand(
        "mt-check", "Check that homoclinic pairs exist exactly when the products stay bounded");
    add_sft_option(mt);
    add_metric_options(mt);
    add_output_options(mt);

    iet.cfg.command = "iet-explore";
    iet.sub = app.add_subcommand(
        "iet-explore", "Empirical decay report for the three-interval exchange coding");
    iet.opts["a"] = iet.sub->add_option("--a", iet.cfg.a_expr,
                                        "First cut point, e.g. '-1+1*sqrt2' (default sqrt2-1)");
    iet.opts["b"] = iet.sub->add_option("--b", iet.cfg.b_expr,
                                        "Second cut point, e.g. '-1+1*sqrt3' (default sqrt3-1)");
    add_metric_options(iet);
    iet.opts["horizon"] =
        iet.sub->add_option("-K,--horizon", iet.cfg.horizon, "Window radius for the pair search");
    iet.opts["cache_dir"] = iet.sub->add_option(
        "--cache-dir", iet.cfg.cache_dir,
        "Word-set cache root (or set SHIFTGAMMA_CACHE_DIR); keyed by exact (a, b, n)");
    iet.opts["witness"] =
        iet.sub->add_flag("--witness", iet.cfg.witness, "Embed witness windows in JSON output");
    iet.opts["oracle_check"] = iet.sub->add_flag("--oracle-check", iet.cfg.oracle_check,
                                                 "Replay every certified witness before printing");
    add_output_options(iet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? shiftgamma::kExitOk : shiftgamma::kExitInput;
    }

    CommandSetup* active = nullptr;
    for (CommandSetup* c : {&gamma, &homoclinic, &mt, &iet})
        if (app.got_subcommand(c->sub))
            active = c;
    if (!active) {
        std::cerr << "no command selected\n";
        return shiftgamma::kExitInput;
    }
    if (int rc = merge_config(*active, std::cerr))
        return rc;
    return shiftgamma::run_command(active->cfg, std::cout, std::cerr);
}
