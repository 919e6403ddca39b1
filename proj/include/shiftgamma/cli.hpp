#pragma once

#include <iosfwd>
#include <string>

namespace shiftgamma {

// Exit code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitDegenerate = 2;
inline constexpr int kExitRefused = 3;

struct RunConfig {
    std::string command;
    std::string sft_path;
    std::string a_expr; // iet-explore; empty means sqrt2 - 1
    std::string b_expr; // iet-explore; empty means sqrt3 - 1
    double lambda = 2.0;
    long n_max = -1;   // -1: per-command default
    long horizon = -1; // K; -1: per-command default
    std::string format = "csv"; // csv | json
    std::string output_path;    // empty: write to `out`
    std::string plot_path;      // --emit-plot-data target
    std::string cache_dir;      // falls back to SHIFTGAMMA_CACHE_DIR
    unsigned long seed = 0;
    bool witness = false;
    bool oracle_check = false;
};

// Applies one key=value setting (config file grammar; keys match the long
// flag names with dashes as underscores). Throws ParseError on unknown keys
// or unreadable values.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Parses a whole config file: one key=value per line, '#' comments, blank
// lines ignored.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source_name);

// Subcommands. Reports go to `out` unless cfg.output_path redirects them
// (written atomically: temp file then rename); diagnostics go to `err`.
// Returns one of the exit codes above.
int cmd_gamma(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_homoclinic(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_mt_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_iet_explore(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Dispatch on cfg.command.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace shiftgamma
