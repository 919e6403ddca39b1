#include "shiftgamma/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "shiftgamma/empirical.hpp"
#include "shiftgamma/errors.hpp"
#include "shiftgamma/gamma.hpp"
#include "shiftgamma/iet.hpp"
#include "shiftgamma/metric.hpp"
#include "shiftgamma/sft.hpp"

namespace shiftgamma {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DomainError("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw DomainError("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

int emit_report(const RunConfig& cfg, const std::string& payload, std::ostream& out,
                std::ostream& err) {
    if (cfg.output_path.empty()) {
        out << payload;
        return kExitOk;
    }
    try {
        write_file_atomic(cfg.output_path, payload);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

int emit_plot(const RunConfig& cfg, const std::string& payload, std::ostream& err) {
    try {
        write_file_atomic(cfg.plot_path, payload);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int load_sft(const RunConfig& cfg, EdgeSft& s, std::ostream& err) {
    if (cfg.sft_path.empty()) {
        err << "no input system given (use --sft)\n";
        return kExitInput;
    }
    auto text = read_file(cfg.sft_path);
    if (!text) {
        err << "cannot read " << cfg.sft_path << "\n";
        return kExitInput;
    }
    try {
        s = parse_sft(*text, cfg.sft_path);
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

bool check_format(const RunConfig& cfg, std::ostream& err) {
    if (cfg.format == "csv" || cfg.format == "json")
        return true;
    err << "unknown output format '" << cfg.format << "' (expected csv or json)\n";
    return false;
}

double half_value(long n, long m) { return static_cast<double>(n - 2 * m) / 2.0; }

std::string word_of(const FiniteConfiguration& c) {
    bool compact = true;
    for (const auto& s : c.alphabet)
        compact = compact && s.size() == 1;
    std::string out;
    for (size_t i = 0; i != c.cells.size(); ++i) {
        if (!compact && i)
            out += ' ';
        out += c.alphabet[static_cast<size_t>(c.cells[i])];
    }
    return out;
}

std::string fnv_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    std::string k = key;
    for (char& c : k)
        if (c == '-')
            c = '_';
    auto as_long = [&](const char* what) {
        try {
            return std::stol(value);
        } catch (const std::exception&) {
            throw ParseError(std::string("bad ") + what + " value '" + value + "'");
        }
    };
    auto as_bool = [&]() {
        if (value == "true" || value == "1")
            return true;
        if (value == "false" || value == "0")
            return false;
        throw ParseError("bad boolean value '" + value + "'");
    };
    if (k == "sft")
        cfg.sft_path = value;
    else if (k == "a")
        cfg.a_expr = value;
    else if (k == "b")
        cfg.b_expr = value;
    else if (k == "lambda") {
        try {
            cfg.lambda = std::stod(value);
        } catch (const std::exception&) {
            throw ParseError("bad lambda value '" + value + "'");
        }
    } else if (k == "n_max")
        cfg.n_max = as_long("n_max");
    else if (k == "horizon" || k == "k")
        cfg.horizon = as_long("horizon");
    else if (k == "format")
        cfg.format = value;
    else if (k == "output")
        cfg.output_path = value;
    else if (k == "emit_plot_data" || k == "plot")
        cfg.plot_path = value;
    else if (k == "cache_dir")
        cfg.cache_dir = value;
    else if (k == "seed")
        cfg.seed = static_cast<unsigned long>(as_long("seed"));
    else if (k == "witness")
        cfg.witness = as_bool();
    else if (k == "oracle_check")
        cfg.oracle_check = as_bool();
    else
        throw ParseError("unknown configuration key '" + key + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source_name) {
    size_t start = 0, lineno = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string line =
            text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        start = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value", source_name + ": line " + std::to_string(lineno));
        try {
            apply_key_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), source_name + ": line " + std::to_string(lineno));
        }
    }
}

int cmd_gamma(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_format(cfg, err))
        return kExitInput;
    EdgeSft s;
    if (int rc = load_sft(cfg, s, err))
        return rc;
    std::optional<SelfSimilarShiftMetric> metric;
    try {
        metric.emplace(cfg.lambda);
    } catch (const DomainError& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    long n_max = cfg.n_max > 0 ? cfg.n_max : 10;
    std::vector<GammaResult> rows;
    try {
        for (long n = 1; n <= n_max; ++n)
            rows.push_back(gamma_exact(s, n, *metric));
    } catch (const DegenerateSystemError& e) {
        err << cfg.sft_path << ": " << e.what() << "\n";
        return kExitDegenerate;
    }
    if (cfg.oracle_check) {
        for (const GammaResult& g : rows) {
            if (!g.witness || gamma_witness_radius(s, *g.witness, g.n) != g.m) {
                err << "witness replay failed at N=" << g.n << "\n";
                return kExitInput;
            }
        }
    }
    std::string payload;
    if (cfg.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const GammaResult& g : rows) {
            ordered_json row;
            row["N"] = g.n;
            row["m_N"] = g.m;
            row["gamma_log_lambda"] = -g.m;
            row["gamma_decimal"] = g.gamma();
            row["product_log_lambda"] = half_value(g.n, g.m);
            row["product_decimal"] = std::pow(metric->lambda, half_value(g.n, g.m));
            if (cfg.witness && g.witness)
                row["witness"] = gamma_witness_to_json(s, *g.witness);
            arr.push_back(row);
        }
        payload = arr.dump(2) + "\n";
    } else {
        payload = "N,m_N,gamma_log_lambda,gamma_decimal,product_log_lambda,product_decimal\n";
        char buf[160];
        for (const GammaResult& g : rows) {
            std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%.12g,%.1f,%.12g\n", g.n, g.m, -g.m,
                          g.gamma(), half_value(g.n, g.m),
                          std::pow(metric->lambda, half_value(g.n, g.m)));
            payload += buf;
        }
    }
    if (!cfg.plot_path.empty()) {
        std::string plot;
        char buf[64];
        for (const GammaResult& g : rows) {
            std::snprintf(buf, sizeof buf, "%ld %.1f\n", g.n, half_value(g.n, g.m));
            plot += buf;
        }
        if (int rc = emit_plot(cfg, plot, err))
            return rc;
    }
    return emit_report(cfg, payload, out, err);
}

int cmd_homoclinic(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    EdgeSft s;
    if (int rc = load_sft(cfg, s, err))
        return rc;
    auto w = find_homoclinic_pair(s);
    std::string payload = w ? witness_to_json(s, *w).dump(2) + "\n" : "none\n";
    return emit_report(cfg, payload, out, err);
}

int cmd_mt_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_format(cfg, err))
        return kExitInput;
    EdgeSft s;
    if (int rc = load_sft(cfg, s, err))
        return rc;
    std::optional<SelfSimilarShiftMetric> metric;
    try {
        metric.emplace(cfg.lambda);
    } catch (const DomainError& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    long n_max = cfg.n_max > 0 ? cfg.n_max : 12;
    MtFitResult fit;
    try {
        fit = mt_fit(s, *metric, n_max);
    } catch (const DegenerateSystemError& e) {
        err << cfg.sft_path << ": degenerate, skipped (" << e.what() << ")\n";
        return kExitDegenerate;
    }
    auto hom = find_homoclinic_pair(s);
    bool violation = false;
    std::string text;
    char buf[160];
    ordered_json j;
    j["n_max"] = n_max;
    if (hom) {
        long w = hom->disagreement_hi - hom->disagreement_lo + 1;
        long bound_half = w + 1; // products must stay within lambda^((W+1)/2)
        bool within = true;
        long bad_n = 0;
        for (long n = w; n <= n_max; ++n) {
            if (fit.product_half_exponents[static_cast<size_t>(n - 1)] > bound_half) {
                within = false;
                bad_n = n;
                break;
            }
        }
        std::snprintf(buf, sizeof buf, "homoclinic: yes (W=%ld); products <= lambda^%g: %s\n", w,
                      static_cast<double>(bound_half) / 2.0, within ? "yes" : "no");
        text += buf;
        if (!within) {
            violation = true;
            std::snprintf(buf, sizeof buf,
                          "MT equivalence violated: product exceeds the width bound at N=%ld\n",
                          bad_n);
            text += buf;
        }
        j["homoclinic"] = true;
        j["width"] = w;
        j["bound_log_lambda"] = static_cast<double>(bound_half) / 2.0;
        j["products_within_bound"] = within;
    } else {
        bool grows = !fit.decaying;
        std::snprintf(buf, sizeof buf, "homoclinic: no; products keep growing: %s\n",
                      grows ? "yes" : "no");
        text += buf;
        if (!grows) {
            violation = true;
            text += "MT equivalence violated: no homoclinic witness but the products stopped "
                    "growing in range\n";
        }
        j["homoclinic"] = false;
        j["products_growing"] = grows;
    }
    j["violation"] = violation;
    std::string payload = cfg.format == "json" ? j.dump(2) + "\n" : text;
    if (int rc = emit_report(cfg, payload, out, err))
        return rc;
    return violation ? kExitInput : kExitOk;
}

int cmd_iet_explore(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!check_format(cfg, err))
        return kExitInput;
    std::optional<IetSystem> sys;
    try {
        QuadraticFieldElement a = cfg.a_expr.empty()
                                      ? QuadraticFieldElement::sqrt2() - QuadraticFieldElement(1)
                                      : parse_field_element(cfg.a_expr);
        QuadraticFieldElement b = cfg.b_expr.empty()
                                      ? QuadraticFieldElement::sqrt3() - QuadraticFieldElement(1)
                                      : parse_field_element(cfg.b_expr);
        sys.emplace(a, b);
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return kExitInput;
    } catch (const DomainError& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    if (sys->degenerate()) {
        err << "refused: the parameters are rationally dependent, so the coding degenerates to "
               "an eventually periodic language and the minimality-based report does not apply\n";
        return kExitRefused;
    }
    std::optional<SelfSimilarShiftMetric> metric;
    try {
        metric.emplace(cfg.lambda);
    } catch (const DomainError& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    long n_max = cfg.n_max > 0 ? cfg.n_max : 4;
    long k = cfg.horizon > 0 ? cfg.horizon : 200;
    if (k < n_max) {
        err << "horizon K must be at least n_max\n";
        return kExitInput;
    }

    std::string root = cfg.cache_dir;
    if (root.empty())
        if (const char* env = std::getenv("SHIFTGAMMA_CACHE_DIR"))
            root = env;
    LanguageOracle::WordLoad load;
    LanguageOracle::WordStore store;
    if (!root.empty()) {
        std::string a_key = sys->a.str(), b_key = sys->b.str();
        auto key_of = [a_key, b_key](long n) {
            return "a=" + a_key + ";b=" + b_key + ";n=" + std::to_string(n);
        };
        auto path_of = [root, key_of](long n) {
            return (fs::path(root) / ("words_" + fnv_hex(key_of(n)) + ".txt")).string();
        };
        load = [key_of, path_of](long n) -> std::optional<std::vector<std::string>> {
            auto text = read_file(path_of(n));
            if (!text)
                return std::nullopt;
            size_t nl = text->find('\n');
            if (nl == std::string::npos || text->substr(0, nl) != key_of(n))
                return std::nullopt;
            std::vector<std::string> words;
            size_t start = nl + 1;
            while (start < text->size()) {
                size_t end = text->find('\n', start);
                if (end == std::string::npos)
                    end = text->size();
                if (end > start)
                    words.push_back(text->substr(start, end - start));
                start = end + 1;
            }
            if (words.empty())
                return std::nullopt;
            return words;
        };
        store = [key_of, path_of](long n, const std::vector<std::string>& ws) {
            // best effort: a broken cache directory must not break the report
            try {
                std::string content = key_of(n) + "\n";
                for (const auto& w : ws)
                    content += w + "\n";
                write_file_atomic(path_of(n), content);
            } catch (const std::exception&) {
            }
        };
    }

    auto oracle = LanguageOracle::from_iet(*sys, load, store);
    DecayReport rep;
    try {
        rep = decay_report(oracle, *metric, n_max, k);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitInput;
    }
    if (cfg.oracle_check) {
        for (const DecayRow& row : rep.rows) {
            if (!row.bounds.witness)
                continue;
            long v = m_lower_from_witness(oracle, row.bounds.n, k, row.bounds.witness->first,
                                          row.bounds.witness->second);
            if (v != row.bounds.m_lower) {
                err << "witness replay failed at N=" << row.bounds.n << "\n";
                return kExitInput;
            }
        }
    }
    std::string payload;
    if (cfg.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const DecayRow& row : rep.rows) {
            const EmpiricalGammaBounds& b = row.bounds;
            ordered_json r;
            r["N"] = b.n;
            r["m_lower"] = b.m_lower;
            r["m_upper"] = b.m_upper;
            r["gamma_lower"] = std::pow(rep.lambda, static_cast<double>(-b.m_upper));
            r["gamma_upper"] = std::pow(rep.lambda, static_cast<double>(-b.m_lower));
            r["product_lower_log_lambda"] = half_value(b.n, b.m_upper);
            r["product_upper_log_lambda"] = half_value(b.n, b.m_lower);
            r["exact_m"] = row.exact_m ? ordered_json(*row.exact_m) : ordered_json(nullptr);
            r["K"] = b.k;
            r["oracle_tag"] = rep.oracle_tag;
            if (cfg.witness && b.witness) {
                r["witness"] = {{"x", word_of(b.witness->first)},
                                {"y", word_of(b.witness->second)},
                                {"certified", b.lower_certified}};
            }
            arr.push_back(r);
        }
        payload = arr.dump(2) + "\n";
    } else {
        payload = decay_report_csv(rep);
    }
    if (!cfg.plot_path.empty()) {
        std::string plot;
        char buf[64];
        for (const DecayRow& row : rep.rows) {
            std::snprintf(buf, sizeof buf, "%ld %.1f\n", row.bounds.n,
                          half_value(row.bounds.n, row.bounds.m_lower));
            plot += buf;
        }
        if (int rc = emit_plot(cfg, plot, err))
            return rc;
    }
    return emit_report(cfg, payload, out, err);
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.command == "gamma")
        return cmd_gamma(cfg, out, err);
    if (cfg.command == "homoclinic")
        return cmd_homoclinic(cfg, out, err);
    if (cfg.command == "mt-check")
        return cmd_mt_check(cfg, out, err);
    if (cfg.command == "iet-explore")
        return cmd_iet_explore(cfg, out, err);
    err << "unknown command '" << cfg.command << "'\n";
    return kExitInput;
}

} // namespace shiftgamma
