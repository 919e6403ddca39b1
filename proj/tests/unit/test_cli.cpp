#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "shiftgamma/cli.hpp"
#include "shiftgamma/errors.hpp"
#include "shiftgamma/gamma.hpp"
#include "shiftgamma/metric.hpp"
#include "shiftgamma/sft.hpp"

using namespace shiftgamma;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("shiftgamma_cli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }
    std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int rc;
    std::string out, err;
};

Run run(const RunConfig& cfg) {
    std::ostringstream out, err;
    int rc = run_command(cfg, out, err);
    return {rc, out.str(), err.str()};
}

const char* kGolden = "0 1\n11\n";
const char* kFull2 = "0 1\n";
const char* kLoop = "a\n";
const char* kTwoPoint = "x y\nxy\nyx\n";

} // namespace

TEST_CASE("gamma command reports the exact table") {
    TempDir dir("gamma");
    RunConfig cfg;
    cfg.command = "gamma";
    cfg.sft_path = dir.file("golden.sft", kGolden);
    cfg.n_max = 6;

    auto r = run(cfg);
    CHECK(r.rc == kExitOk);
    CHECK(r.err.empty());
    CHECK(r.out ==
          "N,m_N,gamma_log_lambda,gamma_decimal,product_log_lambda,product_decimal\n"
          "1,0,0,1,0.5,1.41421356237\n"
          "2,1,-1,0.5,0.0,1\n"
          "3,1,-1,0.5,0.5,1.41421356237\n"
          "4,2,-2,0.25,0.0,1\n"
          "5,2,-2,0.25,0.5,1.41421356237\n"
          "6,3,-3,0.125,0.0,1\n");

    cfg.oracle_check = true;
    CHECK(run(cfg).rc == kExitOk);

    SUBCASE("degenerate systems exit 2") {
        cfg.sft_path = dir.file("twopoint.sft", kTwoPoint);
        auto d = run(cfg);
        CHECK(d.rc == kExitDegenerate);
        CHECK(d.err.find("twopoint.sft") != std::string::npos);
    }
    SUBCASE("missing and malformed inputs exit 1") {
        cfg.sft_path = dir.at("missing.sft");
        CHECK(run(cfg).rc == kExitInput);
        cfg.sft_path = dir.file("bad.sft", "0 0\n");
        CHECK(run(cfg).rc == kExitInput);
        cfg.sft_path = "";
        CHECK(run(cfg).rc == kExitInput);
    }
    SUBCASE("invalid metric base and format exit 1") {
        cfg.lambda = 1.0;
        CHECK(run(cfg).rc == kExitInput);
        cfg.lambda = 2.0;
        cfg.format = "yaml";
        CHECK(run(cfg).rc == kExitInput);
    }
}

TEST_CASE("gamma json output carries replayable witnesses") {
    TempDir dir("gammajson");
    RunConfig cfg;
    cfg.command = "gamma";
    cfg.sft_path = dir.file("golden.sft", kGolden);
    cfg.n_max = 5;
    cfg.format = "json";
    cfg.witness = true;

    auto r = run(cfg);
    REQUIRE(r.rc == kExitOk);
    auto arr = ordered_json::parse(r.out);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 5);

    EdgeSft s = parse_sft(kGolden);
    for (const auto& row : arr) {
        long n = row.at("N").get<long>();
        long m = row.at("m_N").get<long>();
        CHECK(m == n / 2);
        CHECK(row.at("gamma_log_lambda").get<long>() == -m);
        CHECK(row.at("product_log_lambda").get<double>() ==
              doctest::Approx(static_cast<double>(n - 2 * m) / 2.0));
        REQUIRE(row.contains("witness"));
        GammaWitness w = gamma_witness_from_json(s, row.at("witness"));
        CHECK(gamma_witness_radius(s, w, n) == m);
    }

    cfg.witness = false;
    auto bare = run(cfg);
    REQUIRE(bare.rc == kExitOk);
    CHECK(ordered_json::parse(bare.out)[0].contains("witness") == false);
}

TEST_CASE("homoclinic command prints a witness or none") {
    TempDir dir("hom");
    RunConfig cfg;
    cfg.command = "homoclinic";
    cfg.sft_path = dir.file("full2.sft", kFull2);

    auto r = run(cfg);
    REQUIRE(r.rc == kExitOk);
    EdgeSft s = parse_sft(kFull2);
    PairWitness w = witness_from_json(s, ordered_json::parse(r.out));
    CHECK_NOTHROW(validate_witness(s, w));
    CHECK(w.kind == PairWitness::Kind::Homoclinic);

    cfg.sft_path = dir.file("loop.sft", kLoop);
    auto none = run(cfg);
    CHECK(none.rc == kExitOk);
    CHECK(none.out == "none\n");

    cfg.sft_path = dir.file("bad.sft", "0 1\nzz\n");
    CHECK(run(cfg).rc == kExitInput);
}

TEST_CASE("mt-check prints both sides of the equivalence") {
    TempDir dir("mt");
    RunConfig cfg;
    cfg.command = "mt-check";
    cfg.sft_path = dir.file("golden.sft", kGolden);

    auto r = run(cfg);
    CHECK(r.rc == kExitOk);
    CHECK(r.out == "homoclinic: yes (W=1); products <= lambda^1: yes\n");

    cfg.format = "json";
    auto j = run(cfg);
    REQUIRE(j.rc == kExitOk);
    auto doc = ordered_json::parse(j.out);
    CHECK(doc.at("homoclinic") == true);
    CHECK(doc.at("width") == 1);
    CHECK(doc.at("bound_log_lambda") == doctest::Approx(1.0));
    CHECK(doc.at("products_within_bound") == true);
    CHECK(doc.at("violation") == false);

    SUBCASE("degenerate systems are skipped with exit 2") {
        cfg.format = "csv";
        cfg.sft_path = dir.file("twopoint.sft", kTwoPoint);
        auto d = run(cfg);
        CHECK(d.rc == kExitDegenerate);
        CHECK(d.err.find("degenerate, skipped") != std::string::npos);
    }
    SUBCASE("full shift stays within its width bound") {
        cfg.format = "csv";
        cfg.sft_path = dir.file("full2.sft", kFull2);
        auto f = run(cfg);
        CHECK(f.rc == kExitOk);
        CHECK(f.out.find("homoclinic: yes (W=1)") == 0);
        CHECK(f.out.find("violated") == std::string::npos);
    }
}

TEST_CASE("iet-explore refuses degenerate parameters and rejects bad input") {
    RunConfig cfg;
    cfg.command = "iet-explore";
    cfg.n_max = 2;
    cfg.horizon = 10;

    cfg.a_expr = "1/3";
    cfg.b_expr = "2/3";
    auto r = run(cfg);
    CHECK(r.rc == kExitRefused);
    CHECK(r.err.find("refused") != std::string::npos);

    cfg.a_expr = "2/3+1*sqrt2";
    cfg.b_expr = "1/3";
    CHECK(run(cfg).rc == kExitInput); // cut points out of order

    cfg.a_expr = "one third";
    CHECK(run(cfg).rc == kExitInput);

    cfg.a_expr = "";
    cfg.b_expr = "";
    cfg.horizon = 1;
    CHECK(run(cfg).rc == kExitInput); // K below n_max
}

TEST_CASE("iet-explore is deterministic and caches word sets") {
    TempDir dir("ietcache");
    RunConfig cfg;
    cfg.command = "iet-explore";
    cfg.n_max = 3;
    cfg.horizon = 30;
    cfg.cache_dir = dir.at("cache");

    auto first = run(cfg);
    REQUIRE(first.rc == kExitOk);
    CHECK(first.out.find("N,m_lower,m_upper") == 0);

    // one cached word set: the full window language at n = 2K+1
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(cfg.cache_dir))
        files.push_back(e.path());
    REQUIRE(files.size() == 1);
    std::string content = slurp(files[0].string());
    CHECK(content.find("a=-1+1*sqrt2;b=-1+1*sqrt3;n=61\n") == 0);

    auto second = run(cfg);
    CHECK(second.rc == kExitOk);
    CHECK(second.out == first.out);

    // a corrupted cache entry is ignored and rebuilt, not trusted
    { std::ofstream(files[0], std::ios::binary) << "a=0;b=0;n=61\n000\n"; }
    auto third = run(cfg);
    CHECK(third.rc == kExitOk);
    CHECK(third.out == first.out);
    CHECK(slurp(files[0].string()) == content);

    SUBCASE("defaults match their explicit field expressions") {
        RunConfig explicit_cfg = cfg;
        explicit_cfg.a_expr = "-1+1*sqrt2";
        explicit_cfg.b_expr = "-1+1*sqrt3";
        auto e = run(explicit_cfg);
        CHECK(e.rc == kExitOk);
        CHECK(e.out == first.out);
    }
    SUBCASE("oracle check replays certified witnesses") {
        cfg.oracle_check = true;
        auto checked = run(cfg);
        CHECK(checked.rc == kExitOk);
        CHECK(checked.out == first.out);
    }
}

TEST_CASE("reports and plot data land in files atomically") {
    TempDir dir("emit");
    RunConfig cfg;
    cfg.command = "gamma";
    cfg.sft_path = dir.file("golden.sft", kGolden);
    cfg.n_max = 4;
    cfg.output_path = dir.at("report.csv");
    cfg.plot_path = dir.at("plot.txt");

    auto r = run(cfg);
    REQUIRE(r.rc == kExitOk);
    CHECK(r.out.empty());
    CHECK(slurp(cfg.output_path).find("N,m_N,") == 0);
    CHECK(slurp(cfg.plot_path) == "1 0.5\n2 0.0\n3 0.5\n4 0.0\n");
    CHECK(!fs::exists(cfg.output_path + ".tmp"));

    SUBCASE("unwritable output path exits 1") {
        cfg.output_path = (dir.path / "report.csv" / "nested.csv").string();
        CHECK(run(cfg).rc == kExitInput);
    }
}

TEST_CASE("config text fills run settings and rejects unknown keys") {
    RunConfig cfg;
    apply_config_text(cfg,
                      "# defaults\n"
                      "lambda = 3.5\n"
                      "n-max = 7\n"
                      "horizon=40\n"
                      "witness = true\n"
                      "oracle-check = 1\n"
                      "cache_dir = /tmp/c\n",
                      "test.conf");
    CHECK(cfg.lambda == doctest::Approx(3.5));
    CHECK(cfg.n_max == 7);
    CHECK(cfg.horizon == 40);
    CHECK(cfg.witness);
    CHECK(cfg.oracle_check);
    CHECK(cfg.cache_dir == "/tmp/c");

    CHECK_THROWS_AS(apply_config_text(cfg, "bogus = 1\n", "t"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "lambda 2\n", "t"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "n_max = soon\n", "t"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "witness = maybe\n", "t"), ParseError);
    try {
        apply_config_text(cfg, "format = csv\nk = twelve\n", "decay.conf");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.where()).find("decay.conf: line 2") != std::string::npos);
    }

    RunConfig unknown;
    unknown.command = "explore";
    std::ostringstream out, err;
    CHECK(run_command(unknown, out, err) == kExitInput);
    CHECK(err.str().find("unknown command") != std::string::npos);
}
