#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biphoton/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = biphoton::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::pair<double, double>> rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, double>> out;
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        out.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
    }
    return out;
}

std::string src(const std::string& rel) { return std::string(BIPHOTON_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("dip-scan defaults give the triangle dip") {
    const auto r = cli({"dip-scan"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("tau1,rate\n", 0) == 0);
    CHECK(r.err.find("snapped") != std::string::npos);
    const auto pts = rows(r.out);
    CHECK(pts.size() == 201);
    for (const auto& [tau, rate] : pts) {
        if (std::abs(tau - 0.5) < 1e-9) CHECK(rate <= 0.01);
    }
}

TEST_CASE("dip-scan beyond t0 is flat") {
    const auto r = cli({"dip-scan", "--tau-min", "1.2", "--tau-max", "2.0"});
    REQUIRE(r.code == 0);
    for (const auto& [tau, rate] : rows(r.out)) CHECK(std::abs(rate - 1.0) <= 0.01);
}

TEST_CASE("dip-scan validation and physics errors") {
    const auto r = cli({"dip-scan", "--steps", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("steps must be ≥ 2") != std::string::npos);
    CHECK(cli({"dip-scan", "--kernel", "square"}).code == 2);
    CHECK(cli({"dip-scan", "--format", "xml"}).code == 2);
    CHECK(cli({"dip-scan", "--t-min", "-1"}).code == 2);
    CHECK(cli({"dip-scan", "--t0", "-1"}).code == 2);
    CHECK(cli({"no-such-command"}).code == 2);
    CHECK(cli({}).code == 2);

    const auto clipped = cli({"dip-scan", "--t-min", "-1", "--t-max", "2"});
    CHECK(clipped.code == 3);
    CHECK(clipped.err.find("SupportClipped") != std::string::npos);
    CHECK(clipped.err.find("hint:") != std::string::npos);

    const auto small = cli({"dip-scan", "--grid-n", "16", "--tau-min", "-10", "--tau-max", "10"});
    CHECK(small.code == 3);
    CHECK(small.err.find("GridTooSmall") != std::string::npos);
}

TEST_CASE("dip-scan json and compensation") {
    const auto r = cli({"dip-scan", "--format", "json", "--steps", "5"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == "1");
    CHECK(j["rates"].size() == 5);

    const auto c = cli({"dip-scan", "--tau-min", "1", "--tau-max", "2", "--steps", "21", "--compensate", "1"});
    REQUIRE(c.code == 0);
    for (const auto& [tau, rate] : rows(c.out)) {
        if (std::abs(tau - 1.5) < 1e-9) CHECK(rate <= 0.01);
    }
}

TEST_CASE("overlap command") {
    const auto in = cli({"overlap", "--tau1", "0.5"});
    REQUIRE(in.code == 0);
    const auto a = nlohmann::json::parse(in.out);
    CHECK(a["interferes"] == true);
    CHECK(a["schema_version"] == "1");

    const auto out = nlohmann::json::parse(cli({"overlap", "--tau1", "1.5"}).out);
    CHECK(out["interferes"] == false);
    CHECK(out["overlap_mass"] == 0.0);

    const auto narrow = nlohmann::json::parse(cli({"overlap", "--tau1", "0.5", "--window", "0.1"}).out);
    CHECK(narrow["overlap_mass"].get<double>() < a["overlap_mass"].get<double>());

    CHECK(cli({"overlap", "--format", "csv"}).code == 2);
}

TEST_CASE("schmidt command") {
    const auto sep = nlohmann::json::parse(cli({"schmidt", "--separable"}).out);
    CHECK(sep["entropy"] == 0.0);
    CHECK(sep["rank"] == 1);

    const auto slow = cli({"schmidt", "--sigma-p", "0.1", "--t-min", "-4", "--t-max", "5", "--grid-n", "256"});
    REQUIRE(slow.code == 0);
    const auto j = nlohmann::json::parse(slow.out);
    CHECK(j["schmidt_number"].get<double>() > 1.0);
    CHECK(std::abs(j["sum_c2"].get<double>() - 1.0) < 1e-9);

    const auto t = nlohmann::json::parse(cli({"schmidt", "--threshold", "0.5"}).out);
    for (const auto& c : t["coeffs"]) CHECK(c.get<double>() > 0.5);
    CHECK(t["rank"] == t["coeffs"].size());

    const fs::path modes = fs::temp_directory_path() / "biphoton_modes.csv";
    REQUIRE(cli({"schmidt", "--threshold", "0.5", "--modes-out", modes.string()}).code == 0);
    std::ifstream f(modes);
    std::string header;
    std::getline(f, header);
    CHECK(header == "mode,t,phi_re,phi_im,chi_re,chi_im");
}

TEST_CASE("regions command") {
    const auto r = cli({"regions", "--tau1", "0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("term,vertex_index,t_prime,t_minus\n", 0) == 0);
    CHECK(r.out.find("intersection,0,") != std::string::npos);
    const auto j = nlohmann::json::parse(cli({"regions", "--tau1", "2", "--format", "json"}).out);
    CHECK(j["intersection_area"] == 0.0);
}

TEST_CASE("bench subcommands") {
    const auto ok = cli({"bench", "check", src("benches/dip.bench")});
    CHECK(ok.code == 0);
    CHECK(ok.out == "OK\n");

    const auto bad = cli({"bench", "check", src("tests/data/malformed/unknown_directive.bench")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 7") != std::string::npos);

    CHECK(cli({"bench", "check", "/nonexistent.bench"}).code == 2);

    const fs::path dir = fs::temp_directory_path() / "biphoton_cli_bench";
    fs::remove_all(dir);
    const auto run = cli({"bench", "run", src("benches/postponed.bench"), "--out-dir", dir.string(), "--manifest", "-"});
    REQUIRE(run.code == 0);
    const auto manifest = nlohmann::json::parse(run.out);
    CHECK(manifest.contains("snapped_delays"));
    CHECK(manifest.contains("grid"));
    CHECK(manifest.contains("versions"));
    std::ifstream f(dir / "compensation.csv");
    std::stringstream s;
    s << f.rdbuf();
    double best = 2.0, at = 0.0;
    for (const auto& [d, rate] : rows(s.str())) {
        if (rate < best) {
            best = rate;
            at = d;
        }
    }
    CHECK(std::abs(at - 1.0) <= 0.01);
}

TEST_CASE("the installed binary reports exit codes") {
    const std::string exe = BIPHOTON_CLI;
    CHECK(std::system((exe + " version > /dev/null").c_str()) == 0);
    const int code = std::system((exe + " dip-scan --steps 1 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(code) == 2);
}

TEST_CASE("repeated runs are byte-identical") {
    const auto a = cli({"dip-scan", "--steps", "31"});
    const auto b = cli({"dip-scan", "--steps", "31", "--threads", "3"});
    CHECK(a.out == b.out);
}
