#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

#ifndef G2FLOW_BIN
#define G2FLOW_BIN "./g2flow"
#endif

int run_cli(const std::string& args) {
    std::string cmd = std::string(G2FLOW_BIN) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path temp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("g2flow_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("verify exits cleanly; config errors use exit code 2") {
    CHECK(run_cli("verify") == 0);
    CHECK(run_cli("reduce --flow rhf --family ccy") == 0);
    CHECK(run_cli("run --flow nope") == 2);
    CHECK(run_cli("run --family nope") == 2);
    CHECK(run_cli("run --flow rhf --family heisenberg --K 1 --out /tmp/g2flow_badk") == 2);
}

TEST_CASE("io failures use exit code 3") {
    // output directory nested under a regular file cannot be created
    fs::path block = temp_dir("blocker");
    std::ofstream(block.string()) << "x";
    CHECK(run_cli("run --flow rhf --family ccy --t1 0.01 --out " + (block / "sub").string()) == 3);
    fs::remove(block);
}

TEST_CASE("trajectory.csv carries the declared header and plain decimal numbers") {
    fs::path out = temp_dir("csv");
    REQUIRE(run_cli("run --flow rhf --family ccy --a 1 --t1 0.05 --out " + out.string()) == 0);
    std::ifstream csv(out / "trajectory.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,f,h,volfactor,normT2,trT,lambda,eh_density");
    size_t rows = 0;
    std::string line;
    while (std::getline(csv, line)) {
        ++rows;
        CHECK(line.find(',') != std::string::npos);
        CHECK(line.find(';') == std::string::npos); // locale-independent separators
        std::stringstream ss(line);
        std::string cell;
        size_t cells = 0;
        while (std::getline(ss, cell, ',')) {
            ++cells;
            size_t pos = 0;
            double v = std::stod(cell, &pos);
            CHECK(pos == cell.size());
            CHECK(std::isfinite(v));
        }
        CHECK(cells == 8);
    }
    CHECK(rows > 10);
    fs::remove_all(out);
}

TEST_CASE("summary.json round-trips idempotently") {
    fs::path out = temp_dir("json");
    REQUIRE(run_cli("run --flow rl1 --family ccy --a 1 --t1 1000 --out " + out.string()) == 0);
    std::ifstream in(out / "summary.json");
    REQUIRE(in.good());
    json parsed = json::parse(in);
    std::string once = parsed.dump(2);
    json reparsed = json::parse(once);
    CHECK(parsed == reparsed);
    CHECK(reparsed.dump(2) == once);
    CHECK(parsed["flow"] == "rl1");
    CHECK(parsed["singularity_type"] == "III");
    fs::remove_all(out);
}

TEST_CASE("heisenberg sweep writes per-item outputs") {
    fs::path out = temp_dir("sweep");
    fs::path cfg = out;
    fs::create_directories(cfg);
    {
        json j;
        j["flow"] = "rhf";
        j["family"] = {{"kind", "heisenberg"}};
        j["grid"] = {{1.0, 1.0, 1.0, 1.0}, {1.0, 1.1, 1.0, 0.9}};
        j["t_span"] = {0.0, 1.0};
        j["output_dir"] = (out / "runs").string();
        std::ofstream(cfg / "sweep.json") << j.dump(2);
    }
    REQUIRE(run_cli("sweep --config " + (cfg / "sweep.json").string()) == 0);
    std::ifstream in(out / "runs" / "sweep.json");
    REQUIRE(in.good());
    json items = json::parse(in);
    REQUIRE(items.size() == 2);
    for (auto& item : items) {
        CHECK(item["ok"] == true);
        CHECK(item["termination"] == "BlowUp");
    }
    CHECK(fs::exists(out / "runs" / "item_000" / "trajectory.csv"));
    CHECK(fs::exists(out / "runs" / "item_001" / "summary.json"));
    fs::remove_all(out);
}

TEST_CASE("report command writes the ledger") {
    fs::path out = temp_dir("report");
    fs::create_directories(out);
    REQUIRE(run_cli("report --out " + (out / "report.md").string()) == 0);
    std::ifstream in(out / "report.md");
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    CHECK(text.find("discrepancy ledger") != std::string::npos);
    CHECK(text.find("h7.ode.rl1") != std::string::npos);
    CHECK(text.find("11 b^4 c^2") != std::string::npos);
    CHECK(text.find("c0  = 69/4") != std::string::npos);
    CHECK(text.find("c0' = 12") != std::string::npos);
    fs::remove_all(out);
}
