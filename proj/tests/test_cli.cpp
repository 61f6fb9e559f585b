#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kramers/report.hpp"

using namespace kramers;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(KRAMERS_CLI_PATH) + " " + args +
                      " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kWork = "clitest";

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    fs::create_directories(kWork);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("check") == 2);  // --config is required
    CHECK(run_cli("check --config " + (kWork / "absent.json").string()) == 2);

    write_file(kWork / "broken.json", "{not json");
    CHECK(run_cli("check --config " + (kWork / "broken.json").string()) == 2);

    write_file(kWork / "unknown_key.json",
               R"({"potential": "doublewell1d", "h": [0.2], "bogus": 1})");
    CHECK(run_cli("check --config " + (kWork / "unknown_key.json").string()) ==
          2);

    write_file(kWork / "h_and_beta.json",
               R"({"potential": "doublewell1d", "h": [0.2], "beta": [10]})");
    CHECK(run_cli("check --config " + (kWork / "h_and_beta.json").string()) ==
          2);
}

TEST_CASE("check verdicts, schema conformance, idempotence") {
    fs::create_directories(kWork);
    write_file(kWork / "ok.json", R"({"potential": "fig-ok-1d", "h": [0.1]})");
    write_file(kWork / "notok.json",
               R"({"potential": "fig-notok-1d", "h": [0.1]})");

    std::string out_ok = (kWork / "out_ok").string();
    CHECK(run_cli("check --config " + (kWork / "ok.json").string() + " --out " +
                  out_ok + " --seed 123") == 0);
    Json rep = load_json_file(out_ok + "/report.json");
    CHECK(rep["command"] == "check");
    CHECK(rep["seed"] == 123);
    CHECK(rep["passed"] == true);
    CHECK(rep["config"]["potential"] == "fig-ok-1d");
    CHECK(rep["results"]["hypotheses"]["flow_ok"] == true);
    CHECK(rep["results"]["agmon"]["ok"] == true);

    Json schema = load_json_file(KRAMERS_SCHEMA_PATH);
    CHECK(validate_against_schema(rep, schema).empty());

    std::string agmon_csv = read_file(out_ok + "/agmon.csv");
    CHECK(agmon_csv.rfind("x,", 0) == 0);

    std::string out_bad = (kWork / "out_bad").string();
    CHECK(run_cli("check --config " + (kWork / "notok.json").string() +
                  " --out " + out_bad) == 1);
    Json bad = load_json_file(out_bad + "/report.json");
    CHECK(bad["passed"] == false);
    CHECK(validate_against_schema(bad, schema).empty());

    // rerunning writes byte-identical outputs
    std::string rep_bytes = read_file(out_ok + "/report.json");
    CHECK(run_cli("check --config " + (kWork / "ok.json").string() + " --out " +
                  out_ok + " --seed 123") == 0);
    CHECK(read_file(out_ok + "/report.json") == rep_bytes);
    CHECK(read_file(out_ok + "/agmon.csv") == agmon_csv);
}

TEST_CASE("spectrum run with h overrides") {
    fs::create_directories(kWork);
    write_file(kWork / "spec.json",
               R"({"potential": "doublewell1d", "h": [0.2], "dx": 0.01})");
    std::string out = (kWork / "out_spec").string();
    CHECK(run_cli("spectrum --config " + (kWork / "spec.json").string() +
                  " --out " + out + " --h 0.2 --h 0.15") == 0);
    Json rep = load_json_file(out + "/report.json");
    REQUIRE(rep["results"]["cases"].size() == 2);
    CHECK(rep["results"]["cases"][0]["h"] == 0.2);
    CHECK(rep["results"]["cases"][1]["h"] == 0.15);
    CHECK(rep["results"]["cases"][0]["counts"]["m0_neumann_inner"] == 2);
    CHECK(fs::exists(out + "/eigenvalues.csv"));
    CHECK(fs::exists(out + "/eigenvector_h0.csv"));
    CHECK(fs::exists(out + "/eigenvector_h1.csv"));

    Json schema = load_json_file(KRAMERS_SCHEMA_PATH);
    CHECK(validate_against_schema(rep, schema).empty());
}

TEST_CASE("mc outputs are byte-identical across worker counts") {
    fs::create_directories(kWork);
    write_file(kWork / "mc.json", R"({
        "potential": "doublewell1d",
        "domain": {"inner": [-0.55, 0.55], "outer": [-0.7, 0.7]},
        "beta": [10],
        "dx": 2e-3,
        "mc": {"n": 60, "dt": 5e-4},
        "seed": 11
    })");
    std::string o1 = (kWork / "mc1").string();
    std::string o4 = (kWork / "mc4").string();
    int rc1 = run_cli("mc --config " + (kWork / "mc.json").string() +
                      " --out " + o1 + " --threads 1");
    int rc4 = run_cli("mc --config " + (kWork / "mc.json").string() +
                      " --out " + o4 + " --threads 4");
    CHECK((rc1 == 0 || rc1 == 1));
    CHECK(rc4 == rc1);
    CHECK(read_file(o1 + "/report.json") == read_file(o4 + "/report.json"));
    CHECK(read_file(o1 + "/samples.csv") == read_file(o4 + "/samples.csv"));

    Json rep = load_json_file(o1 + "/report.json");
    Json schema = load_json_file(KRAMERS_SCHEMA_PATH);
    CHECK(validate_against_schema(rep, schema).empty());
    CHECK(rep["config"]["mc_n"] == 60);
}

TEST_CASE("runtime numeric failures exit with code 3") {
    fs::create_directories(kWork);
    // 30 exits are too few for the KS fit
    write_file(kWork / "mc_small.json", R"({
        "potential": "doublewell1d",
        "domain": {"inner": [-0.55, 0.55], "outer": [-0.7, 0.7]},
        "beta": [10],
        "dx": 2e-3,
        "mc": {"n": 30, "dt": 5e-4},
        "seed": 11
    })");
    CHECK(run_cli("mc --config " + (kWork / "mc_small.json").string() +
                  " --out " + (kWork / "mc_small").string()) == 3);
}
