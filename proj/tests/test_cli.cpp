#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

using nlohmann::json;

namespace {

struct CmdResult {
    int rc = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(ISINGCM_CLI_PATH) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    CmdResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

} // namespace

TEST_CASE("exact solve emits the documented json") {
    const auto r = run_cli("exact --model cm2 --N 1000 --beta 0.5 --B 0.2 --seed 7");
    REQUIRE(r.rc == 0);
    const json j = json::parse(r.out);
    REQUIRE(j["schema_version"] == 1);
    REQUIRE(j["command"] == "exact");
    REQUIRE(j["config"]["model"] == "cm2");
    REQUIRE(j["config"]["seed"] == 7);
    REQUIRE(j["results"].contains("logZ"));
    REQUIRE(j["results"].contains("meanS"));
    REQUIRE(j["results"].contains("varS"));
    REQUIRE(j["results"].contains("chiN"));
    REQUIRE(j["results"]["N"] == 1000);
    REQUIRE(j["results"]["varS"].get<double>() ==
            Catch::Approx(j["results"]["chiN"].get<double>() * 1000.0).epsilon(1e-12));
}

TEST_CASE("generate then exact round-trips bit-for-bit") {
    const std::string path = "cli_roundtrip_graph.txt";
    const auto gen = run_cli("generate --model cm12 --p 0.4 --N 240 --seed 11 --out " + path);
    REQUIRE(gen.rc == 0);
    const json gj = json::parse(gen.out);
    REQUIRE(gj["results"]["N"] == 240);

    const auto from_file =
        run_cli("exact --graph " + path + " --beta 0.5 --B 0.1");
    const auto in_memory =
        run_cli("exact --model cm12 --p 0.4 --N 240 --seed 11 --beta 0.5 --B 0.1");
    REQUIRE(from_file.rc == 0);
    REQUIRE(in_memory.rc == 0);
    const json a = json::parse(from_file.out);
    const json b = json::parse(in_memory.out);
    REQUIRE(a["results"].dump() == b["results"].dump());
    REQUIRE(a["config"]["graph_seed"] == 11);
    std::remove(path.c_str());
}

TEST_CASE("seed fully determines sampling output") {
    const std::string args = "sample --model cm2 --N 200 --beta 0.4 --B 0.1 --M 20 --seed 9";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.rc == 0);
    REQUIRE(a.out == b.out);
    const auto c = run_cli("sample --model cm2 --N 200 --beta 0.4 --B 0.1 --M 20 --seed 10");
    REQUIRE(json::parse(a.out)["results"]["draws"] != json::parse(c.out)["results"]["draws"]);
}

TEST_CASE("csv output carries a config header comment") {
    const auto r = run_cli("exact --model cm2 --N 500 --beta 0.3 --B 0.0 --seed 2 --format csv");
    REQUIRE(r.rc == 0);
    REQUIRE(r.out.rfind("# {", 0) == 0);
    REQUIRE(r.out.find("N,beta,B,logZ,pressure,meanS,varS,chiN") != std::string::npos);

    const auto vt = run_cli("variance-table --p 0.5 --beta 0.5 --B 0.2 --T 60 --format csv");
    REQUIRE(vt.rc == 0);
    REQUIRE(vt.out.find("beta,B,p,T,chi,sigma_G2,sigma_aq2,tail_bound") != std::string::npos);

    const auto vj = run_cli("variance-table --p 0.5 --beta 0.5 --B 0.2 --T 60");
    const json v = json::parse(vj.out);
    REQUIRE(v["results"]["sigma_aq2"].get<double>() ==
            Catch::Approx(v["results"]["chi"].get<double>() +
                          v["results"]["sigma_G2"].get<double>())
                .epsilon(1e-12));
}

TEST_CASE("experiment reports are identical across thread counts") {
    const std::string base =
        "clt --mode aq --model cm12 --p 0.5 --N 400 --beta 0.5 --B 0.2 --R 6 --M 8 --seed 21";
    const auto one = run_cli(base + " --threads 1");
    const auto four = run_cli(base + " --threads 4");
    REQUIRE(one.rc == four.rc);
    json a = json::parse(one.out);
    json b = json::parse(four.out);
    a.erase("runtime_seconds");
    b.erase("runtime_seconds");
    REQUIRE(a.dump() == b.dump());
}

TEST_CASE("usage errors exit 1") {
    REQUIRE(run_cli("exact --no-such-flag 3", true).rc == 1);
    REQUIRE(run_cli("no-such-subcommand", true).rc == 1);
    REQUIRE(run_cli("exact --model cm2 --N 500 --beta -1 --B 0", true).rc == 1);
    REQUIRE(run_cli("lln --model cm2 --N 200 --beta 0 --B 0.1", true).rc == 1);  // missing --grid
    REQUIRE(run_cli("clt --mode nope --model cm2 --N 200", true).rc == 1);
    REQUIRE(run_cli("", true).rc == 1);  // subcommand required
}

TEST_CASE("runtime errors exit 3") {
    REQUIRE(run_cli("exact --graph does_not_exist.txt --beta 0.1 --B 0", true).rc == 3);
    REQUIRE(run_cli("generate --model cm2 --N 200 --seed 1 --out /nonexistent-dir/g.txt", true).rc == 3);
}

TEST_CASE("failed experiment gates exit 2") {
    // At N=100 the spacing-2 lattice of S is coarse enough that 5000 draws
    // resolve it and the KS gate fails decisively.
    const auto r = run_cli(
        "clt --mode rq --model cm2 --N 100 --beta 0.5 --B 0.2 --M 5000 --seed 4");
    REQUIRE(r.rc == 2);
    const json j = json::parse(r.out);
    REQUIRE(j["results"]["pass"] == false);
    REQUIRE(j["results"]["ks_p_value"].get<double>() < 0.01);
}

TEST_CASE("lln csv rows follow the grid") {
    const auto r = run_cli(
        "lln --model cm2 --N 100 --beta 0 --B 0.3 --R 3 --M 30 --eps 0.5 "
        "--grid 100,200,400 --seed 6 --format csv");
    const json hdr = json::parse(r.out.substr(2, r.out.find('\n') - 2));
    REQUIRE(hdr["command"] == "lln");
    std::size_t rows = 0;
    for (std::size_t pos = r.out.find('\n'); pos != std::string::npos;
         pos = r.out.find('\n', pos + 1))
        ++rows;
    REQUIRE(rows >= 4);  // header comment + column header + 3 grid rows
    REQUIRE(r.out.find("N,probability,upper_bound,max_graph_probability") != std::string::npos);
}

TEST_CASE("mcmc check agrees with exact moments and writes a trace") {
    const std::string trace = "cli_mcmc_trace.csv";
    const auto r = run_cli(
        "mcmc-check --model cm2 --N 128 --beta 0.3 --B 0.2 --sweeps 3000 --burn-in 500 "
        "--seed 12 --trace " + trace);
    REQUIRE(r.rc == 0);
    const json j = json::parse(r.out);
    REQUIRE(j["results"]["pass"] == true);
    REQUIRE(std::fabs(j["results"]["z_mean"].get<double>()) <= 4.0);
    REQUIRE(std::fabs(j["results"]["z_var"].get<double>()) <= 4.0);

    std::ifstream tf(trace);
    REQUIRE(tf.good());
    std::string line;
    std::getline(tf, line);
    REQUIRE(line == "sweep,S");
    std::size_t rows = 0;
    while (std::getline(tf, line)) ++rows;
    REQUIRE(rows == 2500);
    std::remove(trace.c_str());
}

TEST_CASE("help exits 0") {
    REQUIRE(run_cli("--help").rc == 0);
    REQUIRE(run_cli("clt --help").rc == 0);
}
