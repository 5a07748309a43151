#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ppca/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

fs::path workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "ppca_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the installed binary as a subprocess.
Result run(const std::string& args) {
    const char* exe = std::getenv("PPCA_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "PPCA_CLI must point at the ppca executable");
    const fs::path out = workdir() / "stdout.txt";
    const fs::path err = workdir() / "stderr.txt";
    const std::string cmd = std::string("'") + exe + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("constants: closed-form record") {
    const auto r = run("constants --c 0.4 --sigma2 1");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(j["lambda_star"].get<double>() - 1.65126) < 1e-5);
    CHECK(std::abs(j["lambda_prime"].get<double>() - 1.63246) < 1e-5);
    CHECK(std::abs(j["b"].get<double>() - 2.41633) < 1e-5);
    CHECK(j["method"] == "closed_form");
}

TEST_CASE("constants: generic route agrees with the closed forms") {
    const auto closed = json::parse(run("constants --c 2 --sigma2 1").out);
    const auto r = run("constants --c 2 --sigma2 1 --generic");
    REQUIRE(r.code == 0);
    const auto g = json::parse(r.out);
    for (const char* key : {"lambda_star", "lambda_prime", "a", "b", "a_prime", "b_prime", "beta", "mass0_ppca", "mass0_pca"})
        CHECK(std::abs(g[key].get<double>() - closed[key].get<double>()) < 1e-6);
    CHECK(g["mass0_ppca"].get<double>() == doctest::Approx(0.75));
}

TEST_CASE("thresholds and limits") {
    const auto t = json::parse(run("thresholds --c 0.4").out);
    CHECK(std::abs(t["ppca"]["lambda_star"].get<double>() - 1.65126) < 1e-5);
    CHECK(std::abs(t["pca"]["lambda_prime"].get<double>() - 1.63246) < 1e-5);

    const auto r = run("limits --c 0.4 --lambda 3 --lambda 1.6");
    REQUIRE(r.code == 0);
    const auto l = json::parse(r.out)["limits"];
    REQUIRE(l.size() == 2);
    CHECK(l[0]["ppca"]["tag"] == "distant");
    CHECK(std::abs(l[0]["ppca"]["value"].get<double>() - 3.3) < 1e-12);
    CHECK(std::abs(l[0]["pca"]["value"].get<double>() - 3.6) < 1e-12);
    CHECK(l[1]["ppca"]["tag"] == "stuck");
    CHECK(l[1]["pca"]["tag"] == "stuck");
}

TEST_CASE("limits with a spectrum file") {
    std::ofstream(workdir() / "h.txt") << "atom 1 0.5\natom 2 0.5\n";
    const auto r = run("limits --spectrum '" + (workdir() / "h.txt").string() + "' --c 0.3 --lambda 10");
    REQUIRE(r.code == 0);
    const auto l = json::parse(r.out)["limits"][0];
    // psi = lambda (1 + c sum w t / (lambda - t))
    const double psi = 10 * (1 + 0.3 * (0.5 * 1 / 9.0 + 0.5 * 2 / 8.0));
    CHECK(l["pca"]["value"].get<double>() == doctest::Approx(psi).epsilon(1e-12));
}

TEST_CASE("rho: grid starts at one") {
    const auto r = run("rho --grid 0:10:101");
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 102);
    CHECK(rows[0] == std::vector<std::string>{"c", "rho"});
    CHECK(std::stod(rows[1][1]) == 1.0);
    double prev = 1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) >= prev);
        prev = std::stod(rows[i][1]);
    }
}

TEST_CASE("density: closed form and generic routes") {
    const auto f = csv(run("density --law f --c 0.4 --sigma2 1 --grid 1:1:1").out);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == std::vector<std::string>{"t", "pdf", "cdf"});
    CHECK(std::abs(std::stod(f[1][1]) - 0.47746) < 1e-5);
    const auto pca = csv(run("density --law pca --c 0.4 --sigma2 1 --grid 1:1:1").out);
    CHECK(std::abs(std::stod(pca[1][1]) - 0.47746) < 1e-4);
    const auto g = csv(run("density --law g --c 0.4 --grid 0.5:2:4").out);
    const auto ppca = csv(run("density --law ppca --c 0.4 --grid 0.5:2:4").out);
    REQUIRE(g.size() == 5);
    REQUIRE(ppca.size() == 5);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(std::abs(std::stod(g[i][1]) - std::stod(ppca[i][1])) < 5e-3);
        CHECK(std::abs(std::stod(g[i][2]) - std::stod(ppca[i][2])) < 5e-3);
    }
}

TEST_CASE("debias: eigenvalue csv in, debiased csv out") {
    std::ofstream(workdir() / "eig.csv") << "value\n3.6\n2.0\n1.5\n1.0\n0.5\n";
    const auto r = run("debias --input '" + (workdir() / "eig.csv").string() + "' --method pca --c 0.4 --top 2");
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"j", "value", "debiased"});
    // -1 / (c m + (c - 1)/z) with m the mean of 1/(t - z) over the tail
    const double z = 3.6;
    const double m = (1 / (2.0 - z) + 1 / (1.5 - z) + 1 / (1.0 - z) + 1 / (0.5 - z)) / 4;
    CHECK(std::stod(rows[1][2]) == doctest::Approx(-1 / (0.4 * m + (0.4 - 1) / z)).epsilon(1e-9));
}

TEST_CASE("fit: PCA eigenvalues of a data file") {
    std::ofstream(workdir() / "x.csv") << "a,b\n1,0\n-1,0\n0,2\n0,-2\n";
    const auto out = (workdir() / "fit.csv").string();
    const auto r = run("fit --input '" + (workdir() / "x.csv").string() + "' --output '" + out + "' --method pca");
    REQUIRE(r.code == 0);
    const auto rows = csv(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(2.0));
    CHECK(std::stod(rows[2][1]) == doctest::Approx(0.5));
    CHECK(run("fit --input '" + (workdir() / "x.csv").string() + "' --output '" + out + "' --method ppca").code == 2);
    CHECK(run("fit --input '" + (workdir() / "x.csv").string() + "' --output '" + out + "' --method ppca --seed 3").code == 0);
}

TEST_CASE("robust-analytic: worked scenario") {
    std::ofstream(workdir() / "s.json") << R"({"epsilon":0.01,"etas":[70,70],"K1":1,"lambda1":3,"c":0.4})";
    const auto r = run("robust-analytic --scenario '" + (workdir() / "s.json").string() + "'");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["r_pca"] == 3);
    CHECK(j["r_ppca"] == 1);
    CHECK(j["eta_win"] == true);
    CHECK(std::abs(j["pca_spectrum"]["signal"].get<double>() - 2.94) < 1e-12);
}

TEST_CASE("simulate: requires a seed, writes deterministic reports") {
    std::ofstream(workdir() / "run.cfg") << "n = 300\np = 120\nspikes = 3\nreplicates = 2\n";
    const std::string base = "simulate spike --config '" + (workdir() / "run.cfg").string() + "'";
    const auto missing = run(base);
    CHECK(missing.code == 2);
    CHECK(json::parse(missing.err)["error"] == "usage");

    const auto a = run(base + " --seed 5 --out-prefix '" + (workdir() / "a_").string() + "'");
    REQUIRE(a.code == 0);
    const auto b = run(base + " --seed 5 --threads 2 --out-prefix '" + (workdir() / "b_").string() + "'");
    REQUIRE(b.code == 0);
    const auto ja = json::parse(a.out);
    REQUIRE(ja["files"].size() == 2);
    for (const char* name : {"spike_replicates.csv", "spike_summary.csv"})
        CHECK(slurp(workdir() / (std::string("a_") + name)) == slurp(workdir() / (std::string("b_") + name)));
}

TEST_CASE("errors are machine-readable JSON with nonzero exit codes") {
    const auto unknown = run("constants --c 0.4 --bogus 1");
    CHECK(unknown.code == 2);
    CHECK(json::parse(unknown.err)["error"] == "usage");
    const auto bad_value = run("constants --c -1");
    CHECK(bad_value.code == 1);
    CHECK(json::parse(bad_value.err).contains("message"));
    std::ofstream(workdir() / "bad.cfg") << "n = 100\ncolour = red\n";
    const auto cfg = run("simulate spike --seed 1 --config '" + (workdir() / "bad.cfg").string() + "'");
    CHECK(cfg.code == 1);
    CHECK(json::parse(cfg.err)["error"] == "config");
    const auto no_cmd = run("");
    CHECK(no_cmd.code != 0);
}

TEST_CASE("version prints the solver tolerances") {
    const auto r = run("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("1e-10") != std::string::npos);
}

TEST_CASE("cli_main in-process matches the subprocess output") {
    std::ostringstream out, err;
    CHECK(ppca::cli_main({"rho", "--grid", "0:1:2"}, out, err) == 0);
    CHECK(out.str() == run("rho --grid 0:1:2").out);
}
