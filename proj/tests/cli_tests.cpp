// Process-level checks of the command-line tool. The binary path comes from
// the OAMU_CLI environment variable (set by CTest); scratch files go under
// OAMU_WORKDIR.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string cli_path() {
    const char* p = std::getenv("OAMU_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string workdir() {
    const char* p = std::getenv("OAMU_WORKDIR");
    return p ? std::string(p) : std::string(".");
}

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("charvals: free rotor even values") {
    const auto res = run("charvals --q 0 --max-order 4 --parity even");
    CHECK(res.exit_code == 0);
    const auto rows = parse_csv(res.output);
    REQUIRE(rows.size() == 4);  // header + orders 0, 2, 4
    CHECK(rows[0] == std::vector<std::string>{"parity", "order", "charvalue"});
    CHECK(std::stod(rows[1][2]) == doctest::Approx(0.0));
    CHECK(std::stod(rows[2][2]) == doctest::Approx(4.0));
    CHECK(std::stod(rows[3][2]) == doctest::Approx(16.0));
}

TEST_CASE("charvals: ground value at q=1 and interlaced both-parity output") {
    const auto res = run("charvals --q 1 --max-order 0 --parity even");
    CHECK(res.exit_code == 0);
    const auto rows = parse_csv(res.output);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(-0.4551386).epsilon(1e-6));

    const auto both = run("charvals --q 5 --max-order 4 --parity both");
    CHECK(both.exit_code == 0);
    const auto brows = parse_csv(both.output);
    REQUIRE(brows.size() == 6);  // header + a0 b2 a2 b4 a4
    double prev = -1e300;
    for (std::size_t i = 1; i < brows.size(); ++i) {
        const double v = std::stod(brows[i][2]);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("charvals: invalid q exits with the usage code") {
    CHECK(run("charvals --q -1").exit_code == 2);
}

TEST_CASE("sweep: single step at q=0 is the uniform row") {
    const auto res = run("sweep --q-min 0 --q-max 1 --steps 1");
    CHECK(res.exit_code == 0);
    const auto rows = parse_csv(res.output);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "q");
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));   // D2
    CHECK(std::stod(rows[1][5]) == doctest::Approx(0.0));   // product
}

TEST_CASE("sweep: small-q rows show the factor-two gap over the bound") {
    const auto res = run("sweep --q-min 0.001 --q-max 0.01 --steps 3 --log");
    CHECK(res.exit_code == 0);
    const auto rows = parse_csv(res.output);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double d2 = std::stod(rows[i][1]);
        const double varl = std::stod(rows[i][2]);
        const double bound = std::stod(rows[i][6]);
        const double product = std::stod(rows[i][5]);
        // product here is D*dL; compare squares against the squared bound.
        CHECK(d2 * varl / (bound * bound) == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(product == doctest::Approx(std::sqrt(d2 * varl)).epsilon(1e-12));
        const double vm_minus = std::stod(rows[i][8]);
        CHECK(vm_minus >= -1e-10);
    }
}

TEST_CASE("sweep: every row keeps the von Mises product above the Mathieu one") {
    const auto res = run("sweep --q-min 0.1 --q-max 50 --steps 12 --log");
    CHECK(res.exit_code == 0);
    const auto rows = parse_csv(res.output);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][8]) >= -1e-10);
    }
}

TEST_CASE("sweep: rejects a reversed grid") {
    CHECK(run("sweep --q-min 2 --q-max 1").exit_code == 2);
    CHECK(run("sweep --q-min 1 --q-max 1").exit_code == 2);
}

TEST_CASE("minstate: uniform target") {
    const auto res = run("minstate --dispersion 1.0");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"qstar\": 0.0") != std::string::npos);
}

TEST_CASE("minstate: variance round trip documented in the output") {
    const auto res = run("minstate --varl 0.5");
    CHECK(res.exit_code == 0);
    const auto pos = res.output.find("\"abs_error\":");
    REQUIRE(pos != std::string::npos);
    const double err = std::stod(res.output.substr(pos + 12));
    CHECK(err < 1e-9);
}

TEST_CASE("minstate: mean shift and infeasible exit code") {
    const auto res = run("minstate --dispersion 0.5 --mean-m 3");
    CHECK(res.exit_code == 0);
    const auto pos = res.output.find("\"mean_l\":");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(res.output.substr(pos + 9)) == doctest::Approx(3.0).epsilon(1e-9));

    CHECK(run("minstate --dispersion 1.5").exit_code == 3);
    CHECK(run("minstate --varl -0.25").exit_code == 3);
    CHECK(run("minstate").exit_code == 2);
}

TEST_CASE("simulate: kappa 0 gives the uniform row") {
    const auto res = run("simulate --kappa 0 --repeats 3 --seed 5");
    CHECK(res.exit_code == 0);
    const auto rows = parse_csv(res.output);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"kappa", "D", "product", "product_err"});
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));
    CHECK(std::stod(rows[1][2]) == doctest::Approx(0.0));
}

TEST_CASE("simulate: byte-identical reruns and manifest sidecar") {
    const std::string out1 = workdir() + "/cli_sim_a.csv";
    const std::string out2 = workdir() + "/cli_sim_b.csv";
    const std::string args = "simulate --kappa 2,6 --shots 1000 --repeats 10 --seed 42 --out ";
    CHECK(run(args + out1).exit_code == 0);
    CHECK(run(args + out2).exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));
    const std::string manifest = slurp(out1 + ".manifest.json");
    CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
    CHECK(manifest.find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("simulate: default grid covers wide-to-narrow dispersions within budget") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run("simulate");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(res.exit_code == 0);
    CHECK(secs < 60.0);
    const auto rows = parse_csv(res.output);
    REQUIRE(rows.size() > 10);
    CHECK(std::stod(rows[1][1]) >= 0.99);            // widest prepared beam
    CHECK(std::stod(rows.back()[1]) <= 0.1 + 1e-9);  // narrowest
}

TEST_CASE("simulate: rerun from the manifest reproduces the file") {
    const std::string out = workdir() + "/cli_sim_rerun.csv";
    CHECK(run("simulate --kappa 4 --shots 500 --repeats 5 --seed 9 --out " + out).exit_code == 0);
    const std::string first = slurp(out);
    CHECK(run("rerun " + out + ".manifest.json").exit_code == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("figure1: files exist, parse, and satisfy the advertised identities") {
    const std::string prefix = workdir() + "/cli_fig1_";
    const auto res = run("figure1 --out " + prefix +
                         " --kappa 1,10 --shots 2000 --repeats 8 --seed 3 --d-min 0.05 "
                         "--d-max 0.999 --grid-points 24");
    CHECK(res.exit_code == 0);
    const auto mathieu = parse_csv(slurp(prefix + "theory_mathieu.csv"));
    const auto vonmises = parse_csv(slurp(prefix + "theory_vonmises.csv"));
    const auto points = parse_csv(slurp(prefix + "simulated_points.csv"));
    REQUIRE(mathieu.size() == 25);
    REQUIRE(vonmises.size() == 25);
    REQUIRE(points.size() == 3);
    CHECK(mathieu[0][0] == "D");
    CHECK(vonmises[0][9] == "vm_minus_mathieu");

    // bound column is sqrt(1 - D^2)/2 exactly; the product conventions agree.
    for (std::size_t i = 1; i < mathieu.size(); ++i) {
        const double d = std::stod(mathieu[i][0]);
        const double bound = std::stod(mathieu[i][7]);
        CHECK(bound == doctest::Approx(0.5 * std::sqrt(1.0 - d * d)).epsilon(1e-12));
        const double product = std::stod(mathieu[i][5]);
        const double product_sq = std::stod(mathieu[i][6]);
        CHECK(product * product == doctest::Approx(product_sq).epsilon(1e-10));
    }
    // Narrow-beam endpoint of the Mathieu curve: D*dL within 2% of 1/2.
    CHECK(std::stod(mathieu[1][5]) == doctest::Approx(0.5).epsilon(0.02));

    const std::string manifest = slurp(prefix + "manifest.json");
    CHECK(manifest.find("max_abs_vm_minus_mathieu_dl") != std::string::npos);
}

TEST_CASE("figure1: unwritable output prefix exits with the I/O code") {
    CHECK(run("figure1 --out /nonexistent-dir/fig_ --grid-points 8 --repeats 2 --kappa 1")
              .exit_code == 4);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("nosuchcommand").exit_code == 2);
    CHECK(run("sweep").exit_code == 2);  // missing required flags
}
