#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twm/cli.hpp"

using namespace twm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("twm_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    auto p = dir / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(TWM_CLI) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string scenario_path(const std::string& name) { return std::string(TWM_SOURCE_DIR) + "/scenarios/" + name; }

const char* kSmall = R"(
# small matched EIT run
medium.mu1 = 0.05
medium.mu2 = 0.5
grid.z_max = 10
grid.n_z = 11
)";

}  // namespace

TEST(Scenario, DefaultsAndComments) {
    auto s = parse_scenario(kSmall);
    EXPECT_DOUBLE_EQ(s.medium.mu3, 1.0);
    EXPECT_EQ(s.n_z, 11);
    EXPECT_EQ(s.solver, "analytic");
    EXPECT_EQ(s.z_grid().back(), 10.0);
    EXPECT_EQ(echo(s).size(), scenario_keys().size());
}

TEST(Scenario, UnknownAndMalformedKeysAreErrors) {
    EXPECT_THROW(parse_scenario("medium.mu4 = 1\n"), Error);
    EXPECT_THROW(parse_scenario("medium.mu1 = abc\n"), Error);
    EXPECT_THROW(parse_scenario("medium.mu1 0.1\n"), Error);
    EXPECT_THROW(parse_scenario("medium.mu1 = 0.1\nmedium.mu1 = 0.2\n"), Error);
    EXPECT_THROW(parse_scenario("grid.n_z = 2.5\n"), Error);
    EXPECT_THROW(parse_scenario("solver = magic\n"), Error);
    EXPECT_THROW(parse_scenario("sweep.parameter = solver\n"), Error);
    try {
        parse_scenario("grid.n_z = 0\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(Scenario, Envelopes) {
    EXPECT_EQ(parse_envelope("flat").shape(), Envelope::Shape::Flat);
    EXPECT_NEAR(parse_envelope("gaussian(2, 1)")(2.0), 0.5, 1e-15);
    EXPECT_NEAR(parse_envelope("sech(1)")(0.0), 1.0, 1e-15);
    EXPECT_NEAR(parse_envelope("flattop(0, 10, 1)")(5.0), 1.0 - 2 * std::exp(-10.0), 1e-8);
    EXPECT_DOUBLE_EQ(parse_envelope("samples(0:0, 1:1, 2:0)")(0.5), 0.5);
    EXPECT_THROW(parse_envelope("square(1)"), Error);
    EXPECT_THROW(parse_envelope("gaussian(-1)"), Error);
    EXPECT_THROW(parse_envelope("samples(0:0, 1:2)"), Error);
}

TEST(Scenario, HashIgnoresFormattingButNotValues) {
    auto a = parse_scenario("medium.mu1 = 0.05\n");
    auto b = parse_scenario("  medium.mu1=5e-2   # same value\n\n");
    auto c = parse_scenario("medium.mu1 = 0.06\n");
    EXPECT_EQ(scenario_hash(a), scenario_hash(b));
    EXPECT_NE(scenario_hash(a), scenario_hash(c));
}

TEST(Cli, SolveWritesCsvWithMetadata) {
    auto dir = scratch("solve");
    auto scn = write_file(dir, "s.scn", kSmall);
    cli::Options o{"solve", scn, dir.string()};
    std::ostringstream out, err;
    ASSERT_EQ(cli::run(o, out, err), 0) << err.str();
    auto text = slurp(dir / "twm_analytic.csv");
    EXPECT_EQ(text.rfind("# scenario_hash = ", 0), 0u);
    EXPECT_NE(text.find("\ntau,z,eta1,eta2,eta3,J,phi,pop1,pop2,pop3\n"), std::string::npos);
    auto s = parse_scenario(kSmall);
    EXPECT_NE(text.find(scenario_hash(s)), std::string::npos);
}

TEST(Cli, OutputIsDeterministicAcrossThreadCounts) {
    auto dir = scratch("det");
    std::string text = std::string(kSmall) +
                       "boundary.envelope1 = gaussian(4)\ngrid.tau_min = -3\ngrid.tau_max = 3\ngrid.n_tau = 13\n"
                       "solver = canonical-ode\n";
    auto scn = write_file(dir, "s.scn", text);
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    std::ostringstream out, err;
    ASSERT_EQ(cli::run({"solve", scn, (dir / "a").string(), std::nullopt, std::nullopt, std::nullopt, 1}, out, err), 0);
    ASSERT_EQ(cli::run({"solve", scn, (dir / "b").string(), std::nullopt, std::nullopt, std::nullopt, 4}, out, err), 0);
    EXPECT_EQ(slurp(dir / "a" / "twm_canonical-ode.csv"), slurp(dir / "b" / "twm_canonical-ode.csv"));
}

TEST(Cli, AllSolversAgreeOnJ) {
    auto dir = scratch("all");
    std::ostringstream out, err;
    cli::Options o{"solve", scenario_path("eit_matched.scn"), dir.string()};
    o.format = "csv";
    o.threads = 3;
    ASSERT_EQ(cli::run(o, out, err), 0) << err.str();
    auto sc = load_scenario(scenario_path("eit_matched.scn"));
    auto lines = cli::compare(sc, 3);
    for (const auto& l : lines) EXPECT_FALSE(l.breach()) << l.name << " " << l.max;
    for (const char* f : {"eit_matched_analytic.csv", "eit_matched_canonical-ode.csv", "eit_matched_maxwell-bloch.csv", "eit_matched_regime.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, SweepRowsAndSingleCount) {
    auto dir = scratch("sweep");
    std::string text = "medium.mu1 = 0.05\nmedium.mu2 = 0.5\ngrid.n_z = 11\n"
                       "grid.z_max = 400\nsweep.parameter = medium.delta_k\nsweep.min = 0\nsweep.max = 0.02\nsweep.count = 5\n";
    auto scn = write_file(dir, "s.scn", text);
    std::ostringstream out, err;
    ASSERT_EQ(cli::run({"sweep", scn, dir.string(), std::nullopt, std::nullopt, std::nullopt, 3}, out, err), 0) << err.str();
    auto csv = slurp(dir / "twm_sweep.csv");
    EXPECT_NE(csv.find("medium.delta_k,J_max,z_opt,epsilon,W,status"), std::string::npos);
    auto s = parse_scenario(text);
    auto r0 = cli::sweep_row(s, 0.0), r1 = cli::sweep_row(s, 0.02);
    EXPECT_GT(r0.J_max, r1.J_max);  // mismatch lowers the turning point
    EXPECT_NEAR(r0.epsilon, r0.J_max, 1e-15);

    auto one = write_file(dir, "one.scn", std::string(kSmall) + "sweep.parameter = medium.delta_k\nsweep.count = 1\n");
    ASSERT_EQ(cli::run({"sweep", one, dir.string()}, out, err), 0);
}

TEST(Cli, SweepPeaksAtTunedDetuning) {
    auto sc = load_scenario(scenario_path("sweep_delta3.scn"));
    double tuned = maxcoh_matched_delta3(sc.medium, 1.0);
    auto at = cli::sweep_row(sc, tuned);
    for (double f : {0.98, 1.02}) EXPECT_LT(cli::sweep_row(sc, f * tuned).epsilon, at.epsilon);
}

TEST(Cli, BinaryExitCodes) {
    auto dir = scratch("bin");
    EXPECT_EQ(run_cli("validate --scenario " + scenario_path("eit_matched.scn")), 0);
    auto empty = write_file(dir, "empty.scn", "grid.n_z = 0\n");
    EXPECT_EQ(run_cli("solve --scenario " + empty + " --out " + dir.string()), 2);
    auto typo = write_file(dir, "typo.scn", "medium.mu_1 = 0.1\n");
    EXPECT_EQ(run_cli("validate --scenario " + typo), 2);
    auto badsweep = write_file(dir, "bs.scn", "sweep.parameter = medium.nope\n");
    EXPECT_EQ(run_cli("sweep --scenario " + badsweep + " --out " + dir.string()), 2);
    // dG/dlambda vanishes: max-coherence solution fed with mu2 > mu3
    auto order = write_file(dir, "order.scn", "medium.mu2 = 2\nregime = maxcoh-depleted\n");
    EXPECT_EQ(run_cli("solve --scenario " + order + " --out " + dir.string()), 2);
    EXPECT_EQ(run_cli("compare --scenario " + scenario_path("nonadiabatic.scn") + " --out " + dir.string()), 4);
    EXPECT_EQ(run_cli("frobnicate"), 2);
}
