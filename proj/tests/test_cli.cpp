#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bakerfr/commands.hpp"
#include "oracles.hpp"

using namespace bakerfr;
using oracle::q;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bakerfr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BAKERFR_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Config, DefaultsRoundTripThroughKv) {
  const ExperimentConfig c;
  EXPECT_EQ(parse_kv(to_kv(c)), c);
  EXPECT_EQ(c.family, Family::Map2);
  EXPECT_EQ(c.l, q(1, 8));
  EXPECT_EQ(c.mode, Mode::Exact);
}

TEST(Config, ParsesEveryKey) {
  const auto c = parse_kv(
      "family = map1\nl = 2/3  # comment\nn=7\nensemble=5000\ntransient=0\nseed=42\nmode=montecarlo\n"
      "out=/tmp/x\nsamples=9\nparticles=11\nsteps=13\nb_values=1/100, 1/50\nthreads=2\n\n# trailing\n");
  EXPECT_EQ(c.family, Family::Map1);
  EXPECT_EQ(c.l, q(2, 3));
  EXPECT_EQ(c.n, 7);
  EXPECT_EQ(c.ensemble, 5000);
  EXPECT_EQ(c.transient, 0);
  EXPECT_EQ(c.seed, 42U);
  EXPECT_EQ(c.mode, Mode::MonteCarlo);
  EXPECT_EQ(c.out, "/tmp/x");
  EXPECT_EQ(c.samples, 9);
  EXPECT_EQ(c.particles, 11);
  EXPECT_EQ(c.steps, 13);
  EXPECT_EQ(c.b_values, (std::vector<Rational>{q(1, 100), q(1, 50)}));
  EXPECT_EQ(c.threads, 2);
  EXPECT_EQ(parse_kv(to_kv(c)), c);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_kv("colour = red"), ConstructionError);
  EXPECT_THROW(parse_kv("n = 0"), ConstructionError);
  EXPECT_THROW(parse_kv("n = 3x"), ConstructionError);
  EXPECT_THROW(parse_kv("family = map3"), ConstructionError);
  EXPECT_THROW(parse_kv("mode = fast"), ConstructionError);
  EXPECT_THROW(parse_kv("just words"), ConstructionError);
  EXPECT_THROW(parse_sweep("n 3"), ConstructionError);
}

TEST(Config, SweepLines) {
  const auto runs = parse_sweep("# header\nn=3 l=1/5\n\nn=4\n");
  ASSERT_EQ(runs.size(), 2U);
  EXPECT_EQ(runs[0].size(), 2U);
  EXPECT_EQ(runs[0][1].second, "1/5");
  EXPECT_EQ(runs[1][0].first, "n");
}

TEST(Serialization, RationalsIncludingBigIntegers) {
  for (const Rational& r : {q(1, 8), q(-7, 3), q(0), pow(q(2, 3), 80)}) EXPECT_EQ(rational_from_json(rational_to_json(r)), r);
  EXPECT_TRUE(rational_to_json(pow(q(2, 3), 80))[0].is_string());
  EXPECT_TRUE(rational_to_json(q(1, 8))[0].is_number_integer());
}

TEST(Serialization, MapRoundTrip) {
  for (const auto& m : {build_generalized_baker(q(1, 8)), build_simple_baker(q(2, 3)),
                        build_composite_K(q(1, 8), default_strip(q(1, 8))), build_involution(MapKind::Generalized)}) {
    const auto back = map_from_json(Json::parse(map_to_json(m).dump()));
    EXPECT_EQ(map_to_json(back), map_to_json(m));
    EXPECT_EQ(back.apply(PhasePoint<Rational>{q(1, 3), q(1, 5)}), m.apply(PhasePoint<Rational>{q(1, 3), q(1, 5)}));
  }
}

TEST(Serialization, RejectsWrongJacobian) {
  auto j = map_to_json(build_generalized_baker(q(1, 8)));
  j["branches"][0]["jacobian"] = rational_to_json(q(3));
  EXPECT_THROW(map_from_json(j), ConstructionError);
}

TEST(Commands, DensityExact) {
  ExperimentConfig c;
  c.out = scratch("density").string();
  const auto r = cmd_density(c);
  EXPECT_EQ(r.exit_code, 0);
  const auto j = Json::parse(slurp(fs::path(c.out) / "density.json"));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "density.csv"));
}

TEST(Commands, FrExactAndMonteCarlo) {
  ExperimentConfig c;
  c.out = scratch("fr").string();
  EXPECT_EQ(cmd_fr(c).exit_code, 0);
  EXPECT_TRUE(Json::parse(slurp(fs::path(c.out) / "fr.json"))["pass"].get<bool>());
  c.mode = Mode::MonteCarlo;
  c.ensemble = 20000;
  c.n = 6;
  EXPECT_EQ(cmd_fr(c).exit_code, 0);
  c.family = Family::Composite;
  EXPECT_EQ(cmd_fr(c).exit_code, 0);
  c.mode = Mode::Exact;
  EXPECT_THROW(cmd_fr(c), UnsupportedOperation);
  c.family = Family::Map2;
  c.l = q(1, 4);
  EXPECT_THROW(cmd_fr(c), UndefinedValue);
}

TEST(Commands, UpoAndReversibility) {
  ExperimentConfig c;
  c.out = scratch("upo").string();
  c.family = Family::Map1;
  c.l = q(2, 3);
  c.n = 6;
  EXPECT_EQ(cmd_upo(c).exit_code, 0);
  c.family = Family::Map2;
  c.l = q(1, 8);
  EXPECT_EQ(cmd_upo(c).exit_code, 0);
  c.samples = 200;
  EXPECT_EQ(cmd_reversibility(c).exit_code, 0);
  c.family = Family::Composite;
  EXPECT_EQ(cmd_reversibility(c).exit_code, 0);
}

TEST(Commands, MapTrajectoryMultibaker) {
  ExperimentConfig c;
  c.out = scratch("misc").string();
  EXPECT_EQ(cmd_map(c).exit_code, 0);
  EXPECT_EQ(map_to_json(map_from_json(Json::parse(slurp(fs::path(c.out) / "map.json")))),
            map_to_json(build_generalized_baker(q(1, 8))));
  c.n = 20;
  EXPECT_EQ(cmd_trajectory(c).exit_code, 0);
  c.n = 65;
  EXPECT_THROW(cmd_trajectory(c), ConstructionError);
  c.particles = 2000;
  c.steps = 200;
  c.b_values = {q(1, 5)};
  EXPECT_EQ(cmd_multibaker(c).exit_code, 0);
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "sweep.csv"));
  c.family = Family::Map1;
  EXPECT_THROW(cmd_multibaker(c), UnsupportedOperation);
}

TEST(Commands, ResultsIgnoreThreadCount) {
  ExperimentConfig c;
  c.mode = Mode::MonteCarlo;
  c.ensemble = 20000;
  c.n = 5;
  c.out = scratch("t1").string();
  c.threads = 1;
  cmd_fr(c);
  const std::string a = slurp(fs::path(c.out) / "fr.json");
  c.out = scratch("t3").string();
  c.threads = 3;
  cmd_fr(c);
  EXPECT_EQ(a, slurp(fs::path(c.out) / "fr.json"));
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("bin");
  EXPECT_EQ(run_cli("density --out " + dir.string()), 0);
  EXPECT_EQ(run_cli("density --l 1/3 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("fr --l 1/4 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("density --bogus 1"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("fr --config " + (dir / "missing.conf").string()), 2);
}

TEST(Binary, FlagsOverrideConfigFile) {
  const auto dir = scratch("precedence");
  std::ofstream(dir / "a.conf") << "family = map1\nl = 2/3\nn = 3\n";
  ASSERT_EQ(run_cli("fr --config " + (dir / "a.conf").string() + " --n 5 --out " + (dir / "o").string()), 0);
  const auto j = Json::parse(slurp(dir / "o" / "fr.json"));
  EXPECT_EQ(j["n"], "5");
  EXPECT_EQ(j["family"], "map1");
}

TEST(Binary, SweepWritesRunDirectories) {
  const auto dir = scratch("sweep");
  std::ofstream(dir / "s.txt") << "n=2\nn=3 l=1/5\n";
  ASSERT_EQ(run_cli("fr --sweep " + (dir / "s.txt").string() + " --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "run_000" / "fr.json"));
  EXPECT_TRUE(fs::exists(dir / "run_001" / "fr.json"));
}
