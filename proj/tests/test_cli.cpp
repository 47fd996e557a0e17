#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gibbslie/cli.hpp"

using namespace gibbslie;
using cli::Json;
using cli::Options;

namespace {

Options with_algebra(const std::string& a, const std::string& element = "")
{
    Options o;
    o.algebra = a;
    o.element = element;
    return o;
}

}  // namespace

TEST(Report, SchemaBlock)
{
    const auto r = cli::algebra_validate(with_algebra("h3"));
    EXPECT_EQ(r.exit_code, cli::kPass);
    for (const char* key : {"schema", "schema_version", "version", "command", "inputs", "results", "tolerances", "seed"})
        EXPECT_TRUE(r.report.contains(key)) << key;
    EXPECT_FALSE(r.report.contains("wall_time_s"));
    Options o = with_algebra("h3");
    o.timing = true;
    EXPECT_TRUE(cli::algebra_validate(o).report.contains("wall_time_s"));
}

TEST(Report, ByteStableGivenSeed)
{
    Options o = with_algebra("hsp2", "z+p2+q2");
    o.seed = 42;
    EXPECT_EQ(cli::pipeline(o).report.dump(), cli::pipeline(o).report.dump());
    Options k;
    k.seed = 3;
    EXPECT_EQ(cli::kms(k).report.dump(), cli::kms(k).report.dump());
}

TEST(AlgebraValidate, ExitCodes)
{
    EXPECT_EQ(cli::algebra_validate(with_algebra("h3")).exit_code, cli::kPass);

    const auto bad = cli::algebra_validate(with_algebra("sl2r_corrupt"));
    EXPECT_EQ(bad.exit_code, cli::kNegative);
    EXPECT_EQ(bad.report["results"]["first_violation"], Json::array({"h", "e", "f"}));

    const auto empty = cli::algebra_validate(with_algebra("empty"));
    EXPECT_EQ(empty.exit_code, cli::kInputError);
    EXPECT_EQ(empty.report["results"]["error"]["kind"], "parse_error");

    EXPECT_EQ(cli::algebra_validate(with_algebra("no_such_algebra")).exit_code, cli::kInputError);
}

TEST(Pipeline, JacobiExample)
{
    const auto r = cli::pipeline(with_algebra("hsp2", "z+p2+q2"));
    ASSERT_EQ(r.exit_code, cli::kPass) << r.report.dump(2);
    const Json& res = r.report["results"];
    EXPECT_TRUE(res["verdict"].get<bool>());
    std::size_t admissible = 99;
    for (const auto& s : res["stages"])
        if (s["stage"] == "admissibility") admissible = s["admissible_count"].get<std::size_t>();
    EXPECT_EQ(admissible, 2u);
    const Json& w = res["decision"]["witness"];
    ASSERT_FALSE(w.is_null());
    EXPECT_TRUE(w["system"]["admissible"].get<bool>());
}

TEST(Pipeline, HeisenbergFailsAtCompInteriorMember)
{
    const auto r = cli::pipeline(with_algebra("h3", "p"));
    EXPECT_EQ(r.exit_code, cli::kNegative);
    EXPECT_EQ(r.report["results"]["failing_stage"], "comp_interior_member");
}

TEST(Pipeline, Su2ViaCompactBranch)
{
    for (const char* x : {"e1", "e1+2e2", "-3e3+1/2*e1"}) {
        const auto r = cli::pipeline(with_algebra("su2", x));
        EXPECT_EQ(r.exit_code, cli::kPass) << x;
        EXPECT_EQ(r.report["results"]["decision"]["stage"], "compact_algebra") << x;
    }
}

TEST(Pipeline, ErrorsCarryStageLabels)
{
    // Elliptic but outside the hinted Cartan span{e - f}.
    const auto r = cli::pipeline(with_algebra("sl2r", "e-f+1/10*h"));
    EXPECT_EQ(r.exit_code, cli::kInputError);
    EXPECT_EQ(r.report["results"]["error"]["kind"], "needs_conjugation");
    EXPECT_EQ(r.report["results"]["error"]["stage"], "is_gibbs_element");

    const auto p = cli::pipeline(with_algebra("hsp2", "z+w"));
    EXPECT_EQ(p.exit_code, cli::kInputError);
    EXPECT_EQ(p.report["results"]["error"]["stage"], "parse_element");
}

TEST(GibbsElement, Sl2Verdicts)
{
    EXPECT_EQ(cli::gibbs_element(with_algebra("sl2r", "e-f")).exit_code, cli::kPass);
    EXPECT_EQ(cli::gibbs_element(with_algebra("sl2r", "h")).exit_code, cli::kNegative);
    EXPECT_EQ(cli::gibbs_element(with_algebra("sl2r", "e")).exit_code, cli::kNegative);
}

TEST(Spectral, Modes)
{
    Options o = with_algebra("sl2r", "e-f");
    EXPECT_EQ(cli::spectral(o).exit_code, cli::kPass);
    o.element = "e";
    EXPECT_EQ(cli::spectral(o).exit_code, cli::kNegative);
    o.spectral_mode = "ellipticity-ideal";
    const auto id = cli::spectral(o);
    EXPECT_EQ(id.exit_code, cli::kPass);
    EXPECT_FALSE(id.report["results"]["elliptic"].get<bool>());
    o.spectral_mode = "compact-embed";
    o.element = "e-f";
    EXPECT_EQ(cli::spectral(o).exit_code, cli::kPass);
    o.spectral_mode = "bogus";
    EXPECT_EQ(cli::spectral(o).exit_code, cli::kInputError);
}

TEST(RootsAndCones, JacobiAlgebra)
{
    const auto r = cli::roots(with_algebra("hsp2"));
    EXPECT_EQ(r.exit_code, cli::kPass);
    EXPECT_EQ(r.report["results"]["positive_systems"].size(), 2u);
    const auto c = cli::cones(with_algebra("hsp2"));
    EXPECT_EQ(c.exit_code, cli::kPass);
    EXPECT_EQ(c.report["results"]["admissible_count"], 2);
    EXPECT_EQ(cli::roots(with_algebra("h3")).exit_code, cli::kInputError);
}

TEST(Trace, OscillatorAndSu2)
{
    const auto r = cli::trace(with_algebra("oscillator", "z+n"));
    ASSERT_EQ(r.exit_code, cli::kPass) << r.report.dump(2);
    EXPECT_NEAR(r.report["results"]["value"][0].get<double>(), 1 / (1 - std::exp(-1.0)), 1e-10);
    EXPECT_TRUE(r.report["results"]["interior_c_max"].get<bool>());

    const auto s = cli::trace(with_algebra("su2", "e3"));
    EXPECT_EQ(s.exit_code, cli::kPass);
    EXPECT_EQ(s.report["results"]["module"]["family"], "su2_irrep");
}

TEST(Kms, Su2DefaultsPass)
{
    const auto r = cli::kms(Options{});
    EXPECT_EQ(r.exit_code, cli::kPass) << r.report.dump(2);
    EXPECT_TRUE(r.report["results"]["mixture"]["pass"].get<bool>());
}

TEST(Kms, PerturbFails)
{
    Options o;
    o.perturb = true;
    const auto r = cli::kms(o);
    EXPECT_EQ(r.exit_code, cli::kNegative);
    EXPECT_GT(r.report["results"]["state"]["reflection_residual"].get<double>(), 1e-3);
}

TEST(Kms, OscillatorRefusalIsReported)
{
    Options o;
    o.family = "oscillator";
    o.lambda = -1;
    o.N = 16;
    const auto r = cli::kms(o);
    EXPECT_EQ(r.exit_code, cli::kInputError);
    EXPECT_TRUE(r.report["results"]["refused"].get<bool>());
}

TEST(Kms, InputErrors)
{
    Options o;
    o.family = "so3";
    EXPECT_EQ(cli::kms(o).exit_code, cli::kInputError);
    o.family = "su2";
    o.word = "e1:abc";
    EXPECT_EQ(cli::kms(o).exit_code, cli::kInputError);
}

TEST(Fixtures, EnvironmentOverride)
{
    const auto dir = std::filesystem::temp_directory_path() / "gibbslie_fixture_override";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "toy.toml");
        out << "dim = 2\nbasis = [\"a\", \"b\"]\nstructure_constants = [[0, 1, 1, 1, 1]]\n";
    }
    ::setenv("GIBBSLIE_FIXTURES", dir.c_str(), 1);
    const auto r = cli::algebra_validate(with_algebra("toy"));
    ::unsetenv("GIBBSLIE_FIXTURES");
    EXPECT_EQ(r.exit_code, cli::kPass);
    EXPECT_EQ(r.report["results"]["dim"], 2);
    EXPECT_EQ(cli::algebra_validate(with_algebra("toy")).exit_code, cli::kInputError);
    std::filesystem::remove_all(dir);
}
