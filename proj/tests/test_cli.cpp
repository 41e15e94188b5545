// End-to-end CLI behavior through the in-process entry point: subcommand
// output schemas, exit codes, input plumbing (inline, stdin, file), and the
// JSON round trip of decomposition plans.

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qchan/cli.hpp"

namespace {

using namespace qchan;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    CliResult r;
    r.code = cli_run(std::move(args), in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

const char* kBoundaryAnchor = R"({"lambda":[0.5,0.5,0.25],"t":[0,0,0.75]})";

TEST(CliVerify, BoundaryAnchorReport) {
    const CliResult r = run_cli({"verify", kBoundaryAnchor});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("verdict"), "Boundary");
    EXPECT_FALSE(j.at("unital").get<bool>());
    EXPECT_DOUBLE_EQ(j.at("q")[0].get<double>(), 0.5625);
    EXPECT_DOUBLE_EQ(j.at("q")[1].get<double>(), 0.1875);
    EXPECT_DOUBLE_EQ(j.at("q")[2].get<double>(), 0.1875);
    EXPECT_DOUBLE_EQ(j.at("q")[3].get<double>(), 0.0625);
    EXPECT_DOUBLE_EQ(j.at("bound").get<double>(), 0.5625);
    EXPECT_DOUBLE_EQ(j.at("margin").get<double>(), 0.0);
    EXPECT_NEAR(j.at("choi_eigs")[2].get<double>(), 0.75, 1e-9);
    EXPECT_NEAR(j.at("choi_eigs")[3].get<double>(), 1.25, 1e-9);
    EXPECT_FALSE(j.at("upper_root_contact").get<bool>());
}

TEST(CliVerify, NotCpExitsTwo) {
    const CliResult r = run_cli({"verify", R"({"lambda":[-1,-1,-1]})"});
    EXPECT_EQ(r.code, 2);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("verdict"), "NotCP");
    EXPECT_NEAR(j.at("eig_margin").get<double>(), -1.0, 1e-9);
}

TEST(CliVerify, MatrixFormEqualsLambdaShorthand) {
    const CliResult a = run_cli({"verify", R"({"lambda":[0.6,0.4,0.2]})"});
    const CliResult b = run_cli(
        {"verify", R"({"M":[[0.6,0,0],[0,0.4,0],[0,0,0.2]],"t":[0,0,0]})"});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_TRUE(Json::parse(a.out).at("unital").get<bool>());
}

TEST(CliVerify, StdinAndFileInputs) {
    const CliResult inline_r = run_cli({"verify", kBoundaryAnchor});
    const CliResult stdin_r = run_cli({"verify", "-"}, kBoundaryAnchor);
    ASSERT_EQ(stdin_r.code, 0);
    EXPECT_EQ(inline_r.out, stdin_r.out);
    const CliResult implicit_r = run_cli({"verify"}, kBoundaryAnchor);
    ASSERT_EQ(implicit_r.code, 0);
    EXPECT_EQ(inline_r.out, implicit_r.out);

    const std::string path = "cli_test_channel.json";
    {
        std::ofstream f(path);
        f << kBoundaryAnchor;
    }
    const CliResult file_r = run_cli({"verify", path});
    std::remove(path.c_str());
    ASSERT_EQ(file_r.code, 0);
    EXPECT_EQ(inline_r.out, file_r.out);
}

TEST(CliVerify, NormalizeChoiHalvesTheSpectrum) {
    const CliResult plain = run_cli({"verify", kBoundaryAnchor});
    const CliResult normed = run_cli({"verify", kBoundaryAnchor, "--normalize-choi"});
    const Json a = Json::parse(plain.out), b = Json::parse(normed.out);
    for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(b.at("choi_eigs")[i].get<double>(),
                    0.5 * a.at("choi_eigs")[i].get<double>(), 1e-15);
    EXPECT_NEAR(b.at("eig_margin").get<double>(), 0.5 * a.at("eig_margin").get<double>(), 1e-15);
    // The closed-form fields are untouched.
    EXPECT_EQ(a.at("margin"), b.at("margin"));
    EXPECT_EQ(a.at("q"), b.at("q"));
}

TEST(CliErrors, MalformedInputsExitOne) {
    EXPECT_EQ(run_cli({"verify", "{not json"}).code, 1);
    EXPECT_EQ(run_cli({"verify", R"({"lambda":[0.5,0.5]})"}).code, 1);   // arity
    EXPECT_EQ(run_cli({"verify", R"({"t":[0,0,0.1]})"}).code, 1);        // missing M
    EXPECT_EQ(run_cli({"verify", "no_such_file.json"}).code, 1);
    EXPECT_EQ(run_cli({"verify", kBoundaryAnchor, "--tol", "-1"}).code, 1);
    EXPECT_EQ(run_cli({"verify", kBoundaryAnchor, "--tol", "0"}).code, 1);
    EXPECT_EQ(run_cli({"verify", kBoundaryAnchor, "--no-such-flag"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);  // a subcommand is required
    EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
    const CliResult r = run_cli({"verify", "{not json"});
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(r.out.empty());
}

TEST(CliErrors, HelpExitsZero) {
    const CliResult top = run_cli({"--help"});
    EXPECT_EQ(top.code, 0);
    EXPECT_NE(top.out.find("verify"), std::string::npos);
    EXPECT_NE(top.out.find("decompose"), std::string::npos);
    EXPECT_EQ(run_cli({"verify", "--help"}).code, 0);
}

TEST(CliFormat, PrettyPrintsMultiline) {
    const CliResult plain = run_cli({"verify", kBoundaryAnchor});
    const CliResult pretty = run_cli({"verify", kBoundaryAnchor, "--pretty"});
    EXPECT_EQ(std::count(plain.out.begin(), plain.out.end(), '\n'), 1);
    EXPECT_GT(std::count(pretty.out.begin(), pretty.out.end(), '\n'), 5);
    EXPECT_EQ(Json::parse(plain.out), Json::parse(pretty.out));
}

TEST(CliClassify, PhaseFlipShape) {
    const CliResult r = run_cli({"classify", R"({"lambda":[0.5,0.5,1]})"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("kraus_rank").get<int>(), 2);
    EXPECT_FALSE(j.at("indivisible").get<bool>());
    EXPECT_EQ(j.at("pure_output").at("kind"), "Two");
    EXPECT_EQ(j.at("pure_output").at("points").size(), 2u);
    EXPECT_NEAR(j.at("pure_output").at("max_output_norm").get<double>(), 1.0, 1e-9);
    EXPECT_TRUE(j.at("extremal").is_null());  // interior phase flips are not extremal
}

TEST(CliClassify, ExtremalChannelShape) {
    const double u = 0.4, v = 0.9;
    std::ostringstream text;
    text.precision(17);
    text << R"({"M":[[)" << std::cos(u) << R"(,0,0],[0,)" << std::cos(v) << R"(,0],[0,0,)"
         << std::cos(u) * std::cos(v) << R"(]],"t":[0,0,)" << std::sin(u) * std::sin(v) << "]}";
    const CliResult r = run_cli({"classify", text.str()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    ASSERT_FALSE(j.at("extremal").is_null());
    EXPECT_NEAR(j.at("extremal").at("u").get<double>(), u, 1e-9);
    EXPECT_NEAR(j.at("extremal").at("v").get<double>(), v, 1e-9);
    EXPECT_EQ(j.at("extremal").at("class"), "TwoPONonDeg");
    EXPECT_EQ(j.at("kraus_rank").get<int>(), 2);
}

TEST(CliClassify, FaceCenterIsIndivisible) {
    const CliResult r = run_cli(
        {"classify", R"({"lambda":[0.3333333333333333,0.3333333333333333,-0.3333333333333333]})"});
    ASSERT_EQ(r.code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("kraus_rank").get<int>(), 3);
    EXPECT_TRUE(j.at("indivisible").get<bool>());
}

TEST(CliCanonical, EchoesChannelAndFactors) {
    const CliResult r = run_cli(
        {"canonical", R"({"M":[[0.5,0,0],[0,-0.3,0],[0,0,0.2]],"t":[0.1,0,0]})"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_DOUBLE_EQ(j.at("lambda")[0].get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(j.at("lambda")[1].get<double>(), 0.3);
    EXPECT_DOUBLE_EQ(j.at("lambda")[2].get<double>(), -0.2);
    ASSERT_TRUE(j.contains("M"));
    ASSERT_TRUE(j.contains("R1"));
    ASSERT_TRUE(j.contains("R2"));
    ASSERT_TRUE(j.contains("t_canonical"));
    // Rebuild the channel from the reported pieces.
    const Mat3 r1 = mat3_from_json(j.at("R1")), r2 = mat3_from_json(j.at("R2"));
    const Vec3 lam = vec3_from_json(j.at("lambda")), tc = vec3_from_json(j.at("t_canonical"));
    const AffineChannel orig = channel_from_json(Json::parse(
        R"({"M":[[0.5,0,0],[0,-0.3,0],[0,0,0.2]],"t":[0.1,0,0]})"));
    const AffineChannel rebuilt{r1 * Mat3(lam.asDiagonal()) * r2, r1 * tc};
    EXPECT_LT(channel_distance(rebuilt, orig), 1e-12);
}

TEST(CliKraus, OperatorsReconstructAndComplete) {
    const CliResult r = run_cli({"kraus", R"({"lambda":[0.5,0.5,1]})"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    CMat2 sum = CMat2::Zero();
    for (const Json& op : j) {
        CMat2 a;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                a(i, k) = std::complex<double>(op[i][k][0].get<double>(),
                                               op[i][k][1].get<double>());
        sum += a.adjoint() * a;
    }
    EXPECT_LT((sum - CMat2::Identity()).norm(), 1e-10);

    EXPECT_EQ(run_cli({"kraus", R"({"lambda":[-1,-1,-1]})"}).code, 2);
}

TEST(CliDecompose, UnitalPlanRoundTrip) {
    const CliResult r =
        run_cli({"decompose", R"({"lambda":[0.5,0.3,0.2]})", "--eps", "0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_DOUBLE_EQ(j.at("epsilon").get<double>(), 0.05);
    EXPECT_LT(j.at("recomposition_error").get<double>(), 1e-9);
    int flips = 0, faces = 0;
    for (const Json& f : j.at("factors")) {
        if (f.at("kind") == "PhaseFlip") ++flips;
        if (f.at("kind") == "FaceChannel") ++faces;
    }
    EXPECT_EQ(flips, 4);
    EXPECT_EQ(faces, 1);

    // Feed the emitted plan back through the JSON layer and recompose.
    const DecompositionPlan plan = plan_from_json(j);
    ASSERT_TRUE(plan.target.has_value());
    const auto [chan, dist] = recompose(plan);
    EXPECT_LT(dist, 1e-9);
    EXPECT_LT(channel_distance(chan, AffineChannel{Vec3(0.5, 0.3, 0.2).asDiagonal(),
                                                   Vec3::Zero()}),
              1e-9);
}

TEST(CliDecompose, ExtremalPlanViaCli) {
    const double u = 0.4, v = 0.9;
    std::ostringstream text;
    text.precision(17);
    text << R"({"M":[[)" << std::cos(u) << R"(,0,0],[0,)" << std::cos(v) << R"(,0],[0,0,)"
         << std::cos(u) * std::cos(v) << R"(]],"t":[0,0,)" << std::sin(u) * std::sin(v) << "]}";
    const CliResult r = run_cli({"decompose", text.str(), "--eps", "0.3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_LT(j.at("recomposition_error").get<double>(), 1e-9);
    bool has_arc = false;
    for (const Json& f : j.at("factors")) has_arc |= f.at("kind") == "ExtremalAngles";
    EXPECT_TRUE(has_arc);
}

TEST(CliDecompose, RejectsOutOfScopeChannels) {
    // CP, nonunital, not extremal: no decomposition branch applies.
    const CliResult r = run_cli(
        {"decompose", R"({"M":[[0.5,0,0],[0,0.5,0],[0,0,0.5]],"t":[0,0,0.2]})"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());

    EXPECT_EQ(run_cli({"decompose", R"({"lambda":[-1,-1,-1]})"}).code, 2);
    EXPECT_EQ(run_cli({"decompose", R"({"lambda":[0.5,0.3,0.2]})", "--eps", "0.6"}).code, 1);
}

TEST(CliSample, SeededAndKinded) {
    const CliResult a = run_cli({"sample", "--seed", "7"});
    const CliResult b = run_cli({"sample", "--seed", "7"});
    const CliResult c = run_cli({"sample", "--seed", "8"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);

    const CliResult unital = run_cli({"sample", "--seed", "3", "--kind", "unital"});
    ASSERT_EQ(unital.code, 0);
    const AffineChannel uch = channel_from_json(Json::parse(unital.out));
    EXPECT_LT(uch.t.norm(), 1e-12);
    EXPECT_NE(is_cp(uch), CpVerdict::NotCP);

    const CliResult ex = run_cli({"sample", "--seed", "4", "--kind", "extremal"});
    ASSERT_EQ(ex.code, 0);
    EXPECT_TRUE(extremal_test(channel_from_json(Json::parse(ex.out))).has_value());

    const CliResult gen = run_cli({"sample", "--seed", "5", "--kind", "general"});
    ASSERT_EQ(gen.code, 0);
    EXPECT_NE(is_cp(channel_from_json(Json::parse(gen.out))), CpVerdict::NotCP);

    EXPECT_EQ(run_cli({"sample", "--kind", "bogus"}).code, 1);
}

TEST(CliPancake, GridTableShape) {
    const CliResult r = run_cli({"pancake"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_DOUBLE_EQ(j.at("step").get<double>(), 0.01);
    EXPECT_LE(j.at("max_margin").get<double>(), 1e-12);
    const Json& rows = j.at("rows");
    ASSERT_GT(rows.size(), 3000u);
    ASSERT_LT(rows.size(), 4000u);
    const Json& row = rows[0];
    EXPECT_TRUE(row.contains("a") && row.contains("c") && row.contains("t3") &&
                row.contains("margin_plus") && row.contains("margin_minus"));
    // Spot check one row against the library value.
    const PancakeMargin pm = pancake_margin(row.at("a").get<double>(), row.at("c").get<double>());
    EXPECT_NEAR(row.at("t3").get<double>(), pm.t3, 1e-15);
}

TEST(CliPlanJson, FactorsSurviveTheRoundTrip) {
    DecompositionPlan plan;
    plan.epsilon = 0.1;
    plan.factors = {Unitary{Vec3(0, 1, 0), 0.3},
                    Permutation{{2, 0, 1}},
                    SignFlip{{0, 2}},
                    PhaseFlip{0.25},
                    Constant{Vec3(0, 0, 1)},
                    Extremal{0.3, 0.7},
                    ExtremalAngles{0.1, 0.8},
                    FaceChannel{0.4, 0.2, 2}};
    plan.target = make_generator(PhaseFlip{0.25});
    plan.recomposition_error = 0.5;
    const DecompositionPlan back = plan_from_json(plan_to_json(plan));
    ASSERT_EQ(back.factors.size(), plan.factors.size());
    for (size_t i = 0; i < plan.factors.size(); ++i) {
        EXPECT_EQ(back.factors[i].index(), plan.factors[i].index());
        EXPECT_LT(channel_distance(make_generator(back.factors[i]),
                                   make_generator(plan.factors[i])),
                  1e-15);
    }
    EXPECT_DOUBLE_EQ(back.epsilon, 0.1);
    EXPECT_DOUBLE_EQ(back.recomposition_error, 0.5);
    ASSERT_TRUE(back.target.has_value());
    EXPECT_LT(channel_distance(*back.target, *plan.target), 1e-15);
}

}  // namespace
