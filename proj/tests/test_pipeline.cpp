#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "afc/pipeline.hpp"
#include "fixtures.hpp"

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir =
        std::filesystem::temp_directory_path() / "afc_pipeline_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

afc::Scenario preset_scenario(const std::string& name, double t_end) {
    const auto* preset = afc::presets::find_scenario(name);
    REQUIRE(preset != nullptr);
    afc::Scenario s = afc::parse_scenario_text(preset->text, preset->name);
    s.t_end = t_end;
    return s;
}

}  // namespace

TEST_CASE("a shortened fig3 run is certified end to end") {
    const auto s = preset_scenario("fig3", 2.0);
    const auto rep = afc::run_pipeline(s);
    CHECK(rep.n == 8);
    CHECK(rep.m == 2);
    CHECK(rep.stress_pass);
    CHECK(rep.gain_ok);
    CHECK(rep.certified());
    CHECK(rep.exit_code() == 0);
    CHECK_FALSE(rep.user_weights);
    CHECK(rep.h_min == Catch::Approx(1.109408).epsilon(1e-3));
    CHECK(rep.h == Catch::Approx(2.0 * rep.h_min).margin(1e-15));
    CHECK(rep.traj.sample_count() == 21);
    CHECK(rep.metrics_rows.size() == 21);
    CHECK(static_cast<int>(rep.max_speed.size()) == 8);
    CHECK(rep.final_scale < rep.initial_scale);

    const std::string summary = afc::summary_text(rep);
    CHECK(summary.find("stress certificate: PASS") != std::string::npos);
    CHECK(summary.find("gain: certified") != std::string::npos);
    CHECK(summary.find("weights: computed") != std::string::npos);
    CHECK(summary.find("scenario: fig3") != std::string::npos);
}

TEST_CASE("the automatic gain doubles the certified bound per preset") {
    const struct {
        const char* name;
        double h_min;
    } cases[] = {{"fig4", 1.119890}, {"fig5", 0.450412}, {"fig6", 0.327768}};
    for (const auto& c : cases) {
        const auto rep = afc::run_pipeline(preset_scenario(c.name, 0.1));
        CHECK(rep.h_min == Catch::Approx(c.h_min).epsilon(1e-3));
        CHECK(rep.h == Catch::Approx(2.0 * c.h_min).epsilon(1e-3));
        CHECK(rep.certified());
    }
}

TEST_CASE("perturbed starts are seeded, reproducible, and scale to exact") {
    const auto shape = afc::presets::paper8_shape();
    const Eigen::VectorXd a = afc::perturbed_start(shape, 1, 0.2);
    const Eigen::VectorXd b = afc::perturbed_start(shape, 1, 0.2);
    const Eigen::VectorXd c = afc::perturbed_start(shape, 2, 0.2);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - c).cwiseAbs().maxCoeff() > 1e-3);
    const Eigen::VectorXd exact = afc::perturbed_start(shape, 9, 0.0);
    CHECK((exact - shape.stacked()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weights written to csv reproduce the run when re-imported") {
    const auto dir = fresh_dir("roundtrip");
    auto s = preset_scenario("fig6", 1.0);
    const auto rep1 = afc::run_pipeline(s);
    afc::write_outputs(rep1, dir.string());

    afc::Scenario s2 = s;
    s2.weights_file = "weights.csv";
    s2.base_dir = dir.string();
    const auto rep2 = afc::run_pipeline(s2);
    CHECK(rep2.user_weights);
    CHECK(rep2.stress_pass);
    CHECK(rep2.certified());

    REQUIRE(rep1.traj.sample_count() == rep2.traj.sample_count());
    double dev = 0.0;
    for (int k = 0; k < rep1.traj.sample_count(); ++k) {
        dev = std::max(dev, (rep1.traj.states[k] - rep2.traj.states[k])
                                .cwiseAbs()
                                .maxCoeff());
    }
    CHECK(dev == 0.0);
    const std::string summary = afc::summary_text(rep2);
    CHECK(summary.find("weights: user-supplied") != std::string::npos);
}

TEST_CASE("a perturbed user weight fails the certificate but still runs") {
    auto s = preset_scenario("fig6", 1.0);
    const auto good = afc::run_pipeline(s);
    for (int k = 0; k < good.graph.edge_count(); ++k) {
        const auto& e = good.graph.edges()[k];
        double w = good.stress.w[k];
        if (k == 0) w += 0.1;
        s.user_weights.emplace_back(e.head, e.tail, w);
    }
    const auto rep = afc::run_pipeline(s);
    CHECK_FALSE(rep.stress_pass);
    CHECK_FALSE(rep.gain_ok);
    CHECK(rep.exit_code() == 2);
    CHECK(rep.h_min == 0.0);
    const std::string summary = afc::summary_text(rep);
    CHECK(summary.find("stress certificate: FAIL") != std::string::npos);
    CHECK(summary.find("gain: uncertified gain") != std::string::npos);
}

TEST_CASE("forcing the gain below the bound is reported, not hidden") {
    auto s = preset_scenario("fig3", 1.0);
    const auto auto_rep = afc::run_pipeline(s);
    s.h_auto = false;
    s.h = 0.5 * auto_rep.h_min;
    const auto rep = afc::run_pipeline(s);
    CHECK(rep.stress_pass);
    CHECK_FALSE(rep.gain_ok);
    CHECK(rep.exit_code() == 2);
    CHECK(afc::summary_text(rep).find("uncertified gain") != std::string::npos);
}

TEST_CASE("pipeline rejects malformed user weight tables") {
    auto s = preset_scenario("fig6", 1.0);
    s.user_weights = {{2, 3, 1.0}};
    try {
        afc::run_pipeline(s);
        FAIL("expected ValidationError");
    } catch (const afc::ValidationError& e) {
        CHECK(e.field == "weights");
    }

    s.user_weights = {{1, 2, 1.0}, {2, 1, 2.0}};
    CHECK_THROWS_AS(afc::run_pipeline(s), afc::ValidationError);

    s.user_weights = {{1, 2, 1.0}};
    CHECK_THROWS_AS(afc::run_pipeline(s), afc::MissingWeight);
}

TEST_CASE("output artifacts are complete and byte deterministic") {
    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    auto s = preset_scenario("fig6", 0.5);
    s.decimate = 50;
    afc::write_outputs(afc::run_pipeline(s), dir1.string());
    afc::write_outputs(afc::run_pipeline(s), dir2.string());

    for (const char* name :
         {"trajectory.csv", "metrics.csv", "weights.csv", "motion.csv"}) {
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }
    CHECK(slurp(dir1 / "summary.txt").find("scenario: fig6") !=
          std::string::npos);

    CHECK(slurp(dir1 / "trajectory.csv").rfind("t,agent,x,y\n", 0) == 0);
    CHECK(slurp(dir1 / "metrics.csv")
              .rfind("t,perp_residual,vel_error,centroid_x,centroid_y,scale\n",
                     0) == 0);
    CHECK(slurp(dir1 / "weights.csv").rfind("i,j,w\n", 0) == 0);
    CHECK(slurp(dir1 / "motion.csv").rfind("i,j,mu\n", 0) == 0);
}

TEST_CASE("each schedule span writes its own motion table") {
    const auto dir = fresh_dir("spans");
    const std::string text =
        "[shape]\npreset = paper8\n"
        "[motion]\nkappa_r = 1\n"
        "[motion@0.25]\nkappa_s = -1\n"
        "[sim]\nt_end = 0.5\n";
    const auto rep = afc::run_pipeline(afc::parse_scenario_text(text, "spans"));
    afc::write_outputs(rep, dir.string());
    CHECK(std::filesystem::exists(dir / "motion.csv"));
    CHECK(std::filesystem::exists(dir / "motion_2.csv"));
    CHECK(rep.motions.size() == 2);
}

TEST_CASE("the fig6 report shows the axis agents standing still") {
    const auto rep = afc::run_pipeline(preset_scenario("fig6", 2.0));
    CHECK(rep.max_speed[3] < 1e-9);
    CHECK(rep.max_speed[7] < 1e-9);
    CHECK(rep.max_speed[0] > 0.1);
    CHECK(rep.max_speed[1] > 0.1);
}

TEST_CASE("a raw generator matrix reproduces the named coordinate") {
    auto named = preset_scenario("fig3", 1.0);

    const std::string raw_text =
        "[shape]\npreset = paper8\n"
        "[motion]\nG = -1 1 -1 -1\n"
        "[gains]\nh = auto\nkappa = 1\n"
        "[sim]\ndt = 0.001\nt_end = 1\nperturb_seed = 1\nperturb_scale = "
        "0.2\n[output]\ndecimate = 100\n";
    const auto raw = afc::parse_scenario_text(raw_text, "raw");

    const auto rep_named = afc::run_pipeline(named);
    const auto rep_raw = afc::run_pipeline(raw);
    REQUIRE(rep_named.traj.sample_count() == rep_raw.traj.sample_count());
    double dev = 0.0;
    for (int k = 0; k < rep_named.traj.sample_count(); ++k) {
        dev = std::max(dev, (rep_named.traj.states[k] - rep_raw.traj.states[k])
                                .cwiseAbs()
                                .maxCoeff());
    }
    CHECK(dev < 1e-12);
}

TEST_CASE("the distributed engine flag routes through the pipeline") {
    auto s = preset_scenario("fig5", 1.0);
    const auto central = afc::run_pipeline(s);
    s.distributed = true;
    const auto dist = afc::run_pipeline(s);
    CHECK(dist.distributed_engine);
    double dev = 0.0;
    for (int k = 0; k < central.traj.sample_count(); ++k) {
        dev = std::max(dev, (central.traj.states[k] - dist.traj.states[k])
                                .cwiseAbs()
                                .maxCoeff());
    }
    CHECK(dev == 0.0);
    CHECK(afc::summary_text(dist).find("engine: distributed") !=
          std::string::npos);
}

TEST_CASE("weight csv reading reports malformed rows by line") {
    const auto dir = fresh_dir("badcsv");
    {
        std::ofstream out(dir / "bad.csv");
        out << "i,j,w\n1,2,0.5\nnot a row\n";
    }
    try {
        afc::read_weights_csv((dir / "bad.csv").string());
        FAIL("expected ParseError");
    } catch (const afc::ParseError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(afc::read_weights_csv((dir / "missing.csv").string()),
                    afc::Error);

    {
        std::ofstream out(dir / "good.csv");
        out << "i,j,w\n1,2,0.5\n3,4,-0.25\n";
    }
    const auto rows = afc::read_weights_csv((dir / "good.csv").string());
    REQUIRE(rows.size() == 2);
    CHECK(std::get<0>(rows[1]) == 3);
    CHECK(std::get<2>(rows[1]) == -0.25);
}
