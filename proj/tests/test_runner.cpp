#include <doctest.h>

#include <filesystem>

#include "etairl/runner.hpp"
#include "oracles.hpp"

using namespace etairl;
namespace fs = std::filesystem;

namespace {

json tiny_train_config(const std::string& out_dir) {
    return json{
        {"env", {{"name", "chain"}, {"n", 6}, {"slip", 0.1}, {"gamma", 0.95}}},
        {"algorithm", "megan"},
        {"eta", {{"kind", "geometric"}, {"param", 0.5}}},
        {"seeds", {1, 2}},
        {"irl",
         {{"n_outer_iters", 5}, {"rollouts_per_iter", 3}, {"horizon", 14}, {"batch_size", 48},
          {"disc_epochs", 3}}},
        {"expert", {{"n_trajectories", 12}, {"horizon", 14}}},
        {"out_dir", out_dir}};
}

std::string fresh_dir(const std::string& tag) {
    const std::string dir = (fs::temp_directory_path() / ("etairl_" + tag)).string();
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing: defaults, env construction and error paths") {
    const RunConfig cfg = parse_run_config(tiny_train_config("x"));
    CHECK(cfg.env.n_states == 6);
    CHECK(cfg.algorithm == "megan");
    CHECK(cfg.seeds.size() == 2);
    CHECK(cfg.irl.eta.kind() == HorizonKind::Geometric);

    CHECK_THROWS_AS(parse_run_config(json{{"algorithm", "megan"}}), ParseError);
    json bad = tiny_train_config("x");
    bad["algorithm"] = "bc";
    CHECK_THROWS_AS(parse_run_config(bad), ParseError);
    bad = tiny_train_config("x");
    bad["gamma_rl"] = 1.5;
    CHECK_THROWS_AS(parse_run_config(bad), ParseError);
    bad = tiny_train_config("x");
    bad["seeds"] = json::array();
    CHECK_THROWS_AS(parse_run_config(bad), ParseError);
    bad = tiny_train_config("x");
    bad["env"] = {{"name", "hover"}};
    CHECK_THROWS_AS(parse_run_config(bad), ParseError);
}

TEST_CASE("gail normalizes onto the shared code path") {
    json doc = tiny_train_config("x");
    doc["algorithm"] = "gail";
    doc.erase("eta");
    const RunConfig cfg = parse_run_config(doc);
    CHECK(cfg.algorithm == "megan");
    CHECK(cfg.gail_mode);
    CHECK(cfg.irl.eta.kind() == HorizonKind::Geometric);
    CHECK(cfg.irl.eta.param() == 0.0);
    CHECK(cfg.irl.gamma_irl == 1.0);
}

TEST_CASE("train writes deterministic artifacts") {
    const std::string dir1 = fresh_dir("train1"), dir2 = fresh_dir("train2");
    RunConfig cfg1 = parse_run_config(tiny_train_config(dir1));
    RunConfig cfg2 = parse_run_config(tiny_train_config(dir2));
    const auto runs1 = cmd_train(cfg1);
    const auto runs2 = cmd_train(cfg2);
    REQUIRE(runs1.size() == 2);
    CHECK(fs::exists(dir1 + "/metrics.csv"));
    CHECK(fs::exists(dir1 + "/summary.json"));
    CHECK(fs::exists(dir1 + "/policy_megan_geom0.5_seed1.json"));
    CHECK(fs::exists(dir1 + "/discriminator_megan_geom0.5_seed2.json"));

    // identical config + seeds give identical CSV bytes
    CHECK(read_text_file(dir1 + "/metrics.csv") == read_text_file(dir2 + "/metrics.csv"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("gail cell equals the explicit geometric-zero cell byte for byte") {
    const std::string dir1 = fresh_dir("gailA"), dir2 = fresh_dir("gailB");
    json gail_doc = tiny_train_config(dir1);
    gail_doc["algorithm"] = "gail";
    gail_doc.erase("eta");
    json megan_doc = tiny_train_config(dir2);
    megan_doc["eta"] = {{"kind", "geometric"}, {"param", 0.0}};
    megan_doc["gamma_irl"] = 1.0;
    cmd_train(parse_run_config(gail_doc));
    cmd_train(parse_run_config(megan_doc));
    CHECK(read_text_file(dir1 + "/metrics.csv") == read_text_file(dir2 + "/metrics.csv"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("eta sweep emits the grid CSV and plots") {
    const std::string dir = fresh_dir("sweep");
    json doc = tiny_train_config(dir);
    doc["seeds"] = {1};
    doc["eta_grid"] = json::array({json{{"kind", "geometric"}, {"param", 0.0}},
                                   json{{"kind", "geometric"}, {"param", 0.5}},
                                   json{{"kind", "geometric"}, {"param", 1.0}, {"truncation", 64}}});
    const json out = cmd_sweep_eta(parse_run_config(doc));
    CHECK(out["cells"].size() == 3);
    CHECK(fs::exists(dir + "/sweep.csv"));
    CHECK(fs::exists(dir + "/sweep_mmd.svg"));
    CHECK(fs::exists(dir + "/cell_0/metrics.csv"));
    const std::string svg = read_text_file(dir + "/sweep_mmd.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<!-- data") != std::string::npos);  // embedded data block
    fs::remove_all(dir);

    json empty = tiny_train_config(dir);
    CHECK_THROWS_AS(cmd_sweep_eta(parse_run_config(empty)), ParseError);
}

TEST_CASE("gamma sweep runs its cells plus the reference and records the comparison") {
    const std::string dir = fresh_dir("gamma");
    json doc = tiny_train_config(dir);
    doc["seeds"] = {1};
    doc["gamma_rl_grid"] = {0.9, 0.95};
    doc["eta"] = {{"kind", "geometric"}, {"param", 0.9}};
    const json out = cmd_gamma_sweep(parse_run_config(doc));
    CHECK(out["gail_cells"].size() == 2);
    CHECK(out.contains("megan_reference_median_mmd_mu"));
    CHECK(out.contains("no_gail_cell_beats_reference"));
    CHECK(fs::exists(dir + "/gamma_sweep.csv"));
    fs::remove_all(dir);

    json bad = tiny_train_config(dir);
    bad["gamma_rl_grid"] = {1.2};
    CHECK_THROWS_AS(parse_run_config(bad), ParseError);
}

TEST_CASE("idle command reports per-state total variation and warnings") {
    const std::string dir = fresh_dir("idle");
    json doc = json{{"env", {{"name", "chain"}, {"n", 2}, {"slip", 0.0}, {"gamma", 0.5}}},
                    {"expert", {{"n_trajectories", 30}, {"horizon", 40}}},
                    {"idle",
                     {{"epochs", 2500}, {"batch_size", 64},
                      {"eta", {{"kind", "geometric"}, {"param", 0.7}}}}},
                    {"out_dir", dir}};
    const json out = cmd_idle(parse_run_config(doc));
    CHECK(out["max_tv"].get<double>() < 0.15);
    CHECK(!out.contains("warning"));
    CHECK(fs::exists(dir + "/generator.json"));
    fs::remove_all(dir);

    doc["idle"]["eta"] = {{"kind", "uniform"}, {"param", 40}};
    doc["idle"]["epochs"] = 50;
    const json warned = cmd_idle(parse_run_config(doc));
    CHECK(warned.contains("warning"));
    fs::remove_all(dir);
}

TEST_CASE("eval scores a stored policy") {
    const std::string dir = fresh_dir("eval");
    // train a tiny run to produce a policy file
    RunConfig tc = parse_run_config(tiny_train_config(dir));
    tc.seeds = {1};
    cmd_train(tc);
    json doc = tiny_train_config(dir + "/eval_out");
    doc["policy_path"] = dir + "/policy_megan_geom0.5_seed1.json";
    doc["n_eval_rollouts"] = 50;
    const json out = cmd_eval(parse_run_config(doc));
    CHECK(out.contains("normalized_return_exact"));
    CHECK(out.contains("mmd_mu_exact"));
    CHECK(out["mmd_mu_exact"].get<double>() >= 0.0);
    fs::remove_all(dir);

    json missing = tiny_train_config(dir);
    CHECK_THROWS_AS(cmd_eval(parse_run_config(missing)), ParseError);
}

TEST_CASE("median helper") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(std::isnan(median({})));
}
