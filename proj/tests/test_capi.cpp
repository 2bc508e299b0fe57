#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "etairl.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kChainSpec = R"({"name":"chain","n":4,"slip":0.1,"gamma":0.9})";

struct StringOut {
    char* value = nullptr;
    ~StringOut() { etai_string_free(value); }
};

}  // namespace

TEST_CASE("c api: version and error slot") {
    CHECK(std::strlen(etai_version()) > 0);
    CHECK(etai_mdp_from_json("not json at all", nullptr) == ETAI_ERR_INVALID_ARGUMENT);
    etai_mdp* out = nullptr;
    CHECK(etai_mdp_from_json("not json at all", &out) == ETAI_ERR_PARSE);
    CHECK(std::strlen(etai_last_error()) > 0);
}

TEST_CASE("c api: environment creation, validation and round trip") {
    etai_mdp* mdp = nullptr;
    REQUIRE(etai_env_create(kChainSpec, &mdp) == ETAI_OK);
    StringOut report;
    CHECK(etai_mdp_validate(mdp, &report.value) == ETAI_OK);
    CHECK(json::parse(report.value).empty());

    StringOut doc;
    REQUIRE(etai_mdp_to_json(mdp, &doc.value) == ETAI_OK);
    etai_mdp* clone = nullptr;
    REQUIRE(etai_mdp_from_json(doc.value, &clone) == ETAI_OK);
    StringOut doc2;
    REQUIRE(etai_mdp_to_json(clone, &doc2.value) == ETAI_OK);
    CHECK(json::parse(doc.value) == json::parse(doc2.value));
    etai_mdp_free(clone);
    etai_mdp_free(mdp);
}

TEST_CASE("c api: invalid models are reported, not rejected") {
    // validation is report-based: a broken row comes back as a message
    json doc = json::parse(R"({"n_states":1,"n_actions":1,"gamma":0.9,
        "transition":[[[0.5]]],"cost":[[1.0]],"p0":[1.0]})");
    etai_mdp* mdp = nullptr;
    REQUIRE(etai_mdp_from_json(doc.dump().c_str(), &mdp) == ETAI_OK);
    StringOut report;
    CHECK(etai_mdp_validate(mdp, &report.value) == ETAI_OK);
    CHECK(!json::parse(report.value).empty());
    etai_mdp_free(mdp);
}

TEST_CASE("c api: solve, occupancy export and rollouts") {
    etai_mdp* mdp = nullptr;
    REQUIRE(etai_env_create(kChainSpec, &mdp) == ETAI_OK);
    etai_policy* policy = nullptr;
    REQUIRE(etai_solve_soft(mdp, 0.01, 1e-12, 0, &policy) == ETAI_OK);

    StringOut policy_json;
    REQUIRE(etai_policy_to_json(policy, &policy_json.value) == ETAI_OK);
    etai_policy* parsed = nullptr;
    REQUIRE(etai_policy_from_json(policy_json.value, &parsed) == ETAI_OK);
    etai_policy_free(parsed);

    StringOut csv;
    REQUIRE(etai_occupancy_csv(mdp, policy, "rho", nullptr, &csv.value) == ETAI_OK);
    CHECK(std::string(csv.value).rfind("s0,s,a,value\n", 0) == 0);
    StringOut mu_csv;
    REQUIRE(etai_occupancy_csv(mdp, policy, "mu", R"({"kind":"geometric","param":0.5})",
                               &mu_csv.value) == ETAI_OK);
    CHECK(etai_occupancy_csv(mdp, policy, "sigma", nullptr, &csv.value) ==
          ETAI_ERR_INVALID_ARGUMENT);

    etai_buffer* buffer = nullptr;
    REQUIRE(etai_rollout_buffer(mdp, policy, 5, 12, 7, &buffer) == ETAI_OK);
    CHECK(etai_buffer_size(buffer) == 5);
    const std::string path = (fs::temp_directory_path() / "etairl_capi_buffer.jsonl").string();
    REQUIRE(etai_buffer_save_jsonl(buffer, path.c_str()) == ETAI_OK);
    etai_buffer* loaded = nullptr;
    REQUIRE(etai_buffer_load_jsonl(path.c_str(), &loaded) == ETAI_OK);
    CHECK(etai_buffer_size(loaded) == 5);
    etai_buffer_free(loaded);
    etai_buffer_free(buffer);
    fs::remove(path);

    etai_policy_free(policy);
    etai_mdp_free(mdp);
}

TEST_CASE("c api: check suites map failures onto status codes") {
    StringOut report;
    CHECK(etai_check_run("bijection", &report.value) == ETAI_OK);
    const json parsed = json::parse(report.value);
    REQUIRE(parsed.is_array());
    CHECK(parsed[0]["suite"] == "bijection");
    CHECK(parsed[0]["passed"] == true);

    StringOut bad;
    CHECK(etai_check_run("nonsense", &bad.value) == ETAI_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: train runner with overrides") {
    const std::string dir = (fs::temp_directory_path() / "etairl_capi_train").string();
    fs::remove_all(dir);
    const json config = {
        {"env", {{"name", "chain"}, {"n", 4}, {"slip", 0.1}, {"gamma", 0.9}}},
        {"algorithm", "megan"},
        {"seeds", {5, 6}},
        {"irl",
         {{"n_outer_iters", 3}, {"rollouts_per_iter", 2}, {"horizon", 10}, {"batch_size", 32},
          {"disc_epochs", 2}}},
        {"expert", {{"n_trajectories", 8}, {"horizon", 10}}},
        {"out_dir", "ignored"}};
    StringOut summary;
    REQUIRE(etai_train_run(config.dump().c_str(), dir.c_str(), "5", &summary.value) == ETAI_OK);
    const json out = json::parse(summary.value);
    CHECK(out["runs"].size() == 1);  // the seeds override narrowed the list
    CHECK(out["runs"][0]["seed"] == 5);
    CHECK(fs::exists(dir + "/metrics.csv"));
    fs::remove_all(dir);

    StringOut err;
    CHECK(etai_train_run("{\"env\":{\"name\":\"chain\"}, \"seeds\": []}", nullptr, nullptr,
                         &err.value) == ETAI_ERR_PARSE);
    CHECK(etai_train_run("{]", nullptr, nullptr, &err.value) == ETAI_ERR_PARSE);
}
