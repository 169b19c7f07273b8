#include "mgg/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace mgg;

namespace {
nlohmann::json base_config() {
    return {{"schema_version", 1},
            {"scenario", "expand"},
            {"solution",
             {{"family", "quadratic"},
              {"tau", 0.5},
              {"A", {1.2, 0.1, 0.9}},
              {"beta", {0.3, -0.2}},
              {"gamma", 0.7}}},
            {"ladder",
             {{"r_min", 5.0}, {"r_max", 500.0}, {"n_rings", 12}, {"n_theta", 64}}}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("canonical dump sorts keys and is stable") {
    nlohmann::json a{{"zeta", 1.0}, {"alpha", {{"b", 2.5}, {"a", true}}}};
    const std::string s = canonical_dump(a);
    CHECK(s.find("alpha") < s.find("zeta"));
    CHECK(s == canonical_dump(a));
    // 17 significant digits survive a round trip
    nlohmann::json f{{"x", 0.1 + 0.2}};
    const std::string fs = canonical_dump(f);
    CHECK(fs.find("0.30000000000000004") != std::string::npos);
}

TEST_CASE("config parsing") {
    auto cfg = RunConfig::from_json(base_config());
    CHECK(cfg.scenario == "expand");
    CHECK(cfg.ladder.n_rings == 12);
    cfg.validate();

    auto bad = base_config();
    bad["typo_key"] = 1;
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigInvalid);

    auto bad2 = base_config();
    bad2["schema_version"] = 2;
    CHECK_THROWS_AS(RunConfig::from_json(bad2), ConfigInvalid);

    auto bad3 = base_config();
    bad3["ladder"]["n_theta"] = 7;
    CHECK_THROWS_AS(RunConfig::from_json(bad3).validate(), ConfigInvalid);

    auto bad4 = base_config();
    bad4["scenario"] = "noscenario";
    CHECK_THROWS_AS(RunConfig::from_json(bad4).validate(), ConfigInvalid);
}

TEST_CASE("expand scenario on a quadratic reports null coefficients") {
    const auto cfg = RunConfig::from_json(base_config());
    const auto rep = run(cfg);
    CHECK(rep.all_pass());
    bool saw_d = false;
    for (const auto& row : rep.coefficients) {
        if (row.name == "expand.d") {
            saw_d = true;
            CHECK(std::abs(row.value) < 1e-8);
        }
        CHECK(row.pass);
    }
    CHECK(saw_d);
}

TEST_CASE("emitted report.json matches canonical in-memory form") {
    auto cfg = RunConfig::from_json(base_config());
    const auto rep = run(cfg);
    const auto dir = std::filesystem::temp_directory_path() / "mgg_report_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    emit(rep, dir.string(), "json");
    CHECK(slurp(dir / "report.json") == canonical_dump(rep.to_json()));

    emit(rep, dir.string(), "csv");
    CHECK(std::filesystem::exists(dir / "coefficients.csv"));
    // first data cell of the coefficient table equals the JSON value
    const std::string csv = slurp(dir / "coefficients.csv");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", rep.coefficients.front().value);
    CHECK(csv.find(buf) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("generate scenario ships ring samples") {
    auto j = base_config();
    j["scenario"] = "generate";
    j["solution"] = {{"family", "ma_radial_exact"}, {"C0", 0.0}, {"c1", 1.0}};
    const auto rep = run(RunConfig::from_json(j));
    CHECK(rep.all_pass());
    CHECK(rep.ring_files.count("value"));
    CHECK(rep.ring_files.count("gradient"));
    CHECK(rep.ring_files.count("hessian"));
}
