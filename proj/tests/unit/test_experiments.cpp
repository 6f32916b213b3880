#include "magspec/experiments.hpp"

#include <doctest.h>

#include <regex>
#include <sstream>

using namespace magspec;
using namespace magspec::experiments;

namespace {

json small_asymptotic() {
    return json{{"scenario", "asymptotic"},
                {"domain", {{"type", "disk"}, {"center", {0, 0}}, {"radius", 1.0}}},
                {"field", {{"type", "linear"}, {"B0", {0, 0, 1}}}},
                {"q", {4.0, 8.0}},
                {"grid", {{"h", 0.08}}},
                {"degennes", {{"T", 12.0}, {"h", 0.01}}}};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_SUITE("experiments") {
    TEST_CASE("config parsing and validation") {
        const auto c = ExperimentConfig::from_json(small_asymptotic());
        CHECK(c.q.size() == 2);
        CHECK(c.grid_spacing() == doctest::Approx(0.08));
        auto j = small_asymptotic();
        j["bogus"] = 1;
        CHECK_THROWS_AS(ExperimentConfig::from_json(j), InvalidArgument);
        j = small_asymptotic();
        j["q"] = json::array();
        try {
            ExperimentConfig::from_json(j).validate();
            FAIL("empty grid accepted");
        } catch (const InvalidArgument& e) {
            CHECK(std::string(e.what()).find("empty parameter grid") != std::string::npos);
        }
        j = small_asymptotic();
        j["grid"]["h"] = 0.6;
        CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), DiscretizationError);
        j = small_asymptotic();
        j.erase("grid");
        CHECK(ExperimentConfig::from_json(j).grid_spacing() == doctest::Approx(0.4 / std::sqrt(8.0)));
        const auto back = ExperimentConfig::from_json(c.to_json());
        CHECK(config_hash(back.to_json()) == config_hash(c.to_json()));
    }

    TEST_CASE("regime guards reject before compute") {
        json h = {{"scenario", "helical"}, {"domain", {{"type", "disk"}, {"radius", 1.0}}}, {"qtau", {50.0}},
                  {"tau", {3.0}},          {"x", 0.0},                                      {"c0", 1.0}};
        CHECK_THROWS_AS(ExperimentConfig::from_json(h).validate(), RegimeError);
        h["tau"] = {1.0};
        CHECK_NOTHROW(ExperimentConfig::from_json(h).validate());
        json l = {{"scenario", "large_domain"}, {"domain", {{"type", "disk"}, {"radius", 1.0}}},
                  {"field", {{"type", "linear"}}},
                  {"q", {10.0}},                {"R", {1.0, 6.0}},
                  {"y", 0.0},                   {"c0", 4.0}};
        CHECK_THROWS_AS(ExperimentConfig::from_json(l).validate(), RegimeError);
    }

    TEST_CASE("exponents echoed exactly") {
        json h = {{"scenario", "helical"}, {"domain", {{"type", "disk"}, {"radius", 1.0}}},
                  {"qtau", {50.0}},        {"x", 0.0},
                  {"rotations", 2}};
        RunOptions o;
        o.dry_run = true;
        o.write_files = false;
        const auto r = run(ExperimentConfig::from_json(h), o);
        const auto& e = r.manifest.exponents;
        CHECK(e.at("epsilon_exact") == "1/8");
        CHECK(e.at("delta_exact") == "1/3");
        CHECK(e.at("lower_rate") == "1/4");
        CHECK(e.at("upper_rate") == "1/3");
        CHECK(r.rows.empty());
    }

    TEST_CASE("hashing") {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        RunOptions o;
        o.dry_run = true;
        o.write_files = false;
        auto hash = [&](const json& j) { return run(ExperimentConfig::from_json(j), o).manifest.config_hash; };
        auto a = small_asymptotic();
        auto b = a;
        b["threads"] = 4;
        b["output"] = {{"csv", "x.csv"}};
        CHECK(hash(a) == hash(b));
        CHECK(hash(a).size() == 64);
        b["q"] = {4.0, 9.0};
        CHECK(hash(a) != hash(b));
    }

    TEST_CASE("small deterministic run") {
        RunOptions o;
        o.write_files = false;
        const auto cfg = ExperimentConfig::from_json(small_asymptotic());
        const auto r1 = run(cfg, o);
        o.threads = 2;
        const auto r2 = run(cfg, o);
        CHECK(r1.csv == r2.csv);
        CHECK(r1.manifest.config_hash == r2.manifest.config_hash);
        REQUIRE(r1.rows.size() == 2);
        CHECK(r1.csv.rfind(csv_header, 0) == 0);
        CHECK(count_lines(r1.csv) == 3);
        CHECK(r1.manifest.all_converged());
        for (const auto& jb : r1.manifest.jobs) CHECK(jb.csv_row >= 0);
        for (const auto& row : r1.rows) {
            CHECK(row.lambda <= row.certificate + row.residual);
            CHECK(row.lower_rhs <= row.upper_rhs);
        }
        CHECK(format_row(r1.rows[0]).find(',') != std::string::npos);
        // the plot reference line is the manifest's theta0
        const std::regex ref(R"re(class="reference"[^>]*data-value="([^"]*)")re");
        std::smatch m;
        REQUIRE(std::regex_search(r1.svg, m, ref));
        CHECK(std::stod(m[1]) == doctest::Approx(r1.manifest.theta0).epsilon(1e-10));
        CHECK(to_string(scenario_from_string("large_domain")) == "large_domain");
    }
}
