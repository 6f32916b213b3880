#include "magspec/io.hpp"
#include "magspec/svg.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <regex>

using namespace magspec;
namespace fs = std::filesystem;
using magspec::io::json;

TEST_SUITE("io") {
    TEST_CASE("descriptor round trips") {
        const auto Q = Rotation::from_axis_angle(Vec3(1, 2, 3), 0.7);
        const auto Qj = io::rotation_to_json(Q);
        CHECK((io::rotation_from_json(Qj).matrix() - Q.matrix()).norm() < 1e-15);
        CHECK((io::rotation_from_json(json{{"axis", {1, 2, 3}}, {"angle", 0.7}}).matrix() - Q.matrix()).norm() < 1e-14);
        CHECK_THROWS(io::rotation_from_json(json::array({1, 2, 3})));

        const auto p = Polynomial3::random(9, 3, 1.0);
        const auto p2 = io::polynomial_from_json(io::polynomial_to_json(p));
        CHECK(p2.coefficients() == p.coefficients());

        for (const auto& d : {Domain::ball(Vec3(0.1, 0, 0), 1.5), Domain::disk(Vec3::Zero(), 2.0),
                              Domain::ellipsoid(Vec3::Zero(), Vec3(1, 0.8, 0.6))}) {
            const auto back = io::domain_from_json(io::domain_to_json(d));
            CHECK(back.kind() == d.kind());
            const Vec3 x(0.2, -0.3, 0.1);
            CHECK(back.signed_distance(x) == doctest::Approx(d.signed_distance(x)).epsilon(1e-14));
        }
        CHECK_THROWS_AS(io::domain_from_json(json{{"type", "square"}}), InvalidArgument);

        const json fj = {{"type", "helical"}, {"tau", 3.0}, {"rotation", io::rotation_to_json(Q)}};
        const auto F = io::field_from_json(fj);
        const auto F2 = io::field_from_json(io::field_to_json(*F));
        const Vec3 x(0.3, 0.1, -0.4);
        CHECK((F->potential(x) - F2->potential(x)).norm() < 1e-14);
        const auto G = gauge_shifted(dilated(linear_potential(Vec3(0, 0, 1)), 2.0), p);
        const auto G2 = io::field_from_json(io::field_to_json(*G));
        CHECK((G->potential(x) - G2->potential(x)).norm() < 1e-13);
    }

    TEST_CASE("files") {
        const auto dir = fs::temp_directory_path() / "magspec_io_test";
        fs::remove_all(dir);
        CVector v(5);
        for (int i = 0; i < 5; ++i) v[i] = cplx(i * 0.5, -1.0 / (i + 1));
        const auto bin = (dir / "sub" / "v.bin").string();
        io::write_vector_binary(bin, v);
        CHECK(fs::file_size(bin) == 5 * 16);
        CHECK((io::read_vector_binary(bin) - v).norm() == 0.0);
        const auto txt = (dir / "a.json").string();
        io::write_text_atomic(txt, R"({"k": [1, 2]})");
        CHECK(io::read_json_file(txt).at("k").size() == 2);
        CHECK_THROWS(io::read_json_file((dir / "missing.json").string()));
        fs::remove_all(dir);
    }
}

TEST_SUITE("svg") {
    TEST_CASE("plot content and determinism") {
        const std::vector<PlotPoint> pts{{20, 0.55}, {40, 0.56}, {80, 0.563}};
        PlotSpec spec;
        spec.reference_y = 0.5901061987;
        const auto a = emit_svg(pts, spec);
        CHECK(a == emit_svg(pts, spec));
        const std::regex poly(R"re(<polyline class="data"[^>]*points="([^"]*)")re");
        std::smatch m;
        REQUIRE(std::regex_search(a, m, poly));
        const std::string points = m[1];
        CHECK(std::count(points.begin(), points.end(), ',') == 3);
        CHECK(std::count(a.begin(), a.end(), '\n') > 5);
        const std::regex ref(R"re(class="reference"[^>]*data-value="([^"]*)")re");
        REQUIRE(std::regex_search(a, m, ref));
        CHECK(std::stod(m[1]) == doctest::Approx(0.5901061987).epsilon(1e-12));
        CHECK(a.find("<text") != std::string::npos);
        CHECK_THROWS_AS(emit_svg({{1, 1}}, spec), InvalidArgument);
        CHECK_THROWS_AS(emit_svg({{1, 1}, {2, std::nan("")}}, spec), InvalidArgument);
    }
}
