#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "attractor/boundary.hpp"
#include "attractor/errors.hpp"
#include "attractor/io.hpp"
#include "attractor/verify.hpp"
#include "test_helpers.hpp"

using namespace attractor;
using attractor::convexgeom::BoundaryAtlas;
using attractor::linalg::Matrix;
using testutil::shared_grid;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "attractor_io_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("verify_atlas passes on computed atlases") {
    const Matrix m(2, {0.5, 0.3, 0.0, 0.4});
    const auto atlas = boundary::build_atlas(m, 0.1, shared_grid(2, 360), 1e-10);
    const auto report = verify::verify_atlas(atlas);
    for (const auto& c : report.checks) {
        INFO(c.name, " measured=", c.measured, " threshold=", c.threshold);
        CHECK(c.pass);
    }
    CHECK(report.all_pass());
    CHECK_FALSE(report.constant_support);
    REQUIRE(report.ellipse_residual.has_value());
}

TEST_CASE("verify_atlas flags the scalar case as a ball") {
    const auto atlas = boundary::build_atlas(Matrix::scalar(2, 0.5), 0.1, shared_grid(2, 360), 1e-10);
    const auto report = verify::verify_atlas(atlas);
    CHECK(report.all_pass());
    CHECK(report.constant_support);
    REQUIRE(report.ellipse_residual.has_value());
    CHECK(*report.ellipse_residual <= 1e-10);
}

TEST_CASE("verify_atlas fails on corrupted data") {
    const Matrix m(2, {0.5, 0.3, 0.0, 0.4});
    auto atlas = boundary::build_atlas(m, 0.1, shared_grid(2, 360), 1e-10);
    atlas.records[17].h += 1e-3;
    const auto report = verify::verify_atlas(atlas);
    CHECK_FALSE(report.all_pass());
}

TEST_CASE("verify_atlas works in three dimensions") {
    const Matrix m(3, {0.6, 0.1, 0.0, 0.0, 0.5, 0.2, 0.0, 0.0, 0.4});
    const auto atlas = boundary::build_atlas(m, 0.1, shared_grid(3, 300), 1e-9);
    const auto report = verify::verify_atlas(atlas);
    for (const auto& c : report.checks) {
        INFO(c.name, " measured=", c.measured, " threshold=", c.threshold);
        CHECK(c.pass);
    }
    CHECK_FALSE(report.ellipse_residual.has_value());
}

TEST_CASE("atlas csv round trip is lossless") {
    const Matrix m(2, {0.9, 0.1, 0.0, 0.5});
    const auto atlas = boundary::build_atlas(m, 0.1, shared_grid(2, 90), 1e-10);
    const auto path = temp_dir() / "atlas.csv";
    io::write_atlas_csv(atlas, path.string());

    const BoundaryAtlas loaded =
        io::read_atlas_csv(path.string(), m, 0.1, atlas.truncation_order, atlas.tail_bound);
    REQUIRE(loaded.records.size() == atlas.records.size());
    for (std::size_t i = 0; i < atlas.records.size(); ++i) {
        CHECK(loaded.records[i].n.components() == atlas.records[i].n.components());
        CHECK(loaded.records[i].x == atlas.records[i].x);
        CHECK(loaded.records[i].h == atlas.records[i].h);
    }
}

TEST_CASE("atlas json round trip preserves everything") {
    const Matrix m(3, {0.6, 0.1, 0.0, 0.0, 0.5, 0.2, 0.0, 0.0, 0.4});
    const auto atlas = boundary::build_atlas(m, 0.05, shared_grid(3, 64), 1e-9);
    const auto path = temp_dir() / "atlas.json";
    io::write_atlas_json(atlas, path.string());

    const BoundaryAtlas loaded = io::read_atlas_json(path.string());
    CHECK(loaded.epsilon == atlas.epsilon);
    CHECK(loaded.truncation_order == atlas.truncation_order);
    CHECK(loaded.tail_bound == atlas.tail_bound);
    CHECK(loaded.matrix.entries() == atlas.matrix.entries());
    REQUIRE(loaded.records.size() == atlas.records.size());
    for (std::size_t i = 0; i < atlas.records.size(); ++i) {
        CHECK(loaded.records[i].n.components() == atlas.records[i].n.components());
        CHECK(loaded.records[i].x == atlas.records[i].x);
        CHECK(loaded.records[i].h == atlas.records[i].h);
    }
    // and the reloaded atlas re-verifies identically
    const auto a = verify::verify_atlas(atlas);
    const auto b = verify::verify_atlas(loaded);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].pass == b.checks[i].pass);
        CHECK(a.checks[i].measured == b.checks[i].measured);
        CHECK(a.checks[i].threshold == b.checks[i].threshold);
    }
}

TEST_CASE("svg output is a single closed path matching the records") {
    const Matrix m(2, {0.9, 0.0, 0.0, 0.5});
    const auto atlas = boundary::build_atlas(m, 0.1, shared_grid(2, 64), 1e-10);
    const auto path = temp_dir() / "atlas.svg";
    io::write_atlas_svg(atlas, path.string());

    const std::string svg = slurp(path);
    CHECK(svg.find("<svg ") != std::string::npos);
    CHECK(svg.find(" Z\"") != std::string::npos);
    // exactly one path element
    std::size_t count = 0;
    for (std::size_t pos = 0; (pos = svg.find("<path", pos)) != std::string::npos; ++pos) ++count;
    CHECK(count == 1);

    // parse the vertices back out of the path data
    const std::size_t d0 = svg.find("d=\"");
    REQUIRE(d0 != std::string::npos);
    const std::size_t d1 = svg.find('"', d0 + 3);
    std::istringstream data(svg.substr(d0 + 3, d1 - d0 - 3));
    std::string tok;
    std::vector<double> nums;
    while (data >> tok) {
        if (tok == "M" || tok == "L" || tok == "Z") continue;
        nums.push_back(std::stod(tok));
    }
    REQUIRE(nums.size() == 2 * atlas.records.size());
    for (std::size_t i = 0; i < atlas.records.size(); ++i) {
        CHECK(nums[2 * i] == atlas.records[i].x[0]);
        CHECK(nums[2 * i + 1] == -atlas.records[i].x[1]); // y axis is flipped
    }
    CHECK_THROWS_AS(io::write_atlas_svg(boundary::build_atlas(Matrix::scalar(3, 0.5), 0.1,
                                                              shared_grid(3, 32), 1e-9),
                                        path.string()),
                    input_error);
}

TEST_CASE("reader rejects malformed input") {
    const auto dir = temp_dir();
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::read_atlas_json((dir / "does_not_exist.json").string()), io_error);
    }
    SUBCASE("bad csv header") {
        const auto p = dir / "bad_header.csv";
        std::ofstream(p) << "a,b,c\n1,2,3\n";
        CHECK_THROWS_AS(io::read_atlas_records_csv(p.string()), parse_error);
    }
    SUBCASE("non-numeric csv cell") {
        const auto p = dir / "bad_cell.csv";
        std::ofstream(p) << "n_1,n_2,x_1,x_2,h\n1,0,oops,0,0.2\n";
        CHECK_THROWS_AS(io::read_atlas_records_csv(p.string()), parse_error);
    }
    SUBCASE("non-finite csv cell") {
        const auto p = dir / "nan_cell.csv";
        std::ofstream(p) << "n_1,n_2,x_1,x_2,h\n1,0,nan,0,0.2\n";
        CHECK_THROWS_AS(io::read_atlas_records_csv(p.string()), parse_error);
    }
    SUBCASE("truncated json") {
        const auto p = dir / "broken.json";
        std::ofstream(p) << "{\"matrix\": [[0.5, 0], [0, 0.5";
        CHECK_THROWS_AS(io::read_atlas_json(p.string()), parse_error);
    }
    SUBCASE("csv dimension mismatch against the supplied matrix") {
        const Matrix m2(2, {0.9, 0.0, 0.0, 0.5});
        const auto atlas = boundary::build_atlas(m2, 0.1, shared_grid(2, 16), 1e-9);
        const auto p = dir / "dim.csv";
        io::write_atlas_csv(atlas, p.string());
        CHECK_THROWS_AS(io::read_atlas_csv(p.string(), Matrix::scalar(3, 0.5), 0.1, 0, 0.0),
                        parse_error);
    }
    SUBCASE("unwritable target directory") {
        const Matrix m2(2, {0.9, 0.0, 0.0, 0.5});
        const auto atlas = boundary::build_atlas(m2, 0.1, shared_grid(2, 16), 1e-9);
        CHECK_THROWS_AS(io::write_atlas_csv(atlas, "/nonexistent_dir_xyz/atlas.csv"), io_error);
    }
}

TEST_CASE("cloud csv and report json") {
    const auto dir = temp_dir();
    oracle::PointCloud cloud;
    cloud.dim = 2;
    cloud.coords = {0.125, -0.25, 0.5, 1.0};
    const auto cloud_path = dir / "cloud.csv";
    io::write_cloud_csv(cloud, cloud_path.string());
    CHECK(slurp(cloud_path) == "x_1,x_2\n0.125,-0.25\n0.5,1\n");

    oracle::CloudReport rep{1.0, -0.001, 0.015};
    const auto rep_path = dir / "cloud.report.json";
    io::write_cloud_report_json(rep, 1000, 42, 1e-9, rep_path.string());
    const auto j = nlohmann::json::parse(slurp(rep_path));
    CHECK(j.at("containment_fraction").get<double>() == 1.0);
    CHECK(j.at("samples").get<long>() == 1000);
}
