#include "attractor/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "attractor/errors.hpp"

namespace attractor::io {

using convexgeom::AtlasRecord;
using convexgeom::BoundaryAtlas;
using linalg::Matrix;
using linalg::UnitVector;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw io_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw io_error("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read from " + path + " failed");
    return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v))
        throw parse_error(context + ": bad number '" + s + "'");
    return v;
}

} // namespace

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("matrix: expected a nested array of rows");
    const int dim = static_cast<int>(j.size());
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(dim) * dim);
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw parse_error("matrix: rows must all have length " + std::to_string(dim));
        for (const auto& v : row) {
            if (!v.is_number()) throw parse_error("matrix: entries must be numbers");
            entries.push_back(v.get<double>());
        }
    }
    try {
        return Matrix(dim, std::move(entries));
    } catch (const input_error& e) {
        throw parse_error(std::string("matrix: ") + e.what());
    }
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

void write_atlas_csv(const BoundaryAtlas& atlas, const std::string& path) {
    if (atlas.records.empty()) throw input_error("write_atlas_csv: empty atlas");
    const int dim = atlas.matrix.dim();
    std::ostringstream out;
    for (int i = 1; i <= dim; ++i) out << "n_" << i << ",";
    for (int i = 1; i <= dim; ++i) out << "x_" << i << ",";
    out << "h\n";
    for (const AtlasRecord& r : atlas.records) {
        for (int i = 0; i < dim; ++i) out << fmt17(r.n[i]) << ",";
        for (int i = 0; i < dim; ++i) out << fmt17(r.x[static_cast<std::size_t>(i)]) << ",";
        out << fmt17(r.h) << "\n";
    }
    atomic_write(path, out.str());
}

void write_atlas_json(const BoundaryAtlas& atlas, const std::string& path) {
    if (atlas.records.empty()) throw input_error("write_atlas_json: empty atlas");
    json j;
    j["dim"] = atlas.matrix.dim();
    j["matrix"] = matrix_to_json(atlas.matrix);
    j["epsilon"] = atlas.epsilon;
    j["truncation_order"] = atlas.truncation_order;
    j["tail_bound"] = atlas.tail_bound;
    json records = json::array();
    for (const AtlasRecord& r : atlas.records) {
        json rec;
        rec["n"] = r.n.components();
        rec["x"] = r.x;
        rec["h"] = r.h;
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    atomic_write(path, j.dump(2) + "\n");
}

void write_atlas_svg(const BoundaryAtlas& atlas, const std::string& path) {
    if (atlas.matrix.dim() != 2) throw input_error("write_atlas_svg: svg output requires m = 2");
    if (atlas.records.size() < 3) throw input_error("write_atlas_svg: need at least 3 records");

    double radius = 0.0;
    for (const AtlasRecord& r : atlas.records)
        radius = std::max({radius, std::abs(r.x[0]), std::abs(r.x[1])});
    if (radius == 0.0) radius = 1.0;
    const double v = 1.1 * radius;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
        << fmt17(-v) << " " << fmt17(-v) << " " << fmt17(2 * v) << " " << fmt17(2 * v) << "\">\n";
    out << "  <path d=\"";
    bool first = true;
    for (const AtlasRecord& r : atlas.records) {
        out << (first ? "M " : " L ") << fmt17(r.x[0]) << " " << fmt17(-r.x[1]);
        first = false;
    }
    out << " Z\" fill=\"none\" stroke=\"black\" stroke-width=\"" << fmt17(0.005 * v) << "\"/>\n";
    out << "</svg>\n";
    atomic_write(path, out.str());
}

BoundaryAtlas read_atlas_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    try {
        if (!j.is_object()) throw parse_error(path + ": expected a JSON object");
        const Matrix m = matrix_from_json(j.at("matrix"));
        const double epsilon = j.at("epsilon").get<double>();
        BoundaryAtlas atlas{{}, m, epsilon, j.at("truncation_order").get<int>(),
                            j.at("tail_bound").get<double>()};
        for (const auto& rec : j.at("records")) {
            std::vector<double> n = rec.at("n").get<std::vector<double>>();
            std::vector<double> x = rec.at("x").get<std::vector<double>>();
            const double h = rec.at("h").get<double>();
            if (static_cast<int>(n.size()) != m.dim() || static_cast<int>(x.size()) != m.dim())
                throw parse_error(path + ": record dimension mismatch");
            if (!linalg::all_finite(n) || !linalg::all_finite(x) || !std::isfinite(h))
                throw parse_error(path + ": non-finite record");
            atlas.records.push_back(AtlasRecord{UnitVector::trusted(std::move(n)), std::move(x), h});
        }
        if (atlas.records.empty()) throw parse_error(path + ": no records");
        return atlas;
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    } catch (const input_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

std::pair<int, std::vector<AtlasRecord>> read_atlas_records_csv(const std::string& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw parse_error(path + ": empty file");

    std::string header = line;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto cols = split_csv_line(header);
    if (cols.size() < 3 || cols.size() % 2 == 0)
        throw parse_error(path + ": unexpected header '" + header + "'");
    const int dim = static_cast<int>((cols.size() - 1) / 2);
    {
        std::ostringstream expected;
        for (int i = 1; i <= dim; ++i) expected << "n_" << i << ",";
        for (int i = 1; i <= dim; ++i) expected << "x_" << i << ",";
        expected << "h";
        if (header != expected.str())
            throw parse_error(path + ": unexpected header '" + header + "'");
    }

    std::vector<AtlasRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != 2 * dim + 1)
            throw parse_error(path + ": line " + std::to_string(lineno) + " has " +
                              std::to_string(cells.size()) + " fields, expected " +
                              std::to_string(2 * dim + 1));
        std::vector<double> n(static_cast<std::size_t>(dim));
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) n[static_cast<std::size_t>(i)] = parse_double(cells[static_cast<std::size_t>(i)], path);
        for (int i = 0; i < dim; ++i)
            x[static_cast<std::size_t>(i)] = parse_double(cells[static_cast<std::size_t>(dim + i)], path);
        const double h = parse_double(cells[static_cast<std::size_t>(2 * dim)], path);
        records.push_back(AtlasRecord{UnitVector::trusted(std::move(n)), std::move(x), h});
    }
    if (records.empty()) throw parse_error(path + ": no records");
    return {dim, std::move(records)};
}

BoundaryAtlas read_atlas_csv(const std::string& path, const Matrix& m, double epsilon,
                             int truncation_order, double tail_bound) {
    auto [dim, records] = read_atlas_records_csv(path);
    if (dim != m.dim())
        throw parse_error(path + ": atlas dimension " + std::to_string(dim) +
                          " does not match the supplied matrix (" + std::to_string(m.dim()) + ")");
    return BoundaryAtlas{std::move(records), m, epsilon, truncation_order, tail_bound};
}

BoundaryAtlas read_atlas(const std::string& path, const Matrix* m, double epsilon,
                         double tolerance) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".json") return read_atlas_json(path);
    if (ext == ".csv") {
        if (m == nullptr)
            throw parse_error(path + ": a csv atlas needs the matrix and epsilon supplied");
        // The csv carries no truncation metadata; assume the writer met the
        // requested tolerance with the standard half-tolerance tail split.
        return read_atlas_csv(path, *m, epsilon, 0, tolerance / 2.0);
    }
    throw parse_error(path + ": unknown atlas extension '" + ext + "' (expected .csv or .json)");
}

void write_cloud_csv(const oracle::PointCloud& cloud, const std::string& path) {
    std::ostringstream out;
    for (int i = 1; i <= cloud.dim; ++i) out << "x_" << i << (i == cloud.dim ? "\n" : ",");
    for (std::size_t p = 0; p < cloud.size(); ++p) {
        const double* pt = cloud.point(p);
        for (int i = 0; i < cloud.dim; ++i) out << fmt17(pt[i]) << (i + 1 == cloud.dim ? "\n" : ",");
    }
    atomic_write(path, out.str());
}

void write_cloud_report_json(const oracle::CloudReport& report, long samples, std::uint64_t seed,
                             double tol, const std::string& path) {
    json j;
    j["containment_fraction"] = report.containment_fraction;
    j["max_violation"] = report.max_violation;
    j["inner_hausdorff"] = report.inner_hausdorff;
    j["samples"] = samples;
    j["seed"] = seed;
    j["tolerance"] = tol;
    atomic_write(path, j.dump(2) + "\n");
}

void write_probe_report_json(int steps, double epsilon, double spectral_radius,
                             double probe_value, const std::string& path) {
    json j;
    j["steps"] = steps;
    j["epsilon"] = epsilon;
    j["spectral_radius"] = spectral_radius;
    j["probe_value"] = probe_value;
    atomic_write(path, j.dump(2) + "\n");
}

void write_verify_report_json(const verify::VerifyReport& report, const std::string& path) {
    json j;
    j["all_pass"] = report.all_pass();
    json checks = json::array();
    for (const verify::CheckResult& c : report.checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["measured"] = c.measured;
        e["threshold"] = c.threshold;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["notes"]["constant_support"] = report.constant_support;
    if (report.ellipse_residual)
        j["notes"]["ellipse_residual"] = *report.ellipse_residual;
    else
        j["notes"]["ellipse_residual"] = nullptr;
    atomic_write(path, j.dump(2) + "\n");
}

} // namespace attractor::io
