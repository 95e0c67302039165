#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "attractor/convexgeom.hpp"
#include "attractor/oracle.hpp"
#include "attractor/verify.hpp"

namespace attractor::io {

/// Matrix <-> nested JSON arrays (row-major).
linalg::Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const linalg::Matrix& m);

// All writers go through a temp file in the target directory plus a rename,
// so readers never observe a partially written artifact.

/// CSV schema: header n_1,..,n_m,x_1,..,x_m,h; one row per record, grid
/// order, 17 significant digits (doubles survive a round trip).
void write_atlas_csv(const convexgeom::BoundaryAtlas& atlas, const std::string& path);

/// JSON schema mirrors the atlas: dim, matrix, epsilon, truncation_order,
/// tail_bound, records[{n, x, h}].
void write_atlas_json(const convexgeom::BoundaryAtlas& atlas, const std::string& path);

/// A single closed path (m = 2 only), viewBox padded 10% beyond the largest
/// coordinate magnitude. The y coordinate is negated so the figure renders
/// in the usual mathematical orientation.
void write_atlas_svg(const convexgeom::BoundaryAtlas& atlas, const std::string& path);

convexgeom::BoundaryAtlas read_atlas_json(const std::string& path);

/// Records and dimension only (the CSV carries nothing else). Used by
/// rendering, which needs no matrix.
std::pair<int, std::vector<convexgeom::AtlasRecord>> read_atlas_records_csv(
    const std::string& path);

/// The CSV carries records only; matrix, epsilon and the truncation data
/// must be supplied by the caller.
convexgeom::BoundaryAtlas read_atlas_csv(const std::string& path, const linalg::Matrix& m,
                                         double epsilon, int truncation_order,
                                         double tail_bound);

/// Reads either format by extension; CSV falls back to the supplied
/// matrix/epsilon/truncation data.
convexgeom::BoundaryAtlas read_atlas(const std::string& path, const linalg::Matrix* m,
                                     double epsilon, double tolerance);

void write_cloud_csv(const oracle::PointCloud& cloud, const std::string& path);

void write_cloud_report_json(const oracle::CloudReport& report, long samples,
                             std::uint64_t seed, double tol, const std::string& path);

void write_verify_report_json(const verify::VerifyReport& report, const std::string& path);

void write_probe_report_json(int steps, double epsilon, double spectral_radius,
                             double probe_value, const std::string& path);

} // namespace attractor::io
