#pragma once

#include "gerve/bootstrap.hpp"
#include "gerve/mixture.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gerve {

struct PointDataset {
  PointMatrix points;
  std::vector<std::string> column_names;
  std::string source;
  std::vector<std::string> filters;  // human-readable, in application order
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;   // unparseable cells
  std::size_t rows_filtered = 0;  // failed a predicate
  std::size_t n_original = 0;     // rows before padding; later rows are padding

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  [[nodiscard]] Eigen::Index dim() const { return points.cols(); }
};

/// Closed interval predicate on a named column.
struct RangeFilter {
  std::string column;
  double lo = -INFINITY;
  double hi = INFINITY;

  [[nodiscard]] bool accepts(double v) const { return v >= lo && v <= hi; }
  [[nodiscard]] std::string describe() const;
  /// Parses "name:lo:hi"; either bound may be empty for an open side.
  static RangeFilter parse(const std::string& text);
};

/// RFC 4180 record splitter. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);
std::string csv_escape(const std::string& field);

/// Reads `columns` (by header name) from a CSV file. Rows with an unparseable or
/// non-finite value in a selected or filtered column are skipped and counted.
PointDataset ingest_csv(const std::string& path, const std::vector<std::string>& columns,
                        const std::vector<RangeFilter>& filters = {});
PointDataset ingest_csv(std::istream& in, const std::vector<std::string>& columns,
                        const std::vector<RangeFilter>& filters = {},
                        const std::string& source = "<stream>");

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_points_csv(std::ostream& out, const PointMatrix& points,
                      const std::vector<std::string>& column_names);

/// x -> scale * (x - offset) with one shared scale, so aspect ratios are kept.
struct NormalisationTransform {
  Vector offset;
  double scale = 1.0;

  [[nodiscard]] PointMatrix apply(const PointMatrix& x) const;
  [[nodiscard]] PointMatrix inverse(const PointMatrix& y) const;
  [[nodiscard]] Vector apply(const Vector& x) const;
  [[nodiscard]] Vector inverse(const Vector& y) const;
};

/// Maps `window` (default: the data bounding box) to a centred box of volume
/// `target_volume` with the window's aspect ratio.
std::pair<PointDataset, NormalisationTransform> normalise(
    const PointDataset& ds, const std::optional<Domain>& window = std::nullopt,
    double target_volume = 1.0);

/// Number of background points: round(ratio * N / vol(inner) * (vol(outer) - vol(inner))).
std::size_t background_count(std::size_t N, const Domain& inner, const Domain& outer,
                             double density_ratio);

/// Appends uniform points from outer minus inner (rejection sampling from outer).
PointDataset pad_background(const PointDataset& ds, const Domain& inner, const Domain& outer,
                            double density_ratio, std::uint64_t seed);

/// Normalised coordinates -> metres east/north of (lon0, lat0), for data ingested as
/// (longitude, latitude) degrees. Local equirectangular approximation on a sphere.
AxisAffine metric_map(const NormalisationTransform& t, double lon0, double lat0);

}  // namespace gerve
