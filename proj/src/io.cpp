#include "gerve/io.hpp"

#include "gerve/random.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

namespace gerve {

namespace {

constexpr double kEarthRadius = 6371008.8;  // mean radius, metres
constexpr double kDegToRad = 0.017453292519943295769236907684886;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidInput("ingest_csv: missing column '" + name + "'");
}

}  // namespace

std::string RangeFilter::describe() const {
  return column + " in [" + format_double(lo) + ", " + format_double(hi) + "]";
}

RangeFilter RangeFilter::parse(const std::string& text) {
  const auto c2 = text.rfind(':');
  const auto c1 = c2 == std::string::npos || c2 == 0 ? std::string::npos : text.rfind(':', c2 - 1);
  if (c1 == std::string::npos || c1 == 0) {
    throw InvalidInput("filter must look like column:lo:hi, got '" + text + "'");
  }
  RangeFilter f;
  f.column = text.substr(0, c1);
  const std::string lo = text.substr(c1 + 1, c2 - c1 - 1);
  const std::string hi = text.substr(c2 + 1);
  if (!lo.empty() && !parse_double(lo, f.lo)) throw InvalidInput("bad filter bound: " + lo);
  if (!hi.empty() && !parse_double(hi, f.hi)) throw InvalidInput("bad filter bound: " + hi);
  if (f.lo > f.hi) throw InvalidInput("filter lower bound exceeds upper bound: " + text);
  return f;
}

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  bool any = false;
  char ch = 0;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          cur.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get(ch);
      break;
    } else if (ch == '\n') {
      break;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw InvalidInput("CSV: unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(cur));
  return true;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

PointDataset ingest_csv(std::istream& in, const std::vector<std::string>& columns,
                        const std::vector<RangeFilter>& filters, const std::string& source) {
  if (columns.empty()) throw InvalidInput("ingest_csv: no columns requested");
  std::vector<std::string> header;
  if (!read_csv_record(in, header)) throw InvalidInput("ingest_csv: missing header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  for (auto& h : header) h = trim(h);
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(column_index(header, c));
  std::vector<std::size_t> fidx;
  for (const auto& f : filters) fidx.push_back(column_index(header, f.column));

  PointDataset ds;
  ds.column_names = columns;
  ds.source = source;
  for (const auto& f : filters) ds.filters.push_back(f.describe());
  std::vector<double> flat;
  std::vector<std::string> rec;
  while (read_csv_record(in, rec)) {
    if (rec.size() == 1 && trim(rec[0]).empty()) continue;  // blank line
    ++ds.rows_read;
    bool ok = rec.size() == header.size();
    std::vector<double> row(columns.size());
    for (std::size_t j = 0; ok && j < idx.size(); ++j) ok = parse_double(rec[idx[j]], row[j]);
    bool pass = true;
    for (std::size_t j = 0; ok && j < filters.size(); ++j) {
      double v = 0.0;
      ok = parse_double(rec[fidx[j]], v);
      pass = pass && ok && filters[j].accepts(v);
    }
    if (!ok) {
      ++ds.rows_skipped;
      continue;
    }
    if (!pass) {
      ++ds.rows_filtered;
      continue;
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  const auto n = static_cast<Eigen::Index>(flat.size() / columns.size());
  if (n == 0) throw InvalidInput("ingest_csv: no rows survive parsing and filtering");
  ds.points = Eigen::Map<PointMatrix>(flat.data(), n, static_cast<Eigen::Index>(columns.size()));
  ds.n_original = static_cast<std::size_t>(n);
  return ds;
}

PointDataset ingest_csv(const std::string& path, const std::vector<std::string>& columns,
                        const std::vector<RangeFilter>& filters) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  return ingest_csv(in, columns, filters, path);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_points_csv(std::ostream& out, const PointMatrix& points,
                      const std::vector<std::string>& column_names) {
  if (static_cast<Eigen::Index>(column_names.size()) != points.cols()) {
    throw InvalidInput("write_points_csv: column name count mismatch");
  }
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    out << (j ? "," : "") << csv_escape(column_names[j]);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      out << (j ? "," : "") << format_double(points(i, j));
    }
    out << '\n';
  }
}

PointMatrix NormalisationTransform::apply(const PointMatrix& x) const {
  if (x.cols() != offset.size()) throw InvalidInput("normalisation: dimension mismatch");
  return scale * (x.rowwise() - offset.transpose());
}

PointMatrix NormalisationTransform::inverse(const PointMatrix& y) const {
  if (y.cols() != offset.size()) throw InvalidInput("normalisation: dimension mismatch");
  PointMatrix x = y / scale;
  x.rowwise() += offset.transpose();
  return x;
}

Vector NormalisationTransform::apply(const Vector& x) const {
  if (x.size() != offset.size()) throw InvalidInput("normalisation: dimension mismatch");
  return scale * (x - offset);
}

Vector NormalisationTransform::inverse(const Vector& y) const {
  if (y.size() != offset.size()) throw InvalidInput("normalisation: dimension mismatch");
  return y / scale + offset;
}

std::pair<PointDataset, NormalisationTransform> normalise(const PointDataset& ds,
                                                          const std::optional<Domain>& window,
                                                          double target_volume) {
  if (!(target_volume > 0.0)) throw InvalidInput("normalise: target volume must be positive");
  if (ds.points.rows() == 0) throw InvalidInput("normalise: empty dataset");
  Domain w;
  if (window) {
    w = *window;
  } else {
    w.lower = ds.points.colwise().minCoeff().transpose();
    w.upper = ds.points.colwise().maxCoeff().transpose();
  }
  if (w.lower.size() != ds.dim()) throw InvalidInput("normalise: window dimension mismatch");
  const Vector extent = w.upper - w.lower;
  if ((extent.array() <= 0.0).any() || !extent.allFinite()) {
    throw InvalidInput("normalise: window has zero extent");
  }
  NormalisationTransform t;
  t.offset = 0.5 * (w.lower + w.upper);
  t.scale = std::pow(target_volume / extent.prod(), 1.0 / static_cast<double>(extent.size()));
  PointDataset out = ds;
  out.points = t.apply(ds.points);
  return {std::move(out), std::move(t)};
}

std::size_t background_count(std::size_t N, const Domain& inner, const Domain& outer,
                             double density_ratio) {
  if (!(density_ratio >= 0.0)) throw InvalidInput("pad_background: density ratio must be >= 0");
  inner.validate();
  outer.validate();
  if (inner.lower.size() != outer.lower.size() ||
      (inner.lower.array() < outer.lower.array()).any() ||
      (inner.upper.array() > outer.upper.array()).any()) {
    throw InvalidInput("pad_background: inner domain must lie inside outer");
  }
  const double vin = inner.volume();
  const double vout = outer.volume();
  return static_cast<std::size_t>(
      std::llround(density_ratio * static_cast<double>(N) / vin * (vout - vin)));
}

PointDataset pad_background(const PointDataset& ds, const Domain& inner, const Domain& outer,
                            double density_ratio, std::uint64_t seed) {
  const std::size_t M = background_count(ds.size(), inner, outer, density_ratio);
  if (inner.lower.size() != ds.dim()) throw InvalidInput("pad_background: dimension mismatch");
  PointDataset out = ds;
  if (M == 0) return out;
  const Eigen::Index d = ds.dim();
  const auto N = ds.points.rows();
  out.points.conservativeResize(N + static_cast<Eigen::Index>(M), d);
  Rng rng(derive_seed(seed, stream::kPadding));
  std::vector<std::uniform_real_distribution<double>> axis;
  for (Eigen::Index j = 0; j < d; ++j) axis.emplace_back(outer.lower[j], outer.upper[j]);
  Vector p(d);
  for (std::size_t m = 0; m < M;) {
    for (Eigen::Index j = 0; j < d; ++j) p[j] = axis[static_cast<std::size_t>(j)](rng);
    if (inner.contains(p)) continue;
    out.points.row(N + static_cast<Eigen::Index>(m)) = p.transpose();
    ++m;
  }
  return out;
}

AxisAffine metric_map(const NormalisationTransform& t, double lon0, double lat0) {
  if (t.offset.size() != 2) throw InvalidInput("metric_map: requires 2-D coordinates");
  if (!(std::abs(lat0) < 90.0)) throw InvalidInput("metric_map: latitude out of range");
  const double ky = kEarthRadius * kDegToRad;
  const double kx = ky * std::cos(lat0 * kDegToRad);
  // metres = k * (y / s + offset - ref) = (k / s) * (y - s * (ref - offset))
  AxisAffine a;
  a.scale = Vector(Eigen::Vector2d(kx / t.scale, ky / t.scale));
  a.offset = Vector(Eigen::Vector2d(t.scale * (lon0 - t.offset[0]), t.scale * (lat0 - t.offset[1])));
  return a;
}

}  // namespace gerve
