#include "stereocal/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace stereocal {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Line {
  long number = 0;  // 1-based
  std::vector<std::string> fields;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  long number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string raw = text.substr(pos, end - pos);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    ++number;
    if (raw.empty()) {
      throw ParseError("empty line", number);
    }
    Line line;
    line.number = number;
    std::size_t field_start = 0;
    for (;;) {
      const std::size_t comma = raw.find(',', field_start);
      if (comma == std::string::npos) {
        line.fields.push_back(raw.substr(field_start));
        break;
      }
      line.fields.push_back(raw.substr(field_start, comma - field_start));
      field_start = comma + 1;
    }
    lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

double parse_double(const std::string& field, long line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("malformed number '" + field + "'", line);
  }
  return value;
}

long parse_long(const std::string& field, long line) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("malformed integer '" + field + "'", line);
  }
  return value;
}

std::uint64_t parse_u64(const std::string& field, long line) {
  std::uint64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("malformed unsigned integer '" + field + "'", line);
  }
  return value;
}

void expect_fields(const Line& line, std::size_t count) {
  if (line.fields.size() != count) {
    throw ParseError("record '" + line.fields[0] + "' expects " + std::to_string(count - 1) +
                         " values, got " + std::to_string(line.fields.size() - 1),
                     line.number);
  }
}

void require_finite(double v, const std::string& record) {
  if (!std::isfinite(v)) {
    throw SchemaError("non-finite value in '" + record + "' record");
  }
}

void check_format_line(const std::vector<Line>& lines, const std::string& name) {
  if (lines.empty()) {
    throw VersionError("empty file; expected 'format," + name + ",1' header");
  }
  const Line& first = lines.front();
  if (first.fields[0] != "format" || first.fields.size() != 3) {
    throw VersionError("missing format header; expected 'format," + name + ",1'");
  }
  if (first.fields[1] != name) {
    throw VersionError("format is '" + first.fields[1] + "', expected '" + name + "'");
  }
  if (first.fields[2] != "1") {
    throw VersionError("unsupported " + name + " version '" + first.fields[2] + "'");
  }
}

int parse_camera_id(const std::string& field, long line) {
  if (field == "1") return 1;
  if (field == "2") return 2;
  throw ParseError("camera must be 1 or 2, got '" + field + "'", line);
}

int parse_target_label(const std::string& field, long line) {
  if (field == "A") return 0;
  if (field == "B") return 1;
  throw ParseError("target must be A or B, got '" + field + "'", line);
}

void append_intrinsics(std::string& out, int id, const CameraIntrinsics& k) {
  out += "camera," + std::to_string(id) + ',' + fmt(k.omega) + ',' + fmt(k.s) + ',' +
         fmt(k.u0) + ',' + fmt(k.v0) + '\n';
}

void validate_for_write(const Dataset& d) {
  if (d.images.empty()) throw ConfigError("dataset has no images");
  if (!(d.baseline > 0.0) || !std::isfinite(d.baseline)) {
    throw ConfigError("dataset baseline must be positive and finite");
  }
  if (!(d.target_distance > 0.0) || !std::isfinite(d.target_distance)) {
    throw ConfigError("dataset target distance must be positive and finite");
  }
  for (const CameraIntrinsics* k : {&d.k1, &d.k2}) {
    if (!(k->omega > 0.0) || !std::isfinite(k->omega) || !std::isfinite(k->s) ||
        !std::isfinite(k->u0) || !std::isfinite(k->v0)) {
      throw ConfigError("dataset intrinsics must be finite with positive focal length");
    }
  }
  if (!d.truth_targets.empty() && d.truth_targets.size() != d.images.size()) {
    throw ConfigError("truth targets must cover all images or none");
  }
  for (const ImageRecord& rec : d.images) {
    for (const Pixel2* q : {&rec.a.q1, &rec.a.q2, &rec.b.q1, &rec.b.q2}) {
      if (!std::isfinite(q->u) || !std::isfinite(q->v)) {
        throw ConfigError("dataset contains non-finite pixel coordinates");
      }
    }
  }
}

}  // namespace

std::string serialize_dataset(const Dataset& dataset) {
  validate_for_write(dataset);

  std::string out;
  out += "format,stereocal-dataset,1\n";
  out += "baseline," + fmt(dataset.baseline) + '\n';
  out += "distance," + fmt(dataset.target_distance) + '\n';
  out += "n_images," + std::to_string(dataset.n_images()) + '\n';
  append_intrinsics(out, 1, dataset.k1);
  append_intrinsics(out, 2, dataset.k2);
  if (dataset.truth_angles) {
    const ExtrinsicAngles& a = *dataset.truth_angles;
    out += "truth_angles," + fmt(a.alpha) + ',' + fmt(a.beta) + ',' + fmt(a.gamma) + ',' +
           fmt(a.delta) + ',' + fmt(a.epsilon) + '\n';
  }
  for (std::size_t i = 0; i < dataset.truth_targets.size(); ++i) {
    const ImageTruth& t = dataset.truth_targets[i];
    for (int label = 0; label < 2; ++label) {
      const Point3& p = label == 0 ? t.a : t.b;
      out += "truth_point," + std::to_string(i) + ',' + (label == 0 ? "A" : "B") + ',' +
             fmt(p.x()) + ',' + fmt(p.y()) + ',' + fmt(p.z()) + '\n';
    }
  }
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    const ImageRecord& rec = dataset.images[i];
    for (int label = 0; label < 2; ++label) {
      const PixelPair& pair = label == 0 ? rec.a : rec.b;
      for (int camera = 1; camera <= 2; ++camera) {
        const Pixel2& q = camera == 1 ? pair.q1 : pair.q2;
        out += "point," + std::to_string(i) + ',' + (label == 0 ? "A" : "B") + ',' +
               std::to_string(camera) + ',' + fmt(q.u) + ',' + fmt(q.v) + '\n';
      }
    }
  }
  return out;
}

Dataset parse_dataset(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  check_format_line(lines, "stereocal-dataset");

  std::optional<double> baseline, distance;
  std::optional<long> n_images;
  std::optional<CameraIntrinsics> k1, k2;
  std::optional<ExtrinsicAngles> truth_angles;
  std::map<std::pair<long, int>, Point3> truth_points;
  std::map<std::tuple<long, int, int>, Pixel2> points;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& tag = line.fields[0];
    if (tag == "baseline") {
      expect_fields(line, 2);
      if (baseline) throw SchemaError("duplicate 'baseline' record");
      baseline = parse_double(line.fields[1], line.number);
      require_finite(*baseline, tag);
    } else if (tag == "distance") {
      expect_fields(line, 2);
      if (distance) throw SchemaError("duplicate 'distance' record");
      distance = parse_double(line.fields[1], line.number);
      require_finite(*distance, tag);
    } else if (tag == "n_images") {
      expect_fields(line, 2);
      if (n_images) throw SchemaError("duplicate 'n_images' record");
      n_images = parse_long(line.fields[1], line.number);
    } else if (tag == "camera") {
      expect_fields(line, 6);
      const int id = parse_camera_id(line.fields[1], line.number);
      CameraIntrinsics k;
      k.omega = parse_double(line.fields[2], line.number);
      k.s = parse_double(line.fields[3], line.number);
      k.u0 = parse_double(line.fields[4], line.number);
      k.v0 = parse_double(line.fields[5], line.number);
      for (double v : {k.omega, k.s, k.u0, k.v0}) require_finite(v, tag);
      auto& slot = id == 1 ? k1 : k2;
      if (slot) throw SchemaError("duplicate 'camera' record for camera " + line.fields[1]);
      slot = k;
    } else if (tag == "truth_angles") {
      expect_fields(line, 6);
      if (truth_angles) throw SchemaError("duplicate 'truth_angles' record");
      ExtrinsicAngles a;
      a.alpha = parse_double(line.fields[1], line.number);
      a.beta = parse_double(line.fields[2], line.number);
      a.gamma = parse_double(line.fields[3], line.number);
      a.delta = parse_double(line.fields[4], line.number);
      a.epsilon = parse_double(line.fields[5], line.number);
      for (double v : {a.alpha, a.beta, a.gamma, a.delta, a.epsilon}) require_finite(v, tag);
      truth_angles = a;
    } else if (tag == "truth_point") {
      expect_fields(line, 6);
      const long image = parse_long(line.fields[1], line.number);
      const int label = parse_target_label(line.fields[2], line.number);
      Point3 p(parse_double(line.fields[3], line.number),
               parse_double(line.fields[4], line.number),
               parse_double(line.fields[5], line.number));
      for (int axis = 0; axis < 3; ++axis) require_finite(p(axis), tag);
      if (!truth_points.emplace(std::make_pair(image, label), p).second) {
        throw SchemaError("duplicate truth_point for image " + std::to_string(image) +
                          " target " + line.fields[2]);
      }
    } else if (tag == "point") {
      expect_fields(line, 6);
      const long image = parse_long(line.fields[1], line.number);
      const int label = parse_target_label(line.fields[2], line.number);
      const int camera = parse_camera_id(line.fields[3], line.number);
      Pixel2 q{parse_double(line.fields[4], line.number),
               parse_double(line.fields[5], line.number)};
      require_finite(q.u, tag);
      require_finite(q.v, tag);
      if (!points.emplace(std::make_tuple(image, label, camera), q).second) {
        throw SchemaError("duplicate point for image " + std::to_string(image) + " target " +
                          line.fields[2] + " camera " + line.fields[3]);
      }
    } else {
      throw ParseError("unknown record '" + tag + "'", line.number);
    }
  }

  if (!baseline) throw SchemaError("missing 'baseline' record");
  if (!distance) throw SchemaError("missing 'distance' record");
  if (!n_images) throw SchemaError("missing 'n_images' record");
  if (!k1) throw SchemaError("missing 'camera' record for camera 1");
  if (!k2) throw SchemaError("missing 'camera' record for camera 2");
  if (*n_images < 1) throw SchemaError("n_images must be at least 1");
  if (!(*baseline > 0.0)) throw SchemaError("baseline must be positive");
  if (!(*distance > 0.0)) throw SchemaError("distance must be positive");
  if (!(k1->omega > 0.0) || !(k2->omega > 0.0)) {
    throw SchemaError("focal length must be positive");
  }

  Dataset out;
  out.baseline = *baseline;
  out.target_distance = *distance;
  out.k1 = *k1;
  out.k2 = *k2;
  if (truth_angles) {
    truth_angles->baseline = *baseline;
    out.truth_angles = truth_angles;
  }

  const long n = *n_images;
  out.images.resize(static_cast<std::size_t>(n));
  for (long image = 0; image < n; ++image) {
    for (int label = 0; label < 2; ++label) {
      for (int camera = 1; camera <= 2; ++camera) {
        const auto it = points.find(std::make_tuple(image, label, camera));
        if (it == points.end()) {
          throw SchemaError("missing point for image " + std::to_string(image) + " target " +
                            (label == 0 ? "A" : "B") + " camera " + std::to_string(camera));
        }
        PixelPair& pair = label == 0 ? out.images[image].a : out.images[image].b;
        (camera == 1 ? pair.q1 : pair.q2) = it->second;
        points.erase(it);
      }
    }
  }
  if (!points.empty()) {
    throw SchemaError("point for image " + std::to_string(std::get<0>(points.begin()->first)) +
                      " is outside the declared range of " + std::to_string(n) + " images");
  }

  if (!truth_points.empty()) {
    if (truth_points.size() != static_cast<std::size_t>(2 * n)) {
      throw SchemaError("truth_point records must cover all images or none");
    }
    out.truth_targets.resize(static_cast<std::size_t>(n));
    for (long image = 0; image < n; ++image) {
      for (int label = 0; label < 2; ++label) {
        const auto it = truth_points.find(std::make_pair(image, label));
        if (it == truth_points.end()) {
          throw SchemaError("missing truth_point for image " + std::to_string(image) +
                            " target " + (label == 0 ? "A" : "B"));
        }
        (label == 0 ? out.truth_targets[image].a : out.truth_targets[image].b) = it->second;
      }
    }
  }
  return out;
}

CalibrationFile make_calibration(Method method, const ExtrinsicAngles& angles,
                                 std::uint64_t seed, const std::string& config_hash) {
  CalibrationFile c;
  c.method = method;
  c.angles = angles;
  const Extrinsics pose = pose_from_angles(angles);
  c.R = pose.R;
  c.T = pose.T;
  c.E = canonicalize_essential(essential_from_extrinsics(pose));
  c.seed = seed;
  c.config_hash = config_hash;
  return c;
}

namespace {

void append_matrix_row_major(std::string& out, const char* tag, const double* values,
                             int count) {
  out += tag;
  for (int i = 0; i < count; ++i) {
    out += ',';
    out += fmt(values[i]);
  }
  out += '\n';
}

bool valid_hash(const std::string& h) {
  if (h.size() != 16) return false;
  for (const char c : h) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string serialize_calibration(const CalibrationFile& c) {
  for (double v : {c.angles.alpha, c.angles.beta, c.angles.gamma, c.angles.delta,
                   c.angles.epsilon, c.angles.baseline}) {
    if (!std::isfinite(v)) throw ConfigError("calibration angles must be finite");
  }
  if (!(c.angles.baseline > 0.0)) throw ConfigError("calibration baseline must be positive");
  if (!valid_hash(c.config_hash)) {
    throw ConfigError("config hash must be 16 lowercase hex digits");
  }

  std::string out;
  out += "format,stereocal-calibration,1\n";
  out += "method," + method_name(c.method) + '\n';
  out += "angles," + fmt(c.angles.alpha) + ',' + fmt(c.angles.beta) + ',' +
         fmt(c.angles.gamma) + ',' + fmt(c.angles.delta) + ',' + fmt(c.angles.epsilon) + '\n';
  out += "baseline," + fmt(c.angles.baseline) + '\n';
  Eigen::Matrix<double, 3, 3, Eigen::RowMajor> r = c.R, e = c.E;
  append_matrix_row_major(out, "R", r.data(), 9);
  append_matrix_row_major(out, "T", c.T.data(), 3);
  append_matrix_row_major(out, "E", e.data(), 9);
  out += "seed," + std::to_string(c.seed) + '\n';
  out += "config_hash," + c.config_hash + '\n';
  return out;
}

CalibrationFile parse_calibration(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  check_format_line(lines, "stereocal-calibration");

  std::optional<Method> method;
  std::optional<std::array<double, 5>> angle_values;
  std::optional<double> baseline;
  std::optional<std::array<double, 9>> r_values, e_values;
  std::optional<std::array<double, 3>> t_values;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> hash;

  const auto parse_array = [](const Line& line, auto& slot, std::size_t count) {
    expect_fields(line, count + 1);
    if (slot) throw SchemaError("duplicate '" + line.fields[0] + "' record");
    std::remove_reference_t<decltype(*slot)> values{};
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = parse_double(line.fields[i + 1], line.number);
      if (!std::isfinite(values[i])) {
        throw SchemaError("non-finite value in '" + line.fields[0] + "' record");
      }
    }
    slot = values;
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& tag = line.fields[0];
    if (tag == "method") {
      expect_fields(line, 2);
      if (method) throw SchemaError("duplicate 'method' record");
      method = parse_method(line.fields[1]);
      if (!method) throw ParseError("unknown method '" + line.fields[1] + "'", line.number);
    } else if (tag == "angles") {
      parse_array(line, angle_values, 5);
    } else if (tag == "baseline") {
      expect_fields(line, 2);
      if (baseline) throw SchemaError("duplicate 'baseline' record");
      baseline = parse_double(line.fields[1], line.number);
      require_finite(*baseline, tag);
    } else if (tag == "R") {
      parse_array(line, r_values, 9);
    } else if (tag == "T") {
      parse_array(line, t_values, 3);
    } else if (tag == "E") {
      parse_array(line, e_values, 9);
    } else if (tag == "seed") {
      expect_fields(line, 2);
      if (seed) throw SchemaError("duplicate 'seed' record");
      seed = parse_u64(line.fields[1], line.number);
    } else if (tag == "config_hash") {
      expect_fields(line, 2);
      if (hash) throw SchemaError("duplicate 'config_hash' record");
      if (!valid_hash(line.fields[1])) {
        throw ParseError("config_hash must be 16 lowercase hex digits", line.number);
      }
      hash = line.fields[1];
    } else {
      throw ParseError("unknown record '" + tag + "'", line.number);
    }
  }

  if (!method) throw SchemaError("missing 'method' record");
  if (!angle_values) throw SchemaError("missing 'angles' record");
  if (!baseline) throw SchemaError("missing 'baseline' record");
  if (!r_values) throw SchemaError("missing 'R' record");
  if (!t_values) throw SchemaError("missing 'T' record");
  if (!e_values) throw SchemaError("missing 'E' record");
  if (!seed) throw SchemaError("missing 'seed' record");
  if (!hash) throw SchemaError("missing 'config_hash' record");
  if (!(*baseline > 0.0)) throw SchemaError("baseline must be positive");

  CalibrationFile out;
  out.method = *method;
  out.angles.alpha = (*angle_values)[0];
  out.angles.beta = (*angle_values)[1];
  out.angles.gamma = (*angle_values)[2];
  out.angles.delta = (*angle_values)[3];
  out.angles.epsilon = (*angle_values)[4];
  out.angles.baseline = *baseline;
  out.R = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(r_values->data());
  out.T = Eigen::Map<const Vector3d>(t_values->data());
  out.E = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(e_values->data());
  out.seed = *seed;
  out.config_hash = *hash;

  // Stored derived quantities must agree with the primary angles.
  const CalibrationFile recomputed = make_calibration(out.method, out.angles, 0, out.config_hash);
  if ((out.R - recomputed.R).cwiseAbs().maxCoeff() > 1e-9) {
    throw ConsistencyError("stored R disagrees with the rotation recomputed from angles");
  }
  if ((out.T - recomputed.T).cwiseAbs().maxCoeff() > 1e-9) {
    throw ConsistencyError("stored T disagrees with the translation recomputed from angles");
  }
  if ((out.E - recomputed.E).cwiseAbs().maxCoeff() > 1e-9) {
    throw ConsistencyError("stored E disagrees with the matrix recomputed from angles");
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_file(path, serialize_dataset(dataset));
}

Dataset read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

void write_calibration(const CalibrationFile& calibration, const std::filesystem::path& path) {
  write_file(path, serialize_calibration(calibration));
}

CalibrationFile read_calibration(const std::filesystem::path& path) {
  return parse_calibration(read_file(path));
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace stereocal
