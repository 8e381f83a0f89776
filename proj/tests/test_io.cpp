#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "stereocal/io.hpp"
#include "test_support.hpp"

using namespace stereocal;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string drop_line_starting(const std::string& text, const std::string& prefix) {
  std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].rfind(prefix, 0) == 0) {
      lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(i));
      return join_lines(lines);
    }
  }
  FAIL("no line starting with '", prefix, "'");
  return text;
}

std::string duplicate_line_starting(const std::string& text, const std::string& prefix) {
  std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].rfind(prefix, 0) == 0) {
      lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(i), lines[i]);
      return join_lines(lines);
    }
  }
  FAIL("no line starting with '", prefix, "'");
  return text;
}

std::string replace_line_starting(const std::string& text, const std::string& prefix,
                                  const std::string& replacement) {
  std::vector<std::string> lines = split_lines(text);
  for (std::string& line : lines) {
    if (line.rfind(prefix, 0) == 0) {
      line = replacement;
      return join_lines(lines);
    }
  }
  FAIL("no line starting with '", prefix, "'");
  return text;
}

Dataset sample_dataset(std::uint64_t seed, double noise = 0.4, int n = 4) {
  SceneConfig c = SceneConfig::defaults();
  c.seed = seed;
  c.noise_sigma = noise;
  c.n_images = n;
  return generate(c);
}

ExtrinsicAngles sample_angles() {
  ExtrinsicAngles a;
  a.alpha = 0.1;
  a.beta = 0.2;
  a.gamma = 0.3;
  a.delta = 0.05;
  a.epsilon = 0.15;
  a.baseline = 4.0;
  return a;
}

bool same_pixel(const Pixel2& a, const Pixel2& b) { return a.u == b.u && a.v == b.v; }

}  // namespace

TEST_CASE("datasets survive a write/read round trip bit for bit") {
  const Dataset d = sample_dataset(21);
  const Dataset back = parse_dataset(serialize_dataset(d));

  CHECK(back.baseline == d.baseline);
  CHECK(back.target_distance == d.target_distance);
  CHECK(back.k1.omega == d.k1.omega);
  CHECK(back.k2.v0 == d.k2.v0);
  REQUIRE(back.n_images() == d.n_images());
  for (int i = 0; i < d.n_images(); ++i) {
    const auto& a = d.images[static_cast<std::size_t>(i)];
    const auto& b = back.images[static_cast<std::size_t>(i)];
    CHECK(same_pixel(a.a.q1, b.a.q1));
    CHECK(same_pixel(a.a.q2, b.a.q2));
    CHECK(same_pixel(a.b.q1, b.b.q1));
    CHECK(same_pixel(a.b.q2, b.b.q2));
  }
  REQUIRE(back.truth_angles.has_value());
  CHECK(back.truth_angles->alpha == d.truth_angles->alpha);
  CHECK(back.truth_angles->epsilon == d.truth_angles->epsilon);
  CHECK(back.truth_angles->baseline == d.baseline);
  REQUIRE(back.truth_targets.size() == d.truth_targets.size());
  for (std::size_t i = 0; i < d.truth_targets.size(); ++i) {
    CHECK((back.truth_targets[i].a - d.truth_targets[i].a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.truth_targets[i].b - d.truth_targets[i].b).cwiseAbs().maxCoeff() == 0.0);
  }

  // serializing the parsed dataset reproduces the text exactly
  CHECK(serialize_dataset(back) == serialize_dataset(d));
}

TEST_CASE("a minimal hand-written dataset parses") {
  const std::string text =
      "format,stereocal-dataset,1\n"
      "baseline,4\n"
      "distance,0.9\n"
      "n_images,1\n"
      "camera,1,3500,0,1024,544\n"
      "camera,2,3500,0,1024,544\n"
      "point,0,A,1,100.5,200.5\n"
      "point,0,A,2,110.5,210.5\n"
      "point,0,B,1,300.25,400.75\n"
      "point,0,B,2,310.25,410.75\n";
  const Dataset d = parse_dataset(text);
  CHECK(d.n_images() == 1);
  CHECK(d.baseline == 4.0);
  CHECK(d.images[0].a.q1.u == 100.5);
  CHECK(d.images[0].b.q2.v == 410.75);
  CHECK_FALSE(d.truth_angles.has_value());
  CHECK(d.truth_targets.empty());
}

TEST_CASE("dataset corruption is rejected with the right error type") {
  const std::string good = serialize_dataset(sample_dataset(22));

  SUBCASE("bad version") {
    CHECK_THROWS_AS(
        parse_dataset(replace_line_starting(good, "format", "format,stereocal-dataset,2")),
        VersionError);
  }
  SUBCASE("wrong format name") {
    CHECK_THROWS_AS(
        parse_dataset(replace_line_starting(good, "format", "format,stereocal-calibration,1")),
        VersionError);
  }
  SUBCASE("missing header") { CHECK_THROWS_AS(parse_dataset(""), VersionError); }
  SUBCASE("header not first") {
    CHECK_THROWS_AS(parse_dataset(drop_line_starting(good, "format")), VersionError);
  }
  SUBCASE("missing baseline") {
    CHECK_THROWS_AS(parse_dataset(drop_line_starting(good, "baseline")), SchemaError);
  }
  SUBCASE("duplicate baseline") {
    CHECK_THROWS_AS(parse_dataset(duplicate_line_starting(good, "baseline")), SchemaError);
  }
  SUBCASE("missing camera 2") {
    CHECK_THROWS_AS(parse_dataset(drop_line_starting(good, "camera,2")), SchemaError);
  }
  SUBCASE("missing point row names the triple") {
    try {
      parse_dataset(drop_line_starting(good, "point,3,B,2"));
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      const std::string message = e.what();
      CHECK(message.find("image 3") != std::string::npos);
      CHECK(message.find("B") != std::string::npos);
      CHECK(message.find("camera 2") != std::string::npos);
    }
  }
  SUBCASE("duplicate point row") {
    CHECK_THROWS_AS(parse_dataset(duplicate_line_starting(good, "point,1,A,1")), SchemaError);
  }
  SUBCASE("point beyond the declared image count") {
    CHECK_THROWS_AS(
        parse_dataset(good + "point,99,A,1,10,10\npoint,99,A,2,10,10\n"
                             "point,99,B,1,10,10\npoint,99,B,2,10,10\n"),
        SchemaError);
  }
  SUBCASE("malformed number carries its line") {
    const std::string bad = replace_line_starting(good, "baseline", "baseline,4.0x");
    try {
      parse_dataset(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("(line 2)") != std::string::npos);
    }
  }
  SUBCASE("unknown record") {
    CHECK_THROWS_AS(parse_dataset(good + "mystery,1\n"), ParseError);
  }
  SUBCASE("bad camera id") {
    CHECK_THROWS_AS(parse_dataset(replace_line_starting(good, "point,0,A,1", "point,0,A,3,1,1")),
                    ParseError);
  }
  SUBCASE("bad target label") {
    CHECK_THROWS_AS(parse_dataset(replace_line_starting(good, "point,0,A,1", "point,0,C,1,1,1")),
                    ParseError);
  }
  SUBCASE("zero image count") {
    CHECK_THROWS_AS(parse_dataset(replace_line_starting(good, "n_images", "n_images,0")),
                    SchemaError);
  }
  SUBCASE("negative baseline") {
    CHECK_THROWS_AS(parse_dataset(replace_line_starting(good, "baseline", "baseline,-4")),
                    SchemaError);
  }
  SUBCASE("non-finite value") {
    CHECK_THROWS_AS(parse_dataset(replace_line_starting(good, "distance", "distance,inf")),
                    SchemaError);
  }
  SUBCASE("partial truth points") {
    CHECK_THROWS_AS(parse_dataset(drop_line_starting(good, "truth_point,0,A")), SchemaError);
  }
  SUBCASE("empty line") {
    CHECK_THROWS_AS(parse_dataset("format,stereocal-dataset,1\n\nbaseline,4\n"), ParseError);
  }
}

TEST_CASE("calibrations survive a write/read round trip bit for bit") {
  const CalibrationFile c = make_calibration(Method::min2d, sample_angles(), 42,
                                             hex16(fnv1a64("options")));
  const CalibrationFile back = parse_calibration(serialize_calibration(c));
  CHECK(back.method == Method::min2d);
  CHECK(back.angles.alpha == c.angles.alpha);
  CHECK(back.angles.beta == c.angles.beta);
  CHECK(back.angles.gamma == c.angles.gamma);
  CHECK(back.angles.delta == c.angles.delta);
  CHECK(back.angles.epsilon == c.angles.epsilon);
  CHECK(back.angles.baseline == c.angles.baseline);
  CHECK(test_support::max_abs_diff(back.R, c.R) == 0.0);
  CHECK((back.T - c.T).cwiseAbs().maxCoeff() == 0.0);
  CHECK(test_support::max_abs_diff(back.E, c.E) == 0.0);
  CHECK(back.seed == 42);
  CHECK(back.config_hash == c.config_hash);
  CHECK(serialize_calibration(back) == serialize_calibration(c));
}

TEST_CASE("an identity-pose calibration file round trips") {
  ExtrinsicAngles a;  // all angles zero
  a.baseline = 1.0;
  const CalibrationFile c = make_calibration(Method::essential, a, 0, hex16(0));
  const CalibrationFile back = parse_calibration(serialize_calibration(c));
  CHECK(test_support::max_abs_diff(back.R, Matrix3d::Identity()) == 0.0);
  CHECK(back.T.x() == 1.0);
}

TEST_CASE("stored derived values come from the core rotation code") {
  const CalibrationFile c = make_calibration(Method::min3d, sample_angles(), 7, hex16(1));
  CHECK(test_support::max_abs_diff(c.R, rotation_from_angles(0.1, 0.2, 0.3)) < 1e-12);
  CHECK((c.T - translation_from_angles(0.05, 0.15, 4.0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(is_essential(c.E));
}

TEST_CASE("calibration corruption is rejected with the right error type") {
  const CalibrationFile c = make_calibration(Method::essential, sample_angles(), 9,
                                             hex16(fnv1a64("cfg")));
  const std::string good = serialize_calibration(c);

  SUBCASE("bad version") {
    CHECK_THROWS_AS(parse_calibration(replace_line_starting(
                        good, "format", "format,stereocal-calibration,9")),
                    VersionError);
  }
  SUBCASE("dataset header on a calibration parser") {
    CHECK_THROWS_AS(parse_calibration(serialize_dataset(sample_dataset(23))), VersionError);
  }
  SUBCASE("unknown method") {
    CHECK_THROWS_AS(parse_calibration(replace_line_starting(good, "method", "method,min4d")),
                    ParseError);
  }
  SUBCASE("missing record") {
    for (const char* prefix : {"method", "angles", "baseline", "R,", "T,", "E,", "seed",
                               "config_hash"}) {
      CHECK_THROWS_AS(parse_calibration(drop_line_starting(good, prefix)), SchemaError);
    }
  }
  SUBCASE("duplicate record") {
    CHECK_THROWS_AS(parse_calibration(duplicate_line_starting(good, "angles")), SchemaError);
  }
  SUBCASE("short angle list") {
    CHECK_THROWS_AS(
        parse_calibration(replace_line_starting(good, "angles", "angles,0.1,0.2,0.3,0.05")),
        ParseError);
  }
  SUBCASE("malformed angle carries its line") {
    try {
      parse_calibration(replace_line_starting(good, "angles", "angles,0.1,oops,0.3,0.05,0.15"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("invalid hash") {
    CHECK_THROWS_AS(
        parse_calibration(replace_line_starting(good, "config_hash", "config_hash,XYZ")),
        ParseError);
  }
  SUBCASE("negative baseline") {
    CHECK_THROWS_AS(parse_calibration(replace_line_starting(good, "baseline", "baseline,-1")),
                    SchemaError);
  }

  // Any edit of a derived quantity must trip the consistency cross-check.
  SUBCASE("edited rotation") {
    std::vector<std::string> lines = split_lines(good);
    for (std::string& line : lines) {
      if (line.rfind("R,", 0) == 0) {
        line = "R,1,0.001,0,0,1,0,0,0,1";  // not even orthonormal
      }
    }
    CHECK_THROWS_AS(parse_calibration(join_lines(lines)), ConsistencyError);
  }
  SUBCASE("edited translation") {
    const Vector3d t = translation_from_angles(0.05, 0.15, 4.0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "T,%.17g,%.17g,%.17g", t.x() + 1e-6, t.y(), t.z());
    CHECK_THROWS_AS(parse_calibration(replace_line_starting(good, "T,", buf)),
                    ConsistencyError);
  }
  SUBCASE("edited essential matrix") {
    std::vector<std::string> lines = split_lines(good);
    for (std::string& line : lines) {
      if (line.rfind("E,", 0) == 0) line[3] = line[3] == '1' ? '2' : '1';
    }
    CHECK_THROWS_AS(parse_calibration(join_lines(lines)), ConsistencyError);
  }
  SUBCASE("angles edited away from the stored derived values") {
    CHECK_THROWS_AS(
        parse_calibration(replace_line_starting(good, "angles", "angles,0.1,0.2,0.3,0.05,0.16")),
        ConsistencyError);
  }
}

TEST_CASE("file wrappers round trip through disk and report open failures") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "stereocal_io_test";
  fs::create_directories(dir);

  const Dataset d = sample_dataset(24);
  write_dataset(d, dir / "d.txt");
  const Dataset back = read_dataset(dir / "d.txt");
  CHECK(serialize_dataset(back) == serialize_dataset(d));

  const CalibrationFile c = make_calibration(Method::min3d, sample_angles(), 3, hex16(2));
  write_calibration(c, dir / "c.txt");
  CHECK(serialize_calibration(read_calibration(dir / "c.txt")) == serialize_calibration(c));

  CHECK_THROWS_AS(read_dataset(dir / "no_such_file.txt"), Error);
  CHECK_THROWS_AS(read_calibration(dir / "missing"), Error);
  fs::remove_all(dir);
}

TEST_CASE("serialization rejects invalid in-memory objects") {
  Dataset d;  // empty
  CHECK_THROWS_AS(serialize_dataset(d), ConfigError);

  Dataset one = sample_dataset(25, 0.0, 1);
  one.baseline = -1.0;
  CHECK_THROWS_AS(serialize_dataset(one), ConfigError);

  CalibrationFile c = make_calibration(Method::essential, sample_angles(), 0, hex16(0));
  c.config_hash = "not-a-hash";
  CHECK_THROWS_AS(serialize_calibration(c), ConfigError);
  c = make_calibration(Method::essential, sample_angles(), 0, hex16(0));
  c.angles.baseline = 0.0;
  CHECK_THROWS_AS(serialize_calibration(c), ConfigError);
}

TEST_CASE("the configuration hash matches the reference FNV-1a vectors") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex16(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hex16(5) == "0000000000000005");
}
