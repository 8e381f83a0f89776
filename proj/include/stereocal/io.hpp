#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "stereocal/geometry.hpp"
#include "stereocal/method.hpp"
#include "stereocal/scene.hpp"

namespace stereocal {

/// One calibration result as persisted on disk: the five angles and the
/// measured baseline are primary; R, T and the canonical essential matrix
/// are stored for readability but are recomputed and cross-checked on
/// load.  seed and config_hash record how the result was produced.
struct CalibrationFile {
  Method method = Method::essential;
  ExtrinsicAngles angles;
  Matrix3d R = Matrix3d::Identity();
  Vector3d T = Vector3d::Zero();
  EssentialMatrix E = EssentialMatrix::Zero();
  std::uint64_t seed = 0;
  std::string config_hash;  ///< 16 lowercase hex digits
};

/// Fills the derived R/T/E fields from the angles.
CalibrationFile make_calibration(Method method, const ExtrinsicAngles& angles,
                                 std::uint64_t seed, const std::string& config_hash);

/// Canonical text serialization (see docs/formats.md).  Doubles are written
/// with 17 significant digits so parsing them back is bit-exact.  Throws
/// ConfigError when the in-memory object violates its own invariants.
std::string serialize_dataset(const Dataset& dataset);
std::string serialize_calibration(const CalibrationFile& calibration);

/// Parsers; see docs/formats.md for the error taxonomy (VersionError,
/// ParseError with line number, SchemaError, ConsistencyError).
Dataset parse_dataset(const std::string& text);
CalibrationFile parse_calibration(const std::string& text);

/// File wrappers around the serializers/parsers.  I/O failures (missing
/// file, unwritable path, ...) surface as the base Error.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);
void write_calibration(const CalibrationFile& calibration, const std::filesystem::path& path);
CalibrationFile read_calibration(const std::filesystem::path& path);

/// FNV-1a over a canonical description of the inputs; the configuration
/// fingerprint stored in calibration files.
std::uint64_t fnv1a64(const std::string& text);
std::string hex16(std::uint64_t value);

}  // namespace stereocal
