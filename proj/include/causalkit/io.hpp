#pragma once

// JSON files for spaces, SCMs, transformations and reports. Output is
// canonical: sorted keys, two-space indentation, rationals as lowest-terms
// strings, so a load/save cycle is byte-stable.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "causalkit/causal_space.hpp"
#include "causalkit/check_report.hpp"
#include "causalkit/gaussian.hpp"
#include "causalkit/scm.hpp"
#include "causalkit/transform.hpp"

namespace causalkit::io {

using Json = nlohmann::json;

enum class Kind { kFiniteSpace, kFiniteScm, kGaussianScm, kGaussianSubsystem, kTransformation };

std::string to_string(Kind kind);
/// Reads the "kind" field; throws ParseError if it is missing or unknown.
Kind kind_of(const Json& json);

struct LoadOptions {
  std::size_t max_outcomes = kDefaultMaxOutcomes;
  /// Directory against which file references inside a document resolve.
  std::filesystem::path base_dir;
};

/// Throws ParseError on I/O or syntax errors.
Json read_file(const std::filesystem::path& path);
std::string canonical(const Json& json);
void write_file(const std::filesystem::path& path, const Json& json);

Json to_json(const FiniteCausalSpace& space);
Json to_json(const FiniteSCM& scm);
Json to_json(const Transformation& t);
Json to_json(const gaussian::LinearGaussianSCM& scm);
Json to_json(const CheckReport& report);

/// Accepts finite-space and finite-scm documents (the latter compiled).
FiniteCausalSpace load_space(const Json& json, const LoadOptions& options = {});
FiniteSCM load_scm(const Json& json, const LoadOptions& options = {});
Transformation load_transformation(const Json& json, const LoadOptions& options = {});
gaussian::LinearGaussianSCM load_gaussian_scm(const Json& json);
CheckReport load_report(const Json& json);

/// A transformation between two linear-Gaussian SCMs, as stored on disk.
struct GaussianTransformationFile {
  gaussian::LinearGaussianSCM source;
  gaussian::LinearGaussianSCM target;
  gaussian::Matrix map;
  gaussian::Vector offset;
  gaussian::Matrix cov;
  std::map<std::string, std::string> rho;

  gaussian::GaussianTransformation build() const;
};
bool is_gaussian_transformation(const Json& json, const LoadOptions& options = {});
GaussianTransformationFile load_gaussian_transformation(const Json& json, const LoadOptions& options = {});
Json to_json(const GaussianTransformationFile& t);

/// The visible part of a linear-Gaussian system, with either the kernels
/// marginalized from the full system or the independence kernels of its law.
struct GaussianSubsystemFile {
  gaussian::LinearGaussianSCM system;
  std::vector<std::string> visible;
  bool marginalized = true;

  gaussian::GaussianCausalSpace build() const;
};
GaussianSubsystemFile load_gaussian_subsystem(const Json& json, const LoadOptions& options = {});
Json to_json(const GaussianSubsystemFile& s);

/// "X,Y" -> {X, Y}; "" -> the empty set.
CoordSet parse_coordinates(const CoordinateSpace& space, const std::string& text);
/// "Y=1" or "X=0,Y=1": the cylinder fixing those coordinates.
Event parse_event(const CoordinateSpace& space, const std::string& text);

/// Outcome cap from CAUSALKIT_MAX_OUTCOMES, or the default when unset.
/// Throws InvalidArgument for a malformed value.
std::size_t max_outcomes_from_env();

}  // namespace causalkit::io
