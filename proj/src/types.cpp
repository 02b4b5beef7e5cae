#include "posture/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace posture {

namespace {

constexpr std::array<std::pair<PostureLabel, std::string_view>, 4> kPostureNames{{
    {PostureLabel::Supine, "supine"},
    {PostureLabel::Prone, "prone"},
    {PostureLabel::LeftSide, "left_side"},
    {PostureLabel::RightSide, "right_side"},
}};

constexpr std::array<std::pair<SensorLocation, std::string_view>, 9> kLocationNames{{
    {SensorLocation::Chest, "chest"},
    {SensorLocation::LeftThigh, "left_thigh"},
    {SensorLocation::RightThigh, "right_thigh"},
    {SensorLocation::LeftAnkle, "left_ankle"},
    {SensorLocation::RightAnkle, "right_ankle"},
    {SensorLocation::LeftArm, "left_arm"},
    {SensorLocation::RightArm, "right_arm"},
    {SensorLocation::LeftWrist, "left_wrist"},
    {SensorLocation::RightWrist, "right_wrist"},
}};

}  // namespace

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ZeroSignal: return "ZeroSignal";
    case Errc::NonFinite: return "NonFinite";
    case Errc::EmptyStream: return "EmptyStream";
    case Errc::EpisodeTooShort: return "EpisodeTooShort";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::AxisConventionMismatch: return "AxisConventionMismatch";
    case Errc::WindowTooShort: return "WindowTooShort";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::AxisRequired: return "AxisRequired";
    case Errc::AxisForbidden: return "AxisForbidden";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::UnfittedModel: return "UnfittedModel";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::UnknownClassCount: return "UnknownClassCount";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::TooFewEpisodes: return "TooFewEpisodes";
    case Errc::SingleSubject: return "SingleSubject";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::ZeroMean: return "ZeroMean";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::EmptyEpisode: return "EmptyEpisode";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool Error::numerical() const noexcept {
  return code_ == Errc::NonFinite || code_ == Errc::NonConvergence ||
         code_ == Errc::SingularCovariance;
}

double AccelSample::norm() const { return std::sqrt(x * x + y * y + z * z); }

bool AccelSample::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

std::string_view to_string(PostureLabel label) {
  for (const auto& [value, name] : kPostureNames) {
    if (value == label) return name;
  }
  return "unknown";
}

std::string_view to_string(SensorLocation location) {
  for (const auto& [value, name] : kLocationNames) {
    if (value == location) return name;
  }
  return "unknown";
}

std::optional<PostureLabel> parse_posture(std::string_view name) {
  for (const auto& [value, text] : kPostureNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::optional<SensorLocation> parse_location(std::string_view name) {
  for (const auto& [value, text] : kLocationNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::size_t label_index(const LabelSet& labels, PostureLabel label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw Error(Errc::UnknownLabel, std::string(to_string(label)) + " not in label set");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

double Episode::duration_seconds() const {
  return static_cast<double>(samples.size()) / sample_rate_hz;
}

void validate(const Episode& ep) {
  if (ep.samples.empty()) throw Error(Errc::EmptyEpisode, "episode '" + ep.id + "' has no samples");
  if (!(ep.sample_rate_hz > 0.0)) {
    throw Error(Errc::InvalidArgument, "episode '" + ep.id + "' has non-positive sample rate");
  }
  for (const auto& s : ep.samples) {
    if (!s.finite()) throw Error(Errc::NonFinite, "episode '" + ep.id + "' has a non-finite sample");
  }
}

}  // namespace posture
