#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace posture {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class Errc {
  ZeroSignal,
  NonFinite,
  EmptyStream,
  EpisodeTooShort,
  EmptyDataset,
  AxisConventionMismatch,
  WindowTooShort,
  UnknownFeature,
  AxisRequired,
  AxisForbidden,
  DimensionMismatch,
  EmptyTrainingSet,
  UnfittedModel,
  EmptySequence,
  ShapeMismatch,
  SingularCovariance,
  UnknownClassCount,
  NonConvergence,
  TooFewEpisodes,
  SingleSubject,
  UnknownLabel,
  LengthMismatch,
  EmptyMatrix,
  ZeroMean,
  DegenerateInput,
  EmptyEpisode,
  InvalidArgument,
  Io,
  Parse,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

  /// True for failures of the numerical core (non-finite gradients, solver aborts).
  bool numerical() const noexcept;

 private:
  Errc code_;
};

struct AccelSample {
  double x = 0.0;  // lateral
  double y = 0.0;  // vertical
  double z = 0.0;  // frontal

  double norm() const;
  bool finite() const;
  friend bool operator==(const AccelSample&, const AccelSample&) = default;
};

enum class PostureLabel { Supine, Prone, LeftSide, RightSide };

enum class SensorLocation {
  Chest,
  LeftThigh,
  RightThigh,
  LeftAnkle,
  RightAnkle,
  LeftArm,
  RightArm,
  LeftWrist,
  RightWrist,
};

inline constexpr PostureLabel kAllPostures[] = {PostureLabel::Supine, PostureLabel::Prone,
                                                PostureLabel::LeftSide, PostureLabel::RightSide};

inline constexpr SensorLocation kAllLocations[] = {
    SensorLocation::Chest,     SensorLocation::LeftThigh, SensorLocation::RightThigh,
    SensorLocation::LeftAnkle, SensorLocation::RightAnkle, SensorLocation::LeftArm,
    SensorLocation::RightArm,  SensorLocation::LeftWrist, SensorLocation::RightWrist,
};

// Canonical names are snake_case ("supine", "left_side", "left_thigh").
std::string_view to_string(PostureLabel label);
std::string_view to_string(SensorLocation location);
std::optional<PostureLabel> parse_posture(std::string_view name);
std::optional<SensorLocation> parse_location(std::string_view name);

using LabelSet = std::vector<PostureLabel>;

/// Position of `label` in `labels`, throwing UnknownLabel when absent.
std::size_t label_index(const LabelSet& labels, PostureLabel label);

/// One labeled run of a single posture by one subject at one sensor site.
struct Episode {
  std::vector<AccelSample> samples;
  double sample_rate_hz = 30.0;
  std::string subject_id;
  SensorLocation location = SensorLocation::Chest;
  PostureLabel label = PostureLabel::Supine;
  std::string id;          // unique within a dataset
  std::string provenance;  // source tag, carried through integration

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const;
};

/// Throws EmptyEpisode / InvalidArgument / NonFinite when an episode breaks its invariants.
void validate(const Episode& ep);

inline constexpr std::string_view kDefaultAxisConvention = "x=lateral,y=vertical,z=frontal";

struct Dataset {
  std::vector<Episode> episodes;
  LabelSet label_set;
  std::string provenance;
  std::string axis_convention{kDefaultAxisConvention};
};

/// A contiguous slice of an episode. Non-owning; the parent must outlive it.
struct Window {
  std::span<const AccelSample> samples;
  const Episode* parent = nullptr;
  std::size_t start = 0;

  const AccelSample& operator[](std::size_t i) const { return samples[i]; }
  std::size_t size() const { return samples.size(); }
};

}  // namespace posture
