#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "posture/features.hpp"
#include "posture/signal.hpp"
#include "posture/types.hpp"

namespace posture {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// CSV with header `t,x,y,z,label`.
void write_stream_csv(std::ostream& out, const LabeledStream& stream);
LabeledStream read_stream_csv(std::istream& in);

/// Lays a subject x location group of episodes end to end, separated by a
/// single `transition` sample so repeated postures stay distinct runs.
LabeledStream episodes_to_stream(const std::vector<const Episode*>& episodes);

inline constexpr int kManifestSchemaVersion = 1;

/// Writes one CSV per subject x location plus manifest.json into `dir`.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Reads manifest.json and its CSV files, segmenting each into episodes over the
/// manifest's label set. Throws Io, Parse or EmptyStream.
Dataset read_dataset(const std::filesystem::path& manifest_path);

/// One row per episode: f1..f48,label,subject_id,location.
void write_feature_csv(std::ostream& out, const std::vector<FeatureVector48>& rows,
                       const std::vector<const Episode*>& episodes);

/// Writes `text` to `path`, creating parent directories. Throws Io.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace posture
