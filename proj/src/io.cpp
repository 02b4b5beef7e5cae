#include "posture/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace posture {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(Errc::Parse, "line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void write_stream_csv(std::ostream& out, const LabeledStream& stream) {
  out << "t,x,y,z,label\n";
  for (std::size_t i = 0; i < stream.samples.size(); ++i) {
    const auto& s = stream.samples[i];
    out << format_double(static_cast<double>(i) / stream.sample_rate_hz) << ',' << format_double(s.x) << ','
        << format_double(s.y) << ',' << format_double(s.z) << ',' << stream.labels[i] << '\n';
  }
}

LabeledStream read_stream_csv(std::istream& in) {
  LabeledStream stream;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(Errc::Parse, "missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x,y,z,label") throw Error(Errc::Parse, "unexpected header '" + line + "'");
  double last_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_commas(line);
    if (cols.size() != 5) throw Error(Errc::Parse, "line " + std::to_string(lineno) + ": expected 5 columns");
    const double t = parse_double(cols[0], lineno);
    if (t < last_t) throw Error(Errc::Parse, "line " + std::to_string(lineno) + ": time goes backwards");
    last_t = t;
    stream.samples.push_back({parse_double(cols[1], lineno), parse_double(cols[2], lineno),
                              parse_double(cols[3], lineno)});
    stream.labels.emplace_back(cols[4]);
  }
  return stream;
}

LabeledStream episodes_to_stream(const std::vector<const Episode*>& episodes) {
  LabeledStream stream;
  if (episodes.empty()) return stream;
  stream.sample_rate_hz = episodes.front()->sample_rate_hz;
  stream.subject_id = episodes.front()->subject_id;
  stream.location = episodes.front()->location;
  stream.provenance = episodes.front()->provenance;
  for (const Episode* ep : episodes) {
    if (!stream.samples.empty()) {
      stream.samples.push_back(stream.samples.back());
      stream.labels.emplace_back("transition");
    }
    stream.samples.insert(stream.samples.end(), ep->samples.begin(), ep->samples.end());
    stream.labels.insert(stream.labels.end(), ep->samples.size(), std::string(to_string(ep->label)));
  }
  return stream;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::map<std::pair<std::string, SensorLocation>, std::vector<const Episode*>> groups;
  std::vector<std::pair<std::string, SensorLocation>> order;
  for (const auto& ep : ds.episodes) {
    const auto key = std::make_pair(ep.subject_id, ep.location);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&ep);
  }
  json files = json::array();
  for (const auto& key : order) {
    const auto stream = episodes_to_stream(groups[key]);
    const std::string name = key.first + "_" + std::string(to_string(key.second)) + ".csv";
    std::ostringstream csv;
    write_stream_csv(csv, stream);
    write_text_file(dir / name, csv.str());
    files.push_back({{"path", name},
                     {"subject_id", key.first},
                     {"location", to_string(key.second)},
                     {"sample_rate_hz", stream.sample_rate_hz},
                     {"provenance", stream.provenance}});
  }
  json labels = json::array();
  for (PostureLabel l : ds.label_set) labels.push_back(to_string(l));
  const json manifest{{"schema_version", kManifestSchemaVersion},
                      {"provenance", ds.provenance},
                      {"axis_convention", ds.axis_convention},
                      {"label_set", labels},
                      {"files", files}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset read_dataset(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, manifest_path.string() + ": " + e.what());
  }
  Dataset ds;
  try {
    ds.provenance = manifest.value("provenance", "");
    ds.axis_convention = manifest.value("axis_convention", std::string(kDefaultAxisConvention));
    for (const auto& name : manifest.at("label_set")) {
      const auto l = parse_posture(name.get<std::string>());
      if (!l) throw Error(Errc::Parse, "unknown posture '" + name.get<std::string>() + "' in label_set");
      ds.label_set.push_back(*l);
    }
    const auto base = manifest_path.parent_path();
    for (const auto& f : manifest.at("files")) {
      std::ifstream in(base / f.at("path").get<std::string>(), std::ios::binary);
      if (!in) throw Error(Errc::Io, "cannot read " + (base / f.at("path").get<std::string>()).string());
      LabeledStream stream = read_stream_csv(in);
      stream.subject_id = f.at("subject_id").get<std::string>();
      const auto loc = parse_location(f.at("location").get<std::string>());
      if (!loc) throw Error(Errc::Parse, "unknown location '" + f.at("location").get<std::string>() + "'");
      stream.location = *loc;
      stream.sample_rate_hz = f.at("sample_rate_hz").get<double>();
      stream.provenance = f.value("provenance", ds.provenance);
      auto eps = segment_into_episodes(stream, ds.label_set);
      for (auto& ep : eps) ds.episodes.push_back(std::move(ep));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, manifest_path.string() + ": " + e.what());
  }
  return ds;
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureVector48>& rows,
                       const std::vector<const Episode*>& episodes) {
  if (rows.size() != episodes.size()) throw Error(Errc::LengthMismatch, "feature rows and episodes differ");
  for (std::size_t k = 1; k <= kFeatureCount; ++k) out << 'f' << k << ',';
  out << "label,subject_id,location\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i]) out << format_double(v) << ',';
    out << to_string(episodes[i]->label) << ',' << episodes[i]->subject_id << ',' << to_string(episodes[i]->location)
        << '\n';
  }
}

}  // namespace posture
