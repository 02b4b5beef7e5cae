#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "posture/io.hpp"
#include "posture/rng.hpp"
#include "posture/serialize.hpp"
#include "posture/synth.hpp"
#include "test_util.hpp"

using namespace posture;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("posture_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

Dataset small_dataset() {
  SynthConfig cfg;
  cfg.subjects = 3;
  cfg.episodes_per_posture = 2;
  cfg.locations = {SensorLocation::Chest, SensorLocation::LeftWrist};
  cfg.min_length = 20;
  cfg.max_length = 30;
  return generate_dataset(cfg);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles print shortest and read back exactly") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("stream csv round trip") {
  LabeledStream s;
  s.samples = {{0.1, -0.2, 0.94}, {1e-17, 3.0, -2.5}};
  s.labels = {"supine", "prone"};
  std::stringstream buf;
  write_stream_csv(buf, s);
  CHECK(buf.str().rfind("t,x,y,z,label\n", 0) == 0);
  const auto back = read_stream_csv(buf);
  CHECK(back.samples == s.samples);
  CHECK(back.labels == s.labels);
}

TEST_CASE("stream csv errors") {
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_CODE(read_stream_csv(bad_header), Errc::Parse);
  std::istringstream bad_number("t,x,y,z,label\n0,1,x,3,supine\n");
  CHECK_THROWS_CODE(read_stream_csv(bad_number), Errc::Parse);
  std::istringstream short_row("t,x,y,z,label\n0,1,2,supine\n");
  CHECK_THROWS_CODE(read_stream_csv(short_row), Errc::Parse);
  std::istringstream backwards("t,x,y,z,label\n1,0,0,1,supine\n0,0,0,1,supine\n");
  CHECK_THROWS_CODE(read_stream_csv(backwards), Errc::Parse);
  std::istringstream crlf("t,x,y,z,label\r\n0,0,0,1,supine\r\n");
  CHECK(read_stream_csv(crlf).labels == std::vector<std::string>{"supine"});
}

TEST_CASE("repeated postures stay separate episodes") {
  Episode a = constant_episode({0, 0, 1}, 3), b = constant_episode({0, 0, 0.9}, 4);
  const auto stream = episodes_to_stream({&a, &b});
  CHECK(stream.samples.size() == 8);
  CHECK(stream.labels[3] == "transition");
  const auto eps = segment_into_episodes(stream, {PostureLabel::Supine});
  REQUIRE(eps.size() == 2);
  CHECK(eps[0].samples == a.samples);
  CHECK(eps[1].samples == b.samples);
}

TEST_CASE("dataset round trip through manifest and csv") {
  const auto ds = small_dataset();
  const auto dir = scratch("dataset");
  write_dataset(ds, dir);
  const auto back = read_dataset(dir / "manifest.json");
  CHECK(back.label_set == ds.label_set);
  CHECK(back.axis_convention == ds.axis_convention);
  CHECK(back.provenance == ds.provenance);
  REQUIRE(back.episodes.size() == ds.episodes.size());
  for (std::size_t i = 0; i < ds.episodes.size(); ++i) {
    CHECK(back.episodes[i].samples == ds.episodes[i].samples);
    CHECK(back.episodes[i].label == ds.episodes[i].label);
    CHECK(back.episodes[i].subject_id == ds.episodes[i].subject_id);
    CHECK(back.episodes[i].location == ds.episodes[i].location);
  }
  const auto again = scratch("dataset2");
  write_dataset(back, again);
  CHECK(read_text_file(dir / "manifest.json") == read_text_file(again / "manifest.json"));
  CHECK(read_text_file(dir / "s01_chest.csv") == read_text_file(again / "s01_chest.csv"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(again);
}

TEST_CASE("dataset read errors") {
  const auto dir = scratch("bad");
  CHECK_THROWS_CODE(read_dataset(dir / "manifest.json"), Errc::Io);
  write_text_file(dir / "manifest.json", "{not json");
  CHECK_THROWS_CODE(read_dataset(dir / "manifest.json"), Errc::Parse);
  write_text_file(dir / "manifest.json", R"({"label_set": ["sitting"], "files": []})");
  CHECK_THROWS_CODE(read_dataset(dir / "manifest.json"), Errc::Parse);
  write_text_file(dir / "manifest.json", R"({"label_set": ["supine"], "files": [{"path": "gone.csv"}]})");
  CHECK_THROWS_CODE(read_dataset(dir / "manifest.json"), Errc::Io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("feature csv layout") {
  const Episode ep = constant_episode({0, 0, 1}, 4);
  std::ostringstream out;
  write_feature_csv(out, {FeatureVector48{}}, {&ep});
  const std::string text = out.str();
  CHECK(text.rfind("f1,f2,", 0) == 0);
  CHECK(text.find("f48,label,subject_id,location\n") != std::string::npos);
  CHECK(text.find(",supine,s01,chest\n") != std::string::npos);
  CHECK_THROWS_CODE(write_feature_csv(out, {}, {&ep}), Errc::LengthMismatch);
}

TEST_CASE("model documents round trip") {
  Rng rng(3);
  std::vector<FeatureVector48> X;
  std::vector<PostureLabel> y;
  const LabelSet labels{PostureLabel::Supine, PostureLabel::Prone, PostureLabel::LeftSide};
  std::vector<MeanFeature3> means;
  for (int i = 0; i < 30; ++i) {
    FeatureVector48 row{};
    for (auto& v : row) v = rng.normal();
    X.push_back(row);
    y.push_back(labels[static_cast<std::size_t>(i % 3)]);
    means.push_back({row[0], row[1], row[2]});
  }
  const auto et = fit_bagged_ensemble(X, y, labels, 4);
  const auto et_back = ensemble_from_json(nlohmann::json::parse(to_json(et).dump()));
  CHECK(et_back.trees == et.trees);
  CHECK(et_back.feature_subsets == et.feature_subsets);
  CHECK(et_back.importance == et.importance);
  CHECK(et_back.label_set == et.label_set);
  for (const auto& row : X) CHECK(predict_majority(et_back, row) == predict_majority(et, row));

  const auto lstm = init_model(labels, AdaLstmConfig{}, 9);
  const auto lstm_back = adalstm_from_json(nlohmann::json::parse(to_json(lstm).dump()));
  CHECK(lstm_back.params == lstm.params);
  CHECK(lstm_back.shape == lstm.shape);
  CHECK(lstm_back.config.init_range == lstm.config.init_range);

  const auto lda = lda_fit(means, y, labels);
  const auto lda_back = lda_from_json(nlohmann::json::parse(to_json(lda).dump()));
  CHECK(lda_back.coef == lda.coef);
  CHECK(lda_back.intercept == lda.intercept);

  const auto svm = svm_fit(means, y, labels);
  const auto svm_back = svm_from_json(nlohmann::json::parse(to_json(svm).dump()));
  CHECK(svm_back.weights == svm.weights);
  CHECK(svm_back.biases == svm.biases);
}

TEST_CASE("model documents are checked on load") {
  const LabelSet labels{PostureLabel::Supine, PostureLabel::Prone};
  auto doc = to_json(init_model(labels, AdaLstmConfig{}, 1));
  CHECK_THROWS_CODE(ensemble_from_json(doc), Errc::Parse);
  doc["schema_version"] = kModelSchemaVersion + 1;
  CHECK_THROWS_CODE(adalstm_from_json(doc), Errc::Parse);
  CHECK_THROWS_CODE(label_set_from_json(nlohmann::json::array({"standing"})), Errc::Parse);

  auto cfg = adalstm_config_from_json(nlohmann::json{{"max_epochs", 7}, {"lr_schedule", "fixed"}});
  CHECK(cfg.max_epochs == 7);
  CHECK(cfg.schedule == LrSchedule::Fixed);
  CHECK(cfg.batch_size == 27);
}

}  // TEST_SUITE
