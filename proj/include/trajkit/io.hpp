// io.hpp
//
// CSV and JSON forms of every pipeline artifact. Numbers are written with 17
// significant digits so a write/read cycle is lossless.
#ifndef TRAJKIT_IO_HPP_
#define TRAJKIT_IO_HPP_

#include "trajkit/adams.hpp"
#include "trajkit/dagsvm.hpp"
#include "trajkit/evalmetrics.hpp"
#include "trajkit/experiment.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/mlp.hpp"
#include "trajkit/pca.hpp"
#include "trajkit/telemetry.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace trajkit::io {

using Json = nlohmann::ordered_json;

/// Whole-file helpers; failures throw IoError naming the path.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

std::string format_double(double v);

/// Header row plus numeric rows. Cells that fail to parse as numbers throw
/// IoError; "nan" is accepted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    int require_column(const std::string& name) const;
    double number(std::size_t row, int col) const;
};
Table parse_csv(const std::string& text, const std::string& source = "csv");
Table read_csv(const std::filesystem::path& path);

// Raw and clean streams: t,x,y,pressure,wx,wy,wz,ax,ay,az
std::string raw_csv(std::span<const RawSample> samples);
RawStream parse_raw(const Table& table);
RawStream read_raw(const std::filesystem::path& path);

std::string repair_log_csv(std::span<const RepairEntry> log);

// Frames: [stream,]t,x,y,z,vx,vy,vz,thx,thy,thz,ax,ay,az,k,speed,acc
std::string frames_csv(std::span<const FlightFrame> frames);
struct StreamFrames {
    std::string stream;
    std::vector<FlightFrame> frames;
};
std::string frames_csv(std::span<const StreamFrames> streams);
/// Groups rows by the optional `stream` column, keeping first-seen order.
std::vector<StreamFrames> parse_frames(const Table& table);
std::vector<StreamFrames> read_frames(const std::filesystem::path& path);

// Features: window_start, optional stream and label, then the 75 named columns.
struct LabeledFeatures {
    std::vector<FeatureVector> rows;
    std::vector<std::string> streams;  // empty strings when absent
};
std::string features_csv(const LabeledFeatures& features);
LabeledFeatures read_features(const std::filesystem::path& path);
MatrixX feature_matrix(const LabeledFeatures& features);
std::vector<FlightState> feature_labels(const LabeledFeatures& features);  // throws if any is missing

// Predictions: t,x,y,z,r and the curve sidecar t,point_index,cx,cy,cz
std::string prediction_csv(const TrajectoryPrediction& pred);
std::string curves_csv(const TrajectoryPrediction& pred);
std::vector<TrajectoryPoint> read_prediction(const std::filesystem::path& path);

// Models
Json to_json(const PcaModel& m);
PcaModel pca_from_json(const Json& j);
Json to_json(const DagSvmModel& m);
DagSvmModel dagsvm_from_json(const Json& j);
Json to_json(const QuadVelocityModel& m);
QuadVelocityModel quad_from_json(const Json& j);
Json to_json(const MlpModel& m);
MlpModel mlp_from_json(const Json& j);

template <typename Model, typename ToJson>
Json model_set_json(const StateModels<Model>& set, const char* kind, ToJson to) {
    Json j;
    j["kind"] = kind;
    Json states = Json::object();
    for (auto s : kAllStates) {
        const auto& m = set.per_state[static_cast<std::size_t>(index_of(s))];
        states[std::string(state_name(s))] = m ? to(*m) : Json(nullptr);
    }
    j["states"] = states;
    j["global"] = set.global ? to(*set.global) : Json(nullptr);
    return j;
}
Json to_json(const AdamsModelSet& set);
Json to_json(const MlpModelSet& set);
AdamsModelSet adams_set_from_json(const Json& j);
MlpModelSet mlp_set_from_json(const Json& j);

// Reports
Json to_json(const ClassificationReport& r);
Json to_json(const ErrorReport& r);
Json to_json(const MethodErrors& e);
Json to_json(const RecognitionComparison& c);

} // namespace trajkit::io

#endif // TRAJKIT_IO_HPP_
