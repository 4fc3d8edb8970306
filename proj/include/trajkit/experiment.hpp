// experiment.hpp
//
// End-to-end run on a synthetic corpus: every stream is split into an
// observed history (used for recognition and as the prediction start) and a
// future horizon (used for scoring). Predictors work in the track-aligned
// frame of each stream's own history.
#ifndef TRAJKIT_EXPERIMENT_HPP_
#define TRAJKIT_EXPERIMENT_HPP_

#include "trajkit/adams.hpp"
#include "trajkit/dagsvm.hpp"
#include "trajkit/evalmetrics.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/local_frame.hpp"
#include "trajkit/mlp.hpp"
#include "trajkit/pca.hpp"
#include "trajkit/simgen.hpp"
#include "trajkit/telemetry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace trajkit {

struct ExperimentConfig {
    CorpusSpec corpus;
    PreprocessConfig preprocess;
    std::size_t history = 20;  // ticks
    std::size_t tail = 10;     // ticks in the end-of-history line fit
    double test_fraction = 0.2;
    PcaOptions pca{0.85, true};
    DagSvmParams svm;
    MlpTrainOptions mlp;
    PredictOptions adams;
    double f1_alpha = kDefaultF1Alpha;
    std::uint64_t seed = 7;
};

/// Stage seeds derived from the run seed.
enum class SeedStage : std::uint64_t { Corpus = 1, Split = 2, Mlp = 3 };
std::uint64_t stage_seed(std::uint64_t seed, SeedStage stage);

struct PreparedStream {
    FlightState state = FlightState::Level;
    std::vector<FlightFrame> fused;
    std::vector<FlightFrame> truth;
    FeatureVector features;  // over the history window
    LocalFrame frame;
};

PreparedStream prepare_stream(const GeneratedFlight& flight, const ExperimentConfig& config);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per-class shuffle then the first round(fraction * n_class) go to test.
Split stratified_split(std::span<const FlightState> labels, double test_fraction, std::uint64_t seed);

/// Interior frames with velocity replaced by the central difference of
/// position, whose noise is independent of the position noise at that tick.
std::vector<FlightFrame> central_velocity_frames(std::span<const FlightFrame> frames);

/// Fused frames of the training streams in their own local frames, with
/// central-difference velocities, grouped per state.
struct TrainingFrames {
    std::array<std::vector<std::vector<FlightFrame>>, kNumStates> per_state;
};
TrainingFrames local_training_frames(std::span<const PreparedStream> streams, std::span<const std::size_t> indices);

AdamsModelSet fit_adams_models(const TrainingFrames& frames);
MlpModelSet fit_mlp_models(const TrainingFrames& frames, const MlpTrainOptions& options);

PredictionCase make_case(const PreparedStream& stream, const PcaModel& pca, std::size_t history);

/// Every stream prepared, plus the train/test split.
struct PreparedCorpus {
    std::vector<PreparedStream> streams;
    std::vector<FlightState> labels;
    std::array<int, kNumStates> per_state{};
    Split split;

    /// Feature rows of the given streams.
    MatrixX features(std::span<const std::size_t> idx) const;
    std::vector<FlightState> labels_of(std::span<const std::size_t> idx) const;
};
PreparedCorpus prepare_corpus(const ExperimentConfig& config);

/// PCA and DAGSVM fitted on the training streams, scored on the test streams.
struct Recognition {
    PcaModel pca;
    DagSvmModel recognizer;
    ClassificationReport classification;
};
Recognition train_recognition(const PreparedCorpus& corpus, const ExperimentConfig& config);

struct ExperimentResult {
    std::array<int, kNumStates> streams_per_state{};
    Split split;
    PcaModel pca;
    DagSvmModel recognizer;
    ClassificationReport classification;
    AdamsModelSet adams;
    MlpModelSet mlp;
    RecognitionComparison comparison;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

} // namespace trajkit

#endif // TRAJKIT_EXPERIMENT_HPP_
