#include "trajkit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace trajkit {

std::uint64_t stage_seed(std::uint64_t seed, SeedStage stage) {
    return derive_seed(seed, static_cast<std::uint64_t>(stage), 0x5eed);
}

PreparedStream prepare_stream(const GeneratedFlight& flight, const ExperimentConfig& config) {
    const auto& raw = flight.raw.samples;
    if (raw.size() <= config.history)
        throw Error(ErrorKind::InsufficientData, "stream shorter than the history window");
    PreparedStream s;
    s.state = flight.state;
    s.fused = fuse(preprocess(flight.raw, config.preprocess));
    s.truth = flight.truth;
    s.features = window_feature(s.fused, 0, config.history);
    s.features.label = flight.state;
    s.frame = LocalFrame::from_history(std::span<const FlightFrame>(s.fused).first(config.history), config.tail);
    return s;
}

Split stratified_split(std::span<const FlightState> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error(ErrorKind::InvalidArgument, "test fraction must lie in (0, 1)");
    Split split;
    std::mt19937_64 rng(seed);
    for (auto state : kAllStates) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == state) idx.push_back(i);
        if (idx.empty()) continue;
        // Fisher-Yates with an explicit draw keeps the order library independent.
        for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
        const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(idx.size())));
        split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::vector<FlightFrame> central_velocity_frames(std::span<const FlightFrame> frames) {
    if (frames.size() < 3) throw Error(ErrorKind::InsufficientData, "central differences need at least 3 frames");
    std::vector<FlightFrame> out;
    out.reserve(frames.size() - 2);
    for (std::size_t k = 1; k + 1 < frames.size(); ++k) {
        FlightFrame f = frames[k];
        f.vel = (frames[k + 1].pos - frames[k - 1].pos) / (frames[k + 1].t - frames[k - 1].t);
        f.speed_mag = f.vel.norm();
        out.push_back(f);
    }
    return out;
}

TrainingFrames local_training_frames(std::span<const PreparedStream> streams, std::span<const std::size_t> indices) {
    TrainingFrames out;
    for (std::size_t i : indices) {
        const auto& s = streams[i];
        out.per_state[static_cast<std::size_t>(index_of(s.state))].push_back(
            central_velocity_frames(s.frame.to_local(s.fused)));
    }
    return out;
}

namespace {

std::vector<FlightFrame> flatten(const std::vector<std::vector<FlightFrame>>& parts) {
    std::vector<FlightFrame> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

MlpModel train_on(const std::vector<const std::vector<FlightFrame>*>& streams, const MlpTrainOptions& options) {
    std::vector<TransitionSet> parts;
    parts.reserve(streams.size());
    for (const auto* s : streams) parts.push_back(mlp_transitions(*s));
    const auto set = concat(parts);
    return mlp_train(set.inputs, set.targets, options).model;
}

} // namespace

AdamsModelSet fit_adams_models(const TrainingFrames& frames) {
    AdamsModelSet set;
    std::vector<FlightFrame> all;
    for (auto state : kAllStates) {
        const auto& parts = frames.per_state[static_cast<std::size_t>(index_of(state))];
        if (parts.empty()) continue;
        auto pooled = flatten(parts);
        set.per_state[static_cast<std::size_t>(index_of(state))] = quad_regress(pooled);
        all.insert(all.end(), pooled.begin(), pooled.end());
    }
    if (!all.empty()) set.global = quad_regress(all);
    return set;
}

MlpModelSet fit_mlp_models(const TrainingFrames& frames, const MlpTrainOptions& options) {
    MlpModelSet set;
    std::vector<const std::vector<FlightFrame>*> all;
    for (auto state : kAllStates) {
        const auto& parts = frames.per_state[static_cast<std::size_t>(index_of(state))];
        if (parts.empty()) continue;
        std::vector<const std::vector<FlightFrame>*> mine;
        for (const auto& p : parts) mine.push_back(&p);
        set.per_state[static_cast<std::size_t>(index_of(state))] = train_on(mine, options);
        all.insert(all.end(), mine.begin(), mine.end());
    }
    if (!all.empty()) set.global = train_on(all, options);
    return set;
}

PredictionCase make_case(const PreparedStream& stream, const PcaModel& pca, std::size_t history) {
    if (stream.truth.size() <= history) throw Error(ErrorKind::InsufficientData, "no future beyond the history");
    PredictionCase c;
    c.state = stream.state;
    c.features = pca_project(pca, stream.features.values);
    c.start = stream.frame.start();
    for (std::size_t k = history; k < stream.truth.size(); ++k) {
        const auto& f = stream.truth[k];
        c.actual.push_back({stream.frame.time_to_local(f.t), stream.frame.to_local(f.pos)});
    }
    return c;
}

PreparedCorpus prepare_corpus(const ExperimentConfig& config) {
    CorpusSpec corpus_spec = config.corpus;
    corpus_spec.seed = stage_seed(config.seed, SeedStage::Corpus);
    const auto corpus = generate_corpus(corpus_spec);

    PreparedCorpus c;
    c.streams.reserve(corpus.size());
    for (const auto& flight : corpus) {
        c.streams.push_back(prepare_stream(flight, config));
        c.labels.push_back(flight.state);
        ++c.per_state[static_cast<std::size_t>(index_of(flight.state))];
    }
    c.split = stratified_split(c.labels, config.test_fraction, stage_seed(config.seed, SeedStage::Split));
    return c;
}

MatrixX PreparedCorpus::features(std::span<const std::size_t> idx) const {
    MatrixX x(static_cast<Eigen::Index>(idx.size()), kFeatureCount);
    for (std::size_t i = 0; i < idx.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = streams[idx[i]].features.values.transpose();
    return x;
}

std::vector<FlightState> PreparedCorpus::labels_of(std::span<const std::size_t> idx) const {
    std::vector<FlightState> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(labels[i]);
    return out;
}

Recognition train_recognition(const PreparedCorpus& corpus, const ExperimentConfig& config) {
    const MatrixX x_train = corpus.features(corpus.split.train);
    Recognition r;
    r.pca = pca_fit(x_train, config.pca);
    r.recognizer = dagsvm_train(pca_project_rows(r.pca, x_train), corpus.labels_of(corpus.split.train), config.svm);
    r.classification = evaluate(r.recognizer, pca_project_rows(r.pca, corpus.features(corpus.split.test)),
                                corpus.labels_of(corpus.split.test), config.f1_alpha);
    return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const auto corpus = prepare_corpus(config);
    const auto& streams = corpus.streams;
    auto rec = train_recognition(corpus, config);
    ExperimentResult r;
    r.streams_per_state = corpus.per_state;
    r.split = corpus.split;
    r.pca = std::move(rec.pca);
    r.recognizer = std::move(rec.recognizer);
    r.classification = rec.classification;

    const auto frames = local_training_frames(streams, r.split.train);
    r.adams = fit_adams_models(frames);
    MlpTrainOptions mlp_options = config.mlp;
    mlp_options.seed = stage_seed(config.seed, SeedStage::Mlp);
    r.mlp = fit_mlp_models(frames, mlp_options);

    std::vector<PredictionCase> cases;
    cases.reserve(r.split.test.size());
    for (std::size_t i : r.split.test) cases.push_back(make_case(streams[i], r.pca, config.history));
    r.comparison = compare_recognition(cases, r.adams, r.mlp, r.recognizer, config.adams);
    return r;
}

} // namespace trajkit
