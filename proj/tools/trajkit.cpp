// trajkit: command-line front end for every pipeline stage.
//
// Exit codes: 0 success, 1 stage failure, 2 usage error.

#include "trajkit/config.hpp"
#include "trajkit/experiment.hpp"
#include "trajkit/io.hpp"
#include "trajkit/local_frame.hpp"
#include "trajkit/plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace trajkit;

namespace {

struct Common {
    std::optional<std::string> config_path;
    PipelineConfig config;
};

FlightState require_state(const std::string& text) {
    const auto s = parse_state(text);
    if (!s) throw Error(ErrorKind::InvalidArgument, "unknown state '" + text + "'");
    return *s;
}

std::string stream_name(FlightState s, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d", std::string(state_name(s)).c_str(), i);
    return buf;
}

/// stream -> state from a CSV with columns stream,state.
std::map<std::string, FlightState> read_states(const fs::path& path) {
    const auto t = io::read_csv(path);
    const int sc = t.require_column("stream"), lc = t.require_column("state");
    std::map<std::string, FlightState> out;
    for (const auto& row : t.rows) out[row[static_cast<std::size_t>(sc)]] = require_state(row[static_cast<std::size_t>(lc)]);
    return out;
}

struct ManifestEntry {
    std::string stream;
    FlightState state;
    fs::path raw;
    fs::path truth;
};

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    const auto t = io::read_csv(path);
    const int sc = t.require_column("stream"), lc = t.require_column("state"), rc = t.require_column("raw"),
              tc = t.require_column("truth");
    std::vector<ManifestEntry> out;
    const auto base = path.parent_path();
    for (const auto& row : t.rows)
        out.push_back({row[static_cast<std::size_t>(sc)], require_state(row[static_cast<std::size_t>(lc)]),
                       base / row[static_cast<std::size_t>(rc)], base / row[static_cast<std::size_t>(tc)]});
    return out;
}

/// Frame of reference for a stream: built from its first `history` frames,
/// as in the experiment.
LocalFrame history_frame(std::span<const FlightFrame> frames, const ExperimentConfig& c) {
    const std::size_t n = std::min(c.history, frames.size());
    if (n < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 frames to fix a reference frame");
    return LocalFrame::from_history(frames.first(n), c.tail);
}

/// Training frames grouped per state, each stream in its own local frame.
TrainingFrames grouped_frames(const fs::path& frames_path, const fs::path& states_path, const ExperimentConfig& c) {
    const auto streams = io::read_frames(frames_path);
    const auto states = read_states(states_path);
    TrainingFrames out;
    for (const auto& s : streams) {
        auto it = states.find(s.stream);
        if (it == states.end()) throw Error(ErrorKind::InvalidData, "stream '" + s.stream + "' has no state");
        const auto frame = history_frame(s.frames, c);
        out.per_state[static_cast<std::size_t>(index_of(it->second))].push_back(
            central_velocity_frames(frame.to_local(s.frames)));
    }
    return out;
}

/// Start of a prediction. A frames file is treated as the observed history:
/// the prediction runs in that history's local frame and is mapped back.
/// Any other CSV with t,x,y,z[,vx,vy,vz] gives the start state directly from
/// its last row.
struct Start {
    MotionState state;
    std::optional<LocalFrame> frame;
};

Start read_start(const fs::path& path, const ExperimentConfig& c) {
    const auto t = io::read_csv(path);
    if (t.rows.empty()) throw Error(ErrorKind::InsufficientData, path.string() + ": no rows");
    if (t.column("thx") >= 0 && t.rows.size() >= 3) {
        const auto streams = io::parse_frames(t);
        if (streams.size() != 1) throw Error(ErrorKind::InvalidData, path.string() + ": expected one stream");
        const auto& frames = streams.front().frames;
        const auto frame = LocalFrame::from_history(frames, std::min(c.tail, frames.size()));
        return {frame.start(), frame};
    }
    const std::size_t r = t.rows.size() - 1;
    MotionState s;
    s.t = t.number(r, t.require_column("t"));
    s.pos = Vec3(t.number(r, t.require_column("x")), t.number(r, t.require_column("y")),
                 t.number(r, t.require_column("z")));
    if (t.column("vx") >= 0)
        s.vel = Vec3(t.number(r, t.require_column("vx")), t.number(r, t.require_column("vy")),
                     t.number(r, t.require_column("vz")));
    return {s, std::nullopt};
}

void to_world(TrajectoryPrediction& pred, const LocalFrame& frame) {
    for (auto& p : pred.points) {
        p.t = frame.time_to_world(p.t);
        p.pos = frame.to_world(p.pos);
    }
    for (auto& c : pred.curves) {
        c.center = frame.to_world(c.center);
        c.direction = frame.vector_to_world(c.direction);
        for (auto& q : c.sample_points) q = frame.to_world(q);
    }
}

io::Json experiment_report(const ExperimentResult& r, const ExperimentConfig& c) {
    io::Json j;
    j["seed"] = c.seed;
    io::Json counts = io::Json::object();
    for (auto s : kAllStates) counts[std::string(state_name(s))] = r.streams_per_state[static_cast<std::size_t>(index_of(s))];
    j["streams_per_state"] = counts;
    j["split"] = {{"train", r.split.train.size()}, {"test", r.split.test.size()}, {"test_fraction", c.test_fraction}};
    j["settings"] = {{"history_ticks", c.history},
                     {"horizon_ticks", static_cast<long>(std::lround(c.corpus.duration / c.corpus.period)) + 1 -
                                           static_cast<long>(c.history)},
                     {"smoothing", c.preprocess.smoothing},
                     {"sigma_k", c.preprocess.sigma_k},
                     {"pca_ratio", c.pca.target_ratio},
                     {"pca_standardize", c.pca.standardize},
                     {"svm_c", c.svm.C},
                     {"svm_kernel", c.svm.linear ? "linear" : "rbf"},
                     {"mlp_lr", c.mlp.lr},
                     {"mlp_epochs", c.mlp.epochs},
                     {"adams_h", c.adams.h}};
    j["pca"] = {{"components", r.pca.output_dim()}, {"retained_ratio", r.pca.retained_ratio}};
    j["classification"] = io::to_json(r.classification);
    j["comparison"] = io::to_json(r.comparison);
    const auto& cmp = r.comparison;
    j["claims"] = {{"adams_with_below_without", cmp.adams_with.overall.mu < cmp.adams_without.overall.mu},
                   {"mlp_with_below_without", cmp.mlp_with.overall.mu < cmp.mlp_without.overall.mu}};
    return j;
}

void write_plot(const io::Json& report, const fs::path& svg, const std::optional<fs::path>& series) {
    const auto panels = error_panels(report);
    io::write_text(svg, grouped_bar_svg(panels, "Mean prediction error with and without state recognition"));
    if (series) io::write_text(*series, bar_series_csv(panels));
}

double parse_number(const std::string& flag, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError(flag, "expected a number, got '" + text + "'");
}

void print_error(const std::string& stage, const std::string& kind, const std::string& message) {
    io::Json j;
    j["error"] = {{"stage", stage}, {"kind", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajkit: flight state recognition and trajectory prediction"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--config", common.config_path, "Config file (default: $TRAJKIT_CONFIG)");

    std::function<void()> action;
    std::string stage;
    auto bind = [&](CLI::App* sub, std::function<void()> fn) {
        sub->callback([&, sub, fn] {
            stage = sub->get_name();
            action = fn;
        });
    };
    // Flags given on the command line override the config file.
    auto set_if = [](auto& target, const auto& opt) {
        if (opt) target = *opt;
    };

    // simulate -------------------------------------------------------------
    struct {
        std::string state, out;
        std::optional<std::string> truth;
        std::optional<double> duration, period;
        std::optional<std::uint64_t> seed;
        bool noiseless = false;
    } sim;
    auto* simulate = app.add_subcommand("simulate", "Generate one synthetic flight");
    simulate->add_option("--state", sim.state, "climb|level|turn|circle|descent")->required();
    simulate->add_option("--duration", sim.duration, "Seconds");
    simulate->add_option("--period", sim.period, "Sample period, s");
    simulate->add_option("--seed", sim.seed);
    simulate->add_option("--out", sim.out, "Raw sensor CSV")->required();
    simulate->add_option("--truth", sim.truth, "Ground-truth frames CSV");
    simulate->add_flag("--noiseless", sim.noiseless, "Zero all sensor noise");
    bind(simulate, [&] {
        auto sc = common.config.scenario;
        sc.state = require_state(sim.state);
        set_if(sc.duration, sim.duration);
        set_if(sc.period, sim.period);
        sc.seed = sim.seed ? *sim.seed : common.config.experiment.seed;
        if (sim.noiseless) sc.noise = SensorNoise::none();
        const auto flight = generate(sc);
        io::write_text(sim.out, io::raw_csv(flight.raw.samples));
        if (sim.truth) io::write_text(*sim.truth, io::frames_csv(flight.truth));
    });

    // simulate-corpus --------------------------------------------------------
    struct {
        std::optional<int> per_state;
        std::optional<std::uint64_t> seed;
        std::optional<double> duration;
        std::string out_dir;
    } corp;
    auto* simulate_corpus = app.add_subcommand("simulate-corpus", "Generate a labeled corpus");
    simulate_corpus->add_option("--per-state", corp.per_state, "Streams per state");
    simulate_corpus->add_option("--seed", corp.seed, "Run seed (same derivation as reproduce)");
    simulate_corpus->add_option("--duration", corp.duration, "Seconds per stream");
    simulate_corpus->add_option("--out-dir", corp.out_dir)->required();
    bind(simulate_corpus, [&] {
        auto spec = common.config.experiment.corpus;
        if (corp.per_state) spec.per_state.fill(*corp.per_state);
        set_if(spec.duration, corp.duration);
        const auto seed = corp.seed ? *corp.seed : common.config.experiment.seed;
        spec.seed = stage_seed(seed, SeedStage::Corpus);
        const auto corpus = generate_corpus(spec);
        std::string manifest = "stream,state,raw,truth\n";
        std::map<FlightState, int> counter;
        for (const auto& f : corpus) {
            const auto name = stream_name(f.state, counter[f.state]++);
            io::write_text(fs::path(corp.out_dir) / (name + ".raw.csv"), io::raw_csv(f.raw.samples));
            io::write_text(fs::path(corp.out_dir) / (name + ".truth.csv"), io::frames_csv(f.truth));
            manifest += name + "," + std::string(state_name(f.state)) + "," + name + ".raw.csv," + name + ".truth.csv\n";
        }
        io::write_text(fs::path(corp.out_dir) / "manifest.csv", manifest);
    });

    // preprocess -------------------------------------------------------------
    struct {
        std::optional<std::string> in, out, log, frames, manifest, states;
        std::optional<double> sigma_k, smoothing;
    } pre;
    auto* preprocess_cmd = app.add_subcommand("preprocess", "Outlier rejection, repair and smoothing; optional fusion");
    preprocess_cmd->add_option("--in", pre.in, "Raw CSV");
    preprocess_cmd->add_option("--out", pre.out, "Clean CSV");
    preprocess_cmd->add_option("--log", pre.log, "Repair log CSV");
    preprocess_cmd->add_option("--manifest", pre.manifest, "Corpus manifest instead of --in");
    preprocess_cmd->add_option("--frames", pre.frames, "Fused frames CSV");
    preprocess_cmd->add_option("--states", pre.states, "stream,state CSV (with --manifest)");
    preprocess_cmd->add_option("--sigma,--sigma-k", pre.sigma_k, "Rejection threshold in standard deviations");
    preprocess_cmd->add_option("--smooth,--smoothing", pre.smoothing, "Smoothing coefficient m");
    bind(preprocess_cmd, [&] {
        auto cfg = common.config.experiment.preprocess;
        set_if(cfg.sigma_k, pre.sigma_k);
        set_if(cfg.smoothing, pre.smoothing);
        if (pre.in.has_value() == pre.manifest.has_value())
            throw CLI::ValidationError("preprocess", "give exactly one of --in and --manifest");
        if (pre.in) {
            const auto clean = preprocess(io::read_raw(*pre.in), cfg);
            if (pre.out) io::write_text(*pre.out, io::raw_csv(clean.samples));
            if (pre.log) io::write_text(*pre.log, io::repair_log_csv(clean.repair_log));
            if (pre.frames) io::write_text(*pre.frames, io::frames_csv(fuse(clean)));
            return;
        }
        if (!pre.frames) throw CLI::ValidationError("preprocess", "--manifest needs --frames");
        std::vector<io::StreamFrames> all;
        std::string states = "stream,state\n";
        for (const auto& e : read_manifest(*pre.manifest)) {
            all.push_back({e.stream, fuse(preprocess(io::read_raw(e.raw), cfg))});
            states += e.stream + "," + std::string(state_name(e.state)) + "\n";
        }
        io::write_text(*pre.frames, io::frames_csv(all));
        if (pre.states) io::write_text(*pre.states, states);
    });

    // features ---------------------------------------------------------------
    struct {
        std::optional<std::string> in, manifest, label;
        std::string out;
        std::optional<std::size_t> window, stride;
        bool first_only = false;
    } feat;
    auto* features_cmd = app.add_subcommand("features", "Windowed 75-value feature vectors");
    features_cmd->add_option("--in", feat.in, "Clean CSV of one stream");
    features_cmd->add_option("--manifest", feat.manifest, "Corpus manifest; raw streams are preprocessed first");
    features_cmd->add_option("--label", feat.label, "State label for --in");
    features_cmd->add_option("--out", feat.out)->required();
    features_cmd->add_option("--window", feat.window);
    features_cmd->add_option("--stride", feat.stride);
    features_cmd->add_flag("--first-only", feat.first_only, "Only the first window of each stream");
    bind(features_cmd, [&] {
        auto wc = common.config.window;
        set_if(wc.window_len, feat.window);
        set_if(wc.stride, feat.stride);
        if (feat.in.has_value() == feat.manifest.has_value())
            throw CLI::ValidationError("features", "give exactly one of --in and --manifest");
        io::LabeledFeatures out;
        auto add = [&](const std::vector<FlightFrame>& frames, std::optional<FlightState> label, const std::string& name) {
            auto rows = feat.first_only ? std::vector<FeatureVector>{window_feature(frames, 0, wc.window_len)}
                                        : window_features(frames, wc);
            for (auto& r : rows) {
                r.label = label;
                out.rows.push_back(r);
                out.streams.push_back(name);
            }
        };
        if (feat.in) {
            const auto raw = io::read_raw(*feat.in);
            CleanStream clean{raw.samples, raw.period, {}};
            validate_stream(clean.samples);
            std::optional<FlightState> label;
            if (feat.label) label = require_state(*feat.label);
            add(fuse(clean), label, "");
        } else {
            for (const auto& e : read_manifest(*feat.manifest))
                add(fuse(preprocess(io::read_raw(e.raw), common.config.experiment.preprocess)), e.state, e.stream);
        }
        io::write_text(feat.out, io::features_csv(out));
    });

    // pca-fit ----------------------------------------------------------------
    struct {
        std::string in, out;
        std::optional<double> ratio;
        std::optional<bool> standardize;
    } pcf;
    auto* pca_cmd = app.add_subcommand("pca-fit", "Fit the principal-component projection");
    pca_cmd->add_option("--in", pcf.in, "Features CSV")->required();
    pca_cmd->add_option("--out", pcf.out, "PCA JSON")->required();
    pca_cmd->add_option("--ratio", pcf.ratio, "Cumulative contribution target");
    pca_cmd->add_option("--standardize", pcf.standardize, "true|false");
    bind(pca_cmd, [&] {
        auto opt = common.config.experiment.pca;
        set_if(opt.target_ratio, pcf.ratio);
        set_if(opt.standardize, pcf.standardize);
        const auto model = pca_fit(io::feature_matrix(io::read_features(pcf.in)), opt);
        io::write_json(pcf.out, io::to_json(model));
        std::cout << "components " << model.output_dim() << ", retained " << model.retained_ratio << "\n";
    });

    // train-svm ----------------------------------------------------------------
    struct {
        std::string in, pca, out;
        std::optional<double> c;
        std::optional<std::string> gamma, kernel;
    } tsv;
    auto* svm_cmd = app.add_subcommand("train-svm", "Train the DAGSVM recognizer on projected features");
    svm_cmd->add_option("--in", tsv.in, "Labeled features CSV")->required();
    svm_cmd->add_option("--pca", tsv.pca, "PCA JSON")->required();
    svm_cmd->add_option("--out", tsv.out, "SVM JSON")->required();
    svm_cmd->add_option("--C", tsv.c);
    svm_cmd->add_option("--gamma", tsv.gamma, "RBF width, or auto for 1/dim");
    svm_cmd->add_option("--kernel", tsv.kernel)->check(CLI::IsMember({"rbf", "linear"}));
    bind(svm_cmd, [&] {
        auto params = common.config.experiment.svm;
        set_if(params.C, tsv.c);
        if (tsv.gamma) params.gamma = *tsv.gamma == "auto" ? 0.0 : parse_number("--gamma", *tsv.gamma);
        if (tsv.kernel) params.linear = *tsv.kernel == "linear";
        const auto feats = io::read_features(tsv.in);
        const auto pca = io::pca_from_json(io::read_json(tsv.pca));
        auto model = dagsvm_train(pca_project_rows(pca, io::feature_matrix(feats)), io::feature_labels(feats), params);
        model.pca_ref = fs::path(tsv.pca).filename().string();
        io::write_json(tsv.out, io::to_json(model));
    });

    // classify ---------------------------------------------------------------
    struct {
        std::string in, svm, out;
        std::optional<std::string> pca, report;
    } cls;
    auto* classify_cmd = app.add_subcommand("classify", "Recognize flight states of feature rows");
    classify_cmd->add_option("--in", cls.in, "Features CSV")->required();
    classify_cmd->add_option("--model,--svm", cls.svm, "SVM JSON")->required();
    classify_cmd->add_option("--pca", cls.pca, "PCA JSON; default: the one the model names, beside it");
    classify_cmd->add_option("--out", cls.out, "Predicted labels CSV")->required();
    classify_cmd->add_option("--report", cls.report, "Metrics JSON (needs labeled input)");
    bind(classify_cmd, [&] {
        const auto feats = io::read_features(cls.in);
        const auto svm = io::dagsvm_from_json(io::read_json(cls.svm));
        if (!cls.pca && svm.pca_ref.empty()) throw CLI::ValidationError("classify", "model names no projection; pass --pca");
        const fs::path pca_path = cls.pca ? fs::path(*cls.pca) : fs::path(cls.svm).parent_path() / svm.pca_ref;
        const auto pca = io::pca_from_json(io::read_json(pca_path));
        const MatrixX z = pca_project_rows(pca, io::feature_matrix(feats));
        if (z.cols() != svm.dim()) throw Error(ErrorKind::DimensionError, "projection does not match the recognizer");
        std::string out = "row,window_start,stream,predicted\n";
        std::vector<FlightState> predicted;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const auto s = dag_classify(svm, z.row(i).transpose()).state;
            predicted.push_back(s);
            const auto ui = static_cast<std::size_t>(i);
            out += std::to_string(i) + "," + std::to_string(feats.rows[ui].window_start) + "," + feats.streams[ui] +
                   "," + std::string(state_name(s)) + "\n";
        }
        io::write_text(cls.out, out);
        if (cls.report) {
            const auto truth = io::feature_labels(feats);
            io::write_json(*cls.report, io::to_json(score_predictions(truth, predicted, kDefaultF1Alpha)));
        }
    });

    // train-adams / train-mlp ------------------------------------------------
    struct {
        std::string in, states, out;
        std::optional<double> lr;
        std::optional<int> epochs;
        std::optional<std::uint64_t> seed;
    } trn;
    auto* adams_cmd = app.add_subcommand("train-adams", "Fit per-state and global quadratic velocity fields");
    adams_cmd->add_option("--in", trn.in, "Frames CSV with a stream column")->required();
    adams_cmd->add_option("--states", trn.states, "stream,state CSV")->required();
    adams_cmd->add_option("--out", trn.out, "Adams model-set JSON")->required();
    bind(adams_cmd, [&] { io::write_json(trn.out, io::to_json(fit_adams_models(grouped_frames(trn.in, trn.states, common.config.experiment)))); });

    auto* mlp_cmd = app.add_subcommand("train-mlp", "Train per-state and global 7-8-4 networks");
    mlp_cmd->add_option("--in", trn.in, "Frames CSV with a stream column")->required();
    mlp_cmd->add_option("--states", trn.states, "stream,state CSV")->required();
    mlp_cmd->add_option("--out", trn.out, "MLP model-set JSON")->required();
    mlp_cmd->add_option("--lr", trn.lr);
    mlp_cmd->add_option("--epochs", trn.epochs);
    mlp_cmd->add_option("--seed", trn.seed);
    bind(mlp_cmd, [&] {
        auto opt = common.config.experiment.mlp;
        set_if(opt.lr, trn.lr);
        set_if(opt.epochs, trn.epochs);
        set_if(opt.seed, trn.seed);
        io::write_json(trn.out, io::to_json(fit_mlp_models(grouped_frames(trn.in, trn.states, common.config.experiment), opt)));
    });

    // predict ----------------------------------------------------------------
    struct {
        std::string method, model, start, out;
        std::optional<std::string> state, curves;
        std::optional<double> h, coverage;
        std::optional<int> steps;
        bool confidence = false;
    } prd;
    auto* predict_cmd = app.add_subcommand("predict", "Predict a trajectory from a start state");
    predict_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
    predict_cmd->add_option("--method", prd.method)->required()->check(CLI::IsMember({"adams", "mlp"}));
    predict_cmd->add_option("--model", prd.model, "Model-set JSON")->required();
    predict_cmd->add_option("--start", prd.start, "History frames CSV, or t,x,y,z[,vx,vy,vz] (last row)")->required();
    predict_cmd->add_option("--state", prd.state, "Flight state model; default global");
    predict_cmd->add_option("--h", prd.h, "Step, s (adams)");
    predict_cmd->add_option("--steps", prd.steps);
    predict_cmd->add_flag("--confidence", prd.confidence, "Confidence radii and curves (adams)");
    predict_cmd->add_option("--coverage", prd.coverage, "Radius multiplier");
    predict_cmd->add_option("--out", prd.out, "t,x,y,z,r CSV")->required();
    predict_cmd->add_option("--curves", prd.curves, "Curve sample CSV");
    bind(predict_cmd, [&] {
        auto opt = common.config.experiment.adams;
        set_if(opt.h, prd.h);
        set_if(opt.steps, prd.steps);
        set_if(opt.coverage_multiplier, prd.coverage);
        opt.with_confidence = prd.confidence;
        std::optional<FlightState> state;
        if (prd.state) state = require_state(*prd.state);
        const auto start = read_start(prd.start, common.config.experiment);
        const auto j = io::read_json(prd.model);
        TrajectoryPrediction pred;
        if (prd.method == "adams") {
            const auto set = io::adams_set_from_json(j);
            pred = predict_trajectory(set.select(state), start.state.t, start.state.pos, opt);
        } else {
            const auto set = io::mlp_set_from_json(j);
            pred = rollout(set.select(state), start.state, opt.steps);
        }
        if (start.frame) to_world(pred, *start.frame);
        pred.state = state;
        io::write_text(prd.out, io::prediction_csv(pred));
        if (prd.curves) io::write_text(*prd.curves, io::curves_csv(pred));
    });

    // eval -------------------------------------------------------------------
    struct {
        std::string actual, pred, out;
    } ev;
    auto* eval_cmd = app.add_subcommand("eval", "Mean point distance between prediction and truth");
    eval_cmd->add_option("--actual", ev.actual, "Truth frames CSV")->required();
    eval_cmd->add_option("--pred", ev.pred, "Prediction CSV")->required();
    eval_cmd->add_option("--out", ev.out, "Report JSON")->required();
    bind(eval_cmd, [&] {
        const auto pred = io::read_prediction(ev.pred);
        const auto truth_streams = io::read_frames(ev.actual);
        if (truth_streams.size() != 1) throw Error(ErrorKind::InvalidData, "truth file must hold exactly one stream");
        const auto& truth = truth_streams.front().frames;
        std::vector<TrajectoryPoint> actual;
        std::size_t k = 0;
        for (const auto& p : pred) {
            while (k < truth.size() && truth[k].t < p.t - 1e-9) ++k;
            if (k == truth.size() || std::abs(truth[k].t - p.t) > 1e-9)
                throw Error(ErrorKind::AlignmentError, "no truth sample at t = " + io::format_double(p.t));
            actual.push_back({truth[k].t, truth[k].pos});
        }
        io::write_json(ev.out, io::to_json(trajectory_error(actual, pred)));
    });

    // plot -------------------------------------------------------------------
    struct {
        std::string report, out;
        std::optional<std::string> series;
    } plt;
    auto* plot_cmd = app.add_subcommand("plot", "Grouped-bar SVG of per-state error with and without recognition");
    plot_cmd->add_option("--report", plt.report)->required();
    plot_cmd->add_option("--out", plt.out, "SVG path")->required();
    plot_cmd->add_option("--series", plt.series, "Bar values CSV (default: beside the SVG)");
    bind(plot_cmd, [&] {
        fs::path series = plt.series ? fs::path(*plt.series) : fs::path(plt.out).replace_extension(".csv");
        write_plot(io::read_json(plt.report), plt.out, series);
    });

    // reproduce --------------------------------------------------------------
    struct {
        std::optional<int> per_state, epochs;
        std::optional<std::uint64_t> seed;
        std::string out_dir = "reproduce_out";
    } rep;
    auto* reproduce_cmd = app.add_subcommand("reproduce", "Corpus to report: the full recognition and prediction study");
    reproduce_cmd->add_option("--per-state", rep.per_state, "Streams per state");
    reproduce_cmd->add_option("--seed", rep.seed);
    reproduce_cmd->add_option("--epochs", rep.epochs, "MLP epochs");
    reproduce_cmd->add_option("--out-dir", rep.out_dir);
    bind(reproduce_cmd, [&] {
        auto cfg = common.config.experiment;
        if (rep.per_state) cfg.corpus.per_state.fill(*rep.per_state);
        set_if(cfg.seed, rep.seed);
        set_if(cfg.mlp.epochs, rep.epochs);
        PipelineConfig check = common.config;
        check.experiment = cfg;
        validate_config(check);

        const auto result = run_experiment(cfg);
        const fs::path dir(rep.out_dir);
        const auto report = experiment_report(result, cfg);
        io::write_json(dir / "report.json", report);
        io::write_json(dir / "pca.json", io::to_json(result.pca));
        auto svm = result.recognizer;
        svm.pca_ref = "pca.json";
        io::write_json(dir / "svm.json", io::to_json(svm));
        io::write_json(dir / "adams.json", io::to_json(result.adams));
        io::write_json(dir / "mlp.json", io::to_json(result.mlp));
        write_plot(report, dir / "fig8.svg", dir / "fig8.csv");

        const auto& c = result.comparison;
        std::cout << "accuracy " << result.classification.accuracy << " (" << result.pca.output_dim()
                  << " components)\n"
                  << "adams mu with " << c.adams_with.overall.mu << " without " << c.adams_without.overall.mu << "\n"
                  << "mlp   mu with " << c.mlp_with.overall.mu << " without " << c.mlp_without.overall.mu << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::optional<fs::path> path;
        if (common.config_path) path = *common.config_path;
        common.config = load_config(path);
        if (action) action();
    } catch (const CLI::ValidationError& e) {
        print_error(stage, "Usage", e.what());
        return 2;
    } catch (const Error& e) {
        print_error(stage.empty() ? "config" : stage, std::string(to_string(e.kind())), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(stage, "Internal", e.what());
        return 1;
    }
    return 0;
}
