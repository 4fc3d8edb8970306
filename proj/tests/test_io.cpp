#include "helpers.hpp"
#include "trajkit/config.hpp"
#include "trajkit/io.hpp"
#include "trajkit/plot.hpp"
#include "trajkit/simgen.hpp"

#include <cstdlib>
#include <filesystem>

using namespace trajkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "trajkit_unit";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("raw csv round trip is lossless") {
    FlightScenario sc;
    sc.state = FlightState::Turn;
    sc.duration = 3.0;
    const auto f = generate(sc);
    const auto back = io::parse_raw(io::parse_csv(io::raw_csv(f.raw.samples)));
    REQUIRE(back.samples.size() == f.raw.samples.size());
    for (std::size_t i = 0; i < back.samples.size(); ++i)
        for (int c = 0; c < kNumChannels; ++c)
            CHECK(channel_value(back.samples[i], static_cast<Channel>(c)) ==
                  channel_value(f.raw.samples[i], static_cast<Channel>(c)));
    CHECK(back.period == doctest::Approx(0.1));
}

TEST_CASE("csv errors") {
    CHECK_KIND(io::parse_raw(io::parse_csv("t,x\n0,1\n")), ErrorKind::IoError);
    CHECK_KIND(io::parse_csv("a,b\n1,zz\n").number(0, 1), ErrorKind::IoError);
    CHECK_KIND(io::read_text("/nonexistent/trajkit.csv"), ErrorKind::IoError);
}

TEST_CASE("frames csv keeps streams apart") {
    FlightScenario sc;
    sc.duration = 1.0;
    const auto a = generate(sc).truth;
    sc.state = FlightState::Climb;
    const auto b = generate(sc).truth;
    const std::vector<io::StreamFrames> streams{{"first", a}, {"second", b}};
    const auto back = io::parse_frames(io::parse_csv(io::frames_csv(streams)));
    REQUIRE(back.size() == 2);
    CHECK(back[1].stream == "second");
    REQUIRE(back[1].frames.size() == b.size());
    CHECK(back[1].frames[4].pos == b[4].pos);
    CHECK(back[1].frames[4].curvature == b[4].curvature);
}

TEST_CASE("features csv round trip") {
    FlightScenario sc;
    sc.duration = 5.0;
    const auto frames = generate(sc).truth;
    io::LabeledFeatures lf;
    lf.rows = window_features(frames);
    for (auto& r : lf.rows) r.label = FlightState::Level;
    lf.streams.assign(lf.rows.size(), "s0");
    const auto path = scratch("features.csv");
    io::write_text(path, io::features_csv(lf));
    const auto back = io::read_features(path);
    REQUIRE(back.rows.size() == lf.rows.size());
    CHECK(back.rows[2].values == lf.rows[2].values);
    CHECK(back.rows[2].window_start == lf.rows[2].window_start);
    CHECK(io::feature_labels(back)[0] == FlightState::Level);
    CHECK(io::feature_matrix(back).cols() == 75);
}

TEST_CASE("model json round trips") {
    const MatrixX data = MatrixX::Random(30, 6);
    const auto pca = pca_fit(data, {0.9, true});
    const auto pca2 = io::pca_from_json(io::to_json(pca));
    CHECK(pca2.components == pca.components);
    CHECK(pca2.scale == pca.scale);
    CHECK(io::to_json(pca).at("k") == pca.output_dim());

    std::vector<FlightState> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(state_from_index(i % 5));
    MatrixX x = MatrixX::Random(30, 2);
    for (int i = 0; i < 30; ++i) x(i, 0) += 3.0 * (i % 5);
    const auto svm = dagsvm_train(x, labels, DagSvmParams{});
    const auto svm2 = io::dagsvm_from_json(io::to_json(svm));
    for (int i = 0; i < 30; ++i) CHECK(dag_classify(svm2, x.row(i).transpose()).state == dag_classify(svm, x.row(i).transpose()).state);

    FlightScenario sc;
    sc.state = FlightState::Climb;
    sc.duration = 3.0;
    const auto frames = generate(sc).truth;
    AdamsModelSet adams;
    adams.global = quad_regress(frames);
    adams.per_state[0] = adams.global;
    const auto adams2 = io::adams_set_from_json(io::to_json(adams));
    CHECK(adams2.global->axes[2].coef == adams.global->axes[2].coef);
    CHECK(adams2.global->axes[1].stats.spread == adams.global->axes[1].stats.spread);
    CHECK_FALSE(adams2.per_state[1].has_value());
    CHECK_KIND(io::mlp_set_from_json(io::to_json(adams)), ErrorKind::IoError);

    MlpModelSet mlp;
    MlpTrainOptions opt;
    opt.epochs = 5;
    const auto t = mlp_transitions(frames);
    mlp.global = mlp_train(t.inputs, t.targets, opt).model;
    const auto mlp2 = io::mlp_set_from_json(io::to_json(mlp));
    CHECK(mlp_predict(*mlp2.global, t.inputs.row(3).transpose()) == mlp_predict(*mlp.global, t.inputs.row(3).transpose()));
}

TEST_CASE("prediction csv writes nan radii when none were requested") {
    TrajectoryPrediction p;
    p.points = {{0.1, Vec3(1, 2, 3)}, {0.2, Vec3(4, 5, 6)}};
    const auto text = io::prediction_csv(p);
    CHECK(text.find("nan") != std::string::npos);
    const auto path = scratch("pred.csv");
    io::write_text(path, text);
    const auto back = io::read_prediction(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].pos == Vec3(4, 5, 6));
}

TEST_CASE("config: parse, override and validate") {
    const auto values = io::Json::parse("{}");
    (void)values;
    PipelineConfig c;
    apply_ini(c, parse_ini("# comment\n[pca]\nratio = 0.9\n[svm]\nkernel = linear\n[corpus]\nper_state = 12\n"
                           "[noise]\ngps = 0.25\n"));
    CHECK(c.experiment.pca.target_ratio == 0.9);
    CHECK(c.experiment.svm.linear);
    CHECK(c.experiment.corpus.per_state[4] == 12);
    CHECK(c.scenario.noise.gps == 0.25);
    CHECK(c.experiment.corpus.noise.gps == 0.25);
    CHECK_NOTHROW(validate_config(c));

    CHECK_KIND(apply_ini(c, parse_ini("[pca]\nbogus = 1\n")), ErrorKind::InvalidArgument);
    CHECK_KIND(apply_ini(c, parse_ini("[pca]\nratio = lots\n")), ErrorKind::InvalidArgument);
    CHECK_KIND(parse_ini("ratio = 1\n"), ErrorKind::InvalidArgument);
    PipelineConfig bad;
    apply_ini(bad, parse_ini("[mlp]\nlr = -1\n"));
    CHECK_KIND(validate_config(bad), ErrorKind::InvalidArgument);
}

TEST_CASE("config: dump reloads to the same values") {
    PipelineConfig c;
    apply_ini(c, parse_ini("[run]\nseed = 99\n[adams]\nh = 0.05\n[simulate]\nturn_angle_deg = 75\n"));
    PipelineConfig d;
    apply_ini(d, parse_ini(dump_config(c)));
    CHECK(dump_config(d) == dump_config(c));
    CHECK(d.experiment.seed == 99);
    CHECK(d.experiment.adams.h == 0.05);
}

TEST_CASE("config: file from the environment") {
    const auto path = scratch("env.ini");
    io::write_text(path, "[mlp]\nepochs = 77\n");
    setenv("TRAJKIT_CONFIG", path.c_str(), 1);
    CHECK(load_config(std::nullopt).experiment.mlp.epochs == 77);
    unsetenv("TRAJKIT_CONFIG");
    CHECK(load_config(std::nullopt).experiment.mlp.epochs == 5000);
}

TEST_CASE("plot: panels and svg") {
    RecognitionComparison cmp;
    for (std::size_t i = 0; i < 5; ++i) {
        cmp.adams_with.per_state[i] = {10, 1.0 + static_cast<double>(i)};
        cmp.adams_without.per_state[i] = {10, 2.0 + static_cast<double>(i)};
        cmp.mlp_with.per_state[i] = {10, 3.0};
        cmp.mlp_without.per_state[i] = {10, 4.0};
    }
    cmp.adams_with.overall = {50, 3.0};
    cmp.adams_without.overall = {50, 4.0};
    cmp.mlp_with.overall = {50, 3.0};
    cmp.mlp_without.overall = {50, 4.0};
    const auto panels = error_panels(io::to_json(cmp));
    REQUIRE(panels.size() == 2);
    CHECK(panels[0].groups.size() == 6);
    CHECK(panels[0].groups[1].with == 2.0);
    CHECK(panels[1].groups[5].without == 4.0);
    const auto svg = grouped_bar_svg(panels, "t");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(bar_series_csv(panels).rfind("method,group,with,without\n", 0) == 0);
}
