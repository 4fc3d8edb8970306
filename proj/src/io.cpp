#include "trajkit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace trajkit::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

Json read_json(const fs::path& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::IoError, path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Generic CSV

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int Table::require_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw Error(ErrorKind::IoError, "missing column '" + name + "'");
    return c;
}

double Table::number(std::size_t row, int col) const {
    const auto& cell = rows.at(row).at(static_cast<std::size_t>(col));
    if (cell == "nan" || cell == "NaN") return std::nan("");
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw Error(ErrorKind::IoError, "row " + std::to_string(row + 1) + ", column '" +
                                            header[static_cast<std::size_t>(col)] + "': not a number: '" + cell + "'");
    return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

} // namespace

Table parse_csv(const std::string& text, const std::string& source) {
    Table t;
    std::istringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(ErrorKind::IoError, source + ":" + std::to_string(lineno) + ": expected " +
                                                std::to_string(t.header.size()) + " cells, found " +
                                                std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw Error(ErrorKind::IoError, source + ": no header row");
    return t;
}

Table read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

// ---------------------------------------------------------------------------
// Streams

std::string raw_csv(std::span<const RawSample> samples) {
    std::string out = "t";
    for (int c = 0; c < kNumChannels; ++c) out += "," + std::string(channel_name(static_cast<Channel>(c)));
    out += '\n';
    for (const auto& s : samples) {
        out += format_double(s.t);
        for (int c = 0; c < kNumChannels; ++c) out += "," + format_double(channel_value(s, static_cast<Channel>(c)));
        out += '\n';
    }
    return out;
}

RawStream parse_raw(const Table& table) {
    const int tc = table.require_column("t");
    std::array<int, kNumChannels> cols{};
    for (int c = 0; c < kNumChannels; ++c) cols[static_cast<std::size_t>(c)] = table.require_column(std::string(channel_name(static_cast<Channel>(c))));
    RawStream stream;
    stream.samples.resize(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        auto& s = stream.samples[r];
        s.t = table.number(r, tc);
        for (int c = 0; c < kNumChannels; ++c)
            channel_ref(s, static_cast<Channel>(c)) = table.number(r, cols[static_cast<std::size_t>(c)]);
    }
    if (stream.samples.size() >= 2) stream.period = stream.samples[1].t - stream.samples[0].t;
    return stream;
}

RawStream read_raw(const fs::path& path) {
    try {
        return parse_raw(read_csv(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::IoError) throw Error(ErrorKind::IoError, path.string() + ": " + e.what());
        throw;
    }
}

std::string repair_log_csv(std::span<const RepairEntry> log) {
    std::string out = "index,channel,action\n";
    for (const auto& e : log)
        out += std::to_string(e.index) + "," + std::string(channel_name(e.channel)) + "," +
               std::string(action_name(e.action)) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Frames

namespace {

constexpr std::array<const char*, 16> kFrameColumns{"t",   "x",   "y",   "z",  "vx", "vy", "vz",    "thx",
                                                    "thy", "thz", "ax",  "ay", "az", "k",  "speed", "acc"};

std::string frame_row(const FlightFrame& f) {
    std::string out = format_double(f.t);
    const auto c = frame_channels(f);
    for (int i = 0; i < kFeatureChannels; ++i) out += "," + format_double(c(i));
    return out;
}

} // namespace

std::string frames_csv(std::span<const FlightFrame> frames) {
    std::string out = join({kFrameColumns.begin(), kFrameColumns.end()}) + "\n";
    for (const auto& f : frames) out += frame_row(f) + "\n";
    return out;
}

std::string frames_csv(std::span<const StreamFrames> streams) {
    std::string out = "stream," + join({kFrameColumns.begin(), kFrameColumns.end()}) + "\n";
    for (const auto& s : streams)
        for (const auto& f : s.frames) out += s.stream + "," + frame_row(f) + "\n";
    return out;
}

std::vector<StreamFrames> parse_frames(const Table& table) {
    std::array<int, 16> cols{};
    for (std::size_t i = 0; i < kFrameColumns.size(); ++i) cols[i] = table.require_column(kFrameColumns[i]);
    const int sc = table.column("stream");
    std::vector<StreamFrames> out;
    std::unordered_map<std::string, std::size_t> where;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string key = sc >= 0 ? table.rows[r][static_cast<std::size_t>(sc)] : std::string();
        auto it = where.find(key);
        if (it == where.end()) {
            it = where.emplace(key, out.size()).first;
            out.push_back({key, {}});
        }
        double v[16];
        for (std::size_t i = 0; i < 16; ++i) v[i] = table.number(r, cols[i]);
        FlightFrame f;
        f.t = v[0];
        f.pos = Vec3(v[1], v[2], v[3]);
        f.vel = Vec3(v[4], v[5], v[6]);
        f.attitude = Vec3(v[7], v[8], v[9]);
        f.acc = Vec3(v[10], v[11], v[12]);
        f.curvature = v[13];
        f.speed_mag = v[14];
        f.acc_mag = v[15];
        out[it->second].frames.push_back(f);
    }
    return out;
}

std::vector<StreamFrames> read_frames(const fs::path& path) { return parse_frames(read_csv(path)); }

// ---------------------------------------------------------------------------
// Features

std::string features_csv(const LabeledFeatures& features) {
    bool has_label = false, has_stream = false;
    for (const auto& r : features.rows) has_label |= r.label.has_value();
    for (const auto& s : features.streams) has_stream |= !s.empty();
    std::vector<std::string> head{"window_start"};
    if (has_stream) head.push_back("stream");
    if (has_label) head.push_back("label");
    for (const auto& n : feature_names()) head.push_back(n);
    std::string out = join(head) + "\n";
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        const auto& r = features.rows[i];
        out += std::to_string(r.window_start);
        if (has_stream) out += "," + (i < features.streams.size() ? features.streams[i] : std::string());
        if (has_label) out += "," + (r.label ? std::string(state_name(*r.label)) : std::string());
        for (int k = 0; k < kFeatureCount; ++k) out += "," + format_double(r.values(k));
        out += "\n";
    }
    return out;
}

LabeledFeatures read_features(const fs::path& path) {
    const auto table = read_csv(path);
    const auto& names = feature_names();
    std::vector<int> cols;
    for (const auto& n : names) cols.push_back(table.require_column(n));
    const int wc = table.column("window_start");
    const int lc = table.column("label");
    const int sc = table.column("stream");
    LabeledFeatures out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        FeatureVector fv;
        for (int k = 0; k < kFeatureCount; ++k) fv.values(k) = table.number(r, cols[static_cast<std::size_t>(k)]);
        if (wc >= 0) fv.window_start = static_cast<std::size_t>(table.number(r, wc));
        if (lc >= 0) {
            const auto& cell = table.rows[r][static_cast<std::size_t>(lc)];
            if (!cell.empty()) {
                fv.label = parse_state(cell);
                if (!fv.label) throw Error(ErrorKind::IoError, path.string() + ": unknown state '" + cell + "'");
            }
        }
        out.rows.push_back(fv);
        out.streams.push_back(sc >= 0 ? table.rows[r][static_cast<std::size_t>(sc)] : std::string());
    }
    return out;
}

MatrixX feature_matrix(const LabeledFeatures& features) {
    MatrixX x(static_cast<Eigen::Index>(features.rows.size()), kFeatureCount);
    for (std::size_t i = 0; i < features.rows.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = features.rows[i].values.transpose();
    return x;
}

std::vector<FlightState> feature_labels(const LabeledFeatures& features) {
    std::vector<FlightState> out;
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        if (!features.rows[i].label)
            throw Error(ErrorKind::InvalidData, "feature row " + std::to_string(i + 1) + " has no label");
        out.push_back(*features.rows[i].label);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Predictions

std::string prediction_csv(const TrajectoryPrediction& pred) {
    std::string out = "t,x,y,z,r\n";
    for (std::size_t i = 0; i < pred.points.size(); ++i) {
        const auto& p = pred.points[i];
        const double r = i < pred.radii.size() ? pred.radii[i] : std::nan("");
        out += format_double(p.t) + "," + format_double(p.pos.x()) + "," + format_double(p.pos.y()) + "," +
               format_double(p.pos.z()) + "," + format_double(r) + "\n";
    }
    return out;
}

std::string curves_csv(const TrajectoryPrediction& pred) {
    std::string out = "t,point_index,cx,cy,cz\n";
    for (std::size_t i = 0; i < pred.curves.size() && i < pred.points.size(); ++i) {
        const auto& c = pred.curves[i];
        for (std::size_t k = 0; k < c.sample_points.size(); ++k) {
            const auto& q = c.sample_points[k];
            out += format_double(pred.points[i].t) + "," + std::to_string(k) + "," + format_double(q.x()) + "," +
                   format_double(q.y()) + "," + format_double(q.z()) + "\n";
        }
    }
    return out;
}

std::vector<TrajectoryPoint> read_prediction(const fs::path& path) {
    const auto table = read_csv(path);
    const int tc = table.require_column("t"), xc = table.require_column("x"), yc = table.require_column("y"),
              zc = table.require_column("z");
    std::vector<TrajectoryPoint> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        out.push_back({table.number(r, tc), Vec3(table.number(r, xc), table.number(r, yc), table.number(r, zc))});
    return out;
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

Json vec_json(const VectorX& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// Row-major flattening, with the shape stored alongside.
Json mat_json(const MatrixX& m) {
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    j["data"] = data;
    return j;
}

// Reads numbers leniently: JSON null stands for NaN.
double num(const Json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

VectorX vec_from(const Json& j) {
    VectorX v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = num(j[i]);
    return v;
}

MatrixX mat_from(const Json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw Error(ErrorKind::IoError, "matrix data does not match its shape");
    MatrixX m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = num(data[static_cast<std::size_t>(r * cols + c)]);
    return m;
}

FlightState state_from(const Json& j) {
    const auto s = parse_state(j.get<std::string>());
    if (!s) throw Error(ErrorKind::IoError, "unknown state " + j.dump());
    return *s;
}

template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::IoError, std::string("malformed ") + what + " JSON: " + e.what());
    }
}

} // namespace

Json to_json(const PcaModel& m) {
    Json j;
    j["kind"] = "pca";
    j["n"] = m.input_dim();
    j["k"] = m.output_dim();
    j["retained_ratio"] = m.retained_ratio;
    j["mean"] = vec_json(m.mean);
    j["scale"] = vec_json(m.scale);
    j["eigenvalues"] = vec_json(m.eigenvalues);
    j["all_eigenvalues"] = vec_json(m.all_eigenvalues);
    j["components"] = mat_json(m.components);
    return j;
}

PcaModel pca_from_json(const Json& j) {
    return guarded("pca", [&] {
        PcaModel m;
        m.mean = vec_from(j.at("mean"));
        m.scale = vec_from(j.at("scale"));
        m.eigenvalues = vec_from(j.at("eigenvalues"));
        m.all_eigenvalues = vec_from(j.at("all_eigenvalues"));
        m.components = mat_from(j.at("components"));
        m.retained_ratio = j.at("retained_ratio").get<double>();
        if (m.components.cols() != m.mean.size()) throw Error(ErrorKind::IoError, "pca components do not match mean");
        return m;
    });
}

Json to_json(const DagSvmModel& m) {
    Json j;
    j["kind"] = "dagsvm";
    Json order = Json::array();
    for (auto s : m.order) order.push_back(state_name(s));
    j["order"] = order;
    j["pca_ref"] = m.pca_ref;
    Json cls = Json::array();
    for (const auto& c : m.classifiers) {
        Json b;
        b["positive"] = state_name(c.positive);
        b["negative"] = state_name(c.negative);
        b["kernel"] = c.kernel.type == Kernel::Type::Linear ? "linear" : "rbf";
        b["gamma"] = c.kernel.gamma;
        b["bias"] = c.bias;
        b["coef"] = vec_json(c.coef);
        b["support_vectors"] = mat_json(c.support_vectors);
        cls.push_back(b);
    }
    j["classifiers"] = cls;
    return j;
}

DagSvmModel dagsvm_from_json(const Json& j) {
    return guarded("svm", [&] {
        DagSvmModel m;
        const auto& order = j.at("order");
        if (order.size() != kNumStates) throw Error(ErrorKind::IoError, "svm order must list 5 states");
        for (std::size_t i = 0; i < kNumStates; ++i) m.order[i] = state_from(order[i]);
        m.pca_ref = j.value("pca_ref", std::string());
        const auto& cls = j.at("classifiers");
        if (cls.size() != kNumPairs) throw Error(ErrorKind::IoError, "svm needs 10 pairwise classifiers");
        for (const auto& b : cls) {
            BinarySvm c;
            c.positive = state_from(b.at("positive"));
            c.negative = state_from(b.at("negative"));
            c.kernel = b.at("kernel").get<std::string>() == "linear" ? Kernel::linear()
                                                                     : Kernel::rbf(b.at("gamma").get<double>());
            c.bias = b.at("bias").get<double>();
            c.coef = vec_from(b.at("coef"));
            c.support_vectors = mat_from(b.at("support_vectors"));
            m.classifiers[static_cast<std::size_t>(pair_index(c.positive, c.negative))] = c;
        }
        return m;
    });
}

Json to_json(const QuadVelocityModel& m) {
    Json j;
    j["residual_rms"] = m.residual_rms;
    Json axes = Json::array();
    for (const auto& a : m.axes) {
        Json x;
        x["coef"] = vec_json(a.coef);
        x["residual_rms"] = a.residual_rms;
        x["ridge"] = a.ridge;
        x["n"] = a.stats.n;
        x["mean"] = a.stats.mean;
        x["spread"] = a.stats.spread;
        x["variance"] = a.stats.variance;
        axes.push_back(x);
    }
    j["axes"] = axes;
    return j;
}

QuadVelocityModel quad_from_json(const Json& j) {
    return guarded("adams", [&] {
        QuadVelocityModel m;
        m.residual_rms = j.at("residual_rms").get<double>();
        const auto& axes = j.at("axes");
        if (axes.size() != 3) throw Error(ErrorKind::IoError, "adams model needs 3 axes");
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& x = axes[i];
            auto& a = m.axes[i];
            const VectorX c = vec_from(x.at("coef"));
            if (c.size() != 6) throw Error(ErrorKind::IoError, "adams axis needs 6 coefficients");
            a.coef = c;
            a.residual_rms = x.at("residual_rms").get<double>();
            a.ridge = x.value("ridge", 0.0);
            a.stats.n = x.at("n").get<long>();
            a.stats.mean = x.at("mean").get<double>();
            a.stats.spread = x.at("spread").get<double>();
            a.stats.variance = x.at("variance").get<double>();
        }
        return m;
    });
}

Json to_json(const MlpModel& m) {
    Json j;
    j["layers"] = {m.inputs(), m.hidden(), m.outputs()};
    j["activation"] = "relu";
    j["w1"] = mat_json(m.w1);
    j["b1"] = vec_json(m.b1);
    j["w2"] = mat_json(m.w2);
    j["b2"] = vec_json(m.b2);
    j["input_norm"] = {{"mean", vec_json(m.input_norm.mean)}, {"scale", vec_json(m.input_norm.scale)}};
    j["output_norm"] = {{"mean", vec_json(m.output_norm.mean)}, {"scale", vec_json(m.output_norm.scale)}};
    j["seed"] = m.seed;
    j["final_loss"] = m.final_loss;
    j["dt"] = m.dt;
    return j;
}

MlpModel mlp_from_json(const Json& j) {
    return guarded("mlp", [&] {
        MlpModel m;
        m.w1 = mat_from(j.at("w1"));
        m.b1 = vec_from(j.at("b1"));
        m.w2 = mat_from(j.at("w2"));
        m.b2 = vec_from(j.at("b2"));
        m.input_norm = {vec_from(j.at("input_norm").at("mean")), vec_from(j.at("input_norm").at("scale"))};
        m.output_norm = {vec_from(j.at("output_norm").at("mean")), vec_from(j.at("output_norm").at("scale"))};
        m.seed = j.value("seed", std::uint64_t{0});
        m.final_loss = j.value("final_loss", 0.0);
        m.dt = j.value("dt", 0.1);
        if (m.b1.size() != m.w1.rows() || m.w2.cols() != m.w1.rows() || m.b2.size() != m.w2.rows() ||
            m.input_norm.mean.size() != m.w1.cols() || m.output_norm.mean.size() != m.w2.rows())
            throw Error(ErrorKind::IoError, "mlp layer shapes are inconsistent");
        return m;
    });
}

Json to_json(const AdamsModelSet& set) {
    return model_set_json(set, "adams", [](const QuadVelocityModel& m) { return to_json(m); });
}

Json to_json(const MlpModelSet& set) {
    return model_set_json(set, "mlp", [](const MlpModel& m) { return to_json(m); });
}

namespace {

template <typename Model, typename FromJson>
StateModels<Model> model_set_from(const Json& j, const char* kind, FromJson from) {
    return guarded(kind, [&] {
        if (j.value("kind", std::string()) != kind)
            throw Error(ErrorKind::IoError, std::string("expected a ") + kind + " model set");
        StateModels<Model> set;
        const auto& states = j.at("states");
        for (auto s : kAllStates) {
            const auto key = std::string(state_name(s));
            if (states.contains(key) && !states[key].is_null())
                set.per_state[static_cast<std::size_t>(index_of(s))] = from(states[key]);
        }
        if (j.contains("global") && !j["global"].is_null()) set.global = from(j["global"]);
        return set;
    });
}

} // namespace

AdamsModelSet adams_set_from_json(const Json& j) { return model_set_from<QuadVelocityModel>(j, "adams", quad_from_json); }

MlpModelSet mlp_set_from_json(const Json& j) { return model_set_from<MlpModel>(j, "mlp", mlp_from_json); }

Json to_json(const ClassificationReport& r) {
    Json j;
    j["total"] = r.total;
    j["accuracy"] = r.accuracy;
    Json per = Json::object();
    for (auto s : kAllStates) {
        const auto i = static_cast<std::size_t>(index_of(s));
        per[std::string(state_name(s))] = {{"precision", r.precision[i]}, {"recall", r.recall[i]}, {"f1", r.f1[i]}};
    }
    j["per_state"] = per;
    Json conf = Json::array();
    for (int a = 0; a < kNumStates; ++a) {
        Json row = Json::array();
        for (int b = 0; b < kNumStates; ++b) row.push_back(r.confusion.counts(a, b));
        conf.push_back(row);
    }
    j["confusion"] = conf;  // rows: true state, columns: predicted
    return j;
}

Json to_json(const ErrorReport& r) {
    Json j;
    j["mu"] = r.mu;
    j["n"] = r.distances.size();
    j["distances"] = r.distances;
    return j;
}

Json to_json(const MethodErrors& e) {
    Json j;
    j["overall"] = {{"mu", e.overall.mu}, {"points", e.overall.points}};
    Json per = Json::object();
    for (auto s : kAllStates) {
        const auto& p = e.per_state[static_cast<std::size_t>(index_of(s))];
        per[std::string(state_name(s))] = {{"mu", p.mu}, {"points", p.points}};
    }
    j["per_state"] = per;
    return j;
}

Json to_json(const RecognitionComparison& c) {
    Json j;
    for (auto m : {PredictionMethod::Adams, PredictionMethod::Mlp}) {
        const auto& with = c.get(m, true);
        const auto& without = c.get(m, false);
        j[std::string(method_name(m))] = {{"with_recognition", to_json(with)},
                                         {"without_recognition", to_json(without)},
                                         {"relative_gain", relative_gain(with, without)}};
    }
    return j;
}

} // namespace trajkit::io
