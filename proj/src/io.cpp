#include "liftid/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace liftid::io {

namespace fs = std::filesystem;
using nlohmann::json;
using numerics::Matrix;
using numerics::Vector;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_text_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UserError("cannot open for writing: " + path.string());
    }
    out << contents;
    if (!out) {
        throw UserError("write failed: " + path.string());
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UserError("cannot open: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
    traj.validate();
    std::string out;
    out += "t";
    for (int i = 0; i < traj.l(); ++i) out += ",x" + std::to_string(i);
    for (int i = 0; i < traj.n(); ++i) out += ",u" + std::to_string(i);
    for (int i = 0; i < traj.z(); ++i) out += ",zeta" + std::to_string(i);
    out += "\n";
    for (int t = 0; t < traj.samples(); ++t) {
        out += format_double(t * traj.dt);
        for (int i = 0; i < traj.l(); ++i) out += "," + format_double(traj.states(t, i));
        for (int i = 0; i < traj.n(); ++i) out += "," + format_double(traj.inputs(t, i));
        for (int i = 0; i < traj.z(); ++i) out += "," + format_double(traj.observables(t, i));
        out += "\n";
    }
    write_text_file(path, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_double(const std::string& text, const fs::path& path, int line_no) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw UserError(path.string() + ":" + std::to_string(line_no) +
                        ": cannot parse number '" + text + "'");
    }
    return value;
}

// Counts consecutive header columns named <prefix>0, <prefix>1, ...
int count_prefixed(const std::vector<std::string>& header, std::size_t& at,
                   const std::string& prefix) {
    int count = 0;
    while (at < header.size() && header[at] == prefix + std::to_string(count)) {
        ++count;
        ++at;
    }
    return count;
}

}  // namespace

Trajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UserError("cannot open: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw UserError(path.string() + ":1: empty file");
    }
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "t") {
        throw UserError(path.string() + ":1: header must start with 't'");
    }
    std::size_t at = 1;
    const int l = count_prefixed(header, at, "x");
    const int n = count_prefixed(header, at, "u");
    const int z = count_prefixed(header, at, "zeta");
    if (l < 1 || n < 1 || at != header.size()) {
        throw UserError(path.string() + ":1: header must be t,x0..,u0..[,zeta0..]");
    }

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 1 + l + n + z) {
            throw UserError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(1 + l + n + z) + " columns, found " +
                            std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& field : fields) {
            row.push_back(parse_double(field, path, line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) {
        throw UserError(path.string() + ": needs at least two samples");
    }

    Trajectory traj;
    traj.dt = rows[1][0] - rows[0][0];
    if (!(traj.dt > 0.0)) {
        throw UserError(path.string() + ": time column must be strictly increasing");
    }
    const auto count = static_cast<int>(rows.size());
    traj.states.resize(count, l);
    traj.inputs.resize(count, n);
    traj.observables.resize(count, z);
    for (int t = 0; t < count; ++t) {
        const double expected = rows[0][0] + t * traj.dt;
        if (std::abs(rows[t][0] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw UserError(path.string() + ":" + std::to_string(t + 2) +
                            ": non-uniform sample time");
        }
        for (int i = 0; i < l; ++i) traj.states(t, i) = rows[t][1 + i];
        for (int i = 0; i < n; ++i) traj.inputs(t, i) = rows[t][1 + l + i];
        for (int i = 0; i < z; ++i) traj.observables(t, i) = rows[t][1 + l + n + i];
    }
    traj.validate();
    return traj;
}

namespace {

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from_json(const json& j) {
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i];
    return v;
}

json matrix_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw UserError("matrix JSON: data length does not match rows*cols");
    }
    Matrix m(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[at++];
    }
    return m;
}

void check_version(const json& j, const fs::path& path) {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != kFormatVersion) {
        throw UserError(path.string() + ": unknown format_version; expected " +
                        std::to_string(kFormatVersion));
    }
}

std::string trajectory_file_name(int index) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "traj_%03d.csv", index);
    return buffer;
}

}  // namespace

std::vector<std::string> save_dataset(const fs::path& dir, const Dataset& ds,
                                      std::uint64_t seed) {
    ds.validate();
    fs::create_directories(dir);
    std::vector<std::string> files;
    json traj_list = json::array();
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        const std::string name = trajectory_file_name(static_cast<int>(i));
        write_trajectory_csv(dir / name, ds.trajectories[i]);
        files.push_back(name);
        traj_list.push_back({{"file", name}, {"split", lifting::to_string(ds.split[i])}});
    }
    json manifest{
        {"format_version", kFormatVersion},
        {"kind", "dataset"},
        {"dims", {{"l", ds.l()}, {"n", ds.n()}, {"z", ds.z()}}},
        {"dt", ds.dt()},
        {"seed", seed},
        {"trajectories", std::move(traj_list)},
        {"centering",
         {{"mean_x", vector_json(ds.centering.mean_x)},
          {"mean_u", vector_json(ds.centering.mean_u)},
          {"mean_zeta", vector_json(ds.centering.mean_zeta)}}},
    };
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return files;
}

Dataset load_dataset(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        throw UserError(manifest_path.string() + ": " + e.what());
    }
    check_version(manifest, manifest_path);

    Dataset ds;
    for (const auto& entry : manifest.at("trajectories")) {
        ds.trajectories.push_back(read_trajectory_csv(dir / entry.at("file").get<std::string>()));
        const auto tag = entry.at("split").get<std::string>();
        if (tag != "train" && tag != "validation") {
            throw UserError(manifest_path.string() + ": unknown split tag '" + tag + "'");
        }
        ds.split.push_back(tag == "train" ? lifting::Split::Train
                                          : lifting::Split::Validation);
    }
    const auto& centering = manifest.at("centering");
    ds.centering.mean_x = vector_from_json(centering.at("mean_x"));
    ds.centering.mean_u = vector_from_json(centering.at("mean_u"));
    ds.centering.mean_zeta = vector_from_json(centering.at("mean_zeta"));

    ds.validate();
    const auto& dims = manifest.at("dims");
    if (ds.l() != dims.at("l").get<int>() || ds.n() != dims.at("n").get<int>() ||
        ds.z() != dims.at("z").get<int>()) {
        throw UserError(manifest_path.string() + ": dims disagree with trajectory files");
    }
    return ds;
}

void save_bundle(const fs::path& path, const eval::ModelBundle& bundle,
                 const BundleExtras& extras) {
    bundle.linear.validate();
    json j{
        {"format_version", kFormatVersion},
        {"kind", "model"},
        {"method", bundle.method},
        {"dims",
         {{"l", bundle.linear.dims.l},
          {"z", bundle.linear.dims.z},
          {"m", bundle.linear.dims.m},
          {"n", bundle.linear.dims.n}}},
        {"p", bundle.linear.dims.p()},
        {"lifted_dim", bundle.lifted_dim},
        {"folded", bundle.linear.folded},
        {"A", matrix_json(bundle.linear.A)},
        {"H", matrix_json(bundle.linear.H)},
    };
    if (bundle.filter) {
        j["filter"] = {{"D", matrix_json(bundle.filter->D)},
                       {"mean_zeta", vector_json(bundle.filter->mean_zeta)},
                       {"mean_u", vector_json(bundle.filter->mean_u)}};
    }
    if (bundle.basis) {
        j["basis"] = {{"dim", bundle.basis->dim()}, {"exponents", bundle.basis->exponents()}};
    }
    if (bundle.net) {
        bundle.net->validate();
        json weights = json::array();
        json biases = json::array();
        for (std::size_t i = 0; i < bundle.net->weights.size(); ++i) {
            weights.push_back(matrix_json(bundle.net->weights[i]));
            biases.push_back(vector_json(bundle.net->biases[i]));
        }
        j["net"] = {{"layer_sizes", bundle.net->layer_sizes},
                    {"weights", std::move(weights)},
                    {"biases", std::move(biases)}};
    }
    if (!extras.config_echo.is_null()) {
        j["config"] = extras.config_echo;
    }
    if (!extras.history.empty()) {
        json history = json::array();
        for (const auto& row : extras.history) {
            history.push_back({{"train_loss", row.train_loss}, {"val_loss", row.val_loss}});
        }
        j["history"] = std::move(history);
    }
    write_text_file(path, j.dump(2) + "\n");
}

eval::ModelBundle load_bundle(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw UserError(path.string() + ": " + e.what());
    }
    check_version(j, path);
    if (!j.contains("kind") || j.at("kind").get<std::string>() != "model") {
        throw UserError(path.string() + ": not a model file");
    }

    eval::ModelBundle bundle;
    bundle.method = j.at("method").get<std::string>();
    const auto& dims = j.at("dims");
    bundle.linear.dims = lifting::Dims{dims.at("l").get<int>(), dims.at("z").get<int>(),
                                       dims.at("m").get<int>(), dims.at("n").get<int>()};
    bundle.linear.A = matrix_from_json(j.at("A"));
    bundle.linear.H = matrix_from_json(j.at("H"));
    bundle.linear.folded = j.at("folded").get<bool>();
    bundle.lifted_dim = j.at("lifted_dim").get<int>();
    if (j.contains("filter")) {
        causality::AnticausalFilter filter;
        filter.D = matrix_from_json(j.at("filter").at("D"));
        filter.mean_zeta = vector_from_json(j.at("filter").at("mean_zeta"));
        filter.mean_u = vector_from_json(j.at("filter").at("mean_u"));
        bundle.filter = std::move(filter);
    }
    if (j.contains("basis")) {
        bundle.basis = lifting::PolyBasis(
            j.at("basis").at("dim").get<int>(),
            j.at("basis").at("exponents").get<std::vector<std::vector<int>>>());
    }
    if (j.contains("net")) {
        neural::Mlp net;
        net.layer_sizes = j.at("net").at("layer_sizes").get<std::vector<int>>();
        for (const auto& w : j.at("net").at("weights")) {
            net.weights.push_back(matrix_from_json(w));
        }
        for (const auto& b : j.at("net").at("biases")) {
            net.biases.push_back(vector_from_json(b));
        }
        net.validate();
        bundle.net = std::move(net);
    }
    bundle.linear.validate();
    return bundle;
}

void write_report_csv(const fs::path& path, const eval::CompareReport& report) {
    std::string out = "model,lifted_dim,ise\n";
    for (const auto& row : report.rows) {
        out += row.model + "," + std::to_string(row.lifted_dim) + "," +
               format_double(row.ise) + "\n";
    }
    write_text_file(path, out);
}

void write_errors_csv(const fs::path& path, const eval::CompareReport& report) {
    const auto l = report.truth_states.cols();
    std::string out = "model,step,t";
    for (Eigen::Index i = 0; i < l; ++i) out += ",err_x" + std::to_string(i);
    out += ",err_norm\n";
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        if (report.rows[k].diverged) continue;
        const auto& states = report.rollouts[k].states;
        for (Eigen::Index t = 0; t < states.rows(); ++t) {
            out += report.rows[k].model + "," + std::to_string(t) + "," +
                   format_double(t * report.dt);
            double norm_sq = 0.0;
            for (Eigen::Index i = 0; i < l; ++i) {
                const double err = states(t, i) - report.truth_states(t, i);
                norm_sq += err * err;
                out += "," + format_double(err);
            }
            out += "," + format_double(std::sqrt(norm_sq)) + "\n";
        }
    }
    write_text_file(path, out);
}

json report_json(const eval::CompareReport& report) {
    json models = json::array();
    for (const auto& row : report.rows) {
        models.push_back({{"model", row.model},
                          {"lifted_dim", row.lifted_dim},
                          {"ise", row.diverged ? json() : json(row.ise)},
                          {"diverged", row.diverged}});
    }
    return json{{"dt", report.dt}, {"models", std::move(models)}};
}

std::string format_report_table(const eval::CompareReport& report) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %10s %12s\n", "model", "dim", "ise");
    out += line;
    for (const auto& row : report.rows) {
        if (row.diverged) {
            std::snprintf(line, sizeof(line), "%-10s %10d %12s\n", row.model.c_str(),
                          row.lifted_dim, "diverged");
        } else {
            std::snprintf(line, sizeof(line), "%-10s %10d %12.4g\n", row.model.c_str(),
                          row.lifted_dim, row.ise);
        }
        out += line;
    }
    return out;
}

void write_history_csv(const fs::path& path, const std::vector<l3::EpochStats>& history) {
    std::string out = "epoch,train_loss,val_loss\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out += std::to_string(i) + "," + format_double(history[i].train_loss) + "," +
               format_double(history[i].val_loss) + "\n";
    }
    write_text_file(path, out);
}

}  // namespace liftid::io
