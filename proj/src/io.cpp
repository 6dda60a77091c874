/*
 * Copyright 2026 The cascal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "cascal/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cascal/errors.hpp"

namespace cascal {

namespace {

Json vector_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) {
        throw ParseError(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

Vector vector_from(const Json& j, const char* key) {
    const Json& arr = field(j, key);
    if (!arr.is_array()) {
        throw ParseError(std::string("field '") + key + "' must be an array");
    }
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            throw ParseError(std::string("field '") + key + "' must contain only numbers");
        }
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

Matrix matrix_from(const Json& j, const char* key, Eigen::Index n) {
    const Json& rows = field(j, key);
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
        throw ParseError(std::string("field '") + key + "' must have " + std::to_string(n) +
                         " rows");
    }
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ParseError(std::string("field '") + key + "' must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) {
                throw ParseError(std::string("field '") + key + "' must contain only numbers");
            }
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

std::string string_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) {
        throw ParseError(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    if (text == "nan" || text == "NaN") {
        out = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, const std::filesystem::path& path) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw ParseError(path.string() + ": header has no column '" + name + "'");
    }
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            // Tolerate a UTF-8 byte-order mark.
            if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            t.header = split(line);
            have_header = true;
            continue;
        }
        if (trim(line).empty()) continue;
        t.rows.push_back(split(line));
    }
    if (!have_header) {
        throw ParseError(path.string() + ": empty file, header row required");
    }
    return t;
}

double cell_number(const CsvTable& t, std::size_t row, std::size_t col,
                   const std::filesystem::path& path) {
    const auto& cells = t.rows[row];
    const std::string where = path.string() + ": row " + std::to_string(row + 1) + " (line " +
                              std::to_string(row + 2) + ")";
    if (cells.size() != t.header.size()) {
        throw ParseError(where + ": expected " + std::to_string(t.header.size()) +
                         " cells, found " + std::to_string(cells.size()));
    }
    double v = 0.0;
    if (!parse_double(cells[col], v) || !std::isfinite(v)) {
        throw ParseError(where + ": column '" + t.header[col] + "' is not a finite number: '" +
                         cells[col] + "'");
    }
    return v;
}

} // namespace

Json to_json(const Hyperparameters& hp) {
    return Json{{"length_scale", hp.length_scale},
                {"signal_variance", hp.signal_variance},
                {"noise_variance", hp.noise_variance}};
}

Hyperparameters hyperparameters_from_json(const Json& j) {
    Hyperparameters hp{number(j, "length_scale"), number(j, "signal_variance"),
                       number(j, "noise_variance")};
    try {
        hp.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("hyperparameters: ") + e.what());
    }
    return hp;
}

Json to_json(const PriorMean& m) {
    Json j{{"kind", to_string(m.kind)}};
    if (m.kind == PriorMean::Kind::Affine) {
        j["slope"] = m.slope;
        j["intercept"] = m.intercept;
    }
    return j;
}

PriorMean prior_mean_from_json(const Json& j) {
    PriorMean::Kind kind;
    try {
        kind = prior_mean_kind_from_string(string_field(j, "kind"));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    switch (kind) {
    case PriorMean::Kind::Identity:
        return PriorMean::identity();
    case PriorMean::Kind::Zero:
        return PriorMean::zero();
    case PriorMean::Kind::Affine:
        return PriorMean::affine(number(j, "slope"), number(j, "intercept"));
    }
    return PriorMean::identity();
}

Json to_json(const GPPosterior& p) {
    return Json{{"hyperparameters", to_json(p.hp)},
                {"prior_mean", to_json(p.mean)},
                {"train_inputs", vector_json(p.train_inputs)},
                {"train_targets", vector_json(p.train_targets)},
                {"target_cov", matrix_json(p.target_cov)}};
}

GPPosterior posterior_from_json(const Json& j) {
    TrainingSet ts;
    ts.inputs = vector_from(j, "train_inputs");
    ts.targets = vector_from(j, "train_targets");
    ts.target_cov = matrix_from(j, "target_cov", ts.inputs.size());
    try {
        return fit(ts, hyperparameters_from_json(field(j, "hyperparameters")),
                   prior_mean_from_json(field(j, "prior_mean")));
    } catch (const ParseError&) {
        throw;
    } catch (const NotPositiveDefinite&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("GP model: ") + e.what());
    }
}

Json to_json(const CascadeConfig& c) {
    return Json{{"stage_two_noise", c.stage_two_noise},
                {"stage_one_mean", to_json(c.stage_one_mean)},
                {"stage_two_mean", to_json(c.stage_two_mean)},
                {"max_iterations", c.optimizer.max_iterations},
                {"rel_tolerance", c.optimizer.rel_tolerance},
                {"start_offsets", c.optimizer.start_offsets},
                {"log_lower", c.optimizer.log_lower},
                {"log_upper", c.optimizer.log_upper}};
}

CascadeConfig cascade_config_from_json(const Json& j) {
    CascadeConfig c;
    const Json& flag = field(j, "stage_two_noise");
    if (!flag.is_boolean()) throw ParseError("field 'stage_two_noise' must be a boolean");
    c.stage_two_noise = flag.get<bool>();
    c.stage_one_mean = prior_mean_from_json(field(j, "stage_one_mean"));
    c.stage_two_mean = prior_mean_from_json(field(j, "stage_two_mean"));
    c.optimizer.max_iterations = static_cast<int>(number(j, "max_iterations"));
    c.optimizer.rel_tolerance = number(j, "rel_tolerance");
    const Vector offsets = vector_from(j, "start_offsets");
    c.optimizer.start_offsets.assign(offsets.data(), offsets.data() + offsets.size());
    c.optimizer.log_lower = number(j, "log_lower");
    c.optimizer.log_upper = number(j, "log_upper");
    return c;
}

Json to_json(const LookupTable& t) {
    return Json{{"breakpoints", vector_json(t.breakpoints)}, {"values", vector_json(t.values)}};
}

LookupTable lookup_table_from_json(const Json& j) {
    LookupTable t;
    t.breakpoints = vector_from(j, "breakpoints");
    t.values = vector_from(j, "values");
    try {
        t.validate();
    } catch (const DegenerateTable& e) {
        throw ParseError(e.what());
    }
    return t;
}

Json to_json(const SensorTruth& t) {
    return Json{{"sin_coeffs", vector_json(t.sin_coeffs)},
                {"cos_coeffs", vector_json(t.cos_coeffs)},
                {"freqs", vector_json(t.freqs)},
                {"noise_variance", t.noise_variance}};
}

SensorTruth sensor_truth_from_json(const Json& j) {
    SensorTruth t{vector_from(j, "sin_coeffs"), vector_from(j, "cos_coeffs"),
                  vector_from(j, "freqs"), number(j, "noise_variance")};
    try {
        t.validate();
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return t;
}

Json to_json(const TruthPair& p) {
    return Json{{"sensor1", to_json(p.sensor1)},
                {"sensor2", to_json(p.sensor2)},
                {"range", Json::array({p.range_min, p.range_max})},
                {"reference_noise_variance", p.reference_noise_variance}};
}

TruthPair truth_pair_from_json(const Json& j) {
    TruthPair p;
    p.sensor1 = sensor_truth_from_json(field(j, "sensor1"));
    p.sensor2 = sensor_truth_from_json(field(j, "sensor2"));
    if (j.contains("range")) {
        const Vector r = vector_from(j, "range");
        if (r.size() != 2) throw ParseError("field 'range' must be [min, max]");
        p.range_min = r[0];
        p.range_max = r[1];
    }
    if (j.contains("reference_noise_variance")) {
        p.reference_noise_variance = number(j, "reference_noise_variance");
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return p;
}

Json to_json(const CampaignSummary& s) {
    Json per_method = Json::object();
    Json density = Json::object();
    Json cdf = Json::object();
    for (const auto& m : s.methods) {
        Json wins = Json::object();
        for (std::size_t k = 0; k < s.methods.size(); ++k) {
            if (s.methods[k].name != m.name) wins[s.methods[k].name] = m.win_rate[k];
        }
        per_method[m.name] = Json{{"count", m.count},
                                  {"median", m.median},
                                  {"mean", m.mean},
                                  {"quantiles",
                                   Json{{"q05", m.q05}, {"q25", m.q25}, {"q75", m.q75},
                                        {"q95", m.q95}}},
                                  {"win_rate", wins}};
        density[m.name] = m.density;
        cdf[m.name] = Json{{"x", m.cdf_x}, {"p", m.cdf_p}};
    }
    return Json{{"n_trials", s.n_trials},
                {"n_flagged", s.n_flagged},
                {"per_method", per_method},
                {"histogram", Json{{"bin_edges", s.bin_edges}, {"density", density}}},
                {"cdf", cdf}};
}

Json to_json(const CalibrationModel& m) {
    if (const auto* lut = std::get_if<LutCascade>(&m)) {
        return Json{{"method_tag", "lut"},
                    {"bed_to_reference", to_json(lut->bed_to_reference)},
                    {"unit_to_reference", to_json(lut->unit_to_reference)},
                    {"config",
                     Json{{"extrapolation", to_string(lut->unit_to_reference.extrapolation)}}}};
    }
    const auto& c = std::get<CascadeModel>(m);
    return Json{{"method_tag", to_string(c.method)},
                {"stage_one", to_json(c.stage_one)},
                {"stage_two", to_json(c.stage_two)},
                {"config", to_json(c.config)}};
}

CalibrationModel model_from_json(const Json& j) {
    const std::string tag = string_field(j, "method_tag");
    if (tag == "lut") {
        LutCascade lut;
        lut.bed_to_reference = lookup_table_from_json(field(j, "bed_to_reference"));
        lut.unit_to_reference = lookup_table_from_json(field(j, "unit_to_reference"));
        Extrapolation e;
        try {
            e = extrapolation_from_string(string_field(field(j, "config"), "extrapolation"));
        } catch (const InvalidArgument& err) {
            throw ParseError(err.what());
        }
        lut.bed_to_reference.extrapolation = e;
        lut.unit_to_reference.extrapolation = e;
        return lut;
    }
    CascadeModel c;
    try {
        c.method = cascade_method_from_string(tag);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    c.stage_one = posterior_from_json(field(j, "stage_one"));
    c.stage_two = posterior_from_json(field(j, "stage_two"));
    c.config = cascade_config_from_json(field(j, "config"));
    return c;
}

Vector model_apply(const CalibrationModel& m, const Vector& y1) {
    return std::visit([&](const auto& model) { return model.apply(y1); }, m);
}

std::string method_tag(const CalibrationModel& m) {
    if (const auto* c = std::get_if<CascadeModel>(&m)) return to_string(c->method);
    return "lut";
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

CalibrationDataset read_dataset_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t cx = t.column("x", path);
    const std::size_t cy = t.column("y", path);
    CalibrationDataset d;
    d.x.resize(static_cast<Eigen::Index>(t.rows.size()));
    d.y.resize(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        d.x[static_cast<Eigen::Index>(r)] = cell_number(t, r, cx, path);
        d.y[static_cast<Eigen::Index>(r)] = cell_number(t, r, cy, path);
    }
    return d;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_dataset_csv(const std::filesystem::path& path, const CalibrationDataset& d) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "x,y\n";
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        out << format_double(d.x[i]) << ',' << format_double(d.y[i]) << '\n';
    }
}

Vector read_column_csv(const std::filesystem::path& path, const std::string& column) {
    const CsvTable t = read_csv(path);
    const std::size_t c = t.column(column, path);
    Vector v(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        v[static_cast<Eigen::Index>(r)] = cell_number(t, r, c, path);
    }
    return v;
}

std::string trials_csv(const std::vector<TrialResult>& results) {
    std::string out = "seed,j_bayes,j_alt1,j_alt2,flag\n";
    for (const auto& r : results) {
        std::string flag = r.flagged() ? r.flag : "ok";
        std::replace(flag.begin(), flag.end(), ',', ';');
        std::replace(flag.begin(), flag.end(), '\n', ' ');
        out += std::to_string(r.seed) + ',' + format_double(r.j_bayes) + ',' +
               format_double(r.j_alt1) + ',' + format_double(r.j_alt2) + ',' + flag + '\n';
    }
    return out;
}

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << trials_csv(results);
}

std::vector<TrialResult> read_trials_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t cs = t.column("seed", path);
    const std::size_t cb = t.column("j_bayes", path);
    const std::size_t c1 = t.column("j_alt1", path);
    const std::size_t c2 = t.column("j_alt2", path);
    const std::size_t cf = t.column("flag", path);
    std::vector<TrialResult> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        TrialResult tr;
        const auto& cells = t.rows[r];
        if (cells.size() != t.header.size()) {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) + " (line " +
                             std::to_string(r + 2) + "): wrong number of cells");
        }
        const std::string& seed = cells[cs];
        const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), tr.seed);
        if (ec != std::errc() || ptr != seed.data() + seed.size()) {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) + " (line " +
                             std::to_string(r + 2) + "): bad seed '" + seed + "'");
        }
        tr.flag = cells[cf] == "ok" ? "" : cells[cf];
        if (tr.flagged()) {
            // Flagged trials carry no costs.
            tr.j_bayes = tr.j_alt1 = tr.j_alt2 = std::numeric_limits<double>::quiet_NaN();
        } else {
            tr.j_bayes = cell_number(t, r, cb, path);
            tr.j_alt1 = cell_number(t, r, c1, path);
            tr.j_alt2 = cell_number(t, r, c2, path);
        }
        out.push_back(std::move(tr));
    }
    return out;
}

} // namespace cascal
