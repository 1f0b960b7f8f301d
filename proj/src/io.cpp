#include "inlapf/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace inlapf {

std::string format_double(double v) {
    // Integer-valued cells (counts, indices, sizes) print as plain integers;
    // %g would render e.g. 10 as 1e+01, which defeats integer parsers.
    if (std::trunc(v) == v && std::fabs(v) < 1e15) {
        char ibuf[32];
        std::snprintf(ibuf, sizeof(ibuf), "%.0f", v);
        return ibuf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shortest form that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

std::size_t CsvTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw IoError("csv: no column named '" + name + "'");
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw IoError("csv: row width mismatch writing " + path);
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {
std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}
} // namespace

std::size_t TextTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw IoError("table: no column named '" + name + "'");
}

double TextTable::num(std::size_t row, std::size_t column) const {
    const std::string& cell = rows.at(row).at(column);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
        throw IoError("table: cell '" + cell + "' is not numeric");
    return v;
}

void write_table(const std::string& path, const TextTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    auto emit = [&](const std::string& cell) {
        if (cell.find_first_of(",\"\n\r") != std::string::npos)
            throw IoError("table: cell '" + cell + "' needs quoting; not supported");
        out << cell;
    };
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        emit(table.columns[i]);
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw IoError("table: row width mismatch writing " + path);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            emit(row[i]);
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

TextTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    TextTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + path);
    table.columns = split_commas(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> parts = split_commas(line);
        if (parts.size() != table.columns.size())
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.columns.size()) + " fields, got " +
                          std::to_string(parts.size()));
        table.rows.push_back(std::move(parts));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + path);
    table.columns = split_commas(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> parts = split_commas(line);
        if (parts.size() != table.columns.size())
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.columns.size()) + " fields, got " +
                          std::to_string(parts.size()));
        std::vector<double> row(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            char* end = nullptr;
            row[i] = std::strtod(parts[i].c_str(), &end);
            if (end == parts[i].c_str())
                throw IoError(path + ":" + std::to_string(lineno) + ": not a number: '" +
                              parts[i] + "'");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string dataset_meta_path(const std::string& csv_path) {
    const std::string suffix = ".csv";
    if (csv_path.size() > suffix.size() &&
        csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return csv_path.substr(0, csv_path.size() - suffix.size()) + ".meta.json";
    return csv_path + ".meta.json";
}

void write_dataset(const std::string& csv_path, const Dataset& data, const DatasetMeta& meta) {
    CsvTable table;
    table.columns = {"t", "y"};
    const bool with_truth = data.x_true.has_value();
    if (with_truth) table.columns.push_back("x_true");
    for (std::size_t t = 0; t < data.T; ++t) {
        std::vector<double> row = {static_cast<double>(t + 1), data.y[t]};
        if (with_truth) row.push_back((*data.x_true)[t]);
        table.rows.push_back(std::move(row));
    }
    write_csv(csv_path, table);

    nlohmann::json j;
    j["model"] = meta.model;
    j["T"] = data.T;
    j["seed"] = data.seed;
    j["rho"] = meta.theta.rho;
    j["sigma"] = meta.theta.sigma;
    j["alpha"] = meta.theta.alpha;
    if (meta.model == "linear_gaussian") j["obs_noise"] = meta.obs_noise;
    std::ofstream out(dataset_meta_path(csv_path));
    if (!out) throw IoError("cannot open for writing: " + dataset_meta_path(csv_path));
    out << j.dump(2) << "\n";
}

Dataset read_dataset(const std::string& csv_path, DatasetMeta* meta_out) {
    const CsvTable table = read_csv(csv_path);
    const std::size_t yc = table.col("y");
    Dataset data;
    data.T = table.rows.size();
    if (data.T == 0) throw IoError("dataset has no rows: " + csv_path);
    data.y.resize(data.T);
    bool with_truth = false;
    std::size_t xc = 0;
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        if (table.columns[i] == "x_true") {
            with_truth = true;
            xc = i;
        }
    std::vector<double> xs(with_truth ? data.T : 0);
    for (std::size_t r = 0; r < data.T; ++r) {
        data.y[r] = table.rows[r][yc];
        if (with_truth) xs[r] = table.rows[r][xc];
    }
    if (with_truth) data.x_true = std::move(xs);

    if (meta_out) {
        std::ifstream in(dataset_meta_path(csv_path));
        if (in) {
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw IoError("bad metadata " + dataset_meta_path(csv_path) + ": " + e.what());
            }
            meta_out->model = j.value("model", std::string("poisson"));
            meta_out->theta = HyperParams(j.value("rho", 0.0), j.value("sigma", 1.0),
                                          j.value("alpha", 0.0));
            meta_out->seed = j.value("seed", std::uint64_t{0});
            meta_out->obs_noise = j.value("obs_noise", 1.0);
            data.seed = meta_out->seed;
        }
    }
    return data;
}

// ---------------------------------------------------------------------------
// KvConfig

namespace {
std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
} // namespace

KvConfig KvConfig::parse_string(const std::string& text, const std::string& origin) {
    KvConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        const auto mapkey = std::make_pair(section, key);
        if (cfg.entries_.count(mapkey))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in section [" + section + "] (first at line " +
                              std::to_string(cfg.entries_[mapkey].line) + ")");
        cfg.entries_[mapkey] = Entry{value, lineno};
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

bool KvConfig::has(const std::string& section, const std::string& key) const {
    return entries_.count({section, key}) > 0;
}

std::string KvConfig::get_string(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
    const auto it = entries_.find({section, key});
    if (it == entries_.end()) return fallback;
    consumed_.insert({section, key});
    return it->second.value;
}

double KvConfig::get_double(const std::string& section, const std::string& key,
                            double fallback) const {
    const auto it = entries_.find({section, key});
    if (it == entries_.end()) return fallback;
    consumed_.insert({section, key});
    char* end = nullptr;
    const double v = std::strtod(it->second.value.c_str(), &end);
    if (end == it->second.value.c_str() || *end != '\0')
        throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                          "' is not a number: '" + it->second.value + "'");
    return v;
}

long KvConfig::get_long(const std::string& section, const std::string& key, long fallback) const {
    const auto it = entries_.find({section, key});
    if (it == entries_.end()) return fallback;
    consumed_.insert({section, key});
    char* end = nullptr;
    const long v = std::strtol(it->second.value.c_str(), &end, 10);
    if (end == it->second.value.c_str() || *end != '\0')
        throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                          "' is not an integer: '" + it->second.value + "'");
    return v;
}

void KvConfig::require_all_consumed() const {
    std::string msg;
    for (const auto& [k, e] : entries_) {
        if (consumed_.count(k)) continue;
        if (!msg.empty()) msg += "; ";
        msg += origin_ + ":" + std::to_string(e.line) + ": unknown key '" + k.second + "'";
        if (!k.first.empty()) msg += " in section [" + k.first + "]";
    }
    if (!msg.empty()) throw ConfigError(msg);
}

} // namespace inlapf
