#ifndef INLAPF_IO_HPP
#define INLAPF_IO_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "inlapf/model.hpp"

namespace inlapf {

/// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t col(const std::string& name) const; // throws IoError if absent
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// CSV table whose cells stay as text (for tables mixing labels and
/// numbers, e.g. long-format experiment results keyed by method name).
struct TextTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const; // throws IoError if absent
    double num(std::size_t row, std::size_t column) const;
};

/// Cells may not contain commas, quotes, or newlines (rejected, not quoted).
void write_table(const std::string& path, const TextTable& table);
TextTable read_table(const std::string& path);

struct DatasetMeta {
    std::string model = "poisson";
    HyperParams theta;
    std::uint64_t seed = 0;
    double obs_noise = 1.0; // used by the linear-Gaussian model only
};

std::string dataset_meta_path(const std::string& csv_path);

/// Writes `t,y[,x_true]` rows (t is 1-based in files) plus a JSON metadata
/// sidecar next to the CSV.
void write_dataset(const std::string& csv_path, const Dataset& data, const DatasetMeta& meta);

/// Reads the CSV (and the sidecar when present; meta_out untouched if absent).
Dataset read_dataset(const std::string& csv_path, DatasetMeta* meta_out = nullptr);

/// Plain-text configuration: `key = value` lines under `[section]` headers;
/// `#` starts a comment.  Keys that are never read are hard errors reported
/// with their line numbers, so typos cannot silently change an experiment.
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_string(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;

    /// Throws ConfigError naming every key that was parsed but never read.
    void require_all_consumed() const;

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::string origin_;
    std::map<std::pair<std::string, std::string>, Entry> entries_;
    mutable std::set<std::pair<std::string, std::string>> consumed_;
};

} // namespace inlapf

#endif
