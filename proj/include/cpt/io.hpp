#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cpt/bench.hpp"
#include "cpt/generators.hpp"
#include "cpt/matrix.hpp"

namespace cpt {

/// Shortest decimal string that round-trips the value (std::to_chars), so
/// emitted files are byte-identical across runs, locales, and thread counts.
std::string format_double(double value);

/// Numeric delimited text with an optional header row. The delimiter is
/// detected among comma, semicolon, tab, and whitespace.
struct DelimitedTable {
    std::vector<std::string> header;  // empty when the file has no header row
    Eigen::MatrixXd values;
};

DelimitedTable read_delimited(const std::filesystem::path& path);

/// Splits off the label column (a header name, or a 0-based column index
/// when `label_column` is all digits); every label cell must be 0 or 1.
LabeledDataset split_label_column(const DelimitedTable& table, const std::string& label_column);

/// Plain comma-separated numeric rows, no header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values);

void write_roc_csv(const std::filesystem::path& path,
                   const std::vector<ExperimentRecord>& records);
void write_pvalues_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentRecord>& records);
void write_power_csv(const std::filesystem::path& path, const std::vector<PowerCurve>& curves);

/// Static ROC overlay plot; `reference` (e.g. a closed-form power curve)
/// is drawn dashed when nonempty.
void write_roc_svg(const std::filesystem::path& path,
                   const std::vector<ExperimentRecord>& records,
                   const std::vector<std::pair<double, double>>& reference = {});

/// Corpus layouts accepted by the CLI: a directory holding exactly two
/// class subdirectories of plain-text files (sorted names; first = label 0),
/// or a two-column file `label<TAB or ,>text`, one document per line.
std::vector<Document> load_corpus_directory(const std::filesystem::path& dir);
std::vector<Document> load_corpus_file(const std::filesystem::path& path);

}  // namespace cpt
