#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "cpt/io.hpp"
#include "cpt/stats.hpp"

namespace cpt {

namespace {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::ofstream open_for_write(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("cannot write " + path.string());
    }
    return out;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    if (delimiter == ' ') {
        std::istringstream in(line);
        std::string cell;
        while (in >> cell) {
            cells.push_back(cell);
        }
        return cells;
    }
    std::string cell;
    for (char c : line) {
        if (c == delimiter) {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) {
        ++begin;
    }
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) {
        --end;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

char detect_delimiter(const std::string& line) {
    std::size_t best_count = 0;
    char best = ' ';
    for (char candidate : {',', ';', '\t'}) {
        const auto count = static_cast<std::size_t>(
            std::count(line.begin(), line.end(), candidate));
        if (count > best_count) {
            best_count = count;
            best = candidate;
        }
    }
    return best;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            lines.push_back(line);
        }
    }
    return lines;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    (void)ec;
    return std::string(buffer.data(), ptr);
}

DelimitedTable read_delimited(const fs::path& path) {
    const std::vector<std::string> lines = nonempty_lines(read_text_file(path));
    if (lines.empty()) {
        throw EmptyInput(path.string() + " holds no data rows");
    }
    const char delimiter = detect_delimiter(lines.front());

    DelimitedTable table;
    std::size_t first_data_row = 0;
    const std::vector<std::string> head = split_line(lines.front(), delimiter);
    double ignored = 0.0;
    const bool has_header = std::any_of(head.begin(), head.end(), [&](const std::string& cell) {
        return !parse_double(cell, ignored);
    });
    if (has_header) {
        table.header = head;
        first_data_row = 1;
        if (lines.size() == 1) {
            throw EmptyInput(path.string() + " holds a header but no data rows");
        }
    }

    const std::size_t rows = lines.size() - first_data_row;
    const std::size_t cols = split_line(lines[first_data_row], delimiter).size();
    table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::vector<std::string> cells = split_line(lines[first_data_row + r], delimiter);
        if (cells.size() != cols) {
            throw InvalidArgument(path.string() + " line " +
                                  std::to_string(first_data_row + r + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            double value = 0.0;
            if (!parse_double(cells[c], value)) {
                throw InvalidArgument(path.string() + " line " +
                                      std::to_string(first_data_row + r + 1) +
                                      ": cannot parse '" + cells[c] + "' as a number");
            }
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
        }
    }
    return table;
}

LabeledDataset split_label_column(const DelimitedTable& table, const std::string& label_column) {
    Eigen::Index label_at = -1;
    const bool numeric = !label_column.empty() &&
                         std::all_of(label_column.begin(), label_column.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
    if (numeric) {
        label_at = std::stoll(label_column);
    } else {
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (table.header[i] == label_column) {
                label_at = static_cast<Eigen::Index>(i);
                break;
            }
        }
        if (label_at < 0) {
            throw InvalidArgument("no column named '" + label_column + "' in the header");
        }
    }
    if (label_at < 0 || label_at >= table.values.cols()) {
        throw InvalidArgument("label column " + std::to_string(label_at) +
                              " is out of range for " + std::to_string(table.values.cols()) +
                              " columns");
    }
    if (table.values.cols() < 2) {
        throw InvalidArgument("need at least one feature column besides the label");
    }

    const Eigen::Index rows = table.values.rows();
    const Eigen::Index cols = table.values.cols();
    Eigen::MatrixXd features(rows, cols - 1);
    std::vector<int> labels(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double raw = table.values(r, label_at);
        if (raw != 0.0 && raw != 1.0) {
            throw InvalidArgument("label value " + format_double(raw) + " at row " +
                                  std::to_string(r) + " is not 0 or 1");
        }
        labels[static_cast<std::size_t>(r)] = static_cast<int>(raw);
        Eigen::Index at = 0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (c != label_at) {
                features(r, at++) = table.values(r, c);
            }
        }
    }
    return LabeledDataset(SampleMatrix(std::move(features)), std::move(labels));
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& values) {
    std::ofstream out = open_for_write(path);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c != 0) {
                out << ',';
            }
            out << format_double(values(r, c));
        }
        out << '\n';
    }
}

void write_roc_csv(const fs::path& path, const std::vector<ExperimentRecord>& records) {
    std::ofstream out = open_for_write(path);
    out << "alpha,power,statistic,scenario,R,B,seed\n";
    for (const ExperimentRecord& record : records) {
        for (const auto& [alpha, power] : record.roc) {
            out << format_double(alpha) << ',' << format_double(power) << ','
                << statistic_label(record.statistic_kind) << ','
                << scenario_label(record.scenario.kind) << ',' << record.replications << ','
                << record.num_permutations << ',' << record.seed << '\n';
        }
    }
}

void write_pvalues_csv(const fs::path& path, const std::vector<ExperimentRecord>& records) {
    std::ofstream out = open_for_write(path);
    out << "replication,p_value,statistic,scenario,R,B,seed\n";
    for (const ExperimentRecord& record : records) {
        for (std::size_t r = 0; r < record.p_values.size(); ++r) {
            out << r << ',' << format_double(record.p_values[r]) << ','
                << statistic_label(record.statistic_kind) << ','
                << scenario_label(record.scenario.kind) << ',' << record.replications << ','
                << record.num_permutations << ',' << record.seed << '\n';
        }
    }
}

void write_power_csv(const fs::path& path, const std::vector<PowerCurve>& curves) {
    std::ofstream out = open_for_write(path);
    out << "n,power,statistic,scenario,reps,B,seed\n";
    for (const PowerCurve& curve : curves) {
        for (std::size_t k = 0; k < curve.sample_sizes.size(); ++k) {
            out << curve.sample_sizes[k] << ',' << format_double(curve.powers[k]) << ','
                << statistic_label(curve.statistic_kind) << ','
                << scenario_label(curve.scenario.kind) << ',' << curve.replications << ','
                << curve.num_permutations << ',' << curve.seed << '\n';
        }
    }
}

namespace {

// plot geometry: a fixed 60px margin around a 400x400 data box
constexpr double kBox = 400.0;
constexpr double kMargin = 60.0;

double svg_x(double alpha) { return kMargin + kBox * alpha; }
double svg_y(double power) { return kMargin + kBox * (1.0 - power); }

std::string polyline(const std::vector<std::pair<double, double>>& points) {
    std::string path;
    for (const auto& [alpha, power] : points) {
        path += format_double(svg_x(alpha)) + "," + format_double(svg_y(power)) + " ";
    }
    if (!path.empty()) {
        path.pop_back();
    }
    return path;
}

}  // namespace

void write_roc_svg(const fs::path& path, const std::vector<ExperimentRecord>& records,
                   const std::vector<std::pair<double, double>>& reference) {
    static const std::array<const char*, 6> colors = {"#1b6ca8", "#c0392b", "#1e8449",
                                                      "#7d3c98", "#b7950b", "#1f618d"};
    std::ofstream out = open_for_write(path);
    const double size = kBox + 2.0 * kMargin;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << format_double(size)
        << "' height='" << format_double(size) << "' font-family='monospace' font-size='12'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";

    // frame, diagonal, and ticks every 0.25
    out << "<rect x='" << format_double(kMargin) << "' y='" << format_double(kMargin)
        << "' width='" << format_double(kBox) << "' height='" << format_double(kBox)
        << "' fill='none' stroke='black'/>\n";
    out << "<line x1='" << format_double(svg_x(0)) << "' y1='" << format_double(svg_y(0))
        << "' x2='" << format_double(svg_x(1)) << "' y2='" << format_double(svg_y(1))
        << "' stroke='#aaaaaa' stroke-dasharray='3 3'/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = 0.25 * tick;
        out << "<text x='" << format_double(svg_x(v) - 10.0) << "' y='"
            << format_double(kMargin + kBox + 20.0) << "'>" << format_double(v) << "</text>\n";
        out << "<text x='" << format_double(kMargin - 40.0) << "' y='"
            << format_double(svg_y(v) + 4.0) << "'>" << format_double(v) << "</text>\n";
    }
    out << "<text x='" << format_double(kMargin + kBox / 2.0 - 20.0) << "' y='"
        << format_double(size - 15.0) << "'>alpha</text>\n";
    out << "<text x='15' y='" << format_double(kMargin - 20.0) << "'>power</text>\n";

    double legend_y = kMargin + 16.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const char* color = colors[i % colors.size()];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='"
            << polyline(records[i].roc) << "'/>\n";
        out << "<text x='" << format_double(kMargin + 10.0) << "' y='"
            << format_double(legend_y) << "' fill='" << color << "'>"
            << statistic_label(records[i].statistic_kind) << "</text>\n";
        legend_y += 16.0;
    }
    if (!reference.empty()) {
        out << "<polyline fill='none' stroke='black' stroke-dasharray='6 3' points='"
            << polyline(reference) << "'/>\n";
        out << "<text x='" << format_double(kMargin + 10.0) << "' y='"
            << format_double(legend_y) << "'>reference</text>\n";
    }
    out << "</svg>\n";
}

std::vector<Document> load_corpus_directory(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw InvalidArgument(dir.string() + " is not a directory");
    }
    std::vector<fs::path> classes;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) {
            classes.push_back(entry.path());
        }
    }
    std::sort(classes.begin(), classes.end());
    if (classes.size() != 2) {
        throw InvalidArgument(dir.string() + " must hold exactly two class subdirectories, found " +
                              std::to_string(classes.size()));
    }

    std::vector<Document> corpus;
    for (int label = 0; label < 2; ++label) {
        std::vector<fs::path> files;
        for (const fs::directory_entry& entry :
             fs::directory_iterator(classes[static_cast<std::size_t>(label)])) {
            if (entry.is_regular_file()) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& file : files) {
            corpus.push_back(Document{read_text_file(file), label});
        }
    }
    if (corpus.empty()) {
        throw EmptyInput(dir.string() + " holds no documents");
    }
    return corpus;
}

std::vector<Document> load_corpus_file(const fs::path& path) {
    const std::vector<std::string> lines = nonempty_lines(read_text_file(path));
    std::vector<Document> corpus;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::size_t cut = line.find('\t');
        if (cut == std::string::npos) {
            cut = line.find(',');
        }
        if (cut == std::string::npos) {
            throw InvalidArgument(path.string() + " line " + std::to_string(i + 1) +
                                  " has no tab or comma separating label from text");
        }
        const std::string label = line.substr(0, cut);
        if (label != "0" && label != "1") {
            if (i == 0) {
                continue;  // tolerate a header line
            }
            throw InvalidArgument(path.string() + " line " + std::to_string(i + 1) +
                                  ": label '" + label + "' is not 0 or 1");
        }
        corpus.push_back(Document{line.substr(cut + 1), label == "1" ? 1 : 0});
    }
    if (corpus.empty()) {
        throw EmptyInput(path.string() + " holds no documents");
    }
    return corpus;
}

}  // namespace cpt
