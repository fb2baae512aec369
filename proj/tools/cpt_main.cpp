#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpt/bench.hpp"
#include "cpt/io.hpp"
#include "cpt/permutation.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;        // malformed input, files, flags, parsing
constexpr int kExitStatistical = 3;  // well-formed data violating a statistical contract

struct Options {
    // statistic
    std::string stat = "cpt1";
    std::string classifier = "forest";
    int permutations = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;
    int folds = 2;
    double mmd_bandwidth = 0.0;

    // classifier knobs
    int knn_k = 0;
    double logistic_l2 = 1e-3;
    int logistic_max_iter = 500;
    double logistic_tol = 1e-6;
    int trees = 500;
    int mtry = 0;
    int min_leaf = 10;

    // scenario
    std::string scenario = "mean-shift";
    long long d = 100;
    long long n = 100;
    long long m = 100;
    double sigma = 1.0;
    double shift_first = 0.0;
    double shift_all = 0.0;
    double diag_start = 1.0;
    double diag_step = 0.1;
    double rho1 = 0.01;
    double rho2 = 0.21;
    double tau = 0.65;
    double ridge1 = 0.1;
    double ridge2 = 0.1;

    // text input
    std::string corpus_dir;
    std::string corpus_file;
    double min_df = 0.05;
    std::vector<std::string> remove_terms;

    // bench
    int replications = 400;
    int reps_per_size = 250;
    std::vector<double> alpha_grid;
    std::vector<long long> sizes = {50, 100, 150, 200, 250};
    bool svg = false;

    // test inputs
    std::vector<std::string> inputs;
    std::string label_column;

    std::string config;
    std::string out = ".";
};

// Turns a flat key=value file into --key=value tokens for a second parse.
// Keys already present on the command line are skipped, so explicit flags
// override the file.
std::vector<std::string> config_tokens(const CLI::App& cmd, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw cpt::InvalidArgument("cannot open config " + path);
    }
    const auto trimmed = [](const std::string& text) {
        const auto first = text.find_first_not_of(" \t\r");
        const auto last = text.find_last_not_of(" \t\r");
        return first == std::string::npos ? std::string() : text.substr(first, last - first + 1);
    };

    std::vector<std::string> tokens;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string entry = trimmed(line);
        if (entry.empty() || entry.front() == '#') {
            continue;
        }
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw cpt::InvalidArgument(path + " line " + std::to_string(line_no) +
                                       ": expected key=value");
        }
        const std::string key = trimmed(entry.substr(0, eq));
        const std::string value = trimmed(entry.substr(eq + 1));
        if (key == "config") {
            throw cpt::InvalidArgument(path + ": a config file cannot set --config");
        }
        const CLI::Option* option = cmd.get_option_no_throw("--" + key);
        if (option == nullptr) {
            throw cpt::InvalidArgument(path + " line " + std::to_string(line_no) +
                                       ": no --" + key + " flag under '" + cmd.get_name() + "'");
        }
        if (option->count() > 0) {
            continue;
        }
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

int exit_code_for(const cpt::Error& error) {
    // data that is readable but statistically unusable exits 3; everything
    // malformed or unparseable exits 2
    if (dynamic_cast<const cpt::SingleClassTrainingSet*>(&error) ||
        dynamic_cast<const cpt::FoldTooSmall*>(&error) ||
        dynamic_cast<const cpt::DegenerateBandwidth*>(&error) ||
        dynamic_cast<const cpt::PointOutsideSupportOfF*>(&error) ||
        dynamic_cast<const cpt::NotPositiveDefinite*>(&error) ||
        dynamic_cast<const cpt::SingularFactor*>(&error) ||
        dynamic_cast<const cpt::EmptyVocabulary*>(&error) ||
        dynamic_cast<const cpt::KTooLarge*>(&error)) {
        return kExitStatistical;
    }
    return kExitInput;
}

cpt::ClassifierSpec classifier_from(const Options& opts) {
    cpt::ClassifierSpec spec;
    if (opts.classifier == "knn") {
        spec.kind = cpt::ClassifierKind::Knn;
    } else if (opts.classifier == "logistic") {
        spec.kind = cpt::ClassifierKind::Logistic;
    } else {
        spec.kind = cpt::ClassifierKind::Forest;
    }
    spec.knn_k = opts.knn_k;
    spec.logistic_l2 = opts.logistic_l2;
    spec.logistic_max_iter = opts.logistic_max_iter;
    spec.logistic_tol = opts.logistic_tol;
    spec.forest_trees = opts.trees;
    spec.forest_mtry = opts.mtry;
    spec.forest_min_leaf = opts.min_leaf;
    spec.seed = cpt::mix_seed(opts.seed, 0x636c617373ULL);  // decoupled from data seeds
    return spec;
}

cpt::StatisticKind statistic_from(const Options& opts) {
    cpt::StatisticKind kind;
    if (opts.stat == "cpt1") {
        kind.tag = cpt::StatisticTag::Cpt1;
    } else if (opts.stat == "cpt2") {
        kind.tag = cpt::StatisticTag::Cpt2;
    } else if (opts.stat == "acc") {
        kind.tag = cpt::StatisticTag::Acc;
    } else {
        kind.tag = cpt::StatisticTag::Mmd;
    }
    kind.classifier = classifier_from(opts);
    kind.acc_folds = opts.folds;
    kind.mmd_bandwidth = opts.mmd_bandwidth;
    return kind;
}

std::vector<cpt::Document> load_corpus(const Options& opts) {
    if (!opts.corpus_dir.empty()) {
        return cpt::load_corpus_directory(opts.corpus_dir);
    }
    return cpt::load_corpus_file(opts.corpus_file);
}

cpt::ScenarioSpec scenario_from(const Options& opts) {
    cpt::ScenarioSpec spec;
    if (opts.scenario == "mean-shift") {
        spec.kind = cpt::ScenarioKind::MeanShift;
    } else if (opts.scenario == "cov-diff") {
        spec.kind = cpt::ScenarioKind::CovDiff;
    } else if (opts.scenario == "ggm") {
        spec.kind = cpt::ScenarioKind::Ggm;
    } else if (opts.scenario == "marginal-diff") {
        spec.kind = cpt::ScenarioKind::MarginalDiff;
    } else {
        spec.kind = cpt::ScenarioKind::TextCorpus;
    }
    spec.d = opts.d;
    spec.n = opts.n;
    spec.m = opts.m;
    spec.sigma = opts.sigma;
    if (opts.shift_first != 0.0 || opts.shift_all != 0.0) {
        spec.delta = Eigen::VectorXd::Constant(spec.d, opts.shift_all);
        spec.delta(0) += opts.shift_first;
    }
    spec.diag.resize(spec.d);
    for (Eigen::Index i = 0; i < spec.d; ++i) {
        spec.diag(i) = opts.diag_start + opts.diag_step * static_cast<double>(i);
    }
    spec.rho1 = opts.rho1;
    spec.rho2 = opts.rho2;
    spec.tau = opts.tau;
    spec.ridge1 = opts.ridge1;
    spec.ridge2 = opts.ridge2;
    spec.seed = opts.seed;

    if (spec.kind == cpt::ScenarioKind::TextCorpus) {
        if (opts.corpus_dir.empty() && opts.corpus_file.empty()) {
            throw cpt::InvalidArgument("the text scenario needs --corpus-dir or --corpus-file");
        }
        auto corpus = std::make_shared<cpt::LabeledDataset>(
            cpt::build_doc_term_matrix(load_corpus(opts), opts.min_df, opts.remove_terms));
        spec.d = corpus->dim();
        spec.corpus = std::move(corpus);
    }
    return spec;
}

json scenario_manifest(const Options& opts, const cpt::ScenarioSpec& spec) {
    json j;
    j["kind"] = cpt::scenario_label(spec.kind);
    j["d"] = spec.d;
    j["n"] = spec.n;
    j["m"] = spec.m;
    switch (spec.kind) {
        case cpt::ScenarioKind::MeanShift:
            j["sigma"] = opts.sigma;
            j["shift_first"] = opts.shift_first;
            j["shift_all"] = opts.shift_all;
            break;
        case cpt::ScenarioKind::CovDiff:
            j["diag_start"] = opts.diag_start;
            j["diag_step"] = opts.diag_step;
            j["rho1"] = opts.rho1;
            j["rho2"] = opts.rho2;
            break;
        case cpt::ScenarioKind::Ggm:
            j["tau"] = opts.tau;
            j["ridge1"] = opts.ridge1;
            j["ridge2"] = opts.ridge2;
            break;
        case cpt::ScenarioKind::MarginalDiff:
            break;
        case cpt::ScenarioKind::TextCorpus:
            j["corpus_dir"] = opts.corpus_dir;
            j["corpus_file"] = opts.corpus_file;
            j["min_df"] = opts.min_df;
            j["remove_terms"] = opts.remove_terms;
            break;
    }
    return j;
}

json statistic_manifest(const Options& opts, const cpt::StatisticKind& kind) {
    json j;
    j["name"] = cpt::statistic_label(kind);
    if (kind.tag != cpt::StatisticTag::Mmd) {
        j["classifier"] = opts.classifier;
        j["knn_k"] = opts.knn_k;
        j["logistic_l2"] = opts.logistic_l2;
        j["trees"] = opts.trees;
        j["mtry"] = opts.mtry;
        j["min_leaf"] = opts.min_leaf;
    } else {
        j["mmd_bandwidth"] = opts.mmd_bandwidth;
    }
    if (kind.tag == cpt::StatisticTag::Acc) {
        j["folds"] = opts.folds;
    }
    return j;
}

void write_manifest(const fs::path& path, const json& manifest) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw cpt::InvalidArgument("cannot write " + path.string());
    }
    out << manifest.dump(2) << '\n';
}

cpt::LabeledDataset test_input(const Options& opts) {
    if (!opts.corpus_dir.empty() || !opts.corpus_file.empty()) {
        return cpt::build_doc_term_matrix(load_corpus(opts), opts.min_df, opts.remove_terms);
    }
    if (opts.inputs.size() == 2) {
        const cpt::DelimitedTable first = cpt::read_delimited(opts.inputs[0]);
        const cpt::DelimitedTable second = cpt::read_delimited(opts.inputs[1]);
        return cpt::pooled(cpt::SampleMatrix(first.values), cpt::SampleMatrix(second.values));
    }
    if (opts.inputs.size() == 1 && !opts.label_column.empty()) {
        return cpt::split_label_column(cpt::read_delimited(opts.inputs[0]), opts.label_column);
    }
    throw cpt::InvalidArgument(
        "expected two feature files, one labeled file with --label, or --corpus-dir/--corpus-file");
}

int cmd_test(const Options& opts) {
    const cpt::LabeledDataset data = test_input(opts);
    const cpt::StatisticKind kind = statistic_from(opts);
    const cpt::TestResult result = cpt::permutation_test(
        data, kind, opts.permutations, opts.alpha, cpt::RngStream(opts.seed, 0), opts.threads);

    std::string report;
    report += "statistic: " + cpt::statistic_label(kind) + "\n";
    report += "rows: " + std::to_string(data.n_class1()) + " class-1, " +
              std::to_string(data.n_class0()) + " class-0, dim " + std::to_string(data.dim()) +
              "\n";
    report += "observed: " + cpt::format_double(result.observed) + "\n";
    report += "p_value: " + cpt::format_double(result.p_value) + "\n";
    report += "critical_value: " + cpt::format_double(result.critical_value) + "\n";
    report += "alpha: " + cpt::format_double(result.alpha) + "\n";
    report += "permutations: " + std::to_string(result.num_permutations) + "\n";
    report += "seed: " + std::to_string(opts.seed) + "\n";
    report += std::string("decision: ") + (result.reject() ? "reject" : "fail-to-reject") + "\n";

    std::cout << report;
    const fs::path out_dir(opts.out);
    fs::create_directories(out_dir);
    std::ofstream file(out_dir / "report.txt", std::ios::binary);
    file << report;
    return kExitOk;
}

int cmd_simulate(const Options& opts) {
    if (opts.scenario == "text") {
        throw cpt::InvalidArgument("simulate draws synthetic scenarios; text is ingest-only");
    }
    const cpt::ScenarioSpec spec = scenario_from(opts);
    cpt::RngStream rng(opts.seed, 0);
    const auto [sample1, sample2] = cpt::generate_scenario(spec, rng);

    const fs::path out_dir(opts.out);
    cpt::write_matrix_csv(out_dir / "sample1.csv", sample1.values());
    cpt::write_matrix_csv(out_dir / "sample2.csv", sample2.values());

    json manifest;
    manifest["command"] = "simulate";
    manifest["scenario"] = scenario_manifest(opts, spec);
    manifest["seed"] = opts.seed;
    manifest["outputs"] = {"sample1.csv", "sample2.csv"};
    write_manifest(out_dir / "manifest.json", manifest);

    std::cout << "wrote " << (out_dir / "sample1.csv").string() << " ("
              << sample1.rows() << "x" << sample1.cols() << "), "
              << (out_dir / "sample2.csv").string() << " (" << sample2.rows() << "x"
              << sample2.cols() << ")\n";
    return kExitOk;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 99; ++i) {
        grid.push_back(static_cast<double>(i) / 100.0);
    }
    return grid;
}

int cmd_bench_roc(const Options& opts) {
    const cpt::ScenarioSpec spec = scenario_from(opts);
    const cpt::StatisticKind kind = statistic_from(opts);
    const std::vector<double> grid =
        opts.alpha_grid.empty() ? default_alpha_grid() : opts.alpha_grid;

    const cpt::ExperimentRecord record = cpt::roc_experiment(
        spec, kind, opts.replications, opts.permutations, grid, opts.seed, opts.threads);

    const fs::path out_dir(opts.out);
    cpt::write_roc_csv(out_dir / "roc.csv", {record});
    cpt::write_pvalues_csv(out_dir / "pvalues.csv", {record});
    if (opts.svg) {
        std::vector<std::pair<double, double>> reference;
        if (spec.kind == cpt::ScenarioKind::MeanShift && spec.delta.size() != 0) {
            for (double alpha : record.alpha_grid) {
                reference.emplace_back(
                    alpha, cpt::minimax_power(alpha, static_cast<double>(spec.d),
                                              static_cast<double>(spec.n),
                                              spec.delta.squaredNorm(), spec.sigma));
            }
        }
        cpt::write_roc_svg(out_dir / "roc.svg", {record}, reference);
    }

    json manifest;
    manifest["command"] = "bench-roc";
    manifest["scenario"] = scenario_manifest(opts, spec);
    manifest["statistic"] = statistic_manifest(opts, kind);
    manifest["R"] = opts.replications;
    manifest["B"] = opts.permutations;
    manifest["alpha_grid"] = grid;
    manifest["seed"] = opts.seed;
    manifest["threads"] = opts.threads;
    write_manifest(out_dir / "manifest.json", manifest);

    std::cout << "roc: " << record.replications << " replications, B=" << record.num_permutations
              << ", power(0.05)=" << cpt::format_double(cpt::p_value_ecdf(record.p_values,
                                                                          {0.05})[0])
              << ", runtime " << cpt::format_double(record.runtime_seconds) << "s\n";
    return kExitOk;
}

int cmd_bench_power(const Options& opts) {
    const cpt::ScenarioSpec spec = scenario_from(opts);
    const cpt::StatisticKind kind = statistic_from(opts);
    std::vector<Eigen::Index> sizes(opts.sizes.begin(), opts.sizes.end());

    const cpt::PowerCurve curve =
        cpt::power_curve(spec, kind, sizes, opts.reps_per_size, opts.permutations, opts.seed,
                         opts.threads, opts.alpha);

    const fs::path out_dir(opts.out);
    cpt::write_power_csv(out_dir / "power.csv", {curve});

    json manifest;
    manifest["command"] = "bench-power";
    manifest["scenario"] = scenario_manifest(opts, spec);
    manifest["statistic"] = statistic_manifest(opts, kind);
    manifest["sizes"] = opts.sizes;
    manifest["reps"] = opts.reps_per_size;
    manifest["B"] = opts.permutations;
    manifest["alpha"] = opts.alpha;
    manifest["seed"] = opts.seed;
    manifest["threads"] = opts.threads;
    write_manifest(out_dir / "manifest.json", manifest);

    std::cout << "power:";
    for (std::size_t k = 0; k < curve.sample_sizes.size(); ++k) {
        std::cout << ' ' << curve.sample_sizes[k] << "->"
                  << cpt::format_double(curve.powers[k]);
    }
    std::cout << ", runtime " << cpt::format_double(curve.runtime_seconds) << "s\n";
    return kExitOk;
}

void add_common_options(CLI::App* cmd, Options& opts) {
    cmd->add_option("--config", opts.config, "key=value file; command-line flags override it");
    cmd->add_option("--stat", opts.stat, "test statistic")
        ->check(CLI::IsMember({"cpt1", "cpt2", "acc", "mmd"}));
    cmd->add_option("--classifier", opts.classifier, "probability estimator for cpt/acc")
        ->check(CLI::IsMember({"knn", "logistic", "forest"}));
    cmd->add_option("--permutations,-B", opts.permutations, "permutation count B")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", opts.alpha, "significance level");
    cmd->add_option("--seed", opts.seed, "master seed");
    cmd->add_option("--threads", opts.threads, "worker cap (results identical for any value)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--folds", opts.folds, "ACC cross-validation folds");
    cmd->add_option("--mmd-bandwidth", opts.mmd_bandwidth,
                    "Gaussian kernel bandwidth; 0 = median heuristic");
    cmd->add_option("--knn-k", opts.knn_k, "neighbor count; 0 = floor(sqrt(N))");
    cmd->add_option("--l2", opts.logistic_l2, "logistic ridge strength");
    cmd->add_option("--max-iter", opts.logistic_max_iter, "logistic iteration cap");
    cmd->add_option("--tol", opts.logistic_tol, "logistic gradient tolerance");
    cmd->add_option("--trees", opts.trees, "forest size");
    cmd->add_option("--mtry", opts.mtry, "features tried per split; 0 = floor(sqrt(d))");
    cmd->add_option("--min-leaf", opts.min_leaf, "stop splitting at this many in-bag rows");
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--corpus-dir", opts.corpus_dir, "directory with two class subdirectories");
    cmd->add_option("--corpus-file", opts.corpus_file, "two-column file: label<TAB or ,>text");
    cmd->add_option("--min-df", opts.min_df, "document-frequency floor for vocabulary");
    cmd->add_option("--remove-terms", opts.remove_terms, "terms to drop from the vocabulary")
        ->delimiter(',');
}

void add_scenario_options(CLI::App* cmd, Options& opts) {
    cmd->add_option("--scenario", opts.scenario, "data setting")
        ->check(CLI::IsMember({"mean-shift", "cov-diff", "ggm", "marginal-diff", "text"}));
    cmd->add_option("--dim,-d", opts.d, "dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--n", opts.n, "rows of sample 1")->check(CLI::PositiveNumber);
    cmd->add_option("--m", opts.m, "rows of sample 0")->check(CLI::PositiveNumber);
    cmd->add_option("--sigma", opts.sigma, "mean-shift noise scale");
    cmd->add_option("--shift-first", opts.shift_first, "shift added to coordinate 1");
    cmd->add_option("--shift-all", opts.shift_all, "shift added to every coordinate");
    cmd->add_option("--diag-start", opts.diag_start, "first diagonal variance");
    cmd->add_option("--diag-step", opts.diag_step, "diagonal variance increment");
    cmd->add_option("--rho1", opts.rho1, "off-diagonal covariance, sample 1");
    cmd->add_option("--rho2", opts.rho2, "off-diagonal covariance, sample 0");
    cmd->add_option("--tau", opts.tau, "edge-removal probability for graph 2");
    cmd->add_option("--ridge1", opts.ridge1, "precision diagonal boost, graph 1");
    cmd->add_option("--ridge2", opts.ridge2, "precision diagonal boost, graph 2");
}

}  // namespace

int main(int argc, char** argv) {
    Options opts;
    CLI::App app{"classification-probability two-sample tests and benchmarks"};
    app.require_subcommand(1);

    CLI::App* test = app.add_subcommand(
        "test", "run one permutation test on given samples (exit 0 either decision)");
    add_common_options(test, opts);
    test->add_option("files", opts.inputs, "two feature files, or one labeled file")
        ->expected(0, 2);
    test->add_option("--label", opts.label_column, "label column name or 0-based index");

    CLI::App* simulate =
        app.add_subcommand("simulate", "draw one scenario and write the two samples");
    add_common_options(simulate, opts);
    add_scenario_options(simulate, opts);

    CLI::App* bench_roc =
        app.add_subcommand("bench-roc", "replicated tests on fresh draws; p-value ECDF");
    add_common_options(bench_roc, opts);
    add_scenario_options(bench_roc, opts);
    bench_roc->add_option("--replications,-R", opts.replications, "Monte Carlo replications")
        ->check(CLI::PositiveNumber);
    bench_roc->add_option("--alpha-grid", opts.alpha_grid, "levels for the ROC curve")
        ->delimiter(',');
    bench_roc->add_flag("--svg", opts.svg, "also write roc.svg");

    CLI::App* bench_power =
        app.add_subcommand("bench-power", "rejection rate per sample size at --alpha");
    add_common_options(bench_power, opts);
    add_scenario_options(bench_power, opts);
    bench_power->add_option("--reps", opts.reps_per_size, "replications per size")
        ->check(CLI::PositiveNumber);
    bench_power->add_option("--sizes", opts.sizes, "strictly increasing sample sizes")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
        if (!opts.config.empty()) {
            CLI::App* active = test->parsed()      ? test
                               : simulate->parsed() ? simulate
                               : bench_roc->parsed() ? bench_roc
                                                     : bench_power;
            // reversed token order, file settings parsed after the final flag
            std::vector<std::string> args = config_tokens(*active, opts.config);
            std::reverse(args.begin(), args.end());
            for (int i = argc - 1; i >= 1; --i) {
                args.emplace_back(argv[i]);
            }
            opts = Options{};
            app.parse(args);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    } catch (const cpt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }

    try {
        if (test->parsed()) {
            return cmd_test(opts);
        }
        if (simulate->parsed()) {
            return cmd_simulate(opts);
        }
        if (bench_roc->parsed()) {
            return cmd_bench_roc(opts);
        }
        return cmd_bench_power(opts);
    } catch (const cpt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}
