// amrkit: command-line front end for the k-mer AMR pipeline.
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "amrkit/error.hpp"
#include "amrkit/evaluation.hpp"
#include "amrkit/feature_matrix.hpp"
#include "amrkit/kmer.hpp"
#include "amrkit/model_io.hpp"
#include "amrkit/regions.hpp"
#include "amrkit/report.hpp"
#include "amrkit/sequence_io.hpp"
#include "amrkit/synth.hpp"
#include "amrkit/training_set.hpp"
#include "amrkit/version.hpp"

namespace fs = std::filesystem;
using namespace amrkit;

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
    return in;
}

std::vector<fs::path> fasta_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) fail(ErrorCode::IoError, "not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".fasta" || ext == ".fa" || ext == ".fna" || ext == ".fas"))
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) fail(ErrorCode::EmptyDataset, "no FASTA files in " + dir.string());
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string_view token(text.data() + start, end - start);
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value == 0)
            fail(ErrorCode::InvalidParameter, "bad size list '" + text + "'");
        sizes.push_back(value);
        start = end + 1;
    }
    return sizes;
}

MaxFeatures parse_max_features(const std::string& text) {
    if (text == "sqrt") return MaxFeatures::sqrt();
    if (text == "all") return MaxFeatures::all();
    std::size_t m = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), m);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || m == 0)
        fail(ErrorCode::InvalidParameter, "max-features must be sqrt, all or a positive integer");
    return MaxFeatures::fixed(m);
}

// Option values shared by several subcommands.
struct Common {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir = ".";
};

struct ForestFlags {
    std::uint32_t n_trees = 100;
    std::string max_features = "sqrt";
    bool bootstrap = true;
    std::uint32_t max_depth = 0;
    std::uint32_t min_samples_split = 2;

    ForestParams params(std::uint64_t seed) const {
        ForestParams p;
        p.n_trees = n_trees;
        p.max_features = parse_max_features(max_features);
        p.bootstrap = bootstrap;
        p.max_depth = max_depth;
        p.min_samples_split = min_samples_split;
        p.seed = seed;
        p.validate();
        return p;
    }
};

struct LearnerFlags {
    std::string algorithm = "forest";
    ForestFlags forest;
    std::uint32_t rounds = 50;
    double lambda = 0.01;
    std::uint32_t max_iters = 1000;
    double tolerance = 1e-6;

    LearnerConfig config(std::uint64_t seed) const {
        LearnerConfig c;
        c.algorithm = parse_algorithm(algorithm);
        c.forest = forest.params(seed);
        c.boost.n_rounds = rounds;
        c.boost.seed = seed;
        c.linear.lambda = lambda;
        c.linear.max_iters = max_iters;
        c.linear.tolerance = tolerance;
        return c;
    }
};

struct SplitFlags {
    double test_fraction = 0.2;
    bool stratified = true;

    SplitSpec spec(std::uint64_t seed) const {
        SplitSpec s{test_fraction, stratified, seed};
        s.validate();
        return s;
    }
};

void add_seed(CLI::App* sub, Common& c) { sub->add_option("--seed", c.seed, "Seed for every random choice"); }
void add_threads(CLI::App* sub, Common& c) {
    sub->add_option("--threads", c.threads, "Worker threads (output does not depend on this)")
        ->check(CLI::Range(1u, 1024u));
}
void add_out_dir(CLI::App* sub, Common& c) { sub->add_option("--out-dir", c.out_dir, "Output directory"); }

void add_forest(CLI::App* sub, ForestFlags& f) {
    sub->add_option("--n-trees", f.n_trees, "Trees in the forest");
    sub->add_option("--max-features", f.max_features, "Candidates per node: sqrt, all or a count");
    sub->add_option("--bootstrap", f.bootstrap, "Bootstrap-resample each tree (true/false)");
    sub->add_option("--max-depth", f.max_depth, "Depth limit, 0 = unlimited");
    sub->add_option("--min-samples-split", f.min_samples_split, "Smallest node that may be split");
}

void add_learner(CLI::App* sub, LearnerFlags& l) {
    sub->add_option("--algorithm", l.algorithm, "forest, adaboost or lasso");
    add_forest(sub, l.forest);
    sub->add_option("--rounds", l.rounds, "AdaBoost rounds");
    sub->add_option("--lambda", l.lambda, "L1 penalty of the lasso model");
    sub->add_option("--max-iters", l.max_iters, "Coordinate-descent sweep limit");
    sub->add_option("--tolerance", l.tolerance, "Coordinate-descent convergence tolerance");
}

void add_split(CLI::App* sub, SplitFlags& s) {
    sub->add_option("--test-fraction", s.test_fraction, "Share of rows held out for testing");
    sub->add_option("--stratified", s.stratified, "Keep class ratios in the split (true/false)");
}

// Records every option of `sub` except --threads, so the run can be replayed
// with --config. Unset options without a default are left out.
void write_manifest(const CLI::App* sub, const fs::path& out_dir) {
    auto out = open_output(out_dir / (sub->get_name() + ".manifest"));
    out << "# amrkit " << kVersion << '\n';
    out << "command=" << sub->get_name() << '\n';
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "threads") continue;
        std::string value = opt->count() > 0 ? opt->results().back() : opt->get_default_str();
        if (value.empty()) continue;
        out << name << '=' << value << '\n';
    }
}

LabelMap read_labels(const std::string& path) {
    if (path.empty()) return {};
    auto in = open_input(path);
    return load_labels(in);
}

RegionAnnotation read_annotation(const std::string& path, const KmerSpec& spec) {
    auto in = open_input(path);
    return load_region_annotation(in, spec);
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
}

// Moves `--config FILE` entries in front of the command-line flags so that
// explicit flags, parsed later, win. Returns the rewritten argument list.
std::vector<std::string> expand_config(int argc, char** argv, const std::vector<std::string>& commands) {
    std::vector<std::string> rest;
    std::optional<std::string> config;
    std::optional<std::string> command;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            config = argv[++i];
        } else if (arg.rfind("--config=", 0) == 0) {
            config = arg.substr(9);
        } else if (!command && std::find(commands.begin(), commands.end(), arg) != commands.end()) {
            command = arg;
        } else {
            rest.push_back(arg);
        }
    }
    std::vector<std::string> from_file;
    if (config) {
        auto in = open_input(*config);
        std::string line;
        while (std::getline(in, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(ErrorCode::InvalidParameter, "config line without '=': " + line);
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t\r"));
                s.erase(s.find_last_not_of(" \t\r") + 1);
                return s;
            };
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key == "command") {
                if (!command) command = value;
            } else {
                from_file.push_back("--" + key + "=" + value);
            }
        }
    }
    std::vector<std::string> args;
    if (command) args.push_back(*command);
    args.insert(args.end(), from_file.begin(), from_file.end());
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
}

void print_error(std::string_view code, std::string_view message) {
    nlohmann::json j;
    j["error"] = code;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"amrkit: k-mer features and ensemble classifiers for resistance phenotypes"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(kVersion));
    app.add_option("--config", "key=value file whose entries act as flags; explicit flags override it");

    Common common;
    KmerSpec kspec;
    std::string fasta_dir, labels_path, vocabulary_path, matrix_path, model_path, test_matrix_path, annotation_path;
    std::string sizes_text = "25,50,100,200";
    bool binarize_flag = false, all_rows = false;
    std::size_t repeats = 10, top_n = 10;
    std::string protocol = "subsample";
    LearnerFlags learner;
    ForestFlags forest;
    SplitFlags split;
    SynthSpec synth;

    auto add_kmer = [&](CLI::App* sub) {
        sub->add_option("--k", kspec.k, "k-mer length (1..32)");
        sub->add_option("--canonical", kspec.canonical, "Merge reverse complements (true/false)");
    };

    CLI::App* count = app.add_subcommand("count", "Per-isolate k-mer counts and occurrence histograms");
    count->add_option("--fasta-dir", fasta_dir, "Directory of FASTA files, one isolate each")->required();
    add_kmer(count);
    add_threads(count, common);
    add_out_dir(count, common);

    CLI::App* matrix = app.add_subcommand("matrix", "Build a KMAT1 feature matrix");
    matrix->add_option("--fasta-dir", fasta_dir, "Directory of FASTA files, one isolate each")->required();
    matrix->add_option("--labels", labels_path, "Two-column label TSV");
    add_kmer(matrix);
    matrix->add_option("--binarize", binarize_flag, "Store presence/absence instead of counts (true/false)");
    matrix->add_option("--vocabulary", vocabulary_path, "Project onto an existing KVOC1 vocabulary");
    add_threads(matrix, common);
    add_out_dir(matrix, common);

    CLI::App* train = app.add_subcommand("train", "Fit a model on the training side of a split");
    train->add_option("--matrix", matrix_path, "KMAT1 matrix")->required();
    add_learner(train, learner);
    add_split(train, split);
    train->add_option("--all-rows", all_rows, "Train on every labeled row (true/false)");
    add_seed(train, common);
    add_threads(train, common);
    add_out_dir(train, common);

    CLI::App* eval = app.add_subcommand("eval", "Holdout accuracy and ROC");
    eval->add_option("--matrix", matrix_path, "KMAT1 matrix")->required();
    eval->add_option("--model", model_path, "Score this model instead of training one");
    eval->add_option("--test-matrix", test_matrix_path, "Train on --matrix, test on this matrix");
    eval->add_option("--annotation", annotation_path, "Region annotation for top_regions (forest only)");
    eval->add_option("--top-n", top_n, "Regions listed in the report");
    add_learner(eval, learner);
    add_split(eval, split);
    add_seed(eval, common);
    add_threads(eval, common);
    add_out_dir(eval, common);

    CLI::App* curve = app.add_subcommand("learning-curve", "Forest accuracy over subsample sizes");
    curve->add_option("--matrix", matrix_path, "KMAT1 matrix")->required();
    curve->add_option("--sizes", sizes_text, "Comma-separated ascending subsample sizes");
    curve->add_option("--repeats", repeats, "Repeats per size");
    curve->add_option("--protocol", protocol, "subsample (split inside each subsample) or fixed-test")
        ->check(CLI::IsMember({"subsample", "fixed-test"}));
    add_forest(curve, forest);
    add_split(curve, split);
    add_seed(curve, common);
    add_threads(curve, common);
    add_out_dir(curve, common);

    CLI::App* regions = app.add_subcommand("regions", "Rank annotated regions by forest importance");
    regions->add_option("--model", model_path, "Forest model file")->required();
    regions->add_option("--matrix", matrix_path, "Matrix the model was trained on (for its vocabulary)")->required();
    regions->add_option("--annotation", annotation_path, "Two-column k-mer/region TSV")->required();
    regions->add_option("--top-n", top_n, "Regions to keep, 0 = all");
    add_threads(regions, common);
    add_out_dir(regions, common);

    CLI::App* stability = app.add_subcommand("stability", "Region rank statistics over repeated subsamples");
    stability->add_option("--matrix", matrix_path, "KMAT1 matrix")->required();
    stability->add_option("--annotation", annotation_path, "Two-column k-mer/region TSV")->required();
    stability->add_option("--sizes", sizes_text, "Comma-separated ascending subsample sizes");
    stability->add_option("--repeats", repeats, "Repeats per size");
    add_forest(stability, forest);
    add_seed(stability, common);
    add_threads(stability, common);
    add_out_dir(stability, common);

    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with a planted marker");
    synth_cmd->add_option("--n-isolates", synth.n_isolates, "Isolates to generate");
    synth_cmd->add_option("--n-contigs", synth.n_contigs_per_isolate, "Contigs per isolate");
    synth_cmd->add_option("--contig-length", synth.contig_length, "Bases per contig");
    synth_cmd->add_option("--resistant-fraction", synth.resistant_fraction, "Probability of a RES label");
    synth_cmd->add_option("--marker", synth.marker, "Planted k-mer");
    synth_cmd->add_option("--presence-res", synth.marker_presence_in_res, "Marker probability in RES isolates");
    synth_cmd->add_option("--presence-sus", synth.marker_presence_in_sus, "Marker probability in SUS isolates");
    synth_cmd->add_option("--gc", synth.background_gc, "Background GC fraction");
    add_seed(synth_cmd, common);
    add_threads(synth_cmd, common);
    add_out_dir(synth_cmd, common);

    std::vector<std::string> names;
    for (const CLI::App* sub : app.get_subcommands({})) names.push_back(sub->get_name());

    try {
        std::vector<std::string> args = expand_config(argc, argv, names);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        const fs::path out_dir = common.out_dir;
        CLI::App* sub = app.get_subcommands().front();

        if (sub == count) {
            kspec.validate();
            for (const fs::path& path : fasta_files(fasta_dir)) {
                Dataset ds = assemble_dataset({path}, {});
                const Isolate& iso = ds.isolates.front();
                KmerCounts counts = count_kmers(iso, kspec);
                std::vector<std::pair<KmerCode, std::uint64_t>> sorted(counts.table.begin(), counts.table.end());
                std::sort(sorted.begin(), sorted.end());
                auto out = open_output(out_dir / "counts" / (iso.isolate_id + ".tsv"));
                for (const auto& [code, n] : sorted) out << decode_kmer(code, kspec.k) << '\t' << n << '\n';
                auto hist = open_output(out_dir / "histograms" / (iso.isolate_id + ".tsv"));
                write_histogram_tsv(hist, histogram(counts));
            }
        } else if (sub == matrix) {
            Dataset ds = assemble_dataset(fasta_files(fasta_dir), read_labels(labels_path),
                                          AssembleOptions{{}, common.threads});
            FeatureMatrix m = vocabulary_path.empty() ? build_matrix(ds, kspec, common.threads)
                                                      : build_matrix(ds, load_vocabulary(vocabulary_path), common.threads);
            if (binarize_flag) m = binarize(std::move(m));
            fs::create_directories(out_dir);
            save_matrix(m, out_dir / "matrix.kmat");
            save_vocabulary(m.vocabulary, out_dir / "vocabulary.kvoc");
            std::cout << "vocabulary_size\t" << m.n_features() << '\n';
        } else if (sub == train) {
            FeatureMatrix m = load_matrix(matrix_path);
            const LearnerConfig config = learner.config(common.seed);
            std::vector<std::size_t> rows =
                all_rows ? m.labeled_rows() : train_test_split(m, split.spec(common.seed)).train;
            Model model = train_model(TrainingSet(m, rows), config, common.threads);
            fs::create_directories(out_dir);
            save_model(model, out_dir / "model.bin");
        } else if (sub == eval) {
            FeatureMatrix m = load_matrix(matrix_path);
            EvalReport report;
            std::optional<Model> model;
            if (!test_matrix_path.empty()) {
                FeatureMatrix test = load_matrix(test_matrix_path);
                report = cross_dataset_eval(m, test, learner.config(common.seed), common.threads);
            } else {
                const TrainTestSplit parts = train_test_split(m, split.spec(common.seed));
                if (!model_path.empty()) {
                    model = load_model(model_path);
                } else {
                    model = train_model(TrainingSet(m, parts.train), learner.config(common.seed), common.threads);
                }
                report = evaluate_model(*model, m, parts.test);
                report.n_train = parts.train.size();
            }
            report.seed = common.seed;
            if (!annotation_path.empty() && model && std::holds_alternative<ForestModel>(*model)) {
                report.top_regions = rank_regions(std::get<ForestModel>(*model), m.vocabulary,
                                                  read_annotation(annotation_path, m.vocabulary.spec()), top_n);
            }
            write_text(out_dir / "report.json", eval_report_json(report));
            auto roc = open_output(out_dir / "roc.tsv");
            write_roc_tsv(roc, report.roc);
            std::cout << "accuracy\t" << format_double(report.accuracy) << "\nauc\t" << format_double(report.roc.auc)
                      << '\n';
        } else if (sub == curve) {
            FeatureMatrix m = load_matrix(matrix_path);
            CurveSpec spec{parse_sizes(sizes_text), repeats, split.spec(common.seed).test_fraction,
                           protocol == "subsample" ? CurveProtocol::SubsampleThenSplit : CurveProtocol::FixedTestSet,
                           common.seed};
            LearningCurve lc = learning_curve(m, spec, forest.params(common.seed), common.threads);
            auto out = open_output(out_dir / "curve.tsv");
            write_curve_tsv(out, lc);
        } else if (sub == regions) {
            FeatureMatrix m = load_matrix(matrix_path);
            Model model = load_model(model_path);
            if (!std::holds_alternative<ForestModel>(model))
                fail(ErrorCode::InvalidParameter, "region ranking needs a forest model");
            RegionRanking ranking = rank_regions(std::get<ForestModel>(model), m.vocabulary,
                                                 read_annotation(annotation_path, m.vocabulary.spec()), top_n);
            auto out = open_output(out_dir / "regions.tsv");
            write_ranking_tsv(out, ranking);
        } else if (sub == stability) {
            FeatureMatrix m = load_matrix(matrix_path);
            StabilitySpec spec{parse_sizes(sizes_text), repeats, common.seed};
            StabilityTable table = rank_stability(m, spec, read_annotation(annotation_path, m.vocabulary.spec()),
                                                  forest.params(common.seed), common.threads);
            auto out = open_output(out_dir / "stability.tsv");
            write_stability_tsv(out, table);
        } else if (sub == synth_cmd) {
            synth.seed = common.seed;
            SynthCorpus corpus = generate_corpus(synth);
            write_corpus(corpus, synth, out_dir);
        }
        write_manifest(sub, out_dir);
        return 0;
    } catch (const Error& e) {
        print_error(to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("Internal", e.what());
        return 1;
    }
}
