#include <gtest/gtest.h>

#include "cli_runner.hpp"
#include "json.hpp"

namespace {

void make_corpus(const TempDir& dir) {
    ASSERT_EQ(run_cli(dir.path(), "synth --seed 4 --n-isolates 40 --contig-length 500 --marker GATTACA --out-dir corpus")
                  .exit_code,
              0);
    ASSERT_EQ(run_cli(dir.path(), "matrix --fasta-dir corpus/fasta --labels corpus/labels.tsv --k 7 --out-dir mat")
                  .exit_code,
              0);
}

}  // namespace

TEST(Cli, EndToEndSmokeRun) {
    TempDir dir("cli_e2e");
    make_corpus(dir);
    CliResult train = run_cli(dir.path(), "train --matrix mat/matrix.kmat --n-trees 20 --seed 2 --out-dir model");
    ASSERT_EQ(train.exit_code, 0) << train.err;
    CliResult eval = run_cli(dir.path(),
                             "eval --matrix mat/matrix.kmat --model model/model.bin --seed 2 "
                             "--annotation corpus/annotation.tsv --out-dir eval");
    ASSERT_EQ(eval.exit_code, 0) << eval.err;
    auto report = nlohmann::json::parse(read_all(dir / "eval/report.json"));
    EXPECT_EQ(report["k"], 7);
    EXPECT_EQ(report["n_isolates"], 40);
    EXPECT_EQ(report["n_test"], 8);
    EXPECT_TRUE(report.contains("roc_points"));
    EXPECT_TRUE(std::filesystem::exists(dir / "eval/roc.tsv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "eval/eval.manifest"));

    CliResult regions = run_cli(dir.path(),
                                "regions --model model/model.bin --matrix mat/matrix.kmat "
                                "--annotation corpus/annotation.tsv --out-dir regions");
    ASSERT_EQ(regions.exit_code, 0) << regions.err;
    EXPECT_EQ(read_all(dir / "regions/regions.tsv").substr(0, 16), "rank\tregion_id\ti");

    CliResult curve = run_cli(dir.path(),
                              "learning-curve --matrix mat/matrix.kmat --sizes 20,40 --repeats 2 --n-trees 10 "
                              "--out-dir curve");
    ASSERT_EQ(curve.exit_code, 0) << curve.err;
    CliResult stability = run_cli(dir.path(),
                                  "stability --matrix mat/matrix.kmat --annotation corpus/annotation.tsv "
                                  "--sizes 20 --repeats 2 --n-trees 10 --out-dir stab");
    ASSERT_EQ(stability.exit_code, 0) << stability.err;
    CliResult count = run_cli(dir.path(), "count --fasta-dir corpus/fasta --k 3 --out-dir counts");
    ASSERT_EQ(count.exit_code, 0) << count.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "counts/histograms/iso0001.tsv"));
}

TEST(Cli, MatrixPrintsVocabularySize) {
    TempDir dir("cli_vocab");
    make_corpus(dir);
    CliResult r = run_cli(dir.path(), "matrix --fasta-dir corpus/fasta --k 2 --canonical false --out-dir m2");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, "vocabulary_size\t16\n");
}

TEST(Cli, DomainErrorsExitOneWithJson) {
    TempDir dir("cli_errors");
    make_corpus(dir);
    CliResult big_k = run_cli(dir.path(), "matrix --fasta-dir corpus/fasta --k 40 --out-dir x");
    EXPECT_EQ(big_k.exit_code, 1);
    auto err = nlohmann::json::parse(big_k.err);
    EXPECT_EQ(err["error"], "KTooLarge");
    EXPECT_EQ(std::count(big_k.err.begin(), big_k.err.end(), '\n'), 1);

    ASSERT_EQ(run_cli(dir.path(), "matrix --fasta-dir corpus/fasta --k 5 --labels corpus/labels.tsv --out-dir m5")
                  .exit_code,
              0);
    ASSERT_EQ(run_cli(dir.path(), "train --matrix m5/matrix.kmat --n-trees 3 --out-dir model5").exit_code, 0);
    CliResult mismatch = run_cli(dir.path(), "eval --matrix mat/matrix.kmat --model model5/model.bin --out-dir x");
    EXPECT_EQ(mismatch.exit_code, 1);
    EXPECT_EQ(nlohmann::json::parse(mismatch.err)["error"], "FeatureCountMismatch");
}

TEST(Cli, UsageErrorsExitTwo) {
    TempDir dir("cli_usage");
    EXPECT_EQ(run_cli(dir.path(), "").exit_code, 2);
    EXPECT_EQ(run_cli(dir.path(), "train").exit_code, 2);
    EXPECT_EQ(run_cli(dir.path(), "eval --matrix m --no-such-flag 1").exit_code, 2);
    EXPECT_EQ(run_cli(dir.path(), "--help").exit_code, 0);
}

TEST(Cli, ManifestReplaysByteIdentically) {
    TempDir dir("cli_manifest");
    make_corpus(dir);
    ASSERT_EQ(run_cli(dir.path(), "eval --matrix mat/matrix.kmat --n-trees 15 --seed 8 --out-dir first").exit_code, 0);
    std::filesystem::copy_file(dir / "first/eval.manifest", dir / "replay.cfg");
    ASSERT_EQ(run_cli(dir.path(), "--config replay.cfg --threads 3").exit_code, 0);  // rewrites first/
    EXPECT_EQ(read_all(dir / "replay.cfg"), read_all(dir / "first/eval.manifest"));

    ASSERT_EQ(run_cli(dir.path(), "--config replay.cfg --out-dir second").exit_code, 0);
    EXPECT_EQ(read_all(dir / "first/report.json"), read_all(dir / "second/report.json"));
    EXPECT_EQ(read_all(dir / "first/roc.tsv"), read_all(dir / "second/roc.tsv"));

    // Flags override the file.
    ASSERT_EQ(run_cli(dir.path(), "--config replay.cfg --seed 9 --out-dir third").exit_code, 0);
    EXPECT_EQ(nlohmann::json::parse(read_all(dir / "third/report.json"))["seed"], 9);
}
