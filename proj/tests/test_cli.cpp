#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(PLACELOC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("placeloc_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("features") == 1);  // --manifest is required
    CHECK(run("--jobs 0 synth-dataset") == 1);

    const fs::path dir = fresh_dir("usage");
    write_file(dir / "bad.cfg", "vocab.colour = red\n");
    write_file(dir / "manifest.tsv", "path\tlabel\tsequence\n");
    CHECK(run("--config " + (dir / "bad.cfg").string() + " features --manifest " + (dir / "manifest.tsv").string()) ==
          1);
    fs::remove_all(dir);
}

TEST_CASE("data errors exit with 2") {
    const fs::path dir = fresh_dir("data");
    CHECK(run("features --manifest " + (dir / "missing.tsv").string()) == 2);
    write_file(dir / "manifest.tsv", "file\tlabel\n");
    CHECK(run("--out " + dir.string() + " features --manifest " + (dir / "manifest.tsv").string()) == 2);
    write_file(dir / "manifest.tsv", "path\tlabel\tsequence\nnope.ppm\tA\t1\n");
    CHECK(run("--out " + dir.string() + " features --manifest " + (dir / "manifest.tsv").string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("synthetic data flows through the stages") {
    const fs::path dir = fresh_dir("flow");
    const std::string data = (dir / "data").string();
    REQUIRE(run("--seed 4 --out " + data + " synth-dataset --classes 3 --sequences 3 --per-sequence 2 --size 64") ==
            0);
    const std::string manifest = (dir / "data" / "manifest.tsv").string();
    REQUIRE(fs::exists(manifest));
    write_file(dir / "small.cfg", "vocab.k = 8\nvocab.max_iter = 10\n");
    const std::string common = "--config " + (dir / "small.cfg").string() + " --out " + (dir / "ws").string() + " ";

    // Predicting before training is a data error.
    CHECK(run(common + "predict --manifest " + manifest) == 2);

    // One unreadable image is tolerated.
    write_file(dir / "data" / "images" / "Corridor" / "s1_000.ppm", "P6\n1 1\n255\n");
    CHECK(run(common + "features --manifest " + manifest) == 0);
    CHECK(run(common + "vocab --manifest " + manifest) == 0);
    CHECK(run(common + "encode --manifest " + manifest) == 0);
    CHECK(run(common + "train --manifest " + manifest) == 0);
    CHECK(run(common + "predict --manifest " + manifest) == 0);
    CHECK(run(common + "evaluate --manifest " + manifest) == 0);
    CHECK(fs::exists(dir / "ws" / "report" / "summary.csv"));
    CHECK(fs::exists(dir / "ws" / "model.bin"));
    CHECK(fs::exists(dir / "ws" / "vocab.bin"));

    // Changing the feature configuration after training is refused.
    write_file(dir / "other.cfg", "vocab.k = 8\nvocab.max_iter = 10\nfeatures.rgb.measure = chi2\n");
    CHECK(run("--config " + (dir / "other.cfg").string() + " --out " + (dir / "ws").string() +
              " predict --manifest " + manifest) == 2);
    fs::remove_all(dir);
}

TEST_CASE("environment failures exit with 3") {
    const fs::path dir = fresh_dir("internal");
    write_file(dir / "blocker", "a file where a directory is needed");
    CHECK(run("--out " + (dir / "blocker").string() + " synth-dataset --classes 1 --sequences 1 --per-sequence 1") ==
          3);
    fs::remove_all(dir);
}
