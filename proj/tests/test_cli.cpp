#include <catch2/catch.hpp>

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string cli = CRITSPECTRA_CLI_PATH;

fs::path temp_dir() {
    static std::uint64_t counter = 0;
    const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path dir = fs::temp_directory_path() /
                         ("critspectra_cli_" + std::to_string(tick) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args, const fs::path& stderr_file = {}) {
    std::string cmd = cli + " " + args + " > /dev/null";
    cmd += stderr_file.empty() ? " 2> /dev/null" : " 2> " + stderr_file.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

const std::string minimal_config =
    "L = 8\n"
    "tau = 16\n"
    "seed = 1\n"
    "equilibrationSteps = 10\n";

}

TEST_CASE("simulate is reproducible at the file level") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg", minimal_config);
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "a").string() + " --csv") == 0);
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "b").string()) == 0);
    const auto a = slurp(dir / "a" / "timeseries.csts");
    const auto b = slurp(dir / "b" / "timeseries.csts");
    REQUIRE(!a.empty());
    REQUIRE(a == b);
    REQUIRE(fs::exists(dir / "a" / "manifest.json"));
    REQUIRE(fs::exists(dir / "a" / "timeseries.csts.meta"));
    REQUIRE(fs::exists(dir / "a" / "timeseries.csv"));
    fs::remove_all(dir);
}

TEST_CASE("missing config field is a config error naming the field") {
    const auto dir = temp_dir();
    write_file(dir / "bad.cfg", "L = 8\nseed = 1\n");
    const auto err_file = dir / "stderr.txt";
    REQUIRE(run("simulate --config " + (dir / "bad.cfg").string() +
                " --out " + (dir / "out").string(), err_file) == 2);
    REQUIRE(slurp(err_file).find("tau") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("oversized lattices exit with the precondition code") {
    const auto dir = temp_dir();
    write_file(dir / "huge.cfg", "L = 60000\ntau = 4\nseed = 1\n");
    REQUIRE(run("simulate --config " + (dir / "huge.cfg").string() +
                " --out " + (dir / "out").string()) == 3);
    fs::remove_all(dir);
}

TEST_CASE("spectrum emits the requested artifacts") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg",
               "L = 16\ntau = 128\nseed = 3\nbeta2J = 0.2\nequilibrationSteps = 20\n");
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "sim").string()) == 0);
    REQUIRE(run("spectrum --input " + (dir / "sim" / "timeseries.csts").string() +
                " --out " + (dir / "spec").string() + " --mp-overlay") == 0);
    for (const char* name : {"zipf.csv", "density.csv", "spacing.csv", "sigma2.csv", "fit.csv"})
        REQUIRE(fs::exists(dir / "spec" / name));
    const auto density = slurp(dir / "spec" / "density.csv");
    REQUIRE(density.find("mp_density") != std::string::npos);
    REQUIRE(density.find("# config_digest=") != std::string::npos);
    const auto manifest = slurp(dir / "spec" / "manifest.json");
    REQUIRE(manifest.find("zipf.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("subsampling in the CLI is seed-deterministic") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg",
               "L = 8\ntau = 64\nseed = 5\nbeta2J = 0.1\nequilibrationSteps = 10\n");
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "sim").string()) == 0);
    const std::string input = (dir / "sim" / "timeseries.csts").string();
    REQUIRE(run("spectrum --input " + input + " --out " + (dir / "s1").string() +
                " --subsample 0.25 --seed 7 --observables zipf") == 0);
    REQUIRE(run("spectrum --input " + input + " --out " + (dir / "s2").string() +
                " --subsample 0.25 --seed 7 --observables zipf") == 0);
    REQUIRE(slurp(dir / "s1" / "zipf.csv") == slurp(dir / "s2" / "zipf.csv"));
    fs::remove_all(dir);
}

TEST_CASE("emerging spectrum on a non-singular matrix explains the precondition") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg",
               "L = 8\ntau = 128\nseed = 5\nbeta2J = 0.1\nequilibrationSteps = 10\n");
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "sim").string()) == 0);
    const auto err_file = dir / "stderr.txt";
    REQUIRE(run("spectrum --input " + (dir / "sim" / "timeseries.csts").string() +
                " --out " + (dir / "spec").string() +
                " --power-map 1.001 --observables emerging", err_file) == 3);
    const auto err = slurp(err_file);
    REQUIRE(err.find("singular") != std::string::npos);
    REQUIRE(err.find("tau") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("emerging spectrum appears for short windows") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg",
               "L = 8\ntau = 64\nseed = 5\nbeta2J = critical\nequilibrationSteps = 200\n");
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "sim").string()) == 0);
    REQUIRE(run("spectrum --input " + (dir / "sim" / "timeseries.csts").string() +
                " --out " + (dir / "spec").string() +
                " --tau-window N/4 --power-map 1.001 --observables zipf,emerging") == 0);
    const auto emerging = slurp(dir / "spec" / "emerging.csv");
    REQUIRE(!emerging.empty());
    REQUIRE(emerging.find("# q=") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("rmt-baseline writes model-tagged curves") {
    const auto dir = temp_dir();
    REQUIRE(run("rmt-baseline -D 64 --tau 8 -q 1.001 --replicas 3 --seed 9 --out " +
                (dir / "rmt").string()) == 0);
    const auto density = slurp(dir / "rmt" / "emerging_density.csv");
    REQUIRE(density.find("# model=WISHART") != std::string::npos);
    REQUIRE(fs::exists(dir / "rmt" / "emerging.csv"));
    fs::remove_all(dir);
}

TEST_CASE("oracle warns when the window cannot support a fit") {
    const auto dir = temp_dir();
    const auto err_file = dir / "stderr.txt";
    REQUIRE(run("oracle -d 2 -L 8 --theta 0.25 --out " + (dir / "o").string(),
                err_file) == 0);
    REQUIRE(slurp(err_file).find("window") != std::string::npos);
    REQUIRE(fs::exists(dir / "o" / "zipf_theory.csv"));
    REQUIRE_FALSE(fs::exists(dir / "o" / "fit.csv"));
    fs::remove_all(dir);
}

TEST_CASE("oracle fits the 1d exponent") {
    const auto dir = temp_dir();
    REQUIRE(run("oracle -d 1 -L 1024 --theta 0.25 --out " + (dir / "o").string()) == 0);
    const auto fit_csv = slurp(dir / "o" / "fit.csv");
    REQUIRE(!fit_csv.empty());
    std::istringstream in(fit_csv);
    std::string line;
    double zeta = 0.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'z') continue;
        zeta = std::stod(line.substr(0, line.find(',')));
        break;
    }
    REQUIRE(std::abs(zeta - 0.75) < 0.02);
    fs::remove_all(dir);
}

TEST_CASE("study runs the pipeline over sizes") {
    const auto dir = temp_dir();
    write_file(dir / "study.cfg",
               "sizes = 8,12\nrunsPerSize = 2\nseed = 4\nbeta2J = 0.2\n"
               "equilibrationSteps = 20\ntauOverN = 5\n"
               "windowMinDiv = 16\nwindowMaxDiv = 2\n");
    REQUIRE(run("study --config " + (dir / "study.cfg").string() +
                " --out " + (dir / "st").string() + " --jobs 2") == 0);
    const auto study = slurp(dir / "st" / "study.csv");
    int data_rows = 0;
    std::istringstream in(study);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'L') ++data_rows;
    REQUIRE(data_rows == 4);
    fs::remove_all(dir);
}

TEST_CASE("artifacts are reproducible from the manifest") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg", minimal_config);
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "a").string()) == 0);

    // Rebuild a config file from the manifest's resolved config and rerun.
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    std::string rebuilt;
    for (const auto& [key, value] : manifest.at("config").items())
        rebuilt += key + " = " + value.get<std::string>() + "\n";
    write_file(dir / "rebuilt.cfg", rebuilt);
    REQUIRE(run("simulate --config " + (dir / "rebuilt.cfg").string() +
                " --out " + (dir / "b").string()) == 0);
    REQUIRE(slurp(dir / "a" / "timeseries.csts") == slurp(dir / "b" / "timeseries.csts"));
    const auto manifest_b = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
    REQUIRE(manifest.at("config_digest") == manifest_b.at("config_digest"));
    fs::remove_all(dir);
}

TEST_CASE("explicitly requested fit failure maps to the precondition code") {
    const auto dir = temp_dir();
    write_file(dir / "run.cfg",
               "L = 8\ntau = 64\nseed = 2\nbeta2J = 0.1\nequilibrationSteps = 10\n");
    REQUIRE(run("simulate --config " + (dir / "run.cfg").string() +
                " --out " + (dir / "sim").string()) == 0);
    // D = 64: the default window has fewer than 5 usable points.
    REQUIRE(run("spectrum --input " + (dir / "sim" / "timeseries.csts").string() +
                " --out " + (dir / "spec").string() + " --observables fit") == 3);
    fs::remove_all(dir);
}

TEST_CASE("study pipeline errors exit with the numerical-failure code") {
    const auto dir = temp_dir();
    // Default window divisors leave no usable fit points at these sizes.
    write_file(dir / "study.cfg",
               "sizes = 8,12\nrunsPerSize = 1\nseed = 4\nbeta2J = 0.2\n"
               "equilibrationSteps = 10\ntauOverN = 5\n");
    const auto err_file = dir / "stderr.txt";
    REQUIRE(run("study --config " + (dir / "study.cfg").string() +
                " --out " + (dir / "st").string(), err_file) == 4);
    const auto err = slurp(err_file);
    REQUIRE(err.find("L=8") != std::string::npos);
    REQUIRE(err.find("seed=") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("unknown subcommand or flag is a config error") {
    REQUIRE(run("frobnicate") == 2);
    REQUIRE(run("simulate --nonsense x") == 2);
}
