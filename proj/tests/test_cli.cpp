#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path kExamples = GMI_EXAMPLE_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gmi_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(GMI_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void expect_same_tree(const fs::path& a, const fs::path& b) {
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++files;
    }
    EXPECT_GT(files, 0);
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

}  // namespace

TEST(Cli, CommandsAreDeterministic) {
    const std::string walk = (kExamples / "walk.toml").string();
    const std::string robust = (kExamples / "robust.toml").string();
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"simulate", walk}, {"forecast", walk}, {"factorize", walk}, {"robust", robust}};
    for (const auto& [cmd, cfg] : runs) {
        const fs::path a = scratch(cmd + "_a"), b = scratch(cmd + "_b");
        ASSERT_EQ(run(cmd + " --config " + cfg + " --out " + a.string() + " --seed 5"), 0) << cmd;
        ASSERT_EQ(run(cmd + " --config " + cfg + " --out " + b.string() + " --seed 5"), 0) << cmd;
        expect_same_tree(a, b);
    }
}

TEST(Cli, GoldenForecast) {
    const fs::path out = scratch("golden");
    ASSERT_EQ(run("forecast --config " + (kExamples / "walk.toml").string() + " --out " + out.string()), 0);
    EXPECT_EQ(slurp(out / "forecast.json"), slurp(kExamples / "golden" / "forecast.json"));
    EXPECT_EQ(slurp(out / "forecasts.csv"), slurp(kExamples / "golden" / "forecasts.csv"));
}

TEST(Cli, SeedChangesSimulation) {
    const fs::path a = scratch("seed_a"), b = scratch("seed_b");
    const std::string cfg = (kExamples / "walk.toml").string();
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + a.string() + " --seed 1"), 0);
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + b.string() + " --seed 2"), 0);
    EXPECT_NE(slurp(a / "series.csv"), slurp(b / "series.csv"));
    EXPECT_EQ(slurp(a / "series.csv").rfind("t,component_1\n", 0), 0u);
}

TEST(Cli, SingletonRobustEqualsForecast) {
    const fs::path dir = scratch("singleton");
    write(dir / "cfg.toml", R"(
[increment]
patterns = [{ mu = 1, s = 1, order = 1 }]
[signal]
num = [1.0]
den = [1.0, -0.5]
[noise]
num = [0.8]
[grid]
M = 256
[forecast]
trunc = 24
[functional]
horizon = 1
)");
    ASSERT_EQ(run("forecast --config " + (dir / "cfg.toml").string() + " --out " + dir.string()), 0);
    ASSERT_EQ(run("robust --config " + (dir / "cfg.toml").string() + " --out " + dir.string()), 0);
    const auto fc = nlohmann::json::parse(slurp(dir / "forecast.json"));
    const auto rb = nlohmann::json::parse(slurp(dir / "robust.json"));
    EXPECT_NEAR(fc["mse"].get<double>(), rb["worst_case_mse"].get<double>(), 1e-12);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("codes");
    EXPECT_EQ(run("forecast --config " + (dir / "missing.toml").string()), 2);
    write(dir / "broken.toml", "[increment\npatterns = 3\n");
    EXPECT_EQ(run("forecast --config " + (dir / "broken.toml").string()), 2);
    EXPECT_EQ(run("forecast"), 2);

    const std::string base = R"(
[increment]
patterns = [{ mu = 1, s = 1, order = 1 }]
[signal]
num = [1.0]
[noise]
num = [0.5]
[grid]
M = 256
[forecast]
trunc = 16
)";
    write(dir / "obs.csv", "t,component_1\n0,1.0\n1,abc\n");
    write(dir / "data.toml", base + "[observations]\npath = \"obs.csv\"\n");
    EXPECT_EQ(run("forecast --config " + (dir / "data.toml").string() + " --out " + dir.string()), 3);

    write(dir / "numeric.toml", base + "[factorize]\ntarget = \"noise\"\nK = 8\n");
    write(dir / "neg.toml", R"(
[increment]
patterns = [{ mu = 1, s = 1, order = 1 }]
[signal]
num = [1.0]
[noise]
model = "constant"
value = [[-1.0]]
[grid]
M = 256
[factorize]
target = "noise"
K = 8
)");
    EXPECT_EQ(run("factorize --config " + (dir / "neg.toml").string() + " --out " + dir.string()), 4);
    EXPECT_EQ(run("factorize --config " + (dir / "numeric.toml").string() + " --out " + dir.string()), 0);
    // nothing half-written is left behind
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}
