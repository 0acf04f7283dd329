#include "doctest.h"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ScratchDir {
    fs::path path = fs::temp_directory_path() / ("laxkit_cli_" + std::to_string(::getpid()));
    ScratchDir() { fs::create_directories(path); }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path scratch() {
    static const ScratchDir dir;
    return dir.path;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = env + " " + LAXKIT_CLI_PATH + " " + args + " > " + out.string() + " 2> " +
                            (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("grading command") {
    Result r = run("grading --family C --rank 3 --root 1 --json");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["depth"] == 2);
    CHECK(j["dims"] == json{{"-2", 1}, {"-1", 4}, {"0", 11}, {"1", 4}, {"2", 1}});
    CHECK(j["mist_residual"] == 0);
    CHECK(j["schema_version"] == 1);

    CHECK(json::parse(run("grading --family A --rank 2 --root 1 --json").out)["depth"] == 1);
    CHECK(json::parse(run("grading --family G2 --rank 2 --root 1 --json").out)["depth"] == 3);
    r = run("grading --family C --rank 3 --root 1");
    CHECK(r.out.find("dims (1,4,11,4,1)") != std::string::npos);

    CHECK(run("grading --family Q --rank 3 --root 1").code == 2);
    CHECK(run("grading --family C --rank 3 --root 4").code == 2);
    CHECK(run("grading --family G2 --rank 3 --root 1").code == 2);
    CHECK(run("grading --family C --rank 3").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("verify command") {
    Result r = run("verify --suite closure --seed 7");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["passed"] == true);
    CHECK(j["seed"] == 7);
    CHECK(j["schema_version"] == 1);
    CHECK(j["checks"].size() == 15);
    for (const auto& c : j["checks"]) CHECK(c["count"] == 200);

    r = run("verify --suite dims --seed 3");
    CHECK(r.code == 0);
    const json dims = json::parse(r.out);
    CHECK(dims["counterexample"].is_null());
    CHECK(json::parse(run("verify --suite dims --seed 3").out)["checks"] == dims["checks"]);

    r = run("verify --suite cocycle --seed 7");
    CHECK(r.code == 0);
    bool window = false;
    const json cocycle = json::parse(r.out);
    for (const auto& c : cocycle["checks"])
        if (c["name"].get<std::string>().rfind("locality window", 0) == 0) window = true;
    CHECK(window);

    CHECK(run("verify --suite nonsense").code == 2);
    CHECK(run("verify").code == 2);

    // Red suites exit 1 and carry the first counterexample.
    r = run("verify --suite conservation --seed 7");
    CHECK(r.code == 1);
    CHECK_FALSE(json::parse(r.out)["counterexample"].is_null());
}

TEST_CASE("seed precedence: flag over config file over LAXKIT_SEED") {
    const fs::path cfg = scratch() / "cfg.json";
    std::ofstream(cfg) << R"({"suite": "identities", "seed": 11})";
    CHECK(json::parse(run("verify --suite identities", "LAXKIT_SEED=5").out)["seed"] == 5);
    CHECK(json::parse(run("--config " + cfg.string() + " verify", "LAXKIT_SEED=5").out)["seed"] == 11);
    CHECK(json::parse(run("--config " + cfg.string() + " verify --seed 9", "LAXKIT_SEED=5").out)["seed"] == 9);
    CHECK(run("verify --suite identities", "LAXKIT_SEED=abc").code == 2);
    std::ofstream(cfg) << "not json";
    CHECK(run("--config " + cfg.string() + " verify --suite identities").code == 2);
}

TEST_CASE("cm command") {
    const fs::path csv = scratch() / "a.csv", rep = scratch() / "a.json";
    Result r = run("cm --family A --n 2 --T 10 --dt 1e-3 --out " + csv.string() + " --report " + rep.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(slurp(rep));
    CHECK(j["max_H_drift"].get<double>() < 1e-8);
    CHECK(j["schema_version"] == 1);
    CHECK_FALSE(j.contains("q0"));
    const auto rows = lines(slurp(csv));
    REQUIRE(rows.size() == 102);
    CHECK(rows[0].rfind("t,q_1,q_2,p_1,p_2,H,inv_p2_z1,", 0) == 0);

    REQUIRE(run("cm --family A --n 3 --T 0 --out " + csv.string()).code == 0);
    CHECK(lines(slurp(csv)).size() == 2);

    REQUIRE(run("cm --family B --n 2 --T 1 --out " + csv.string() + " --report " + rep.string()).code == 0);
    const json b = json::parse(slurp(rep));
    REQUIRE(b.contains("q0"));
    CHECK(b["q0"]["velocity"] == 0.0);
    CHECK(b["q0"]["frozen"] == true);

    // Attractive coupling: particles collide, the CSV ends with a marker row.
    r = run("cm --family D --n 3 --T 60 --coupling 1 0 --seed 1 --out " + csv.string());
    CHECK(r.code == 3);
    const auto cut = lines(slurp(csv));
    REQUIRE(cut.size() > 2);
    CHECK(cut.back().rfind("# truncated", 0) == 0);

    CHECK(run("cm --family G2 --n 2 --out " + csv.string()).code == 2);
    CHECK(run("cm --family A --n 2 --scheme euler --out " + csv.string()).code == 2);
    CHECK(run("cm --family A --n 2").code == 2);
}

TEST_CASE("involution command") {
    Result r = run("involution --family A --n 3 --powers 2..4 --seed 1");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["brackets"].size() == 3);
    CHECK(j["max_abs_bracket"].get<double>() < 1e-6);

    r = run("involution --family D --n 2 --powers 2,4 --seed 1");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["max_abs_bracket"].get<double>() < 1e-6);

    r = run("involution --family A --n 2 --powers 2");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["brackets"].empty());

    CHECK(run("involution --family C --n 2 --powers 2,3").code == 2);
    CHECK(run("involution --family A --n 2 --powers 2,x").code == 2);
}
