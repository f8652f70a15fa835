#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "config.hpp"

namespace fs = std::filesystem;
using cli::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
    json report() const { return json::parse(out); }
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("schottky-cli-test-" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string example(const std::string& name) { return std::string(SCHOTTKY_EXAMPLES) + "/" + name; }

Run run(const std::string& args) {
    const fs::path out = scratch() / "stdout", err = scratch() / "stderr";
    const std::string cmd =
        std::string(SCHOTTKY_CLI) + " " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::complex<double> cx(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

}  // namespace

TEST_CASE("validate") {
    const Run ok = run("validate " + example("genus1.json"));
    CHECK(ok.code == 0);
    const json r = ok.report();
    CHECK(r["schema"] == "schottky-report/1");
    CHECK(r["validation"]["status"] == "PASS");

    const Run bad = run("validate " + example("overlapping.json"));
    CHECK(bad.code == 1);
    const json b = bad.report();
    CHECK(b["validation"]["status"] == "FAIL");
    bool named = false;
    for (const auto& n : b["validation"]["failed"]) named = named || n == "disjoint D1,D'1";
    CHECK(named);
    CHECK(bad.err.find("D1,D'1") != std::string::npos);
}

TEST_CASE("parse errors exit with 2 and say where") {
    const Run syntax = run("validate " + example("malformed.json"));
    CHECK(syntax.code == 2);
    CHECK(syntax.err.find("malformed.json:3:") != std::string::npos);
    CHECK(syntax.out.empty());

    json doc = json::parse(slurp(example("genus1.json")));
    doc["generators"][0]["fixed_points"]["multiplier"] = json::array({0.04});
    const Run shape = run("validate " + write("short.json", doc.dump()).string());
    CHECK(shape.code == 2);
    CHECK(shape.err.find("generators[0].fixed_points.multiplier") != std::string::npos);

    doc = json::parse(slurp(example("genus1.json")));
    doc["settings"]["nodez"] = 12;
    const Run unknown = run("validate " + write("typo.json", doc.dump()).string());
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("settings.nodez") != std::string::npos);

    const Run literal = run("periods " + example("genus1.json") + " --base-point 0,2i");
    CHECK(literal.code == 2);
    CHECK(literal.err.find("--base-point") != std::string::npos);

    CHECK(run("frobnicate").code == 2);
    CHECK(run("periods").code == 2);
    CHECK(run("validate /nonexistent/config.json").code == 2);
}

TEST_CASE("the echoed config round-trips") {
    for (const char* name : {"genus1.json", "genus2.json", "overlapping.json"}) {
        const json original = json::parse(slurp(example(name)));
        const Run r = run("validate " + example(name));
        const json echoed = r.report()["config"];
        CHECK(cli::parse_config(echoed, "echo") == cli::parse_config(original, name));
        CHECK(cli::config_to_json(cli::parse_config(echoed, "echo")) == echoed);
    }
    json sparse = json::parse(slurp(example("genus1.json")));
    sparse.erase("settings");
    const Run r = run("validate " + write("sparse.json", sparse.dump()).string());
    const json settings = r.report()["config"]["settings"];
    for (const char* key : {"max_word_len", "tail_tolerance", "hard_cap", "nodes", "auto_double", "relative_tolerance",
                            "max_nodes", "normalization_nodes", "base_point"})
        CHECK(settings.contains(key));
}

TEST_CASE("periods") {
    const Run g1 = run("--threads 1 periods " + example("genus1.json"));
    REQUIRE(g1.code == 0);
    const auto b11 = cx(g1.report()["result"]["period_matrix"][0][0]);
    CHECK(std::abs(b11 - std::complex<double>(0.0, std::log(0.04) / (2 * M_PI))) < 1e-8);
    CHECK(std::abs(std::abs(b11) - 0.51230) < 1e-5);

    const json n256 = run("periods " + example("genus2.json") + " --nodes 256").report()["result"];
    const json n512 = run("periods " + example("genus2.json") + " --nodes 512").report()["result"];
    for (int j = 0; j < 2; ++j)
        for (int s = 0; s < 2; ++s)
            CHECK(std::abs(cx(n256["a_period_matrix"][j][s]) - cx(n512["a_period_matrix"][j][s])) < 1e-10);
    CHECK(n256["period_info"]["symmetry_residual"].get<double>() < 1e-7);
    CHECK(n256["a_period_info"]["identity_error"].get<double>() < 1e-8);

    const json moved = run("periods " + example("genus2.json") + " --base-point 3,-2.5 --len 7").report();
    CHECK(moved["config"]["settings"]["base_point"] == json::array({3.0, -2.5}));
    CHECK(moved["config"]["settings"]["max_word_len"] == 7);
    CHECK(std::abs(cx(moved["result"]["period_matrix"][0][1]) - cx(n256["period_matrix"][0][1])) < 1e-8);

    const json adaptive = run("periods " + example("genus2.json") + " --tol 1e-9").report();
    CHECK(adaptive["result"]["period_info"]["tail_estimate"].get<double>() < 1e-9);
    CHECK(run("periods " + example("genus2.json") + " --tol 1e-9 --len 3").code == 2);
}

TEST_CASE("integrate") {
    const Run r = run("integrate " + example("genus2.json") + " --index 2 --from 0,2 --to 0,2");
    REQUIRE(r.code == 0);
    CHECK(std::abs(cx(r.report()["result"]["value"])) < 1e-15);
    const Run t = run("integrate " + example("genus2.json") +
                      " --differential third-kind --pole 0,2 --pole-prime 3,-2 --from -2,2 --to 8,1");
    CHECK(t.code == 0);
    CHECK(run("integrate " + example("genus2.json") + " --index 3 --from 0,2 --to 1,2").code == 2);
    CHECK(run("integrate " + example("genus2.json") + " --from 1,0 --to 0,2").code == 1);
}

TEST_CASE("vary") {
    const Run scaling = run("vary " + example("genus2.json") + " --direction " + example("scaling_direction.json"));
    REQUIRE(scaling.code == 0);
    const json s = scaling.report()["result"];
    CHECK(s["quadrature"]["max_integrand"].get<double>() < 1e-13);
    for (const auto& row : s["variation"])
        for (const auto& e : row) CHECK(std::abs(cx(e)) < 1e-13);

    const json c =
        run("vary " + example("genus2.json") + " --direction " + example("conjugation_direction.json")).report();
    for (const auto& row : c["result"]["variation"])
        for (const auto& e : row) CHECK(std::abs(cx(e)) < 1e-7);

    const Run rnd = run("--seed 7 vary " + example("genus2.json") + " --random --check-fd");
    REQUIRE(rnd.code == 0);
    const json fd = rnd.report()["result"]["finite_difference"];
    CHECK(fd["max_relative_discrepancy"].get<double>() < 1e-5);

    const Run file = run("vary " + example("genus2.json") + " --direction " + example("random_direction.json") +
                         " --target integral --index 1 --from 0.2,3 --to 3,-2.5 --check-fd");
    REQUIRE(file.code == 0);
    CHECK(file.report()["result"]["finite_difference"]["max_relative_discrepancy"].get<double>() < 1e-5);
    CHECK(file.report()["result"]["per_circle"].size() == 2);

    CHECK(run("vary " + example("genus2.json")).code == 2);
    CHECK(run("vary " + example("genus2.json") + " --target integral --random").code == 2);
}

TEST_CASE("solve") {
    const Run g1 = run("solve " + example("genus1_start.json") + " " + example("genus1_targets.json"));
    REQUIRE(g1.code == 0);
    const json r = g1.report()["result"];
    CHECK(r["trace"]["converged"] == true);
    CHECK(r["final_parameters"][0].get<double>() == doctest::Approx(0.04).epsilon(1e-10));
    const json final_config = r["final_config"];
    CHECK(cx(final_config["generators"][0]["fixed_points"]["multiplier"]).real() ==
          doctest::Approx(0.04).epsilon(1e-10));
    const Run again = run("validate " + write("final.json", final_config.dump()).string());
    CHECK(again.code == 0);

    const Run g2 = run("solve " + example("genus2_perturbed.json") + " " + example("genus2_targets.json") +
                       " --jacobian-check");
    REQUIRE(g2.code == 0);
    const json t = g2.report()["result"];
    CHECK(t["jacobian_check"]["max_relative_discrepancy"].get<double>() < 1e-5);
    CHECK(t["trace"]["iterations"].back()["residual_norm"].get<double>() < 1e-8);
    CHECK(t["trace"]["convergence_exponent"].get<double>() >= 1.8);

    json capped = json::parse(slurp(example("genus2_targets.json")));
    capped["newton"]["max_iter"] = 1;
    const Run short_run =
        run("solve " + example("genus2_perturbed.json") + " " + write("capped.json", capped.dump()).string());
    CHECK(short_run.code == 1);
    CHECK(short_run.report()["result"]["trace"]["converged"] == false);
    CHECK(short_run.report().contains("error"));
}

TEST_CASE("converge") {
    const Run r = run("converge " + example("genus1.json") +
                      " --differential third-kind --pole 0,2 --pole-prime 0,-2 --levels 4,5,6");
    REQUIRE(r.code == 0);
    const json res = r.report()["result"];
    const auto& ratios = res["layer_ratios"];
    for (std::size_t i = 2; i < ratios.size(); ++i) CHECK(ratios[i].get<double>() == doctest::Approx(0.04).epsilon(0.1));
    const auto& levels = res["automorphy"]["levels"];
    REQUIRE(levels.size() == 3);
    CHECK(levels[2]["residual"][0].get<double>() < levels[0]["residual"][0].get<double>());
    CHECK(res["a_period_doubling"]["history"].size() >= 1);
}

TEST_CASE("reports are reproducible") {
    const std::string args = "--threads 1 vary " + example("genus2.json") + " --random --seed 3";
    const Run a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.report().contains("timings"));
    const Run timed = run("--timings periods " + example("genus1.json"));
    CHECK(timed.report()["timings"].contains("total"));

    const fs::path out = scratch() / "report.json";
    CHECK(run("--threads 1 --out " + out.string() + " periods " + example("genus1.json")).code == 0);
    CHECK(slurp(out) == run("--threads 1 periods " + example("genus1.json")).out);
}
