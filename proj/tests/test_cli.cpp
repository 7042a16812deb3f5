#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "reeblab_cli_test";

fs::path write_config(const std::string& name, const json& cfg) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream f(p);
    f << cfg.dump(2);
    return p;
}

int run_cli(const fs::path& config, const std::string& extra = "") {
    const std::string cmd = std::string(REEBLAB_CLI_PATH) + " --config " + config.string() +
                            " " + extra + " > /dev/null 2> " + (kWork / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    return json::parse(f);
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json base_out(const std::string& sub) {
    const fs::path d = kWork / sub;
    fs::remove_all(d);
    return json{{"output_dir", d.string()}};
}

} // namespace

TEST_CASE("schema validation: unknown keys, commands, and missing seeds") {
    json cfg = base_out("bad1");
    cfg["command"] = "orbits";
    cfg["modle"] = {{"model", "round_sphere"}};
    cfg["seed"] = 1;
    CHECK(run_cli(write_config("bad1.json", cfg)) == 2);
    auto err = read_json(kWork / "bad1" / "error.json");
    CHECK(err.at("error").get<std::string>().find("modle") != std::string::npos);
    CHECK(err.at("exit_code") == 2);

    json cfg2 = base_out("bad2");
    cfg2["command"] = "frobnicate";
    cfg2["seed"] = 1;
    CHECK(run_cli(write_config("bad2.json", cfg2)) == 2);

    // seed is mandatory for stochastic commands
    json cfg3 = base_out("bad3");
    cfg3["command"] = "model";
    cfg3["model"] = {{"model", "round_sphere"}};
    CHECK(run_cli(write_config("bad3.json", cfg3)) == 2);

    // unknown keys inside params are rejected by name
    json cfg4 = base_out("bad4");
    cfg4["command"] = "lift";
    cfg4["params"] = {{"z0", {0.01, 0.0}}, {"eps", 0.05}, {"epz", 1}};
    CHECK(run_cli(write_config("bad4.json", cfg4)) == 2);
    auto err4 = read_json(kWork / "bad4" / "error.json");
    CHECK(err4.at("error").get<std::string>().find("epz") != std::string::npos);
}

TEST_CASE("lift command: report, header, and determinism") {
    json cfg = base_out("lift");
    cfg["command"] = "lift";
    cfg["params"] = {{"z0", {0.01, 0.0}}, {"eps", 0.05}};
    const auto path = write_config("lift.json", cfg);
    CHECK(run_cli(path) == 0);
    auto rep = read_json(kWork / "lift" / "lift.json");
    CHECK(rep.at("endpoint_error").get<double>() < 1e-6);
    CHECK(rep.at("support_ok").get<bool>());
    CHECK(rep.at("header").at("tool").get<std::string>().find("reeblab") == 0);
    CHECK(rep.at("header").at("config_hash").get<std::string>().size() == 16);

    // bit-identical re-run
    const std::string first = read_file(kWork / "lift" / "lift.json");
    CHECK(run_cli(path) == 0);
    CHECK(read_file(kWork / "lift" / "lift.json") == first);

    // invalid eps is a precondition error
    json bad = base_out("lift_bad");
    bad["command"] = "lift";
    bad["params"] = {{"z0", {0.01, 0.0}}, {"eps", 0.2}};
    CHECK(run_cli(write_config("lift_bad.json", bad)) == 2);
}

TEST_CASE("model command and REEBLAB_SEED override") {
    json cfg = base_out("model");
    cfg["command"] = "model";
    cfg["model"] = {{"model", "round_sphere"}};
    cfg["seed"] = 5;
    cfg["params"] = {{"helicity_samples", 50000}};
    const auto path = write_config("model.json", cfg);
    CHECK(run_cli(path) == 0);
    auto rep = read_json(kWork / "model" / "model.json");
    CHECK(rep.at("contact_axioms").at("pass").get<bool>());
    CHECK(rep.at("helicity").at("value").get<double>() ==
          doctest::Approx(M_PI * M_PI).epsilon(1e-3));
    CHECK(rep.at("header").at("seed") == 5);
    CHECK(rep.at("header").at("seed_source") == "config");

    setenv("REEBLAB_SEED", "99", 1);
    CHECK(run_cli(path) == 0);
    unsetenv("REEBLAB_SEED");
    auto rep2 = read_json(kWork / "model" / "model.json");
    CHECK(rep2.at("header").at("seed") == 99);
    CHECK(rep2.at("header").at("seed_source") == "REEBLAB_SEED");
}

TEST_CASE("orbits command finds the two ellipsoid orbits") {
    json cfg = base_out("orbits");
    cfg["command"] = "orbits";
    cfg["model"] = {{"model", "ellipsoid"}, {"a", 1.0}, {"b", 1.4142135623730951}};
    cfg["seed"] = 1;
    cfg["params"] = {{"t_max", 5.0}, {"n_seeds", 60}};
    CHECK(run_cli(write_config("orbits.json", cfg)) == 0);
    auto rep = read_json(kWork / "orbits" / "orbits.json");
    REQUIRE(rep.at("orbits").size() == 2);
    CHECK(rep["orbits"][0].at("period").get<double>() == doctest::Approx(M_PI).epsilon(1e-8));
    CHECK(rep["orbits"][1].at("period").get<double>() ==
          doctest::Approx(M_PI * std::sqrt(2.0)).epsilon(1e-8));
    CHECK(rep["orbits"][0].at("type") == "elliptic");
    CHECK(rep["orbits"][0].at("nondegenerate_up_to") == 20);
}

TEST_CASE("rotnum command converges on the short ellipsoid orbit") {
    json cfg = base_out("rotnum");
    cfg["command"] = "rotnum";
    cfg["model"] = {{"model", "ellipsoid"}, {"a", 1.0}, {"b", 1.4142135623730951}};
    cfg["seed"] = 2;
    cfg["params"] = {{"t_max", 5.0}, {"n_seeds", 60}, {"orbit_index", 0}, {"p", 0.0},
                     {"q", 1.0}};
    CHECK(run_cli(write_config("rotnum.json", cfg)) == 0);
    auto rep = read_json(kWork / "rotnum" / "rotnum.json");
    CHECK(rep.at("converged").get<bool>());
    CHECK(rep.at("orbit_id") == 0);
    CHECK(std::abs(rep.at("rho").get<double>()) > 0);

    // out-of-range orbit index is a precondition error
    cfg["params"]["orbit_index"] = 9;
    CHECK(run_cli(write_config("rotnum_bad.json", cfg)) == 2);
}

TEST_CASE("criterion command: verdict exit codes") {
    json cfg = base_out("crit");
    cfg["command"] = "criterion";
    cfg["model"] = {{"model", "round_sphere"}};
    cfg["seed"] = 3;
    cfg["params"] = {{"n_measures", 4}, {"n_segments", 1}, {"segment_duration", M_PI},
                     {"lp_dump", true}};
    CHECK(run_cli(write_config("crit.json", cfg)) == 0);
    auto rep = read_json(kWork / "crit" / "criterion.json");
    CHECK(rep.at("verdict") == "SATISFIED");
    CHECK(rep.at("lp").at("feasible").get<bool>());
    auto lp = read_json(kWork / "crit" / "lp_instance.json");
    CHECK(lp.at("rows").size() == 6); // 4 measures + 1 segment + 1 rotation row

    // the zero class is inconclusive -> exit 4, report still written
    json cfg0 = base_out("crit0");
    cfg0["command"] = "criterion";
    cfg0["model"] = {{"model", "round_sphere"}};
    cfg0["seed"] = 3;
    cfg0["params"] = {{"n_measures", 2}, {"n_segments", 1},
                      {"segment_duration", M_PI}, {"coefficient", 0.0}};
    CHECK(run_cli(write_config("crit0.json", cfg0)) == 4);
    CHECK(read_json(kWork / "crit0" / "criterion.json").at("verdict") == "INCONCLUSIVE");
}

TEST_CASE("entropy and liouville commands write headed CSV tables") {
    json cfg = base_out("ent");
    cfg["command"] = "entropy";
    cfg["seed"] = 4;
    cfg["params"] = {{"system", "cat_map"}, {"n_cloud", 400},
                     {"T_list", {0.5, 1.0, 1.5, 2.0}}, {"eps_list", {0.4}}};
    CHECK(run_cli(write_config("ent.json", cfg)) == 0);
    const std::string csv = read_file(kWork / "ent" / "entropy.csv");
    CHECK(csv.find("# tool: reeblab") == 0);
    CHECK(csv.find("T,eps,N,logN_over_T") != std::string::npos);
    auto rep = read_json(kWork / "ent" / "entropy.json");
    CHECK(rep.at("h_estimate").get<double>() > 0);

    json cfg2 = base_out("liou");
    cfg2["command"] = "liouville";
    cfg2["model"] = {{"model", "round_sphere"}};
    cfg2["seed"] = 6;
    cfg2["params"] = {{"n_list", {10, 50}}, {"n_mc", 20000}};
    CHECK(run_cli(write_config("liou.json", cfg2)) == 0);
    const std::string csv2 = read_file(kWork / "liou" / "liouville.csv");
    CHECK(csv2.find("n,quantity,value,target,gap") != std::string::npos);
}

TEST_CASE("linking command reproduces the action-linking identity") {
    json cfg = base_out("link");
    cfg["command"] = "linking";
    cfg["model"] = {{"model", "round_sphere"}};
    cfg["seed"] = 7;
    cfg["params"] = {{"n_list", {5, 20}}, {"n_ang", 48}, {"n_rad", 6},
                     {"base_segments", 64}};
    CHECK(run_cli(write_config("link.json", cfg)) == 0);
    auto rep = read_json(kWork / "link" / "linking.json");
    CHECK(rep.at("target").get<double>() == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK(rep.at("final_gap").get<double>() < 0.5);
    const std::string csv = read_file(kWork / "link" / "linking.csv");
    CHECK(csv.find("measure_side") != std::string::npos);
    CHECK(csv.find("surface_dlambda_integral") != std::string::npos);
}
