// reeblab: JSON-config-driven command-line front end for the Reeb-flow
// laboratory. Commands: model, orbits, rotnum, linking, liouville,
// criterion, entropy, lift. Exit codes: 0 success, 2 schema/precondition
// error, 3 numerical failure, 4 inconclusive criterion verdict.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "reeblab/dynamics.hpp"
#include "reeblab/entropy.hpp"
#include "reeblab/geometry.hpp"
#include "reeblab/liftaxiom.hpp"
#include "reeblab/measures.hpp"
#include "reeblab/sfs.hpp"

using nlohmann::json;
using namespace reeblab;

namespace {

constexpr const char* TOOL_VERSION = "reeblab 1.0.0";

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& context) {
    if (!j.is_object()) throw SchemaError(context + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw SchemaError("unknown key \"" + key + "\" in " + context);
}

struct Run {
    json config;
    std::string command;
    std::uint64_t seed = 0;
    bool seeded = false;
    std::string seed_source = "config";
    std::filesystem::path out_dir;
    std::string config_hash;
    bool verbose = false;
    int threads = 1;

    json header() const {
        json h;
        h["tool"] = TOOL_VERSION;
        h["config_hash"] = config_hash;
        if (seeded) {
            h["seed"] = seed;
            h["seed_source"] = seed_source;
        }
        return h;
    }

    void write_json(const std::string& name, json body) const {
        body["header"] = header();
        std::ofstream f(out_dir / name);
        f << body.dump(2) << "\n";
        if (verbose) std::cerr << "wrote " << (out_dir / name).string() << "\n";
    }

    void write_csv(const std::string& name, const std::string& columns,
                   const std::vector<std::string>& rows) const {
        std::ofstream f(out_dir / name);
        f << "# tool: " << TOOL_VERSION << "\n# config_hash: " << config_hash << "\n";
        f << columns << "\n";
        for (const auto& r : rows) f << r << "\n";
        if (verbose) std::cerr << "wrote " << (out_dir / name).string() << "\n";
    }

    std::shared_ptr<ContactManifold> model() const {
        if (!config.contains("model")) throw SchemaError("missing \"model\" descriptor");
        check_keys(config.at("model"), {"model", "a", "b", "seed"}, "model descriptor");
        return make_model(parse_model_spec(config.at("model")));
    }

    const json& params() const {
        static const json empty = json::object();
        return config.contains("params") ? config.at("params") : empty;
    }

    EllipsoidModel& require_sphere(const std::shared_ptr<ContactManifold>& M,
                                   const std::string& what) const {
        auto* S = dynamic_cast<EllipsoidModel*>(M.get());
        if (!S || S->model_id() != ModelId::round_sphere)
            throw SchemaError(what + " requires the round_sphere model");
        return *S;
    }
};

// ---------------------------------------------------------------------------

json orbit_json(const PeriodicOrbit& orb) {
    json o;
    o["period"] = orb.period;
    o["type"] = to_string(orb.orbit_type);
    o["multipliers"] = {{orb.multipliers.first.real(), orb.multipliers.first.imag()},
                        {orb.multipliers.second.real(), orb.multipliers.second.imag()}};
    o["base_point"] = std::vector<double>(orb.base_point.data(),
                                          orb.base_point.data() + orb.base_point.size());
    o["nondegenerate_up_to"] = orb.nondegenerate_up_to;
    return o;
}

std::vector<PeriodicOrbit> search_orbits(const Run& run,
                                         const std::shared_ptr<ContactManifold>& M,
                                         const json& p) {
    const double t_max = p.value("t_max", 5.0);
    const int n_seeds = p.value("n_seeds", 200);
    auto rng = make_rng(run.seed);
    std::vector<Vec> seeds;
    for (int i = 0; i < n_seeds; ++i) seeds.push_back(M->random_point(rng));
    return find_periodic_orbits(*M, seeds, t_max);
}

int cmd_model(const Run& run) {
    auto M = run.model();
    const json& p = run.params();
    check_keys(p, {"n_samples", "tol", "helicity_samples"}, "model params");
    const int n = p.value("n_samples", 200);
    const double tol = p.value("tol", 1e-8);

    auto rep = verify_contact(*M, n, tol, run.seed);
    json out;
    out["contact_axioms"] = {{"max_reeb_normalization", rep.max_reeb_normalization},
                             {"max_reeb_kernel", rep.max_reeb_kernel},
                             {"min_kernel_nondegeneracy", rep.min_kernel_nondegeneracy},
                             {"min_positivity", rep.min_positivity},
                             {"n_samples", rep.n_samples},
                             {"pass", rep.pass}};
    if (M->closed()) {
        auto h = helicity(*M, p.value("helicity_samples", 200000L), derive_seed(run.seed, 1));
        out["helicity"] = {{"value", h.value}, {"std_error", h.std_error},
                           {"n_samples", h.n_samples}};
    } else {
        out["helicity"] = nullptr;
        out["helicity_note"] = "helicity undefined for manifold with boundary";
    }
    run.write_json("model.json", out);
    return rep.pass ? 0 : 3;
}

int cmd_orbits(const Run& run) {
    auto M = run.model();
    check_keys(run.params(), {"t_max", "n_seeds"}, "orbits params");
    auto orbits = search_orbits(run, M, run.params());
    json out;
    out["orbits"] = json::array();
    for (const auto& orb : orbits) out["orbits"].push_back(orbit_json(orb));
    run.write_json("orbits.json", out);
    return 0;
}

int cmd_rotnum(const Run& run) {
    auto M = run.model();
    const json& p = run.params();
    check_keys(p, {"t_max", "n_seeds", "orbit_index", "p", "q", "horizon_periods", "tol"},
               "rotnum params");
    auto orbits = search_orbits(run, M, p);
    const int idx = p.value("orbit_index", 0);
    if (idx < 0 || idx >= static_cast<int>(orbits.size()))
        throw SchemaError("orbit_index out of range: found " +
                          std::to_string(orbits.size()) + " orbits");
    auto frame = build_tubular_frame(*M, orbits[idx]);
    const double pc = p.value("p", 0.0), qc = p.value("q", 1.0);
    auto rot = rotation_number(frame, pc, qc, p.value("horizon_periods", 64.0) * frame.period,
                               p.value("tol", 1e-6));
    json out;
    out["orbit_id"] = idx;
    out["p"] = pc;
    out["q"] = qc;
    out["rho"] = rot.rho;
    out["converged"] = rot.converged;
    out["window_gap"] = rot.window_gap;
    out["orbit"] = orbit_json(orbits[idx]);
    run.write_json("rotnum.json", out);
    return rot.converged ? 0 : 3;
}

int cmd_linking(const Run& run) {
    auto M = run.model();
    auto& S = run.require_sphere(M, "linking");
    const json& p = run.params();
    check_keys(p, {"n_list", "n_ang", "n_rad", "base_segments"}, "linking params");
    const std::vector<long> n_list = p.value("n_list", std::vector<long>{10, 100});

    Vec h0(4);
    h0 << 1, 0, 0, 0;
    PeriodicOrbit fiber;
    fiber.base_point = h0;
    fiber.period = M_PI;
    for (int k = 0; k < 256; ++k)
        fiber.samples.push_back(S.exact_flow(h0, fiber.period * k / 256));
    std::vector<LinkComponent> link{make_link_component(S, fiber)};
    auto mesh = make_hopf_disk_mesh(p.value("n_ang", 64), p.value("n_rad", 8));
    validate_mesh(mesh, link);

    std::vector<WeightedOrbitMeasure> mu_seq;
    for (std::size_t i = 0; i < n_list.size(); ++i)
        mu_seq.push_back(uniform_fiber_measure(S, static_cast<int>(n_list[i]),
                                               derive_seed(run.seed, i)));
    CrossingOptions copts;
    copts.base_segments = p.value("base_segments", 128);
    const double vol = M_PI * M_PI;
    auto rep = action_linking_report(S, mu_seq, mesh, link, vol, copts);

    std::vector<std::string> rows;
    char buf[256];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof(buf), "%zu,measure_side,%.12g,%.12g,%.12g", r.n_atoms,
                      r.measure_side, rep.target, std::abs(r.measure_side - rep.target));
        rows.emplace_back(buf);
    }
    std::snprintf(buf, sizeof(buf), "0,surface_dlambda_integral,%.12g,%.12g,%.12g",
                  rep.surface_integral, M_PI, std::abs(rep.surface_integral - M_PI));
    rows.emplace_back(buf);
    run.write_csv("linking.csv", "n,quantity,value,target,gap", rows);

    json out;
    out["target"] = rep.target;
    out["surface_integral"] = rep.surface_integral;
    out["final_gap"] = rep.final_gap;
    run.write_json("linking.json", out);
    return 0;
}

int cmd_liouville(const Run& run) {
    auto M = run.model();
    auto& S = run.require_sphere(M, "liouville");
    const json& p = run.params();
    check_keys(p, {"n_list", "n_mc"}, "liouville params");
    const std::vector<long> n_list = p.value("n_list", std::vector<long>{10, 100, 1000});
    const long n_mc = p.value("n_mc", 200000L);

    std::vector<std::function<double(const Vec&)>> fs = {
        [](const Vec& z) { return z(0) * z(0); },
        [](const Vec& z) { return z(0) * z(0) * z(2) * z(2); },
        [](const Vec& z) { return std::cos(z(0) + z(3)); }};
    std::vector<std::string> names = {"x1_sq", "x1sq_x3sq", "cos_x1px4"};
    std::vector<double> targets;
    for (std::size_t i = 0; i < fs.size(); ++i)
        targets.push_back(liouville_integral(S, fs[i], n_mc, derive_seed(run.seed, 100 + i)));

    std::vector<WeightedOrbitMeasure> mu_seq;
    for (std::size_t i = 0; i < n_list.size(); ++i)
        mu_seq.push_back(uniform_fiber_measure(S, static_cast<int>(n_list[i]),
                                               derive_seed(run.seed, i)));
    auto rows = weakstar_report(mu_seq, fs, targets);
    std::vector<std::string> csv;
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%.12g,%.12g,%.12g", r.n_atoms,
                      names[r.f_index].c_str(), r.mu_value, r.target, r.error);
        csv.emplace_back(buf);
    }
    run.write_csv("liouville.csv", "n,quantity,value,target,gap", csv);
    return 0;
}

int cmd_criterion(const Run& run) {
    auto M = run.model();
    auto& S = run.require_sphere(M, "criterion");
    const json& p = run.params();
    check_keys(p, {"n_measures", "n_segments", "segment_duration", "coefficient", "margin",
                   "lp_dump"},
               "criterion params");
    const int n_measures = p.value("n_measures", 20);
    const int n_segments = p.value("n_segments", 5);
    const double duration = p.value("segment_duration", 5.0 * M_PI);
    const double coeff = p.value("coefficient", 1.0);
    const double margin = p.value("margin", 1e-4);

    Vec h0(4);
    h0 << 1, 0, 0, 0;
    PeriodicOrbit fiber;
    fiber.base_point = h0;
    fiber.period = M_PI;
    for (int k = 0; k < 256; ++k)
        fiber.samples.push_back(S.exact_flow(h0, fiber.period * k / 256));
    auto link = std::make_shared<std::vector<LinkComponent>>();
    link->push_back(make_link_component(S, fiber));
    Vec c(1);
    c << coeff;
    auto y = make_linking_class(S, link, c);

    auto rng = make_rng(run.seed);
    std::vector<WeightedOrbitMeasure> measures;
    while (static_cast<int>(measures.size()) < n_measures) {
        Vec q = S.random_point(rng);
        if (y.distance_to_link(q) < 0.1) continue;
        PeriodicOrbit orb;
        orb.base_point = q;
        orb.period = M_PI;
        for (int k = 0; k < 256; ++k)
            orb.samples.push_back(S.exact_flow(q, orb.period * k / 256));
        WeightedOrbitMeasure mu;
        mu.atoms.emplace_back(orb, 1.0);
        measures.push_back(mu);
    }
    std::vector<BirkhoffSegment> segments;
    while (static_cast<int>(segments.size()) < n_segments) {
        Vec q = S.random_point(rng);
        if (y.distance_to_link(q) < 0.1) continue;
        segments.push_back(make_birkhoff_segment(S, q, duration));
    }

    auto rep = check_criterion(S, *link, y, measures, segments, margin);
    json out;
    out["verdict"] = to_string(rep.verdict);
    out["margin"] = rep.margin;
    out["min_measure_value"] = rep.min_measure_value;
    out["measure_rows"] = rep.measure_rows;
    out["rotation_rows"] = json::array();
    for (const auto& r : rep.rotation_rows)
        out["rotation_rows"].push_back({{"component", r.component},
                                        {"rho", r.rho},
                                        {"converged", r.converged},
                                        {"window_gap", r.window_gap}});
    out["samples"] = {{"n_measures", n_measures},
                      {"n_segments", n_segments},
                      {"segment_duration", duration},
                      {"seed", run.seed}};

    if (p.value("lp_dump", false)) {
        std::vector<CohomologyClass> basis{y, y.scaled(-1.0)};
        auto lp = search_positive_class(S, *link, basis, measures, segments, margin);
        out["lp"] = {{"feasible", lp.feasible},
                     {"t_star", lp.t_star},
                     {"certified_min_slack", lp.certified_min_slack}};
        run.write_json("lp_instance.json", lp_instance_json(lp.rows));
    }
    run.write_json("criterion.json", out);
    if (rep.verdict == Verdict::INCONCLUSIVE) return 4;
    return 0;
}

int cmd_entropy(const Run& run) {
    const json& p = run.params();
    check_keys(p, {"system", "n_cloud", "T_list", "eps_list"}, "entropy params");
    const std::string system = p.value("system", "cat_map");
    const int n_cloud = p.value("n_cloud", 8000);
    const std::vector<double> T_list =
        p.value("T_list", std::vector<double>{1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5});
    const std::vector<double> eps_list = p.value("eps_list", std::vector<double>{0.4});

    std::unique_ptr<FlowSystem> F;
    std::shared_ptr<ContactManifold> M;
    if (system == "cat_map") {
        F = std::make_unique<CatMapSuspension>();
    } else if (system == "reeb") {
        M = run.model();
        auto* S = dynamic_cast<EllipsoidModel*>(M.get());
        if (!S) throw SchemaError("entropy system \"reeb\" requires a sphere-type model");
        const double speed = 2.0 / std::min(S->a(), S->b());
        F = std::make_unique<ReebFlowAdapter>(
            *S, speed, [S](const Vec& q, double t) { return S->exact_flow(q, t); });
    } else {
        throw SchemaError("unknown entropy system \"" + system + "\"");
    }

    auto rng = make_rng(run.seed);
    std::vector<Vec> cloud;
    for (int i = 0; i < n_cloud; ++i) cloud.push_back(F->random_point(rng));
    auto tab = entropy_estimate(*F, cloud, T_list, eps_list, derive_seed(run.seed, 1));

    std::vector<std::string> csv;
    char buf[256];
    for (int e = 0; e < static_cast<int>(eps_list.size()); ++e)
        for (int t = 0; t < static_cast<int>(T_list.size()); ++t) {
            std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%ld,%.12g", T_list[t], eps_list[e],
                          std::lround(tab.counts(e, t)),
                          std::log(std::max(1.0, tab.counts(e, t))) / T_list[t]);
            csv.emplace_back(buf);
        }
    run.write_csv("entropy.csv", "T,eps,N,logN_over_T", csv);

    json out;
    out["system"] = system;
    out["n_cloud"] = n_cloud;
    out["h_estimate"] = tab.h_estimate;
    out["slopes"] = tab.slopes;
    out["residuals"] = tab.residuals;
    if (system == "cat_map") out["exact"] = CatMapSuspension::exact_entropy();
    run.write_json("entropy.json", out);
    return 0;
}

int cmd_lift(const Run& run) {
    const json& p = run.params();
    check_keys(p, {"z0", "eps"}, "lift params");
    if (!p.contains("z0") || !p.contains("eps"))
        throw SchemaError("lift params require \"z0\" and \"eps\"");
    const auto z0v = p.at("z0").get<std::vector<double>>();
    if (z0v.size() != 2) throw SchemaError("lift z0 must be a planar vector [x, y]");
    LiftBoxModel box;
    auto pert = build_lift(box, {z0v[0], z0v[1]}, p.at("eps").get<double>());
    auto rep = verify_lift(box, pert);
    run.write_json("lift.json", lift_report_json(pert, rep));
    if (!rep.stayed_in_box) return 3;
    return 0;
}

// ---------------------------------------------------------------------------

int dispatch(Run& run) {
    static const std::vector<std::string> commands = {
        "model", "orbits", "rotnum", "linking", "liouville", "criterion", "entropy", "lift"};
    check_keys(run.config, {"command", "model", "params", "seed", "output_dir"}, "config");
    if (!run.config.contains("command")) throw SchemaError("missing \"command\"");
    run.command = run.config.at("command").get<std::string>();
    if (std::find(commands.begin(), commands.end(), run.command) == commands.end())
        throw SchemaError("unknown command \"" + run.command + "\"");

    if (run.config.contains("seed")) {
        run.seed = run.config.at("seed").get<std::uint64_t>();
        run.seeded = true;
    }
    if (const char* env = std::getenv("REEBLAB_SEED")) {
        run.seed = std::strtoull(env, nullptr, 10);
        run.seeded = true;
        run.seed_source = "REEBLAB_SEED";
        std::cerr << "seed overridden by REEBLAB_SEED=" << run.seed << "\n";
    }
    const bool deterministic = run.command == "lift";
    if (!deterministic && !run.seeded)
        throw SchemaError("\"seed\" is mandatory for stochastic command \"" + run.command +
                          "\"");

    if (run.command == "model") return cmd_model(run);
    if (run.command == "orbits") return cmd_orbits(run);
    if (run.command == "rotnum") return cmd_rotnum(run);
    if (run.command == "linking") return cmd_linking(run);
    if (run.command == "liouville") return cmd_liouville(run);
    if (run.command == "criterion") return cmd_criterion(run);
    if (run.command == "entropy") return cmd_entropy(run);
    return cmd_lift(run);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reeblab: a numerical laboratory for Reeb flows on explicit contact "
                 "3-manifolds"};
    std::string config_path, out_flag;
    Run run;
    run.threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--config", config_path, "path to the JSON run configuration")
        ->required();
    app.add_option("--out", out_flag, "output directory (overrides config output_dir)");
    app.add_option("--threads", run.threads, "worker pool size for grid loops");
    app.add_flag("--verbose", run.verbose, "log written artifacts to stderr");
    CLI11_PARSE(app, argc, argv);

    auto emit_error = [&run](int code, const std::string& msg) {
        json err;
        err["error"] = msg;
        err["exit_code"] = code;
        std::cerr << "error: " << msg << "\n";
        if (!run.out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(run.out_dir, ec);
            if (!ec) {
                err["header"] = run.header();
                std::ofstream f(run.out_dir / "error.json");
                f << err.dump(2) << "\n";
            }
        }
        return code;
    };

    try {
        std::ifstream f(config_path);
        if (!f) throw SchemaError("cannot open config file: " + config_path);
        run.config = json::parse(f);
        run.config_hash = fnv1a_hex(run.config.dump());
        if (run.threads < 1) throw SchemaError("--threads must be >= 1");

        std::string out = out_flag;
        if (out.empty() && run.config.contains("output_dir"))
            out = run.config.at("output_dir").get<std::string>();
        if (out.empty()) out = ".";
        run.out_dir = out;
        std::filesystem::create_directories(run.out_dir);

        return dispatch(run);
    } catch (const SchemaError& e) {
        return emit_error(2, e.what());
    } catch (const json::exception& e) {
        return emit_error(2, std::string("config schema error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        return emit_error(2, e.what());
    } catch (const IntegrationFailure& e) {
        return emit_error(3, std::string("integration failure: ") + e.what());
    } catch (const std::exception& e) {
        return emit_error(3, e.what());
    }
}
