#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "wqed/io.hpp"
#include "wqed/sweep.hpp"
#include "wqed/validate.hpp"

namespace fs = std::filesystem;
using namespace wqed;

namespace {

struct CommonArgs {
    double alpha = 1.0;
    double k = 20.0;
    double omega0 = 20.0;
    double gamma = 1.0;
    std::string geometry = "inf";
    double a = 0.0;
    double k0a_over_pi = 0.0;
    double dt = 1e-3;
    double t_max = 10.0;
    std::string out_dir = "out";
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--alpha", args.alpha, "wavepacket bandwidth dk/Gamma");
    cmd->add_option("--k", args.k, "carrier frequency in units of Gamma");
    cmd->add_option("--omega0", args.omega0, "qubit frequency in units of Gamma");
    cmd->add_option("--gamma", args.gamma, "decay rate (sets the units; default 1)");
    cmd->add_option("--geometry", args.geometry, "inf | semi")
        ->check(CLI::IsMember({"inf", "semi"}));
    cmd->add_option("--a", args.a, "qubit-mirror distance in units of 1/Gamma");
    cmd->add_option("--k0a-over-pi", args.k0a_over_pi,
                    "qubit-mirror distance via k0 a / pi (k0 = omega0)");
    cmd->add_option("--dt", args.dt, "time step (aligned to the mirror distance per run)");
    cmd->add_option("--tmax", args.t_max, "final time in units of 1/Gamma");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--workers", args.workers, "worker threads (default: available parallelism)");
    cmd->set_config("--config", "", "configuration file (key=value lines)");
}

PhysicalConfig to_config(const CommonArgs& args) {
    PhysicalConfig cfg;
    cfg.alpha = args.alpha;
    cfg.k = args.k;
    cfg.omega0 = args.omega0;
    cfg.gamma = args.gamma;
    if (args.geometry == "semi") {
        cfg.geometry = Geometry::SemiInfinite;
        cfg.a = args.k0a_over_pi > 0.0 ? args.k0a_over_pi * M_PI / args.omega0 : args.a;
        if (!(cfg.a > 0.0)) throw ConfigError("semi geometry needs --a or --k0a-over-pi");
    }
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory " + dir);
    return p;
}

std::map<std::string, std::string> meta_for(const PhysicalConfig& cfg, double dt, double t_max) {
    std::map<std::string, std::string> kv;
    kv["alpha"] = format_double(cfg.alpha);
    kv["k"] = format_double(cfg.k);
    kv["omega0"] = format_double(cfg.omega0);
    kv["gamma"] = format_double(cfg.gamma);
    kv["geometry"] = cfg.geometry == Geometry::SemiInfinite ? "semi" : "inf";
    if (cfg.geometry == Geometry::SemiInfinite) kv["a"] = format_double(cfg.a);
    kv["dt"] = format_double(dt);
    kv["tmax"] = format_double(t_max);
    return kv;
}

// history stride keeping the stored rows within a memory budget
std::size_t pick_history_stride(const PhysicalConfig& cfg, double dt, double t_max) {
    double n = t_max / dt;
    double nx = cfg.geometry == Geometry::SemiInfinite ? (2.0 * cfg.a + t_max) / dt : n;
    double bytes = 16.0 * n * nx;
    double budget = 8e8;
    std::size_t stride = 1;
    while (bytes / static_cast<double>(stride) > budget) ++stride;
    return stride;
}

int cmd_simulate(const CommonArgs& args, bool dump_fields) {
    PhysicalConfig cfg = to_config(args);
    double dt = align_dt(cfg, args.dt);
    auto out = prepare_out(args.out_dir);

    auto one = solve_one_excitation(cfg, dt, args.t_max);
    TwoExcOptions topt;
    topt.store_history = true;
    topt.history_stride = pick_history_stride(cfg, dt, args.t_max);
    topt.store_fields = dump_fields;
    auto two = cfg.geometry == Geometry::Infinite
                   ? solve_infinite(cfg, dt, args.t_max, topt)
                   : solve_semi_infinite(cfg, dt, args.t_max, topt);

    // unitarity residual at a handful of reconstructed frames
    const auto stride = two.history->stride;
    auto n = two.history->n_steps;
    for (int q = 1; q <= 8; ++q) {
        std::size_t frame = n * static_cast<std::size_t>(q) / 8;
        frame -= frame % stride;
        if (frame == 0) continue;
        two.residual_frames.push_back(frame);
        two.norm_residual.push_back(two.p_e[frame] + reconstruct_chi_norm(two, frame) - 1.0);
    }

    auto traj = build_trajectory(one, two);
    auto rates = extract_rates(traj);

    write_one_excitation_csv(out / "one_excitation.csv", one);
    write_two_excitation_csv(out / "two_excitation.csv", two);
    write_trajectory_csv(out / "trajectory.csv", traj);
    write_rates_csv(out / "rates.csv", rates);
    write_simulate_plot_script(out / "plot.py");
    write_meta(out / "run_meta.txt", meta_for(cfg, dt, args.t_max));
    if (dump_fields && two.fields) write_field_history(out / "fields.wqfh", *two.fields);
    std::cout << "simulate: wrote " << (out / "trajectory.csv").string() << "\n";
    return 0;
}

int cmd_negativity_map(const CommonArgs& args, double alpha_min, double alpha_max,
                       std::size_t alpha_count) {
    if (args.geometry != "inf")
        throw ConfigError("negativity-map is defined for the infinite geometry");
    if (std::abs(args.k - args.omega0) > 1e-12)
        throw ConfigError("negativity-map uses the resonant closed form: set k = omega0");
    auto out = prepare_out(args.out_dir);
    auto alphas = log_spaced(alpha_min, alpha_max, alpha_count);
    auto n = static_cast<std::size_t>(std::llround(args.t_max / args.dt));
    std::vector<std::vector<double>> grid(alphas.size(), std::vector<double>(n + 1));
    parallel_for(alphas.size(), worker_count(args.workers), [&](std::size_t i) {
        for (std::size_t j = 0; j <= n; ++j) {
            double d = delta_closed_form(static_cast<double>(j) * args.dt, alphas[i]);
            grid[i][j] = std::max(0.0, -d);
        }
    });
    write_negativity_map_csv(out / "negativity_map.csv", alphas, args.dt, grid);
    write_heatmap_plot_script(out / "plot_map.py");
    PhysicalConfig cfg = to_config(args);
    write_meta(out / "run_meta.txt", meta_for(cfg, args.dt, args.t_max));
    std::cout << "negativity-map: wrote " << (out / "negativity_map.csv").string() << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, double alpha_min, double alpha_max, std::size_t alpha_count,
              std::vector<double> k0a_list) {
    auto out = prepare_out(args.out_dir);
    auto alphas = log_spaced(alpha_min, alpha_max, alpha_count);
    std::vector<double> geoms = {-1.0};
    if (k0a_list.empty()) k0a_list = {0.5, 1.0, 2.0, 4.0};
    geoms.insert(geoms.end(), k0a_list.begin(), k0a_list.end());
    auto rows =
        sweep_alpha(alphas, geoms, args.omega0, args.dt, args.t_max, worker_count(args.workers));
    write_sweep_csv(out / "sweep.csv", rows);
    write_sweep_plot_script(out / "plot_sweep.py");
    PhysicalConfig cfg;
    cfg.omega0 = args.omega0;
    cfg.k = args.omega0;
    write_meta(out / "run_meta.txt", meta_for(cfg, args.dt, args.t_max));
    std::cout << "sweep-alpha: wrote " << (out / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_validate(const std::string& fault) {
    ValidationOptions vopt;
    if (fault == "skip-mirror-delay")
        vopt.fault_skip_mirror_delay = true;
    else if (!fault.empty())
        throw ConfigError("unknown fault: " + fault);
    auto rep = run_validation(vopt);
    for (const auto& c : rep.checks) {
        std::printf("[%s] %-45s residual %.3e (threshold %.3e)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.threshold);
    }
    std::printf("%s\n", rep.all_pass() ? "validation passed" : "validation FAILED");
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveguide-QED single-photon scattering: dynamical map and non-Markovianity"};
    app.require_subcommand(1);

    CommonArgs sim_args, map_args, sweep_args;
    bool dump_fields = false;
    double alpha_min = 1e-3, alpha_max = 20.0;
    std::size_t map_alpha_count = 120, sweep_alpha_count = 40;
    std::vector<double> k0a_list;
    std::string fault;

    auto* sim = app.add_subcommand("simulate", "run one parameter point, write trajectory CSVs");
    add_common(sim, sim_args);
    sim->add_flag("--dump-fields", dump_fields, "also write a binary field-history dump");

    auto* nmap = app.add_subcommand("negativity-map",
                                    "Delta-negativity over the (alpha, t) grid, infinite geometry");
    add_common(nmap, map_args);
    nmap->add_option("--alpha-min", alpha_min, "lower alpha bound");
    nmap->add_option("--alpha-max", alpha_max, "upper alpha bound");
    nmap->add_option("--alpha-count", map_alpha_count, "log-spaced alpha points");

    auto* sweep = app.add_subcommand("sweep-alpha", "GM/BLP measures across alpha and geometries");
    add_common(sweep, sweep_args);
    sweep->add_option("--alpha-min", alpha_min, "lower alpha bound");
    sweep->add_option("--alpha-max", alpha_max, "upper alpha bound");
    sweep->add_option("--alpha-count", sweep_alpha_count, "log-spaced alpha points");
    sweep->add_option("--k0a-over-pi-list", k0a_list,
                      "semi-infinite k0 a / pi values (default 0.5 1 2 4)");

    auto* val = app.add_subcommand("validate", "run the invariant suite, nonzero exit on failure");
    val->add_option("--inject-fault", fault, "testing hook (skip-mirror-delay)")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_args, dump_fields);
        if (nmap->parsed())
            return cmd_negativity_map(map_args, alpha_min, alpha_max, map_alpha_count);
        if (sweep->parsed())
            return cmd_sweep(sweep_args, alpha_min, alpha_max, sweep_alpha_count, k0a_list);
        if (val->parsed()) return cmd_validate(fault);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
