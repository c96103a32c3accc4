#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wqed/io.hpp"
#include "wqed/validate.hpp"

using namespace wqed;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "wqed_test_io") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("csv outputs are deterministic") {
        TempDir tmp;
        auto traj = closed_form_trajectory(1.0, 20.0, 1e-2, 2.0);
        write_trajectory_csv(tmp.path / "a.csv", traj);
        write_trajectory_csv(tmp.path / "b.csv", traj);
        CHECK(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
        auto text = slurp(tmp.path / "a.csv");
        CHECK(text.rfind("t,p_g,p_e,re_c,im_c,delta,det_M,choi_min_eig\n", 0) == 0);
        // first data row is the identity snapshot
        CHECK(text.find("\n0,0,1,1,0,1,1,") != std::string::npos);
    }

    TEST_CASE("rates csv columns") {
        TempDir tmp;
        auto traj = closed_form_trajectory(2.0, 20.0, 1e-2, 1.0);
        auto rates = extract_rates(traj);
        write_rates_csv(tmp.path / "rates.csv", rates);
        auto text = slurp(tmp.path / "rates.csv");
        CHECK(text.rfind("t,gamma_plus,gamma_minus,gamma_z,S,singular_flag\n", 0) == 0);
    }

    TEST_CASE("field history round trip") {
        TempDir tmp;
        FieldHistory fh;
        fh.geometry = Geometry::SemiInfinite;
        fh.dt = 0.25;
        fh.x_min = -1.5;
        fh.n_x = 3;
        fh.components = {"psi"};
        fh.frame_times = {0.0, 0.5};
        fh.frames = {{{cd(1, 2), cd(3, 4), cd(5, 6)}}, {{cd(0, -1), cd(2, -2), cd(4, 4)}}};
        write_field_history(tmp.path / "f.wqfh", fh);
        auto back = read_field_history(tmp.path / "f.wqfh");
        CHECK(back.geometry == fh.geometry);
        CHECK(back.n_x == fh.n_x);
        CHECK(back.frame_times == fh.frame_times);
        CHECK(back.frames[1][0][2] == fh.frames[1][0][2]);
        CHECK_THROWS_AS(read_field_history(tmp.path / "missing.wqfh"), ConfigError);
    }

    TEST_CASE("sweep csv geometry labels") {
        TempDir tmp;
        std::vector<SweepRow> rows = {{0.5, -1.0, 0.1, 0.2, 0.05, true, false},
                                      {0.5, 4.0, 0.3, 0.4, 0.08, true, true}};
        write_sweep_csv(tmp.path / "sweep.csv", rows);
        auto text = slurp(tmp.path / "sweep.csv");
        CHECK(text.find("0.5,inf,") != std::string::npos);
        CHECK(text.find("0.5,4,") != std::string::npos);
    }

    TEST_CASE("plot scripts reference emitted csvs only") {
        TempDir tmp;
        write_simulate_plot_script(tmp.path / "plot.py");
        auto text = slurp(tmp.path / "plot.py");
        CHECK(text.find("trajectory.csv") != std::string::npos);
        CHECK(text.find("rates.csv") != std::string::npos);
        CHECK(text.find("http") == std::string::npos);
    }
}

TEST_SUITE("validate") {
    TEST_CASE("quick validation passes") {
        ValidationOptions opts;
        opts.quick = true;
        auto rep = run_validation(opts);
        for (const auto& c : rep.checks) {
            INFO(c.name, " residual ", c.residual, " threshold ", c.threshold);
            CHECK(c.pass);
        }
    }

    TEST_CASE("mirror-delay fault is caught") {
        ValidationOptions opts;
        opts.quick = true;
        opts.fault_skip_mirror_delay = true;
        auto rep = run_validation(opts);
        CHECK_FALSE(rep.all_pass());
        // the fault must break the delay-sensitive checks specifically
        bool series_check_failed = false, norm_check_failed = false;
        for (const auto& c : rep.checks) {
            if (c.name.find("series vs delay ODE") != std::string::npos && !c.pass)
                series_check_failed = true;
            if (c.name.find("norm (semi-infinite)") != std::string::npos && !c.pass)
                norm_check_failed = true;
        }
        CHECK(series_check_failed);
        CHECK(norm_check_failed);
    }
}
