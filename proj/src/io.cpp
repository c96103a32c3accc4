#include "wqed/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace wqed {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ofstream f(path, mode);
    if (!f) throw ConfigError("cannot write to " + path.string());
    return f;
}

}  // namespace

std::string format_double(double v) {
    if (v == 0.0) return "0";  // normalize signed zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const MapTrajectory& traj) {
    auto f = open_out(path);
    f << "t,p_g,p_e,re_c,im_c,delta,det_M,choi_min_eig\n";
    for (const auto& s : traj.snapshots) {
        f << format_double(s.t) << ',' << format_double(s.p_g) << ',' << format_double(s.p_e)
          << ',' << format_double(s.c.real()) << ',' << format_double(s.c.imag()) << ','
          << format_double(s.delta()) << ',' << format_double(s.det_m()) << ','
          << format_double(choi_min_eigenvalue(s)) << '\n';
    }
}

void write_rates_csv(const std::filesystem::path& path, const RateTrajectory& rates) {
    auto f = open_out(path);
    f << "t,gamma_plus,gamma_minus,gamma_z,S,singular_flag\n";
    for (std::size_t i = 0; i < rates.size(); ++i) {
        f << format_double(static_cast<double>(i) * rates.dt) << ','
          << format_double(rates.gamma_plus[i]) << ',' << format_double(rates.gamma_minus[i])
          << ',' << format_double(rates.gamma_z[i]) << ',' << format_double(rates.shift[i]) << ','
          << int(rates.singular[i]) << '\n';
    }
}

void write_one_excitation_csv(const std::filesystem::path& path,
                              const OneExcitationSolution& one) {
    auto f = open_out(path);
    f << "t,re_e,im_e,p_g,norm_residual\n";
    for (std::size_t i = 0; i < one.e.size(); ++i) {
        f << format_double(one.e.time_at(i)) << ',' << format_double(one.e[i].real()) << ','
          << format_double(one.e[i].imag()) << ',' << format_double(one.p_g[i]) << ','
          << format_double(one.norm_residual[i]) << '\n';
    }
}

void write_two_excitation_csv(const std::filesystem::path& path,
                              const TwoExcitationSolution& two) {
    auto f = open_out(path);
    f << "t,p_e,re_c,im_c,norm_residual\n";
    // the reconstruction-based residual is reported as a step function: the
    // value at the most recent reconstructed frame (exactly 0 at t = 0)
    double current = two.p_e.empty() ? 0.0 : two.p_e.front() - 1.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < two.p_e.size(); ++i) {
        if (next < two.residual_frames.size() && two.residual_frames[next] == i) {
            current = two.norm_residual[next];
            ++next;
        }
        f << format_double(static_cast<double>(i) * two.dt) << ',' << format_double(two.p_e[i])
          << ',' << format_double(two.c[i].real()) << ',' << format_double(two.c[i].imag()) << ','
          << format_double(current) << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    auto f = open_out(path);
    f << "alpha,k0a_over_pi,gm,blp,max_n_delta,cp_broken,p_broken\n";
    for (const auto& r : rows) {
        f << format_double(r.alpha) << ',';
        if (r.k0a_over_pi < 0.0)
            f << "inf";
        else
            f << format_double(r.k0a_over_pi);
        f << ',' << format_double(r.gm) << ',' << format_double(r.blp) << ','
          << format_double(r.max_n_delta) << ',' << int(r.cp_broken) << ',' << int(r.p_broken)
          << '\n';
    }
}

void write_negativity_map_csv(const std::filesystem::path& path, const std::vector<double>& alphas,
                              double dt, const std::vector<std::vector<double>>& n_delta) {
    auto f = open_out(path);
    f << "alpha,t,n_delta\n";
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = 0; j < n_delta[i].size(); ++j)
            f << format_double(alphas[i]) << ',' << format_double(static_cast<double>(j) * dt)
              << ',' << format_double(n_delta[i][j]) << '\n';
}

void write_meta(const std::filesystem::path& path, const std::map<std::string, std::string>& kv) {
    auto f = open_out(path);
    for (const auto& [k, v] : kv) f << k << " = " << v << '\n';
}

void write_field_history(const std::filesystem::path& path, const FieldHistory& fh) {
    auto f = open_out(path, std::ios::binary);
    f.write("WQFH", 4);
    std::uint32_t version = 1;
    std::uint32_t geom = fh.geometry == Geometry::SemiInfinite ? 1 : 0;
    auto ncomp = static_cast<std::uint32_t>(fh.components.size());
    auto nx = static_cast<std::uint64_t>(fh.n_x);
    auto nframes = static_cast<std::uint64_t>(fh.frames.size());
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&geom), 4);
    f.write(reinterpret_cast<const char*>(&ncomp), 4);
    f.write(reinterpret_cast<const char*>(&nx), 8);
    f.write(reinterpret_cast<const char*>(&nframes), 8);
    f.write(reinterpret_cast<const char*>(&fh.dt), 8);
    f.write(reinterpret_cast<const char*>(&fh.x_min), 8);
    for (std::size_t fi = 0; fi < fh.frames.size(); ++fi) {
        f.write(reinterpret_cast<const char*>(&fh.frame_times[fi]), 8);
        for (const auto& comp : fh.frames[fi])
            f.write(reinterpret_cast<const char*>(comp.data()),
                    static_cast<std::streamsize>(comp.size() * sizeof(cd)));
    }
}

FieldHistory read_field_history(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path.string());
    char magic[4];
    f.read(magic, 4);
    if (std::memcmp(magic, "WQFH", 4) != 0) throw ConfigError("not a field-history file");
    std::uint32_t version = 0, geom = 0, ncomp = 0;
    std::uint64_t nx = 0, nframes = 0;
    FieldHistory fh;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&geom), 4);
    f.read(reinterpret_cast<char*>(&ncomp), 4);
    f.read(reinterpret_cast<char*>(&nx), 8);
    f.read(reinterpret_cast<char*>(&nframes), 8);
    f.read(reinterpret_cast<char*>(&fh.dt), 8);
    f.read(reinterpret_cast<char*>(&fh.x_min), 8);
    fh.geometry = geom ? Geometry::SemiInfinite : Geometry::Infinite;
    fh.n_x = nx;
    fh.components.resize(ncomp);
    for (std::uint32_t c = 0; c < ncomp; ++c)
        fh.components[c] = (ncomp == 1) ? "psi" : (c == 0 ? "psi_r" : "psi_l");
    fh.frame_times.resize(nframes);
    fh.frames.resize(nframes);
    for (std::uint64_t fi = 0; fi < nframes; ++fi) {
        f.read(reinterpret_cast<char*>(&fh.frame_times[fi]), 8);
        fh.frames[fi].resize(ncomp);
        for (std::uint32_t c = 0; c < ncomp; ++c) {
            fh.frames[fi][c].resize(nx);
            f.read(reinterpret_cast<char*>(fh.frames[fi][c].data()),
                   static_cast<std::streamsize>(nx * sizeof(cd)));
        }
    }
    if (!f) throw ConfigError("truncated field-history file");
    return fh;
}

void write_simulate_plot_script(const std::filesystem::path& path) {
    auto f = open_out(path);
    f << R"(#!/usr/bin/env python3
# renders the simulate outputs in this directory
import csv, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

def load(name):
    with open(os.path.join(os.path.dirname(__file__) or ".", name)) as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}

traj = load("trajectory.csv")
rates = load("rates.csv")
fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
axes[0].plot(traj["t"], traj["p_g"], label="p_g")
axes[0].plot(traj["t"], traj["p_e"], label="p_e")
axes[0].set_ylabel("population")
axes[0].legend()
axes[1].plot(traj["t"], traj["delta"], label="Delta")
axes[1].plot(traj["t"], traj["det_M"], label="det M")
axes[1].axhline(0, color="k", lw=0.5)
axes[1].set_ylabel("Delta / det M")
axes[1].legend()
axes[2].plot(rates["t"], rates["gamma_plus"], label="gamma+")
axes[2].plot(rates["t"], rates["gamma_minus"], label="gamma-")
axes[2].plot(rates["t"], rates["gamma_z"], label="gamma_z")
axes[2].set_ylim(-5, 5)
axes[2].set_xlabel("t [1/Gamma]")
axes[2].set_ylabel("rates [Gamma]")
axes[2].legend()
fig.tight_layout()
fig.savefig(os.path.join(os.path.dirname(__file__) or ".", "simulate.png"), dpi=150)
print("wrote simulate.png")
)";
}

void write_heatmap_plot_script(const std::filesystem::path& path) {
    auto f = open_out(path);
    f << R"(#!/usr/bin/env python3
# renders negativity_map.csv as a density plot over (t, alpha)
import csv, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

base = os.path.dirname(__file__) or "."
alphas, ts, vals = [], [], {}
with open(os.path.join(base, "negativity_map.csv")) as fh:
    for r in csv.DictReader(fh):
        a, t, v = float(r["alpha"]), float(r["t"]), float(r["n_delta"])
        vals[(a, t)] = v
        if a not in alphas: alphas.append(a)
        if t not in ts: ts.append(t)
grid = [[vals[(a, t)] for t in ts] for a in alphas]
fig, ax = plt.subplots(figsize=(7, 5))
pc = ax.pcolormesh(ts, alphas, grid, shading="nearest", cmap="inferno")
ax.set_yscale("log")
ax.set_xlabel("t [1/Gamma]")
ax.set_ylabel("alpha")
fig.colorbar(pc, label="N_Delta")
fig.tight_layout()
fig.savefig(os.path.join(base, "negativity_map.png"), dpi=150)
print("wrote negativity_map.png")
)";
}

void write_sweep_plot_script(const std::filesystem::path& path) {
    auto f = open_out(path);
    f << R"(#!/usr/bin/env python3
# renders sweep.csv: GM and BLP vs alpha per geometry, linear-log
import csv, os
from collections import defaultdict
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

base = os.path.dirname(__file__) or "."
series = defaultdict(list)
with open(os.path.join(base, "sweep.csv")) as fh:
    for r in csv.DictReader(fh):
        series[r["k0a_over_pi"]].append((float(r["alpha"]), float(r["gm"]), float(r["blp"])))
fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharex=True)
for key, pts in sorted(series.items()):
    pts.sort()
    label = "infinite" if key == "inf" else f"k0a = {key} pi"
    axes[0].plot([p[0] for p in pts], [p[1] for p in pts], label=label)
    axes[1].plot([p[0] for p in pts], [p[2] for p in pts], label=label)
for ax, name in zip(axes, ["GM", "BLP"]):
    ax.set_xscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel(name)
    ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(base, "sweep.png"), dpi=150)
print("wrote sweep.png")
)";
}

}  // namespace wqed
