#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "wqed/master_equation.hpp"
#include "wqed/nm_measures.hpp"
#include "wqed/two_excitation.hpp"

namespace wqed {

// Flat-file outputs. Data files are deterministic byte-for-byte for a fixed
// configuration: fixed "%.12g" formatting and no timestamps (run metadata
// goes to a sidecar).

void write_trajectory_csv(const std::filesystem::path& path, const MapTrajectory& traj);

void write_rates_csv(const std::filesystem::path& path, const RateTrajectory& rates);

void write_one_excitation_csv(const std::filesystem::path& path, const OneExcitationSolution& one);

void write_two_excitation_csv(const std::filesystem::path& path, const TwoExcitationSolution& two);

struct SweepRow {
    double alpha = 0.0;
    double k0a_over_pi = -1.0;  // negative = infinite geometry
    double gm = 0.0, blp = 0.0, max_n_delta = 0.0;
    bool cp_broken = false, p_broken = false;
};

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

void write_negativity_map_csv(const std::filesystem::path& path,
                              const std::vector<double>& alphas, double dt,
                              const std::vector<std::vector<double>>& n_delta);

void write_meta(const std::filesystem::path& path, const std::map<std::string, std::string>& kv);

/// Binary FieldHistory dump: "WQFH" magic + version + lattice header followed
/// by row-major (re, im) doubles per frame and component.
void write_field_history(const std::filesystem::path& path, const FieldHistory& fh);
FieldHistory read_field_history(const std::filesystem::path& path);

// matplotlib plot scripts referencing only the emitted CSVs
void write_simulate_plot_script(const std::filesystem::path& path);
void write_heatmap_plot_script(const std::filesystem::path& path);
void write_sweep_plot_script(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace wqed
