#include "wqed/two_excitation.hpp"

#include <algorithm>
#include <cmath>

#include "wqed/kernels.hpp"

namespace wqed {

namespace {

constexpr double alpha_branch = 1e-4;  // switch to the alpha -> 1 limit forms

std::size_t snap_steps(double t_max, double dt) {
    return static_cast<std::size_t>(std::llround(t_max / dt));
}

std::size_t auto_field_stride(std::size_t n_steps, std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, n_steps / 200);
}

std::size_t divisor_stride(std::size_t k, std::size_t requested) {
    auto s = std::min<std::size_t>(std::max<std::size_t>(requested, 1), k);
    while (s > 1 && k % s != 0) --s;
    return s;
}

}  // namespace

ResonantValues closed_form_resonant(double t, double alpha, double omega0) {
    // time in units of 1/Gamma; evaluated with decaying exponentials only
    if (std::abs(alpha - 1.0) <= alpha_branch) {
        double pg = 0.5 * t * t * std::exp(-t);
        double pe = 0.5 * ((t * t - 4.0 * t + 6.0) * std::exp(-t) - 4.0 * std::exp(-2.0 * t));
        cd c = (1.0 + t) * std::exp(-cd(1.5, omega0) * t);
        return {pg, pe, c};
    }
    double al = alpha;
    double A = 2.0 * al / ((al - 1.0) * (al - 1.0));
    double pg = A * (std::exp(-al * t) - 2.0 * std::exp(-(al + 1.0) * t / 2.0) + std::exp(-t));
    double D = (al - 1.0) * (al - 1.0) * (al + 1.0);
    double pe = (-4.0 * (al - 1.0) * (al - 1.0) * std::exp(-(al + 1.0) * t) +
                 (al * al * al - 3.0 * al * al + al + 5.0) * std::exp(-t) +
                 4.0 * al * (al - 3.0) * std::exp(-(al + 1.0) * t / 2.0) +
                 2.0 * al * (al + 1.0) * std::exp(-al * t)) /
                D;
    double Dc = al * al - 1.0;
    cd g1(-0.5, -omega0), g2(-(al / 2.0 + 1.0), -omega0), g3(-(al + 0.5), -omega0);
    cd c = ((al - 1.0) * (al - 1.0) * std::exp(g1 * t) + 4.0 * al * std::exp(g2 * t) -
            2.0 * (al + 1.0) * std::exp(g3 * t)) /
           Dc;
    return {pg, pe, c};
}

ResonantDerivatives closed_form_resonant_derivatives(double t, double alpha, double omega0) {
    if (std::abs(alpha - 1.0) <= alpha_branch) {
        double dpg = (t - 0.5 * t * t) * std::exp(-t);
        double dpe = 0.5 * ((-t * t + 6.0 * t - 10.0) * std::exp(-t) + 8.0 * std::exp(-2.0 * t));
        cd lam(1.5, omega0);
        cd dc = std::exp(-lam * t) * (1.0 - lam * (1.0 + t));
        return {dpg, dpe, dc};
    }
    double al = alpha;
    double A = 2.0 * al / ((al - 1.0) * (al - 1.0));
    double dpg = A * (-al * std::exp(-al * t) + (al + 1.0) * std::exp(-(al + 1.0) * t / 2.0) -
                      std::exp(-t));
    double D = (al - 1.0) * (al - 1.0) * (al + 1.0);
    double dpe = ((al + 1.0) * 4.0 * (al - 1.0) * (al - 1.0) * std::exp(-(al + 1.0) * t) -
                  (al * al * al - 3.0 * al * al + al + 5.0) * std::exp(-t) -
                  0.5 * (al + 1.0) * 4.0 * al * (al - 3.0) * std::exp(-(al + 1.0) * t / 2.0) -
                  al * 2.0 * al * (al + 1.0) * std::exp(-al * t)) /
                 D;
    double Dc = al * al - 1.0;
    cd g1(-0.5, -omega0), g2(-(al / 2.0 + 1.0), -omega0), g3(-(al + 0.5), -omega0);
    cd dc = ((al - 1.0) * (al - 1.0) * g1 * std::exp(g1 * t) + 4.0 * al * g2 * std::exp(g2 * t) -
             2.0 * (al + 1.0) * g3 * std::exp(g3 * t)) /
            Dc;
    return {dpg, dpe, dc};
}

cd exact_psi_left_of_qubit(double x, double t, const PhysicalConfig& cfg) {
    if (cfg.geometry != Geometry::SemiInfinite)
        throw ConfigError("exact_psi_left_of_qubit requires the semi-infinite geometry");
    if (!(x < -cfg.a)) throw ConfigError("exact_psi_left_of_qubit is valid for x < -a only");
    return chiral_wavepacket(x - t, cfg) * e_sm(t, cfg);
}

// ---------------------------------------------------------------------------
// infinite geometry
// ---------------------------------------------------------------------------

TwoExcitationSolution solve_infinite(const PhysicalConfig& cfg, double dt, double t_max,
                                     const TwoExcOptions& opts) {
    cfg.validate();
    if (cfg.geometry != Geometry::Infinite)
        throw ConfigError("solve_infinite requires the infinite geometry");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");

    const auto n = snap_steps(t_max, dt);
    if (n < 2) throw ConfigError("t_max must cover at least two steps");
    const double dx = dt;
    const cd beta(cfg.alpha * cfg.gamma / 2.0, cfg.k);
    const cd lambda(cfg.gamma / 2.0, cfg.omega0);
    const cd Edec = std::exp(-lambda * dt);
    const double half_g = cfg.gamma / 2.0;
    const double h = dt / 2.0;
    const cd iamp(0.0, std::sqrt(cfg.alpha * cfg.gamma));

    // e(t) on the grid for the overlap rows
    std::vector<cd> e_grid(n + 1);
    for (std::size_t m = 0; m <= n; ++m) e_grid[m] = e_infinite(static_cast<double>(m) * dt, cfg);

    // EL[j] = e^{lambda j dx}; EB[q] = e^{-beta q dt} (q up to 2n for dumps)
    std::vector<cd> EL(n + 2), EB(2 * n + 3);
    for (std::size_t j = 0; j < EL.size(); ++j)
        EL[j] = std::exp(lambda * (static_cast<double>(j) * dx));
    for (std::size_t q = 0; q < EB.size(); ++q)
        EB[q] = std::exp(-beta * (static_cast<double>(q) * dt));

    const bool store = opts.store_history;
    auto hist = std::make_shared<SolverHistory>();
    hist->geometry = Geometry::Infinite;
    hist->cfg = cfg;
    hist->dt = dt;
    hist->x_min = -t_max;
    hist->n_steps = n;
    hist->stride = store ? divisor_stride(n, opts.history_stride) : 1;
    const auto stride = hist->stride;

    TwoExcitationSolution sol;
    sol.cfg = cfg;
    sol.dt = dt;
    sol.p_e.resize(n + 1);
    sol.c.t0 = 0.0;
    sol.c.dt = dt;
    sol.c.values.resize(n + 1);
    hist->norm_r.resize(n + 1);
    hist->norm_l.resize(n + 1);

    const std::size_t fstride = opts.store_fields ? auto_field_stride(n, opts.field_stride) : 0;
    if (opts.store_fields) {
        sol.fields.emplace();
        sol.fields->geometry = Geometry::Infinite;
        sol.fields->dt = dt;
        sol.fields->x_min = -t_max;
        sol.fields->n_x = 2 * n + 1;
        sol.fields->components = {"psi_r", "psi_l"};
    }

    std::vector<cd> rowR(n + 1, 0.0), rowL(n + 1, 0.0), newR(n + 1, 0.0), newL(n + 1, 0.0);
    std::vector<cd> S_prev(n + 1, 0.0), S_cur(n + 1, 0.0);
    std::vector<cd> phiR(n + 1), phiL(n + 1);

    // non-local source row: S(x_j, t_m) = -(G/2) phi(-t) e^{-lambda (t - x)} on 0 < x <= t,
    // constant-per-row factor times the precomputed e^{lambda x} profile
    auto c_src = [&](std::size_t m) {
        return -half_g * iamp * EB[m] * std::exp(-lambda * (static_cast<double>(m) * dt));
    };
    auto build_source = [&](std::vector<cd>& S, std::size_t m) {
        cd cs = c_src(m);
        std::size_t top = std::min(m, n);
        kernels::scale(S.data(), EL.data(), cs, top + 1);
        S[top] *= 0.5;  // light-cone node
        if (top + 1 <= n) std::fill(S.begin() + static_cast<long>(top) + 1, S.end(), 0.0);
    };

    auto frame_quantities = [&](std::size_t m, const std::vector<cd>& R, const std::vector<cd>& L) {
        double t = static_cast<double>(m) * dt;
        double tail_mass = wavepacket_mass_below(-t, cfg);
        std::size_t cone = std::min(m, n);
        double nr = std::exp(-cfg.gamma * t) * tail_mass + trapezoid_norm_jump_end(R, cone, dx);
        double nl = trapezoid_norm_jump_end(L, cone, dx);
        hist->norm_r[m] = nr;
        hist->norm_l[m] = nl;
        sol.p_e[m] = nr + nl;
        cd miv(0.0, -cfg.coupling());
        for (std::size_t j = 0; j <= cone; ++j) {
            cd free = iamp * EB[m - j];
            if (j == m) free *= 0.5;
            double g = (j == 0) ? 0.5 : 1.0;   // theta(x) at the coupling point
            double gc = (j == m) ? 0.5 : 1.0;  // theta(t - x) at the cone
            phiR[j] = free + miv * e_grid[m - j] * g * gc;
            phiL[j] = miv * e_grid[m - j] * g * gc;
        }
        sol.c[m] = std::exp(-lambda * t) * tail_mass +
                   trapezoid_overlap_jump_end(phiR, R, cone, dx) +
                   trapezoid_overlap_jump_end(phiL, L, cone, dx);
    };

    auto dump_frame = [&](std::size_t m, const std::vector<cd>& R, const std::vector<cd>& L) {
        if (!fstride || m % fstride != 0) return;
        auto& fh = *sol.fields;
        cd expl = std::exp(-lambda * (static_cast<double>(m) * dt));
        std::vector<cd> fr(2 * n + 1, 0.0), fl(2 * n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j)  // x < 0: psi_R free-decay region
            fr[j] = iamp * EB[m + (n - j)] * expl;
        for (std::size_t j = 0; j <= std::min(m, n); ++j) {
            fr[n + j] = R[j];
            fl[n - j] = L[j];
        }
        fh.frame_times.push_back(static_cast<double>(m) * dt);
        fh.frames.push_back({std::move(fr), std::move(fl)});
    };

    // t = 0
    rowR[0] = wavepacket_amplitude(0.0, cfg);  // wavefront half-value
    frame_quantities(0, rowR, rowL);
    if (store) {
        hist->tri_r.push_back({rowR[0]});
        hist->tri_l.push_back({rowL[0]});
    }
    dump_frame(0, rowR, rowL);
    build_source(S_prev, 0);
    S_prev[0] = c_src(0);  // right limit at x = 0 for the first segment

    for (std::size_t it = 1; it <= n; ++it) {
        build_source(S_cur, it);
        std::size_t top = std::min(it, n);
        kernels::march_row(newR.data() + 1, rowR.data(), S_prev.data(), S_cur.data() + 1, Edec, h,
                           top);
        kernels::march_row(newL.data() + 1, rowL.data(), S_prev.data(), S_cur.data() + 1, Edec, h,
                           top);
        if (top + 1 <= n) {
            std::fill(newR.begin() + static_cast<long>(top) + 1, newR.end(), 0.0);
            std::fill(newL.begin() + static_cast<long>(top) + 1, newL.end(), 0.0);
        }
        newR[0] = iamp * EB[it] * std::exp(-lambda * (static_cast<double>(it) * dt));
        newL[0] = 0.0;  // the left-mover is born at the coupling point
        rowR.swap(newR);
        rowL.swap(newL);
        frame_quantities(it, rowR, rowL);
        if (store && it % stride == 0) {
            hist->tri_r.emplace_back(rowR.begin(), rowR.begin() + static_cast<long>(top) + 1);
            hist->tri_l.emplace_back(rowL.begin(), rowL.begin() + static_cast<long>(top) + 1);
        }
        dump_frame(it, rowR, rowL);
        S_prev.swap(S_cur);
        S_prev[0] = c_src(it);
    }

    sol.chi_norm.resize(n + 1);
    for (std::size_t m = 0; m <= n; ++m) sol.chi_norm[m] = 1.0 - sol.p_e[m];
    if (store) sol.history = hist;
    return sol;
}

// ---------------------------------------------------------------------------
// semi-infinite geometry
// ---------------------------------------------------------------------------

namespace {

struct SemiMarch {
    const PhysicalConfig& cfg;
    const TwoExcOptions& opts;
    double dt, dx;
    std::size_t n;       // time steps
    std::size_t A, K;    // a = A dx, delay 2a = K cells
    std::size_t ja, jb;  // lattice indices of x = -a and x = +a
    std::size_t nx;
    double x_min;
    double samp;  // sqrt(alpha Gamma): chiral wavefront amplitude
    cd lambda, beta, Edec;
    double delay_g, h;
    bool archive_all;
    std::size_t stride;

    std::vector<cd> EB;   // e^{-beta q dx}, q >= 0
    std::vector<cd> esm;  // e_sm on the grid
    std::size_t ring_size = 0;
    std::vector<std::vector<cd>> ring;
    std::vector<std::vector<cd>> rows;

    SemiMarch(const PhysicalConfig& c, double dt_, double t_max, const TwoExcOptions& o)
        : cfg(c), opts(o), dt(dt_), dx(dt_) {
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        double acells = cfg.a / dx;
        A = static_cast<std::size_t>(std::llround(acells));
        if (A < 1 || std::abs(acells - static_cast<double>(A)) > 1e-9)
            throw ConfigError(
                "lattice misaligned: a must be an integer multiple of dt (use align_dt)");
        K = 2 * A;
        n = snap_steps(t_max, dt);
        if (n < 2) throw ConfigError("t_max must cover at least two steps");
        archive_all = opts.evolve_left || (opts.store_history && opts.history_stride <= 1);
        stride = archive_all ? 1 : divisor_stride(K, opts.history_stride);
        std::size_t wcells = 0;
        if (opts.evolve_left) wcells = snap_steps(opts.left_width, dx);
        ja = wcells;
        jb = ja + K;
        x_min = -cfg.a - static_cast<double>(wcells) * dx;
        nx = jb + n + 1;  // x_max = a + t_max
        samp = std::sqrt(cfg.alpha * cfg.gamma);
        lambda = cd(cfg.gamma / 2.0, cfg.omega0);
        beta = cd(cfg.alpha * cfg.gamma / 2.0, cfg.k);
        Edec = std::exp(-lambda * dt);
        delay_g = opts.disable_delay ? 0.0 : cfg.gamma / 2.0;
        h = dt / 2.0;

        EB.resize(2 * n + K + ja + 4);
        for (std::size_t q = 0; q < EB.size(); ++q)
            EB[q] = std::exp(-beta * (static_cast<double>(q) * dx));
        esm.resize(n + 1);
        for (std::size_t m = 0; m <= n; ++m) esm[m] = e_sm(static_cast<double>(m) * dt, cfg);
        ring_size = std::min(K, n) + 2;  // march lookups never reach deeper than the delay
        ring.assign(ring_size, std::vector<cd>(nx, 0.0));
    }

    // exact product solution below the lattice (virtual index j < 0)
    cd left_value(long j, std::size_t it) const {
        long q = static_cast<long>(it) + static_cast<long>(ja) - j;
        if (q < 0) return 0.0;
        cd v = samp * EB[static_cast<std::size_t>(q)] * esm[it];
        if (q == 0) v *= 0.5;
        return v;
    }

    const std::vector<cd>& ring_row(std::size_t it) const { return ring[it % ring_size]; }
    std::vector<cd>& ring_row(std::size_t it) { return ring[it % ring_size]; }

    cd value(long j, std::size_t it, std::size_t it_cur) const {
        if (j < 0) return left_value(j, it);
        auto ju = static_cast<std::size_t>(j);
        if (ju >= nx) return 0.0;
        if (it_cur - it <= K) return ring_row(it)[ju];
        if (archive_all) return rows[it][ju];
        throw NumericalError("semi-infinite march: history lookup out of range");
    }

    // Non-local source at (x_j, t_it). arrival = true resolves the gates at
    // the kink columns x = -a, +a and at the echo row t = 2a with the
    // incoming segment's one-sided limits; stored rows use the right limits.
    cd source(long j, std::size_t it, std::size_t it_cur, bool arrival) const {
        cd s = 0.0;
        bool delay_on = arrival ? (it > K) : (it >= K);
        if (delay_on && delay_g > 0.0) s += delay_g * value(j - static_cast<long>(K), it - K, it_cur);
        double mg = cfg.gamma / 2.0;  // mirror-image sources (not part of the fault hook)
        long da = j - static_cast<long>(ja);
        if (arrival ? (da > 0) : (da >= 0)) {
            long itr = static_cast<long>(it) - da;
            if (itr >= 0) {
                double w = (itr == 0) ? 0.5 : 1.0;
                auto mret = static_cast<std::size_t>(itr);
                s -= mg * w *
                     (value(2 * static_cast<long>(ja) - j, mret, it_cur) -
                      value(static_cast<long>(K + 2 * ja) - j, mret, it_cur));
            }
        }
        long db = j - static_cast<long>(jb);
        if (arrival ? (db > 0) : (db >= 0)) {
            long itr = static_cast<long>(it) - db;
            if (itr >= 0) {
                double w = (itr == 0) ? 0.5 : 1.0;
                auto mret = static_cast<std::size_t>(itr);
                s -= mg * w *
                     (value(2 * static_cast<long>(jb) - j, mret, it_cur) -
                      value(static_cast<long>(K + 2 * ja) - j, mret, it_cur));
            }
        }
        return s;
    }
};

}  // namespace

TwoExcitationSolution solve_semi_infinite(const PhysicalConfig& cfg, double dt, double t_max,
                                          const TwoExcOptions& opts) {
    cfg.validate();
    if (cfg.geometry != Geometry::SemiInfinite)
        throw ConfigError("solve_semi_infinite requires the semi-infinite geometry");
    SemiMarch mm(cfg, dt, t_max, opts);
    const auto n = mm.n;
    const auto nx = mm.nx;
    const double dx = mm.dx;

    DdeOptions dopt;
    dopt.disable_delay = opts.disable_delay;
    ComplexSeries e_hist = e_semi_dde(cfg, dt, t_max, dopt);

    auto hist = std::make_shared<SolverHistory>();
    hist->geometry = Geometry::SemiInfinite;
    hist->cfg = cfg;
    hist->dt = dt;
    hist->x_min = mm.x_min;
    hist->n_steps = n;
    hist->stride = mm.stride;
    hist->norm_r.resize(n + 1);
    ComplexSeries esm_series;
    esm_series.t0 = 0.0;
    esm_series.dt = dt;
    esm_series.values = mm.esm;
    hist->e_sm_grid = esm_series.values;

    TwoExcitationSolution sol;
    sol.cfg = cfg;
    sol.dt = dt;
    sol.p_e.resize(n + 1);
    sol.c.t0 = 0.0;
    sol.c.dt = dt;
    sol.c.values.resize(n + 1);

    const std::size_t fstride = opts.store_fields ? auto_field_stride(n, opts.field_stride) : 0;
    if (opts.store_fields) {
        sol.fields.emplace();
        sol.fields->geometry = Geometry::SemiInfinite;
        sol.fields->dt = dt;
        sol.fields->x_min = mm.x_min;
        sol.fields->n_x = nx;
        sol.fields->components = {"psi"};
    }

    const double V = cfg.coupling();
    std::vector<cd> phi_row(nx);

    auto fill_phi_row = [&](std::size_t m) {
        std::size_t front = mm.ja + m;
        for (std::size_t j = 0; j < nx; ++j) {
            cd v = 0.0;
            if (j <= front) {
                v = mm.samp * mm.EB[front - j];
                if (j == front) v *= 0.5;
            }
            if (j >= mm.ja && mm.ja + m >= j) {  // theta(x+a) theta(t-x-a)
                // phi jumps across the qubit column; at the lattice boundary
                // (mode a) the overlap row takes the one-sided limit
                double g = (j == mm.ja) ? (mm.ja == 0 ? 1.0 : 0.5) : 1.0;
                std::size_t ret = mm.ja + m - j;
                double gc = (ret == 0) ? 0.5 : 1.0;
                v -= V * g * gc * e_hist[ret];
            }
            if (j >= mm.jb && mm.jb + m >= j) {  // theta(x-a) theta(t-x+a)
                double g = (j == mm.jb) ? 0.5 : 1.0;
                std::size_t ret = mm.jb + m - j;
                double gc = (ret == 0) ? 0.5 : 1.0;
                v += V * g * gc * e_hist[ret];
            }
            phi_row[j] = v;
        }
    };

    auto frame_quantities = [&](std::size_t m, const std::vector<cd>& row) {
        double t = static_cast<double>(m) * dt;
        double tail_mass = wavepacket_mass_below(mm.x_min - t, cfg);
        double pe = std::norm(mm.esm[m]) * tail_mass + trapezoid_norm(row, dx);
        fill_phi_row(m);
        cd cv = mm.esm[m] * tail_mass + trapezoid_overlap(phi_row, row, dx);
        // the moving-front node holds the average across the jumps: phi jumps
        // by samp there (pure advection); psi by samp e_sm(t) - V e(t) (the
        // qubit's source cone switches on exactly at the front)
        std::size_t front = mm.ja + m;
        if (front == 0) {
            pe -= cfg.alpha * cfg.gamma / 8.0 * dx;  // boundary half-node overcount
            cv -= cfg.alpha * cfg.gamma / 8.0 * dx;
        } else if (front + 1 < nx) {
            cd jpsi = mm.samp * mm.esm[m] - V * e_hist[m];
            pe += 0.25 * dx * std::norm(jpsi);
            cv += 0.25 * dx * mm.samp * jpsi;
        }
        hist->norm_r[m] = pe;
        sol.p_e[m] = pe;
        sol.c[m] = cv;
    };

    {
        auto& r0 = mm.ring_row(0);
        for (std::size_t j = 0; j < nx; ++j) {
            long q = static_cast<long>(mm.ja) - static_cast<long>(j);
            r0[j] = (q > 0)    ? mm.samp * mm.EB[static_cast<std::size_t>(q)]
                    : (q == 0) ? cd(0.5 * mm.samp)
                               : cd(0.0);
        }
        frame_quantities(0, r0);
        if (opts.store_history || mm.archive_all) mm.rows.push_back(r0);
        if (fstride) {
            sol.fields->frame_times.push_back(0.0);
            sol.fields->frames.push_back({r0});
        }
    }

    std::vector<cd> S_prev(nx, 0.0), S_arr(nx, 0.0);
    auto build_row_sources = [&](std::size_t it, std::vector<cd>& S, bool arrival,
                                 std::size_t it_cur) {
        std::size_t cap = std::min(nx - 1, mm.jb + it + 1);
        for (std::size_t j = arrival ? 1 : 0; j <= cap; ++j)
            S[j] = mm.source(static_cast<long>(j), it, it_cur, arrival);
        if (cap + 1 < nx) std::fill(S.begin() + static_cast<long>(cap) + 1, S.end(), 0.0);
    };
    build_row_sources(0, S_prev, false, 0);

    for (std::size_t it = 1; it <= n; ++it) {
        build_row_sources(it, S_arr, true, it - 1);
        const auto& old_row = mm.ring_row(it - 1);
        auto& new_row = mm.ring_row(it);
        kernels::march_row(new_row.data() + 1, old_row.data(), S_prev.data(), S_arr.data() + 1,
                           mm.Edec, mm.h, nx - 1);
        // left boundary: exact product feed (in mode (a) this is the qubit
        // column, where the field is continuous across x = -a)
        new_row[0] = mm.samp * mm.EB[it + mm.ja] * mm.esm[it];
        frame_quantities(it, new_row);
        if ((opts.store_history || mm.archive_all) && it % mm.stride == 0)
            mm.rows.push_back(new_row);
        if (fstride && it % fstride == 0) {
            sol.fields->frame_times.push_back(static_cast<double>(it) * dt);
            sol.fields->frames.push_back({new_row});
        }
        build_row_sources(it, S_prev, false, it);
    }

    sol.chi_norm.resize(n + 1);
    for (std::size_t m = 0; m <= n; ++m) sol.chi_norm[m] = 1.0 - sol.p_e[m];
    if (opts.store_history || mm.archive_all) {
        hist->rows = std::move(mm.rows);
        sol.history = hist;
    }
    return sol;
}

// ---------------------------------------------------------------------------
// chi reconstruction: norms and steady-state probabilities
// ---------------------------------------------------------------------------

namespace {

double cumtrap(const std::vector<double>& v, std::size_t m, double dt) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 <= m; ++i) s += 0.5 * (v[i] + v[i + 1]);
    return s * dt;
}

// psi lookup over the stored history, analytic in the exact product region
struct SemiPsi {
    const SolverHistory& h;
    double samp;
    cd beta;
    long ja;
    long nxl;

    explicit SemiPsi(const SolverHistory& hh)
        : h(hh),
          samp(std::sqrt(hh.cfg.alpha * hh.cfg.gamma)),
          beta(hh.cfg.alpha * hh.cfg.gamma / 2.0, hh.cfg.k),
          ja(std::llround((-hh.cfg.a - hh.x_min) / hh.dt)),
          nxl(static_cast<long>(hh.rows.front().size())) {}

    cd operator()(long j, std::size_t m) const {
        if (j >= nxl) return 0.0;
        if (j >= 0) return h.rows[m / h.stride][static_cast<std::size_t>(j)];
        long q = static_cast<long>(m) + ja - j;
        if (q < 0) return 0.0;
        cd v = samp * std::exp(-beta * (static_cast<double>(q) * h.dt)) * h.e_sm_grid[m];
        if (q == 0) v *= 0.5;
        return v;
    }
};

struct InfPsi {
    const SolverHistory& h;
    cd iamp, beta, lambda;

    explicit InfPsi(const SolverHistory& hh)
        : h(hh),
          iamp(0.0, std::sqrt(hh.cfg.alpha * hh.cfg.gamma)),
          beta(hh.cfg.alpha * hh.cfg.gamma / 2.0, hh.cfg.k),
          lambda(hh.cfg.gamma / 2.0, hh.cfg.omega0) {}

    cd right(long j, std::size_t m) const {  // psi_R at x = j dx
        if (j >= 0) {
            const auto& row = h.tri_r[m / h.stride];
            return (static_cast<std::size_t>(j) < row.size()) ? row[static_cast<std::size_t>(j)]
                                                              : cd(0.0);
        }
        double u = static_cast<double>(j) * h.dt;
        double t = static_cast<double>(m) * h.dt;
        return iamp * std::exp(beta * (u - t)) * std::exp(-lambda * t);
    }
    cd left(long j, std::size_t m) const {  // psi_L at x = -j dx
        if (j < 0) return 0.0;
        const auto& row = h.tri_l[m / h.stride];
        return (static_cast<std::size_t>(j) < row.size()) ? row[static_cast<std::size_t>(j)]
                                                          : cd(0.0);
    }
};

struct InfChiIntegrals {
    double ir, il, xrr, xrl;
};

InfChiIntegrals infinite_chi_integrals(const SolverHistory& h, std::size_t M) {
    const double dt = h.dt;
    const auto s = h.stride;
    const double ds = static_cast<double>(s) * dt;
    InfPsi psi(h);
    double ir = cumtrap(h.norm_r, M, dt);
    double il = cumtrap(h.norm_l, M, dt);
    cd xrr = 0.0, xrl = 0.0;
    const std::size_t nseg = M / s;
    for (std::size_t i2 = 0; i2 <= nseg; ++i2) {
        std::size_t m2 = M - i2 * s;
        double w2 = (i2 == 0 || i2 == nseg) ? 0.5 : 1.0;
        cd inner_rr = 0.0, inner_rl = 0.0;
        for (std::size_t i1 = 0; i1 <= nseg; ++i1) {
            std::size_t m1 = M - i1 * s;
            double w1 = (i1 == 0 || i1 == nseg) ? 0.5 : 1.0;
            long u = (static_cast<long>(i1) - static_cast<long>(i2)) * static_cast<long>(s);
            inner_rr += w1 * psi.right(u, m2) * std::conj(psi.right(-u, m1));
            if (i1 <= i2) {
                double wl = (i1 == 0 || i1 == i2) ? 0.5 : 1.0;
                inner_rl += wl * psi.right(u, m2) * std::conj(psi.left(-u, m1));
            }
        }
        xrr += w2 * inner_rr;
        xrl += w2 * inner_rl;
    }
    return {ir, il, xrr.real() * ds * ds, xrl.real() * ds * ds};
}

}  // namespace

double reconstruct_chi_norm(const TwoExcitationSolution& sol, std::size_t frame) {
    if (!sol.history) throw ConfigError("reconstruct_chi_norm needs store_history");
    const auto& h = *sol.history;
    if (frame > h.n_steps) throw ConfigError("frame out of range");
    if (frame % h.stride != 0) throw ConfigError("frame must be stride-aligned");
    const double V2 = h.cfg.gamma / 2.0;

    if (h.geometry == Geometry::Infinite) {
        auto ints = infinite_chi_integrals(h, frame);
        return V2 * (2.0 * ints.ir + 2.0 * ints.il + ints.xrr + 2.0 * ints.xrl);
    }

    const auto M = frame;
    const double dt = h.dt, dx = dt;
    const auto s = h.stride;
    const double ds = static_cast<double>(s) * dx;
    SemiPsi psi(h);
    double t = static_cast<double>(M) * dt;
    double I = cumtrap(h.norm_r, M, dt);
    const long Ac = std::llround(h.cfg.a / dx);
    const long Kc = 2 * Ac;
    const long jqa = psi.ja;

    // cross term of |g|^2: x2 in [a, t-a], rows tau1 = t-x2-a and tau2 = tau1+2a
    cd xab_diag = 0.0;
    if (t >= 2.0 * h.cfg.a) {
        long n2 = (static_cast<long>(M) - Kc) / static_cast<long>(s);
        for (long i2 = 0; i2 <= n2; ++i2) {
            auto m1 = static_cast<std::size_t>(static_cast<long>(M) - Kc - i2 * static_cast<long>(s));
            auto m2 = static_cast<std::size_t>(static_cast<long>(m1) + Kc);
            double w2 = (i2 == 0 || i2 == n2) ? 0.5 : 1.0;
            cd inner = 0.0;
            long jhi = std::min(psi.nxl - 1, jqa + static_cast<long>(m1) + Kc);
            for (long j1 = -Kc; j1 <= jhi; ++j1)
                inner += psi(j1, m1) * std::conj(psi(j1 + Kc, m2));
            double strip = wavepacket_mass_below(
                h.x_min - static_cast<double>(Kc) * dx - static_cast<double>(m1) * dt, h.cfg);
            cd slice = inner * dx + h.e_sm_grid[m1] * std::conj(h.e_sm_grid[m2]) * strip;
            xab_diag += w2 * slice;
        }
        xab_diag *= ds;
    }

    // exchange terms of |g12 + g21|^2
    cd xaa = 0.0, xab = 0.0, xbb = 0.0;
    {
        const long nseg = static_cast<long>(M / s);
        for (long i2 = 0; i2 <= nseg; ++i2) {
            auto tau1 = static_cast<std::size_t>((nseg - i2) * static_cast<long>(s));
            double w2 = (i2 == 0 || i2 == nseg) ? 0.5 : 1.0;
            for (long i1 = 0; i1 <= nseg; ++i1) {
                auto tau2 = static_cast<std::size_t>((nseg - i1) * static_cast<long>(s));
                double w = w2 * ((i1 == 0 || i1 == nseg) ? 0.5 : 1.0) * ds * ds;
                long d12 = (i1 - i2) * static_cast<long>(s);
                xaa += w * psi(jqa + d12, tau1) * std::conj(psi(jqa - d12, tau2));
                xab += w * psi(jqa + Kc + d12, tau1) * std::conj(psi(jqa - d12, tau2));
                xbb += w * psi(jqa + Kc + d12, tau1) * std::conj(psi(jqa + Kc - d12, tau2));
            }
        }
    }
    return V2 * (2.0 * I - 2.0 * xab_diag.real() + xaa.real() - 2.0 * xab.real() + xbb.real());
}

SteadyStateProbabilities steady_state_probabilities(const TwoExcitationSolution& sol) {
    if (!sol.history) throw ConfigError("steady_state_probabilities needs store_history");
    const auto& h = *sol.history;
    if (h.geometry != Geometry::Infinite)
        throw ConfigError("steady_state_probabilities requires the infinite geometry");
    double pe_final = sol.p_e.back();
    if (pe_final >= 1e-4)
        throw NumericalError("insufficient decay at t_max: p_e = " + std::to_string(pe_final));
    const double V2 = h.cfg.gamma / 2.0;
    auto ints = infinite_chi_integrals(h, h.n_steps);
    SteadyStateProbabilities out;
    out.p_rr = V2 * (ints.ir + ints.xrr);
    out.p_rl = V2 * (ints.ir + ints.il + 2.0 * ints.xrl);
    out.p_ll = V2 * ints.il;
    out.residual_excitation = pe_final;
    return out;
}

ComplexSeries overlap_c(const OneExcitationSolution& one, const TwoExcitationSolution& two) {
    if (!two.fields) throw ConfigError("overlap_c needs stored fields");
    const auto& fh = *two.fields;
    if (one.cfg.geometry != two.cfg.geometry) throw ConfigError("geometry mismatch");
    if (std::abs(one.e.dt - two.dt) > 1e-12) throw ConfigError("lattice mismatch: dt differs");
    const double dx = two.dt;
    const PhysicalConfig& cfg = two.cfg;
    ComplexSeries out;
    out.t0 = 0.0;
    out.dt = fh.frame_times.size() > 1 ? fh.frame_times[1] - fh.frame_times[0] : two.dt;
    out.values.reserve(fh.frames.size());
    std::vector<cd> phi_row(fh.n_x);
    double samp = std::sqrt(cfg.alpha * cfg.gamma);
    for (std::size_t f = 0; f < fh.frames.size(); ++f) {
        double t = fh.frame_times[f];
        cd acc;
        if (cfg.geometry == Geometry::SemiInfinite) {
            for (std::size_t j = 0; j < fh.n_x; ++j)
                phi_row[j] = phi_semi(fh.x_at(j), t, cfg, one.e);
            cd esm = e_sm(t, cfg);
            cd jpsi = samp * esm - cfg.coupling() * one.e.at_time(t);
            cd corr = 0.25 * dx * samp * jpsi;
            auto jf = static_cast<std::size_t>(std::llround((t - cfg.a - fh.x_min) / dx));
            if (jf == 0) corr = -cfg.alpha * cfg.gamma / 8.0 * dx;  // front on the boundary
            acc = esm * wavepacket_mass_below(fh.x_min - t, cfg) +
                  trapezoid_overlap(phi_row, fh.frames[f][0], dx) + corr;
        } else {
            std::vector<cd> comp(fh.n_x);
            for (std::size_t j = 0; j < fh.n_x; ++j) {
                auto [pr, pl] = phi_infinite(fh.x_at(j), t, cfg, one.e);
                phi_row[j] = pr;
                comp[j] = pl;
            }
            cd dec = std::exp(-cd(cfg.gamma / 2.0, cfg.omega0) * t);
            cd jpsi = samp * dec - cfg.coupling() * one.e.at_time(t);
            acc = dec * wavepacket_mass_below(fh.x_min - t, cfg) +
                  trapezoid_overlap(phi_row, fh.frames[f][0], dx) +
                  trapezoid_overlap(comp, fh.frames[f][1], dx) + 0.25 * dx * samp * jpsi;
        }
        out.values.push_back(acc);
    }
    return out;
}

}  // namespace wqed
