#include "coopq/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coopq/analytic.hpp"
#include "coopq/media.hpp"
#include "coopq/oracle.hpp"
#include "coopq/schedule.hpp"
#include "coopq/table.hpp"
#include "validate.hpp"

namespace coopq {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ValidationError("grid needs at least one point");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        v.push_back(lo);
        return v;
    }
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) v.push_back(lo + i * h);
    return v;
}

// "lo:hi:n" -> n evenly spaced values
std::vector<double> parse_range(const std::string& spec) {
    double lo = 0, hi = 0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
        throw ValidationError("bad range '" + spec + "', expected lo:hi:n");
    return linspace(lo, hi, n);
}

// "dur:alpha,dur:alpha,..."
DetuningSchedule parse_schedule(const std::string& spec) {
    std::vector<DetuningSchedule::Segment> segs;
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) {
        double dur = 0, alpha = 0;
        char c = 0;
        std::istringstream ss(item);
        if (!(ss >> dur >> c >> alpha) || c != ':')
            throw ValidationError("bad schedule item '" + item + "', expected dur:alpha");
        segs.push_back({dur, alpha});
    }
    return DetuningSchedule::make(segs);
}

std::string manifest_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind(".csv");
    if (dot != std::string::npos && dot + 4 == csv_path.size())
        return csv_path.substr(0, dot) + ".manifest.json";
    return csv_path + ".manifest.json";
}

struct ManifestScope {
    RunManifest m;
    std::string path;

    ManifestScope(std::string command, std::string csv_path)
        : path(manifest_path(csv_path)) {
        m.command = std::move(command);
        m.started = iso8601_utc_now();
    }
    void param(const std::string& k, const std::string& v) { m.params[k] = v; }
    void param(const std::string& k, double v) { m.params[k] = format_value(v); }
    void param(const std::string& k, int v) { m.params[k] = std::to_string(v); }
    void finish(const std::string& out_path, const std::string& digest) {
        m.outputs.emplace_back(out_path, digest);
        m.finished = iso8601_utc_now();
        m.write(path);
    }
};

// histogram CSV written by `spectrum`: bin_center, density[, fit]
EigenvalueHistogram read_density_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read density file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw ValidationError("empty density file: " + path);
    std::vector<double> centers, density;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(is, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw ValidationError("density file needs >= 2 columns");
        centers.push_back(row[0]);
        density.push_back(row[1]);
    }
    if (centers.size() < 2) throw ValidationError("density file needs >= 2 bins");
    const double w = centers[1] - centers[0];
    EigenvalueHistogram h;
    h.bin_edges.resize(centers.size() + 1);
    for (std::size_t i = 0; i < centers.size(); ++i) h.bin_edges[i] = centers[i] - 0.5 * w;
    h.bin_edges.back() = centers.back() + 0.5 * w;
    h.density = std::move(density);
    return h;
}

int threads_flag = 1;
std::uint64_t seed_flag = 1;

int cmd_collective(double t, const std::string& v_range, const std::string& a_range,
                   const std::string& out) {
    ManifestScope ms("collective", out);
    ms.param("t", t);
    ms.param("v_range", v_range);
    ms.param("alpha_range", a_range);
    ms.m.master_seed = seed_flag;

    const auto rows = sweep_collective(parse_range(v_range), parse_range(a_range), t);
    Table tab;
    tab.header = {"v", "alpha", "n1"};
    for (const auto& p : rows) tab.rows.push_back({p.x, p.y, p.n1});
    ms.finish(out, write_csv(tab, out));
    return 0;
}

int cmd_spectrum(int n, int samples, int bins, const std::string& range, bool with_fit,
                 const std::string& grouping, const std::string& out) {
    SpectrumParams p;
    p.n_dipoles = n;
    p.n_samples = samples;
    p.bins = bins;
    p.seed = seed_flag;
    p.threads = threads_flag;
    {
        double lo = 0, hi = 0;
        char c = 0;
        std::istringstream is(range);
        if (!(is >> lo >> c >> hi) || c != ':')
            throw ValidationError("bad range '" + range + "', expected lo:hi");
        p.range_min = lo;
        p.range_max = hi;
    }
    const FitGrouping fg =
        grouping == "prefactor" ? FitGrouping::prefactor : FitGrouping::denominator;

    ManifestScope ms("spectrum", out);
    ms.param("n", n);
    ms.param("samples", samples);
    ms.param("bins", bins);
    ms.param("range", range);
    ms.param("fit", with_fit ? "true" : "false");
    ms.param("fit_grouping", grouping);
    ms.m.master_seed = seed_flag;

    SpectrumStats stats;
    const auto h = eigenvalue_density(p, &stats);

    Table tab;
    tab.header = {"bin_center", "density"};
    if (with_fit) tab.header.push_back("fit_value");
    for (int b = 0; b < h.bins(); ++b) {
        std::vector<double> row{h.center(b), h.density[static_cast<std::size_t>(b)]};
        if (with_fit) {
            const double c = h.center(b);
            row.push_back(c == 0.0 ? 0.0 : spectral_density_fit(c, n, fg));
        }
        tab.rows.push_back(std::move(row));
    }
    ms.param("pooled_skewness", stats.skewness);
    ms.param("max_trace_ratio", stats.max_trace_ratio);
    ms.finish(out, write_csv(tab, out));
    return 0;
}

int cmd_random_media(int n, int samples, const std::string& t_range, const std::string& a_range,
                     bool scaled, const std::string& out) {
    ManifestScope ms("random-media", out);
    ms.param("n", n);
    ms.param("samples", samples);
    ms.param("t_range", t_range);
    ms.param("alpha_range", a_range);
    ms.param("scaled_axes", scaled ? "true" : "false");
    ms.m.master_seed = seed_flag;

    std::vector<VectorXd> spectra;
    spectra.reserve(static_cast<std::size_t>(samples));
    SpectrumParams p;
    p.n_dipoles = n;
    p.n_samples = samples;
    p.seed = seed_flag;
    p.threads = threads_flag;
    eigenvalue_density(p, nullptr, &spectra);  // reuses the deterministic sampler

    const auto rows =
        sweep_ensemble(spectra, n, parse_range(t_range), parse_range(a_range), scaled);
    Table tab;
    tab.header = {scaled ? "t_scaled" : "t", scaled ? "alpha_scaled" : "alpha", "n1"};
    for (const auto& r : rows) tab.rows.push_back({r.x, r.y, r.n1});
    ms.finish(out, write_csv(tab, out));
    return 0;
}

int cmd_beats_map(double nv, double alpha, const std::string& t1_range,
                  const std::string& dt_range, double t_offset, const std::string& out) {
    ManifestScope ms("beats", out);
    ms.param("nv", nv);
    ms.param("alpha", alpha);
    ms.param("t1_range", t1_range);
    ms.param("dt_range", dt_range);
    ms.param("t_offset", t_offset);
    ms.m.master_seed = seed_flag;

    Table tab;
    tab.header = {"t1", "dt", "ratio"};
    for (double t1 : parse_range(t1_range)) {
        for (double dt : parse_range(dt_range)) {
            const double t2 = t1 + dt;
            tab.rows.push_back({t1, dt, beat_ratio(nv, alpha, t1, t2, t2 + t_offset)});
        }
    }
    ms.finish(out, write_csv(tab, out));
    return 0;
}

int cmd_beats_curve(double alpha, double t1, double dt, const std::string& tau_range,
                    const std::string& density_file, bool averaged, const std::string& out) {
    ManifestScope ms("beats", out);
    ms.param("alpha", alpha);
    ms.param("t1", t1);
    ms.param("dt", dt);
    ms.param("tau_range", tau_range);
    ms.param("density_file", density_file);
    ms.param("averaged", averaged ? "true" : "false");
    ms.m.master_seed = seed_flag;

    const auto density = read_density_csv(density_file);
    const double t2 = t1 + dt;

    Table tab;
    tab.header = {"t_minus_t2", "n1"};
    for (double tau : parse_range(tau_range)) {
        const double t = t2 + tau;
        auto observable = [&](double v) -> double {
            if (v == 0.0) return 0.0;
            if (averaged) return jitter_averaged_population(v, alpha, t1, t2, t);
            return population_mode(v, DetuningSchedule::switched(alpha, t1, t2, t), t);
        };
        tab.rows.push_back({tau, average_over_density(observable, density, true)});
    }
    ms.finish(out, write_csv(tab, out));
    return 0;
}

int cmd_oracle(int n, const std::string& coupling, double alpha, const std::string& schedule,
               double t, const std::string& scales_spec, double tol, double interaction_scale,
               bool dense, const std::string& out, const std::string& json_out) {
    // coupling: "collective:<v>" or "geometry:<seed>"
    CouplingMatrix V = [&] {
        const auto colon = coupling.find(':');
        if (colon == std::string::npos)
            throw ValidationError("bad coupling '" + coupling +
                                  "', expected collective:<v> or geometry:<seed>");
        const std::string kind = coupling.substr(0, colon);
        const std::string val = coupling.substr(colon + 1);
        if (kind == "collective") return collective_coupling(n, std::stod(val));
        if (kind == "geometry") {
            const auto g = sample_geometry(n, std::stoull(val));
            return coupling_from_geometry(g);
        }
        throw ValidationError("unknown coupling kind '" + kind + "'");
    }();

    std::vector<double> scales;
    {
        std::istringstream is(scales_spec);
        std::string item;
        while (std::getline(is, item, ',')) scales.push_back(std::stod(item));
    }
    if (scales.empty()) throw ValidationError("oracle needs at least one scale");

    EvolveOptions opts;
    opts.tol = tol;
    opts.interaction_scale = interaction_scale;
    opts.use_dense = dense;

    ManifestScope ms("oracle", out);
    ms.param("n", n);
    ms.param("coupling", coupling);
    ms.param("alpha", alpha);
    ms.param("schedule", schedule);
    ms.param("t", t);
    ms.param("scales", scales_spec);
    ms.param("tol", tol);
    ms.param("interaction_scale", interaction_scale);
    ms.m.master_seed = seed_flag;

    OracleReport rep;
    if (schedule.empty()) {
        rep = compare_analytic_vs_exact(V, scales, alpha, t, opts);
    } else {
        // schedule comparison: exact vs per-mode schedule population
        const auto sched = parse_schedule(schedule);
        rep.n_qutrits = n;
        rep.t = t;
        for (double s : scales) {
            const auto Vs = CouplingMatrix::from_raw(s * V.values());
            const auto sd = decompose(Vs);
            const auto psi = evolve(StateVector::vacuum(n), Vs, sched, t, opts);
            const double n1_exact = measure_populations(psi).n_upper;
            const double n1_analytic = population_schedule(sd, sched, t).n1;
            rep.errors.push_back({s, n1_exact, n1_analytic,
                                  std::abs(n1_exact - n1_analytic) /
                                      std::max(std::abs(n1_exact), 1e-300)});
        }
        for (std::size_t k = 0; k + 1 < rep.errors.size(); ++k) {
            const double e0 = rep.errors[k].rel_error, e1 = rep.errors[k + 1].rel_error;
            const double r0 = rep.errors[k].scale, r1 = rep.errors[k + 1].scale;
            if (e0 > 0 && e1 > 0 && r0 != r1)
                rep.orders.push_back(std::log(e0 / e1) / std::log(r0 / r1));
        }
    }

    Table tab;
    tab.header = {"scale", "n1_exact", "n1_analytic", "rel_error"};
    for (const auto& e : rep.errors)
        tab.rows.push_back({e.scale, e.n1_exact, e.n1_analytic, e.rel_error});
    const std::string digest = write_csv(tab, out);

    nlohmann::json j;
    j["n_qutrits"] = rep.n_qutrits;
    j["alpha"] = rep.alpha;
    j["t"] = rep.t;
    j["norm_exact"] = rep.norm_exact;
    j["norm_formula"] = rep.norm_formula;
    j["tanglemeter_max_dev"] = rep.tanglemeter_max_dev;
    j["orders"] = rep.orders;
    auto& errs = j["errors"] = nlohmann::json::array();
    for (const auto& e : rep.errors)
        errs.push_back({{"scale", e.scale},
                        {"n1_exact", e.n1_exact},
                        {"n1_analytic", e.n1_analytic},
                        {"rel_error", e.rel_error}});
    std::ofstream jf(json_out, std::ios::binary);
    if (!jf) throw Error("cannot open for writing: " + json_out);
    jf << j.dump(2) << "\n";

    ms.finish(out, digest);
    return 0;
}

int cmd_validate(const std::string& json_out) {
    const auto checks = run_validate_checks();
    bool all = true;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        all = all && c.pass;
        std::printf("%-24s %s  measured=%.3g tolerance=%.3g\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.measured, c.tolerance);
        arr.push_back({{"check", c.name},
                       {"pass", c.pass},
                       {"measured", c.measured},
                       {"tolerance", c.tolerance}});
    }
    if (!json_out.empty()) {
        std::ofstream f(json_out, std::ios::binary);
        if (!f) throw Error("cannot open for writing: " + json_out);
        f << arr.dump(2) << "\n";
    }
    std::printf("%s\n", all ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT");
    return all ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"coopq: cooperative dynamics of dipole-coupled qutrit assemblies"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.add_option("--threads", threads_flag, "worker threads (speed only, never results)")
        ->default_val(1);
    app.add_option("--seed", seed_flag, "master seed")->envname("COOPQ_SEED")->default_val(1);

    // collective
    double c_t = 3.0;
    std::string c_vr = "0:2:41", c_ar = "-3:1:81", c_out = "collective.csv";
    auto* collective = app.add_subcommand("collective", "population map n1(v, alpha) at fixed t");
    collective->add_option("--t", c_t, "evolution time");
    collective->add_option("--v-range", c_vr, "coupling grid lo:hi:n");
    collective->add_option("--alpha-range", c_ar, "detuning grid lo:hi:n");
    collective->add_option("--out", c_out, "output CSV path");

    // spectrum
    int s_n = 300, s_samples = 100, s_bins = 201;
    std::string s_range = "-25:25", s_grouping = "denominator", s_out = "spectrum.csv";
    bool s_fit = true;
    auto* spectrum =
        app.add_subcommand("spectrum", "eigenvalue density of random dipole media");
    spectrum->add_option("--n", s_n, "dipoles per sample");
    spectrum->add_option("--samples", s_samples, "Monte Carlo samples");
    spectrum->add_option("--bins", s_bins, "histogram bins");
    spectrum->add_option("--range", s_range, "histogram range lo:hi (units of mu^2 n)");
    spectrum->add_flag("--fit,!--no-fit", s_fit, "emit the heuristic fit column");
    spectrum->add_option("--fit-grouping", s_grouping, "denominator|prefactor");
    spectrum->add_option("--out", s_out, "output CSV path");

    // random-media
    int r_n = 300, r_samples = 20;
    std::string r_tr = "0:10:51", r_ar = "-3:3:61", r_out = "random_media.csv";
    bool r_scaled = true;
    auto* rmedia = app.add_subcommand("random-media",
                                      "ensemble-averaged population over (t, alpha)");
    rmedia->add_option("--n", r_n, "dipoles per sample");
    rmedia->add_option("--samples", r_samples, "Monte Carlo samples");
    rmedia->add_option("--t-range", r_tr, "time grid lo:hi:n (scaled units by default)");
    rmedia->add_option("--alpha-range", r_ar, "detuning grid lo:hi:n (scaled units by default)");
    rmedia->add_flag("--scaled-axes,!--raw-axes", r_scaled,
                     "interpret grids as t N^(3/2), alpha/N^(3/2)");
    rmedia->add_option("--out", r_out, "output CSV path");

    // beats
    double b_nv = 0.3, b_alpha = -0.3, b_toff = 0.9, b_t1 = 1.0, b_dt = 1.0;
    std::string b_t1r = "0.1:4:40", b_dtr = "0:4:41", b_taur = "0:30:301";
    std::string b_density, b_out = "beats.csv";
    bool b_avg = false;
    auto* beats = app.add_subcommand(
        "beats", "detuning-switch observables: ratio map, or density-averaged n1(t - t2)");
    beats->add_option("--nv", b_nv, "collective coupling NV");
    beats->add_option("--alpha", b_alpha, "detuning alpha");
    beats->add_option("--t1-range", b_t1r, "switch-off grid lo:hi:n (map mode)");
    beats->add_option("--dt-range", b_dtr, "window-length grid lo:hi:n (map mode)");
    beats->add_option("--t-offset", b_toff, "evaluation time t = t2 + offset (map mode)");
    beats->add_option("--t1", b_t1, "switch-off time (curve mode)");
    beats->add_option("--dt", b_dt, "window length (curve mode)");
    beats->add_option("--tau-range", b_taur, "t - t2 grid lo:hi:n (curve mode)");
    beats->add_option("--density-file", b_density,
                      "histogram CSV from `spectrum`; selects curve mode");
    beats->add_flag("--averaged", b_avg, "average out the rapid alpha oscillations");
    beats->add_option("--out", b_out, "output CSV path");

    // oracle
    int o_n = 4;
    std::string o_coupling = "geometry:1", o_schedule, o_scales = "0.2,0.1,0.05";
    double o_alpha = 1.0, o_t = 1.0, o_tol = 1e-9, o_iscale = 1.0;
    bool o_dense = false;
    std::string o_out = "oracle.csv", o_json = "oracle.json";
    auto* oracle =
        app.add_subcommand("oracle", "exact 3^N evolution vs the analytic formulas");
    oracle->add_option("--n", o_n, "qutrit count (<= 12)");
    oracle->add_option("--coupling", o_coupling, "collective:<v> or geometry:<seed>");
    oracle->add_option("--alpha", o_alpha, "constant detuning");
    oracle->add_option("--schedule", o_schedule, "piecewise schedule dur:alpha,dur:alpha,...");
    oracle->add_option("--t", o_t, "evolution time");
    oracle->add_option("--scales", o_scales, "comma-separated coupling scales");
    oracle->add_option("--tol", o_tol, "unitarity drift budget");
    oracle->add_option("--interaction-scale", o_iscale,
                       "pair-sum convention factor (1 = ordered double sum verbatim)");
    oracle->add_flag("--dense", o_dense, "dense eigendecomposition path (N <= 6)");
    oracle->add_option("--out", o_out, "error table CSV path");
    oracle->add_option("--json", o_json, "report JSON path");

    // validate
    std::string v_json;
    auto* validate = app.add_subcommand("validate", "run the cross-module invariant checks");
    validate->add_option("--json", v_json, "also write a JSON report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (collective->parsed()) return cmd_collective(c_t, c_vr, c_ar, c_out);
        if (spectrum->parsed())
            return cmd_spectrum(s_n, s_samples, s_bins, s_range, s_fit, s_grouping, s_out);
        if (rmedia->parsed())
            return cmd_random_media(r_n, r_samples, r_tr, r_ar, r_scaled, r_out);
        if (beats->parsed()) {
            if (b_density.empty())
                return cmd_beats_map(b_nv, b_alpha, b_t1r, b_dtr, b_toff, b_out);
            return cmd_beats_curve(b_alpha, b_t1, b_dt, b_taur, b_density, b_avg, b_out);
        }
        if (oracle->parsed())
            return cmd_oracle(o_n, o_coupling, o_alpha, o_schedule, o_t, o_scales, o_tol,
                              o_iscale, o_dense, o_out, o_json);
        if (validate->parsed()) return cmd_validate(v_json);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
    return 2;
}

}  // namespace coopq
