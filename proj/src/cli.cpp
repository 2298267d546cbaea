#include "geoflow/cli.hpp"

#include "geoflow/bridge.hpp"
#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"
#include "geoflow/field_io.hpp"
#include "geoflow/geodesic.hpp"
#include "geoflow/hydro.hpp"
#include "geoflow/integrability.hpp"
#include "geoflow/momenta.hpp"
#include "geoflow/riemann.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace geoflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open: " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw config_error(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path);
    if (!os) throw config_error("cannot write: " + path.string());
    os << text;
}

void write_json(const fs::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "lax_friedrichs") return Scheme::LaxFriedrichs;
    if (s == "lax_wendroff") return Scheme::LaxWendroff;
    if (s == "upwind_diagonal") return Scheme::UpwindDiagonal;
    throw config_error("unknown scheme: " + s);
}

struct EvolveSetup {
    int degree = 0;
    HydroSnapshot initial;
    EvolutionConfig cfg;
    std::set<int> zero_mask;
    json thresholds; // optional, echoed back with measured values
    long long seed = 0;
};

EvolveSetup parse_evolve_config(const json& j, const std::string& base_dir, bool pipeline) {
    std::set<std::string> allowed{"schema_version", "degree",     "grid",       "initial",
                                  "scheme",         "cfl",        "y_end",      "output_every",
                                  "dissipation",    "seed",       "thresholds"};
    if (pipeline) {
        allowed.insert("zero_mask");
        allowed.insert("reconstruct_index");
        allowed.insert("geodesic");
        allowed.insert("liouville_q");
    }
    check_keys(j, allowed, "config");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw config_error("config: schema_version must be 1");

    EvolveSetup s;
    s.degree = j.at("degree").get<int>();
    if (s.degree < 2) throw config_error("config: degree must be >= 2");

    const json& jg = j.at("grid");
    check_keys(jg, {"nx", "dx", "x0", "periodic"}, "config.grid");
    const int nx = jg.at("nx").get<int>();
    const double dx = jg.at("dx").get<double>();
    const double x0 = jg.value("x0", 0.0);
    const bool periodic = jg.value("periodic", true);

    const json& ji = j.at("initial");
    check_keys(ji, {"a", "b"}, "config.initial");
    ScalarField1D a = field_from_spec(ji.at("a"), nx, dx, x0, periodic, base_dir);
    std::vector<ScalarField1D> b;
    for (const auto& spec : ji.at("b"))
        b.push_back(field_from_spec(spec, nx, dx, x0, periodic, base_dir));
    if (static_cast<int>(b.size()) != s.degree - 1)
        throw config_error("config.initial: need degree-1 root fields");
    try {
        s.initial = HydroSnapshot(s.degree, std::move(a), std::move(b));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config.initial: ") + e.what());
    }

    s.cfg.scheme = parse_scheme(j.value("scheme", std::string("lax_friedrichs")));
    s.cfg.cfl = j.value("cfl", 0.4);
    s.cfg.y_end = j.at("y_end").get<double>();
    s.cfg.output_every = j.value("output_every", 1);
    s.cfg.dissipation = j.value("dissipation", 0.0);
    try {
        s.cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    if (j.contains("zero_mask"))
        for (const auto& v : j.at("zero_mask")) s.zero_mask.insert(v.get<int>());
    if (j.contains("thresholds")) s.thresholds = j.at("thresholds");
    s.seed = j.value("seed", 0LL);
    return s;
}

ordered_json conservation_json(const ConservationReport& rep) {
    ordered_json r;
    r["y"] = rep.y;
    r["mass"] = rep.mass;
    r["second_density_integral"] = rep.second;
    r["mass_drift_rel"] = rep.mass_drift_rel;
    r["second_drift_rel"] = rep.second_drift_rel;
    r["flux_form_residual"] = rep.flux_form_residual;
    r["moment_chain"] = rep.moment_chain;
    return r;
}

const char* halt_name(HaltReason h) {
    switch (h) {
        case HaltReason::Completed: return "completed";
        case HaltReason::Shock: return "shock";
        case HaltReason::NonFinite: return "non_finite";
        case HaltReason::PositivityLoss: return "positivity_loss";
    }
    return "unknown";
}

} // namespace

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw config_error(where + ": unknown key '" + it.key() + "'");
}

int run_guarded(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const config_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const numerical_error& e) {
        std::cerr << "numerical halt: " << e.what() << "\n";
        return kExitNumerical;
    }
}

ScalarField1D field_from_spec(const json& spec, int nx, double dx, double x0, bool periodic,
                              const std::string& base_dir) {
    if (spec.is_number()) {
        return ScalarField1D(nx, dx, x0, periodic, spec.get<double>());
    }
    check_keys(spec, {"const", "values", "file", "sine"}, "field spec");
    if (spec.size() != 1) throw config_error("field spec: exactly one form expected");
    if (spec.contains("const"))
        return ScalarField1D(nx, dx, x0, periodic, spec.at("const").get<double>());
    if (spec.contains("values")) {
        std::vector<double> v = spec.at("values").get<std::vector<double>>();
        if (static_cast<int>(v.size()) != nx)
            throw config_error("field spec: values length does not match grid nx");
        return ScalarField1D(nx, dx, x0, periodic, std::move(v));
    }
    if (spec.contains("file")) {
        const fs::path p = fs::path(base_dir) / spec.at("file").get<std::string>();
        std::ifstream is(p);
        if (!is) throw config_error("field spec: cannot open " + p.string());
        std::vector<double> v;
        double x;
        while (is >> x) v.push_back(x);
        if (static_cast<int>(v.size()) != nx)
            throw config_error("field spec: file length does not match grid nx");
        return ScalarField1D(nx, dx, x0, periodic, std::move(v));
    }
    const json& js = spec.at("sine");
    check_keys(js, {"mean", "amp", "mode", "phase"}, "field spec sine");
    const double mean = js.value("mean", 0.0);
    const double amp = js.value("amp", 0.0);
    const double mode = js.value("mode", 1.0);
    const double phase = js.value("phase", 0.0);
    const double L = nx * dx;
    return ScalarField1D::sampled(nx, dx, x0, periodic, [&](double x) {
        return mean + amp * std::sin(2.0 * M_PI * mode * (x - x0) / L + phase);
    });
}

int cmd_derive(int degree, const std::set<int>& zero_mask, const GlobalOptions& g) {
    CoefficientSystem sys = build_system(degree, zero_mask);
    canonicalize(sys);
    if (!g.quiet) std::cout << render_text(sys);
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = system_to_json(sys);
    write_json(fs::path(g.output_dir) / "system.json", j);
    return kExitOk;
}

int cmd_verify(const std::string& fields_dir, int degree, const std::set<int>& zero_mask,
               const GlobalOptions& g) {
    const fs::path dir(fields_dir);
    auto load = [&](const std::string& name) {
        const fs::path p = dir / name;
        if (!fs::exists(p)) throw config_error("verify: missing field file " + p.string());
        return read_field_csv(p.string());
    };
    ScalarField2D g12 = load("g12.csv");
    std::map<int, Coefficient> a;
    for (int k = 1; k <= degree - 1; ++k) {
        if (zero_mask.count(k)) continue;
        ScalarField2D f = load("a" + std::to_string(k) + ".csv");
        require_same_grid(f.grid, g12.grid, "verify");
        a.emplace(k, Coefficient(std::move(f)));
    }

    CoefficientSystem sys = build_system(degree, zero_mask);
    std::vector<ScalarField2D> res = system_residual(sys, a, Coefficient(g12));
    const double gap = bracket_system_gap(degree, zero_mask, a, Coefficient(g12));

    ordered_json j;
    j["schema_version"] = 1;
    j["degree"] = degree;
    j["zero_mask"] = zero_mask;
    ordered_json norms = ordered_json::array();
    double overall = 0.0;
    for (std::size_t e = 0; e < res.size(); ++e) {
        const double m = max_abs(res[e]);
        overall = std::max(overall, m);
        norms.push_back({{"k", sys.equations[e].k}, {"max_residual", m}});
    }
    j["equation_residuals"] = norms;
    j["max_residual"] = overall;
    j["bracket_equivalence_gap"] = gap;
    write_json(fs::path(g.output_dir) / "verify_report.json", j);
    if (!g.quiet)
        std::cout << "max residual " << overall << ", bracket gap " << gap << "\n";
    return kExitOk;
}

int cmd_evolve(const std::string& config_path, const GlobalOptions& g) {
    const json j = load_json(config_path);
    EvolveSetup setup =
        parse_evolve_config(j, fs::path(config_path).parent_path().string(), false);

    EvolveResult result = evolve(setup.initial, setup.cfg);

    const fs::path out(g.output_dir);
    fs::create_directories(out);
    std::vector<std::string> files;
    for (std::size_t t = 0; t < result.states.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%04zu.csv", t);
        std::ofstream os(out / name);
        write_snapshot_csv(os, result.states[t].a, result.states[t].b);
        files.emplace_back(name);
    }
    ordered_json series;
    series["schema_version"] = 1;
    series["degree"] = setup.degree;
    series["periodic"] = setup.initial.a.periodic;
    series["y"] = result.y;
    series["snapshots"] = files;
    series["halt"] = halt_name(result.halt);
    series["message"] = result.message;
    series["steps"] = result.steps;
    series["seed"] = setup.seed;
    write_json(out / "series.json", series);

    ordered_json report;
    report["schema_version"] = 1;
    report["halt"] = halt_name(result.halt);
    report["conservation"] = conservation_json(result.report);
    if (!setup.thresholds.is_null()) {
        check_keys(setup.thresholds, {"mass_drift", "second_drift"}, "config.thresholds");
        ordered_json th;
        bool ok = true;
        if (setup.thresholds.contains("mass_drift")) {
            const double lim = setup.thresholds.at("mass_drift").get<double>();
            th["mass_drift"] = {{"limit", lim}, {"measured", result.report.mass_drift_rel}};
            ok = ok && result.report.mass_drift_rel <= lim;
        }
        if (setup.thresholds.contains("second_drift")) {
            const double lim = setup.thresholds.at("second_drift").get<double>();
            th["second_drift"] = {{"limit", lim}, {"measured", result.report.second_drift_rel}};
            ok = ok && result.report.second_drift_rel <= lim;
        }
        th["ok"] = ok;
        report["thresholds"] = th;
    }
    write_json(out / "report.json", report);
    if (!g.quiet)
        std::cout << "evolve: " << halt_name(result.halt) << " after " << result.steps
                  << " steps, " << result.states.size() << " snapshots\n";
    return result.halt == HaltReason::Completed ? kExitOk : kExitNumerical;
}

int cmd_invariants(const std::string& snapshot_csv, int degree, bool periodic,
                   const GlobalOptions& g) {
    std::ifstream is(snapshot_csv);
    if (!is) throw config_error("invariants: cannot open " + snapshot_csv);
    ScalarField1D a;
    std::vector<ScalarField1D> b;
    read_snapshot_csv(is, a, b, periodic);
    if (static_cast<int>(b.size()) != degree - 1)
        throw config_error("invariants: snapshot has wrong number of root columns");
    HydroSnapshot s(degree, std::move(a), std::move(b));
    RiemannData data = invariants_and_velocities(s);

    const fs::path out = fs::path(g.output_dir) / "invariants.csv";
    fs::create_directories(fs::path(g.output_dir));
    std::ofstream os(out);
    os << "x,a";
    for (int k = 1; k < degree; ++k) os << ",b_" << k;
    for (int k = 1; k <= degree; ++k) os << ",q_" << k;
    for (int k = 1; k <= degree; ++k) os << ",r_" << k;
    for (int k = 1; k <= degree; ++k) os << ",mu_" << k;
    os << "\n";
    for (int i = 0; i < s.n(); ++i) {
        os << format_double(s.a.x(i)) << ',' << format_double(s.a.values[i]);
        for (int k = 0; k < degree - 1; ++k) os << ',' << format_double(s.b[k].values[i]);
        for (int k = 0; k < degree; ++k) os << ',' << format_double(data.q[k].values[i]);
        for (int k = 0; k < degree; ++k) os << ',' << format_double(data.r[k].values[i]);
        for (int k = 0; k < degree; ++k) os << ',' << format_double(data.mu[k].values[i]);
        os << "\n";
    }
    if (!g.quiet)
        std::cout << "invariants: wrote " << out.string()
                  << (data.continuity_ok ? "" : " (labeling continuity check failed)") << "\n";
    return kExitOk;
}

namespace {

struct LoadedSeries {
    int degree = 0;
    std::vector<double> y;
    std::vector<HydroSnapshot> states;
};

LoadedSeries load_series(const std::string& series_dir) {
    const fs::path dir(series_dir);
    const fs::path meta = dir / "series.json";
    if (!fs::exists(meta)) throw config_error("missing " + meta.string());
    json j = load_json(meta.string());
    LoadedSeries s;
    s.degree = j.at("degree").get<int>();
    s.y = j.at("y").get<std::vector<double>>();
    const bool periodic = j.value("periodic", true);
    for (const auto& name : j.at("snapshots")) {
        std::ifstream is(dir / name.get<std::string>());
        if (!is) throw config_error("missing snapshot " + name.get<std::string>());
        ScalarField1D a;
        std::vector<ScalarField1D> b;
        read_snapshot_csv(is, a, b, periodic);
        s.states.emplace_back(s.degree, std::move(a), std::move(b));
    }
    if (s.states.size() != s.y.size())
        throw config_error("series.json: snapshot count does not match y list");
    return s;
}

// Target rectangle inside the chart image. The image is a sheared band (x1
// drifts along x at rate g12), so the x2 extent is a window around the domain
// center chosen such that the x1 intersection keeps at least half of one
// column's span.
Grid2D auto_target_grid(const ChartSeries& cs, const std::vector<ScalarField1D>& x1rows) {
    const int n = cs.nx;
    double min_span = std::numeric_limits<double>::max();
    for (int i = 0; i < n; ++i)
        min_span = std::min(min_span, x1rows.back().values[i] - x1rows.front().values[i]);
    if (!(min_span > 0.0)) throw numerical_error("chart image is empty");

    const int ic = n / 2;
    int i0 = ic, i1 = ic;
    auto window_ok = [&](int a, int b, double& lo, double& hi) {
        lo = -std::numeric_limits<double>::max();
        hi = std::numeric_limits<double>::max();
        for (int i = a; i <= b; ++i) {
            lo = std::max(lo, x1rows.front().values[i]);
            hi = std::min(hi, x1rows.back().values[i]);
        }
        return hi - lo >= 0.5 * min_span;
    };
    double lo = 0.0, hi = 0.0;
    while (true) {
        bool grew = false;
        double l2, h2;
        if (i0 > 2 && window_ok(i0 - 1, i1, l2, h2)) {
            --i0;
            grew = true;
        }
        if (i1 < n - 3 && window_ok(i0, i1 + 1, l2, h2)) {
            ++i1;
            grew = true;
        }
        if (!grew) break;
    }
    if (i1 - i0 < 3) throw numerical_error("chart image too sheared for a target grid");
    window_ok(i0, i1, lo, hi);

    const double span = hi - lo;
    const double m = 0.05 * span;
    const int nx1 = std::max(16, std::min(static_cast<int>(cs.y.size()), 128));
    const int nx2 = std::max(4, i1 - i0);
    const double x2lo = cs.x0 + (i0 + 0.25) * cs.dx;
    const double x2hi = cs.x0 + (i1 - 0.25) * cs.dx;
    return Grid2D(nx1, nx2, (span - 2 * m) / (nx1 - 1), (x2hi - x2lo) / (nx2 - 1), lo + m,
                  x2lo, false, false);
}

} // namespace

int cmd_reconstruct(const std::string& series_dir, int index, const GlobalOptions& g) {
    LoadedSeries s = load_series(series_dir);
    if (index < 1 || index > s.degree - 1)
        throw config_error("reconstruct: index must be in 1..N-1");

    Reconstruction rec = reconstruct_series(s.states, s.y, index);
    double defect = 0.0;
    std::vector<ScalarField1D> x1rows = x1_potential(rec.chart, &defect);

    const fs::path out(g.output_dir);
    fs::create_directories(out);

    { // semi-geodesic chart as tidy CSV
        std::ofstream os(out / "semigeodesic_metric.csv");
        os << "x,y,g12,a_n1,G\n";
        for (std::size_t t = 0; t < rec.chart.y.size(); ++t)
            for (int i = 0; i < rec.chart.nx; ++i) {
                const double gv = rec.chart.g12[t].values[i];
                const double av = rec.chart.aN1[t].values[i];
                os << format_double(rec.chart.x0 + i * rec.chart.dx) << ','
                   << format_double(rec.chart.y[t]) << ',' << format_double(gv) << ','
                   << format_double(av) << ',' << format_double(av * av / (1.0 - gv * gv))
                   << "\n";
            }
    }

    Grid2D target = auto_target_grid(rec.chart, x1rows);
    InvertedChart inv =
        invert_chart(rec.chart, x1rows, {&rec.chart.g12, &rec.chart.aN1}, target);
    write_field_csv((out / "chebyshev_g12.csv").string(), inv.fields[0]);
    write_field_csv((out / "chebyshev_a_n1.csv").string(), inv.fields[1]);
    Metric2D metric = metric_chebyshev(inv.fields[0]);
    write_field_csv((out / "chebyshev_g11_cov.csv").string(), metric.g11);
    write_field_csv((out / "chebyshev_g12_cov.csv").string(), metric.g12cov);

    double gmax = 0.0;
    for (const auto& row : rec.chart.g12) gmax = std::max(gmax, max_abs(row));

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["index"] = index;
    rep["closedness_max"] = rec.closedness_max;
    rep["path_defect"] = defect;
    rep["max_abs_g12"] = gmax;
    rep["min_a_n1"] = rec.min_aN1;
    rep["jacobian_sign_positive"] = rec.min_aN1 > 0.0;
    write_json(out / "reconstruct_report.json", rep);
    if (!g.quiet)
        std::cout << "reconstruct: closedness max " << rec.closedness_max << ", path defect "
                  << defect << "\n";
    return kExitOk;
}

int cmd_geodesic(const std::string& g12_csv, const std::string& poly_json,
                 const std::string& initial_csv, double t_end, double dt,
                 const GlobalOptions& g) {
    ScalarField2D g12 = read_field_csv(g12_csv);
    CubicSpline2D spline(g12);

    json jp = load_json(poly_json);
    check_keys(jp, {"degree", "coeffs"}, "polynomial");
    const int degree = jp.at("degree").get<int>();
    std::vector<Coefficient> coeffs;
    const fs::path base = fs::path(poly_json).parent_path();
    for (const auto& c : jp.at("coeffs")) {
        if (c.is_number()) {
            coeffs.emplace_back(c.get<double>());
        } else {
            check_keys(c, {"field"}, "polynomial coefficient");
            coeffs.emplace_back(read_field_csv((base / c.at("field").get<std::string>()).string()));
        }
    }
    MomentaPolynomial f(degree, std::move(coeffs));
    InterpolatedPolynomial fi(f);

    std::ifstream is(initial_csv);
    if (!is) throw config_error("geodesic: cannot open " + initial_csv);
    std::vector<PhaseState> states;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
        PhaseState s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &s.x1, &s.x2, &s.p1, &s.p2) != 4)
            throw config_error("geodesic: bad initial-state row: " + line);
        states.push_back(s);
    }
    if (states.empty()) throw config_error("geodesic: no initial states");

    const fs::path out(g.output_dir);
    fs::create_directories(out);
    ordered_json summary;
    summary["schema_version"] = 1;
    ordered_json trajs = ordered_json::array();
    for (std::size_t m = 0; m < states.size(); ++m) {
        GeodesicRecord rec = integrate_geodesic(spline, &fi, states[m], t_end, dt);
        char name[48];
        std::snprintf(name, sizeof(name), "trajectory_%02zu.csv", m);
        std::ofstream os(out / name);
        os << "t,x1,x2,p1,p2,H,f\n";
        for (std::size_t i = 0; i < rec.t.size(); ++i)
            os << format_double(rec.t[i]) << ',' << format_double(rec.x1[i]) << ','
               << format_double(rec.x2[i]) << ',' << format_double(rec.p1[i]) << ','
               << format_double(rec.p2[i]) << ',' << format_double(rec.H[i]) << ','
               << format_double(rec.f[i]) << "\n";
        trajs.push_back({{"file", name},
                         {"H_drift", rec.H_drift},
                         {"f_drift", rec.f_drift},
                         {"exited", rec.exited}});
    }
    summary["trajectories"] = trajs;
    write_json(out / "geodesic_summary.json", summary);
    return kExitOk;
}

int cmd_pipeline(const std::string& config_path, const GlobalOptions& g) {
    const json j = load_json(config_path);
    EvolveSetup setup =
        parse_evolve_config(j, fs::path(config_path).parent_path().string(), true);
    const int N = setup.degree;
    const int index = j.value("reconstruct_index", 1);
    if (index < 1 || index > N - 1) throw config_error("pipeline: reconstruct_index in 1..N-1");
    const double liouville_q = j.value("liouville_q", 0.75);

    double geo_t_end = 5.0, geo_dt = 1e-3;
    std::vector<PhaseState> geo_initial, geo_initial_rel;
    if (j.contains("geodesic")) {
        const json& jg = j.at("geodesic");
        check_keys(jg, {"t_end", "dt", "initial", "initial_rel"}, "config.geodesic");
        geo_t_end = jg.value("t_end", 5.0);
        geo_dt = jg.value("dt", 1e-3);
        auto read_states = [&](const json& arr, std::vector<PhaseState>& out) {
            for (const auto& row : arr) {
                if (row.size() != 4)
                    throw config_error("config.geodesic: state rows are [x1,x2,p1,p2]");
                out.push_back({row[0].get<double>(), row[1].get<double>(),
                               row[2].get<double>(), row[3].get<double>()});
            }
        };
        if (jg.contains("initial")) read_states(jg.at("initial"), geo_initial);
        // positions as fractions of the reconstructed target grid
        if (jg.contains("initial_rel")) read_states(jg.at("initial_rel"), geo_initial_rel);
    }

    ordered_json rep;
    rep["schema_version"] = 1;
    rep["seed"] = setup.seed;
    const fs::path out(g.output_dir);
    fs::create_directories(out);
    auto partial_exit = [&](const std::string& stage, const std::string& why) {
        rep["failed_stage"] = stage;
        rep["error"] = why;
        write_json(out / "pipeline_report.json", rep);
        return kExitNumerical;
    };

    // evolve
    EvolveResult result = evolve(setup.initial, setup.cfg);
    rep["evolve"] = {{"halt", halt_name(result.halt)},
                     {"steps", result.steps},
                     {"conservation", conservation_json(result.report)}};
    if (result.halt != HaltReason::Completed)
        return partial_exit("evolve", result.message);

    // invariants on the final state + labeling continuity
    try {
        RiemannData data = invariants_and_velocities(result.states.back());
        rep["invariants"] = {{"continuity_ok", data.continuity_ok}};
    } catch (const numerical_error& e) {
        return partial_exit("invariants", e.what());
    }

    // transformed Liouville residual at fixed q
    {
        double m = 0.0;
        for (const auto& f : liouville_residual(result.states, result.y, liouville_q))
            m = std::max(m, max_abs(f));
        rep["liouville_residual_max"] = m;
        rep["liouville_q"] = liouville_q;
    }

    // reconstruction
    Reconstruction rec = reconstruct_series(result.states, result.y, index);
    double path_defect = 0.0;
    std::vector<ScalarField1D> x1rows = x1_potential(rec.chart, &path_defect);
    double gmax = 0.0;
    for (const auto& row : rec.chart.g12) gmax = std::max(gmax, max_abs(row));
    rep["reconstruct"] = {{"index", index},
                          {"closedness_max", rec.closedness_max},
                          {"path_defect", path_defect},
                          {"max_abs_g12", gmax},
                          {"min_a_n1", rec.min_aN1}};
    if (!(gmax < 1.0)) return partial_exit("reconstruct", "|g12| reached 1");

    // generating-equation residual with the reconstruction density
    {
        double m = 0.0;
        for (const auto& f :
             hj_residual_semigeodesic(rec.chart.g12, rec.chart.aN1, rec.chart.g12, rec.chart.y))
            m = std::max(m, max_abs(f));
        rep["hj_semigeodesic_residual_max"] = m;
    }

    // invert the chart and rebuild the integral's coefficient fields
    const int T = static_cast<int>(result.states.size());
    std::vector<ScalarField1D> rows_a, rows_b[8];
    if (N - 1 > 8) throw config_error("pipeline: degree too large");
    for (int t = T - 1; t >= 0; --t) {
        rows_a.push_back(result.states[t].a);
        for (int m = 0; m < N - 1; ++m) rows_b[m].push_back(result.states[t].b[m]);
    }
    Grid2D target = auto_target_grid(rec.chart, x1rows);
    std::vector<const std::vector<ScalarField1D>*> wanted{&rec.chart.g12, &rec.chart.aN1,
                                                          &rows_a};
    for (int m = 0; m < N - 1; ++m) wanted.push_back(&rows_b[m]);
    InvertedChart inv;
    try {
        inv = invert_chart(rec.chart, x1rows, wanted, target);
    } catch (const numerical_error& e) {
        return partial_exit("invert_chart", e.what());
    }
    const ScalarField2D& g12f = inv.fields[0];
    const ScalarField2D& aN1f = inv.fields[1];
    const ScalarField2D& af = inv.fields[2];

    // coefficients a_1..a_{N-1} on the (x1,x2) chart from the root data
    std::vector<ScalarField2D> acoef(N - 1, ScalarField2D(target));
    double normal_form_defect = 0.0;
    for (int i = 0; i < target.nx; ++i)
        for (int jj = 0; jj < target.ny; ++jj) {
            std::vector<double> btilde(N - 1);
            for (int m = 0; m < N - 1; ++m)
                btilde[m] = std::sqrt(af.at(i, jj)) * inv.fields[3 + m].at(i, jj);
            // atilde_j = (-1)^j e_j(btilde)
            std::vector<double> e(N, 0.0);
            e[0] = 1.0;
            for (int m = 0; m < N - 1; ++m)
                for (int q = std::min(m + 1, N - 1); q >= 1; --q) e[q] += btilde[m] * e[q - 1];
            std::vector<double> atilde(N - 1);
            for (int q = 1; q <= N - 1; ++q) atilde[q - 1] = ((q % 2) ? -1.0 : 1.0) * e[q];
            std::vector<double> A =
                chebyshev_coefficients(atilde, g12f.at(i, jj), aN1f.at(i, jj));
            normal_form_defect =
                std::max(normal_form_defect, std::max(std::abs(A[0]), std::abs(A[N])));
            for (int m = 1; m <= N - 1; ++m) acoef[m - 1].at(i, jj) = A[m];
        }
    rep["normal_form_defect"] = normal_form_defect;

    // residuals of the coefficient system on the rebuilt chart
    {
        std::map<int, Coefficient> am;
        double masked_max = 0.0;
        for (int k = 1; k <= N - 1; ++k) {
            if (setup.zero_mask.count(k))
                masked_max = std::max(masked_max, max_abs(acoef[k - 1]));
            else
                am.emplace(k, Coefficient(acoef[k - 1]));
        }
        CoefficientSystem sys = build_system(N, setup.zero_mask);
        double m = 0.0;
        for (const auto& f : system_residual(sys, am, Coefficient(g12f)))
            m = std::max(m, max_abs(f));
        rep["coefficient_system"] = {
            {"max_residual", m},
            {"bracket_equivalence_gap", bracket_system_gap(N, setup.zero_mask, am, Coefficient(g12f))},
            {"masked_coefficient_max", masked_max}};
    }

    // geodesic verification on the rebuilt metric
    for (const auto& s : geo_initial_rel) {
        PhaseState abs = s;
        abs.x1 = target.x0 + s.x1 * (target.nx - 1) * target.dx;
        abs.x2 = target.y0 + s.x2 * (target.ny - 1) * target.dy;
        geo_initial.push_back(abs);
    }
    if (!geo_initial.empty()) {
        if (!(max_abs(g12f) < 1.0)) return partial_exit("geodesic", "|g12| >= 1 on target grid");
        CubicSpline2D spline(g12f);
        std::vector<Coefficient> cfs;
        for (int m = 0; m < N - 1; ++m) cfs.emplace_back(acoef[m]);
        MomentaPolynomial f = MomentaPolynomial::normal_form(N, std::move(cfs));
        InterpolatedPolynomial fi(f);
        ordered_json trajs = ordered_json::array();
        for (const auto& s0 : geo_initial) {
            try {
                GeodesicRecord grec = integrate_geodesic(spline, &fi, s0, geo_t_end, geo_dt);
                trajs.push_back({{"H_drift", grec.H_drift},
                                 {"f_drift", grec.f_drift},
                                 {"exited", grec.exited}});
            } catch (const std::invalid_argument& e) {
                return partial_exit("geodesic", e.what());
            }
        }
        rep["geodesic"] = trajs;
    }

    write_json(out / "pipeline_report.json", rep);
    if (!g.quiet) std::cout << "pipeline: report written\n";
    return kExitOk;
}

} // namespace geoflow::cli
