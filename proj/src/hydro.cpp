#include "geoflow/hydro.hpp"

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"

#include <algorithm>
#include <cmath>

namespace geoflow {

void EvolutionConfig::validate() const {
    if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("EvolutionConfig: cfl must be in (0,1)");
    if (!(y_end > 0.0)) throw std::invalid_argument("EvolutionConfig: y_end must be positive");
    if (output_every < 1) throw std::invalid_argument("EvolutionConfig: output_every must be >= 1");
    if (dissipation < 0.0) throw std::invalid_argument("EvolutionConfig: dissipation must be >= 0");
}

RhsFields evolution_rhs(const HydroSnapshot& s) {
    const int n = s.n();
    const int N = s.degree;
    ScalarField1D S(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
    ScalarField1D w(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& bf : s.b) sum += bf.values[i];
        S.values[i] = sum;
        w.values[i] = 1.0 / std::sqrt(s.a.values[i]);
    }
    ScalarField1D Sx = partial1d(S);
    ScalarField1D ax = partial1d(s.a);
    ScalarField1D wx = partial1d(w);

    RhsFields out;
    out.da = ScalarField1D(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
    for (int i = 0; i < n; ++i)
        out.da.values[i] = 2.0 * std::sqrt(s.a.values[i]) * Sx.values[i] +
                           w.values[i] * ax.values[i] * S.values[i];
    out.db.reserve(N - 1);
    for (int k = 0; k < N - 1; ++k) {
        ScalarField1D bx = partial1d(s.b[k]);
        ScalarField1D db(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
        for (int i = 0; i < n; ++i) {
            const double bk = s.b[k].values[i];
            db.values[i] = w.values[i] * bk * bx.values[i] -
                           (1.0 + bk * bk) * wx.values[i];
        }
        out.db.push_back(std::move(db));
    }
    return out;
}

double max_speed_bound(const HydroSnapshot& s) {
    const int N = s.degree;
    double m = 0.0;
    std::vector<double> bv(N - 1);
    for (int i = 0; i < s.n(); ++i) {
        for (int k = 0; k < N - 1; ++k) bv[k] = s.b[k].values[i];
        m = std::max(m, branch_point_bound(bv, N) / std::sqrt(s.a.values[i]));
    }
    return m;
}

namespace {

// Raw-array state: field 0 is a, fields 1..N-1 are the roots.
struct Stepper {
    int n = 0;
    int nf = 0; // N fields total
    double dx = 0.0;

    int wrap(int i) const { return (i % n + n) % n; }

    // dy-rate from pointwise values u[f] and derivatives ux[f]
    void rate(const double* u, const double* ux, double* out) const {
        const double a = u[0];
        const double sqa = std::sqrt(a);
        double S = 0.0, Sx = 0.0;
        for (int f = 1; f < nf; ++f) {
            S += u[f];
            Sx += ux[f];
        }
        out[0] = 2.0 * sqa * Sx + ux[0] * S / sqa;
        const double wx = -0.5 * ux[0] / (a * sqa); // (a^{-1/2})_x by chain rule
        for (int f = 1; f < nf; ++f)
            out[f] = u[f] * ux[f] / sqa - (1.0 + u[f] * u[f]) * wx;
    }
};

} // namespace

EvolveResult evolve(const HydroSnapshot& initial, const EvolutionConfig& cfg, int chain_orders) {
    cfg.validate();
    if (!initial.a.periodic)
        throw std::invalid_argument("evolve: periodic initial data required");
    if (cfg.scheme == Scheme::UpwindDiagonal)
        throw std::invalid_argument("evolve: the upwind scheme applies to the diagonal form");

    const int N = initial.degree;
    const int n = initial.n();
    const double dx = initial.a.dx;
    Stepper st{n, N, dx};

    std::vector<std::vector<double>> u(N), unew(N), ustar(N);
    u[0] = initial.a.values;
    for (int k = 1; k < N; ++k) u[k] = initial.b[k - 1].values;
    for (int f = 0; f < N; ++f) {
        unew[f].assign(n, 0.0);
        ustar[f].assign(n, 0.0);
    }

    auto grad_max = [&](const std::vector<std::vector<double>>& state) {
        double g = 0.0;
        for (int f = 1; f < N; ++f)
            for (int i = 0; i < n; ++i) {
                const double d =
                    (state[f][st.wrap(i + 1)] - state[f][st.wrap(i - 1)]) / (2.0 * dx);
                g = std::max(g, std::abs(d));
            }
        return g;
    };
    const double grad0 = std::max(grad_max(u), 1e-12);

    auto to_snapshot = [&](const std::vector<std::vector<double>>& state) {
        ScalarField1D a(n, dx, initial.a.x0, true, state[0]);
        std::vector<ScalarField1D> b;
        for (int k = 1; k < N; ++k)
            b.emplace_back(n, dx, initial.a.x0, true, state[k]);
        return HydroSnapshot(N, std::move(a), std::move(b));
    };

    EvolveResult result;
    result.y.push_back(0.0);
    result.states.push_back(initial);

    auto speed_of = [&](const std::vector<std::vector<double>>& state) {
        std::vector<double> bv(N - 1);
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int k = 1; k < N; ++k) bv[k - 1] = state[k][i];
            m = std::max(m, branch_point_bound(bv, N) / std::sqrt(state[0][i]));
        }
        return m;
    };

    double y = 0.0;
    int step = 0;
    std::vector<double> uval(N), uxval(N), rate(N), umid(N), uxmid(N);

    while (y < cfg.y_end) {
        const double speed = speed_of(u);
        double dy = cfg.cfl * dx / std::max(speed, 1e-12);
        dy = std::min(dy, cfg.y_end - y);

        if (cfg.scheme == Scheme::LaxFriedrichs) {
            for (int i = 0; i < n; ++i) {
                const int im = st.wrap(i - 1), ip = st.wrap(i + 1);
                for (int f = 0; f < N; ++f) {
                    uval[f] = u[f][i];
                    uxval[f] = (u[f][ip] - u[f][im]) / (2.0 * dx);
                }
                st.rate(uval.data(), uxval.data(), rate.data());
                for (int f = 0; f < N; ++f)
                    unew[f][i] = 0.5 * (u[f][im] + u[f][ip]) + dy * rate[f];
            }
        } else { // two-step Lax-Wendroff
            for (int i = 0; i < n; ++i) { // predictor at i+1/2
                const int ip = st.wrap(i + 1);
                for (int f = 0; f < N; ++f) {
                    umid[f] = 0.5 * (u[f][i] + u[f][ip]);
                    uxmid[f] = (u[f][ip] - u[f][i]) / dx;
                }
                st.rate(umid.data(), uxmid.data(), rate.data());
                for (int f = 0; f < N; ++f) ustar[f][i] = umid[f] + 0.5 * dy * rate[f];
            }
            for (int i = 0; i < n; ++i) { // corrector
                const int im = st.wrap(i - 1);
                for (int f = 0; f < N; ++f) {
                    umid[f] = 0.5 * (ustar[f][im] + ustar[f][i]);
                    uxmid[f] = (ustar[f][i] - ustar[f][im]) / dx;
                }
                st.rate(umid.data(), uxmid.data(), rate.data());
                for (int f = 0; f < N; ++f) unew[f][i] = u[f][i] + dy * rate[f];
            }
            if (cfg.dissipation > 0.0) {
                for (int f = 0; f < N; ++f)
                    for (int i = 0; i < n; ++i)
                        unew[f][i] += cfg.dissipation * (u[f][st.wrap(i + 1)] - 2.0 * u[f][i] +
                                                         u[f][st.wrap(i - 1)]);
            }
        }

        bool finite = true;
        double amin = std::numeric_limits<double>::max();
        for (int f = 0; f < N && finite; ++f)
            for (int i = 0; i < n; ++i)
                if (!std::isfinite(unew[f][i])) {
                    finite = false;
                    break;
                }
        if (finite)
            for (int i = 0; i < n; ++i) amin = std::min(amin, unew[0][i]);

        if (!finite) {
            result.halt = HaltReason::NonFinite;
            result.message = "non-finite state; kept last good snapshot";
            break;
        }
        if (!(amin > 0.0)) {
            result.halt = HaltReason::PositivityLoss;
            result.message = "a lost positivity; kept last good snapshot";
            break;
        }
        u.swap(unew);
        y += dy;
        ++step;

        if (grad_max(u) > cfg.shock_factor * grad0) {
            result.halt = HaltReason::Shock;
            result.message = "gradient catastrophe detected";
            result.y.push_back(y);
            result.states.push_back(to_snapshot(u));
            break;
        }
        if (step % cfg.output_every == 0 || y >= cfg.y_end) {
            result.y.push_back(y);
            result.states.push_back(to_snapshot(u));
        }
    }
    result.steps = step;

    // conservation monitors on the stored series
    ConservationReport& rep = result.report;
    rep.y = result.y;
    for (std::size_t t = 0; t < result.states.size(); ++t) {
        const HydroSnapshot& s = result.states[t];
        rep.mass.push_back(integral(s.a));
        ScalarField1D B0 = moment_field(s, 0);
        ScalarField1D dens(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
        for (int i = 0; i < s.n(); ++i)
            dens.values[i] = B0.values[i] * std::pow(s.a.values[i], 1.5);
        rep.second.push_back(integral(dens));
    }
    for (std::size_t t = 0; t < rep.mass.size(); ++t) {
        rep.mass_drift_rel = std::max(
            rep.mass_drift_rel, std::abs(rep.mass[t] - rep.mass[0]) / std::abs(rep.mass[0]));
        rep.second_drift_rel =
            std::max(rep.second_drift_rel, std::abs(rep.second[t] - rep.second[0]) /
                                               std::max(std::abs(rep.second[0]), 1e-30));
    }
    if (result.states.size() >= 3) {
        for (std::size_t t = 1; t + 1 < result.states.size(); ++t) {
            const HydroSnapshot& s = result.states[t];
            ScalarField1D B0 = moment_field(s, 0);
            ScalarField1D flux(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
            for (int i = 0; i < s.n(); ++i)
                flux.values[i] = 2.0 * std::sqrt(s.a.values[i]) * B0.values[i];
            ScalarField1D fx = partial1d(flux);
            const double hm = rep.y[t] - rep.y[t - 1], hp = rep.y[t + 1] - rep.y[t];
            for (int i = 0; i < s.n(); ++i) {
                const double ay =
                    central_nonuniform(result.states[t - 1].a.values[i], s.a.values[i],
                                       result.states[t + 1].a.values[i], hm, hp);
                rep.flux_form_residual =
                    std::max(rep.flux_form_residual, std::abs(ay - fx.values[i]));
            }
        }
        rep.moment_chain = moment_chain_residual(result.states, result.y, chain_orders);
    }
    return result;
}

std::vector<double> moment_chain_residual(const std::vector<HydroSnapshot>& series,
                                          const std::vector<double>& y, int K) {
    if (series.size() != y.size())
        throw std::invalid_argument("moment_chain_residual: series/y size mismatch");
    if (series.size() < 3)
        throw std::invalid_argument("moment_chain_residual: need at least 3 snapshots");
    const int T = static_cast<int>(series.size());
    const int N = series[0].degree;
    const int n = series[0].n();

    // B^k fields for k = 0..K+1 per snapshot
    std::vector<std::vector<ScalarField1D>> B(T);
    for (int t = 0; t < T; ++t) {
        B[t].reserve(K + 2);
        for (int k = 0; k <= K + 1; ++k) B[t].push_back(moment_field(series[t], k));
    }

    std::vector<double> norms(K + 1, 0.0);
    for (int t = 1; t + 1 < T; ++t) {
        const HydroSnapshot& s = series[t];
        ScalarField1D w(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
        for (int i = 0; i < n; ++i) w.values[i] = 1.0 / std::sqrt(s.a.values[i]);
        ScalarField1D wx = partial1d(w);
        const double hm = y[t] - y[t - 1], hp = y[t + 1] - y[t];
        for (int k = 0; k <= K; ++k) {
            ScalarField1D Bx = partial1d(B[t][k + 1]);
            for (int i = 0; i < n; ++i) {
                const double By = central_nonuniform(B[t - 1][k].values[i], B[t][k].values[i],
                                                     B[t + 1][k].values[i], hm, hp);
                const double couple =
                    (k == 0) ? (N - 1.0) + 2.0 * B[t][1].values[i]
                             : k * B[t][k - 1].values[i] + (k + 2.0) * B[t][k + 1].values[i];
                const double res = By - (w.values[i] * Bx.values[i] - couple * wx.values[i]);
                norms[k] = std::max(norms[k], std::abs(res));
            }
        }
    }
    return norms;
}

DiagonalResult evolve_diagonal(const std::vector<ScalarField1D>& r0,
                               const VelocityClosure& closure, const EvolutionConfig& cfg) {
    cfg.validate();
    const int N = static_cast<int>(r0.size());
    if (N < 2) throw std::invalid_argument("evolve_diagonal: need at least two families");
    const int n = r0[0].nx;
    const double dx = r0[0].dx;
    for (const auto& f : r0)
        if (!f.same_layout(r0[0]) || !f.periodic)
            throw std::invalid_argument("evolve_diagonal: periodic fields on one grid required");

    auto wrap = [&](int i) { return (i % n + n) % n; };

    std::vector<std::vector<double>> r(N), rnew(N);
    for (int k = 0; k < N; ++k) {
        r[k] = r0[k].values;
        rnew[k].assign(n, 0.0);
    }
    std::vector<double> rv(N), mu(N);
    std::vector<std::vector<double>> muf(N, std::vector<double>(n));

    DiagonalResult out;
    auto emit = [&](double yv) {
        out.y.push_back(yv);
        std::vector<ScalarField1D> fields;
        for (int k = 0; k < N; ++k)
            fields.emplace_back(n, dx, r0[0].x0, true, r[k]);
        out.r.push_back(std::move(fields));
    };
    emit(0.0);

    double y = 0.0;
    int step = 0;
    while (y < cfg.y_end) {
        double speed = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < N; ++k) rv[k] = r[k][i];
            closure(rv.data(), mu.data(), N);
            for (int k = 0; k < N; ++k) {
                muf[k][i] = mu[k];
                speed = std::max(speed, std::abs(mu[k]));
            }
        }
        double dy = cfg.cfl * dx / std::max(speed, 1e-12);
        dy = std::min(dy, cfg.y_end - y);

        bool finite = true;
        for (int k = 0; k < N; ++k)
            for (int i = 0; i < n; ++i) {
                const double m = muf[k][i];
                const double grad = (m > 0.0) ? (r[k][wrap(i + 1)] - r[k][i]) / dx
                                              : (r[k][i] - r[k][wrap(i - 1)]) / dx;
                rnew[k][i] = r[k][i] + dy * m * grad;
                if (!std::isfinite(rnew[k][i])) finite = false;
            }
        if (!finite) {
            out.halt = HaltReason::NonFinite;
            break;
        }
        r.swap(rnew);
        y += dy;
        ++step;
        if (step % cfg.output_every == 0 || y >= cfg.y_end) emit(y);
    }
    out.steps = step;
    return out;
}

VelocityClosure two_component_closure() {
    return [](const double* r, double* mu, int N) {
        (void)N;
        mu[0] = -2.0 * r[1];
        mu[1] = -2.0 * r[0];
    };
}

} // namespace geoflow
