#include "geoflow/integrability.hpp"

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>
#include <tuple>

namespace geoflow {

namespace {

bool a_exists(int k, int N, const std::set<int>& mask) {
    return k >= 1 && k <= N - 1 && !mask.count(k);
}

auto term_key(const SystemTerm& t) {
    return std::make_tuple(static_cast<int>(t.side), static_cast<int>(t.derivative_of),
                           t.derivative_index, t.wrt, static_cast<int>(t.factor),
                           t.factor_index, t.scalar);
}

} // namespace

CoefficientSystem build_system(int N, const std::set<int>& zero_mask) {
    if (N < 2) throw std::invalid_argument("build_system: degree must be >= 2");
    for (int k : zero_mask)
        if (k < 1 || k > N - 1)
            throw std::invalid_argument("build_system: mask index outside 1..N-1");
    if (static_cast<int>(zero_mask.size()) == N - 1)
        throw std::invalid_argument("build_system: polynomial identically zero");

    CoefficientSystem sys;
    sys.degree = N;
    sys.zero_mask = zero_mask;

    for (int k = 1; k <= N; ++k) {
        CoefficientSystem::Equation eq;
        eq.k = k;
        auto add = [&](SystemTerm t) { eq.terms.push_back(t); };
        const bool has_k = a_exists(k, N, zero_mask);
        const bool has_km1 = a_exists(k - 1, N, zero_mask);
        if (has_k) {
            add({SystemTerm::Side::LHS, 1, SystemTerm::Factor::One, 0, SystemTerm::Unknown::A,
                 k, 1});
            add({SystemTerm::Side::LHS, 1, SystemTerm::Factor::G12, 0, SystemTerm::Unknown::A,
                 k, 2});
            add({SystemTerm::Side::RHS, k, SystemTerm::Factor::A, k, SystemTerm::Unknown::G12,
                 0, 2});
        }
        if (has_km1) {
            add({SystemTerm::Side::LHS, 1, SystemTerm::Factor::G12, 0, SystemTerm::Unknown::A,
                 k - 1, 1});
            add({SystemTerm::Side::LHS, 1, SystemTerm::Factor::One, 0, SystemTerm::Unknown::A,
                 k - 1, 2});
            add({SystemTerm::Side::RHS, N + 1 - k, SystemTerm::Factor::A, k - 1,
                 SystemTerm::Unknown::G12, 0, 1});
        }
        if (!eq.terms.empty()) sys.equations.push_back(std::move(eq));
    }
    return sys;
}

void canonicalize(CoefficientSystem& sys) {
    for (auto& eq : sys.equations)
        std::sort(eq.terms.begin(), eq.terms.end(),
                  [](const SystemTerm& a, const SystemTerm& b) { return term_key(a) < term_key(b); });
}

bool structurally_equal(const CoefficientSystem& a, const CoefficientSystem& b) {
    if (a.degree != b.degree) return false;
    if (a.equations.size() != b.equations.size()) return false;
    CoefficientSystem ca = a, cb = b;
    canonicalize(ca);
    canonicalize(cb);
    for (std::size_t e = 0; e < ca.equations.size(); ++e) {
        if (ca.equations[e].k != cb.equations[e].k) return false;
        if (ca.equations[e].terms != cb.equations[e].terms) return false;
    }
    return true;
}

std::vector<ScalarField2D> system_residual(const CoefficientSystem& sys,
                                           const std::map<int, Coefficient>& a,
                                           const Coefficient& g12) {
    const int N = sys.degree;
    for (int k = 1; k <= N - 1; ++k)
        if (!sys.zero_mask.count(k) && !a.count(k))
            throw std::invalid_argument("system_residual: missing field for unmasked a_" +
                                        std::to_string(k));

    auto unknown = [&](SystemTerm::Unknown u, int idx) -> const Coefficient& {
        if (u == SystemTerm::Unknown::G12) return g12;
        return a.at(idx);
    };

    std::vector<ScalarField2D> out;
    out.reserve(sys.equations.size());
    for (const auto& eq : sys.equations) {
        Coefficient acc(0.0);
        for (const auto& t : eq.terms) {
            Coefficient d = cf_partial(unknown(t.derivative_of, t.derivative_index), t.wrt);
            Coefficient factor(1.0);
            if (t.factor == SystemTerm::Factor::G12) factor = g12;
            if (t.factor == SystemTerm::Factor::A) factor = a.at(t.factor_index);
            double s = static_cast<double>(t.scalar);
            if (t.side == SystemTerm::Side::RHS) s = -s;
            acc = cf_add(acc, cf_scale(s, cf_mul(factor, d)));
        }
        if (acc.is_constant()) {
            // constant inputs: residual is the zero field on a default grid;
            // callers with constant data should interpret the scalar directly
            throw std::invalid_argument("system_residual: all inputs constant, no grid to report on");
        }
        out.push_back(acc.field());
    }
    return out;
}

double bracket_system_gap(int N, const std::set<int>& zero_mask,
                          const std::map<int, Coefficient>& a, const Coefficient& g12) {
    CoefficientSystem sys = build_system(N, zero_mask);

    std::vector<Coefficient> interior;
    for (int k = 1; k <= N - 1; ++k) {
        if (zero_mask.count(k))
            interior.emplace_back(0.0);
        else
            interior.push_back(a.at(k));
    }
    MomentaPolynomial f = MomentaPolynomial::normal_form(N, std::move(interior));
    HamiltonianForm H(g12);
    MomentaPolynomial br = poisson_bracket(f, H);

    std::vector<ScalarField2D> res = system_residual(sys, a, g12);

    double scale = 0.0;
    for (const auto& c : br.coeffs)
        if (!c.is_constant()) scale = std::max(scale, max_abs(c.field()));
    scale = std::max(scale, 1e-300);

    double gap = 0.0;
    std::set<int> surviving;
    for (std::size_t e = 0; e < sys.equations.size(); ++e) {
        const int k = sys.equations[e].k;
        surviving.insert(k);
        const Coefficient& ck = br.coeffs[k];
        if (ck.is_constant()) {
            gap = std::max(gap, max_abs(res[e]) + std::abs(ck.constant()));
            continue;
        }
        const auto& cv = ck.field().values;
        const auto& rv = res[e].values;
        for (std::size_t i = 0; i < cv.size(); ++i)
            gap = std::max(gap, std::abs(cv[i] - rv[i]));
    }
    // dropped equations correspond to bracket coefficients that must vanish
    for (int k = 0; k <= N + 1; ++k) {
        if (surviving.count(k)) continue;
        const Coefficient& ck = br.coeffs[k];
        gap = std::max(gap, ck.is_constant() ? std::abs(ck.constant()) : max_abs(ck.field()));
    }
    return gap / scale;
}

namespace {

std::string unknown_name(SystemTerm::Unknown u, int idx) {
    if (u == SystemTerm::Unknown::G12) return "g12";
    return "a" + std::to_string(idx);
}

std::string term_text(const SystemTerm& t) {
    std::ostringstream os;
    if (t.scalar != 1) os << t.scalar << "*";
    if (t.factor == SystemTerm::Factor::G12) os << "g12*";
    if (t.factor == SystemTerm::Factor::A) os << "a" << t.factor_index << "*";
    os << "d" << unknown_name(t.derivative_of, t.derivative_index) << "/dx" << t.wrt;
    return os.str();
}

} // namespace

std::string render_text(const CoefficientSystem& sys) {
    std::ostringstream os;
    os << "degree N = " << sys.degree;
    if (!sys.zero_mask.empty()) {
        os << ", vanishing:";
        for (int k : sys.zero_mask) os << " a" << k;
    }
    os << "\n";
    for (const auto& eq : sys.equations) {
        os << "  [k=" << eq.k << "]  ";
        bool first = true;
        for (const auto& t : eq.terms) {
            if (t.side != SystemTerm::Side::LHS) continue;
            if (!first) os << " + ";
            os << term_text(t);
            first = false;
        }
        os << (first ? "0" : "") << " = ";
        first = true;
        for (const auto& t : eq.terms) {
            if (t.side != SystemTerm::Side::RHS) continue;
            if (!first) os << " + ";
            os << term_text(t);
            first = false;
        }
        if (first) os << "0";
        os << "\n";
    }
    return os.str();
}

nlohmann::ordered_json system_to_json(const CoefficientSystem& sys) {
    nlohmann::ordered_json j;
    j["degree"] = sys.degree;
    j["zero_mask"] = sys.zero_mask;
    nlohmann::ordered_json eqs = nlohmann::ordered_json::array();
    for (const auto& eq : sys.equations) {
        nlohmann::ordered_json je;
        je["k"] = eq.k;
        nlohmann::ordered_json terms = nlohmann::ordered_json::array();
        for (const auto& t : eq.terms) {
            nlohmann::ordered_json jt;
            jt["side"] = t.side == SystemTerm::Side::LHS ? "LHS" : "RHS";
            jt["scalar"] = t.scalar;
            jt["factor"] = t.factor == SystemTerm::Factor::One
                               ? "1"
                               : (t.factor == SystemTerm::Factor::G12
                                      ? "g12"
                                      : "a" + std::to_string(t.factor_index));
            jt["derivative_of"] = unknown_name(t.derivative_of, t.derivative_index);
            jt["wrt"] = t.wrt == 1 ? "x1" : "x2";
            terms.push_back(std::move(jt));
        }
        je["terms"] = std::move(terms);
        eqs.push_back(std::move(je));
    }
    j["equations"] = std::move(eqs);
    return j;
}

} // namespace geoflow
