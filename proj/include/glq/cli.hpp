#pragma once

// Command-line front end: argument parsing into RunConfig, dispatch to the
// library, JSON/CSV report emission. Exit codes: 0 all checks pass,
// 1 a check failed or a library error was recorded, 2 configuration error.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glq/coherent_fock.hpp"
#include "glq/continuum.hpp"
#include "glq/covariance_rewrite.hpp"
#include "glq/fockrep.hpp"
#include "glq/lattice_rep.hpp"
#include "glq/qspecial.hpp"

namespace glq::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Parses "1.5", "-0.3i", "i", "1+2i", "1e-3-2.5e-1i", "(1,2)".
inline cplx parse_complex(std::string s)
{
    std::erase_if(s, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    auto num = [&](std::string_view t) {
        if (t.empty() || t == "+")
            return 1.0;
        if (t == "-")
            return -1.0;
        if (t.front() == '+')
            t.remove_prefix(1);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size())
            throw ConfigError("cannot parse complex number '" + s + "'");
        return v;
    };
    if (s.empty())
        throw ConfigError("empty complex number");
    if (s.front() == '(' && s.back() == ')') {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw ConfigError("cannot parse complex number '" + s + "'");
        const std::string_view v(s);
        return {num(v.substr(1, comma - 1)), num(v.substr(comma + 1, s.size() - comma - 2))};
    }
    const char last = s.back();
    if (last != 'i' && last != 'j')
        return {num(s), 0.0};
    const std::string_view body(s.data(), s.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    if (split == std::string_view::npos)
        return {0.0, num(body)};
    return {num(body.substr(0, split)), num(body.substr(split))};
}

inline std::vector<cplx> parse_complex_list(const std::string& s)
{
    std::vector<cplx> out;
    if (s.empty())
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_complex(item));
    return out;
}

struct RunConfig
{
    std::string subcommand;
    std::string function;  // eval target
    double q = 0.5;
    int N = 12;
    int W = 10;
    int W_large = 0;  // 0: W + 4
    double tol = 1e-10;
    double quad_tol = 1e-8;
    double boundary_gap = 0.0;
    int max_terms = 400;
    double lambda = 1.0;
    double mu = 2.0;
    cplx z1{0.0, 0.0};
    cplx z2{0.0, 0.0};
    cplx x{0.0, 0.0};
    cplx z{0.0, 0.0};
    std::vector<cplx> a;
    std::vector<cplx> b;
    std::optional<int> n;
    bool infinite = false;
    bool normalized = false;
    std::vector<int> s{0};
    double sample_lambda = 1.0;
    double sample_mu = 4.0;
    int samples = 10000;
    std::string source = "recurrence";
    std::string order = "a1-innermost";
    std::vector<std::string> conventions;
    std::vector<std::string> expect_zero;
    std::vector<std::string> checks;
    std::string output;
    std::string format = "json";
};

inline void validate(const RunConfig& c)
{
    if (!(c.q > 0.0 && c.q < 1.0))
        throw ConfigError("--q must lie in (0,1)");
    if (!(c.tol > 0.0) || !(c.quad_tol > 0.0))
        throw ConfigError("tolerances must be positive");
    if (c.N < 1 || c.W < 1 || c.W_large < 0)
        throw ConfigError("cutoffs must be >= 1");
    if (c.max_terms < 0)
        throw ConfigError("--max-terms must be >= 0");
    if (c.format != "json" && c.format != "csv")
        throw ConfigError("--format must be json or csv");
    if (!(c.lambda > 0.0) || !(c.mu > 0.0))
        throw ConfigError("--lambda and --mu must be positive");
}

// ---------------------------------------------------------------------------
// Report helpers

inline json cjson(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

inline json series_json(const SeriesValue& v)
{
    return json{{"value", cjson(v.value)},
                {"terms_used", v.terms_used},
                {"tail_estimate", v.tail_estimate},
                {"converged", v.converged}};
}

inline json error_json(const glq::Error& e) { return json{{"kind", e.kind()}, {"message", e.what()}}; }

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string num_str(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string r = "\"";
    for (char c : s)
        r += c == '"' ? std::string("\"\"") : std::string(1, c);
    return r + "\"";
}

struct Outcome
{
    json report;
    Table table;
    bool passed = true;
};

inline json base_report(const RunConfig& c)
{
    json r;
    r["schema"] = 1;
    r["command"] = c.subcommand;
    r["q"] = c.q;
    return r;
}

// ---------------------------------------------------------------------------
// Subcommands

inline Outcome run_eval(const RunConfig& c)
{
    const DeformationParameter dp(c.q);
    Outcome o;
    o.report = base_report(c);
    o.report["function"] = c.function;
    o.table.header = {"function", "re", "im", "terms_used", "tail_estimate", "converged"};
    auto finish = [&](const SeriesValue& v) {
        o.report["result"] = series_json(v);
        o.table.rows.push_back({c.function, num_str(v.value.real()), num_str(v.value.imag()),
                                std::to_string(v.terms_used), num_str(v.tail_estimate), v.converged ? "true" : "false"});
        o.passed = v.converged;
    };
    auto exact = [](cplx v) {
        SeriesValue s;
        s.value = v;
        s.terms_used = 1;
        s.converged = true;
        return s;
    };
    const auto& f = c.function;
    if (f == "q-number") {
        if (c.x.imag() != 0.0)
            throw ConfigError("q-number takes a real --x");
        o.report["x"] = c.x.real();
        finish(exact(q_number(dp, c.x.real())));
    } else if (f == "q-factorial") {
        if (!c.n)
            throw ConfigError("q-factorial needs --n");
        o.report["n"] = *c.n;
        finish(exact(q_factorial(dp, *c.n)));
    } else if (f == "q-pochhammer") {
        if (c.a.size() != 1)
            throw ConfigError("q-pochhammer needs exactly one --a value");
        if (!c.infinite && !c.n)
            throw ConfigError("q-pochhammer needs --n or --infinite");
        o.report["a"] = cjson(c.a[0]);
        o.report["order"] = c.infinite ? json("infinite") : json(*c.n);
        const auto order = c.infinite ? PochhammerOrder::infinite() : PochhammerOrder::finite(*c.n);
        finish(q_pochhammer(c.a[0], dp, order, c.tol));
    } else if (f == "q-exp") {
        o.report["x"] = cjson(c.x);
        o.report["tol"] = c.tol;
        finish(q_exp(dp, c.x, c.tol));
    } else if (f == "psi") {
        json aj = json::array(), bj = json::array();
        for (cplx v : c.a)
            aj.push_back(cjson(v));
        for (cplx v : c.b)
            bj.push_back(cjson(v));
        o.report["a"] = aj;
        o.report["b"] = bj;
        o.report["z"] = cjson(c.z);
        o.report["tol"] = c.tol;
        o.report["max_terms"] = c.max_terms;
        const auto v = bilateral_psi(std::span<const cplx>(c.a), std::span<const cplx>(c.b), dp, c.z, c.tol, c.max_terms);
        finish(v);
        o.report["result"]["forward_terms"] = v.forward_terms;
        o.report["result"]["backward_terms"] = v.backward_terms;
        o.report["result"]["forward_tail"] = v.forward_tail;
        o.report["result"]["backward_tail"] = v.backward_tail;
    } else {
        throw ConfigError("eval: unknown function '" + f + "' (q-number, q-factorial, q-pochhammer, q-exp, psi)");
    }
    return o;
}

inline Outcome run_fock_verify(const RunConfig& c)
{
    const DeformationParameter dp(c.q);
    const auto space = fockrep::build_space(dp, c.N);
    Outcome o;
    o.report = base_report(c);
    const auto rep = fockrep::relation_residuals(space);
    o.report["N"] = c.N;
    o.report["tol"] = c.tol;
    o.report["norm_kind"] = rep.norm_kind;
    o.report["region"] = rep.region;
    o.report["interior_empty"] = rep.interior_empty;
    json res = json::object();
    o.table.header = {"check", "value", "passed"};
    auto row = [&](const std::string& name, double v) {
        const bool ok = v <= c.tol;
        o.passed = o.passed && ok;
        o.table.rows.push_back({name, num_str(v), ok ? "true" : "false"});
        return ok;
    };
    for (const auto& [name, v] : rep.residuals) {
        res[name] = v;
        row(name, v);
    }
    o.report["residuals"] = res;

    double de = 0.0, dt = 0.0;
    for (const auto& e : fockrep::spectrum_check(space)) {
        de = std::max(de, std::abs(e.energy - e.energy_formula));
        dt = std::max(dt, std::abs(e.t - e.t_formula));
    }
    const double ht = fockrep::commutator_HT_residual(space);
    const double offH = fockrep::off_diagonal_mass(fockrep::build_operator(space, fockrep::Mode::H).entries);
    const double offT = fockrep::off_diagonal_mass(fockrep::build_operator(space, fockrep::Mode::T).entries);
    o.report["spectrum"] = json{{"max_energy_error", de},
                                {"max_t_error", dt},
                                {"commutator_HT", ht},
                                {"off_diagonal_H", offH},
                                {"off_diagonal_T", offT}};
    row("spectrum energy", de);
    row("spectrum t", dt);
    row("[H,T]", ht);
    row("off-diagonal H", offH);
    row("off-diagonal T", offT);

    double ns = 0.0;
    for (int n = 0; n <= c.N; ++n)
        for (int m = 0; m <= c.N; ++m)
            ns = std::max(ns, (fockrep::build_number_state(space, n, m) - space.basis_vector(n, m)).norm());
    o.report["number_states_max_error"] = ns;
    row("number states", ns);
    o.report["passed"] = o.passed;
    return o;
}

inline Outcome run_coherent_minus(const RunConfig& c)
{
    const DeformationParameter dp(c.q);
    const auto space = fockrep::build_space(dp, c.N);
    Outcome o;
    o.report = base_report(c);
    o.report["N"] = c.N;
    o.report["z1"] = cjson(c.z1);
    o.report["z2"] = cjson(c.z2);
    o.report["normalized"] = c.normalized;
    o.report["tol"] = c.tol;
    const auto st = coherent_fock::build_minus(space, c.z1, c.z2, c.normalized);
    const auto order = c.order == "a2-innermost" ? coherent_fock::FactorOrder::a2_innermost
                                                 : coherent_fock::FactorOrder::a1_innermost;
    const double r2 = coherent_fock::eigen_residual_a2(st);
    const double r1 = coherent_fock::twisted_eigen_residual_a1(space, c.z1, c.z2);
    const auto fz = coherent_fock::verify_factorized_form(space, c.z1, c.z2, order);
    o.report["norm_constant"] = st.norm_constant;
    o.report["norm_squared"] = coherent_fock::truncated_norm_squared(st);
    o.report["truncation_warning"] = st.truncation_warning;
    o.report["boundary_ratio"] = st.boundary_ratio;
    o.report["residuals"] = json{{"a2 eigen", r2}, {"a1 twisted eigen", r1}};
    o.report["factorized"] = json{{"order", c.order}, {"distance", fz.distance}, {"truncation_warning", fz.truncation_warning}};
    if (std::norm(c.z2) < dp.nu() && std::norm(c.z1) < dp.nu()) {
        const auto tr = coherent_fock::twisted_norm_ratio(space, c.z1, c.z2);
        o.report["twist_ratio"] = json{{"measured", tr.measured}, {"predicted", tr.predicted}};
    }
    json coeffs = json::array();
    o.table.header = {"n", "m", "re", "im"};
    for (int i = 0; i < space.dimension(); ++i) {
        const auto f = space.label(i);
        coeffs.push_back(json::array({st.coeffs(i).real(), st.coeffs(i).imag()}));
        o.table.rows.push_back({std::to_string(f.n), std::to_string(f.m), num_str(st.coeffs(i).real()),
                                num_str(st.coeffs(i).imag())});
    }
    o.report["coeffs"] = coeffs;
    o.passed = r2 <= c.tol && r1 <= c.tol && fz.distance <= c.tol;
    o.report["passed"] = o.passed;
    return o;
}

inline Outcome run_lattice_verify(const RunConfig& c)
{
    const DeformationParameter dp(c.q);
    const lattice_rep::LatticeWindow w(dp, c.lambda, c.mu, c.W);
    Outcome o;
    o.report = base_report(c);
    o.report["lambda"] = c.lambda;
    o.report["mu"] = c.mu;
    o.report["W"] = c.W;
    o.report["tol"] = c.tol;
    const auto rep = lattice_rep::algebra_residuals_on_lattice(w);
    o.report["norm_kind"] = rep.norm_kind;
    o.report["region"] = rep.region;
    o.table.header = {"relation", "residual", "kind"};
    json res = json::object(), diag = json::object();
    for (const auto& [k, v] : rep.residuals) {
        res[k] = v;
        o.table.rows.push_back({k, num_str(v), "relation"});
    }
    for (const auto& [k, v] : rep.diagnostics) {
        diag[k] = v;
        o.table.rows.push_back({k, num_str(v), "diagnostic"});
    }
    o.report["residuals"] = res;
    o.report["diagnostics"] = diag;
    int imaginary = 0;
    for (int i = 0; i < w.size(); ++i) {
        const auto l = w.label(i);
        imaginary += lattice_rep::energy_gap(w, l.j, l.k) < 0.0;
    }
    o.report["imaginary_a1_amplitudes"] = imaginary;
    o.passed = rep.max_residual() <= c.tol;
    o.report["passed"] = o.passed;
    return o;
}

inline bool has_check(const RunConfig& c, const std::string& name)
{
    return std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
}

inline json norm_json(const lattice_rep::NormValue& v)
{
    json j{{"value", cjson(v.value)},
           {"converged", v.converged},
           {"tail_estimate", v.tail_estimate},
           {"terms_used", v.terms_used}};
    if (!v.error.empty())
        j["error"] = v.error;
    return j;
}

inline Outcome run_coherent_plus(const RunConfig& c)
{
    using namespace lattice_rep;
    const DeformationParameter dp(c.q);
    const LatticeWindow w(dp, c.lambda, c.mu, c.W);
    const int wl = c.W_large ? c.W_large : c.W + 4;
    Outcome o;
    o.report = base_report(c);
    o.report["lambda"] = c.lambda;
    o.report["mu"] = c.mu;
    o.report["z1"] = cjson(c.z1);
    o.report["z2"] = cjson(c.z2);
    o.report["W"] = c.W;
    o.report["W_large"] = wl;
    o.report["source"] = c.source;
    o.report["tol"] = c.tol;
    if (c.source != "recurrence" && c.source != "closed_form")
        throw ConfigError("--source must be recurrence or closed_form");
    const auto src = c.source == "recurrence" ? CoefficientSource::recurrence : CoefficientSource::closed_form;
    const auto st = build_plus_coherent(w, c.z1, c.z2, src);

    json sing = json::array();
    for (const auto& l : st.singular_points())
        sing.push_back(json::array({l.j, l.k}));
    o.report["singular_points"] = sing;
    o.report["boundary_mass"] = st.state.boundary_mass();

    const auto cmp = compare_closed_form_with_recurrence(w);
    json disc = json::array();
    for (const auto& d : cmp.discrepancies)
        disc.push_back(json{{"j", d.index.j},
                            {"k", d.index.k},
                            {"quadrant", d.quadrant},
                            {"closed_form", cjson(d.closed_form)},
                            {"recurrence", cjson(d.recurrence)},
                            {"relative_error", d.relative_error},
                            {"magnitude_agrees", d.magnitude_agrees}});
    o.report["closed_form_vs_recurrence"] = json{{"points", cmp.points},
                                                 {"compared", cmp.compared},
                                                 {"singular", cmp.singular},
                                                 {"max_relative_error", cmp.max_relative_error},
                                                 {"max_magnitude_error", cmp.max_magnitude_error},
                                                 {"mismatches_per_quadrant", cmp.mismatches_per_quadrant},
                                                 {"discrepancies", disc}};

    bool rec_ok = true;
    json rr = json::object();
    for (auto mode : {RecurrenceMode::a1dag, RecurrenceMode::a2dag}) {
        const auto r = plus_recurrence_residual(st, mode);
        json inc = json::array();
        for (const auto& l : r.inconsistent)
            inc.push_back(json::array({l.j, l.k}));
        const char* key = mode == RecurrenceMode::a1dag ? "a1dag" : "a2dag";
        rr[key] = json{{"max_relative", r.max_relative},
                       {"rows_checked", r.rows_checked},
                       {"rows_skipped", r.rows_skipped},
                       {"inconsistent_recurrence", inc}};
        rec_ok = rec_ok && r.max_relative <= c.tol && r.inconsistent.empty();
    }
    o.report["recurrence_residuals"] = rr;

    const auto nc = norm_cross_check(w, c.z1, c.z2, c.W, wl, 1e-6, std::min(c.tol, 1e-12));
    o.report["norms"] = json{{"coeff_sum", norm_json(nc.coeff_sum_small)},
                             {"coeff_sum_large_window", norm_json(nc.coeff_sum_large)},
                             {"eq20_sum", norm_json(nc.eq20)},
                             {"eq22_product", norm_json(nc.eq22)},
                             {"bilinear_sum", norm_json(nc.bilinear)}};
    o.report["norm_cross_check"] = json{{"coeff_sum_window_change", nc.coeff_sum_window_change},
                                        {"coeff_sum_vs_eq22", nc.coeff_vs_eq22},
                                        {"eq20_vs_eq22", nc.eq20_vs_eq22},
                                        {"bilinear_vs_eq22", nc.bilinear_vs_eq22},
                                        {"agreement", nc.agreement},
                                        {"discrepancy", nc.discrepancy},
                                        {"evidence_complete", nc.evidence_complete}};
    o.table.header = {"route", "re", "im", "converged"};
    for (const auto& [name, v] : {std::pair{"coeff_sum", nc.coeff_sum_small}, std::pair{"coeff_sum_large_window", nc.coeff_sum_large},
                                  std::pair{"eq20_sum", nc.eq20}, std::pair{"eq22_product", nc.eq22},
                                  std::pair{"bilinear_sum", nc.bilinear}})
        o.table.rows.push_back({name, num_str(v.value.real()), num_str(v.value.imag()), v.converged ? "true" : "false"});

    json checks = json::object();
    checks["recurrence"] = rec_ok;
    if (has_check(c, "closed-form"))
        checks["closed-form"] = cmp.all_match();
    if (has_check(c, "norm"))
        checks["norm"] = nc.agreement || (nc.discrepancy && nc.evidence_complete);
    o.passed = true;
    for (const auto& [_, v] : checks.items())
        o.passed = o.passed && v.get<bool>();
    o.report["checks"] = checks;
    o.report["passed"] = o.passed;
    return o;
}

inline Outcome run_continuum(const RunConfig& c)
{
    using namespace lattice_rep;
    const DeformationParameter dp(c.q);
    Outcome o;
    o.report = base_report(c);
    const auto p = continuum_params(dp, c.z1, c.z2);
    o.report["z1"] = cjson(c.z1);
    o.report["z2"] = cjson(c.z2);
    json delta = json::array();
    for (int s : c.s)
        delta.push_back(json{{"s", s}, {"delta", cjson(p.delta(s))}});
    o.report["params"] = json{{"d", cjson(p.d)}, {"eps", cjson(p.eps)}, {"tau", p.tau}, {"xi", p.xi}, {"delta", delta}};
    o.report["convergence_conditions"] = json{{"re_d_gt_minus_1", p.d.real() > -1.0},
                                              {"re_eps_gt_minus_1", p.eps.real() > -1.0}};
    json amps = json::array();
    for (int s : c.s) {
        const auto a = continuum_family_amplitude(dp, p, s, c.sample_lambda, c.sample_mu);
        amps.push_back(json{{"s", s}, {"amplitude", cjson(a.value)}, {"pole_warning", a.pole_warning}});
    }
    o.report["amplitudes"] = json{{"lambda", c.sample_lambda}, {"mu", c.sample_mu}, {"values", amps}};

    const auto pos = integrand_positivity(dp, p, LogPeriodic::constant(), c.samples);
    o.report["positivity"] = json{{"samples", pos.samples},
                                  {"negative", pos.negative},
                                  {"non_finite", pos.non_finite},
                                  {"min_value", pos.min_value}};
    const bool pos_ok = pos.negative == 0 && pos.non_finite == 0;

    o.table.header = {"key", "value"};
    o.table.rows.push_back({"d_re", num_str(p.d.real())});
    o.table.rows.push_back({"eps_re", num_str(p.eps.real())});
    o.table.rows.push_back({"tau", num_str(p.tau)});
    o.table.rows.push_back({"xi", num_str(p.xi)});

    ContinuumOptions opt;
    opt.quad_tol = c.quad_tol;
    opt.boundary_gap = c.boundary_gap;
    o.report["quad_tol"] = c.quad_tol;
    o.report["boundary_gap"] = c.boundary_gap;
    try {
        const auto r = continuum_norm_integral(dp, p, opt);
        json gaps = json::array();
        for (const auto& g : r.gap_sequence)
            gaps.push_back(json{{"gap", g.gap}, {"value", g.value}});
        o.report["integral"] = json{{"finite", r.finite},
                                    {"value", r.finite ? json(r.value) : json(nullptr)},
                                    {"refined_value", r.finite ? json(r.refined_value) : json(nullptr)},
                                    {"refinement_change", r.finite ? json(r.refinement_change) : json(nullptr)},
                                    {"error_estimate", r.error_estimate},
                                    {"mu_max", r.mu_max},
                                    {"mu_tail", r.mu_tail},
                                    {"boundary_divergent", r.boundary_divergent},
                                    {"gap_sequence", gaps},
                                    {"status", r.status}};
        o.table.rows.push_back({"integral", r.finite ? num_str(r.value) : "inf"});
        o.passed = r.finite && r.value > 0.0 && r.refinement_change <= 1e-5 && pos_ok;
    } catch (const DomainError& e) {
        o.report["integral"] = json{{"finite", false}, {"error", error_json(e)}};
        o.table.rows.push_back({"integral", "DomainError"});
        o.passed = false;
    }
    o.report["passed"] = o.passed;
    return o;
}

inline covariance::MatrixAction parse_action(const std::string& kind)
{
    using covariance::MatrixAction;
    if (kind == "row")
        return MatrixAction::row;
    if (kind == "column")
        return MatrixAction::column;
    if (kind == "row-T")
        return MatrixAction::row_T;
    if (kind == "column-T")
        return MatrixAction::column_T;
    throw ConfigError("unknown matrix action '" + kind + "' (row, column, row-T, column-T)");
}

inline covariance::Convention parse_convention(const std::vector<std::string>& specs)
{
    covariance::Convention cv;
    for (const auto& s : specs) {
        if (s.rfind("creators-", 0) == 0)
            cv.creators = parse_action(s.substr(9));
        else if (s.rfind("annihilators-", 0) == 0)
            cv.annihilators = parse_action(s.substr(13));
        else
            throw ConfigError("--convention expects creators-<kind> or annihilators-<kind>, got '" + s + "'");
    }
    return cv;
}

inline json polynomial_json(const covariance::NCPolynomial& p)
{
    json terms = json::array();
    for (const auto& [w, coef] : p.terms())
        terms.push_back(json{{"word", covariance::word_str(w)}, {"coefficient", coef.str()}});
    return json{{"zero", p.is_zero()}, {"text", p.str()}, {"terms", terms}};
}

inline Outcome run_covariance(const RunConfig& c)
{
    using namespace covariance;
    const auto rs = RewriteSystem::standard();
    const Convention cv = parse_convention(c.conventions);
    Outcome o;
    o.report["schema"] = 1;
    o.report["command"] = c.subcommand;
    o.report["convention"] = cv.str();

    const auto pairs = overlap_check(rs);
    int nonzero = 0;
    json nz = json::array();
    for (const auto& cp : pairs)
        if (!cp.residual.is_zero()) {
            ++nonzero;
            nz.push_back(json{{"word", word_str(cp.word)}, {"residual", polynomial_json(cp.residual)}});
        }
    o.report["critical_pairs"] = json{{"count", pairs.size()}, {"nonzero", nonzero}, {"nonzero_pairs", nz}};

    const auto rep = covariance_report(cv, rs);
    json rel = json::object();
    o.table.header = {"convention", "relation", "zero", "residual"};
    for (const auto& r : rep) {
        rel[r.relation] = polynomial_json(r.residual);
        o.table.rows.push_back({cv.str(), r.relation, r.residual.is_zero() ? "true" : "false", r.residual.str()});
    }
    o.report["relations"] = rel;

    json ranking = json::array();
    for (const auto& sc : rank_conventions(rs))
        ranking.push_back(json{{"convention", sc.convention.str()}, {"zero_relations", sc.zero_relations}});
    o.report["ranking"] = ranking;

    o.passed = nonzero == 0;
    json expect = json::array();
    for (const auto& name : c.expect_zero) {
        const auto it = std::find_if(rep.begin(), rep.end(), [&](const RelationResidual& r) { return r.relation == name; });
        if (it == rep.end())
            throw ConfigError("--expect-zero: unknown relation '" + name + "'");
        expect.push_back(name);
        o.passed = o.passed && it->residual.is_zero();
    }
    o.report["expect_zero"] = expect;
    o.report["passed"] = o.passed;
    return o;
}

// ---------------------------------------------------------------------------

inline void emit(const RunConfig& c, const Outcome& o, std::ostream& out)
{
    std::ostringstream text;
    if (c.format == "json") {
        text << o.report.dump(2) << "\n";
    } else {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                text << (i ? "," : "") << csv_escape(cells[i]);
            text << "\n";
        };
        line(o.table.header);
        for (const auto& r : o.table.rows)
            line(r);
    }
    if (c.output.empty()) {
        out << text.str();
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f)
        throw ConfigError("cannot open output file '" + c.output + "'");
    f << text.str();
}

inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    try {
        validate(c);
        Outcome o;
        try {
            if (c.subcommand == "eval")
                o = run_eval(c);
            else if (c.subcommand == "fock-verify")
                o = run_fock_verify(c);
            else if (c.subcommand == "coherent-minus")
                o = run_coherent_minus(c);
            else if (c.subcommand == "lattice-verify")
                o = run_lattice_verify(c);
            else if (c.subcommand == "coherent-plus")
                o = run_coherent_plus(c);
            else if (c.subcommand == "continuum")
                o = run_continuum(c);
            else if (c.subcommand == "covariance")
                o = run_covariance(c);
            else
                throw ConfigError("unknown subcommand '" + c.subcommand + "'");
        } catch (const ContractViolation& e) {
            throw ConfigError(e.what());
        } catch (const glq::Error& e) {
            o = Outcome{};
            o.report = base_report(c);
            if (c.subcommand == "eval")
                o.report["function"] = c.function;
            o.report["error"] = error_json(e);
            o.report["passed"] = false;
            o.table.header = {"error", "message"};
            o.table.rows.push_back({e.kind(), e.what()});
            o.passed = false;
            err << e.kind() << ": " << e.what() << "\n";
        }
        emit(c, o, out);
        return o.passed ? 0 : 1;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    }
}

/// Parse argv into a RunConfig and execute it.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"gl_q(2)-covariant oscillator toolkit", "glq"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    std::string z1 = "0", z2 = "0", x = "0", z = "1", a, b;

    app.add_option("--q", c.q, "deformation parameter in (0,1)");
    app.add_option("--N", c.N, "Fock cutoff");
    app.add_option("--W", c.W, "lattice half width");
    app.add_option("--W-large", c.W_large, "larger window for stability checks (default W+4)");
    app.add_option("--tol", c.tol, "tolerance");
    app.add_option("--quad-tol", c.quad_tol, "quadrature tolerance");
    app.add_option("--boundary-gap", c.boundary_gap, "integrate lambda < (1-gap) mu/q");
    app.add_option("--max-terms", c.max_terms, "series term budget per direction");
    app.add_option("--lambda", c.lambda, "H eigenvalue scale");
    app.add_option("--mu", c.mu, "T eigenvalue scale");
    app.add_option("--z1", z1, "complex, e.g. 0.3i or 1-2i");
    app.add_option("--z2", z2, "complex");
    app.add_option("--x", x, "q-number / q-exp argument (complex)");
    app.add_option("--z", z, "psi argument (complex)");
    app.add_option("--a", a, "comma-separated complex list");
    app.add_option("--b", b, "comma-separated complex list");
    app.add_option("--n", c.n, "integer order / factorial argument");
    app.add_flag("--infinite", c.infinite, "infinite Pochhammer order");
    app.add_flag("--normalized", c.normalized, "normalize the coherent state");
    app.add_option("--s", c.s, "family indices")->delimiter(',');
    app.add_option("--sample-lambda", c.sample_lambda, "lambda for amplitude samples");
    app.add_option("--sample-mu", c.sample_mu, "mu for amplitude samples");
    app.add_option("--samples", c.samples, "positivity samples");
    app.add_option("--source", c.source, "recurrence or closed_form");
    app.add_option("--order", c.order, "a1-innermost or a2-innermost");
    app.add_option("--convention", c.conventions, "creators-<kind> / annihilators-<kind>");
    app.add_option("--expect-zero", c.expect_zero, "relation that must close exactly");
    app.add_option("--check", c.checks, "extra coherent-plus checks: closed-form, norm");
    app.add_option("--output,-o", c.output, "report file");
    app.add_option("--format", c.format, "json or csv");

    auto* ev = app.add_subcommand("eval", "evaluate a q-special function");
    ev->add_option("function", c.function, "q-number, q-factorial, q-pochhammer, q-exp, psi")->required();
    for (auto [name, what] : std::initializer_list<std::pair<const char*, const char*>>{
             {"fock-verify", "check the algebra relations in a truncated Fock space"},
             {"coherent-minus", "Fock coefficients of a minus-type coherent state"},
             {"lattice-verify", "check the lattice representation on a window"},
             {"coherent-plus", "plus-type coherent state on the lattice"},
             {"continuum", "continuous family amplitudes and norm integral"},
             {"covariance", "normal forms under the quantum-matrix coaction"}})
        app.add_subcommand(name, what);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    try {
        c.z1 = parse_complex(z1);
        c.z2 = parse_complex(z2);
        c.x = parse_complex(x);
        c.z = parse_complex(z);
        c.a = parse_complex_list(a);
        c.b = parse_complex_list(b);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    }
    return execute(c, out, err);
}

} // namespace glq::cli
