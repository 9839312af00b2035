#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stokeslab/asymptotics.hpp"
#include "stokeslab/laguerre.hpp"
#include "stokeslab/verify.hpp"
#include "svg.hpp"

namespace stokeslab::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "stokeslab 1.0 (defaults v1)";

// Options of every subcommand. Defaults are part of the versioned interface above.
struct Config {
    std::string a = "-3+2i";
    std::string alpha;
    std::vector<int> ns;
    std::vector<int> ks;
    std::vector<std::string> zs;
    std::string csv, json_path, svg;
    std::string variant = "g";
    std::string grid;
    int nodes = 256;
    int oracle = 0;
    int digits = 0;
    double window = 0;
    double band_width = 0.5, buffer = 0.05;
    double tol = 1e-8;
    double capture = -1, h_max = -1, max_winding = 20;
    bool orthogonal = false, monic = false, check = false, quick = false, no_budget = false;
    Tolerances tolerances;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::Config, "cannot open " + path + " for writing");
    f << content;
    if (!f) throw Error(ErrorCode::Config, "write to " + path + " failed");
}

void emit_json(const std::string& path, const json& j, std::ostream& out) {
    if (path == "-")
        out << j.dump(2) << '\n';
    else
        write_file(path, j.dump(2) + "\n");
}

json jc(cplx z) { return json::array({z.real(), z.imag()}); }

std::string fmt(double v, int prec = 6) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

std::string fmt(cplx z, int prec = 10) {
    std::ostringstream s;
    s << std::setprecision(prec) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return s.str();
}

// A with Im A < 0 is handled through its mirror image; these undo the reflection for output
struct Frame {
    bool mirror = false;
    cplx up(cplx z) const { return mirror ? std::conj(z) : z; }
    cplx out(cplx z) const { return mirror ? std::conj(z) : z; }
    Polyline out(const Polyline& p) const {
        Polyline q = p;
        if (mirror)
            for (cplx& z : q) z = std::conj(z);
        return q;
    }
};

Parameter parameter_for_graph(const std::string& text) {
    const cplx a = parse_complex(text);
    const Parameter p = zeros_of_d(a);
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter A = " + text);
    if (a.imag() == 0) throw Error(ErrorCode::Config, "the critical graph is built for Im A != 0");
    return p;
}

std::shared_ptr<const AsymptoticModel> model_for(const std::string& text, Frame& frame) {
    parameter_for_graph(text);
    const cplx a = parse_complex(text);
    frame.mirror = a.imag() < 0;
    return asymptotic_model(a);
}

// window that shows both zeros and the origin
std::pair<cplx, double> default_window(const Parameter& p, double override_half) {
    const cplx lo(std::min({0.0, p.zeta_minus.real(), p.zeta_plus.real()}),
                  std::min({0.0, p.zeta_minus.imag(), p.zeta_plus.imag()}));
    const cplx hi(std::max({0.0, p.zeta_minus.real(), p.zeta_plus.real()}),
                  std::max({0.0, p.zeta_minus.imag(), p.zeta_plus.imag()}));
    const double half = 0.5 * std::max(hi.real() - lo.real(), hi.imag() - lo.imag()) + 0.3 * p.scale();
    return {0.5 * (lo + hi), override_half > 0 ? override_half : half};
}

struct NamedArc {
    std::string name;
    const Trajectory* t;
};

std::vector<NamedArc> critical_arcs(const CriticalGraph& G) {
    return {{"gamma", &G.gamma},
            {"sigma0", &G.sigma0},
            {"sigma_minus", &G.sigma_minus},
            {"sigma_up", &G.sigma_up},
            {"sigma_down", &G.sigma_down}};
}

std::string winding_note(const Terminal& t) {
    if (t.type != TerminalType::AtOrigin) return "";
    std::string s = " (winding angle " + fmt(t.winding_angle) + ", " + std::to_string(t.winding) + " turns";
    if (t.truncated) s += ", truncated by the winding cap";
    return s + ")";
}

json terminal_json(const Terminal& t) {
    json j{{"terminal", terminal_name(t)}};
    if (t.type == TerminalType::AtOrigin) {
        j["winding_angle"] = t.winding_angle;
        j["winding"] = t.winding;
        j["truncated"] = t.truncated;
    }
    return j;
}

void draw_graph(SvgCanvas& c, const CriticalGraph& G, const Frame& f) {
    for (const NamedArc& a : critical_arcs(G))
        c.polyline(f.out(a.t->points), a.name == "gamma" ? "#c0392b" : "#1f4e79", a.name == "gamma" ? 2.5 : 1.6,
                   false, a.name + " -> " + terminal_name(a.t->terminal));
    c.dot(f.out(G.p.zeta_minus), 4, "#000", "zeta-");
    c.dot(f.out(G.p.zeta_plus), 4, "#000", "zeta+");
    c.label(f.out(G.p.zeta_minus), "ζ-");
    c.label(f.out(G.p.zeta_plus), "ζ+");
    c.dot(0.0, 2.5, "#777", "origin");
}

void draw_orthogonal(SvgCanvas& c, const OrthogonalGraph& og, const Frame& f) {
    for (std::size_t i = 0; i < og.arcs.size(); ++i)
        c.polyline(f.out(og.arcs[i].points), "#2e8b57", 1.2, true,
                   "orthogonal arc " + std::to_string(i) + " -> " + terminal_name(og.arcs[i].terminal));
}

StopRules rules_from(const Config& c) {
    StopRules r;
    if (c.capture > 0) r.capture = c.capture;
    if (c.h_max > 0) r.h_max = c.h_max;
    r.max_winding = c.max_winding;
    return r;
}

int cmd_graph(const Config& c, std::ostream& out) {
    Parameter p = parameter_for_graph(c.a);
    const Frame f{p.conjugated};
    const CriticalGraph G = build_critical_graph(p, rules_from(c));
    std::optional<OrthogonalGraph> og;
    if (c.orthogonal) og = trace_orthogonal_arcs(p, rules_from(c));

    out << "A = " << fmt(parse_complex(c.a)) << "\n";
    out << "zeta- = " << fmt(f.out(p.zeta_minus)) << ", zeta+ = " << fmt(f.out(p.zeta_plus)) << "\n";
    for (const NamedArc& a : critical_arcs(G))
        out << std::left << std::setw(12) << a.name << " -> " << std::setw(8) << terminal_name(a.t->terminal)
            << " " << a.t->points.size() << " points, length " << fmt(a.t->s.empty() ? 0.0 : a.t->s.back())
            << winding_note(a.t->terminal) << "\n";
    if (og) {
        out << "orthogonal arcs: " << og->arcs.size() << ", ending at the origin: " << og->origin_count
            << ", closed loops: " << og->closed_loops << "\n";
        for (std::size_t i = 0; i < og->arcs.size(); ++i)
            out << "  orth" << i << " from " << (og->arcs[i].start_zero < 0 ? "zeta-" : "zeta+") << " -> "
                << terminal_name(og->arcs[i].terminal) << winding_note(og->arcs[i].terminal) << "\n";
    }

    if (!c.csv.empty()) {
        std::ostringstream s;
        s << "arc,kind,s,re_z,im_z,re_w,im_w\n" << std::setprecision(17);
        auto rows = [&](const std::string& name, const Trajectory& t, const char* kind) {
            for (std::size_t i = 0; i < t.points.size(); ++i) {
                const cplx z = f.out(t.points[i]);
                const cplx w = i < t.w.size() ? f.out(t.w[i]) : cplx(NAN, NAN);
                s << name << ',' << kind << ',' << (i < t.s.size() ? t.s[i] : NAN) << ',' << z.real() << ','
                  << z.imag() << ',' << w.real() << ',' << w.imag() << '\n';
            }
        };
        for (const NamedArc& a : critical_arcs(G)) rows(a.name, *a.t, "critical");
        if (og)
            for (std::size_t i = 0; i < og->arcs.size(); ++i) rows("orth" + std::to_string(i), og->arcs[i], "orthogonal");
        write_file(c.csv, s.str());
    }
    if (!c.json_path.empty()) {
        json j{{"a", jc(parse_complex(c.a))}, {"zeta_minus", jc(f.out(p.zeta_minus))},
               {"zeta_plus", jc(f.out(p.zeta_plus))}, {"arcs", json::array()}};
        for (const NamedArc& a : critical_arcs(G)) {
            json arc = terminal_json(a.t->terminal);
            arc["name"] = a.name;
            arc["points"] = a.t->points.size();
            arc["length"] = a.t->s.empty() ? 0.0 : a.t->s.back();
            arc["level_drift"] = level_drift(*a.t);
            j["arcs"].push_back(arc);
        }
        if (og) {
            j["orthogonal"] = json{{"origin_count", og->origin_count}, {"closed_loops", og->closed_loops},
                                   {"arcs", json::array()}};
            for (const Trajectory& t : og->arcs) {
                json arc = terminal_json(t.terminal);
                arc["start"] = t.start_zero < 0 ? "zeta-" : "zeta+";
                j["orthogonal"]["arcs"].push_back(arc);
            }
        }
        j["convex_check"] = G.convex_check();
        emit_json(c.json_path, j, out);
    }
    if (!c.svg.empty()) {
        const auto [center, half] = default_window(G.p, c.window);
        SvgCanvas canvas(f.out(center), half);
        if (og) draw_orthogonal(canvas, *og, f);
        draw_graph(canvas, G, f);
        canvas.legend(0, "A = " + fmt(parse_complex(c.a), 6), "#000", false, false);
        canvas.legend(1, "critical trajectories", "#1f4e79", false, false);
        canvas.legend(2, "gamma", "#c0392b", false, false);
        if (og) canvas.legend(3, "orthogonal trajectories", "#2e8b57", true, false);
        write_file(c.svg, canvas.str());
    }
    return kOk;
}

int cmd_figure1(const Config& c, std::ostream& out) {
    Frame f;
    const auto model = model_for(c.a, f);
    const cplx a = parse_complex(c.a);
    const std::vector<int> ns = c.ns.empty() ? std::vector<int>{30} : c.ns;
    for (int n : ns)
        if (n < 1) throw Error(ErrorCode::Config, "degrees must be positive");
    std::vector<ZeroSideReport> reps;
    for (int n : ns) {
        reps.push_back(zero_side_check(n, a));
        const ZeroSideReport& r = reps.back();
        out << "n = " << n << ": max zero-to-gamma distance " << fmt(r.max_distance) << ", \"+\" side "
            << r.plus_side << ", \"-\" side " << r.minus_side << ", inequality failures " << r.inequality_failures
            << "\n";
    }
    json summary = json::array();
    for (std::size_t i = 1; i < reps.size(); ++i) {
        const double d0 = reps[i - 1].max_distance, d1 = reps[i].max_distance;
        out << "distance " << (d1 < d0 ? "decreases" : "does not decrease") << " from n = " << reps[i - 1].n
            << " to n = " << reps[i].n << ": " << fmt(d0) << " -> " << fmt(d1) << " (ratio " << fmt(d1 / d0, 4)
            << ")\n";
        summary.push_back({{"from", reps[i - 1].n}, {"to", reps[i].n}, {"ratio", d1 / d0}, {"decreases", d1 < d0}});
    }

    if (!c.csv.empty()) {
        std::ostringstream s;
        s << "n,re_z,im_z,side,distance\n" << std::setprecision(17);
        for (const ZeroSideReport& r : reps)
            for (std::size_t i = 0; i < r.zeros.size(); ++i)
                s << r.n << ',' << r.zeros[i].real() << ',' << r.zeros[i].imag() << ','
                  << (r.sides[i] > 0 ? '+' : '-') << ',' << model->distance_to_gamma(f.up(r.zeros[i])) << '\n';
        write_file(c.csv, s.str());
    }
    if (!c.json_path.empty()) {
        json j{{"a", jc(a)}, {"runs", json::array()}, {"decrease", summary}};
        for (const ZeroSideReport& r : reps) {
            json run{{"n", r.n},
                     {"max_distance", r.max_distance},
                     {"plus_side", r.plus_side},
                     {"minus_side", r.minus_side},
                     {"inequality_failures", r.inequality_failures},
                     {"zeros", json::array()}};
            for (cplx z : r.zeros) run["zeros"].push_back(jc(z));
            j["runs"].push_back(run);
        }
        emit_json(c.json_path, j, out);
    }
    if (!c.svg.empty()) {
        const CriticalGraph& G = model->graph();
        const auto [center, half] = default_window(G.p, c.window);
        SvgCanvas canvas(f.out(center), half);
        if (c.orthogonal) draw_orthogonal(canvas, trace_orthogonal_arcs(G.p, G.rules), f);
        draw_graph(canvas, G, f);
        static const char* colors[] = {"#000000", "#d35400", "#8e44ad", "#16a085"};
        canvas.legend(0, "A = " + fmt(a, 6), "#000", false, false);
        canvas.legend(1, "critical trajectories", "#1f4e79", false, false);
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const char* col = colors[i % 4];
            for (cplx z : reps[i].zeros) canvas.dot(z, 2.2, col, "n = " + std::to_string(reps[i].n));
            canvas.legend(int(i) + 2, "zeros, n = " + std::to_string(reps[i].n), col, false, true);
        }
        write_file(c.svg, canvas.str());
    }
    return kOk;
}

int cmd_measure(const Config& c, std::ostream& out) {
    if (c.nodes < 8) throw Error(ErrorCode::Config, "--nodes must be at least 8");
    Frame f;
    const auto m = model_for(c.a, f);
    const EquilibriumMeasure mu = equilibrium_measure(m->engine().gamma_map_ptr(), c.nodes);
    const EquilibriumReport rep = check_equilibrium(m->param(), mu, &m->sigma(), m->ell().real());
    out << "A = " << fmt(parse_complex(c.a)) << ", nodes " << c.nodes << "\n";
    out << "mass " << std::setprecision(16) << mu.mass << ", ell " << m->ell().real() << "\n";
    std::vector<cplx> moments;
    for (int k = 0; k <= 3; ++k) {
        moments.push_back(f.out(moment(mu, k)));
        out << "m" << k << " = " << fmt(moments.back(), 14) << "\n";
    }
    out << "V + psi on gamma: mean " << fmt(rep.ell_eq, 14) << ", stdev " << fmt(rep.stdev) << "\n";
    out << "min gap on Sigma " << fmt(rep.min_sigma_gap) << ", S-property mismatch " << fmt(rep.s_mismatch) << "\n";
    out << "equilibrium conditions: " << (rep.ok() ? "hold" : "violated") << "\n";
    for (const std::string& v : rep.violations) out << "  " << v << "\n";

    json j{{"a", jc(parse_complex(c.a))},
           {"nodes", c.nodes},
           {"mass", mu.mass},
           {"ell", m->ell().real()},
           {"moments", json::array()},
           {"stdev", rep.stdev},
           {"min_sigma_gap", rep.min_sigma_gap},
           {"s_mismatch", rep.s_mismatch},
           {"ok", rep.ok()}};
    for (cplx z : moments) j["moments"].push_back(jc(z));
    if (c.oracle > 0) {
        const DiscreteMeasure nu = energy_minimize_oracle(m->param(), m->sigma(), c.oracle);
        double worst = 0;
        for (int k = 0; k <= 3; ++k)
            worst = std::max(worst, std::abs(f.out(moment(nu, k)) - moments[k]) / std::max(1.0, std::abs(moments[k])));
        out << "oracle m = " << c.oracle << ": " << nu.iterations << " iterations, moment error " << fmt(worst)
            << ", weight off gamma " << fmt(weight_off_gamma(nu)) << "\n";
        j["oracle"] = {{"m", c.oracle}, {"moment_error", worst}, {"weight_off_gamma", weight_off_gamma(nu)}};
    }
    if (!c.csv.empty()) {
        std::ostringstream s;
        s << "t,u,re_z,im_z,density,weight\n" << std::setprecision(17);
        for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
            const cplx z = f.out(mu.nodes[i]);
            s << mu.t[i] << ',' << mu.u[i] << ',' << z.real() << ',' << z.imag() << ',' << mu.density[i] << ','
              << mu.weights[i] << '\n';
        }
        write_file(c.csv, s.str());
    }
    if (!c.json_path.empty()) emit_json(c.json_path, j, out);
    return c.check && !rep.ok() ? kCheckFailure : kOk;
}

int cmd_gfun(const Config& c, std::ostream& out) {
    if (c.zs.empty()) throw Error(ErrorCode::Config, "gfun needs at least one --z");
    static const std::map<std::string, std::optional<PhiVariant>> variants{
        {"g", std::nullopt},
        {"phi", PhiVariant::Phi},
        {"phi-tilde", PhiVariant::PhiTilde},
        {"phi-hat", PhiVariant::PhiHat},
        {"varphi", PhiVariant::VarPhi}};
    const auto v = variants.find(c.variant);
    if (v == variants.end()) throw Error(ErrorCode::Config, "unknown variant " + c.variant);
    Frame f;
    const auto m = model_for(c.a, f);
    std::ostringstream s;
    s << "re_z,im_z,face,re_value,im_value\n" << std::setprecision(17);
    json rows = json::array();
    for (const std::string& text : c.zs) {
        const cplx z = parse_complex(text), zu = f.up(z);
        cplx val;
        if (v->second)
            val = m->engine().eval(zu, *v->second).value;
        else
            val = g_eval(m->engine(), m->ell(), zu).log_value;
        val = f.out(val);
        const char* face = face_name(m->graph().face_of(zu));
        s << z.real() << ',' << z.imag() << ',' << face << ',' << val.real() << ',' << val.imag() << '\n';
        rows.push_back({{"z", jc(z)}, {"face", face}, {"value", jc(val)}});
    }
    if (c.csv.empty())
        out << s.str();
    else
        write_file(c.csv, s.str());
    if (!c.json_path.empty())
        emit_json(c.json_path, json{{"a", jc(parse_complex(c.a))}, {"variant", c.variant}, {"points", rows}}, out);
    return kOk;
}

// --alpha selects L_n^(alpha)(z); otherwise p_n(z) = L_n^(n A)(n z)
struct PolySpec {
    bool rescaled = false;
    cplx alpha, a;
};

PolySpec poly_spec(const Config& c, bool a_given) {
    if (c.ns.size() != 1 || c.ns[0] < 0) throw Error(ErrorCode::Config, "give one degree --n >= 0");
    if (!c.alpha.empty() && a_given) throw Error(ErrorCode::Config, "--alpha and --a exclude each other");
    if (c.digits != 0 && c.digits < 15) throw Error(ErrorCode::Config, "--digits must be at least 15");
    PolySpec p;
    if (!c.alpha.empty()) {
        p.alpha = parse_complex(c.alpha);
    } else {
        p.rescaled = true;
        p.a = parse_complex(c.a);
        p.alpha = double(c.ns[0]) * p.a;
    }
    return p;
}

int cmd_lag_eval(const Config& c, bool a_given, std::ostream& out) {
    const PolySpec ps = poly_spec(c, a_given);
    if (c.zs.empty()) throw Error(ErrorCode::Config, "lag-eval needs at least one --z");
    if (c.monic && !ps.rescaled) throw Error(ErrorCode::Config, "--monic applies to the rescaled polynomial");
    const int n = c.ns[0];
    json rows = json::array();
    out << (ps.rescaled ? "p_n(z) = L_n^(nA)(nz)" : "L_n^(alpha)(z)") << ", n = " << n << ", alpha = " << fmt(ps.alpha)
        << (c.monic ? ", monic" : "") << "\n";
    for (const std::string& text : c.zs) {
        const cplx z = parse_complex(text);
        EvalInfo info;
        LogComplex v = laguerre_eval({n, ps.alpha, c.digits}, ps.rescaled ? double(n) * z : z, &info);
        if (c.monic) v = v / leading_coefficient(n);
        out << "z = " << fmt(z) << ": ";
        json row{{"z", jc(z)}, {"digits", info.digits}, {"mismatch", info.mismatch},
                 {"cancellation", info.cancellation}};
        if (v.zero_flag) {
            out << "0";
            row["value"] = jc(0.0);
        } else {
            out << "log|value| " << fmt(v.log_abs(), 15) << ", arg " << fmt(v.arg(), 15);
            row["log_abs"] = v.log_abs();
            row["arg"] = v.arg();
            if (v.log_abs() < 700) {
                out << ", value " << fmt(v.value(), 15);
                row["value"] = jc(v.value());
            }
        }
        out << " (" << info.digits << " digits, mismatch " << fmt(info.mismatch, 3) << ")\n";
        rows.push_back(row);
    }
    if (!c.json_path.empty())
        emit_json(c.json_path, json{{"n", n}, {"alpha", jc(ps.alpha)}, {"rescaled", ps.rescaled}, {"points", rows}},
                  out);
    return kOk;
}

int cmd_lag_zeros(const Config& c, bool a_given, std::ostream& out) {
    const PolySpec ps = poly_spec(c, a_given);
    const int n = c.ns[0];
    const ZeroSet zs = ps.rescaled ? rescaled_zeros(n, ps.a, c.digits) : zeros({n, ps.alpha, c.digits});
    std::ostringstream s;
    s << "re_z,im_z,log10_residual\n" << std::setprecision(17);
    for (std::size_t i = 0; i < zs.roots.size(); ++i)
        s << zs.roots[i].real() << ',' << zs.roots[i].imag() << ',' << zs.residuals[i] << '\n';
    out << "n = " << n << ", alpha = " << fmt(ps.alpha) << ": " << zs.roots.size() << " zeros, " << zs.iterations
        << " iterations at " << zs.digits << " digits";
    if (zs.zeros_at_origin) out << ", " << zs.zeros_at_origin << " at the origin";
    out << "\n";
    if (c.csv.empty())
        out << s.str();
    else
        write_file(c.csv, s.str());
    if (!c.json_path.empty()) {
        json j{{"n", n}, {"alpha", jc(ps.alpha)}, {"rescaled", ps.rescaled}, {"iterations", zs.iterations},
               {"digits", zs.digits}, {"zeros", json::array()}};
        for (cplx z : zs.roots) j["zeros"].push_back(jc(z));
        emit_json(c.json_path, j, out);
    }
    return kOk;
}

int cmd_ortho(const Config& c, std::ostream& out) {
    const int n = c.ns.empty() ? 8 : c.ns[0];
    if (c.ns.size() > 1 || n < 1) throw Error(ErrorCode::Config, "give one degree --n >= 1");
    if (!(c.tol > 0)) throw Error(ErrorCode::Config, "--tol must be positive");
    Frame f;
    const auto m = model_for(c.a, f);
    // integrals are evaluated for the parameter with Im A > 0
    const cplx a_up = f.up(parse_complex(c.a)), alpha = double(n) * a_up;
    std::vector<int> ks = c.ks;
    if (ks.empty())
        for (int k = 0; k <= n; ++k) ks.push_back(k);
    const OrthogonalityResult top = orthogonality_integral(n, n, alpha, m->sigma());
    const LogComplex closed = orthogonality_closed_form(n, alpha);
    const double closed_err = relative_difference(top.value, closed);
    bool ok = closed_err < c.tol;
    json j{{"a", jc(parse_complex(c.a))}, {"n", n}, {"closed_form_error", closed_err}, {"integrals", json::array()}};
    out << "n = " << n << ", alpha = " << fmt(alpha) << (f.mirror ? " (mirrored parameter)" : "") << "\n";
    out << "I_n: log|I_n| " << fmt(top.value.log_abs(), 12) << ", relative error to the closed form "
        << fmt(closed_err, 3) << "\n";
    for (int k : ks) {
        if (k < 0) throw Error(ErrorCode::Config, "k must be nonnegative");
        if (k == n) continue;
        const OrthogonalityResult r = orthogonality_integral(n, k, alpha, m->sigma());
        const double rel = std::exp(r.value.log_abs() - top.value.log_abs());
        const bool pass = k > n || rel < c.tol;
        ok = ok && pass;
        out << "k = " << k << ": |I_k / I_n| = " << fmt(rel, 3) << (pass ? "" : "  FAIL") << "\n";
        j["integrals"].push_back({{"k", k}, {"relative", rel}});
    }
    j["ok"] = ok;
    if (!c.json_path.empty()) emit_json(c.json_path, j, out);
    out << (ok ? "orthogonality holds" : "orthogonality check failed") << "\n";
    return ok ? kOk : kCheckFailure;
}

std::vector<cplx> compare_grid(const Config& c, const Parameter& p, const Frame& f) {
    double x0, x1, y0, y1;
    int nx, ny;
    if (!c.grid.empty()) {
        std::vector<double> v;
        std::stringstream ss(c.grid);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                v.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw Error(ErrorCode::Config, "bad --grid entry '" + item + "'");
            }
        }
        if (v.size() != 6 || v[4] < 1 || v[5] < 1 || !(v[1] >= v[0]) || !(v[3] >= v[2]))
            throw Error(ErrorCode::Config, "--grid wants x0,x1,y0,y1,nx,ny");
        x0 = v[0], x1 = v[1], y0 = v[2], y1 = v[3], nx = int(v[4]), ny = int(v[5]);
    } else {
        const auto [center, half] = default_window(p, 0);
        const cplx cc = f.out(center);
        x0 = cc.real() - half, x1 = cc.real() + half, y0 = cc.imag() - half, y1 = cc.imag() + half;
        nx = ny = 21;
    }
    std::vector<cplx> g;
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < ny; ++k)
            g.emplace_back(nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1), ny == 1 ? y0 : y0 + (y1 - y0) * k / (ny - 1));
    return g;
}

int cmd_asymp_compare(const Config& c, std::ostream& out) {
    if (!(c.band_width > 0) || !(c.buffer >= 0)) throw Error(ErrorCode::Config, "band width and buffer must be positive");
    Frame f;
    const auto m = model_for(c.a, f);
    const cplx a = parse_complex(c.a);
    std::vector<int> ns = c.ns.empty() ? std::vector<int>{20, 40, 80} : c.ns;
    for (int n : ns)
        if (n < 1) throw Error(ErrorCode::Config, "degrees must be positive");
    const std::vector<cplx> grid = compare_grid(c, m->param(), f);

    std::ostringstream s;
    s << "n,re_z,im_z,regime,log10_rel_error\n" << std::setprecision(10);
    json j{{"a", jc(a)}, {"ns", ns}, {"band_width", c.band_width}, {"buffer", c.buffer}, {"tables", json::array()}};
    std::map<Regime, std::vector<double>> medians;
    for (int n : ns) {
        const CompareTable t = compare(n, a, grid, c.band_width, c.buffer);
        for (const ComparePoint& pt : t.points)
            s << n << ',' << pt.z.real() << ',' << pt.z.imag() << ',' << (pt.regime ? regime_name(*pt.regime) : "skipped")
              << ',' << (pt.regime ? std::log10(std::max(pt.rel_error, 1e-300)) : NAN) << '\n';
        json tj{{"n", n}, {"regimes", json::array()}};
        for (const RegimeStats& st : t.stats) {
            out << "n = " << std::setw(4) << n << "  " << std::left << std::setw(10) << regime_name(st.regime)
                << std::right << " points " << std::setw(4) << st.count << "  max " << fmt(st.max, 3) << "  median "
                << fmt(st.median, 3) << "\n";
            tj["regimes"].push_back(
                {{"regime", regime_name(st.regime)}, {"count", st.count}, {"max", st.max}, {"median", st.median}});
            medians[st.regime].push_back(st.median);
        }
        j["tables"].push_back(tj);
    }
    json fits = json::object();
    if (ns.size() >= 2)
        for (const auto& [reg, meds] : medians) {
            if (meds.size() != ns.size()) continue;
            const DecayFit fit = fit_decay(ns, meds);
            out << "decay exponent of the median error, " << regime_name(reg) << ": " << fmt(fit.exponent, 4) << "\n";
            fits[regime_name(reg)] = {{"exponent", fit.exponent}, {"constant", fit.constant}};
        }
    j["decay_fits"] = fits;
    if (!c.csv.empty()) write_file(c.csv, s.str());
    if (!c.json_path.empty()) emit_json(c.json_path, j, out);
    return kOk;
}

int cmd_verify(const Config& c, const std::vector<int>& only, std::ostream& out) {
    c.tolerances.validate();
    VerifyOptions opt;
    opt.a = parse_complex(c.a);
    opt.tol = c.tolerances;
    opt.enforce_budget = !c.no_budget;
    parameter_for_graph(c.a);
    std::vector<int> ids = !only.empty() ? only : c.quick ? quick_checks() : all_checks();
    json j{{"a", jc(opt.a)}, {"quick", c.quick}, {"checks", json::array()}};
    bool ok = true;
    for (int id : ids) {
        const CheckResult r = run_check(id, opt);
        ok = ok && r.pass;
        out << (r.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << r.id << "] " << r.name << " (" << fmt(r.seconds, 3)
            << " s): " << r.detail << "\n";
        json cj{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds}, {"budget", r.budget},
                {"detail", r.detail}};
        for (const auto& [k, v] : r.values) cj["values"][k] = v;
        j["checks"].push_back(cj);
    }
    j["pass"] = ok;
    if (!c.json_path.empty()) emit_json(c.json_path, j, out);
    out << (ok ? "all checks passed" : "some checks failed") << "\n";
    return ok ? kOk : kCheckFailure;
}

void check_environment() {
    if (const char* env = std::getenv("STOKESLAB_PRECISION")) {
        char* end = nullptr;
        const long d = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || d < 15 || d > 10000)
            throw Error(ErrorCode::Config, std::string("STOKESLAB_PRECISION must be an integer >= 15, got '") + env + "'");
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Critical graphs, equilibrium measures and Laguerre asymptotics for complex varying parameters",
                 "stokeslab"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "TOML file with option values; unknown keys are rejected");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1, 1);
    Config c;
    std::vector<int> only;

    auto add_a = [&](CLI::App* s) {
        return s->add_option("--a", c.a, "complex parameter A, e.g. -3+2i (use --a=... for a leading minus)")
            ->capture_default_str();
    };
    auto add_outputs = [&](CLI::App* s, bool csv, bool js, bool svg) {
        if (csv) s->add_option("--csv", c.csv, "CSV output path");
        if (js) s->add_option("--json", c.json_path, "JSON output path, - for stdout");
        if (svg) s->add_option("--svg", c.svg, "SVG output path");
    };

    auto* graph = app.add_subcommand("graph", "trace the critical graph");
    add_a(graph);
    add_outputs(graph, true, true, true);
    graph->add_flag("--orthogonal", c.orthogonal, "also trace the orthogonal critical arcs");
    graph->add_option("--capture", c.capture, "capture radius at the zeros");
    graph->add_option("--h-max", c.h_max, "largest step");
    graph->add_option("--max-winding", c.max_winding, "winding cap for spirals into the origin")->capture_default_str();
    graph->add_option("--window", c.window, "half width of the SVG window");

    auto* fig = app.add_subcommand("figure1", "zeros of p_n against gamma");
    add_a(fig);
    fig->add_option("--n", c.ns, "degrees, comma separated (default 30)")->delimiter(',');
    add_outputs(fig, true, true, true);
    fig->add_flag("--orthogonal", c.orthogonal, "overlay the orthogonal critical arcs");
    fig->add_option("--window", c.window, "half width of the SVG window");

    auto* meas = app.add_subcommand("measure", "equilibrium measure on gamma");
    add_a(meas);
    meas->add_option("--nodes", c.nodes, "quadrature nodes")->capture_default_str();
    meas->add_option("--oracle", c.oracle, "also run the energy minimization with this many nodes");
    meas->add_flag("--check", c.check, "exit 1 when the equilibrium conditions fail");
    add_outputs(meas, true, true, false);

    auto* gf = app.add_subcommand("gfun", "g-function and the phi branches");
    add_a(gf);
    gf->add_option("--z", c.zs, "evaluation points")->required()->delimiter(';');
    gf->add_option("--variant", c.variant, "g, phi, phi-tilde, phi-hat or varphi")->capture_default_str();
    add_outputs(gf, true, true, false);

    auto* le = app.add_subcommand("lag-eval", "evaluate a Laguerre polynomial");
    auto* le_a = add_a(le);
    le->add_option("--alpha", c.alpha, "parameter of L_n^(alpha)(z); without it p_n(z) = L_n^(nA)(nz)");
    le->add_option("--n", c.ns, "degree")->required()->expected(1);
    le->add_option("--z", c.zs, "evaluation points")->required()->delimiter(';');
    le->add_option("--digits", c.digits, "starting precision in decimal digits");
    le->add_flag("--monic", c.monic, "monic normalization of p_n");
    add_outputs(le, false, true, false);

    auto* lz = app.add_subcommand("lag-zeros", "zeros of a Laguerre polynomial");
    auto* lz_a = add_a(lz);
    lz->add_option("--alpha", c.alpha, "parameter of L_n^(alpha); without it the zeros of p_n");
    lz->add_option("--n", c.ns, "degree")->required()->expected(1);
    lz->add_option("--digits", c.digits, "starting precision in decimal digits");
    add_outputs(lz, true, true, false);

    auto* ortho = app.add_subcommand("ortho-test", "non-hermitian orthogonality on the scaled contour");
    add_a(ortho);
    ortho->add_option("--n", c.ns, "degree (default 8)")->expected(1);
    ortho->add_option("--k", c.ks, "powers to test (default 0..n)")->delimiter(',');
    ortho->add_option("--tol", c.tol, "relative tolerance")->capture_default_str();
    add_outputs(ortho, false, true, false);

    auto* ac = app.add_subcommand("asymp-compare", "strong asymptotics against exact values on a grid");
    add_a(ac);
    ac->add_option("--n", c.ns, "degrees (default 20,40,80)")->delimiter(',');
    ac->add_option("--grid", c.grid, "x0,x1,y0,y1,nx,ny");
    ac->add_option("--band-width", c.band_width, "distance from gamma where the band formulas apply")
        ->capture_default_str();
    ac->add_option("--buffer", c.buffer, "skip points this close to a regime boundary")->capture_default_str();
    add_outputs(ac, true, true, false);

    auto* ver = app.add_subcommand("verify", "run the verification suite");
    add_a(ver);
    ver->add_flag("--quick", c.quick, "fast subset");
    ver->add_option("--only", only, "check ids, comma separated")->delimiter(',');
    ver->add_flag("--no-budget", c.no_budget, "do not fail checks that exceed their time budget");
    add_outputs(ver, false, true, false);
    Tolerances& t = c.tolerances;
    const std::pair<const char*, double*> tols[] = {
        {"--tol-period", &t.period},         {"--tol-mass", &t.mass},
        {"--tol-stdev", &t.stdev},           {"--tol-sigma-gap", &t.sigma_gap},
        {"--tol-s-mismatch", &t.s_mismatch}, {"--tol-oracle-moment", &t.oracle_moment},
        {"--tol-oracle-off-gamma", &t.oracle_off_gamma}, {"--tol-orthogonality", &t.orthogonality},
        {"--tol-moment-ratio", &t.moment_ratio}, {"--tol-decay-low", &t.decay_low},
        {"--tol-decay-high", &t.decay_high}, {"--tol-airy", &t.airy},
        {"--tol-strip", &t.strip},           {"--tol-figure-distance", &t.figure_distance}};
    for (const auto& [name, ptr] : tols) ver->add_option(name, *ptr, "tolerance override")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        check_environment();
        if (graph->parsed()) return cmd_graph(c, out);
        if (fig->parsed()) return cmd_figure1(c, out);
        if (meas->parsed()) return cmd_measure(c, out);
        if (gf->parsed()) return cmd_gfun(c, out);
        if (le->parsed()) return cmd_lag_eval(c, le_a->count() > 0, out);
        if (lz->parsed()) return cmd_lag_zeros(c, lz_a->count() > 0, out);
        if (ortho->parsed()) return cmd_ortho(c, out);
        if (ac->parsed()) return cmd_asymp_compare(c, out);
        if (ver->parsed()) return cmd_verify(c, only, out);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateParameter) {
            err << e.what() << "\n";
            return kConfigError;
        }
        if (e.code() == ErrorCode::Config) {
            err << "config error: " << e.what() << "\n";
            return kConfigError;
        }
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kConfigError;
}

}  // namespace stokeslab::cli
