// Command-line front end: parses configs, runs the symmetrization pipelines,
// writes reports and CSV tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "aniso/calculus.hpp"
#include "aniso/convex_geometry.hpp"
#include "aniso/fixtures.hpp"
#include "aniso/grid.hpp"
#include "aniso/rearrangement.hpp"
#include "aniso/verify.hpp"
#include "aniso/young.hpp"

using namespace aniso;

namespace {

struct Options {
    std::string command;
    std::string u_spec, phi_spec, body_spec, K_spec, L_spec, A_spec, b_spec = "linear:1";
    std::string out_dir = "out";
    std::string config_path;
    int res = 256;
    int young_res = 256;
    double young_halfwidth = 0.0;
    std::vector<double> box;  // x0 x1 y0 y1
    int levels = 48;
    double band_dt = 0.0;
    std::uint64_t seed = 1;
    double a = 1.0;
    std::vector<double> tvals{0.0, 1.0, 1.0};
    std::vector<double> x0{0.0, 0.0};
    bool then_verify = false;
    bool no_refine = false;
    bool with_diag = false;
    bool oracle_too = false;
    bool triple = false;
    std::string mode = "smooth";
};

Grid trial_grid(const Options& o) {
    if (o.box.size() == 4) return make_grid2(o.box[0], o.box[1], o.box[2], o.box[3], o.res, o.res);
    if (!o.box.empty()) throw Error("config", "--box needs 4 numbers: x0 x1 y0 y1");
    return default_trial_grid(o.res);
}

void check_res(const Options& o) {
    if (o.res < 32 || o.young_res < 32)
        throw Error("config", "resolution must be at least 32 per axis");
}

void check_margin(const GridFunction& u) {
    const Grid& g = u.grid;
    double e = essinf(u);
    double range = *std::max_element(u.v.begin(), u.v.end()) - e;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j) {
            bool rim3 = i < 3 || i >= g.nodes(0) - 3 || j < 3 || j >= g.nodes(1) - 3;
            if (rim3 && std::fabs(u.at(i, j) - e) > 1e-9 * std::max(range, 1.0))
                throw Error("config", "support must keep a 3-cell margin inside the box");
        }
}

Profile parse_b(const std::string& spec) {
    if (spec.rfind("linear:", 0) == 0) {
        double T = std::stod(spec.substr(7));
        if (T <= 0) throw Error("config", "linear profile needs positive height");
        Profile b;
        b.nonincreasing = true;
        b.dup_take_last = true;
        b.x = {0.0, T};
        b.y = {1.0, 0.0};
        return b;
    }
    if (spec.rfind("csv:", 0) == 0) return read_profile_csv(spec.substr(4));
    throw Error("config", "unknown level-radius profile: " + spec);
}

void echo_config(Report& r, const Options& o) {
    r.config_echo = {{"command", o.command},   {"u", o.u_spec},
                     {"phi", o.phi_spec},      {"K", o.K_spec},
                     {"L", o.L_spec},          {"A", o.A_spec},
                     {"res", std::to_string(o.res)},
                     {"young_res", std::to_string(o.young_res)},
                     {"levels", std::to_string(o.levels)},
                     {"seed", std::to_string(o.seed)},
                     {"mode", o.mode}};
}

void write_young_csv(const std::string& path, const YoungND& s) {
    GridFunction gf;
    gf.grid = s.grid;
    gf.v = s.values;
    write_grid_csv(path, gf);
}

// user-supplied tables are convexified before use; the correction is reported
YoungND load_phi(const Options& o) {
    YoungND phi = parse_young(o.phi_spec);
    if (phi.kind == YoungND::Kind::Sampled) {
        auto [cc, dev] = convexify(phi);
        if (dev > 0)
            std::cout << "convexified input table, largest correction " << fmt_g17(dev) << "\n";
        return cc;
    }
    return phi;
}

VerifyConfig vcfg(const Options& o) {
    VerifyConfig c;
    c.young_res = o.young_res;
    c.young_halfwidth = o.young_halfwidth;
    c.levels = o.levels;
    c.band_dt = o.band_dt;
    c.refine = !o.no_refine;
    c.diagnostics = o.with_diag;
    c.seed = o.seed;
    return c;
}

int exit_code_for(const Report& r) { return r.verdict == "violation" ? 2 : 0; }

int run_verify(const Options& o, const GridFunction& u, const YoungND& phi,
               const ConvexBody& K) {
    Report r = verify_inequality(u, phi, K, vcfg(o));
    Options oc = o;
    echo_config(r, oc);
    write_report(o.out_dir, r);
    write_grid_csv(o.out_dir + "/u.csv", u);
    write_grid_csv(o.out_dir + "/uK.csv", symmetral(u, K));
    std::cout << "verdict: " << r.verdict << "  lhs=" << fmt_g17(r.lhs)
              << "  rhs=" << fmt_g17(r.rhs) << "  err=" << fmt_g17(r.err_estimate) << "\n";
    return exit_code_for(r);
}

void write_run_manifest(const Options& o) {
    JsonWriter w;
    w.begin_object();
    w.key("command");
    w.value(o.command);
    w.key("seed");
    w.value(static_cast<std::size_t>(o.seed));
    w.key("config");
    w.begin_object();
    for (auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
             {"u", o.u_spec},
             {"phi", o.phi_spec},
             {"body", o.body_spec},
             {"K", o.K_spec},
             {"L", o.L_spec},
             {"A", o.A_spec},
             {"b", o.b_spec},
             {"res", std::to_string(o.res)},
             {"young_res", std::to_string(o.young_res)},
             {"levels", std::to_string(o.levels)},
             {"mode", o.mode}}) {
        w.key(k);
        w.value(v);
    }
    w.end_object();
    w.key("input_hash");
    w.value(fnv1a_hex(o.u_spec + "|" + o.phi_spec + "|" + o.body_spec + "|" + o.K_spec + "|" +
                      o.L_spec + "|" + o.A_spec + "|" + std::to_string(o.seed)));
    w.end_object();
    std::ofstream out(o.out_dir + "/run.json");
    out << w.str() << "\n";
}

int dispatch(const Options& o) {
    std::filesystem::create_directories(o.out_dir);
    write_run_manifest(o);
    if (o.command == "conjugate") {
        check_res(o);
        YoungND phi = load_phi(o);
        YoungND s = sample(phi, preferred_grid(phi, o.young_res));
        Grid dual = auto_conjugate_grid(s);
        YoungND c = conjugate_fast(s, dual);
        write_young_csv(o.out_dir + "/phi.csv", s);
        write_young_csv(o.out_dir + "/conj.csv", c);
        if (o.oracle_too) {
            YoungND oc = conjugate_oracle(s, dual);
            write_young_csv(o.out_dir + "/conj_oracle.csv", oc);
            double worst = 0;
            for (std::size_t i = 0; i < c.values.size(); ++i)
                worst = std::max(worst, std::fabs(c.values[i] - oc.values[i]));
            std::cout << "max |fast - oracle| = " << fmt_g17(worst) << "\n";
        }
        return 0;
    }
    if (o.command == "symmetrize-body") {
        ConvexBody E = parse_body(o.body_spec);
        ConvexBody K = parse_body(o.K_spec);
        double c = std::pow(E.volume / K.volume, 1.0 / E.dim);
        ConvexBody EK = dilate_translate(K, c, {0, 0, 0});
        ConvexBody pol = polar(E);
        JsonWriter w;
        w.begin_object();
        w.key("body_volume");
        w.value(E.volume);
        w.key("K_volume");
        w.value(K.volume);
        w.key("dilation");
        w.value(c);
        w.key("symmetral_vertices");
        w.begin_array();
        for (const Vec& v : EK.vertices) {
            w.begin_array();
            w.value(v[0]);
            w.value(v[1]);
            w.end_array();
        }
        w.end_array();
        w.key("polar_vertices");
        w.begin_array();
        for (const Vec& v : pol.vertices) {
            w.begin_array();
            w.value(v[0]);
            w.value(v[1]);
            w.end_array();
        }
        w.end_array();
        w.end_object();
        std::ofstream out(o.out_dir + "/body.json");
        out << w.str() << "\n";
        return 0;
    }
    if (o.command == "symmetrize-fn") {
        check_res(o);
        YoungND phi = load_phi(o);
        ConvexBody K = parse_body(o.K_spec);
        if (o.triple) {
            TripleConfig tc;
            tc.res = o.young_res;
            tc.halfwidth = o.young_halfwidth;
            TripleSymmetral ts = triple_symmetral(phi, K, tc);
            write_young_csv(o.out_dir + "/conj.csv", ts.conj);
            write_young_csv(o.out_dir + "/conj_sym.csv", ts.sym_sampled);
            write_young_csv(o.out_dir + "/triple.csv", ts.triple);
            std::cout << "young-check: origin=" << fmt_g17(ts.check.origin_value)
                      << " convexity-defect=" << fmt_g17(ts.check.convexity_defect) << "\n";
        } else {
            YoungND s = sample(phi, preferred_grid(phi, o.young_res));
            YoungND sym = integrand_symmetral(s, K);
            write_young_csv(o.out_dir + "/phiK.csv", sample(sym, s.grid));
        }
        return 0;
    }
    if (o.command == "symmetrize-u") {
        check_res(o);
        GridFunction u = make_trial(o.u_spec, trial_grid(o), o.seed);
        check_margin(u);
        ConvexBody K = parse_body(o.K_spec);
        GridFunction uK = symmetral(u, K);
        write_grid_csv(o.out_dir + "/u.csv", u);
        write_grid_csv(o.out_dir + "/uK.csv", uK);
        write_profile_csv(o.out_dir + "/mu.csv", distribution(u));
        write_profile_csv(o.out_dir + "/ustar.csv",
                          decreasing_rearrangement(distribution(u)));
        return 0;
    }
    if (o.command == "verify") {
        check_res(o);
        GridFunction u = make_trial(o.u_spec, trial_grid(o), o.seed);
        check_margin(u);
        YoungND phi = load_phi(o);
        ConvexBody K = parse_body(o.K_spec);
        return run_verify(o, u, phi, K);
    }
    if (o.command == "gen-prop51") {
        check_res(o);
        ConvexBody L = parse_body(o.L_spec);
        Young1D A = parse_young1(o.A_spec);
        Profile b = parse_b(o.b_spec);
        Vec x0 = vec2(o.x0[0], o.x0[1]);
        PolarPair pp = generate_prop51(L, A, b, x0, trial_grid(o));
        write_grid_csv(o.out_dir + "/u.csv", pp.u);
        if (o.then_verify) {
            ConvexBody K = parse_body(o.K_spec);
            return run_verify(o, pp.u, pp.phi, K);
        }
        return 0;
    }
    if (o.command == "gen-prop52") {
        check_res(o);
        if (o.tvals.size() != 3) throw Error("config", "--t needs t1,t2,t3");
        YoungND phi = load_phi(o);
        Vec x0 = vec2(o.x0[0], o.x0[1]);
        Grid g = o.box.size() == 4 ? trial_grid(o)
                                   : suggest_cap_grid(phi, o.a, o.tvals[0], o.tvals[2], x0,
                                                      o.res, vcfg(o));
        GridFunction u = generate_prop52(phi, o.a, o.tvals[0], o.tvals[1], o.tvals[2], x0,
                                         g, vcfg(o));
        write_grid_csv(o.out_dir + "/u.csv", u);
        if (o.then_verify) {
            ConvexBody K = parse_body(o.K_spec);
            return run_verify(o, u, phi, K);
        }
        return 0;
    }
    if (o.command == "diagnose") {
        check_res(o);
        GridFunction u = make_trial(o.u_spec, trial_grid(o), o.seed);
        check_margin(u);
        YoungND phi = load_phi(o);
        ConvexBody K = parse_body(o.K_spec);
        Diagnostics d = extremality_diagnostics(u, phi, K, vcfg(o));
        std::ofstream out(o.out_dir + "/diagnostics.csv");
        out << "t,s_t,a_t,x_t0,x_t1,interior_volume,shape_mismatch,fenchel_u,fenchel_uK,"
               "flux_gap,qconvex,minimizer_spread\n";
        for (const DiagLevel& r : d.rows) {
            out << fmt_g17(r.t) << ',' << fmt_g17(r.s_t) << ',' << fmt_g17(r.a_t) << ','
                << fmt_g17(r.x_t[0]) << ',' << fmt_g17(r.x_t[1]) << ','
                << fmt_g17(r.interior_volume) << ',' << fmt_g17(r.shape_mismatch) << ','
                << fmt_g17(r.fenchel_u) << ',' << fmt_g17(r.fenchel_uK) << ','
                << fmt_g17(r.flux_gap) << ',' << fmt_g17(r.qconvex) << ','
                << fmt_g17(r.minimizer_spread) << "\n";
        }
        std::cout << "pass fractions: a=" << d.frac_pass_a << " b=" << d.frac_pass_b
                  << " c=" << d.frac_pass_c << " d=" << d.frac_pass_d << " e=" << d.frac_pass_e
                  << " qconvex=" << d.frac_quasiconvex << "\n";
        return 0;
    }
    if (o.command == "sandwich") {
        check_res(o);
        YoungND phi = load_phi(o);
        ConvexBody K = parse_body(o.K_spec);
        SandwichConstants sc = sandwich_constants(phi, K, vcfg(o));
        JsonWriter w;
        w.begin_object();
        w.key("c1");
        w.value(sc.c1);
        w.key("c2");
        w.value(sc.c2);
        w.end_object();
        std::ofstream out(o.out_dir + "/sandwich.json");
        out << w.str() << "\n";
        std::cout << "c1=" << fmt_g17(sc.c1) << " c2=" << fmt_g17(sc.c2) << "\n";
        return 0;
    }
    throw Error("config", "unknown command: " + o.command);
}

// JSON config file provides defaults; explicit flags override.
std::vector<std::string> merge_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
    }
    if (cfg_path.empty()) return args;
    std::ifstream in(cfg_path);
    if (!in) throw Error("io", "cannot read config file " + cfg_path);
    nlohmann::json j;
    in >> j;
    auto has_flag = [&](const std::string& name) {
        for (const auto& a : args)
            if (a == "--" + name || a.rfind("--" + name + "=", 0) == 0) return true;
        return false;
    };
    for (auto& [key, value] : j.items()) {
        if (has_flag(key)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_array()) {
            std::string csv;
            for (auto& e : value) {
                if (!csv.empty()) csv += ',';
                csv += e.dump();
            }
            args.push_back("--" + key + "=" + csv);
        } else if (value.is_string()) {
            args.push_back("--" + key + "=" + value.get<std::string>());
        } else {
            args.push_back("--" + key + "=" + value.dump());
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        CLI::App app{"anisotropic symmetrization toolkit"};
        app.require_subcommand(1);
        Options o;
        std::vector<CLI::App*> subs;
        for (const char* name : {"conjugate", "symmetrize-body", "symmetrize-fn", "symmetrize-u",
                                 "verify", "gen-prop51", "gen-prop52", "diagnose", "sandwich"}) {
            CLI::App* s = app.add_subcommand(name);
            s->add_option("--u", o.u_spec);
            s->add_option("--phi", o.phi_spec);
            s->add_option("--body", o.body_spec);
            s->add_option("--K", o.K_spec);
            s->add_option("--L", o.L_spec);
            s->add_option("--A", o.A_spec);
            s->add_option("--b", o.b_spec);
            s->add_option("--res", o.res);
            s->add_option("--young-res", o.young_res);
            s->add_option("--young-halfwidth", o.young_halfwidth);
            s->add_option("--box", o.box)->delimiter(',');
            s->add_option("--levels", o.levels);
            s->add_option("--band-dt", o.band_dt);
            s->add_option("--seed", o.seed);
            s->add_option("--a", o.a);
            s->add_option("--t", o.tvals)->delimiter(',');
            s->add_option("--x0", o.x0)->delimiter(',');
            s->add_option("--out", o.out_dir);
            s->add_option("--config", o.config_path);
            s->add_option("--mode", o.mode);
            s->add_flag("--then-verify", o.then_verify);
            s->add_flag("--no-refine", o.no_refine);
            s->add_flag("--diagnose", o.with_diag);
            s->add_flag("--oracle", o.oracle_too);
            s->add_flag("--triple", o.triple);
            subs.push_back(s);
        }
        std::vector<std::string> args = merge_config(argc, argv);
        // CLI11 parses reversed argv
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        for (CLI::App* s : subs)
            if (s->parsed()) o.command = s->get_name();
        return dispatch(o);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << "error: config: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
