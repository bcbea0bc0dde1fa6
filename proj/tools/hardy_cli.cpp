#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hardy/atoms.hpp"
#include "hardy/config.hpp"
#include "hardy/coverings.hpp"
#include "hardy/kernels.hpp"
#include "hardy/maximal.hpp"
#include "hardy/specfun.hpp"
#include "hardy/verifier.hpp"

namespace fs = std::filesystem;
using namespace hardy;

namespace {

enum Exit { ok = 0, condition_failure = 1, numerical = 2 };

struct Global {
    std::string config_path;
    std::string out = ".";
    uint64_t seed = 1;
    int threads = 0;
};

struct Flags {
    std::string family, window;                 // covering
    std::string kernel, covering, conditions;   // verify / maximal / decompose overrides
    std::string function, input;                // decompose
};

std::string num(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

Config load(const Global& g) {
    Config c = g.config_path.empty() ? Config() : Config::load(g.config_path);
    return c;
}

int thread_count(const Global& g) {
    if (g.threads > 0) return g.threads;
    if (const char* e = std::getenv("HARDY_THREADS")) {
        const int n = std::atoi(e);
        if (n > 0) return n;
    }
    return 1;
}

std::ofstream open_out(const Global& g, const std::string& name) {
    fs::create_directories(g.out);
    std::ofstream f(fs::path(g.out) / name, std::ios::binary);
    if (!f) throw config_error("cannot write " + (fs::path(g.out) / name).string());
    return f;
}

void header(std::ostream& os, const Config& c, const Global& g, const std::string& command) {
    os << "# command = " << command << "\n";
    os << "# seed = " << g.seed << "\n";
    c.echo(os, "# ");
}

template <class F>
void parallel_for(size_t n, int threads, F&& f) {
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < n; i = next++) f(i);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

AdmissibleCovering covering_from(Config& cfg, const Flags& fl) {
    const double kappa = cfg.get("covering.kappa", 1.05);
    if (!(kappa > 1.0)) throw config_error("covering.kappa must exceed 1");
    std::string spec = fl.covering;
    if (spec.empty() && !fl.family.empty())
        spec = covering_shorthand(fl.family, fl.window.empty() ? "-3..3" : fl.window);
    if (!spec.empty()) cfg.put("covering.spec", spec);
    return build_covering(cfg.require("covering.spec"), kappa);
}

KernelPtr kernel_from(Config& cfg, const Flags& fl) {
    if (!fl.kernel.empty()) cfg.put("kernel.spec", fl.kernel);
    return build_kernel(cfg.require("kernel.spec"));
}

// ---------------------------------------------------------------- covering

int cmd_covering(const Global& g, const Flags& fl) {
    Config cfg = load(g);
    const auto c = covering_from(cfg, fl);
    const int samples = cfg.get("covering.samples", 4096);
    const std::string axes = cfg.get("covering.svg_axes", std::string("auto"));
    const auto rep = validate_covering(c, static_cast<size_t>(samples));
    {
        auto f = open_out(g, "covering.csv");
        header(f, cfg, g, "covering");
        write_covering_csv(f, c);
    }
    {
        auto f = open_out(g, "covering_report.txt");
        f << "[covering]\n";
        f << "id = " << c.id << "\n";
        f << "cuboids = " << rep.cuboids << "\n";
        f << "C1 = " << num(rep.C1) << "\n";
        f << "C2 = " << num(rep.C2) << "\n";
        f << "max_overlap = " << rep.max_overlap << "\n";
        f << "overlap_bound = " << rep.overlap_bound << "\n";
        f << "property1 = " << rep.property1 << "\nproperty2 = " << rep.property2 << "\nproperty3 = " << rep.property3
          << "\nproperty4 = " << rep.property4 << "\nneighbours = " << rep.neighbours << "\n";
        f << "pass = " << (rep.pass() ? "true" : "false") << "\n";
        for (const auto& v : rep.violations) f << "violation = " << v << "\n";
    }
    if (c.dim() == 2) {
        const Box w = c.window.clip(c.domain);
        bool log_axes = axes == "log";
        if (axes == "auto") log_axes = w.lo[0] > 0.0 && w.lo[1] > 0.0;
        auto f = open_out(g, "covering.svg");
        write_covering_svg(f, c, log_axes);
    }
    std::cout << c.id << ": " << c.size() << " cuboids, C1=" << rep.C1 << " C2=" << rep.C2
              << " overlap=" << rep.max_overlap << "/" << rep.overlap_bound << " -> " << (rep.pass() ? "pass" : "FAIL")
              << "\n";
    for (const auto& v : rep.violations) std::cout << "  violation: " << v << "\n";
    return rep.pass() ? ok : condition_failure;
}

// ---------------------------------------------------------------- verify

VerificationReport from_limits(const LimitReport& L) {
    VerificationReport r;
    r.condition = "limits";
    r.kernel_id = L.kernel_id;
    r.covering_id = "probes";
    r.has_target = true;
    r.target_met = L.pass();
    r.set("tolerance", L.tolerance);
    r.set("t_final", L.t_final);
    size_t i = 0;
    for (const auto& p : L.probes) {
        if (p.t != L.t_final) continue;
        CuboidEntry e;
        e.index = i++;
        e.q = Cuboid::interval(p.x - p.r, p.x + p.r);
        e.constant = std::max(std::abs(p.inner - 1.0), std::abs(p.outer));
        e.note = "inner=" + detail::fmt(p.inner) + " outer=" + detail::fmt(p.outer) + (p.interior ? "" : " boundary");
        r.per_cuboid.push_back(e);
    }
    r.finalize();
    return r;
}

VerificationReport from_envelope(const EnvelopeReport& E, const std::string& kid, double allowed) {
    VerificationReport r;
    r.condition = "envelope";
    r.kernel_id = kid;
    r.covering_id = "probes";
    r.set("alpha", E.alpha);
    r.set("c", E.c);
    r.set("probes", static_cast<double>(E.probes));
    r.set("max_violation", E.max_violation);
    r.set("fresh_violation", E.fresh_violation);
    r.has_target = true;
    r.target_met = E.fresh_violation <= allowed;
    CuboidEntry e;
    e.constant = E.C;
    e.error = std::max(0.0, E.fresh_violation - 1.0) * E.C;
    e.note = "branch_power=" + std::to_string(E.branch_power) + " branch_one=" + std::to_string(E.branch_one);
    r.per_cuboid.push_back(e);
    r.finalize();
    return r;
}

std::string file_stem(const std::string& condition) {
    std::string s;
    for (char ch : condition) s += std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' ? ch : '_';
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

int cmd_verify(const Global& g, const Flags& fl) {
    Config cfg = load(g);
    const KernelPtr k = kernel_from(cfg, fl);
    const auto c = covering_from(cfg, fl);
    if (c.dim() != k->dim()) throw config_error("kernel and covering dimensions differ");
    if (!fl.conditions.empty()) cfg.put("verify.conditions", fl.conditions);
    const auto conds = cfg.list("verify.conditions", "A1prime,A2prime");

    VerifyOptions o;
    o.y_random = cfg.get("verify.y_random", o.y_random);
    o.W = cfg.get("verify.W", o.W);
    o.ppd = cfg.get("verify.ppd", o.ppd);
    o.t_lo = cfg.get("verify.t_lo", o.t_lo);
    o.t_hi = cfg.get("verify.t_hi", o.t_hi);
    o.ratio = cfg.get("verify.ratio", o.ratio);
    o.max_h = cfg.get("verify.max_h", o.max_h);
    o.local_h = cfg.get("verify.local_h", o.local_h);
    o.budget = cfg.get("verify.budget", o.budget);
    o.nu_envelope = cfg.get("verify.nu_envelope", o.nu_envelope);
    o.gamma = cfg.get("verify.gamma", o.gamma);
    o.a4_samples = cfg.get("verify.a4_samples", o.a4_samples);
    o.threads = thread_count(g);
    for (const auto& s : cfg.list("verify.cuboids", "")) o.cuboids.push_back(static_cast<size_t>(std::stoul(s)));
    const double rho = cfg.get("verify.rho_target", 2.0);
    const double sigma = cfg.get("verify.sigma_target", 0.9);
    const double lim_tol = cfg.get("verify.limit_tolerance", 1e-2);
    const auto lim_x = cfg.list("verify.limit_x", "");
    const auto lim_r = cfg.list("verify.limit_r", "0.1,0.5");
    const int env_samples = cfg.get("verify.envelope_samples", 10000);
    const double env_allowed = cfg.get("verify.envelope_allowed", 2.0);

    auto schrodinger = [&]() -> const SchrodingerKernel& {
        if (k->kind() != KernelKind::schrodinger) throw config_error("Dprime and K need a schrodinger kernel");
        return static_cast<const SchrodingerKernel&>(*k);
    };

    std::vector<VerificationReport> reports;
    for (const auto& name : conds) {
        if (name == "A0") {
            for (auto& r : verify_A0(*k, c, o)) reports.push_back(std::move(r));
        } else if (name == "A0prime") {
            reports.push_back(verify_A0prime(*k, c, o));
        } else if (name == "A1prime") {
            reports.push_back(verify_A1prime(*k, c, o));
        } else if (name == "A2prime") {
            reports.push_back(verify_A2prime(*k, c, o));
        } else if (name == "A1") {
            for (auto& r : verify_A1(*k, c, o.gamma, o)) reports.push_back(std::move(r));
        } else if (name == "A2") {
            for (auto& r : verify_A2(*k, c, o.gamma, o)) reports.push_back(std::move(r));
        } else if (name == "a3") {
            reports.push_back(verify_a3(*k, c, o));
        } else if (name == "a4") {
            reports.push_back(verify_a4(*k, c, o));
        } else if (name == "Dprime") {
            reports.push_back(verify_schrodinger_D(schrodinger(), c, rho, o));
        } else if (name == "K") {
            reports.push_back(verify_schrodinger_K(schrodinger(), c, sigma, o));
        } else if (name == "limits") {
            if (k->dim() != 1) throw config_error("limits: one-dimensional kernels only");
            std::vector<double> xs, rs;
            for (const auto& s : lim_x) xs.push_back(std::stod(s));
            for (const auto& s : lim_r) rs.push_back(std::stod(s));
            if (xs.empty())
                for (size_t i = 0; i < c.size(); ++i) xs.push_back(c.cuboids[i].center[0]);
            reports.push_back(from_limits(verify_smalltime_limits(*k, xs, rs, lim_tol)));
        } else if (name == "envelope") {
            if (k->kind() != KernelKind::laguerre) throw config_error("envelope: needs a laguerre kernel");
            reports.push_back(from_envelope(
                verify_laguerre_envelope(static_cast<const LaguerreKernel&>(*k), static_cast<size_t>(env_samples)),
                k->id(), env_allowed));
        } else {
            throw config_error("unknown condition '" + name + "'");
        }
    }

    int code = ok;
    {
        auto csv = open_out(g, "verify.csv");
        header(csv, cfg, g, "verify");
        write_report_csv_header(csv);
        for (const auto& r : reports) write_report_csv(csv, r, false);
    }
    for (const auto& r : reports) {
        {
            auto f = open_out(g, file_stem(r.condition) + ".csv");
            header(f, cfg, g, "verify");
            write_report_csv(f, r);
        }
        {
            auto f = open_out(g, file_stem(r.condition) + ".txt");
            write_report_text(f, r);
        }
        // constants with a NaN sentinel (K with V = 0) hold trivially
        bool good = r.finite() || (r.condition == "K" && std::isnan(r.sup_constant) && !r.any_failed());
        bool budget = r.condition == "limits" || r.condition == "envelope" || r.condition == "K" ||
                      r.condition == "Dprime" || r.within_budget(o.budget);
        if (r.condition == "K" && std::isnan(r.sup_constant)) budget = true;
        const bool target = !r.has_target || r.target_met;
        std::string verdict = "pass";
        if (r.any_failed()) {
            verdict = "numerical failure";
            code = std::max<int>(code, numerical);
        } else if (!good || !budget || !target) {
            verdict = !good ? "not finite" : !target ? "target missed" : "error over budget";
            code = std::max<int>(code, condition_failure);
        }
        std::printf("%-18s sup=%-14.6g err=%-12.3g cuboids=%-4zu %s\n", r.condition.c_str(), r.sup_constant, r.sup_error,
                    r.per_cuboid.size(), verdict.c_str());
    }
    std::cout << "bounded over the probed window with the stated error; not a proof\n";
    return code;
}

// ---------------------------------------------------------------- maximal

uint64_t atom_seed(uint64_t seed, size_t j) {
    std::seed_seq s{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(j)};
    uint32_t v[2];
    s.generate(v, v + 2);
    return (static_cast<uint64_t>(v[0]) << 32) | v[1];
}

int cmd_maximal(const Global& g, const Flags& fl) {
    Config cfg = load(g);
    const KernelPtr k = kernel_from(cfg, fl);
    const auto c = covering_from(cfg, fl);
    if (k->dim() != 1 || c.dim() != 1) throw config_error("maximal: one-dimensional kernels and coverings only");
    const int n_atoms = cfg.get("maximal.atoms", 10);
    const int cells = cfg.get("maximal.cells", 64);
    const int local_every = cfg.get("maximal.local_every", 5);
    const std::string profile = cfg.get("maximal.classical", std::string("noise"));
    if (profile != "noise" && profile != "sign") throw config_error("maximal.classical must be noise or sign");
    MaximalOptions mo;
    mo.W = cfg.get("maximal.W", mo.W);
    mo.ppd = cfg.get("maximal.ppd", mo.ppd);
    mo.t_lo = cfg.get("maximal.t_lo", mo.t_lo);
    mo.t_hi = cfg.get("maximal.t_hi", mo.t_hi);
    mo.ratio = cfg.get("maximal.ratio", mo.ratio);
    mo.max_h = cfg.get("maximal.max_h", mo.max_h);
    if (n_atoms < 1 || cells < 2) throw config_error("maximal: atoms >= 1 and cells >= 2 required");

    struct Row {
        size_t cuboid;
        int j;
        AtomKind kind;
        MaximalResult r;
        bool failed = false;
        std::string note;
    };
    const size_t N = c.size() * static_cast<size_t>(n_atoms);
    std::vector<Row> rows(N);
    parallel_for(N, thread_count(g), [&](size_t id) {
        Row& row = rows[id];
        row.cuboid = id / n_atoms;
        row.j = static_cast<int>(id % n_atoms);
        const Cuboid& q = c.cuboids[row.cuboid];
        const bool local = local_every > 0 && row.j % local_every == 0;
        try {
            const uint64_t sd = atom_seed(g.seed, row.j);
            const Atom a = local             ? make_local_atom(q, c.domain)
                           : profile == "sign" ? random_sign_atom(q, c.domain, c.kappa, sd, cells)
                                               : random_classical_atom(q, c.domain, c.kappa, sd, cells);
            row.kind = a.kind;
            row.r = maximal_norm(*k, a, mo);
        } catch (const std::exception& e) {
            row.failed = true;
            row.note = e.what();
        }
    });

    auto csv = open_out(g, "maximal.csv");
    header(csv, cfg, g, "maximal");
    // value = window integral + extrapolated tail; an unbounded tail leaves the window integral alone
    csv << "cuboid_index,atom,kind,value,error,window_value,tail,tail_bounded,atom_l1\n";
    double best = 0.0, best_err = 0.0;
    bool failed = false, unbounded = false;
    for (const auto& row : rows) {
        if (row.failed) {
            failed = true;
            std::cerr << "cuboid " << row.cuboid << " atom " << row.j << ": " << row.note << "\n";
            continue;
        }
        const bool tb = row.r.tail_bounded && std::isfinite(row.r.value);
        const double v = tb ? row.r.value : row.r.window_value;
        csv << row.cuboid << "," << row.j << "," << to_string(row.kind) << "," << num(v) << ","
            << num(tb ? row.r.error : inf) << "," << num(row.r.window_value) << "," << num(row.r.tail) << ","
            << (tb ? 1 : 0) << "," << num(row.r.atom_l1) << "\n";
        if (!tb) unbounded = true;
        if (v > best) {
            best = v;
            best_err = tb ? row.r.error : inf;
        }
    }
    csv << "# max = " << num(best) << "\n";
    auto txt = open_out(g, "maximal.txt");
    txt << "[maximal]\nkernel = " << k->id() << "\ncovering = " << c.id << "\natoms = " << N << "\nmax = " << num(best)
        << "\nmax_error = " << num(best_err) << "\nfinite = " << (!unbounded && !failed ? "true" : "false")
        << "\nsemantics = bounded over the probed window with the stated error; not a proof\n";
    std::printf("max ||sup_t |T_t a| ||_1 = %.6g (+- %.2g) over %zu atoms%s\n", best, best_err, N,
                unbounded ? "; some tails unbounded, window integral shown" : "");
    if (failed) return numerical;
    return unbounded ? condition_failure : ok;
}

// ---------------------------------------------------------------- decompose

int cmd_decompose(const Global& g, const Flags& fl) {
    Config cfg = load(g);
    const auto c = covering_from(cfg, fl);
    const int depth = cfg.get("decompose.depth", 6);
    const int cells = cfg.get("decompose.cells", 256);
    std::string function = fl.function, input = fl.input;
    if (function.empty() && input.empty()) {
        if (cfg.has("decompose.input"))
            input = cfg.get("decompose.input", std::string());
        else
            function = cfg.get("decompose.function", std::string("bump(1.5,0.6)"));
    }
    const Box win = c.window.clip(c.domain);
    double scale = 1.0;
    for (int j = 0; j < win.dim(); ++j) scale = std::max({scale, std::abs(win.lo[j]), std::abs(win.hi[j])});
    const double tol = 1e-12 * scale;

    std::vector<std::pair<size_t, AtomicDecomposition>> pieces;
    if (!input.empty()) {
        std::ifstream is(input);
        if (!is) throw config_error("decompose: cannot read " + input);
        auto [a, coef] = read_atom(is);
        if (a.support.dim() != c.dim()) throw config_error("decompose: atom dimension differs from the covering");
        if (!win.contains_box(a.support, tol)) throw window_error("decompose: atom support " + detail::fmt_box(a.support) +
                                                                  " escapes the window " + detail::fmt_box(win));
        const auto rep = validate_atom(a, c.domain, c.kappa);
        if (!rep.pass) {
            std::cout << "input atom invalid: " << rep.message << "\n";
            return condition_failure;
        }
        AtomicDecomposition d;
        d.terms.push_back({coef, a, a.kind == AtomKind::local ? 0 : 1});
        pieces.emplace_back(0, std::move(d));
    } else {
        const SpecNode f = parse_spec(function);
        if (f.name != "bump") throw config_error("decompose: function must be bump(center, radius)");
        std::vector<double> z;
        {
            std::stringstream ss(f.arg(0).name);
            std::string tok;
            while (std::getline(ss, tok, ':')) z.push_back(std::stod(tok));
        }
        const double rad = f.arg(1).number();
        if (static_cast<int>(z.size()) != c.dim() || !(rad > 0.0)) throw config_error("decompose: bad bump arguments");
        Box sup{z, z};
        for (int j = 0; j < c.dim(); ++j) {
            sup.lo[j] -= rad;
            sup.hi[j] += rad;
        }
        if (!win.contains_box(sup, tol))
            throw window_error("decompose: bump support " + detail::fmt_box(sup) + " escapes the window " +
                               detail::fmt_box(win));
        auto bump = [&](const double* x) {
            double s = 0.0;
            for (int j = 0; j < c.dim(); ++j) s += (x[j] - z[j]) * (x[j] - z[j]);
            s /= rad * rad;
            return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
        };
        const auto pou = partition_of_unity(c);
        auto local = localize(bump, pou, cells);
        std::vector<AtomicDecomposition> decs(local.size());
        std::vector<bool> used(local.size());
        parallel_for(local.size(), thread_count(g), [&](size_t i) {
            if (local[i].fq.l1() == 0.0) return;
            used[i] = true;
            decs[i] = local_decompose(local[i].fq, c.cuboids[local[i].index], c.domain, c.kappa, depth);
        });
        for (size_t i = 0; i < local.size(); ++i)
            if (used[i]) pieces.emplace_back(local[i].index, std::move(decs[i]));
    }

    double lam = 0.0, resid = 0.0, recon = 0.0;
    size_t invalid = 0, terms = 0;
    auto csv = open_out(g, "decompose.csv");
    header(csv, cfg, g, "decompose");
    csv << "cuboid_index,terms,sum_abs_lambda,residual_norm,reconstruction_error,invalid_atoms\n";
    auto txt = open_out(g, "decomposition.txt");
    for (const auto& [i, d] : pieces) {
        size_t bad = 0;
        for (const auto& t : d.terms)
            if (!validate_atom(t.atom, c.domain, c.kappa).pass) ++bad;
        csv << i << "," << d.terms.size() << "," << num(d.sum_abs_lambda()) << "," << num(d.residual_norm) << ","
            << num(d.reconstruction_error) << "," << bad << "\n";
        txt << "[cuboid " << i << "]\n";
        write_decomposition(txt, d);
        lam += d.sum_abs_lambda();
        resid += d.residual_norm;
        recon += d.reconstruction_error;
        invalid += bad;
        terms += d.terms.size();
    }
    csv << "# sum_abs_lambda = " << num(lam) << "\n# residual_norm = " << num(resid)
        << "\n# reconstruction_error = " << num(recon) << "\n";
    std::printf("terms=%zu sum|lambda|=%.10g residual=%.3g reconstruction_error=%.3g invalid_atoms=%zu\n", terms, lam,
                resid, recon, invalid);
    return invalid ? condition_failure : ok;
}

// ---------------------------------------------------------------- subordinate-check

int cmd_subordinate_check(const Global& g, const Flags&) {
    Config cfg = load(g);
    const int probes = cfg.get("subordinate.probes", 1000);
    const int laplace = cfg.get("subordinate.laplace_probes", 20);
    const double tol_kernel = cfg.get("subordinate.tolerance", 1e-5);
    const double tol_laplace = cfg.get("subordinate.laplace_tolerance", 1e-4);
    const auto k = make_subordinate(make_heat(1), 0.5);

    std::mt19937_64 rng(g.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto csv = open_out(g, "subordinate_check.csv");
    header(csv, cfg, g, "subordinate-check");
    csv << "check,probe,a,b,c,value,oracle,deviation\n";
    double worst_k = 0.0, worst_l = 0.0;
    for (int i = 0; i < probes; ++i) {
        const double t = std::pow(10.0, -2.0 + 4.0 * u(rng));
        const double x = -10.0 + 20.0 * u(rng), y = -10.0 + 20.0 * u(rng);
        // value(s) is K at time s^nu, so the Poisson kernel at t sits at s = t^2
        const double v = eval(*k, t * t, std::vector<double>{x}, std::vector<double>{y});
        const double p = t / (std::numbers::pi * (t * t + (x - y) * (x - y)));
        const double rel = std::abs(v - p) / p;
        worst_k = std::max(worst_k, rel);
        csv << "poisson," << i << "," << num(t) << "," << num(x) << "," << num(y) << "," << num(v) << "," << num(p)
            << "," << num(rel) << "\n";
    }
    for (int i = 0; i < laplace; ++i) {
        const double nu = 0.1 + 0.8 * u(rng);
        const double x = std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double v = stable_laplace_check(StableDensityParams(nu), x);
        const double e = std::exp(-std::pow(x, nu));
        const double dev = std::abs(v - e);
        worst_l = std::max(worst_l, dev);
        csv << "laplace," << i << "," << num(nu) << "," << num(x) << ",0," << num(v) << "," << num(e) << "," << num(dev)
            << "\n";
    }
    const bool pass = worst_k <= tol_kernel && worst_l <= tol_laplace;
    std::printf("poisson max relative deviation %.3g (tol %.1g); laplace max deviation %.3g (tol %.1g) -> %s\n", worst_k,
                tol_kernel, worst_l, tol_laplace, pass ? "pass" : "FAIL");
    std::cout << "subordinate kernels are evaluated at the substituted time: value(t) = K_{t^nu, nu}\n";
    return pass ? ok : condition_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hardy: semigroup kernels, admissible coverings, atoms and condition campaigns"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    Flags fl;
    app.add_option("--config", g.config_path, "sectioned key = value campaign file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--threads", g.threads, "worker threads (HARDY_THREADS if unset)");

    auto* cov = app.add_subcommand("covering", "write and validate a covering");
    cov->add_option("--family", fl.family, "bessel|laguerre|uniform|bessel-box|laguerre-box|bessel-laguerre-box|strip");
    cov->add_option("--window", fl.window, "index window lo..hi");
    cov->add_option("--spec", fl.covering, "covering spec, e.g. box(bessel(-3,3),laguerre(0,2))");

    auto* ver = app.add_subcommand("verify", "run condition campaigns");
    auto* mx = app.add_subcommand("maximal", "atom maximal norms");
    auto* dec = app.add_subcommand("decompose", "localise and decompose a function into atoms");
    for (auto* s : {ver, mx, dec}) {
        s->add_option("--kernel", fl.kernel, "kernel spec, e.g. bessel(1)");
        s->add_option("--covering", fl.covering, "covering spec");
    }
    ver->add_option("--conditions", fl.conditions, "A0,A0prime,A1,A1prime,A2,A2prime,a3,a4,Dprime,K,limits,envelope");
    dec->add_option("--function", fl.function, "bump(center, radius), center coordinates joined by ':'");
    dec->add_option("--input", fl.input, "serialized atom file");
    auto* sub = app.add_subcommand("subordinate-check", "closed-form oracles at nu = 1/2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : numerical;
    }
    try {
        if (cov->parsed()) return cmd_covering(g, fl);
        if (ver->parsed()) return cmd_verify(g, fl);
        if (mx->parsed()) return cmd_maximal(g, fl);
        if (dec->parsed()) return cmd_decompose(g, fl);
        if (sub->parsed()) return cmd_subordinate_check(g, fl);
    } catch (const window_error& e) {
        std::cerr << "window error: " << e.what() << "\n";
        return numerical;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical;
    }
    return numerical;
}
