#include "platelab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "platelab/config.hpp"
#include "platelab/evolution.hpp"
#include "platelab/geometry.hpp"
#include "platelab/instability.hpp"
#include "platelab/ratefit.hpp"
#include "platelab/runio.hpp"
#include "platelab/spectral.hpp"

namespace platelab {

namespace {

namespace fs = std::filesystem;

struct Problem {
    Annulus geom;
    PlateConfig plate;
    std::vector<int> modes{0, 1, 2, 3};
    int elements = 64;
    FeedbackParams fb;
    int n_rho1 = 64, n_rho2 = 64;
    SystemKind system = SystemKind::System2;
    unsigned long long seed = 20240915;
};

Problem load_problem(const Config& cfg) {
    Problem p;
    const double r0 = cfg.get_double("geometry.r0", 1.0);
    const double r1 = cfg.get_double("geometry.r1", 2.0);
    const std::vector<double> x0 = cfg.get_double_list("geometry.x0", {0.0, 0.0});
    if (x0.size() != 2) throw ConfigError("geometry.x0 must have two entries");
    p.geom = Annulus(r0, r1, {x0[0], x0[1]});
    p.plate = PlateConfig(cfg.get_double("plate.mu", 0.3));
    p.modes = cfg.get_int_list("fem.modes", p.modes);
    p.elements = cfg.get_int("fem.elements", p.elements);
    p.fb.beta1 = cfg.get_double("feedback.beta1", p.fb.beta1);
    p.fb.beta2 = cfg.get_double("feedback.beta2", p.fb.beta2);
    p.fb.gamma1 = cfg.get_double("feedback.gamma1", p.fb.gamma1);
    p.fb.gamma2 = cfg.get_double("feedback.gamma2", p.fb.gamma2);
    p.fb.tau1 = cfg.get_double("feedback.tau1", p.fb.tau1);
    p.fb.tau2 = cfg.get_double("feedback.tau2", p.fb.tau2);
    p.n_rho1 = cfg.get_int("delay.n_rho1", p.n_rho1);
    p.n_rho2 = cfg.get_int("delay.n_rho2", p.n_rho2);
    const int sys = cfg.get_int("system", 2);
    if (sys != 1 && sys != 2) throw ConfigError("system must be 1 or 2");
    p.system = (sys == 1) ? SystemKind::System1 : SystemKind::System2;
    p.seed = (unsigned long long)cfg.get_long("seed", (long long)p.seed);
    return p;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// smooth clamped default initial plate profile for `simulate`
SystemState smooth_state(const DiscreteGenerator& gen) {
    const auto& sp = gen.space;
    const double r0 = sp.geom.r0, r1 = sp.geom.r1;
    auto f = [&](double r) { return (r - r0) * (r - r0) * (r1 - r) * (r1 - r); };
    auto df = [&](double r) {
        return 2.0 * (r - r0) * (r1 - r) * (r1 - r) - 2.0 * (r - r0) * (r - r0) * (r1 - r);
    };
    SystemState s = zero_state(gen);
    s.x.segment(gen.off_u, sp.ndof) = interpolate_dofs(sp, f, df).cast<cplx>();
    return s;
}

double auto_dt(const Problem& p) {
    const double dt1 = p.fb.tau1 / p.n_rho1;
    const double dt2 = p.fb.tau2 / p.n_rho2;
    return std::min(dt1, dt2);
}

struct CliContext {
    Config cfg;
    std::string outdir;
    int threads = 1;
    RunManifest manifest;
    std::chrono::steady_clock::time_point t0;

    std::string path(const std::string& name) {
        manifest.outputs.push_back(name);
        return (fs::path(outdir) / name).string();
    }

    void finish() {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(manifest, (fs::path(outdir) / "manifest.json").string());
    }
};

int cmd_mgc_check(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    const int samples = ctx.cfg.get_int("mgc.samples", 64);
    const MgcReport rep = mgc_check(p.geom, samples);
    std::cout << "satisfied=" << (rep.satisfied ? "true" : "false");
    if (rep.delta) std::cout << " delta=" << CsvWriter::fmt(*rep.delta);
    std::cout << " min_hnu_gamma1=" << CsvWriter::fmt(rep.min_hnu_gamma1)
              << " max_hnu_gamma0=" << CsvWriter::fmt(rep.max_hnu_gamma0) << "\n";
    CsvWriter csv(ctx.path("mgc.csv"),
                  {"min_hnu_gamma1", "max_hnu_gamma0", "satisfied", "delta"});
    csv.row_mixed({CsvWriter::fmt(rep.min_hnu_gamma1), CsvWriter::fmt(rep.max_hnu_gamma0),
                   rep.satisfied ? "1" : "0",
                   rep.delta ? CsvWriter::fmt(*rep.delta) : "nan"});
    return 0;
}

int cmd_simulate(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    const double t_end = ctx.cfg.get_double("sim.t_end", 20.0);
    double dt = ctx.cfg.get_double("sim.dt", 0.0);
    if (dt <= 0.0) dt = auto_dt(p);
    const int ck = ctx.cfg.get_int("sim.checkpoint_every", 0);

    const int nm = int(p.modes.size());
    std::vector<Trajectory> trajs(nm);
    parallel_for(nm, ctx.threads, [&](int i) {
        const ModeSpace sp = build_mode_space(p.geom, p.plate, p.modes[i], p.elements);
        const DiscreteGenerator gen = build_generator(p.system, sp, p.fb, p.n_rho1, p.n_rho2);
        trajs[i] = simulate(gen, smooth_state(gen), dt, t_end, ck);
    });

    const bool sys1 = (p.system == SystemKind::System1);
    std::vector<std::string> header{"time", "E_total", "E_plate", "E_kinetic"};
    if (sys1) {
        header.push_back("E_eta");
        header.push_back("E_xi");
    }
    header.push_back("E_line1");
    header.push_back("E_line2");
    CsvWriter csv(ctx.path("energy.csv"), header);
    const size_t nt = trajs[0].times.size();
    for (size_t k = 0; k < nt; ++k) {
        EnergyBreakdown e;
        for (const Trajectory& t : trajs) {
            e.plate += t.energies[k].plate;
            e.kinetic += t.energies[k].kinetic;
            e.boundary_eta += t.energies[k].boundary_eta;
            e.boundary_xi += t.energies[k].boundary_xi;
            e.line1 += t.energies[k].line1;
            e.line2 += t.energies[k].line2;
            e.total += t.energies[k].total;
        }
        std::vector<double> row{trajs[0].times[k], e.total, e.plate, e.kinetic};
        if (sys1) {
            row.push_back(e.boundary_eta);
            row.push_back(e.boundary_xi);
        }
        row.push_back(e.line1);
        row.push_back(e.line2);
        csv.row(row);
    }
    std::cout << "simulate: steps=" << nt - 1 << " dt=" << CsvWriter::fmt(dt)
              << " E0=" << CsvWriter::fmt(trajs[0].energies.front().total) << "\n";
    return 0;
}

int cmd_spectrum(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    CsvWriter csv(ctx.path("spectrum.csv"), {"mode", "re", "im"});
    const int nm = int(p.modes.size());
    std::vector<std::vector<cplx>> evs(nm);
    parallel_for(nm, ctx.threads, [&](int i) {
        const ModeSpace sp = build_mode_space(p.geom, p.plate, p.modes[i], p.elements);
        const DiscreteGenerator gen = build_generator(p.system, sp, p.fb, p.n_rho1, p.n_rho2);
        const int count = std::min(ctx.cfg.get_int("spectrum.count", 40), gen.dim);
        evs[i] = generator_spectrum(gen, count);
    });
    double max_re = -1e300;
    for (int i = 0; i < nm; ++i)
        for (const cplx& z : evs[i]) {
            csv.row({double(p.modes[i]), z.real(), z.imag()});
            max_re = std::max(max_re, z.real());
        }
    std::cout << "spectrum: max_real_part=" << CsvWriter::fmt(max_re) << "\n";
    return 0;
}

// aggregated T-eigenpairs over the configured modes, ascending mu^4, with a
// mesh-resolution flag against a finer reference mesh
struct TaggedPair {
    TEigenpair pair;
    bool resolved = false;
};

std::vector<TaggedPair> aggregate_teigs(const Problem& p, const Config& cfg, int threads) {
    const int count = cfg.get_int("teigs.count", 8);
    const int fine = cfg.get_int("teigs.fine_elements", 2 * p.elements);
    const int nm = int(p.modes.size());
    std::vector<std::vector<TaggedPair>> per_mode(nm);
    parallel_for(nm, threads, [&](int i) {
        const ModeSpace sp = build_mode_space(p.geom, p.plate, p.modes[i], p.elements);
        const ModeSpace spf = build_mode_space(p.geom, p.plate, p.modes[i], fine);
        const auto pairs = t_operator_eigs(sp, std::min(count, sp.ndof));
        const auto ref = t_operator_eigs(spf, std::min(count, spf.ndof));
        for (size_t k = 0; k < pairs.size(); ++k) {
            TaggedPair tp;
            tp.pair = pairs[k];
            tp.resolved = k < ref.size() &&
                          std::abs(pairs[k].mu4 - ref[k].mu4) <= 1e-6 * std::abs(ref[k].mu4);
            per_mode[i].push_back(std::move(tp));
        }
    });
    std::vector<TaggedPair> all;
    for (auto& v : per_mode)
        for (auto& tp : v) all.push_back(std::move(tp));
    std::sort(all.begin(), all.end(),
              [](const TaggedPair& a, const TaggedPair& b) { return a.pair.mu4 < b.pair.mu4; });
    return all;
}

int cmd_teigs(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    const auto all = aggregate_teigs(p, ctx.cfg, ctx.threads);
    CsvWriter csv(ctx.path("teigs.csv"), {"mode", "mu4", "mu", "resolved"});
    for (const auto& tp : all)
        csv.row({double(tp.pair.mode_n), tp.pair.mu4, std::pow(tp.pair.mu4, 0.25),
                 tp.resolved ? 1.0 : 0.0});
    std::cout << "t-eigs: pairs=" << all.size() << "\n";
    return 0;
}

int cmd_quasimode(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    const auto all = aggregate_teigs(p, ctx.cfg, ctx.threads);
    const int keep = ctx.cfg.get_int("quasimode.count", 6);

    CsvWriter csv(ctx.path("quasimode.csv"),
                  {"mu", "mode", "u_norm", "f_norm", "ratio", "resolved"});
    std::map<int, ModeSpace> spaces;
    for (int n : p.modes) spaces.emplace(n, build_mode_space(p.geom, p.plate, n, p.elements));
    int used = 0;
    std::vector<double> log_mu, log_ratio;
    for (const auto& tp : all) {
        const auto samples = quasimode_test(spaces.at(tp.pair.mode_n), p.fb, {tp.pair});
        const QuasimodeSample& s = samples[0];
        const double ratio = s.f_norm / s.u_norm;
        csv.row({s.mu, double(s.mode_n), s.u_norm, s.f_norm, ratio, tp.resolved ? 1.0 : 0.0});
        if (tp.resolved && used < keep) {
            log_mu.push_back(std::log(s.mu));
            log_ratio.push_back(std::log(ratio));
            ++used;
        }
    }
    if (used >= 2) {
        double mx = 0, my = 0;
        for (int i = 0; i < used; ++i) {
            mx += log_mu[i];
            my += log_ratio[i];
        }
        mx /= used;
        my /= used;
        double sxx = 0, sxy = 0;
        for (int i = 0; i < used; ++i) {
            sxx += (log_mu[i] - mx) * (log_mu[i] - mx);
            sxy += (log_mu[i] - mx) * (log_ratio[i] - my);
        }
        std::cout << "quasimode: resolved_used=" << used
                  << " loglog_slope=" << CsvWriter::fmt(sxy / sxx) << "\n";
    }
    return 0;
}

int cmd_resolvent_sweep(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    const double lam_min = ctx.cfg.get_double("sweep.lambda_min", 1.0);
    double lam_max = ctx.cfg.get_double("sweep.lambda_max", 0.0);
    const int count = ctx.cfg.get_int("sweep.count", 80);
    const bool opnorm = ctx.cfg.get_int("sweep.opnorm", 0) != 0;
    if (lam_max <= 0.0) {
        lam_max = 1e300;
        for (int n : p.modes)
            lam_max = std::min(lam_max, resolved_band_limit(p.geom, p.plate, n, p.elements));
    }
    std::vector<double> lambdas(count);
    for (int i = 0; i < count; ++i)
        lambdas[i] = lam_min * std::pow(lam_max / lam_min, double(i) / (count - 1));

    const int nm = int(p.modes.size());
    std::vector<std::vector<ResolventSample>> res(nm);
    parallel_for(nm, ctx.threads, [&](int i) {
        const ModeSpace sp = build_mode_space(p.geom, p.plate, p.modes[i], p.elements);
        res[i] = resolvent_sweep_reduced(sp, p.fb, p.system, lambdas, p.seed, opnorm);
    });

    CsvWriter csv(ctx.path("resolvent.csv"), {"lambda", "gain", "system", "mode", "mesh"});
    for (int i = 0; i < nm; ++i)
        for (const ResolventSample& s : res[i])
            csv.row({s.lambda, s.gain, p.system == SystemKind::System1 ? 1.0 : 2.0,
                     double(p.modes[i]), double(p.elements)});
    std::cout << "resolvent-sweep: grid=" << count << " lambda_max=" << CsvWriter::fmt(lam_max)
              << "\n";
    return 0;
}

void write_design_csv(CliContext& ctx, const InstabilityDesign& d, const FeedbackParams& fb,
                      const ModeSpace& space, int k, int l) {
    VerifyOptions vo;
    vo.periods = ctx.cfg.get_int("verify.periods", 10);
    vo.min_cells = ctx.cfg.get_int("verify.min_cells", 64);
    vo.tau1_index = ctx.cfg.get_int("verify.tau1_index", int(d.tau1_choices.size()) - 1);
    vo.tau2_index = ctx.cfg.get_int("verify.tau2_index", int(d.tau2_choices.size()) - 1);
    const VerifyReport rep = verify_design(d, fb, space, vo);

    CsvWriter csv(ctx.path("design.csv"),
                  {"lambda", "case", "mode", "tau1", "tau2", "k", "l", "drift", "residual"});
    csv.row({d.lambda, d.kind == InstabilityCase::IS1 ? 1.0 : 2.0, double(d.mode_n),
             d.tau1_choices[vo.tau1_index], d.tau2_choices[vo.tau2_index], double(k), double(l),
             rep.energy_drift, rep.eigen_residual});
    std::cout << "design: lambda=" << CsvWriter::fmt(d.lambda) << " mode=" << d.mode_n
              << " drift=" << CsvWriter::fmt(rep.energy_drift)
              << " residual=" << CsvWriter::fmt(rep.eigen_residual) << "\n";
}

int cmd_design(CliContext& ctx, InstabilityCase which) {
    const Problem p = load_problem(ctx.cfg);
    const int k = ctx.cfg.get_int("design.k", 0);
    const int l = ctx.cfg.get_int("design.l", 0);
    const int which_eig = ctx.cfg.get_int("design.which_eig", 0);
    const bool positive_branch = ctx.cfg.get_string("design.branch", "positive") != "negative";

    // minimum lambda over the configured mode list
    InstabilityDesign best;
    ModeSpace best_space;
    bool have = false;
    for (int n : p.modes) {
        const ModeSpace sp = build_mode_space(p.geom, p.plate, n, p.elements);
        const InstabilityDesign d = (which == InstabilityCase::IS1)
                                        ? design_is1(sp, k, l, which_eig)
                                        : design_is2(sp, p.fb, positive_branch);
        if (!have || d.lambda < best.lambda) {
            best = d;
            best_space = sp;
            have = true;
        }
    }
    write_design_csv(ctx, best, p.fb, best_space, k, l);
    return 0;
}

int cmd_verify_design(CliContext& ctx) {
    const Problem p = load_problem(ctx.cfg);
    const std::string which = ctx.cfg.get_string("verify.case", "is1");
    if (which != "is1" && which != "is2") throw ConfigError("verify.case must be is1 or is2");
    return cmd_design(ctx, which == "is1" ? InstabilityCase::IS1 : InstabilityCase::IS2);
}

int cmd_decay_fit(CliContext& ctx) {
    const std::string input = ctx.cfg.get_string("fit.input", "");
    if (input.empty()) throw ConfigError("fit.input is required");
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot open fit.input: " + input);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("fit.input: empty file");
    std::vector<std::string> cols;
    {
        std::istringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    int tcol = -1, ecol = -1;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "time") tcol = int(i);
        if (cols[i] == "E_total") ecol = int(i);
    }
    if (tcol < 0 || ecol < 0) throw ConfigError("fit.input: needs time and E_total columns");

    std::vector<double> times, energies;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string c;
        std::vector<double> vals;
        while (std::getline(ss, c, ',')) vals.push_back(std::strtod(c.c_str(), nullptr));
        times.push_back(vals[tcol]);
        energies.push_back(vals[ecol]);
    }

    FitWindow w = default_window(times, energies);
    w.t_start = ctx.cfg.get_double("fit.t_start", w.t_start);
    w.t_end = ctx.cfg.get_double("fit.t_end", w.t_end);
    const std::string kind = ctx.cfg.get_string("fit.kind", "both");

    CsvWriter csv(ctx.path("fit.csv"), {"kind", "value", "r_squared", "t_start", "t_end"});
    if (kind == "exponential" || kind == "both") {
        const DecayFit f = fit_exponential(times, energies, w);
        csv.row_mixed({"exponential", CsvWriter::fmt(f.rate_or_exponent),
                       CsvWriter::fmt(f.r_squared), CsvWriter::fmt(f.t_start),
                       CsvWriter::fmt(f.t_end)});
        std::cout << "fit exponential: rate=" << CsvWriter::fmt(f.rate_or_exponent)
                  << " r2=" << CsvWriter::fmt(f.r_squared) << "\n";
    }
    if (kind == "power" || kind == "both") {
        const DecayFit f = fit_power(times, energies, w);
        csv.row_mixed({"power", CsvWriter::fmt(f.rate_or_exponent), CsvWriter::fmt(f.r_squared),
                       CsvWriter::fmt(f.t_start), CsvWriter::fmt(f.t_end)});
        std::cout << "fit power: exponent=" << CsvWriter::fmt(f.rate_or_exponent)
                  << " r2=" << CsvWriter::fmt(f.r_squared) << "\n";
    }
    // finite-dimensional caveat: any fixed mesh is eventually exponential, so
    // power-law behavior is read from the pre-asymptotic window
    std::cout << "note: fits describe the pre-asymptotic window of a fixed discretization\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"plate boundary-delay laboratory"};
    app.require_subcommand(1);

    std::string config_path, outdir = ".";
    int threads = -1;
    app.add_option("--config", config_path, "config file (key = value lines)");
    app.add_option("--out", outdir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = auto)");

    std::vector<std::string> names{"mgc-check",  "simulate",  "spectrum",
                                   "t-eigs",     "quasimode", "resolvent-sweep",
                                   "design-is1", "design-is2", "verify-design",
                                   "decay-fit"};
    for (const auto& n : names) app.add_subcommand(n);

    std::vector<const char*> argv;
    argv.push_back("platelab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        CliContext ctx;
        ctx.cfg = config_path.empty() ? Config::from_string("")
                                      : Config::from_file(config_path);
        ctx.outdir = outdir;
        fs::create_directories(outdir);
        ctx.t0 = std::chrono::steady_clock::now();

        if (threads < 0) {
            const char* env = std::getenv("PLATELAB_THREADS");
            threads = env ? std::atoi(env) : 1;
        }
        if (threads == 0) threads = int(std::thread::hardware_concurrency());
        ctx.threads = std::max(1, threads);

        const Problem pr = load_problem(ctx.cfg);
        ctx.manifest.command = app.get_subcommands().front()->get_name();
        ctx.manifest.config_text = ctx.cfg.text();
        ctx.manifest.version = platelab_version();
        ctx.manifest.seed = pr.seed;
        ctx.manifest.elements = pr.elements;
        ctx.manifest.modes = pr.modes;

        const std::string sub = ctx.manifest.command;
        int rc = 0;
        if (sub == "mgc-check")
            rc = cmd_mgc_check(ctx);
        else if (sub == "simulate")
            rc = cmd_simulate(ctx);
        else if (sub == "spectrum")
            rc = cmd_spectrum(ctx);
        else if (sub == "t-eigs")
            rc = cmd_teigs(ctx);
        else if (sub == "quasimode")
            rc = cmd_quasimode(ctx);
        else if (sub == "resolvent-sweep")
            rc = cmd_resolvent_sweep(ctx);
        else if (sub == "design-is1")
            rc = cmd_design(ctx, InstabilityCase::IS1);
        else if (sub == "design-is2")
            rc = cmd_design(ctx, InstabilityCase::IS2);
        else if (sub == "verify-design")
            rc = cmd_verify_design(ctx);
        else if (sub == "decay-fit")
            rc = cmd_decay_fit(ctx);
        ctx.finish();
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace platelab
