#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracperc/acceptance.hpp"
#include "fracperc/experiments.hpp"
#include "fracperc/generate.hpp"
#include "fracperc/io.hpp"
#include "fracperc/minkowski.hpp"
#include "fracperc/series.hpp"
#include "fracperc/theory.hpp"

namespace {

using namespace fracperc;

struct CommonFlags {
    CLI::Option *d_o = nullptr, *M_o = nullptr, *p_o = nullptr, *n_o = nullptr, *seed_o = nullptr,
                *reps_o = nullptr, *out_o = nullptr, *config_o = nullptr, *cond_o = nullptr,
                *tol_o = nullptr, *traj_o = nullptr;
    int d = 2, M = 2, n = 1;
    double p = 0.5, tolerance = 1e-6;
    std::uint64_t seed = 0;
    std::int64_t reps = 10000;
    std::string out, config_path, traj;
    bool cond = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    f.d_o = cmd->add_option("-d,--dimension", f.d, "ambient dimension (1..3)");
    f.M_o = cmd->add_option("-M,--subdivision", f.M, "subdivision factor per axis");
    f.p_o = cmd->add_option("-p,--retain", f.p, "retention probability");
    f.n_o = cmd->add_option("-n,--levels", f.n, "deepest subdivision level");
    f.seed_o = cmd->add_option("--seed", f.seed, "master seed");
    f.reps_o = cmd->add_option("--reps", f.reps, "replication count");
    f.out_o = cmd->add_option("--out", f.out, "output CSV path (default stdout)");
    f.config_o = cmd->add_option("--config", f.config_path, "JSON config file; flags win");
    f.cond_o = cmd->add_flag("--condition-nonextinct", f.cond,
                             "condition statistics on survival to the deepest level");
    f.tol_o = cmd->add_option("--tolerance", f.tolerance, "series truncation tolerance");
    f.traj_o = cmd->add_option("--trajectories", f.traj,
                               "write per-replication trajectories as NDJSON to this path");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig cfg;
    if (f.config_o->count()) cfg = load_config_file(f.config_path);
    if (f.d_o->count()) cfg.params.d = f.d;
    if (f.M_o->count()) cfg.params.M = f.M;
    if (f.p_o->count()) cfg.params.p = f.p;
    if (f.n_o->count()) cfg.params.n_max = f.n;
    if (f.seed_o->count()) cfg.params.seed = f.seed;
    if (f.reps_o->count()) cfg.reps = f.reps;
    if (f.out_o->count()) cfg.out = f.out;
    if (f.cond_o->count()) cfg.condition_nonextinct = f.cond;
    if (f.tol_o->count()) cfg.tolerance = f.tolerance;
    if (f.traj_o->count()) cfg.trajectories_out = f.traj;
    return cfg;
}

int cmd_simulate(const RunConfig& cfg) {
    ModelParams P = cfg.params;
    P.validate();
    Realization real = generate(P);
    std::ostringstream csv;
    csv << "d,M,p,seed,n,count,k,value,rescaled\n";
    for (int n = 0; n <= P.n_max; ++n) {
        MinkowskiVector v = intrinsic_all(real.grids[std::size_t(n)]);
        for (int k = 0; k <= P.d; ++k) {
            double raw = v.values[std::size_t(k)];
            csv << P.d << ',' << P.M << ',' << format_number(P.p) << ',' << P.seed << ',' << n
                << ',' << real.occupied_count(n) << ',' << k << ',' << format_number(raw) << ','
                << format_number(raw * rescale_factor(P, k, n)) << '\n';
        }
    }
    write_text_atomic(cfg.out, csv.str());
    if (!cfg.out.empty()) {
        std::ostringstream dump;
        dump_grids(real, dump);
        write_text_atomic(cfg.out + ".grids", dump.str());
    }
    return 0;
}

int cmd_moments(const RunConfig& cfg) {
    ModelParams P = cfg.params;
    P.validate();
    std::ostringstream csv;
    csv << "d,M,p,n,functional,mean,variance,source\n";
    auto row = [&](int n, const char* functional, double mean, double var, const char* source) {
        csv << P.d << ',' << P.M << ',' << format_number(P.p) << ',' << n << ',' << functional
            << ',' << format_number(mean) << ',' << format_number(var) << ',' << source << '\n';
    };
    for (int n = 0; n <= P.n_max; ++n) {
        MomentReport c = gw_moments(P, n);
        row(n, "count", c.mean, c.variance, "closed_form");
        MomentReport v = volume_moments(P, n);
        row(n, "volume", v.mean, v.variance, "closed_form");
        if (P.d >= 2) {
            double sm = surface_mean_closed_form(P, n);
            row(n, "surface", sm, surface_variance_exact(P, n).Var_X, "recursion");
        }
    }
    write_text_atomic(cfg.out, csv.str());
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    acceptance::Options opt;
    opt.reps_cap = cfg.reps;
    auto results = acceptance::run_all(opt, std::cout);
    bool all = true;
    std::ostringstream csv;
    csv << "criterion,name,pass,detail\n";
    auto unpunctuate = [](std::string s) {
        for (char& ch : s)
            if (ch == ',') ch = ';';
        return s;
    };
    for (const auto& r : results) {
        all = all && r.pass;
        csv << r.id << ',' << unpunctuate(r.name) << ',' << (r.pass ? "1" : "0") << ','
            << unpunctuate(r.detail) << '\n';
    }
    if (!cfg.out.empty()) write_text_atomic(cfg.out, csv.str());
    std::cout << (all ? "all criteria passed" : "criteria FAILED") << "\n";
    return all ? 0 : 1;
}

int cmd_limits(const RunConfig& cfg) {
    ModelParams base = cfg.params;
    base.validate();
    std::vector<double> ps;
    if (cfg.sweep_p_steps > 0) {
        if (cfg.sweep_p_steps == 1) {
            ps.push_back(cfg.sweep_p_min);
        } else {
            for (int i = 0; i < cfg.sweep_p_steps; ++i)
                ps.push_back(cfg.sweep_p_min + (cfg.sweep_p_max - cfg.sweep_p_min) * double(i) /
                                                   double(cfg.sweep_p_steps - 1));
        }
    } else {
        ps.push_back(base.p);
    }
    SeriesOptions so;
    so.tolerance = cfg.tolerance;
    so.mc_reps = cfg.series_mc_reps;
    so.seed = base.seed;
    std::ostringstream csv;
    csv << "d,M,p,k,l,stat,value,half_width,flag\n";
    int valid = 0;
    for (double p : ps) {
        ModelParams P = base;
        P.p = p;
        auto prefix = [&](int k, int l, const char* stat) {
            csv << P.d << ',' << P.M << ',' << format_number(p) << ',' << k << ',' << l << ','
                << stat << ',';
        };
        if (!P.supercritical()) {
            prefix(0, 0, "vbar");
            csv << ",,subcritical\n";
            continue;
        }
        ++valid;
        std::vector<double> vbar(std::size_t(P.d) + 1);
        std::vector<double> hw(std::size_t(P.d) + 1);
        for (int k = 0; k <= P.d; ++k) {
            SeriesResult s = limit_functional_series(P, k, so);
            vbar[std::size_t(k)] = s.value;
            hw[std::size_t(k)] = s.half_width;
        }
        auto cov = limit_covariance(P, vbar);
        for (int k = 0; k <= P.d; ++k) {
            prefix(k, k, "vbar");
            csv << format_number(vbar[std::size_t(k)]) << ',' << format_number(hw[std::size_t(k)])
                << ",ok\n";
        }
        for (int k = 0; k <= P.d; ++k) {
            prefix(k, k, "var");
            csv << format_number(cov[std::size_t(k)][std::size_t(k)]) << ",,ok\n";
        }
        for (int k = 0; k <= P.d; ++k)
            for (int l = k + 1; l <= P.d; ++l) {
                prefix(k, l, "abs_cov");
                csv << format_number(std::abs(cov[std::size_t(k)][std::size_t(l)])) << ",,ok\n";
            }
    }
    if (valid == 0) throw ConfigError("limit table needs at least one supercritical sweep point");
    write_text_atomic(cfg.out, csv.str());
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    ModelParams P = cfg.params;
    P.validate();
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = cfg.reps;
    plan.k_mask = (1u << (P.d + 1)) - 1u;
    plan.condition_nonextinct = cfg.condition_nonextinct;
    plan.record_trajectories = !cfg.trajectories_out.empty();
    RunResult res = run(plan);
    bool conditioned = cfg.condition_nonextinct;
    std::ostringstream csv;
    csv << "d,M,p,n,R,k,stat,value,se,target,zscore\n";
    auto row = [&](int n, int k, const char* stat, double value, double se, bool has_target,
                   double target) {
        csv << P.d << ',' << P.M << ',' << format_number(P.p) << ',' << n << ',' << cfg.reps << ','
            << k << ',' << stat << ',' << format_number(value) << ',' << format_number(se) << ',';
        if (has_target && se > 0.0) {
            csv << format_number(target) << ',' << format_number((value - target) / se);
        } else if (has_target) {
            csv << format_number(target) << ',';
        } else {
            csv << ',';
        }
        csv << '\n';
    };
    for (int n = 0; n <= P.n_max; ++n) {
        const StreamingMoments& acc = res.levels[std::size_t(n)];
        for (int k = 0; k <= P.d; ++k) {
            bool tm = false, tv = false;
            double mt = 0.0, vt = 0.0;
            if (!conditioned && k == P.d) {
                MomentReport m = volume_moments(P, n);
                tm = tv = true;
                mt = m.mean;
                vt = m.variance;
            } else if (!conditioned && k == P.d - 1 && P.d >= 2) {
                tm = tv = true;
                mt = surface_mean_closed_form(P, n);
                vt = surface_variance_exact(P, n).Var_X;
            }
            row(n, k, "mean", acc.mean(k), acc.mean_se(k), tm, mt);
            row(n, k, "variance", acc.variance(k), acc.variance_se(k), tv, vt);
        }
    }
    write_text_atomic(cfg.out, csv.str());
    if (plan.record_trajectories) {
        std::ostringstream nd;
        for (std::size_t r = 0; r < res.trajectories.size(); ++r) {
            const TrajectoryRecord& t = res.trajectories[r];
            nlohmann::json j;
            j["replication"] = r;
            j["extinct"] = t.extinct;
            auto& zs = j["z"] = nlohmann::json::array();
            for (const auto& lvl : t.z) {
                nlohmann::json lv = nlohmann::json::array();
                for (int k = 0; k <= P.d; ++k) lv.push_back(lvl[std::size_t(k)]);
                zs.push_back(std::move(lv));
            }
            nd << j.dump() << '\n';
        }
        write_text_atomic(cfg.trajectories_out, nd.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractal percolation: simulation, moment formulas, and verification"};
    app.require_subcommand(1);
    CLI::App* sim = app.add_subcommand("simulate", "generate one realization and its functionals");
    CLI::App* mom = app.add_subcommand("moments", "tabulate exact moment formulas");
    CLI::App* ver = app.add_subcommand("verify", "run the verification suite");
    CLI::App* lim = app.add_subcommand("limits", "tabulate limit functionals and covariances");
    CLI::App* rep = app.add_subcommand("report", "Monte Carlo run with theory comparison");
    CommonFlags fs, fm, fv, fl, fr;
    add_common(sim, fs);
    add_common(mom, fm);
    add_common(ver, fv);
    add_common(lim, fl);
    add_common(rep, fr);
    double p_min = 0.0, p_max = 0.0;
    int p_steps = 0;
    CLI::Option* pmin_o = lim->add_option("--p-min", p_min, "sweep start retention");
    CLI::Option* pmax_o = lim->add_option("--p-max", p_max, "sweep end retention");
    CLI::Option* psteps_o = lim->add_option("--p-steps", p_steps, "sweep point count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(resolve(fs));
        if (mom->parsed()) return cmd_moments(resolve(fm));
        if (ver->parsed()) return cmd_verify(resolve(fv));
        if (lim->parsed()) {
            fracperc::RunConfig cfg = resolve(fl);
            if (pmin_o->count()) cfg.sweep_p_min = p_min;
            if (pmax_o->count()) cfg.sweep_p_max = p_max;
            if (psteps_o->count()) cfg.sweep_p_steps = p_steps;
            return cmd_limits(cfg);
        }
        if (rep->parsed()) return cmd_report(resolve(fr));
    } catch (const fracperc::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const fracperc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
