#include "z2metts/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "z2metts/avqite.hpp"
#include "z2metts/dense.hpp"
#include "z2metts/krylov.hpp"
#include "z2metts/metts.hpp"
#include "z2metts/model.hpp"
#include "z2metts/observables.hpp"

#ifndef Z2METTS_VERSION
#define Z2METTS_VERSION "dev"
#endif

namespace z2metts {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------- config plumbing ----------

const json& need(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing config key: " + key);
    return j.at(key);
}

template <typename T>
T get_or(json& j, const std::string& key, T def) {
    if (!j.contains(key)) j[key] = def;  // record the resolved default
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

std::vector<double> number_list(const json& v, const std::string& key) {
    std::vector<double> out;
    try {
        if (v.is_array())
            for (const auto& x : v) out.push_back(x.get<double>());
        else
            out.push_back(v.get<double>());
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

std::vector<double> beta_list(json& cfg) { return number_list(need(cfg, "beta"), "beta"); }

ModelParams model_from(json& cfg) {
    json& m = cfg["model"];
    if (!m.is_object()) throw ConfigError("missing config section: model");
    ModelParams p;
    p.L = get_or(m, "L", 12);
    p.h = get_or(m, "h", 0.0);
    if (m.contains("mu") && m["mu"].is_string()) {
        if (m["mu"].get<std::string>() != "auto")
            throw ConfigError("model.mu must be a number or \"auto\"");
        const double target = get_or(m, "target_filling", 1.0 / 3.0);
        p.mu = calibrate_mu(p.L, p.h, target);
        m["mu_resolved"] = p.mu;
    } else {
        p.mu = get_or(m, "mu", 0.0);
    }
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return p;
}

WalkConfig walk_from(json& cfg, uint64_t master_seed) {
    json& w = cfg["walk"];
    if (!w.is_object()) throw ConfigError("missing config section: walk");
    WalkConfig c;
    const std::string backend = get_or<std::string>(w, "backend", "exact");
    if (backend == "exact")
        c.backend = BackendKind::Exact;
    else if (backend == "avqite")
        c.backend = BackendKind::Avqite;
    else
        throw ConfigError("walk.backend must be exact or avqite");
    c.s_w = get_or(w, "s_w", 1);
    c.s_0 = get_or(w, "s_0", 1);
    c.warmup = get_or(w, "warmup", c.backend == BackendKind::Exact ? 10 : 1);
    try {
        c.schedule = CollapseSchedule::parse(get_or<std::string>(w, "schedule", "z"));
        c.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    c.master_seed = master_seed;
    if (w.contains("avqite")) {
        json& a = w["avqite"];
        c.avqite.step_cap = get_or(a, "step_cap", c.avqite.step_cap);
        c.avqite.threshold = get_or(a, "threshold", c.avqite.threshold);
        c.avqite.tikhonov = get_or(a, "tikhonov", c.avqite.tikhonov);
        c.avqite.trace_path = get_or<std::string>(a, "trace_path", "");
    }
    return c;
}

AvqiteOptions avqite_from(json& cfg) {
    AvqiteOptions o;
    if (!cfg.contains("avqite")) cfg["avqite"] = json::object();
    json& a = cfg["avqite"];
    o.step_cap = get_or(a, "step_cap", o.step_cap);
    o.threshold = get_or(a, "threshold", o.threshold);
    o.tikhonov = get_or(a, "tikhonov", o.tikhonov);
    o.prefer_low_weight_ties = get_or(a, "prefer_low_weight_ties", true);
    o.trace_path = get_or<std::string>(a, "trace_path", "");
    return o;
}

Basis basis_from(const std::string& s) {
    if (s.size() != 1) throw ConfigError("bad basis: " + s);
    try {
        return parse_basis(s[0]);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

// ---------- output plumbing ----------

class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : out_(path) {
        if (!out_) throw ConfigError("cannot open output file: " + path.string());
        out_ << header << "\n";
    }
    Csv& field(const std::string& s) {
        sep();
        out_ << s;
        return *this;
    }
    Csv& field(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return field(std::string(buf));
    }
    Csv& field(long v) { return field(std::to_string(v)); }
    Csv& field(int v) { return field(std::to_string(v)); }
    void end_row() {
        out_ << "\n";
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

void write_manifest(const json& resolved, const fs::path& out_dir) {
    json manifest = resolved;
    manifest["version"] = Z2METTS_VERSION;
    std::ofstream out(out_dir / "manifest.json");
    if (!out) throw ConfigError("cannot write manifest in " + out_dir.string());
    out << manifest.dump(2) << "\n";
}

struct EdRef {
    std::shared_ptr<const ThermalEd> ed;
    PauliSum ham, num;
    int L;

    EdRef(const ModelParams& p)
        : ed(ThermalEd::shared(p.L, p.h)),
          ham(build_hamiltonian(p)),
          num(build_number_operator(p.L)),
          L(p.L) {}
    double eps(double beta, double mu) const { return ed->average(ham, beta, mu) / L; }
    double n(double beta, double mu) const { return ed->average(num, beta, mu) / L; }
};

std::vector<double> mu_grid(json& cfg) {
    if (cfg.contains("mu_values")) return number_list(cfg["mu_values"], "mu_values");
    json& g = cfg["mu_grid"];
    if (!g.is_object()) g = json::object();
    const double lo = get_or(g, "min", -1.0);
    const double hi = get_or(g, "max", 1.0);
    const double step = get_or(g, "step", 0.025);
    if (step <= 0.0 || hi < lo) throw ConfigError("bad mu_grid");
    std::vector<double> out;
    const int n = static_cast<int>(std::round((hi - lo) / step));
    for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
    return out;
}

ObservableSet standard_observables(const ModelParams& p) {
    ObservableSet obs;
    obs.add("energy", build_hamiltonian(ModelParams{p.L, p.h, 0.0}));
    obs.add("number", build_number_operator(p.L));
    return obs;
}

// ---------- experiments ----------

void run_ed_reference(json& cfg, const fs::path& out_dir) {
    const ModelParams p = model_from(cfg);
    const std::vector<double> betas = beta_list(cfg);
    std::vector<double> mus = cfg.contains("mu_values") || cfg.contains("mu_grid")
                                  ? mu_grid(cfg)
                                  : std::vector<double>{p.mu};
    write_manifest(cfg, out_dir);
    const EdRef ref(p);
    const bool ff = p.h == 0.0;
    Csv csv(out_dir / "ed_reference.csv",
            ff ? "beta,mu,energy_density,particle_density,ff_energy_density,ff_particle_density"
               : "beta,mu,energy_density,particle_density");
    for (double beta : betas)
        for (double mu : mus) {
            csv.field(beta).field(mu).field(ref.eps(beta, mu)).field(ref.n(beta, mu));
            if (ff) {
                const FreeFermionPoint f = free_fermion_reference(p.L, beta, mu);
                csv.field(f.epsilon).field(f.n);
            }
            csv.end_row();
        }
}

void run_eos(json& cfg, const fs::path& out_dir, uint64_t seed) {
    ModelParams p = model_from(cfg);
    const std::vector<double> betas = beta_list(cfg);
    const std::vector<double> mus = mu_grid(cfg);
    WalkConfig walk = walk_from(cfg, seed);
    write_manifest(cfg, out_dir);

    const EdRef ref(p);
    const bool ff = p.h == 0.0;
    Csv csv(out_dir / "eos.csv",
            std::string("beta,mu,e_mean,e_stderr,n_mean,n_stderr,ed_e,ed_n") +
                (ff ? ",ff_e,ff_n" : ""));
    for (double beta : betas)
        for (size_t im = 0; im < mus.size(); ++im) {
            p.mu = mus[im];
            WalkConfig wc = walk;
            // decorrelate grid points while keeping the run reproducible
            wc.master_seed = derive_seed(seed, static_cast<uint32_t>(im), 0,
                                         RngPurpose::Generic);
            const SampleSet set = run_chain(p, beta, wc, standard_observables(p));
            const Estimate e = estimate(set, "energy");
            const Estimate n = estimate(set, "number");
            csv.field(beta).field(p.mu)
                .field(e.mean / p.L).field(e.stderr_ / p.L)
                .field(n.mean / p.L).field(n.stderr_ / p.L)
                .field(ref.eps(beta, p.mu)).field(ref.n(beta, p.mu));
            if (ff) {
                const FreeFermionPoint f = free_fermion_reference(p.L, beta, p.mu);
                csv.field(f.epsilon).field(f.n);
            }
            csv.end_row();
        }
}

void run_basis_study(json& cfg, const fs::path& out_dir, uint64_t seed) {
    const ModelParams p = model_from(cfg);
    const double beta = beta_list(cfg).front();
    std::vector<std::string> schedules;
    for (const auto& s : need(cfg, "schedules")) schedules.push_back(s.get<std::string>());
    if (schedules.empty()) throw ConfigError("schedules list is empty");
    const WalkConfig base = walk_from(cfg, seed);
    write_manifest(cfg, out_dir);

    const EdRef ref(p);
    const double ed_e = ref.eps(beta, p.mu), ed_n = ref.n(beta, p.mu);
    Csv csv(out_dir / "basis_study.csv",
            "schedule,kept_step,e_mean,e_stderr,delta_e,n_mean,n_stderr,delta_n,ed_e,ed_n");
    for (const std::string& sched : schedules) {
        WalkConfig wc = base;
        try {
            wc.schedule = CollapseSchedule::parse(sched);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        const SampleSet set = run_chain(p, beta, wc, standard_observables(p));
        set.write_csv((out_dir / ("samples_" + sched + ".csv")).string());
        const std::vector<Estimate> re = running_estimate(set, "energy");
        const std::vector<Estimate> rn = running_estimate(set, "number");
        for (size_t k = 1; k < re.size(); ++k) {
            csv.field(sched).field(static_cast<long>(k + 1))
                .field(re[k].mean / p.L).field(re[k].stderr_ / p.L)
                .field(relative_error(re[k].mean / p.L, ed_e))
                .field(rn[k].mean / p.L).field(rn[k].stderr_ / p.L)
                .field(relative_error(rn[k].mean / p.L, ed_n))
                .field(ed_e).field(ed_n);
            csv.end_row();
        }
    }
}

void run_friedel(json& cfg, const fs::path& out_dir, uint64_t seed) {
    const ModelParams p = model_from(cfg);
    const std::vector<double> betas = beta_list(cfg);
    const WalkConfig walk = walk_from(cfg, seed);
    write_manifest(cfg, out_dir);

    const EdRef ref(p);
    Csv csv(out_dir / "friedel.csv", "beta,site,ed_value,metts_mean,metts_stderr");
    Csv peaks(out_dir / "peaks.csv", "beta,ed_peaks,metts_peaks");
    ObservableSet obs = standard_observables(p);
    obs.site_occupations = true;
    for (double beta : betas) {
        const std::vector<double> ed_profile = ref.ed->site_profile(beta, p.mu);
        const SampleSet set = run_chain(p, beta, walk, obs);
        std::vector<double> mean(p.L, 0.0), ss(p.L, 0.0);
        long cnt = 0;
        for (const StepRecord& rec : set.records)
            if (rec.kept) {
                ++cnt;
                for (int i = 0; i < p.L; ++i) mean[i] += rec.occupations[i];
            }
        for (int i = 0; i < p.L; ++i) mean[i] /= cnt;
        for (const StepRecord& rec : set.records)
            if (rec.kept)
                for (int i = 0; i < p.L; ++i)
                    ss[i] += (rec.occupations[i] - mean[i]) * (rec.occupations[i] - mean[i]);
        for (int i = 0; i < p.L; ++i) {
            const double se = cnt > 1 ? std::sqrt(ss[i] / (cnt - 1)) / std::sqrt(double(cnt)) : 0.0;
            csv.field(beta).field(i + 1).field(ed_profile[i]).field(mean[i]).field(se);
            csv.end_row();
        }
        peaks.field(beta).field(count_interior_peaks(ed_profile))
            .field(count_interior_peaks(mean));
        peaks.end_row();
    }
}

void run_strings(json& cfg, const fs::path& out_dir, uint64_t seed) {
    const ModelParams p = model_from(cfg);
    const std::vector<double> betas = beta_list(cfg);
    WalkConfig walk = walk_from(cfg, seed);
    const int shots = get_or(cfg, "shots_per_metts", 50);
    if (shots < 1) throw ConfigError("shots_per_metts must be >= 1");
    write_manifest(cfg, out_dir);

    Csv csv(out_dir / "strings.csv", "beta,kind,l,c_l");
    Csv summary(out_dir / "strings_summary.csv",
                "beta,kind,mean_length,variance,total_samples");
    ObservableSet obs = standard_observables(p);
    obs.bitstring_shots = shots;
    for (double beta : betas) {
        const SampleSet set = run_chain(p, beta, walk, obs);
        std::vector<std::string> bitstrings;
        for (const StepRecord& rec : set.records)
            if (rec.kept)
                bitstrings.insert(bitstrings.end(), rec.bitstrings.begin(),
                                  rec.bitstrings.end());
        const StringHistogram hist = string_histogram(bitstrings);
        for (auto [l, c] : hist.strings) {
            csv.field(beta).field("string").field(l).field(c);
            csv.end_row();
        }
        for (auto [l, c] : hist.antistrings) {
            csv.field(beta).field("antistring").field(l).field(c);
            csv.end_row();
        }
        for (const char* kind : {"string", "antistring"}) {
            const auto& side = std::string(kind) == "string" ? hist.strings : hist.antistrings;
            summary.field(beta).field(kind).field(histogram_mean(side))
                .field(histogram_variance(side)).field(hist.total_samples);
            summary.end_row();
        }
    }
}

std::vector<ClassicalProductState> draw_cps_set(int n_spins, Basis basis, int m,
                                                uint64_t seed, uint32_t stream) {
    Rng rng = make_rng(seed, stream, 0, RngPurpose::InitCps);
    std::vector<ClassicalProductState> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) out.push_back(random_cps(n_spins, basis, rng));
    return out;
}

void run_avqite_accuracy(json& cfg, const fs::path& out_dir, uint64_t seed) {
    const ModelParams p = model_from(cfg);
    const std::vector<double> betas = beta_list(cfg);
    std::vector<std::string> bases;
    for (const auto& b : need(cfg, "bases")) bases.push_back(b.get<std::string>());
    const int m = get_or(cfg, "m_samples", 288);
    if (m < 1) throw ConfigError("m_samples must be >= 1");
    const AvqiteOptions opts = avqite_from(cfg);
    const KrylovOptions kopts;
    write_manifest(cfg, out_dir);

    const EdRef ref(p);
    const PauliSum h_gc = build_grand_canonical(p);
    Csv csv(out_dir / "avqite_samples.csv",
            "basis,beta,sample,cps,infidelity,e_av,n_av,e_ite,n_ite,dev_e,dev_n,"
            "n_theta,n_cx");
    Csv agg(out_dir / "avqite_aggregate.csv",
            "basis,beta,ed_e,ed_n,d_e_av,d_n_av,d_e_ite,d_n_ite,max_infidelity,"
            "frac_dev_n_zero,mean_n_cx");
    for (size_t bi = 0; bi < bases.size(); ++bi) {
        const Basis basis = basis_from(bases[bi]);
        const OperatorPool pool = build_pool(basis, p.L);
        const auto cps_set =
            draw_cps_set(p.n_spins(), basis, m, seed, static_cast<uint32_t>(bi));
        for (double beta : betas) {
            const double ed_e = ref.eps(beta, p.mu), ed_n = ref.n(beta, p.mu);
            struct Row {
                double infid, e_av, n_av, e_ite, n_ite;
                int n_theta;
                long n_cx;
            };
            std::vector<Row> rows(m);
            std::string error;
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i < m; ++i) {
                try {
                    const MettsRecord ite = exact_ite(cps_set[i], h_gc, beta / 2.0, kopts);
                    const EvolutionResult av = evolve(cps_set[i], h_gc, beta / 2.0, pool, opts);
                    rows[i] = Row{1.0 - fidelity(av.state, ite.state),
                                  energy_density(av.state, ref.ham, p.L),
                                  particle_density(av.state, ref.num, p.L),
                                  energy_density(ite.state, ref.ham, p.L),
                                  particle_density(ite.state, ref.num, p.L),
                                  av.report.n_theta, av.report.n_cx};
                } catch (const std::exception& e) {
#pragma omp critical
                    if (error.empty()) error = e.what();
                }
            }
            if (!error.empty()) throw NonConvergenceError(error);

            std::vector<double> e_av, n_av, e_ite, n_ite;
            double max_infid = 0.0, cx_sum = 0.0;
            int zero_dev = 0;
            for (int i = 0; i < m; ++i) {
                const Row& r = rows[i];
                const double dev_e = avqite_deviation(r.e_av, r.e_ite, ed_e);
                const double dev_n = avqite_deviation(r.n_av, r.n_ite, ed_n);
                csv.field(bases[bi]).field(beta).field(i).field(cps_set[i].label())
                    .field(r.infid).field(r.e_av).field(r.n_av).field(r.e_ite)
                    .field(r.n_ite).field(dev_e).field(dev_n).field(r.n_theta)
                    .field(r.n_cx);
                csv.end_row();
                e_av.push_back(r.e_av);
                n_av.push_back(r.n_av);
                e_ite.push_back(r.e_ite);
                n_ite.push_back(r.n_ite);
                max_infid = std::max(max_infid, r.infid);
                cx_sum += r.n_cx;
                if (dev_n == 0.0) ++zero_dev;
            }
            agg.field(bases[bi]).field(beta).field(ed_e).field(ed_n)
                .field(spread_metric(e_av, ed_e)).field(spread_metric(n_av, ed_n))
                .field(spread_metric(e_ite, ed_e)).field(spread_metric(n_ite, ed_n))
                .field(max_infid).field(double(zero_dev) / m).field(cx_sum / m);
            agg.end_row();
        }
    }
}

void run_avqmetts(json& cfg, const fs::path& out_dir, uint64_t seed) {
    const ModelParams p = model_from(cfg);
    const std::vector<double> betas = beta_list(cfg);
    WalkConfig walk = walk_from(cfg, seed);
    walk.backend = BackendKind::Avqite;
    write_manifest(cfg, out_dir);

    const EdRef ref(p);
    Csv csv(out_dir / "avqmetts.csv",
            "beta,e_mean,e_stderr,delta_e,n_mean,n_stderr,delta_n,ed_e,ed_n,"
            "mean_n_theta,mean_n_cx");
    for (double beta : betas) {
        const SampleSet set = run_chain(p, beta, walk, standard_observables(p));
        set.write_csv((out_dir / ("samples_beta" + std::to_string(beta) + ".csv")).string());
        const Estimate e = estimate(set, "energy");
        const Estimate n = estimate(set, "number");
        double cx = 0.0, nt = 0.0;
        long cnt = 0;
        for (const StepRecord& rec : set.records)
            if (rec.kept) {
                cx += rec.n_cx;
                nt += rec.n_theta;
                ++cnt;
            }
        const double ed_e = ref.eps(beta, p.mu), ed_n = ref.n(beta, p.mu);
        csv.field(beta).field(e.mean / p.L).field(e.stderr_ / p.L)
            .field(relative_error(e.mean / p.L, ed_e))
            .field(n.mean / p.L).field(n.stderr_ / p.L)
            .field(relative_error(n.mean / p.L, ed_n))
            .field(ed_e).field(ed_n).field(nt / cnt).field(cx / cnt);
        csv.end_row();
    }
}

void run_ncx_scaling(json& cfg, const fs::path& out_dir, uint64_t seed) {
    std::vector<double> l_values = number_list(need(cfg, "l_values"), "l_values");
    const double h = get_or(cfg, "h", 0.0);
    const double target = get_or(cfg, "target_filling", 0.25);
    const std::vector<double> betas = beta_list(cfg);
    std::vector<std::string> bases;
    for (const auto& b : need(cfg, "bases")) bases.push_back(b.get<std::string>());
    const int m = get_or(cfg, "m_samples", 16);
    const AvqiteOptions opts = avqite_from(cfg);
    write_manifest(cfg, out_dir);

    Csv csv(out_dir / "ncx_samples.csv", "L,basis,beta,mu,sample,cps,n_theta,n_cx");
    Csv fit(out_dir / "ncx_fit.csv", "basis,beta,a,b,n_points");
    std::map<std::pair<std::string, double>, std::vector<std::pair<double, double>>> means;
    for (size_t li = 0; li < l_values.size(); ++li) {
        const int L = static_cast<int>(l_values[li]);
        const double mu = calibrate_mu(L, h, target);
        const PauliSum h_gc = build_grand_canonical(ModelParams{L, h, mu});
        for (size_t bi = 0; bi < bases.size(); ++bi) {
            const Basis basis = basis_from(bases[bi]);
            const OperatorPool pool = build_pool(basis, L);
            const auto cps_set = draw_cps_set(L + 1, basis, m, seed,
                                              static_cast<uint32_t>(li * 8 + bi));
            for (double beta : betas) {
                std::vector<long> cxs(m);
                std::vector<int> nts(m);
                std::string error;
#pragma omp parallel for schedule(dynamic)
                for (int i = 0; i < m; ++i) {
                    try {
                        const EvolutionResult ev =
                            evolve(cps_set[i], h_gc, beta / 2.0, pool, opts);
                        cxs[i] = ev.report.n_cx;
                        nts[i] = ev.report.n_theta;
                    } catch (const std::exception& e) {
#pragma omp critical
                        if (error.empty()) error = e.what();
                    }
                }
                if (!error.empty()) throw NonConvergenceError(error);
                double mean = 0.0;
                for (int i = 0; i < m; ++i) {
                    csv.field(L).field(bases[bi]).field(beta).field(mu).field(i)
                        .field(cps_set[i].label()).field(nts[i]).field(cxs[i]);
                    csv.end_row();
                    mean += cxs[i];
                }
                means[{bases[bi], beta}].push_back({double(L), mean / m});
            }
        }
    }
    for (const auto& [key, pts] : means) {
        if (pts.size() < 3)
            throw ConfigError("power-law fit needs at least 3 system sizes");
        // least squares on log N_CX = log a + b log L
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [L, v] : pts) {
            const double x = std::log(L), y = std::log(v);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = double(pts.size());
        const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double a = std::exp((sy - b * sx) / n);
        fit.field(key.first).field(key.second).field(a).field(b)
            .field(static_cast<long>(pts.size()));
        fit.end_row();
    }
}

}  // namespace

double calibrate_mu(int L, double h, double target_filling) {
    if (!(target_filling > 0.0 && target_filling < 1.0))
        throw ConfigError("target_filling must be in (0, 1)");
    const std::vector<double> e = sector_ground_energies(L, h);
    const int k0 = static_cast<int>(std::lround(target_filling * L));
    double lo = -2.0, hi = 2.0;
    for (int k = 0; k < static_cast<int>(e.size()); ++k) {
        if (k < k0) lo = std::max(lo, (e[k0] - e[k]) / (k0 - k));
        if (k > k0) hi = std::min(hi, (e[k] - e[k0]) / (k - k0));
    }
    if (!(lo < hi))
        throw NonConvergenceError("no chemical-potential plateau for filling " +
                                  std::to_string(target_filling) + " at L=" +
                                  std::to_string(L));
    return 0.5 * (lo + hi);
}

nlohmann::json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
}

void run_experiment(nlohmann::json config, const std::filesystem::path& out_dir,
                    long long seed_override, int workers_override) {
    if (!config.is_object()) throw ConfigError("config root must be an object");
    const std::string kind = need(config, "experiment").get<std::string>();
    if (seed_override >= 0) config["seed"] = seed_override;
    if (workers_override >= 1) config["workers"] = workers_override;
    const uint64_t seed = get_or(config, "seed", 0);
#ifdef _OPENMP
    if (config.contains("workers")) omp_set_num_threads(config["workers"].get<int>());
#endif
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw ConfigError("cannot create output directory: " + out_dir.string());
    config["out_dir"] = out_dir.string();

    if (kind == "ed-reference")
        run_ed_reference(config, out_dir);
    else if (kind == "eos")
        run_eos(config, out_dir, seed);
    else if (kind == "basis-study")
        run_basis_study(config, out_dir, seed);
    else if (kind == "friedel")
        run_friedel(config, out_dir, seed);
    else if (kind == "strings")
        run_strings(config, out_dir, seed);
    else if (kind == "avqite-accuracy")
        run_avqite_accuracy(config, out_dir, seed);
    else if (kind == "avqmetts")
        run_avqmetts(config, out_dir, seed);
    else if (kind == "ncx-scaling")
        run_ncx_scaling(config, out_dir, seed);
    else
        throw ConfigError("unknown experiment kind: " + kind);
}

}  // namespace z2metts
