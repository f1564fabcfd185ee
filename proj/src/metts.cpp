#include "z2metts/metts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "z2metts/observables.hpp"
#include "z2metts/statevector.hpp"

namespace z2metts {

CollapseSchedule CollapseSchedule::parse(const std::string& text) {
    if (text.size() == 1) return fixed(parse_basis(text[0]));
    if (text.size() == 2) return alternating(parse_basis(text[0]), parse_basis(text[1]));
    throw std::invalid_argument("bad collapse schedule: " + text);
}

std::string CollapseSchedule::label() const {
    if (is_fixed()) return std::string(1, basis_char(basis_odd));
    return std::string{basis_char(basis_odd), basis_char(basis_even)};
}

void WalkConfig::validate() const {
    if (s_w < 1) throw std::invalid_argument("s_w must be >= 1");
    if (s_0 < 1) throw std::invalid_argument("s_0 must be >= 1");
    if (warmup < 0) throw std::invalid_argument("warmup must be >= 0");
}

void ObservableSet::add(std::string name, PauliSum op) {
    names.push_back(std::move(name));
    ops.push_back(std::move(op));
}

namespace {

std::vector<StepRecord> run_walk(int walk, const ModelParams& params, double beta,
                                 const WalkConfig& config, const ObservableSet& obs,
                                 const PauliSum& h_gc,
                                 const std::map<Basis, OperatorPool>& pools) {
    const int n = params.n_spins();
    const double tau = beta / 2.0;
    std::vector<StepRecord> out;
    out.reserve(config.total_steps());

    Rng init_rng = make_rng(config.master_seed, walk, 0, RngPurpose::InitCps);
    ClassicalProductState cps = random_cps(n, config.schedule.at(1), init_rng);

    for (int step = 1; step <= config.total_steps(); ++step) {
        StepRecord rec;
        rec.walk = walk;
        rec.step = step;
        rec.kept = step > config.warmup;
        rec.source_cps = cps.label();

        Statevector state;
        if (config.backend == BackendKind::Exact) {
            MettsRecord metts = exact_ite(cps, h_gc, tau, config.krylov);
            state = std::move(metts.state);
            rec.log_weight = metts.logP;
        } else {
            AvqiteOptions opts = config.avqite;
            if (!opts.trace_path.empty())
                opts.trace_path += ".w" + std::to_string(walk) + ".s" + std::to_string(step)
                                 + ".jsonl";
            EvolutionResult ev = evolve(cps, h_gc, tau, pools.at(cps.bases[0]), opts);
            state = std::move(ev.state);
            rec.n_cx = ev.report.n_cx;
            rec.n_theta = ev.report.n_theta;
        }

        rec.values.reserve(obs.ops.size());
        for (const PauliSum& op : obs.ops) rec.values.push_back(expectation(op, state));
        if (obs.site_occupations)
            rec.occupations = site_occupations(state, params.L).values;
        if (obs.bitstring_shots > 0) {
            Rng shot_rng = make_rng(config.master_seed, walk, step, RngPurpose::Shots);
            // Record '1' for the Z=+1 outcome (basis bit 0): the field term
            // +h*sum(Z) then penalizes long runs of 1s, matching the string /
            // antistring naming used for the run-length statistics.
            const uint32_t mask = (n >= 32) ? ~0u : ((1u << n) - 1u);
            for (uint32_t bits : sample_bitstrings(state, obs.bitstring_shots, shot_rng))
                rec.bitstrings.push_back(bitstring_to_string(~bits & mask, n));
        }

        rec.collapse_basis = config.schedule.at(step);
        Rng collapse_rng = make_rng(config.master_seed, walk, step, RngPurpose::Collapse);
        cps = collapse(state, rec.collapse_basis, collapse_rng).first;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

SampleSet run_chain(const ModelParams& params, double beta, const WalkConfig& config,
                    const ObservableSet& observables) {
    params.validate();
    config.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");

    const PauliSum h_gc = build_grand_canonical(params);
    std::map<Basis, OperatorPool> pools;
    if (config.backend == BackendKind::Avqite)
        for (Basis b : {Basis::X, Basis::Y, Basis::Z})
            pools.emplace(b, build_pool(b, params.L));

    SampleSet set;
    set.params = params;
    set.beta = beta;
    set.config = config;
    set.names = observables.names;

    std::vector<std::vector<StepRecord>> per_walk(config.s_w);
    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (int w = 0; w < config.s_w; ++w) {
        try {
            per_walk[w] = run_walk(w, params, beta, config, observables, h_gc, pools);
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty())
                error = "walk " + std::to_string(w) + ": " + e.what();
        }
    }
    if (!error.empty()) throw NonConvergenceError(error);

    for (auto& walk_records : per_walk)
        for (auto& rec : walk_records) set.records.push_back(std::move(rec));
    return set;
}

std::vector<double> SampleSet::kept_values(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("unknown observable: " + name);
    const size_t col = static_cast<size_t>(it - names.begin());
    std::vector<double> out;
    for (const StepRecord& rec : records)
        if (rec.kept) out.push_back(rec.values[col]);
    return out;
}

void SampleSet::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "walk,step,kept,collapse_basis,log_weight";
    for (const std::string& name : names) out << "," << name;
    const size_t n_occ = records.empty() ? 0 : records.front().occupations.size();
    for (size_t i = 1; i <= n_occ; ++i) out << ",n_" << i;
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        out << "," << buf;
    };
    for (const StepRecord& rec : records) {
        out << rec.walk << "," << rec.step << "," << (rec.kept ? 1 : 0) << ","
            << basis_char(rec.collapse_basis);
        put(rec.log_weight);
        for (double v : rec.values) put(v);
        for (double v : rec.occupations) put(v);
        out << "\n";
    }
}

namespace {

Estimate pooled(const std::vector<double>& vals) {
    if (vals.size() < 2) throw std::invalid_argument("need at least 2 kept records");
    Estimate est;
    est.n = static_cast<long>(vals.size());
    for (double v : vals) est.mean += v;
    est.mean /= est.n;
    double ss = 0.0;
    for (double v : vals) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / (est.n - 1)) / std::sqrt(static_cast<double>(est.n));
    return est;
}

}  // namespace

Estimate estimate(const SampleSet& samples, const std::string& observable_name) {
    return pooled(samples.kept_values(observable_name));
}

Estimate estimate_blocked(const SampleSet& samples, const std::string& observable_name) {
    const auto it = std::find(samples.names.begin(), samples.names.end(), observable_name);
    if (it == samples.names.end())
        throw std::invalid_argument("unknown observable: " + observable_name);
    const size_t col = static_cast<size_t>(it - samples.names.begin());
    std::map<int, std::pair<double, long>> walks;
    for (const StepRecord& rec : samples.records)
        if (rec.kept) {
            walks[rec.walk].first += rec.values[col];
            walks[rec.walk].second += 1;
        }
    std::vector<double> means;
    for (auto& [w, acc] : walks) means.push_back(acc.first / acc.second);
    return pooled(means);
}

std::vector<Estimate> running_estimate(const SampleSet& samples,
                                       const std::string& observable_name) {
    const auto it = std::find(samples.names.begin(), samples.names.end(), observable_name);
    if (it == samples.names.end())
        throw std::invalid_argument("unknown observable: " + observable_name);
    const size_t col = static_cast<size_t>(it - samples.names.begin());

    // values[k] collects the (k+1)-th kept step of every walk.
    std::map<int, int> kept_index;
    std::vector<std::vector<double>> by_step;
    for (const StepRecord& rec : samples.records) {
        if (!rec.kept) continue;
        const int k = kept_index[rec.walk]++;
        if (static_cast<size_t>(k) >= by_step.size()) by_step.resize(k + 1);
        by_step[k].push_back(rec.values[col]);
    }
    std::vector<Estimate> out;
    std::vector<double> pool;
    for (const auto& step_vals : by_step) {
        pool.insert(pool.end(), step_vals.begin(), step_vals.end());
        out.push_back(pooled(pool));
    }
    return out;
}

}  // namespace z2metts
