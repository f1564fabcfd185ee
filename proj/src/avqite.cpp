#include "z2metts/avqite.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>

#include <json.hpp>

namespace z2metts {

namespace {

// In-place v <- cos(theta/2) v - i sin(theta/2) G v for a single unit-norm
// Pauli string G given in index space.
void rotate_inplace(Eigen::VectorXcd& v, const IndexedTerm& t, double theta) {
    const double c = std::cos(0.5 * theta);
    const cplx mis = cplx(0.0, -std::sin(0.5 * theta)) * t.coeff;
    const Eigen::Index dim = v.size();
    if (t.flip == 0) {
        for (Eigen::Index b = 0; b < dim; ++b) {
            const double sgn = (std::popcount(static_cast<uint32_t>(b) & t.sign) & 1) ? -1.0 : 1.0;
            v[b] *= (c + mis * sgn);
        }
        return;
    }
    for (Eigen::Index b = 0; b < dim; ++b) {
        const Eigen::Index b2 = b ^ static_cast<Eigen::Index>(t.flip);
        if (b2 < b) continue;
        const double sb = (std::popcount(static_cast<uint32_t>(b) & t.sign) & 1) ? -1.0 : 1.0;
        const double sb2 = (std::popcount(static_cast<uint32_t>(b2) & t.sign) & 1) ? -1.0 : 1.0;
        const cplx u = v[b];
        const cplx w = v[b2];
        v[b] = c * u + mis * sb2 * w;   // (G v)[b]  = coeff * sign(b^flip) * v[b^flip]
        v[b2] = c * w + mis * sb * u;
    }
}

// Applies the same rotation to the first nrows tangent rows at once. Tangents
// are stored transposed (one row per generator, one column per basis state),
// so each basis pair (b, b^flip) touches two contiguous column segments.
void rotate_rows(Eigen::MatrixXcd& T, Eigen::Index nrows, const IndexedTerm& t,
                 double theta) {
    if (nrows == 0) return;
    const double c = std::cos(0.5 * theta);
    const cplx mis = cplx(0.0, -std::sin(0.5 * theta)) * t.coeff;
    const Eigen::Index dim = T.cols();
    if (t.flip == 0) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index b = 0; b < dim; ++b) {
            const double sgn = (std::popcount(static_cast<uint32_t>(b) & t.sign) & 1) ? -1.0 : 1.0;
            T.col(b).head(nrows) *= (c + mis * sgn);
        }
        return;
    }
#pragma omp parallel
    {
        Eigen::VectorXcd tmp(nrows);
#pragma omp for schedule(static)
        for (Eigen::Index b = 0; b < dim; ++b) {
            const Eigen::Index b2 = b ^ static_cast<Eigen::Index>(t.flip);
            if (b2 < b) continue;
            const double sb = (std::popcount(static_cast<uint32_t>(b) & t.sign) & 1) ? -1.0 : 1.0;
            const double sb2 = (std::popcount(static_cast<uint32_t>(b2) & t.sign) & 1) ? -1.0 : 1.0;
            auto u = T.col(b).head(nrows);
            auto w = T.col(b2).head(nrows);
            tmp = u;
            u = c * u + (mis * sb2) * w;
            w = c * w + (mis * sb) * tmp;
        }
    }
}

// State plus exact tangent vectors a_j = G_j applied at gate j and propagated
// through the remaining gates; |d_j psi> = -(i/2) a_j. Row j of `tangents`
// holds a_j (transposed storage, see rotate_rows).
struct Frame {
    Statevector psi;
    Eigen::MatrixXcd tangents;  // N x dim, row j = a_j
    Eigen::VectorXcd hpsi;
    double e_h = 0.0;
    double e_h2 = 0.0;
    Eigen::VectorXcd uhat;    // uhat_j = <a_j|psi>
    Eigen::MatrixXd metric;   // g (with both Fubini-Study pieces)
    Eigen::VectorXd gradient; // V
};

void refresh_derived(Frame& f, const PauliSum& h_gc) {
    f.hpsi = apply(h_gc, f.psi).amps;
    f.e_h = std::real(f.psi.amps.dot(f.hpsi));
    f.e_h2 = f.hpsi.squaredNorm();
    const Eigen::Index n = f.tangents.rows();
    // <a_j|psi> = conj(sum_b T(j,b) conj(psi_b))
    f.uhat = (f.tangents * f.psi.amps.conjugate()).conjugate();
    // (T T^dagger)(i,j) = <a_j|a_i>; only the (symmetric) real part is used.
    const Eigen::MatrixXcd gramc = f.tangents * f.tangents.adjoint();
    f.metric = 0.25 * (gramc.real() - (f.uhat * f.uhat.transpose()).real());
    f.gradient.resize(n);
    const Eigen::VectorXcd q = (f.tangents * f.hpsi.conjugate()).conjugate();
    for (Eigen::Index i = 0; i < n; ++i) f.gradient[i] = 0.5 * std::imag(q[i]);
}

Frame compute_frame(const Ansatz& a, const PauliSum& h_gc) {
    Frame f;
    f.psi = cps_to_state(a.reference);
    const Eigen::Index dim = f.psi.dim();
    const int n = a.n_params();
    f.tangents.resize(n, dim);
    for (int j = 0; j < n; ++j) {
        const IndexedTerm t = index_term(cplx(1.0, 0.0), a.generators[j]);
        rotate_inplace(f.psi.amps, t, a.thetas[j]);
        rotate_rows(f.tangents, j, t, a.thetas[j]);
        f.tangents.row(j) = apply(a.generators[j], f.psi).amps.transpose();
    }
    refresh_derived(f, h_gc);
    return f;
}

// Extends the frame by one generator at theta = 0. The state, hpsi and the
// existing tangents are unchanged, so only the new border row of the metric
// and the new gradient entry need computing.
void append_tangent(Frame& f, const PauliString& g) {
    const Eigen::VectorXcd act = apply(g, f.psi).amps;
    const Eigen::Index n = f.tangents.rows();
    Eigen::VectorXcd w;  // w_i = <a_new|a_i>
    if (n > 0) w = f.tangents * act.conjugate();
    const cplx un = act.dot(f.psi.amps);  // <a_new|psi>
    f.tangents.conservativeResize(n + 1, Eigen::NoChange);
    f.tangents.row(n) = act.transpose();
    f.uhat.conservativeResize(n + 1);
    f.uhat[n] = un;
    f.metric.conservativeResize(n + 1, n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = 0.25 * (std::real(w[i]) - std::real(un * f.uhat[i]));
        f.metric(n, i) = m;
        f.metric(i, n) = m;
    }
    // G is a unit-norm Pauli string, so <a_new|a_new> = 1.
    f.metric(n, n) = 0.25 * (1.0 - std::real(un * un));
    f.gradient.conservativeResize(n + 1);
    f.gradient[n] = 0.5 * std::imag(act.dot(f.hpsi));
}

void shrink_tangent(Frame& f) {
    const Eigen::Index n = f.tangents.rows() - 1;
    f.tangents.conservativeResize(n, Eigen::NoChange);
    f.uhat.conservativeResize(n);
    f.metric.conservativeResize(n, n);
    f.gradient.conservativeResize(n);
}

double clip_l2(double v) { return v < 0.0 ? 0.0 : v; }

// L^2 at the optimal (minimum-norm least-squares) theta_dot, i.e. with the
// Tikhonov bias removed. Used for growth convergence/stall decisions so that
// tight thresholds are reachable; the time-stepping flow itself stays
// regularized.
double optimal_l2(const Frame& f) {
    const double var = f.e_h2 - f.e_h * f.e_h;
    if (f.metric.rows() == 0) return clip_l2(2.0 * var);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.metric);
    const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    double reduction = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] <= tol) continue;
        const double proj = es.eigenvectors().col(i).dot(f.gradient);
        reduction += proj * proj / es.eigenvalues()[i];
    }
    return clip_l2(2.0 * (var - reduction));
}

EomSolution solve_from_frame(const Frame& f, double lambda) {
    EomSolution sol;
    sol.metric = f.metric;
    sol.gradient = f.gradient;
    const Eigen::Index n = f.metric.rows();
    Eigen::MatrixXd reg = f.metric;
    reg.diagonal().array() += lambda;
    sol.theta_dot = reg.ldlt().solve(f.gradient);
    sol.residual = n > 0 ? (f.metric * sol.theta_dot - f.gradient).norm() : 0.0;
    const double var = f.e_h2 - f.e_h * f.e_h;
    sol.mclachlan_sq = clip_l2(2.0 * (var - f.gradient.dot(sol.theta_dot)));
    sol.optimal_sq = optimal_l2(f);
    return sol;
}

struct GrowScratch {
    Eigen::MatrixXd pinv;  // Moore-Penrose g^+ with an eigenvalue cutoff
    Eigen::VectorXd s0;    // g^+ V
    double base_obj = 0.0; // L^2 at the current pseudo-inverse optimum
};

GrowScratch make_scratch(const Frame& f) {
    GrowScratch sc;
    const Eigen::Index n = f.metric.rows();
    if (n == 0) {
        sc.pinv.resize(0, 0);
        sc.s0.resize(0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.metric);
        const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i)
            if (es.eigenvalues()[i] > tol) inv[i] = 1.0 / es.eigenvalues()[i];
        sc.pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
        sc.s0 = sc.pinv * f.gradient;
    }
    const double var = f.e_h2 - f.e_h * f.e_h;
    sc.base_obj = 2.0 * (var - f.gradient.dot(sc.s0));
    return sc;
}

// Appends generators at theta = 0 until L^2 <= threshold. Returns appended
// strings; f and a are updated in place.
std::vector<PauliString> grow_frame(Frame& f, Ansatz& a, const OperatorPool& pool,
                                    double threshold, const AvqiteOptions& opts) {
    std::vector<PauliString> appended;
    const Eigen::Index dim = f.psi.dim();
    const int n_cand = static_cast<int>(pool.generators.size());
    if (n_cand == 0)
        throw NonConvergenceError("empty operator pool");

    GrowScratch sc = make_scratch(f);
    double l2 = clip_l2(sc.base_obj);
    if (l2 <= threshold) return appended;

    // The state (and hence every candidate action a_c = G_c psi) is fixed
    // during growth because new angles start at zero, so the per-candidate
    // scalars and the cross-overlap matrix R are computed once up front; R
    // then gains one row per appended generator. Candidate actions are
    // processed in chunks so no dim x n_cand matrix is ever materialized.
    constexpr int kChunk = 64;
    Eigen::VectorXd uc(n_cand);      // <G_c>
    Eigen::VectorXd vc(n_cand);      // candidate gradient entry
    Eigen::MatrixXd big_r(f.metric.rows(), n_cand);  // Re<a_i|G_c psi>
    {
        Eigen::MatrixXcd acts(dim, kChunk);
#pragma omp parallel for schedule(dynamic) firstprivate(acts)
        for (int c0 = 0; c0 < n_cand; c0 += kChunk) {
            const int cw = std::min(kChunk, n_cand - c0);
            for (int k = 0; k < cw; ++k)
                acts.col(k) = apply(pool.generators[c0 + k], f.psi).amps;
            uc.segment(c0, cw) =
                (acts.leftCols(cw).adjoint() * f.psi.amps).real();
            const Eigen::VectorXcd qs = acts.leftCols(cw).adjoint() * f.hpsi;
            for (int k = 0; k < cw; ++k) vc[c0 + k] = 0.5 * std::imag(qs[k]);
            if (big_r.rows() > 0)
                big_r.middleCols(c0, cw) =
                    (f.tangents * acts.leftCols(cw).conjugate()).real();
        }
    }
    const Eigen::VectorXd dc = 0.25 * (1.0 - uc.array().square());

    // Candidates whose predicted improvement did not materialize once the
    // bordered metric was actually diagonalized (near-singular Schur
    // complement). Spanned-ness only grows as generators are appended, so an
    // exclusion stays valid for the rest of this growth call.
    std::vector<char> excluded(n_cand, 0);

    while (true) {
        const Eigen::Index n = f.metric.rows();

        // Exact L^2 at the bordered pseudo-inverse optimum for every
        // candidate, via the Schur complement on the cached g^+.
        Eigen::VectorXd schur = dc;
        Eigen::VectorXd vt = vc;
        Eigen::MatrixXd bmat;
        if (n > 0) {
            bmat = 0.25 * (big_r - f.uhat.real() * uc.transpose());
            const Eigen::MatrixXd pb = sc.pinv * bmat;
            schur -= bmat.cwiseProduct(pb).colwise().sum().transpose();
            vt -= bmat.transpose() * sc.s0;
        }
        std::vector<double> scores(n_cand);
        for (int c = 0; c < n_cand; ++c)
            scores[c] = (excluded[c] || schur[c] < 1e-12)
                            ? std::numeric_limits<double>::infinity()
                            : sc.base_obj - 2.0 * vt[c] * vt[c] / schur[c];

        // Append the predicted-best candidate; if the recomputed distance
        // shows no actual improvement, roll it back, exclude it and try the
        // next-best until one works or the round is exhausted.
        bool advanced = false;
        bool rolled_back = false;
        double l2_new = l2;
        while (!advanced) {
            double best = std::numeric_limits<double>::infinity();
            for (double s : scores) best = std::min(best, s);
            int pick = -1;
            if (std::isfinite(best)) {
                for (int c = 0; c < n_cand; ++c) {
                    if (scores[c] > best + opts.tie_tol) continue;
                    if (pick < 0) { pick = c; continue; }
                    if (opts.prefer_low_weight_ties &&
                        weight(pool.generators[c]) < weight(pool.generators[pick]))
                        pick = c;
                }
            }
            // Every candidate lies in the current tangent span: the pool has
            // nothing left to offer at all.
            if (pick < 0 && !rolled_back)
                throw NonConvergenceError(
                    "operator pool exhausted with the McLachlan distance at " +
                    std::to_string(l2));
            // Otherwise no candidate strictly reduces the distance: stop
            // growing and let the integrator continue with the distance it
            // has. The pool simply has no better direction right now.
            if (pick < 0 || best > l2 - opts.min_improvement) return appended;

            const PauliString& g_new = pool.generators[pick];
            append_tangent(f, g_new);

            // Convergence and stall decisions use the unregularised (pseudo-
            // inverse) distance recomputed from the actual bordered metric.
            GrowScratch sc_new = make_scratch(f);
            l2_new = clip_l2(sc_new.base_obj);
            if (l2_new >= l2 - opts.min_improvement && l2_new > threshold) {
                shrink_tangent(f);
                excluded[pick] = 1;
                scores[pick] = std::numeric_limits<double>::infinity();
                rolled_back = true;
                continue;
            }

            a.generators.push_back(g_new);
            Eigen::VectorXd thetas(a.thetas.size() + 1);
            thetas << a.thetas, 0.0;
            a.thetas = std::move(thetas);
            appended.push_back(g_new);
            sc = std::move(sc_new);
            advanced = true;
        }

        // New cross-overlap row against the (unchanged) candidate actions.
        big_r.conservativeResize(n + 1, Eigen::NoChange);
        {
            Eigen::MatrixXcd acts(dim, kChunk);
            const auto a_new = f.tangents.row(n);
#pragma omp parallel for schedule(dynamic) firstprivate(acts)
            for (int c0 = 0; c0 < n_cand; c0 += kChunk) {
                const int cw = std::min(kChunk, n_cand - c0);
                for (int k = 0; k < cw; ++k)
                    acts.col(k) = apply(pool.generators[c0 + k], f.psi).amps;
                big_r.row(n).segment(c0, cw) =
                    (a_new * acts.leftCols(cw).conjugate()).real();
            }
        }

        l2 = l2_new;
        if (l2 <= threshold) break;
    }
    return appended;
}

void write_trace_line(std::ofstream& out, double tau, double dtau,
                      const EomSolution& sol, const Ansatz& a, int grown) {
    nlohmann::json line = {
        {"tau", tau},
        {"dtau", dtau},
        {"n_theta", a.n_params()},
        {"grown", grown},
        {"mclachlan_sq", sol.mclachlan_sq},
        {"optimal_sq", sol.optimal_sq},
        {"residual", sol.residual},
        {"max_theta_dot", sol.theta_dot.size() > 0
                              ? sol.theta_dot.cwiseAbs().maxCoeff()
                              : 0.0},
        {"n_cx", cnot_count(a)},
    };
    out << line.dump() << "\n";
}

}  // namespace

Statevector ansatz_state(const Ansatz& a) {
    Statevector psi = cps_to_state(a.reference);
    for (int j = 0; j < a.n_params(); ++j)
        rotate_inplace(psi.amps, index_term(cplx(1.0, 0.0), a.generators[j]), a.thetas[j]);
    return psi;
}

long cnot_count(const Ansatz& a) {
    long total = 0;
    for (const auto& g : a.generators) total += 2L * (weight(g) - 1);
    return total;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> metric_and_gradient(const Ansatz& a,
                                                                const PauliSum& h_gc) {
    Frame f = compute_frame(a, h_gc);
    return {f.metric, f.gradient};
}

Eigen::VectorXd solve_eom(const Eigen::MatrixXd& g, const Eigen::VectorXd& v,
                          double lambda) {
    Eigen::MatrixXd reg = g;
    reg.diagonal().array() += lambda;
    return reg.ldlt().solve(v);
}

double mclachlan_sq(const Ansatz& a, const PauliSum& h_gc,
                    const Eigen::VectorXd& theta_dot) {
    Frame f = compute_frame(a, h_gc);
    const double var = f.e_h2 - f.e_h * f.e_h;
    return clip_l2(2.0 * (var - f.gradient.dot(theta_dot)));
}

std::pair<Ansatz, std::vector<PauliString>> grow(const Ansatz& a, const OperatorPool& pool,
                                                 const PauliSum& h_gc, double threshold,
                                                 const AvqiteOptions& opts) {
    Ansatz out = a;
    Frame f = compute_frame(out, h_gc);
    std::vector<PauliString> appended = grow_frame(f, out, pool, threshold, opts);
    return {std::move(out), std::move(appended)};
}

EvolutionResult evolve(const ClassicalProductState& cps, const PauliSum& h_gc,
                       double tau_final, const OperatorPool& pool,
                       const AvqiteOptions& opts) {
    if (tau_final < 0.0) throw std::invalid_argument("tau_final must be >= 0");
    EvolutionResult res;
    res.ansatz = Ansatz{cps, {}, Eigen::VectorXd(0)};

    std::ofstream trace;
    if (!opts.trace_path.empty()) {
        trace.open(opts.trace_path, std::ios::app);
        if (!trace) throw std::runtime_error("cannot open trace file: " + opts.trace_path);
    }

    Frame f = compute_frame(res.ansatz, h_gc);
    double tau = 0.0;
    const double tau_eps = 1e-12 * std::max(1.0, tau_final);
    // When the pool cannot improve the distance, growth stops above the
    // threshold. Remember that level and only rescan the pool once the
    // distance has degraded meaningfully past it, instead of every step.
    double stalled_at = 0.0;
    while (tau < tau_final - tau_eps) {
        EomSolution sol = solve_from_frame(f, opts.tikhonov);
        if (sol.optimal_sq > std::max(opts.threshold, 1.25 * stalled_at)) {
            std::vector<PauliString> added =
                grow_frame(f, res.ansatz, pool, opts.threshold, opts);
            for (const auto& g : added)
                res.report.growth_events.push_back({tau, g});
            sol = solve_from_frame(f, opts.tikhonov);
            stalled_at = sol.optimal_sq > opts.threshold ? sol.optimal_sq : 0.0;
        }
        const double max_rate = sol.theta_dot.size() > 0
                                    ? sol.theta_dot.cwiseAbs().maxCoeff()
                                    : 0.0;
        double dtau = max_rate > 0.0 ? opts.step_cap / max_rate : opts.dt_max;
        dtau = std::clamp(dtau, opts.dt_min, opts.dt_max);
        dtau = std::min(dtau, tau_final - tau);
        res.ansatz.thetas += dtau * sol.theta_dot;
        tau += dtau;
        ++res.report.steps;
        res.report.final_mclachlan_sq = sol.optimal_sq;
        if (trace.is_open())
            write_trace_line(trace, tau, dtau, sol, res.ansatz,
                             static_cast<int>(res.report.growth_events.size()));
        if (tau < tau_final - tau_eps) f = compute_frame(res.ansatz, h_gc);
    }
    res.state = ansatz_state(res.ansatz);
    res.report.n_theta = res.ansatz.n_params();
    res.report.n_cx = cnot_count(res.ansatz);
    return res;
}

}  // namespace z2metts
