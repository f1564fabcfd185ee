#include "z2metts/krylov.hpp"

#include <cmath>
#include <stdexcept>

#include "z2metts/rng.hpp"

namespace z2metts {

namespace {

struct SubstepResult {
    Eigen::VectorXcd state;  // normalized
    double log_norm = 0.0;
    double error = 0.0;  // relative truncation estimate
};

// One Lanczos substep of e^{-dt A} on a normalized vector.
SubstepResult lanczos_substep(const PauliSum& gen, const Statevector& psi, double dt,
                              const KrylovOptions& opts) {
    const Eigen::Index dim = psi.dim();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.max_subspace, dim));
    Eigen::MatrixXcd V(dim, m_max);
    Eigen::VectorXd alpha(m_max), beta(m_max);
    V.col(0) = psi.amps;

    int m = m_max;
    bool invariant = false;
    for (int j = 0; j < m_max; ++j) {
        Statevector w = apply(gen, Statevector(psi.n_sites, V.col(j)));
        alpha[j] = V.col(j).dot(w.amps).real();
        w.amps -= alpha[j] * V.col(j);
        if (j > 0) w.amps -= beta[j - 1] * V.col(j - 1);
        // one full reorthogonalization pass
        w.amps -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w.amps);
        const double b = w.amps.norm();
        if (j + 1 == m_max) break;
        if (b < 1e-12) {
            m = j + 1;
            invariant = true;
            break;
        }
        beta[j] = b;
        V.col(j + 1) = w.amps / b;
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double lam0 = lam.minCoeff();
    // y = e^{-dt (T - lam0)} e_1, with the lam0 shift tracked in log space
    Eigen::VectorXd y =
        es.eigenvectors() *
        ((-dt * (lam.array() - lam0)).exp() * es.eigenvectors().row(0).transpose().array())
            .matrix();
    const double ynorm = y.norm();

    SubstepResult out;
    out.state = V.leftCols(m) * (y / ynorm).cast<cplx>();
    const double renorm = out.state.norm();
    out.state /= renorm;
    out.log_norm = std::log(ynorm) - dt * lam0;
    out.error = invariant ? 0.0 : std::abs(y[m - 1]) / ynorm;
    return out;
}

}  // namespace

std::pair<Statevector, double> ite_propagate(const PauliSum& gen, const Statevector& psi0,
                                             double tau, const KrylovOptions& opts) {
    if (tau < 0) throw std::invalid_argument("krylov: tau must be >= 0");
    if (!gen.is_hermitian()) throw std::invalid_argument("krylov: generator must be Hermitian");
    Statevector state = psi0;
    double log_norm = 0.0;
    double remaining = tau;
    double dt = std::min(opts.initial_substep, tau > 0 ? tau : 1.0);
    while (remaining > 0) {
        const double step = std::min(dt, remaining);
        SubstepResult r = lanczos_substep(gen, state, step, opts);
        if (r.error > opts.substep_tol && step > 1e-8) {
            dt = step / 2;
            continue;
        }
        state.amps = std::move(r.state);
        log_norm += r.log_norm;
        remaining -= step;
        if (r.error < opts.substep_tol / 100) dt = step * 1.5;
    }
    return {std::move(state), log_norm};
}

MettsRecord exact_ite(const ClassicalProductState& cps, const PauliSum& generator, double tau,
                      const KrylovOptions& opts) {
    MettsRecord rec;
    rec.source_cps = cps;
    auto [state, log_norm] = ite_propagate(generator, cps_to_state(cps), tau, opts);
    rec.state = std::move(state);
    rec.logP = 2.0 * log_norm;
    return rec;
}

double lanczos_lowest(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                      Eigen::Index dim, uint64_t seed, int max_iters, double tol) {
    if (dim == 1) return matvec(Eigen::VectorXd::Ones(1))[0];
    const int m_max = static_cast<int>(std::min<Eigen::Index>(max_iters, dim));
    Eigen::MatrixXd V(dim, m_max);
    Eigen::VectorXd alpha(m_max), beta(m_max);

    Rng rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v0(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v0[i] = gauss(rng);
    V.col(0) = v0 / v0.norm();

    double prev = std::numeric_limits<double>::infinity();
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXd w = matvec(V.col(j));
        alpha[j] = V.col(j).dot(w);
        w -= alpha[j] * V.col(j);
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        m = j + 1;
        // check convergence of the lowest Ritz value every few iterations
        if (m >= 2 && (m % 5 == 0 || j + 1 == m_max)) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
            const double cur = es.eigenvalues().minCoeff();
            if (std::abs(cur - prev) < tol * std::max(1.0, std::abs(cur))) return cur;
            prev = cur;
        }
        const double b = w.norm();
        if (b < 1e-13) break;  // invariant subspace
        if (j + 1 < m_max) {
            beta[j] = b;
            V.col(j + 1) = w / b;
        }
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace z2metts
