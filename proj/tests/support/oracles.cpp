#include "support/oracles.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace oracle {

Mat pauli1(char c) {
    Mat m(2, 2);
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("bad letter");
    }
    return m;
}

Mat kron_chain(const std::string& letters) {
    Mat out = Mat::Identity(1, 1);
    for (char c : letters) {
        const Mat p = pauli1(c);
        Mat next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block(i * 2, j * 2, 2, 2) = out(i, j) * p;
        out = std::move(next);
    }
    return out;
}

std::string letters_from_label(const std::string& label, int n_sites) {
    std::string letters(n_sites, 'I');
    if (label == "I") return letters;
    std::istringstream in(label);
    std::string tok;
    while (in >> tok) {
        const char c = tok[0];
        const int site = std::stoi(tok.substr(1));
        if (site < 0 || site >= n_sites) throw std::invalid_argument("bad site in label");
        letters[site] = c;
    }
    return letters;
}

Mat dense_of(const z2metts::PauliString& s) {
    return kron_chain(letters_from_label(s.label(), s.n_sites));
}

Mat dense_of(const z2metts::PauliSum& op) {
    const Eigen::Index dim = Eigen::Index(1) << op.n_sites();
    Mat out = Mat::Zero(dim, dim);
    for (const auto& term : op.terms()) out += term.coeff * dense_of(term.string);
    return out;
}

Mat expm_hermitian(const Mat& h, double scale) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    return es.eigenvectors() *
           (scale * es.eigenvalues().array()).exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
}

Vec normalized(Vec v) { return v / v.norm(); }

double fd_derivative(const std::function<double(double)>& f, double x, double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace oracle
