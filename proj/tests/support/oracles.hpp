// Independent dense linear-algebra oracles for the tests. Operators are
// built by explicit Kronecker products from single-qubit matrices and
// exponentiated by full diagonalization, sharing no code with the library
// kernels beyond operator text labels.
#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "z2metts/pauli.hpp"
#include "z2metts/statevector.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// 2x2 matrix for 'I', 'X', 'Y', 'Z'.
Mat pauli1(char c);

// Kronecker chain; letters[0] acts on site 0 = most significant index bit.
Mat kron_chain(const std::string& letters);

// Letter string ("IXZI"...) from a site-indexed label like "X1 Z2".
std::string letters_from_label(const std::string& label, int n_sites);

Mat dense_of(const z2metts::PauliString& s);
Mat dense_of(const z2metts::PauliSum& op);

// e^{scale * h} for Hermitian h.
Mat expm_hermitian(const Mat& h, double scale);

Vec normalized(Vec v);

// Central finite difference of f at x with step.
double fd_derivative(const std::function<double(double)>& f, double x, double step);

}  // namespace oracle
