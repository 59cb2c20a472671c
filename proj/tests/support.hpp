#pragma once

#include <random>

#include "webspline/assembly.hpp"

namespace test {

// Non-uniform knot vector with `cells` spans of random length (ratio up to 5).
webspline::KnotVector random_knots(std::mt19937& rng, int degree, int cells);

// max over tensor indices k, k' of |lambda_k(piece of b_k' at tau_k) - delta|.
double biorthogonality_defect(const webspline::KnotVector& kx, const webspline::KnotVector& ky);

// H1 Gram matrices: web-splines B_i, and the raw weighted splines w b_k for
// all relevant k (outer ones included).
webspline::SparseMatrix web_gram(const webspline::WebBasis& basis,
                                 const webspline::DomainQuadrature& quad);
Eigen::MatrixXd raw_gram(const webspline::WebBasis& basis, const webspline::DomainQuadrature& quad);

// Spectral condition number of a symmetric positive definite matrix.
double condition(const Eigen::MatrixXd& m);

// Relative error between J d and the central difference of the residual in
// direction d at a random iterate.
double jacobian_defect(const webspline::WebBasis& basis, const webspline::DomainQuadrature& quad,
                       double p, double eps, const webspline::ScalarField& f, std::mt19937& rng);

}  // namespace test
