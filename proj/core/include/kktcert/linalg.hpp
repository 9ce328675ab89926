#pragma once

#include <span>
#include <vector>

namespace kktcert {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// y = a + s*b
Vec axpy(std::span<const double> a, double s, std::span<const double> b);

// Minimizes ||A z - b||_2 for a dense matrix given by columns (each of
// length rows). Householder QR; near-dependent columns get z = 0.
Vec least_squares(const std::vector<Vec>& columns, const Vec& b);

// Nonnegative least squares min_{z >= 0} ||A z - b||_2, Lawson-Hanson
// active-set iteration.
Vec nnls(const std::vector<Vec>& columns, const Vec& b);

// Eigenvalues of a small dense symmetric matrix by cyclic Jacobi rotations,
// returned in ascending order.
Vec jacobi_eigenvalues(std::vector<Vec> a);

}  // namespace kktcert
