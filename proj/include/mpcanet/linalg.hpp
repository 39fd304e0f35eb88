#pragma once

#include <span>
#include <vector>

#include "mpcanet/tensor.hpp"

namespace mpcanet {

/// Eigenpairs of a symmetric matrix.
struct SymmetricEigen {
    std::vector<double> values;  // descending
    DenseMatrix vectors;         // column k pairs with values[k]
};

/// Cyclic Jacobi rotations. Eigenvalues come back sorted descending (stable
/// on exact ties) and each eigenvector column is sign-canonicalized so that
/// its largest-magnitude entry is positive; the first such entry wins on
/// magnitude ties. Only the upper triangle of `a` is read.
SymmetricEigen symmetric_eigen(const DenseMatrix& a);

/// Flip the sign of each column so its largest-magnitude entry is positive.
void canonicalize_column_signs(DenseMatrix& m);

/// Lower-triangular L with a == L L^T; throws NumericError when `a` is not
/// numerically positive definite.
DenseMatrix cholesky(const DenseMatrix& a);

/// Solves L L^T x = b column by column.
DenseMatrix cholesky_solve(const DenseMatrix& lower, const DenseMatrix& b);

/// Solves L y = b (forward substitution) for every column of b.
DenseMatrix forward_substitute(const DenseMatrix& lower, const DenseMatrix& b);

/// Solves L^T x = b (back substitution) for every column of b.
DenseMatrix back_substitute_transposed(const DenseMatrix& lower, const DenseMatrix& b);

/// Max |m^T m - I| over entries; 0 for exactly orthonormal columns.
double orthonormality_defect(const DenseMatrix& m);

/// Largest principal angle (radians) between two orthonormal column spaces.
double max_principal_angle(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace mpcanet
