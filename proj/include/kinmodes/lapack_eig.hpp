#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kinmodes/errors.hpp"

#ifndef KINMODES_NO_LAPACK
#include <lapacke.h>
#endif

namespace kinmodes {

struct EigenDecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors; // right eigenvectors as columns
};

// Full eigendecomposition of a dense complex matrix. LAPACK zgeev where
// available (it is much faster than Eigen's unblocked complex Schur at the
// sizes the evolution module uses); Eigen as a fallback.
inline EigenDecomposition full_eigendecomposition(const Eigen::MatrixXcd& M) {
    const Eigen::Index n = M.rows();
    EigenDecomposition out;
#ifndef KINMODES_NO_LAPACK
    Eigen::MatrixXcd A = M; // zgeev overwrites
    out.values.resize(n);
    out.vectors.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', 'V', static_cast<lapack_int>(n),
        reinterpret_cast<lapack_complex_double*>(A.data()), static_cast<lapack_int>(n),
        reinterpret_cast<lapack_complex_double*>(out.values.data()), nullptr, 1,
        reinterpret_cast<lapack_complex_double*>(out.vectors.data()), static_cast<lapack_int>(n));
    if (info != 0)
        throw EigendecompositionFailure("zgeev failed with info = " + std::to_string(info));
#else
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, true);
    if (es.info() != Eigen::Success)
        throw EigendecompositionFailure("ComplexEigenSolver did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
#endif
    return out;
}

} // namespace kinmodes
