#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kinmodes/dispersion.hpp"
#include "kinmodes/projection.hpp"

namespace kinmodes {

// Discretization of psi -> -(Ltilde psi + i eta <v>^beta v1 psi) in the
// quadrature-weighted basis y = sqrt(w) psi, where the discrete L^2(M) inner
// product is the standard one: a diagonal 1 - i eta b minus a rank-3 (or
// rank-1) real correction sum_k c_k c_k^T. Kept in structured form so that
// operator applications cost O(n); the dense matrix is materialized only
// where a full eigendecomposition is required.
struct PerturbedOperator {
    Eigen::ArrayXd b;                  // <v>^beta v1 per node
    std::vector<Eigen::VectorXd> c;    // sqrt(w) <v>^{-beta/2} e_k
    double eta = 0.0;

    Eigen::Index size() const { return b.size(); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        Eigen::VectorXcd y = x + (Complex(0.0, -eta) * (b * x.array())).matrix();
        for (const auto& ck : c) y -= ck.cast<Complex>() * ck.cast<Complex>().dot(x);
        return y;
    }

    Eigen::ArrayXcd diagonal() const {
        Eigen::ArrayXcd d = (1.0 + Complex(0.0, -eta) * b.cast<Complex>());
        for (const auto& ck : c) d -= ck.array().square().cast<Complex>();
        return d;
    }

    Eigen::MatrixXcd dense() const {
        const Eigen::Index n = size();
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& ck : c) M.noalias() -= (ck * ck.transpose()).cast<Complex>();
        for (Eigen::Index i = 0; i < n; ++i) M(i, i) += Complex(1.0, -eta * b[i]);
        return M;
    }
};

inline PerturbedOperator make_perturbed_operator(const ProjectionBasis& basis, double eta) {
    const VelocityGrid& g = *basis.grid;
    PerturbedOperator op;
    op.eta = eta;
    op.b = g.vpow(g.spec.beta) * g.v1();
    const Eigen::ArrayXd sqw = g.w.sqrt();
    const Eigen::ArrayXd wbh = g.vpow(-0.5 * g.spec.beta);
    for (const auto& ek : basis.e)
        op.c.push_back((sqw * wbh * ek.values.real().array()).matrix());
    return op;
}

// Dense matrix of the perturbed generator (complex symmetric; Hermitian PSD
// at eta = 0 with kernel dimension equal to the number of invariants).
inline Eigen::MatrixXcd assemble_perturbed_operator(const ProjectionBasis& basis, double eta) {
    return make_perturbed_operator(basis, eta).dense();
}

// Winding number of an analytic function along the circle |z| = radius,
// refining the sampling until consecutive phase increments are unambiguous.
template <class F> inline int winding_number(F&& f, double radius, int q0 = 64) {
    const double pi = 3.14159265358979323846;
    int q = q0;
    while (true) {
        std::vector<Complex> vals(q);
        for (int k = 0; k < q; ++k) {
            const double th = 2.0 * pi * k / q;
            vals[k] = f(Complex(radius * std::cos(th), radius * std::sin(th)));
        }
        double total = 0.0, maxstep = 0.0;
        bool ok = true;
        for (int k = 0; k < q; ++k) {
            const Complex a = vals[k], b = vals[(k + 1) % q];
            if (std::abs(a) == 0.0 || std::abs(b) == 0.0) {
                ok = false;
                break;
            }
            const double d = std::arg(b / a);
            maxstep = std::max(maxstep, std::abs(d));
            total += d;
        }
        if (ok && maxstep < 0.5 * pi) return static_cast<int>(std::lround(total / (2.0 * pi)));
        if (q > 1 << 14)
            throw CountMismatch("winding_number: contour sampling did not stabilize "
                                "(root too close to the contour?)");
        q *= 2;
    }
}

// Eigenvalue census of the discretized generator inside B(0, radius): the
// essential part of the spectrum sits at Re = 1, so the count inside the ball
// equals the winding of the longitudinal dispersion determinant plus twice
// the winding of the transversal relation (the m = 1 sector stands for both
// transverse directions).
struct CensusResult {
    int longitudinal = 0;
    int transversal = 0; // per direction
    int total = 0;
};

inline CensusResult eigenvalue_census(const DispersionSystem& ds, double eta, double radius) {
    CensusResult c;
    c.longitudinal = winding_number([&](Complex z) { return ds.det(eta, z); }, radius);
    c.transversal = winding_number([&](Complex z) { return ds.transversal(eta, z); }, radius);
    c.total = c.longitudinal + 2 * c.transversal;
    return c;
}

namespace detail {

// Left-preconditioned GMRES (Jacobi) for (Op - z) x = b. The shifted operator
// is a diagonal plus a low-rank correction, so the preconditioned system is a
// small perturbation of the identity and a short Krylov space suffices.
template <class Op>
inline Eigen::VectorXcd gmres_shifted(const Op& M, Complex z, const Eigen::VectorXcd& rhs,
                                      double tol = 1e-13, int max_iter = 80) {
    const Eigen::Index n = rhs.size();
    Eigen::ArrayXcd pinv = M.diagonal() - z;
    for (Eigen::Index i = 0; i < n; ++i)
        pinv[i] = (std::abs(pinv[i]) > 1e-300) ? 1.0 / pinv[i] : Complex(1.0, 0.0);
    auto apply = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
        Eigen::VectorXcd y = M.apply(x) - z * x;
        return (y.array() * pinv).matrix();
    };
    const Eigen::VectorXcd b = (rhs.array() * pinv).matrix();
    const double bnorm = b.norm();
    if (bnorm == 0.0) return Eigen::VectorXcd::Zero(n);

    std::vector<Eigen::VectorXcd> V;
    V.push_back(b / bnorm);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(max_iter + 1, max_iter);
    std::vector<Complex> cs(max_iter), sn(max_iter);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(max_iter + 1);
    g[0] = bnorm;

    int m = 0;
    for (; m < max_iter; ++m) {
        Eigen::VectorXcd wv = apply(V[m]);
        for (int i = 0; i <= m; ++i) {
            H(i, m) = V[i].dot(wv); // conjugate dot
            wv -= H(i, m) * V[i];
        }
        const double hnext = wv.norm();
        H(m + 1, m) = hnext;
        for (int i = 0; i < m; ++i) {
            const Complex t = cs[i] * H(i, m) + sn[i] * H(i + 1, m);
            H(i + 1, m) = -std::conj(sn[i]) * H(i, m) + cs[i] * H(i + 1, m);
            H(i, m) = t;
        }
        const double denom = std::sqrt(std::norm(H(m, m)) + std::norm(H(m + 1, m)));
        if (denom == 0.0) break;
        cs[m] = std::abs(H(m, m)) / denom;
        sn[m] = (std::abs(H(m, m)) > 0)
                    ? (H(m, m) / std::abs(H(m, m))) * std::conj(H(m + 1, m)) / denom
                    : Complex(1.0, 0.0);
        H(m, m) = cs[m] * H(m, m) + sn[m] * H(m + 1, m);
        H(m + 1, m) = 0.0;
        g[m + 1] = -std::conj(sn[m]) * g[m];
        g[m] = cs[m] * g[m];
        const double res = std::abs(g[m + 1]) / bnorm;
        if (hnext < 1e-300 || res < tol) {
            ++m;
            break;
        }
        if (m + 1 < max_iter) V.push_back(wv / hnext);
    }
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(m);
    for (int i = m - 1; i >= 0; --i) {
        Complex s = g[i];
        for (int j = i + 1; j < m; ++j) s -= H(i, j) * y[j];
        y[i] = s / H(i, i);
    }
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < m; ++i) x += y[i] * V[i];
    return x;
}

} // namespace detail

// Eigenvalue of the discretized generator nearest the shift, by
// shift-inverted Rayleigh-quotient iteration with GMRES inner solves. This is
// the matrix route of the method cross-validation: it touches only the
// assembled operator, never the dispersion relation.
template <class Op>
inline Complex matrix_eigenvalue_near(const Op& M, Complex shift, double tol = 1e-12,
                                      int max_iter = 14) {
    const Eigen::Index n = M.size();
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = Complex(1.0 + 0.37 * std::sin(0.7 * static_cast<double>(i)),
                       0.21 * std::cos(1.3 * static_cast<double>(i)));
    v.normalize();
    Complex z = shift;
    Complex rho = z;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd wv = detail::gmres_shifted(M, z, v);
        const double wn = wv.norm();
        if (!(wn > 0.0) || !std::isfinite(wn))
            throw EigendecompositionFailure("matrix_eigenvalue_near: inner solve failed");
        v = wv / wn;
        const Eigen::VectorXcd Mv = M.apply(v);
        rho = v.dot(Mv);
        const double res = (Mv - rho * v).norm();
        if (res < tol) return rho;
        if (it >= 1) z = rho; // switch to Rayleigh iteration after one step
    }
    return rho;
}

inline Complex matrix_eigenvalue_near(const Eigen::MatrixXcd& M, Complex shift,
                                      double tol = 1e-12, int max_iter = 14) {
    struct DenseOp {
        const Eigen::MatrixXcd& A;
        Eigen::Index size() const { return A.rows(); }
        Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return A * x; }
        Eigen::ArrayXcd diagonal() const { return A.diagonal().array(); }
    };
    return matrix_eigenvalue_near(DenseOp{M}, shift, tol, max_iter);
}

} // namespace kinmodes
