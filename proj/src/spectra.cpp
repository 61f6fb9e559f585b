#include "kramers/spectra.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "kramers/rng.hpp"

namespace kramers {

namespace {

void refine_and_package(const DiscreteOperator& op, SpectralResult& sr) {
    int k = static_cast<int>(sr.eigenvalues.size());
    double tiny = 1e-8 * op.anorm_inf;
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd v = sr.vectors.col(j);
        if (sr.eigenvalues[j] < tiny)
            sr.eigenvalues[j] = op.energy(v) / v.squaredNorm();
    }
    // ascending order can be perturbed by the refinement of near-ties
    for (int j = 1; j < k; ++j)
        if (sr.eigenvalues[j] < sr.eigenvalues[j - 1])
            std::swap(sr.eigenvalues[j], sr.eigenvalues[j - 1]);

    double scale = std::pow(sr.dx, -0.5 * sr.dim);
    for (int j = 0; j < k; ++j) {
        int imax = 0;
        double best = 0.0;
        for (int i = 0; i < sr.vectors.rows(); ++i) {
            double a = std::abs(sr.vectors(i, j));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (sr.vectors(imax, j) < 0.0) sr.vectors.col(j) *= -1.0;
        sr.vectors.col(j) *= scale / sr.vectors.col(j).norm();
    }
}

SpectralResult dense_path(const DiscreteOperator& op, int k) {
    Eigen::MatrixXd D(op.A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    if (es.info() != Eigen::Success)
        throw NoConvergenceError("dense eigensolver failed");
    SpectralResult sr;
    sr.h = op.h;
    sr.bc = op.bc;
    sr.form_degree = op.form_degree;
    sr.dim = op.dim;
    sr.dx = op.dx;
    sr.vectors.resize(op.A.rows(), k);
    for (int j = 0; j < k; ++j) {
        sr.eigenvalues.push_back(es.eigenvalues()[j]);
        sr.vectors.col(j) = es.eigenvectors().col(j);
        sr.residuals.push_back(
            (op.A * sr.vectors.col(j) - es.eigenvalues()[j] * sr.vectors.col(j))
                .norm());
    }
    refine_and_package(op, sr);
    return sr;
}

// Shift-invert Lanczos with full reorthogonalization on (A + sigma I)^{-1}.
SpectralResult lanczos_path(const DiscreteOperator& op, int k) {
    const int n = static_cast<int>(op.A.rows());
    const double sigma = 1e-9;

    Eigen::SparseMatrix<double> As = op.A;
    for (int i = 0; i < n; ++i) As.coeffRef(i, i) += sigma;
    As.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(As);
    if (ldlt.info() != Eigen::Success)
        throw FactorizationError("LDLT factorization of the shifted operator failed");

    int mmax = std::min(n, std::max(2 * k + 40, 80));
    for (int round = 0; round < 2; ++round) {
        Eigen::MatrixXd V(n, mmax);
        Eigen::VectorXd alpha(mmax), beta(mmax);

        RngStream rs(2718281828ULL, static_cast<uint64_t>(n));
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rs.uniform() - 0.5;
        v.normalize();
        V.col(0) = v;

        int m = 0;
        for (int j = 0; j < mmax; ++j) {
            Eigen::VectorXd w = ldlt.solve(V.col(j));
            alpha[j] = V.col(j).dot(w);
            // two-pass classical Gram-Schmidt against all previous vectors
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXd proj = V.leftCols(j + 1).transpose() * w;
                w.noalias() -= V.leftCols(j + 1) * proj;
            }
            beta[j] = w.norm();
            m = j + 1;
            if (beta[j] < 1e-14 || j + 1 == mmax) break;
            V.col(j + 1) = w / beta[j];
        }

        // Ritz pairs of the tridiagonal projection
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success)
            throw NoConvergenceError("tridiagonal eigensolver failed");

        // largest theta of the inverse <-> smallest lambda of A
        int have = std::min(k, m);
        SpectralResult sr;
        sr.h = op.h;
        sr.bc = op.bc;
        sr.form_degree = op.form_degree;
        sr.dim = op.dim;
        sr.dx = op.dx;
        sr.vectors.resize(n, have);
        bool ok = true;
        for (int j = 0; j < have; ++j) {
            int col = m - 1 - j;
            double theta = es.eigenvalues()[col];
            double lam = 1.0 / theta - sigma;
            Eigen::VectorXd y = V.leftCols(m) * es.eigenvectors().col(col);
            y.normalize();
            double res = (op.A * y - lam * y).norm();
            if (res > 1e-9 * std::max(op.anorm_inf, 1.0)) ok = false;
            sr.eigenvalues.push_back(lam);
            sr.vectors.col(j) = y;
            sr.residuals.push_back(res);
        }
        if (ok && have == k) {
            std::vector<int> order(k);
            for (int j = 0; j < k; ++j) order[j] = j;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return sr.eigenvalues[a] < sr.eigenvalues[b];
            });
            SpectralResult out = sr;
            for (int j = 0; j < k; ++j) {
                out.eigenvalues[j] = sr.eigenvalues[order[j]];
                out.vectors.col(j) = sr.vectors.col(order[j]);
                out.residuals[j] = sr.residuals[order[j]];
            }
            refine_and_package(op, out);
            return out;
        }
        mmax = std::min(n, 2 * mmax);
    }
    throw NoConvergenceError("Lanczos failed to converge the requested window");
}

}  // namespace

SpectralResult smallest_eigenpairs(const DiscreteOperator& op, int k) {
    int n = static_cast<int>(op.A.rows());
    if (k < 1) throw UsageError("need k >= 1 eigenpairs");
    k = std::min(k, n);
    if (n <= 1200) return dense_path(op, k);
    return lanczos_path(op, k);
}

int count_small(const DiscreteOperator& op, double nu) {
    int n = static_cast<int>(op.A.rows());
    int k = std::min(8, n);
    for (;;) {
        SpectralResult sr = smallest_eigenpairs(op, k);
        if (sr.eigenvalues.back() > nu) {
            int c = 0;
            for (double v : sr.eigenvalues)
                if (v <= nu) ++c;
            return c;
        }
        if (k == n)
            throw InconclusiveError("every eigenvalue sits below the counting threshold");
        k = std::min(2 * k, n);
    }
}

std::vector<double> qsd_density(const DiscreteOperator& op, const Grid& grid,
                                const SpectralResult& sr) {
    int n = grid.size();
    std::vector<double> w(n);
    double wmax = 0.0, wmin = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = sr.vectors(i, 0) * std::exp(-op.fshift[i] / op.h);
        wmax = std::max(wmax, w[i]);
        wmin = std::min(wmin, w[i]);
    }
    double scale = std::max(wmax, -wmin);
    if (wmax > 1e-8 * scale && -wmin > 1e-8 * scale)
        throw SignError("ground state changes sign beyond roundoff");
    double total = 0.0;
    if (grid.dim == 1) {
        for (int i = 0; i + 1 < n; ++i)
            total += 0.5 * (std::abs(w[i]) + std::abs(w[i + 1])) * grid.dx;
    } else {
        for (int i = 0; i < n; ++i) total += std::abs(w[i]) * grid.dx * grid.dx;
    }
    for (int i = 0; i < n; ++i) w[i] = std::abs(w[i]) / total;
    return w;
}

namespace {

// Bilinear interpolation of nodal values; missing lattice nodes count as 0.
double interp2(const Grid& g, const std::vector<double>& w, const Pt& p) {
    double sx = (p[0] - g.x0) / g.dx, sy = (p[1] - g.y0) / g.dx;
    int i = static_cast<int>(std::floor(sx)), j = static_cast<int>(std::floor(sy));
    double fx = sx - i, fy = sy - j;
    auto val = [&](int ii, int jj) {
        int id = g.dof_at(ii, jj);
        return id < 0 ? 0.0 : w[id];
    };
    return (1 - fx) * (1 - fy) * val(i, j) + fx * (1 - fy) * val(i + 1, j) +
           (1 - fx) * fy * val(i, j + 1) + fx * fy * val(i + 1, j + 1);
}

}  // namespace

BoundaryDensity exit_density_pde(const DiscreteOperator& op, const Grid& grid,
                                 const SpectralResult& sr) {
    if (op.bc != BC::dirichlet)
        throw UsageError("exit density needs the Dirichlet ground state");
    int n = grid.size();
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = sr.vectors(i, 0) * std::exp(-op.fshift[i] / op.h);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) wsum += w[i];
    if (wsum < 0.0)
        for (int i = 0; i < n; ++i) w[i] = -w[i];

    BoundaryDensity bd;
    double negmass = 0.0, mass = 0.0;
    if (grid.dim == 1) {
        double ml = (4.0 * w[0] - w[1]) / (2.0 * grid.dx);
        double mr = (4.0 * w[n - 1] - w[n - 2]) / (2.0 * grid.dx);
        bd.atoms = true;
        bd.locations = {0.0, 1.0};
        bd.values = {ml, mr};
    } else {
        const int ns = 4096;
        bd.atoms = false;
        bd.measure_step = 2.0 * M_PI * grid.domain.radius / ns;
        for (int s = 0; s < ns; ++s) {
            double t = static_cast<double>(s) / ns;
            Pt bp = grid.domain.boundary_point(t);
            Pt nrm = grid.domain.outward_normal_at(bp);
            Pt p1 = bp - grid.dx * nrm;
            Pt p2 = bp - (2.0 * grid.dx) * nrm;
            double w1 = interp2(grid, w, p1), w2 = interp2(grid, w, p2);
            bd.locations.push_back(2.0 * M_PI * t);
            bd.values.push_back((4.0 * w1 - w2) / (2.0 * grid.dx));
        }
    }
    for (double& v : bd.values) {
        if (v < 0.0) {
            negmass -= v * (bd.atoms ? 1.0 : bd.measure_step);
            v = 0.0;
        }
        mass += v * (bd.atoms ? 1.0 : bd.measure_step);
    }
    if (mass <= 0.0) throw NegativeMassError("exit flux vanished");
    if (negmass > 1e-6 * (mass + negmass))
        throw NegativeMassError("exit density carries negative mass beyond tolerance");
    for (double& v : bd.values) v /= mass;
    return bd;
}

double boundary_tv(const BoundaryDensity& p, const BoundaryDensity& q) {
    if (p.values.size() != q.values.size())
        throw UsageError("boundary densities have different layouts");
    double tv = 0.0;
    for (size_t k = 0; k < p.values.size(); ++k)
        tv += std::abs(p.mass(static_cast<int>(k)) - q.mass(static_cast<int>(k)));
    return 0.5 * tv;
}

}  // namespace kramers
