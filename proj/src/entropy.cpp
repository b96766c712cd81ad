#include "nhqw/entropy.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace nhqw {

namespace {

Eigen::VectorXd singular_values_checked(const Matrix& phi) {
    if (phi.rows() != phi.cols()) throw DomainError("amplitude matrix must be square");
    const double sym = (phi - Matrix(phi.transpose())).norm();
    if (sym > 1e-8 * std::max(1.0, phi.norm()))
        throw NumericalError("two-photon amplitude matrix must be symmetric");
    const double norm = phi.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "two-photon amplitude matrix has norm " << norm << "; normalize it first";
        throw NumericalError(msg.str());
    }
    Eigen::JacobiSVD<Matrix> svd(phi);
    return svd.singularValues();
}

}  // namespace

EntropyResult renyi2_exact(const Matrix& phi) {
    const auto sv = singular_values_checked(phi);
    double tr2 = 0.0;
    for (int i = 0; i < sv.size(); ++i) tr2 += std::pow(sv[i], 4);
    EntropyResult r;
    r.estimator = EntropyResult::Estimator::exact;
    r.s2 = std::max(0.0, -std::log(tr2));
    return r;
}

double renyi_n(const Matrix& phi, double n) {
    if (n <= 0 || n == 1.0) throw DomainError("Renyi order must be positive and not 1");
    const auto sv = singular_values_checked(phi);
    double trn = 0.0;
    for (int i = 0; i < sv.size(); ++i) trn += std::pow(sv[i], 2.0 * n);
    return std::log(trn) / (1.0 - n);
}

EntropyResult renyi2_diagonal(const CorrelationMatrix& gamma) {
    const auto& g = gamma.gamma_normalized;
    if (g.rows() != g.cols()) throw DomainError("correlation matrix must be square");
    const int n = static_cast<int>(g.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g(i, j) < -1e-12) throw DomainError("correlation matrix has negative entries");
    // x_i: bunched weight; f_i collects the unordered pair weights w_ji = 2 g_ji (j < i),
    // so the estimated diagonal of rho_A has unit trace by construction.
    double tr2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::max(g(i, i), 0.0);
        double f = 0.0;
        for (int j = 0; j < i; ++j) f += 2.0 * std::max(g(j, i), 0.0);
        tr2 += (x + f) * (x + f);
    }
    EntropyResult r;
    r.estimator = EntropyResult::Estimator::diagonal;
    r.survival_p2 = gamma.survival_p2;
    r.s2 = std::max(0.0, -std::log(tr2));
    return r;
}

double normalized_entropy(double s2_asym, double s2_sym) { return s2_asym - s2_sym; }

double similarity(const RealVector& p, const RealVector& q) {
    if (p.size() != q.size()) throw DomainError("distributions must have equal length");
    double cross = 0.0, sp = 0.0, sq = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p[i] < -1e-12 || q[i] < -1e-12) throw DomainError("distributions must be non-negative");
        const double a = std::max(p[i], 0.0);
        const double b = std::max(q[i], 0.0);
        cross += std::sqrt(a * b);
        sp += a;
        sq += b;
    }
    if (sp <= 0.0 || sq <= 0.0) throw DomainError("similarity of an all-zero distribution");
    return cross * cross / (sp * sq);
}

double similarity(const RealMatrix& g1, const RealMatrix& g2) {
    if (g1.rows() != g2.rows() || g1.cols() != g2.cols())
        throw DomainError("correlation matrices must have equal shape");
    RealVector a = Eigen::Map<const RealVector>(g1.data(), g1.size());
    RealVector b = Eigen::Map<const RealVector>(g2.data(), g2.size());
    return similarity(a, b);
}

}  // namespace nhqw
