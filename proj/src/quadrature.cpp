#include "sofr/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sofr/errors.hpp"

namespace sofr {

namespace {

// Nodes are the eigenvalues of the Jacobi matrix of the orthogonal polynomials;
// weights are mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, double mu0) {
    const Eigen::Index n = off_diagonal.size() + 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        J(i, i + 1) = off_diagonal(i);
        J(i + 1, i) = off_diagonal(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success) throw NumericalError("quadrature eigenproblem did not converge");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v * v;
    }
    // Symmetrize: both weights are symmetric about 0, and this removes eigen-solver noise.
    for (std::size_t i = 0, k = rule.nodes.size() - 1; i < k; ++i, --k) {
        const double x = 0.5 * (rule.nodes[k] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[k] + rule.weights[i]);
        rule.nodes[i] = -x;
        rule.nodes[k] = x;
        rule.weights[i] = rule.weights[k] = w;
    }
    if (rule.nodes.size() % 2 == 1) rule.nodes[rule.nodes.size() / 2] = 0.0;
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
    SOFR_REQUIRE(n >= 1, DomainError, "quadrature needs at least one node");
    if (n == 1) return {{0.0}, {2.0}};
    Eigen::VectorXd beta(static_cast<Eigen::Index>(n - 1));
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        beta(static_cast<Eigen::Index>(k - 1)) = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    return golub_welsch(beta, 2.0);
}

QuadratureRule gauss_hermite_normal(std::size_t n) {
    SOFR_REQUIRE(n >= 1, DomainError, "quadrature needs at least one node");
    if (n == 1) return {{0.0}, {1.0}};
    // Probabilists' Hermite recurrence: off-diagonal sqrt(k), total mass 1.
    Eigen::VectorXd beta(static_cast<Eigen::Index>(n - 1));
    for (std::size_t k = 1; k < n; ++k) beta(static_cast<Eigen::Index>(k - 1)) = std::sqrt(static_cast<double>(k));
    return golub_welsch(beta, 1.0);
}

}  // namespace sofr
