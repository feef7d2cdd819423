#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spikesolve/kernels.hpp"
#include "spikesolve/torus.hpp"

namespace spikesolve {

/// Radius of the near region S_M(j) around each support point.
inline double near_radius(int M) { return 0.16 / static_cast<double>(M); }

/// Degree from which the interpolation theory applies.
inline constexpr int kTheoryMinDegree = 128;

/// (D_l)_{jk} = G^{(l)}(s_j - s_k), l = 0, 1, 2.
struct CertificateMatrices {
    Eigen::MatrixXd D0, D1, D2;
    int M = 0;
    bool theory_regime = false;  ///< M >= 128 (separation is enforced on construction)
};

/// Throws ParameterError when the support violates the 2/M separation.
CertificateMatrices build_matrices(std::span<const TorusPoint> support, int M);

struct CoefficientSolution {
    Eigen::VectorXcd alpha, beta;
    /// max(|D0 a + D1 b - a|_inf, |D1 a + D2 b - b|_inf / M) for the solved system.
    double residual = 0.0;
    /// Largest reciprocal condition estimate of the two factored blocks.
    double condition_estimate = 0.0;
    bool theory_regime = false;
};

/// Schur-complement solve of [D0 D1; D1 D2] [alpha; beta] = [a; b]:
///   beta  = (D2 - D1 D0^{-1} D1)^{-1} (b - D1 D0^{-1} a)
///   alpha = D0^{-1} (a - D1 beta)
/// Throws NumericalError (carrying the condition estimate) when either block is
/// numerically singular.
CoefficientSolution solve_coefficients(const CertificateMatrices& mats, const Eigen::VectorXcd& a,
                                       const Eigen::VectorXcd& b);

/// f(x) = sum_j alpha_j G(x - s_j) + sum_j beta_j G'(x - s_j), a trigonometric
/// polynomial of degree <= M.
class Certificate {
public:
    Certificate(std::vector<TorusPoint> support, Eigen::VectorXcd alpha, Eigen::VectorXcd beta,
                int M);

    const std::vector<TorusPoint>& support() const noexcept { return support_; }
    const Eigen::VectorXcd& alpha() const noexcept { return alpha_; }
    const Eigen::VectorXcd& beta() const noexcept { return beta_; }
    int degree() const noexcept { return M_; }
    const Kernel& kernel() const noexcept { return *g_; }

    /// f^{(order)}(x), order 0..2.
    complex eval(double x, int order = 0) const;

    /// Coefficients of f on [-M, M].
    TrigPoly spectral_form() const;

private:
    std::vector<TorusPoint> support_;
    Eigen::VectorXcd alpha_, beta_;
    int M_;
    std::shared_ptr<const Kernel> g_;
};

/// Builds the matrices, solves for the coefficients and wraps the result.
Certificate make_certificate(std::span<const TorusPoint> support, const Eigen::VectorXcd& a,
                             const Eigen::VectorXcd& b, int M,
                             CoefficientSolution* diagnostics = nullptr);

complex eval_certificate(const Certificate& cert, TorusPoint x, int order);

struct InterpolationReport {
    double value_error = 0.0;       ///< max_j |f(s_j) - a_j|
    double derivative_error = 0.0;  ///< max_j |f'(s_j) - b_j| / M
    double scale = 0.0;             ///< |a|_inf + |b|_inf / M
    bool pass = false;
};

InterpolationReport verify_interpolation(const Certificate& cert, const Eigen::VectorXcd& a,
                                         const Eigen::VectorXcd& b, double tol);

struct RemainderReport {
    /// max over sampled x in S_M(j) of |f(x) - a_j - b_j (x - s_j)| /
    /// ((M^2 |a|_inf + M |b|_inf) |x - s_j|^2).
    double constant = 0.0;
    double max_remainder = 0.0;
    std::size_t samples = 0;
    bool pass = false;  ///< the constant is finite
};

RemainderReport affine_remainder_check(const Certificate& cert, const Eigen::VectorXcd& a,
                                       const Eigen::VectorXcd& b,
                                       std::size_t samples_per_interval = 256);

struct NormBoundReport {
    double inv_d0 = 0.0;               ///< |D0^{-1}|_inf
    double d1_over_m = 0.0;            ///< |D1|_inf / M
    double schur_inv_times_m2 = 0.0;   ///< M^2 |(D2 - D1 D0^{-1} D1)^{-1}|_inf
};

/// Operator infinity-norms (max absolute row sums).
NormBoundReport norm_bound_report(const CertificateMatrices& mats);

struct DualCertificateReport {
    Certificate certificate;
    double sup_off_support = 0.0;             ///< max |f| over grid points not on the support
    double sup_outside_neighborhoods = 0.0;   ///< max |f| over grid points outside all S_M(j)
    bool strictly_below_one = false;          ///< |f| < 1 at every grid point off the support
    std::size_t grid_size = 0;
};

/// Interpolant with f(s_j) = v_j, f'(s_j) = 0 for unit-modulus v, scanned on a grid.
DualCertificateReport dual_certificate(std::span<const TorusPoint> support,
                                       const Eigen::VectorXcd& v, int M,
                                       std::size_t grid_size = std::size_t{1} << 18);

}  // namespace spikesolve
