#include "spikesolve/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "spikesolve/errors.hpp"
#include "spikesolve/sampling.hpp"

namespace spikesolve {

namespace {

std::shared_ptr<const Kernel> shared_g_kernel(int M) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const Kernel>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[M];
    if (!slot) slot = std::make_shared<const Kernel>(g_kernel(M));
    return slot;
}

double inf_norm(const Eigen::MatrixXd& A) { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

double inf_norm(const Eigen::VectorXcd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Eigen::VectorXcd lu_solve(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                          const Eigen::VectorXcd& rhs) {
    Eigen::MatrixXd parts(rhs.size(), 2);
    parts.col(0) = rhs.real();
    parts.col(1) = rhs.imag();
    const Eigen::MatrixXd x = lu.solve(parts);
    Eigen::VectorXcd out(rhs.size());
    out.real() = x.col(0);
    out.imag() = x.col(1);
    return out;
}

constexpr double kMinReciprocalCondition = 1e-13;

}  // namespace

CertificateMatrices build_matrices(std::span<const TorusPoint> support, int M) {
    if (M < 2) throw ParameterError("certificate construction needs M >= 2");
    if (!satisfies_separation(support, M)) {
        throw ParameterError("support violates the 2/M minimum separation (min separation " +
                             std::to_string(min_separation(support)) + ", M = " +
                             std::to_string(M) + ")");
    }
    const auto g = shared_g_kernel(M);
    const auto J = static_cast<Eigen::Index>(support.size());
    CertificateMatrices mats;
    mats.M = M;
    mats.theory_regime = M >= kTheoryMinDegree;
    mats.D0.resize(J, J);
    mats.D1.resize(J, J);
    mats.D2.resize(J, J);
    for (Eigen::Index j = 0; j < J; ++j) {
        for (Eigen::Index k = 0; k < J; ++k) {
            const double t = signed_offset(support[static_cast<std::size_t>(k)],
                                           support[static_cast<std::size_t>(j)]);
            const auto d = g->derivatives(t);
            mats.D0(j, k) = d[0];
            mats.D1(j, k) = d[1];
            mats.D2(j, k) = d[2];
        }
    }
    return mats;
}

CoefficientSolution solve_coefficients(const CertificateMatrices& mats, const Eigen::VectorXcd& a,
                                       const Eigen::VectorXcd& b) {
    const Eigen::Index J = mats.D0.rows();
    if (a.size() != J || b.size() != J) {
        throw ParameterError("interpolation data length does not match the support size");
    }
    CoefficientSolution sol;
    sol.theory_regime = mats.theory_regime;
    if (J == 0) {
        sol.alpha.resize(0);
        sol.beta.resize(0);
        return sol;
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu0(mats.D0);
    const double rc0 = lu0.rcond();
    const Eigen::MatrixXd D0inv_D1 = lu0.solve(mats.D1);
    const Eigen::MatrixXd schur = mats.D2 - mats.D1 * D0inv_D1;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lus(schur);
    const double rcs = lus.rcond();
    sol.condition_estimate = 1.0 / std::max(std::min(rc0, rcs), 1e-300);
    if (!(rc0 > kMinReciprocalCondition) || !(rcs > kMinReciprocalCondition)) {
        throw NumericalError("interpolation system is numerically singular; the support is too "
                             "tightly packed or M too small",
                             sol.condition_estimate);
    }

    const Eigen::VectorXcd D0inv_a = lu_solve(lu0, a);
    const Eigen::VectorXcd rhs = b - mats.D1.cast<complex>() * D0inv_a;
    sol.beta = lu_solve(lus, rhs);
    sol.alpha = lu_solve(lu0, a - mats.D1.cast<complex>() * sol.beta);

    const Eigen::VectorXcd ra =
        mats.D0.cast<complex>() * sol.alpha + mats.D1.cast<complex>() * sol.beta - a;
    const Eigen::VectorXcd rb =
        mats.D1.cast<complex>() * sol.alpha + mats.D2.cast<complex>() * sol.beta - b;
    sol.residual = std::max(inf_norm(ra), inf_norm(rb) / mats.M);
    return sol;
}

// ---------------------------------------------------------------------------
// Certificate

Certificate::Certificate(std::vector<TorusPoint> support, Eigen::VectorXcd alpha,
                         Eigen::VectorXcd beta, int M)
    : support_(std::move(support)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      M_(M),
      g_(shared_g_kernel(M)) {
    const auto J = static_cast<Eigen::Index>(support_.size());
    if (alpha_.size() != J || beta_.size() != J) {
        throw ParameterError("certificate coefficient length does not match the support");
    }
}

complex Certificate::eval(double x, int order) const {
    if (order < 0 || order > 2) throw ParameterError("certificate derivative order must be 0..2");
    complex sum{};
    const TorusPoint p(x);
    for (std::size_t j = 0; j < support_.size(); ++j) {
        const auto d = g_->derivatives(signed_offset(support_[j], p));
        const auto i = static_cast<Eigen::Index>(j);
        sum += alpha_(i) * d[static_cast<std::size_t>(order)] +
               beta_(i) * d[static_cast<std::size_t>(order) + 1];
    }
    return sum;
}

TrigPoly Certificate::spectral_form() const {
    const TrigPoly& g = g_->spectral_form();
    TrigPoly f(M_);
    for (std::size_t j = 0; j < support_.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        detail::for_each_phasor(M_, -support_[j].value(), [&](int m, complex w) {
            const complex weight = alpha_(i) + beta_(i) * complex{0.0, kTwoPi * m};
            f.coeff_ref(m) += g.coeff(m) * weight * w;
        });
    }
    return f;
}

Certificate make_certificate(std::span<const TorusPoint> support, const Eigen::VectorXcd& a,
                             const Eigen::VectorXcd& b, int M, CoefficientSolution* diagnostics) {
    const auto mats = build_matrices(support, M);
    auto sol = solve_coefficients(mats, a, b);
    Certificate cert({support.begin(), support.end()}, sol.alpha, sol.beta, M);
    if (diagnostics) *diagnostics = std::move(sol);
    return cert;
}

complex eval_certificate(const Certificate& cert, TorusPoint x, int order) {
    return cert.eval(x.value(), order);
}

InterpolationReport verify_interpolation(const Certificate& cert, const Eigen::VectorXcd& a,
                                         const Eigen::VectorXcd& b, double tol) {
    InterpolationReport r;
    const double M = cert.degree();
    const auto& s = cert.support();
    for (std::size_t j = 0; j < s.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        r.value_error = std::max(r.value_error, std::abs(cert.eval(s[j].value(), 0) - a(i)));
        r.derivative_error =
            std::max(r.derivative_error, std::abs(cert.eval(s[j].value(), 1) - b(i)) / M);
    }
    r.scale = inf_norm(a) + inf_norm(b) / M;
    const double bound = tol * r.scale;
    r.pass = r.value_error <= bound && r.derivative_error <= bound;
    return r;
}

RemainderReport affine_remainder_check(const Certificate& cert, const Eigen::VectorXcd& a,
                                       const Eigen::VectorXcd& b,
                                       std::size_t samples_per_interval) {
    RemainderReport r;
    const double M = cert.degree();
    const double radius = near_radius(cert.degree());
    const double scale = M * M * inf_norm(a) + M * inf_norm(b);
    const auto& s = cert.support();
    const std::size_t n = std::max<std::size_t>(samples_per_interval, 2);
    for (std::size_t j = 0; j < s.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = radius * (-1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1));
            const complex rem = cert.eval(s[j].value() + t, 0) - a(i) - b(i) * t;
            const double mag = std::abs(rem);
            r.max_remainder = std::max(r.max_remainder, mag);
            ++r.samples;
            if (t != 0.0 && scale > 0.0) r.constant = std::max(r.constant, mag / (scale * t * t));
        }
    }
    r.pass = std::isfinite(r.constant);
    return r;
}

NormBoundReport norm_bound_report(const CertificateMatrices& mats) {
    NormBoundReport r;
    if (mats.D0.rows() == 0) return r;
    const double M = mats.M;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu0(mats.D0);
    const Eigen::MatrixXd inv0 = lu0.inverse();
    const Eigen::MatrixXd schur = mats.D2 - mats.D1 * lu0.solve(mats.D1);
    r.inv_d0 = inf_norm(inv0);
    r.d1_over_m = inf_norm(mats.D1) / M;
    r.schur_inv_times_m2 = M * M * inf_norm(Eigen::MatrixXd(schur.inverse()));
    return r;
}

DualCertificateReport dual_certificate(std::span<const TorusPoint> support,
                                       const Eigen::VectorXcd& v, int M, std::size_t grid_size) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (std::abs(std::abs(v(j)) - 1.0) > 1e-12) {
            throw ParameterError("dual certificate values must have unit modulus");
        }
    }
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(v.size());
    DualCertificateReport r{make_certificate(support, v, zero, M), 0.0, 0.0, false, grid_size};

    const auto vals = evaluate_on_grid(r.certificate.spectral_form(), grid_size);
    const double radius = near_radius(M);
    const double h = 1.0 / static_cast<double>(grid_size);
    r.strictly_below_one = true;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const TorusPoint x(static_cast<double>(k) * h);
        double nearest = 1.0;
        for (auto s : support) nearest = std::min(nearest, torus_distance(s, x));
        if (nearest < 1e-12) continue;
        const double a = std::abs(vals[k]);
        r.sup_off_support = std::max(r.sup_off_support, a);
        if (nearest > radius) r.sup_outside_neighborhoods = std::max(r.sup_outside_neighborhoods, a);
        if (!(a < 1.0)) r.strictly_below_one = false;
    }
    return r;
}

}  // namespace spikesolve
