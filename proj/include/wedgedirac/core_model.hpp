#pragma once

// Domain types shared by every module: wedge geometry, the two boundary
// models, 2x2 complex matrices and two-component spinors.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>

#include "wedgedirac/errors.hpp"

namespace wedgedirac {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

//----------------------------------------------------------------------------
// Spinors
//----------------------------------------------------------------------------

/// Two complex components. Construction rejects NaN/Inf.
class Spinor2 {
public:
    constexpr Spinor2() = default;

    Spinor2(cplx first, cplx second) : c_{first, second} {
        if (!is_finite(first) || !is_finite(second)) {
            throw DomainError("Spinor2: non-finite component");
        }
    }

    static Spinor2 zero() { return {}; }

    [[nodiscard]] cplx operator[](int i) const { return c_[i]; }
    [[nodiscard]] cplx first() const { return c_[0]; }
    [[nodiscard]] cplx second() const { return c_[1]; }

    [[nodiscard]] double norm() const {
        return std::sqrt(std::norm(c_[0]) + std::norm(c_[1]));
    }
    [[nodiscard]] double max_abs() const {
        return std::max(std::abs(c_[0]), std::abs(c_[1]));
    }

    friend Spinor2 operator+(Spinor2 const& a, Spinor2 const& b) {
        return {a.c_[0] + b.c_[0], a.c_[1] + b.c_[1]};
    }
    friend Spinor2 operator-(Spinor2 const& a, Spinor2 const& b) {
        return {a.c_[0] - b.c_[0], a.c_[1] - b.c_[1]};
    }
    friend Spinor2 operator*(cplx s, Spinor2 const& a) {
        return {s * a.c_[0], s * a.c_[1]};
    }
    friend Spinor2 operator*(double s, Spinor2 const& a) {
        return {s * a.c_[0], s * a.c_[1]};
    }

    static bool is_finite(cplx z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    }

private:
    std::array<cplx, 2> c_{};
};

/// <a, b> = sum a_i conj(b_i): linear in the first slot.
inline cplx inner(Spinor2 const& a, Spinor2 const& b) {
    return a[0] * std::conj(b[0]) + a[1] * std::conj(b[1]);
}

/// Interior (plus) and exterior (minus) values of a transmission problem.
struct SpinorPair {
    Spinor2 plus;
    Spinor2 minus;
};

//----------------------------------------------------------------------------
// 2x2 complex matrices
//----------------------------------------------------------------------------

struct Mat2 {
    cplx a{}, b{}, c{}, d{}; // [[a, b], [c, d]]

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 diag(cplx p, cplx q) { return {p, 0.0, 0.0, q}; }

    [[nodiscard]] Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    [[nodiscard]] cplx det() const { return a * d - b * c; }
    [[nodiscard]] Mat2 inverse() const {
        cplx const dt = det();
        if (std::abs(dt) == 0.0) {
            throw NumericalError("Mat2::inverse: singular matrix");
        }
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    /// Largest entry modulus.
    [[nodiscard]] double max_norm() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }
    /// Spectral norm (largest singular value).
    [[nodiscard]] double op_norm() const {
        double const fro2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
        double const dt = std::abs(det());
        double const disc = std::max(0.0, fro2 * fro2 - 4.0 * dt * dt);
        return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
    }

    friend Mat2 operator*(Mat2 const& m, Mat2 const& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend Mat2 operator+(Mat2 const& m, Mat2 const& n) {
        return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
    }
    friend Mat2 operator-(Mat2 const& m, Mat2 const& n) {
        return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
    }
    friend Mat2 operator*(cplx s, Mat2 const& m) {
        return {s * m.a, s * m.b, s * m.c, s * m.d};
    }
    friend Spinor2 operator*(Mat2 const& m, Spinor2 const& v) {
        return {m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]};
    }
};

inline Mat2 anticommutator(Mat2 const& m, Mat2 const& n) { return m * n + n * m; }

inline constexpr Mat2 sigma1{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 sigma2{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
inline constexpr Mat2 sigma3{1.0, 0.0, 0.0, -1.0};

/// exp(i t sigma3) = diag(e^{it}, e^{-it}).
inline Mat2 exp_i_sigma3(double t) {
    return Mat2::diag(std::polar(1.0, t), std::polar(1.0, -t));
}

/// sigma . v for a unit vector v.
inline Mat2 pauli_dot(Point v) {
    double const len = std::hypot(v.x, v.y);
    if (!(std::abs(len - 1.0) <= 1e-12)) {
        throw DomainError("pauli_dot: vector is not a unit vector");
    }
    return {0.0, cplx{v.x, -v.y}, cplx{v.x, v.y}, 0.0};
}

/// Unit vector at polar angle theta.
inline Point unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// sigma . e_r(theta) = [[0, e^{-i theta}], [e^{i theta}, 0]].
inline Mat2 sigma_radial(double theta) {
    return {0.0, std::polar(1.0, -theta), std::polar(1.0, theta), 0.0};
}

//----------------------------------------------------------------------------
// Geometry and boundary models
//----------------------------------------------------------------------------

inline void require_omega(double omega) {
    if (!std::isfinite(omega) || !(omega > 0.0) || !(omega < 2.0 * pi)) {
        throw DomainError("opening angle must lie in (0, 2pi)");
    }
    if (omega == pi) {
        throw DomainError("opening angle pi (flat boundary) is excluded");
    }
}

/// Opening angle and cutoff radius of the model corner.
class WedgeGeometry {
public:
    WedgeGeometry(double omega, double rho) : omega_(omega), rho_(rho) {
        require_omega(omega);
        if (!std::isfinite(rho) || !(rho > 0.0)) {
            throw DomainError("cutoff radius must be positive");
        }
    }

    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] bool convex() const { return omega_ < pi; }

private:
    double omega_;
    double rho_;
};

/// B = sin(eta) / (1 - cos(eta)) for eta in (0, pi).
inline double quantum_dot_B(double eta) {
    if (!std::isfinite(eta) || !(eta > 0.0) || !(eta < pi)) {
        throw DomainError("quantum-dot parameter eta must lie in (0, pi); eta = 0 is zig-zag");
    }
    return std::sin(eta) / (1.0 - std::cos(eta));
}

/// alpha = atanh(2 mu / (1 + mu^2)) for mu in (-1, 0) U (0, 1).
inline double lorentz_alpha(double mu) {
    if (!std::isfinite(mu) || !(std::abs(mu) < 1.0) || mu == 0.0) {
        throw DomainError("Lorentz-scalar mass mu must lie in (-1, 0) U (0, 1)");
    }
    // atanh(2mu/(1+mu^2)) = 2 atanh(mu), which avoids cancellation near |mu| -> 1.
    return 2.0 * std::atanh(mu);
}

/// M_B = diag(B^{-1/2}, B^{1/2}).
inline Mat2 rescale_matrix(double B) {
    if (!std::isfinite(B) || !(B > 0.0)) {
        throw DomainError("rescale_matrix: B must be positive");
    }
    double const s = std::sqrt(B);
    return Mat2::diag(1.0 / s, s);
}

class QuantumDotModel {
public:
    explicit QuantumDotModel(double eta = pi / 2) : eta_(eta), B_(quantum_dot_B(eta)) {}

    [[nodiscard]] double eta() const { return eta_; }
    [[nodiscard]] double B() const { return B_; }

    /// A = sin(eta) sigma.t + cos(eta) sigma3; the condition is (1 - A) gamma u = 0.
    [[nodiscard]] Mat2 boundary_matrix(Point tangent) const {
        return cplx{std::sin(eta_)} * pauli_dot(tangent) + cplx{std::cos(eta_)} * sigma3;
    }

private:
    double eta_;
    double B_;
};

class LorentzModel {
public:
    explicit LorentzModel(double mu) : mu_(mu), alpha_(lorentz_alpha(mu)) {}

    /// Build directly from alpha (mu is recovered as tanh(alpha / 2)).
    static LorentzModel from_alpha(double alpha) {
        if (!std::isfinite(alpha) || alpha == 0.0) {
            throw DomainError("Lorentz-scalar alpha must be finite and nonzero");
        }
        return LorentzModel(std::tanh(0.5 * alpha));
    }

    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] double alpha() const { return alpha_; }

    /// M^+ = i sigma.n + mu sigma3.
    [[nodiscard]] Mat2 m_plus(Point normal) const {
        return I * pauli_dot(normal) + cplx{mu_} * sigma3;
    }
    /// M^- = -i sigma.n + mu sigma3.
    [[nodiscard]] Mat2 m_minus(Point normal) const {
        return -I * pauli_dot(normal) + cplx{mu_} * sigma3;
    }
    /// Residual of M^+ u_+ + M^- u_-.
    [[nodiscard]] Spinor2 transmission_residual(Point normal, SpinorPair const& trace) const {
        return m_plus(normal) * trace.plus + m_minus(normal) * trace.minus;
    }
    /// Exterior trace determined by the interior trace: u_- = -(M^-)^{-1} M^+ u_+.
    [[nodiscard]] Spinor2 exterior_trace(Point normal, Spinor2 const& plus) const {
        return cplx{-1.0} * (m_minus(normal).inverse() * m_plus(normal)) * plus;
    }

private:
    double mu_;
    double alpha_;
};

enum class ModelKind { QuantumDot, LorentzScalar };

using BoundaryModel = std::variant<QuantumDotModel, LorentzModel>;

inline ModelKind kind_of(BoundaryModel const& m) {
    return std::holds_alternative<QuantumDotModel>(m) ? ModelKind::QuantumDot
                                                      : ModelKind::LorentzScalar;
}

inline std::string to_string(ModelKind k) {
    return k == ModelKind::QuantumDot ? "qdot" : "lorentz";
}

} // namespace wedgedirac
