#pragma once

// Cut-off singular functions u_k = phi(r/rho) r^{lambda_k} f_k(theta), their
// Dirac images, and the quadrature checks built on them: boundary pairings,
// symmetry defect, charge conjugation, harmonicity and the Green identities.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "wedgedirac/angular_spectrum.hpp"
#include "wedgedirac/core_model.hpp"
#include "wedgedirac/numerics.hpp"

namespace wedgedirac {

//----------------------------------------------------------------------------
// Cutoff
//----------------------------------------------------------------------------

namespace detail {

inline double bump_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
inline double bump_g_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

/// Smooth step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= 1.0) {
        return 1.0;
    }
    double const g = bump_g(t);
    return g / (g + bump_g(1.0 - t));
}

inline double smooth_step_prime(double t) {
    if (t <= 0.0 || t >= 1.0) {
        return 0.0;
    }
    double const g = bump_g(t);
    double const h = bump_g(1.0 - t);
    double const s = g + h;
    return (bump_g_prime(t) * h + g * bump_g_prime(1.0 - t)) / (s * s);
}

} // namespace detail

/// phi(x) = 1 on [0, 1/3], 0 on [2/3, inf), smooth and non-increasing between.
inline double cutoff_phi(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("cutoff_phi: argument must be non-negative");
    }
    return detail::smooth_step(2.0 - 3.0 * x);
}

inline double cutoff_phi_prime(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("cutoff_phi_prime: argument must be non-negative");
    }
    return -3.0 * detail::smooth_step_prime(2.0 - 3.0 * x);
}

//----------------------------------------------------------------------------
// Singular functions
//----------------------------------------------------------------------------

/// u_k together with the partner mode f_{-k-1} that carries H u_k.
struct SingularFunction {
    AngularMode mode;
    AngularMode partner;
    double rho = 1.0;

    [[nodiscard]] double lambda() const { return mode.lambda; }
};

inline SingularFunction make_singular_function(AngularMode mode, double rho) {
    if (!std::isfinite(rho) || !(rho > 0.0)) {
        throw DomainError("singular function: cutoff radius must be positive");
    }
    AngularMode partner = make_mode(mode.kind, -mode.k - 1, mode.omega, mode.alpha);
    return {std::move(mode), std::move(partner), rho};
}

inline SingularFunction make_singular_function(ModelKind kind, int k, double omega, double alpha,
                                               double rho) {
    return make_singular_function(make_mode(kind, k, omega, alpha), rho);
}

namespace detail {

inline double radial_power(double r, double lambda) {
    if (!(r >= 0.0)) {
        throw DomainError("radius must be non-negative");
    }
    if (r == 0.0) {
        if (lambda < 0.0) {
            throw DomainError("singular function is unbounded at the corner (r = 0, lambda < 0)");
        }
        return lambda == 0.0 ? 1.0 : 0.0;
    }
    return std::pow(r, lambda);
}

} // namespace detail

/// phi(r/rho) r^lambda f(theta).
inline Spinor2 eval_u(SingularFunction const& sf, double r, double theta) {
    double const rl = detail::radial_power(r, sf.lambda());
    Spinor2 const f = eval_mode(sf.mode, theta);
    double const phi = cutoff_phi(r / sf.rho);
    if (phi == 0.0) {
        return Spinor2::zero();
    }
    return (phi * rl) * f;
}

/// H u_k = -(i/rho) phi'(r/rho) r^lambda f_{-k-1}(theta).
inline Spinor2 eval_Hu(SingularFunction const& sf, double r, double theta) {
    double const rl = detail::radial_power(r, sf.lambda());
    Spinor2 const f = eval_mode(sf.partner, theta);
    double const dphi = cutoff_phi_prime(r / sf.rho);
    if (dphi == 0.0) {
        return Spinor2::zero();
    }
    return (-I * (dphi * rl / sf.rho)) * f;
}

/// Polar angle in [0, 2 pi).
inline double polar_angle(Point p) {
    double t = std::atan2(p.y, p.x);
    if (t < 0.0) {
        t += 2.0 * pi;
    }
    return t;
}

inline Spinor2 eval_u_at(SingularFunction const& sf, Point p) {
    return eval_u(sf, std::hypot(p.x, p.y), polar_angle(p));
}

inline Spinor2 eval_Hu_at(SingularFunction const& sf, Point p) {
    return eval_Hu(sf, std::hypot(p.x, p.y), polar_angle(p));
}

//----------------------------------------------------------------------------
// Quadrature on the truncated wedge
//----------------------------------------------------------------------------

/// Number of geometric panels between the corner and rho/3.
inline constexpr int corner_grading_levels = 24;
/// Panels across the cutoff band [rho/3, 2 rho/3].
inline constexpr int band_panels = 8;

/// Radial rule on [r_min, 2 rho/3]: geometric panels rho/3 * 2^{-j} toward
/// the corner plus uniform panels across the cutoff band. r_min is the inner
/// end of the graded region; [0, r_min] is left to the caller.
inline QuadratureRule graded_radial_rule(double rho, int levels = corner_grading_levels,
                                         int nodes = default_quad_nodes()) {
    std::vector<double> br;
    double const third = rho / 3.0;
    for (int j = levels; j >= 1; --j) {
        br.push_back(third * std::ldexp(1.0, -j));
    }
    for (int j = 0; j <= band_panels; ++j) {
        br.push_back(third + third * j / band_panels);
    }
    return {std::move(br), nodes};
}

/// Radial rule restricted to the support of phi'(r/rho).
inline QuadratureRule band_radial_rule(double rho, int nodes = default_quad_nodes()) {
    return {rho / 3.0, 2.0 * rho / 3.0, band_panels, nodes};
}

/// Integral over the sheets of the mode's angular range of F(r, theta, sheet) r dr dtheta.
template <class F>
cplx integrate_polar(AngularMode const& geometry, QuadratureRule const& radial, F&& f) {
    cplx total{};
    for (Sheet s : geometry.sheets()) {
        QuadratureRule const ang(geometry.sheet_begin(s), geometry.sheet_end(s));
        auto const rn = radial.nodes();
        auto const rw = radial.weights();
        auto const tn = ang.nodes();
        auto const tw = ang.weights();
        for (std::size_t i = 0; i < rn.size(); ++i) {
            cplx row{};
            for (std::size_t j = 0; j < tn.size(); ++j) {
                row += tw[j] * f(rn[i], tn[j], s);
            }
            total += rw[i] * rn[i] * row;
        }
    }
    return total;
}

/// ||u||^2 over the wedge; the innermost cell [0, r_min] is integrated in
/// closed form since u = r^lambda f there.
inline double l2_norm_squared(SingularFunction const& sf, int levels = corner_grading_levels) {
    if (!(sf.lambda() > -1.0)) {
        throw DomainError("l2_norm_squared: r^lambda is not square integrable for lambda <= -1");
    }
    QuadratureRule const radial = graded_radial_rule(sf.rho, levels);
    cplx const body = integrate_polar(sf.mode, radial, [&](double r, double t, Sheet s) {
        double const u = cutoff_phi(r / sf.rho) * std::pow(r, sf.lambda());
        return cplx{u * u * std::norm(sf.mode.value(s, t)[0]) + u * u * std::norm(sf.mode.value(s, t)[1])};
    });
    double const rmin = radial.a();
    double const inner = std::pow(rmin, 2.0 * sf.lambda() + 2.0) / (2.0 * sf.lambda() + 2.0);
    return body.real() + inner * angular_inner_product(sf.mode, sf.mode).real();
}

//----------------------------------------------------------------------------
// Boundary pairing and symmetry defect
//----------------------------------------------------------------------------

inline void require_deficiency_index(int k) {
    if (k != 0 && k != -1) {
        throw IndexError("boundary pairing is defined for k in {0, -1}");
    }
}

/// <H u_k, u_l> by tensor quadrature (radial band x angular sheets).
inline cplx boundary_pairing(SingularFunction const& uk, SingularFunction const& ul) {
    require_deficiency_index(uk.mode.k);
    require_deficiency_index(ul.mode.k);
    require_same_family(uk.mode, ul.mode);
    if (uk.rho != ul.rho) {
        throw ParameterMismatch("boundary_pairing: cutoff radii differ");
    }
    QuadratureRule const radial = band_radial_rule(uk.rho);
    return integrate_polar(uk.mode, radial, [&](double r, double t, Sheet s) {
        double const phi = cutoff_phi(r / uk.rho);
        double const dphi = cutoff_phi_prime(r / uk.rho);
        Spinor2 const hu = (-I * (dphi * std::pow(r, uk.lambda()) / uk.rho)) * uk.partner.value(s, t);
        Spinor2 const u = (phi * std::pow(r, ul.lambda())) * ul.mode.value(s, t);
        return inner(hu, u);
    });
}

/// P(k, l) = <H u_k, u_l> for k, l in {0, -1}; index 0 <-> k = 0, index 1 <-> k = -1.
struct PairingMatrix {
    std::array<std::array<cplx, 2>, 2> p{};

    [[nodiscard]] cplx at(int k, int l) const {
        require_deficiency_index(k);
        require_deficiency_index(l);
        return p[k == 0 ? 0 : 1][l == 0 ? 0 : 1];
    }

    /// Largest entry deviation from [[0, i/2], [i/2, 0]].
    [[nodiscard]] double deviation_from_reference() const {
        cplx const half_i{0.0, 0.5};
        return std::max({std::abs(p[0][0]), std::abs(p[0][1] - half_i), std::abs(p[1][0] - half_i),
                         std::abs(p[1][1])});
    }
};

inline PairingMatrix pairing_matrix(ModelKind kind, double omega, double alpha, double rho) {
    std::array<SingularFunction, 2> const u{make_singular_function(kind, 0, omega, alpha, rho),
                                            make_singular_function(kind, -1, omega, alpha, rho)};
    PairingMatrix m;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m.p[i][j] = boundary_pairing(u[i], u[j]);
        }
    }
    return m;
}

/// <D*u, u> - <u, D*u> for u = c0 u_0 + cm1 u_{-1}, by bilinearity.
inline cplx symmetry_defect(cplx c0, cplx cm1, PairingMatrix const& pm) {
    std::array<cplx, 2> const c{c0, cm1};
    cplx form{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            form += c[i] * std::conj(c[j]) * pm.p[i][j];
        }
    }
    return form - std::conj(form);
}

/// The closed form 2 i Re(c0 conj(cm1)).
inline cplx symmetry_defect_reference(cplx c0, cplx cm1) {
    return {0.0, 2.0 * (c0 * std::conj(cm1)).real()};
}

//----------------------------------------------------------------------------
// Charge conjugation
//----------------------------------------------------------------------------

/// Sup of |C u - u| over a polar sample grid inside the support.
inline double check_charge_symmetry(SingularFunction const& sf) {
    double sup = 0.0;
    for (int i = 1; i <= 16; ++i) {
        double const r = sf.rho * (0.7 * i / 16.0);
        for (Sheet s : sf.mode.sheets()) {
            for (double t : sample_angles(sf.mode.sheet_begin(s), sf.mode.sheet_end(s))) {
                Spinor2 const u = (cutoff_phi(r / sf.rho) * std::pow(r, sf.lambda())) * sf.mode.value(s, t);
                sup = std::max(sup, (charge_conjugate(u) - u).norm());
            }
        }
    }
    return sup;
}

//----------------------------------------------------------------------------
// Harmonicity
//----------------------------------------------------------------------------

/// max over points and components of |Laplacian(r^{lambda + shift} f(theta))|
/// by the five-point stencil. Points must keep the stencil away from the
/// corner and from the sheet edges.
inline double harmonicity_residual(AngularMode const& mode, std::vector<Point> const& points, double h,
                                   double lambda_shift = 0.0) {
    double const lam = mode.lambda + lambda_shift;
    double worst = 0.0;
    for (Point const& p : points) {
        double const r = std::hypot(p.x, p.y);
        double const t = polar_angle(p);
        Sheet const s = sheet_of(mode, t);
        double const lo = mode.sheet_begin(s);
        double const hi = mode.sheet_end(s);
        double const margin = r * std::sin(std::min({t - lo, hi - t, pi / 2}));
        if (!(r > 2.0 * h) || !(margin > 2.0 * h)) {
            throw DomainError("harmonicity_residual: stencil too close to the corner or an edge");
        }
        for (int comp = 0; comp < 2; ++comp) {
            auto const g = [&](Point q) {
                double const rq = std::hypot(q.x, q.y);
                return std::pow(rq, lam) * mode.value(s, polar_angle(q))[comp];
            };
            worst = std::max(worst, std::abs(laplacian_5pt(g, p, h)));
        }
    }
    return worst;
}

//----------------------------------------------------------------------------
// Green identities
//----------------------------------------------------------------------------

/// A smooth spinor field on the plane with its exact Dirac image.
struct ManufacturedField {
    std::function<Spinor2(Point)> value;
    std::function<Spinor2(Point)> dirac;
};

/// Spinor field whose components are complex quadratics in (x, y); the
/// coefficient order is 1, x, y, x^2, xy, y^2.
struct QuadraticSpinor {
    std::array<cplx, 6> a{};
    std::array<cplx, 6> b{};

    static cplx eval(std::array<cplx, 6> const& c, Point p) {
        return c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y;
    }
    static cplx ddx(std::array<cplx, 6> const& c, Point p) { return c[1] + 2.0 * c[3] * p.x + c[4] * p.y; }
    static cplx ddy(std::array<cplx, 6> const& c, Point p) { return c[2] + c[4] * p.x + 2.0 * c[5] * p.y; }

    [[nodiscard]] ManufacturedField field() const {
        QuadraticSpinor const q = *this;
        ManufacturedField f;
        f.value = [q](Point p) { return Spinor2{eval(q.a, p), eval(q.b, p)}; };
        f.dirac = [q](Point p) {
            Spinor2 const ux{ddx(q.a, p), ddx(q.b, p)};
            Spinor2 const uy{ddy(q.a, p), ddy(q.b, p)};
            return -I * (sigma1 * ux + sigma2 * uy);
        };
        return f;
    }
};

struct Rectangle {
    double x0, x1, y0, y1;
};

struct TruncatedWedge {
    double omega;
    double radius;
};

namespace detail {

/// Boundary integrand <sigma.n u, v> along a segment from a to b with outward normal n.
inline cplx segment_flux(ManufacturedField const& u, ManufacturedField const& v, Point a, Point b,
                         Point n) {
    double const len = std::hypot(b.x - a.x, b.y - a.y);
    QuadratureRule const rule(0.0, len);
    Mat2 const sn = pauli_dot(n);
    return integrate_1d(
        [&](double s) {
            Point const p{a.x + (b.x - a.x) * s / len, a.y + (b.y - a.y) * s / len};
            return inner(sn * u.value(p), v.value(p));
        },
        rule);
}

} // namespace detail

/// |<u, Hv> - <Hu, v> - i oint <sigma.n u, v>| on a rectangle.
inline double verify_green_identity(ManufacturedField const& u, ManufacturedField const& v,
                                    Rectangle const& d) {
    QuadratureRule const rx(d.x0, d.x1);
    QuadratureRule const ry(d.y0, d.y1);
    cplx bulk{};
    for (std::size_t i = 0; i < rx.nodes().size(); ++i) {
        for (std::size_t j = 0; j < ry.nodes().size(); ++j) {
            Point const p{rx.nodes()[i], ry.nodes()[j]};
            bulk += rx.weights()[i] * ry.weights()[j] *
                    (inner(u.value(p), v.dirac(p)) - inner(u.dirac(p), v.value(p)));
        }
    }
    cplx flux{};
    flux += detail::segment_flux(u, v, {d.x0, d.y0}, {d.x1, d.y0}, {0.0, -1.0});
    flux += detail::segment_flux(u, v, {d.x1, d.y0}, {d.x1, d.y1}, {1.0, 0.0});
    flux += detail::segment_flux(u, v, {d.x1, d.y1}, {d.x0, d.y1}, {0.0, 1.0});
    flux += detail::segment_flux(u, v, {d.x0, d.y1}, {d.x0, d.y0}, {-1.0, 0.0});
    return std::abs(bulk - I * flux);
}

/// Same identity on {0 < r < R, 0 < theta < omega}.
inline double verify_green_identity(ManufacturedField const& u, ManufacturedField const& v,
                                    TruncatedWedge const& d) {
    require_omega(d.omega);
    QuadratureRule const rr(0.0, d.radius);
    QuadratureRule const rt(0.0, d.omega);
    cplx bulk{};
    for (std::size_t i = 0; i < rr.nodes().size(); ++i) {
        double const r = rr.nodes()[i];
        for (std::size_t j = 0; j < rt.nodes().size(); ++j) {
            double const t = rt.nodes()[j];
            Point const p{r * std::cos(t), r * std::sin(t)};
            bulk += rr.weights()[i] * rt.weights()[j] * r *
                    (inner(u.value(p), v.dirac(p)) - inner(u.dirac(p), v.value(p)));
        }
    }
    Point const far0{d.radius, 0.0};
    Point const farw{d.radius * std::cos(d.omega), d.radius * std::sin(d.omega)};
    cplx flux{};
    flux += detail::segment_flux(u, v, {0.0, 0.0}, far0, {0.0, -1.0});
    flux += detail::segment_flux(u, v, farw, {0.0, 0.0}, {-std::sin(d.omega), std::cos(d.omega)});
    flux += integrate_1d(
        [&](double t) {
            Point const p{d.radius * std::cos(t), d.radius * std::sin(t)};
            return d.radius * inner(sigma_radial(t) * u.value(p), v.value(p));
        },
        rt);
    return std::abs(bulk - I * flux);
}

/// A spinor field given in polar form with exact partial derivatives.
struct PolarField {
    std::function<Spinor2(double, double)> value;
    std::function<Spinor2(double, double)> d_r;
    std::function<Spinor2(double, double)> d_theta;
};

/// Relative defect | ||Hu||^2 - ||grad u||^2 | / ||grad u||^2 on the
/// truncated wedge of opening omega (straight edges, so no curvature term).
/// H u = -i sigma.e_r (d_r u + i r^{-1} sigma3 d_theta u).
inline double verify_qform_identity(PolarField const& u, double omega, double rho) {
    require_omega(omega);
    QuadratureRule const radial = graded_radial_rule(rho);
    QuadratureRule const ang(0.0, omega);
    double dirac_sq = 0.0;
    double grad_sq = 0.0;
    for (std::size_t i = 0; i < radial.nodes().size(); ++i) {
        double const r = radial.nodes()[i];
        double row_d = 0.0;
        double row_g = 0.0;
        for (std::size_t j = 0; j < ang.nodes().size(); ++j) {
            double const t = ang.nodes()[j];
            Spinor2 const dr = u.d_r(r, t);
            Spinor2 const dt = u.d_theta(r, t);
            Spinor2 const hu = -I * (sigma_radial(t) * (dr + (I / r) * (sigma3 * dt)));
            row_d += ang.weights()[j] * std::pow(hu.norm(), 2);
            row_g += ang.weights()[j] * (std::pow(dr.norm(), 2) + std::pow(dt.norm() / r, 2));
        }
        dirac_sq += radial.weights()[i] * r * row_d;
        grad_sq += radial.weights()[i] * r * row_g;
    }
    return std::abs(dirac_sq - grad_sq) / grad_sq;
}

/// Polar description of u_k for a quantum-dot mode.
inline PolarField polar_field(SingularFunction const& sf) {
    PolarField f;
    f.value = [sf](double r, double t) {
        return (cutoff_phi(r / sf.rho) * std::pow(r, sf.lambda())) * sf.mode.value(Sheet::Plus, t);
    };
    f.d_r = [sf](double r, double t) {
        double const lam = sf.lambda();
        double const h = cutoff_phi_prime(r / sf.rho) / sf.rho * std::pow(r, lam) +
                         cutoff_phi(r / sf.rho) * lam * std::pow(r, lam - 1.0);
        return h * sf.mode.value(Sheet::Plus, t);
    };
    f.d_theta = [sf](double r, double t) {
        return (cutoff_phi(r / sf.rho) * std::pow(r, sf.lambda())) * sf.mode.derivative(Sheet::Plus, t);
    };
    return f;
}

/// Same radial profile as u_k but the first component carries the extra phase
/// e^{i k r (1 - theta/omega)}, k = 3/rho. The phase is present on the edge
/// theta = 0 and absent on theta = omega, so the edge relation between the
/// components fails and the two edge terms no longer cancel.
inline PolarField qform_negative_control(SingularFunction const& sf) {
    PolarField f;
    auto const prof = [sf](double r) { return cutoff_phi(r / sf.rho) * std::pow(r, sf.lambda()); };
    auto const dprof = [sf](double r) {
        double const lam = sf.lambda();
        return cutoff_phi_prime(r / sf.rho) / sf.rho * std::pow(r, lam) +
               cutoff_phi(r / sf.rho) * lam * std::pow(r, lam - 1.0);
    };
    double const k = 3.0 / sf.rho;
    double const w = sf.mode.omega;
    auto const phase = [k, w](double r, double t) { return std::polar(1.0, k * r * (1.0 - t / w)); };
    f.value = [sf, prof, phase](double r, double t) {
        Spinor2 const m = sf.mode.value(Sheet::Plus, t);
        return Spinor2{prof(r) * phase(r, t) * m[0], prof(r) * m[1]};
    };
    f.d_r = [sf, prof, dprof, phase, k, w](double r, double t) {
        Spinor2 const m = sf.mode.value(Sheet::Plus, t);
        cplx const ph = phase(r, t);
        return Spinor2{(dprof(r) + I * k * (1.0 - t / w) * prof(r)) * ph * m[0], dprof(r) * m[1]};
    };
    f.d_theta = [sf, prof, phase, k, w](double r, double t) {
        Spinor2 const m = sf.mode.value(Sheet::Plus, t);
        Spinor2 const d = sf.mode.derivative(Sheet::Plus, t);
        cplx const ph = phase(r, t);
        return Spinor2{prof(r) * ph * (d[0] - I * (k * r / w) * m[0]), prof(r) * d[1]};
    };
    return f;
}

} // namespace wedgedirac
