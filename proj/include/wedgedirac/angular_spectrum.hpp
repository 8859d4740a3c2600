#pragma once

// Angular eigenvalues and eigenspinors of -i sigma3 d/dtheta on the wedge,
// for the quantum-dot (infinite-mass, B = 1) condition and for the
// Lorentz-scalar delta-shell transmission condition.
//
// Eigenspinors have the form f(theta) = (a e^{i lambda theta}, b e^{-i lambda theta}).
// Quantum-dot modes live on [0, omega]. Lorentz-scalar modes carry one
// coefficient pair on the interior sheet [0, omega] and one on the exterior
// sheet [omega, 2 pi].

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "wedgedirac/core_model.hpp"
#include "wedgedirac/numerics.hpp"

namespace wedgedirac {

enum class Parity { Plus, Minus };

enum class Sheet { Plus, Minus };

inline int parity_sign(Parity p) { return p == Parity::Plus ? 1 : -1; }
inline char parity_char(Parity p) { return p == Parity::Plus ? '+' : '-'; }

/// Steps per unit length used when scanning the transcendental equations.
inline constexpr long lorentz_scan_density = 20000;
/// Final bracket width of refined Lorentz roots.
inline constexpr double lorentz_root_tol = 1e-13;
/// Largest |lambda| the indexed ladder will search.
inline constexpr double lorentz_max_window = 50.0;
/// Candidates where sin((pi - omega)(lambda + 1/2)) is this small are rejected.
inline constexpr double degenerate_root_guard = 1e-12;
/// Equispaced samples per angular interval for residual sups.
inline constexpr int residual_samples = 256;

//----------------------------------------------------------------------------
// Eigenvalues
//----------------------------------------------------------------------------

/// lambda_k = (2k + 1) pi / (2 omega) - 1/2.
inline double qdot_lambda(int k, double omega) {
    require_omega(omega);
    return (2.0 * k + 1.0) * pi / (2.0 * omega) - 0.5;
}

inline void require_alpha(double alpha) {
    if (!std::isfinite(alpha) || alpha == 0.0) {
        throw DomainError("Lorentz-scalar alpha must be finite and nonzero");
    }
}

namespace detail {

/// F_pm with the parameter-only factors hoisted out of the scan loop.
struct CharFn {
    double t;   ///< |tanh alpha|
    double b;   ///< |pi - omega|
    double sg;  ///< +1 for F_+, -1 for F_-
    double operator()(double lambda) const {
        double const s = lambda + 0.5;
        return std::cos(pi * s) - sg * t * std::sin(b * s);
    }
};

inline CharFn char_fn(double alpha, double omega, Parity parity) {
    require_alpha(alpha);
    require_omega(omega);
    return {std::abs(std::tanh(alpha)), std::abs(pi - omega), static_cast<double>(parity_sign(parity))};
}

} // namespace detail

/// F_pm(lambda) = cos(pi s) -/+ |tanh alpha| sin(|pi - omega| s), s = lambda + 1/2.
inline double lorentz_char(double lambda, double alpha, double omega, Parity parity) {
    return detail::char_fn(alpha, omega, parity)(lambda);
}

struct LorentzRoot {
    double lambda;
    Parity parity;
};

struct LorentzScan {
    std::vector<LorentzRoot> roots;     ///< ascending
    std::vector<LorentzRoot> rejected;  ///< degenerate candidates
};

namespace detail {

inline bool degenerate(double lambda, double omega) {
    return std::abs(std::sin((pi - omega) * (lambda + 0.5))) < degenerate_root_guard;
}

inline long scan_steps(double a, double b) {
    return std::max<long>(2, static_cast<long>(std::ceil(lorentz_scan_density * (b - a))));
}

/// Refined roots of one parity in (a, b), ascending.
inline LorentzScan lorentz_roots(double alpha, double omega, double a, double b, Parity parity) {
    auto const f = char_fn(alpha, omega, parity);
    LorentzScan out;
    for (Bracket const& br : scan_sign_changes(f, a, b, scan_steps(a, b))) {
        double const l = find_root(f, br, lorentz_root_tol);
        if (!(l > a && l < b)) {
            continue;
        }
        (degenerate(l, omega) ? out.rejected : out.roots).push_back({l, parity});
    }
    return out;
}

} // namespace detail

/// The unique root of F_+ in (-1/2, 0).
inline double lorentz_lambda_0(double alpha, double omega, double tol = lorentz_root_tol) {
    require_alpha(alpha);
    require_omega(omega);
    auto const f = detail::char_fn(alpha, omega, Parity::Plus);
    auto const brackets = scan_sign_changes(f, -0.5, 0.0, detail::scan_steps(-0.5, 0.0));
    if (brackets.size() != 1) {
        throw InternalError("lorentz_lambda_0: expected exactly one sign change in (-1/2, 0), found " +
                            std::to_string(brackets.size()));
    }
    return find_root(f, brackets.front(), tol);
}

/// All roots of F_+ and F_- in (a, b), ascending, with their parity.
inline LorentzScan lorentz_lambda_scan(double alpha, double omega, double a, double b) {
    require_alpha(alpha);
    require_omega(omega);
    if (!(a < b)) {
        throw DomainError("lorentz_lambda_scan: need a < b");
    }
    LorentzScan all = detail::lorentz_roots(alpha, omega, a, b, Parity::Plus);
    LorentzScan odd = detail::lorentz_roots(alpha, omega, a, b, Parity::Minus);
    all.roots.insert(all.roots.end(), odd.roots.begin(), odd.roots.end());
    all.rejected.insert(all.rejected.end(), odd.rejected.begin(), odd.rejected.end());
    auto const by_lambda = [](LorentzRoot const& x, LorentzRoot const& y) { return x.lambda < y.lambda; };
    std::sort(all.roots.begin(), all.roots.end(), by_lambda);
    std::sort(all.rejected.begin(), all.rejected.end(), by_lambda);
    return all;
}

namespace detail {

/// Roots of one parity around the pinned root, enough to cover offsets
/// [omin, omax] from the pin with one spare root on each side.
inline std::vector<double> parity_ladder(double alpha, double omega, Parity parity, int omin, int omax) {
    double const pin_lo = parity == Parity::Plus ? -0.5 : -1.0;
    double const pin_hi = parity == Parity::Plus ? 0.0 : -0.5;
    double window = std::max(std::abs(omin), std::abs(omax)) + 4.0;
    while (true) {
        window = std::min(window, lorentz_max_window);
        LorentzScan const sc = lorentz_roots(alpha, omega, -window, window, parity);
        auto const& r = sc.roots;
        auto const pin = std::find_if(r.begin(), r.end(), [&](LorentzRoot const& x) {
            return x.lambda > pin_lo && x.lambda < pin_hi;
        });
        if (pin == r.end()) {
            throw InternalError("lorentz ladder: pinned root not found");
        }
        long const p = pin - r.begin();
        // the outermost roots may sit next to the window edge; require one spare
        if (p + omin >= 1 && p + omax + 1 < static_cast<long>(r.size())) {
            std::vector<double> out;
            for (long o = omin; o <= omax; ++o) {
                out.push_back(r[static_cast<std::size_t>(p + o)].lambda);
            }
            return out;
        }
        if (window >= lorentz_max_window) {
            throw IndexError("lorentz ladder: requested indices lie outside |lambda| <= " +
                             std::to_string(lorentz_max_window));
        }
        window *= 2.0;
    }
}

/// Offset of lambda_k from its pinned root: lambda_{2n} is n steps from
/// lambda_0, lambda_{2n-1} is n steps from lambda_{-1}.
inline int ladder_offset(int k) { return k % 2 == 0 ? k / 2 : (k + 1) / 2; }

} // namespace detail

/// lambda_k for k = k_min .. k_max of the Lorentz-scalar ladder. Even k index
/// the roots of F_+ ascending with lambda_0 in (-1/2, 0); odd k index the
/// roots of F_- ascending with lambda_{-1} in (-1, -1/2).
inline std::vector<double> lorentz_ladder(double alpha, double omega, int k_min, int k_max) {
    require_alpha(alpha);
    require_omega(omega);
    if (k_min > k_max) {
        throw DomainError("lorentz_ladder: need k_min <= k_max");
    }
    int emin = 0, emax = -1, omin = 0, omax = -1;
    bool have_even = false;
    bool have_odd = false;
    for (int k = k_min; k <= k_max; ++k) {
        int const o = detail::ladder_offset(k);
        if (k % 2 == 0) {
            emin = have_even ? std::min(emin, o) : o;
            emax = have_even ? std::max(emax, o) : o;
            have_even = true;
        } else {
            omin = have_odd ? std::min(omin, o) : o;
            omax = have_odd ? std::max(omax, o) : o;
            have_odd = true;
        }
    }
    std::vector<double> const ev =
        have_even ? detail::parity_ladder(alpha, omega, Parity::Plus, emin, emax) : std::vector<double>{};
    std::vector<double> const od =
        have_odd ? detail::parity_ladder(alpha, omega, Parity::Minus, omin, omax) : std::vector<double>{};
    std::vector<double> out;
    for (int k = k_min; k <= k_max; ++k) {
        int const o = detail::ladder_offset(k);
        out.push_back(k % 2 == 0 ? ev[static_cast<std::size_t>(o - emin)] : od[static_cast<std::size_t>(o - omin)]);
    }
    return out;
}

inline double lorentz_lambda_index(double alpha, double omega, int k) {
    return lorentz_ladder(alpha, omega, k, k).front();
}

//----------------------------------------------------------------------------
// Eigenspinors
//----------------------------------------------------------------------------

struct AngularMode {
    ModelKind kind = ModelKind::QuantumDot;
    int k = 0;
    double lambda = 0.0;
    double omega = 0.0;
    double alpha = 0.0; ///< zero for quantum-dot modes

    cplx a_plus{}, b_plus{};   ///< interior coefficients
    cplx a_minus{}, b_minus{}; ///< exterior coefficients (Lorentz only)

    int eta = 0;  ///< sign with cos(pi s) = eta tanh(alpha) sin((pi - omega) s), Lorentz only
    cplx c{};     ///< coefficient relative to the closed form (a_+ = c eta e^{-i omega s/2})
    double bc_residual = 0.0; ///< theta = omega condition residual at construction

    [[nodiscard]] bool lorentz() const { return kind == ModelKind::LorentzScalar; }

    [[nodiscard]] double sheet_begin(Sheet s) const { return s == Sheet::Plus ? 0.0 : omega; }
    [[nodiscard]] double sheet_end(Sheet s) const { return s == Sheet::Plus ? omega : 2.0 * pi; }

    /// Value on a given sheet; no range check.
    [[nodiscard]] Spinor2 value(Sheet s, double theta) const {
        cplx const e = std::polar(1.0, lambda * theta);
        return s == Sheet::Plus ? Spinor2{a_plus * e, b_plus * std::conj(e)}
                                : Spinor2{a_minus * e, b_minus * std::conj(e)};
    }

    /// Exact theta-derivative on a given sheet.
    [[nodiscard]] Spinor2 derivative(Sheet s, double theta) const {
        cplx const e = std::polar(1.0, lambda * theta);
        cplx const il = I * lambda;
        return s == Sheet::Plus ? Spinor2{il * a_plus * e, -il * b_plus * std::conj(e)}
                                : Spinor2{il * a_minus * e, -il * b_minus * std::conj(e)};
    }

    [[nodiscard]] std::vector<Sheet> sheets() const {
        if (lorentz()) {
            return {Sheet::Plus, Sheet::Minus};
        }
        return {Sheet::Plus};
    }
};

/// Sheet containing theta; Lorentz modes use the interior sheet on [0, omega].
inline Sheet sheet_of(AngularMode const& m, double theta) {
    double const tol = 1e-12;
    if (!m.lorentz()) {
        if (!(theta >= -tol && theta <= m.omega + tol)) {
            throw DomainError("eval_mode: angle outside [0, omega]");
        }
        return Sheet::Plus;
    }
    if (!(theta >= -tol && theta <= 2.0 * pi + tol)) {
        throw DomainError("eval_mode: angle outside [0, 2 pi]");
    }
    return theta <= m.omega ? Sheet::Plus : Sheet::Minus;
}

inline Spinor2 eval_mode(AngularMode const& m, double theta) {
    return m.value(sheet_of(m, theta), theta);
}

/// f_k(theta) = (2 omega)^{-1/2} (e^{i lambda theta}, e^{-i lambda theta}).
inline AngularMode qdot_eigenfunction(int k, double omega) {
    AngularMode m;
    m.kind = ModelKind::QuantumDot;
    m.k = k;
    m.omega = omega;
    m.lambda = qdot_lambda(k, omega);
    double const n = 1.0 / std::sqrt(2.0 * omega);
    m.a_plus = n;
    m.b_plus = n;
    m.c = n;
    m.bc_residual = std::abs(m.b_plus * std::polar(1.0, -m.lambda * omega) +
                             std::polar(1.0, omega) * m.a_plus * std::polar(1.0, m.lambda * omega));
    return m;
}

/// Transmission matrix at theta = 0 / 2 pi: f_-(2 pi) = T0 f_+(0).
inline Mat2 transmission_at_zero(double alpha) {
    double const ch = std::cosh(alpha);
    double const sh = std::sinh(alpha);
    return {ch, -sh, -sh, ch};
}

/// Transmission matrix at theta = omega: f_-(omega) = T f_+(omega).
inline Mat2 transmission_at_omega(double alpha, double omega) {
    double const ch = std::cosh(alpha);
    double const sh = std::sinh(alpha);
    return {ch, sh * std::polar(1.0, -omega), sh * std::polar(1.0, omega), ch};
}

namespace detail {

/// The sign eta with cos(pi s) = eta tanh(alpha) sin((pi - omega) s) at a root, s = lambda + 1/2.
inline int lorentz_eta(double lambda, double alpha, double omega) {
    double const s = lambda + 0.5;
    return std::cos(pi * s) * alpha * std::sin((pi - omega) * s) > 0 ? 1 : -1;
}

struct LorentzCoefficients {
    cplx ap, bp, am, bm;
    int eta;
    double residual;
};

/// Unnormalized coefficients for eigenvalue lambda: closed-form interior pair,
/// exterior pair from the theta = 0 / 2 pi transmission, residual of theta = omega.
inline LorentzCoefficients lorentz_coefficients(double lambda, double alpha, double omega) {
    double const s = lambda + 0.5;
    double const sn = std::sin((pi - omega) * s);
    if (std::abs(sn) < degenerate_root_guard) {
        throw ConsistencyError("lorentz_eigenfunction: degenerate root (sine factor vanishes)");
    }
    LorentzCoefficients c{};
    c.eta = lorentz_eta(lambda, alpha, omega);
    c.ap = static_cast<double>(c.eta) * std::polar(1.0, -0.5 * omega * s);
    c.bp = I * std::polar(1.0, 0.5 * omega * s);
    Spinor2 const at_zero = transmission_at_zero(alpha) * Spinor2{c.ap, c.bp};
    c.am = std::polar(1.0, -2.0 * pi * lambda) * at_zero[0];
    c.bm = std::polar(1.0, 2.0 * pi * lambda) * at_zero[1];

    cplx const e = std::polar(1.0, omega * lambda);
    Spinor2 const lhs{e * c.am, std::conj(e) * c.bm};
    Spinor2 const rhs = transmission_at_omega(alpha, omega) * Spinor2{e * c.ap, std::conj(e) * c.bp};
    double const scale = std::sqrt(std::norm(c.ap) + std::norm(c.bp) + std::norm(c.am) + std::norm(c.bm));
    c.residual = (lhs - rhs).norm() / scale;
    return c;
}

inline double joint_norm(cplx ap, cplx bp, cplx am, cplx bm, double omega) {
    return std::sqrt((std::norm(ap) + std::norm(bp)) * omega +
                     (std::norm(am) + std::norm(bm)) * (2.0 * pi - omega));
}

/// Unit phase making b_+ = conj(a_+) (charge-conjugation invariance). The
/// remaining sign is chosen closest to e^{-i eta pi/4}.
inline cplx charge_phase(LorentzCoefficients const& c) {
    cplx phase = std::sqrt(std::conj(c.ap) / c.bp);
    phase /= std::abs(phase);
    if ((phase * std::polar(1.0, c.eta * pi / 4.0)).real() < 0) {
        phase = -phase;
    }
    return phase;
}

} // namespace detail

inline constexpr double mode_consistency_tol = 1e-9;

/// Lorentz-scalar eigenspinor for index k, unit joint L2 norm, with the
/// global phase chosen so that sigma1 conj(f_k) = f_k and sigma.e_r f_k = f_{-k-1}.
inline AngularMode lorentz_eigenfunction(int k, double alpha, double omega) {
    require_alpha(alpha);
    require_omega(omega);
    AngularMode m;
    m.kind = ModelKind::LorentzScalar;
    m.k = k;
    m.omega = omega;
    m.alpha = alpha;
    m.lambda = lorentz_lambda_index(alpha, omega, k);

    auto const c = detail::lorentz_coefficients(m.lambda, alpha, omega);
    if (!(c.residual < mode_consistency_tol)) {
        throw ConsistencyError("lorentz_eigenfunction: theta = omega condition residual " +
                               std::to_string(c.residual) + " for k = " + std::to_string(k));
    }
    double const nrm = detail::joint_norm(c.ap, c.bp, c.am, c.bm, omega);

    cplx phase = detail::charge_phase(c);
    if (k < 0) {
        // sign fixed by the radial flip: a_{k,+} = b_{-k-1,+}
        double const lp = lorentz_lambda_index(alpha, omega, -k - 1);
        auto const pc = detail::lorentz_coefficients(lp, alpha, omega);
        cplx const partner_b =
            detail::charge_phase(pc) * pc.bp / detail::joint_norm(pc.ap, pc.bp, pc.am, pc.bm, omega);
        if ((phase * c.ap * std::conj(partner_b)).real() < 0) {
            phase = -phase;
        }
    }

    m.eta = c.eta;
    m.c = phase / nrm;
    m.a_plus = m.c * c.ap;
    m.b_plus = m.c * c.bp;
    m.a_minus = m.c * c.am;
    m.b_minus = m.c * c.bm;
    m.bc_residual = c.residual;
    return m;
}

/// Mode of either model; alpha is ignored for the quantum dot.
inline AngularMode make_mode(ModelKind kind, int k, double omega, double alpha) {
    return kind == ModelKind::QuantumDot ? qdot_eigenfunction(k, omega)
                                         : lorentz_eigenfunction(k, alpha, omega);
}

/// Candidate closed-form normalization constants, kept for comparison with the
/// numerically normalized coefficients.
struct ClosedFormNormalization {
    double minus_form;       ///< [2 cosh a (cosh a - sinh a eta sin(omega s))]^{-1/2}
    double plus_form;        ///< [cosh a (cosh a + sinh a eta sin(omega s))]^{-1/2}
    double coefficient_norm; ///< (|a+|^2 + |b+|^2 + |a-|^2 + |b-|^2)^{-1/2} at c = 1
    double l2_norm;          ///< joint L2 normalization at c = 1 (what the modes use)
};

inline ClosedFormNormalization closed_form_normalization(AngularMode const& m) {
    if (!m.lorentz()) {
        throw ParameterMismatch("closed_form_normalization: Lorentz-scalar modes only");
    }
    double const ch = std::cosh(m.alpha);
    double const sh = std::sinh(m.alpha);
    double const sw = std::sin(m.omega * (m.lambda + 0.5));
    auto const c = detail::lorentz_coefficients(m.lambda, m.alpha, m.omega);
    ClosedFormNormalization p{};
    p.minus_form = 1.0 / std::sqrt(2.0 * ch * (ch - sh * m.eta * sw));
    p.plus_form = 1.0 / std::sqrt(ch * (ch + sh * m.eta * sw));
    p.coefficient_norm =
        1.0 / std::sqrt(std::norm(c.ap) + std::norm(c.bp) + std::norm(c.am) + std::norm(c.bm));
    p.l2_norm = 1.0 / detail::joint_norm(c.ap, c.bp, c.am, c.bm, m.omega);
    return p;
}

//----------------------------------------------------------------------------
// Verification of the defining properties
//----------------------------------------------------------------------------

inline void require_same_family(AngularMode const& a, AngularMode const& b) {
    if (a.kind != b.kind || a.omega != b.omega || a.alpha != b.alpha) {
        throw ParameterMismatch("modes belong to different models or parameters");
    }
}

/// <a, b> over [0, omega] (and [omega, 2 pi] for Lorentz modes), by quadrature.
inline cplx angular_inner_product(AngularMode const& a, AngularMode const& b) {
    require_same_family(a, b);
    cplx sum{};
    for (Sheet s : a.sheets()) {
        QuadratureRule const rule(a.sheet_begin(s), a.sheet_end(s));
        sum += integrate_1d([&](double t) { return inner(a.value(s, t), b.value(s, t)); }, rule);
    }
    return sum;
}

/// Equispaced sample angles covering [begin, end] inclusive.
inline std::vector<double> sample_angles(double begin, double end, int n = residual_samples) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
        t[i] = begin + (end - begin) * i / (n - 1);
    }
    return t;
}

/// Sup of |sigma.e_r(theta) f_k(theta) - f_{-k-1}(theta)|.
inline double radial_flip_residual(AngularMode const& m, AngularMode const& partner) {
    require_same_family(m, partner);
    if (partner.k != -m.k - 1) {
        throw ParameterMismatch("radial_flip_residual: partner must have index -k-1");
    }
    double sup = 0.0;
    for (Sheet s : m.sheets()) {
        for (double t : sample_angles(m.sheet_begin(s), m.sheet_end(s))) {
            sup = std::max(sup, (sigma_radial(t) * m.value(s, t) - partner.value(s, t)).norm());
        }
    }
    return sup;
}

inline double radial_flip_residual(AngularMode const& m) {
    return radial_flip_residual(m, make_mode(m.kind, -m.k - 1, m.omega, m.alpha));
}

/// Sup of |-i sigma3 f'(theta) - (lambda + shift) f(theta)|.
inline double angular_operator_residual(AngularMode const& m, double lambda_shift = 0.0) {
    double sup = 0.0;
    for (Sheet s : m.sheets()) {
        for (double t : sample_angles(m.sheet_begin(s), m.sheet_end(s))) {
            Spinor2 const lhs = -I * (sigma3 * m.derivative(s, t));
            sup = std::max(sup, (lhs - (m.lambda + lambda_shift) * m.value(s, t)).norm());
        }
    }
    return sup;
}

/// Largest violation of the boundary (quantum dot) or transmission (Lorentz)
/// conditions of the angular operator domain.
inline double boundary_residual(AngularMode const& m) {
    if (!m.lorentz()) {
        Spinor2 const f0 = m.value(Sheet::Plus, 0.0);
        Spinor2 const fw = m.value(Sheet::Plus, m.omega);
        double const r0 = std::abs(f0[1] - f0[0]);
        double const rw = std::abs(fw[1] + std::polar(1.0, m.omega) * fw[0]);
        return std::max(r0, rw);
    }
    Spinor2 const r0 = m.value(Sheet::Minus, 2.0 * pi) -
                       transmission_at_zero(m.alpha) * m.value(Sheet::Plus, 0.0);
    Spinor2 const rw = m.value(Sheet::Minus, m.omega) -
                       transmission_at_omega(m.alpha, m.omega) * m.value(Sheet::Plus, m.omega);
    return std::max(r0.norm(), rw.norm());
}

/// sigma1 conj(v).
inline Spinor2 charge_conjugate(Spinor2 const& v) {
    return {std::conj(v[1]), std::conj(v[0])};
}

/// Sup of |sigma1 conj(f) - f| over the sample grid.
inline double charge_residual(AngularMode const& m) {
    double sup = 0.0;
    for (Sheet s : m.sheets()) {
        for (double t : sample_angles(m.sheet_begin(s), m.sheet_end(s))) {
            Spinor2 const f = m.value(s, t);
            sup = std::max(sup, (charge_conjugate(f) - f).norm());
        }
    }
    return sup;
}

} // namespace wedgedirac
