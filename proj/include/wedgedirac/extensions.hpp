#pragma once

// Self-adjoint extension bookkeeping: the census of singular exponents in
// (-1, 0], the verdict for the minimal operator, the tau-line of extension
// vectors and its behaviour under charge conjugation.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wedgedirac/angular_spectrum.hpp"
#include "wedgedirac/core_model.hpp"

namespace wedgedirac {

enum class Verdict { SelfAdjointOnH1, OneParameterFamily };

inline std::string to_string(Verdict v) {
    return v == Verdict::SelfAdjointOnH1 ? "SelfAdjointOnH1" : "OneParameterFamily";
}

struct Exponent {
    int k;
    double lambda;
};

struct ExtensionClassification {
    Verdict verdict = Verdict::SelfAdjointOnH1;
    std::vector<Exponent> window;  ///< lambda in (-1, 0], k = 0 first
    std::vector<Exponent> h_half;  ///< sub-list with lambda > -1/2
    std::optional<double> tau;
};

enum class HalfStatus { Member, NonMember, Boundary };

/// r^lambda f lies in H^{1/2} near the corner iff lambda > -1/2. An exact hit
/// on -1/2 is reported separately and treated as non-member.
inline HalfStatus h_half_status(double lambda) {
    if (lambda == -0.5) {
        return HalfStatus::Boundary;
    }
    return lambda > -0.5 ? HalfStatus::Member : HalfStatus::NonMember;
}

inline bool h_half_member(double lambda) { return h_half_status(lambda) == HalfStatus::Member; }

inline bool in_window(double lambda) { return lambda > -1.0 && lambda <= 0.0; }

/// All (k, lambda_k) with lambda_k in (-1, 0].
inline std::vector<Exponent> singular_exponents(ModelKind kind, double omega, double alpha = 1.0) {
    require_omega(omega);
    std::vector<Exponent> out;
    if (kind == ModelKind::QuantumDot) {
        // spacing pi/omega > 1/2, so only |2k + 1| <= 3 can land in a window of length 1
        for (int k = -2; k <= 1; ++k) {
            double const l = qdot_lambda(k, omega);
            if (in_window(l)) {
                out.push_back({k, l});
            }
        }
    } else {
        require_alpha(alpha);
        // neither endpoint is ever a root (F(0), F(-1) reduce to a nonzero sine)
        LorentzScan const sc = lorentz_lambda_scan(alpha, omega, -1.0, 0.0);
        std::vector<double> plus;
        std::vector<double> minus;
        for (LorentzRoot const& r : sc.roots) {
            (r.parity == Parity::Plus ? plus : minus).push_back(r.lambda);
        }
        auto const pin = [](std::vector<double> const& v, double lo, double hi) {
            long found = -1;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i] > lo && v[i] < hi) {
                    if (found >= 0) {
                        throw InternalError("singular_exponents: pinned root is not unique");
                    }
                    found = static_cast<long>(i);
                }
            }
            if (found < 0) {
                throw InternalError("singular_exponents: pinned root missing from (-1, 0]");
            }
            return found;
        };
        long const p0 = pin(plus, -0.5, 0.0);
        long const p1 = pin(minus, -1.0, -0.5);
        for (std::size_t i = 0; i < plus.size(); ++i) {
            out.push_back({static_cast<int>(2 * (static_cast<long>(i) - p0)), plus[i]});
        }
        for (std::size_t i = 0; i < minus.size(); ++i) {
            out.push_back({static_cast<int>(2 * (static_cast<long>(i) - p1) - 1), minus[i]});
        }
    }
    std::sort(out.begin(), out.end(), [](Exponent const& a, Exponent const& b) { return a.k > b.k; });
    return out;
}

inline ExtensionClassification classify(ModelKind kind, double omega, double alpha = 1.0) {
    ExtensionClassification c;
    c.window = singular_exponents(kind, omega, alpha);
    if (c.window.empty()) {
        c.verdict = Verdict::SelfAdjointOnH1;
        return c;
    }
    c.verdict = Verdict::OneParameterFamily;
    for (Exponent const& e : c.window) {
        if (h_half_member(e.lambda)) {
            c.h_half.push_back(e);
        }
    }
    c.tau = 0.0;
    return c;
}

//----------------------------------------------------------------------------
// tau-line
//----------------------------------------------------------------------------

struct ExtensionVector {
    cplx c0;
    cplx cm1;
};

inline void require_tau(double tau) {
    if (!std::isfinite(tau) || !(tau >= 0.0) || !(tau < pi)) {
        throw DomainError("extension parameter tau must lie in [0, pi)");
    }
}

/// (cos tau, i sin tau): the coefficients of u_0, u_{-1} spanning D_tau.
inline ExtensionVector extension_vector(double tau) {
    require_tau(tau);
    return {std::cos(tau), I * std::sin(tau)};
}

/// The tau' whose line contains (a, b), assuming such a tau' exists.
inline double tau_of_line(ExtensionVector v) {
    double const scale = std::hypot(std::abs(v.c0), std::abs(v.cm1));
    if (!(scale > 0.0)) {
        throw DomainError("tau_of_line: zero vector");
    }
    cplx phase = 1.0;
    if (std::abs(v.c0) > 1e-14 * scale) {
        phase = std::conj(v.c0) / std::abs(v.c0);
    } else {
        phase = std::conj(-I * v.cm1) / std::abs(v.cm1);
    }
    double t = std::atan2((phase * v.cm1).imag(), (phase * v.c0).real());
    if (t < 0.0) {
        t += pi;
    }
    if (t >= pi) {
        t -= pi;
    }
    return t;
}

/// Distance of (a, b) from the complex line through extension_vector(tau').
inline double line_distance(ExtensionVector v, double tau) {
    ExtensionVector const e = extension_vector(tau);
    // |v|^2 - |<v, e>|^2 with |e| = 1
    cplx const proj = v.c0 * std::conj(e.c0) + v.cm1 * std::conj(e.cm1);
    double const n2 = std::norm(v.c0) + std::norm(v.cm1);
    return std::sqrt(std::max(0.0, n2 - std::norm(proj)));
}

/// C(c0 u_0 + cm1 u_{-1}) = conj(c0) u_0 + conj(cm1) u_{-1}, since C u_k = u_k.
inline ExtensionVector charge_image(ExtensionVector v) { return {std::conj(v.c0), std::conj(v.cm1)}; }

/// The parameter of the extension obtained by conjugating D_tau with C.
inline double charge_mapped_tau(double tau) { return tau_of_line(charge_image(extension_vector(tau))); }

/// tau with C D_tau = D_tau C: tau' = -tau mod pi is fixed only at 0 and pi/2.
inline std::vector<double> charge_symmetric_taus() { return {0.0, pi / 2.0}; }

/// n equally spaced points of [0, pi).
inline std::vector<double> tau_grid(int n) {
    if (n < 1) {
        throw DomainError("tau_grid: need at least one point");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = pi * i / n;
    }
    return g;
}

} // namespace wedgedirac
