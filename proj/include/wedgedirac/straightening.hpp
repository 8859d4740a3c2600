#pragma once

// Flattening of a curvilinear corner onto the model wedge. Coordinates put
// the bisector on the y-axis; the wedge is { y > |x| cot(omega/2) } and the
// domain is the region above the boundary graph y = c(x).
//
// With g(x) = c(x) - |x| cot(omega/2):
//   S(x, y) = (x, y - g(x)),  J = [[1, 0], [-g', 1]],
//   (U u)(x, y) = E(x) u(S(x, y)),  E = exp(i delta sigma3 / 2),
//   U* H U = H + L1 d_x + L2 d_y + M.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "wedgedirac/core_model.hpp"
#include "wedgedirac/errors.hpp"
#include "wedgedirac/numerics.hpp"

namespace wedgedirac {

inline double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

//----------------------------------------------------------------------------
// Boundary curves
//----------------------------------------------------------------------------

/// Boundary graph y = c(x) near the corner, one branch per sign of x.
struct BoundaryCurve {
    std::string kind;
    double omega = pi / 2;
    double cot_half = 1.0; ///< cot(omega/2), shared with the map so straight curves cancel exactly
    double x_min = -1.0;
    double x_max = 1.0;
    std::function<double(double)> c;
    std::function<double(double)> dc;
    std::function<double(double)> d2c;
    std::function<double(double)> dev;  ///< c(x) - |x| cot(omega/2), evaluated without cancellation
    std::function<double(double)> ddev; ///< its slope
    double sup_c2 = 0.0;
    std::optional<double> differentiation_error; ///< sampled curves only

    [[nodiscard]] bool contains(double x) const { return x >= x_min && x <= x_max; }
};

inline double cot_half_angle(double omega) {
    require_omega(omega);
    return 1.0 / std::tan(0.5 * omega);
}

namespace detail {

inline double sampled_sup_abs(std::function<double(double)> const& f, double a, double b) {
    constexpr int n = 2001;
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        double const x = a + (b - a) * i / (n - 1);
        if (x == 0.0) {
            // both one-sided limits at the corner
            sup = std::max({sup, std::abs(f(std::nextafter(0.0, -1.0))), std::abs(f(std::nextafter(0.0, 1.0)))});
            continue;
        }
        sup = std::max(sup, std::abs(f(x)));
    }
    return sup;
}

inline double horner(std::vector<double> const& a, double x) {
    double s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        s = s * x + *it;
    }
    return s;
}

inline void require_range(double x_min, double x_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < 0.0) || !(x_max > 0.0)) {
        throw DomainError("curve range must straddle the corner: x_min < 0 < x_max");
    }
}

} // namespace detail

/// c(x) = |x| cot(omega/2) + sum_j a_j x^{j+2}, coefficients chosen per branch.
inline BoundaryCurve poly_curve(double omega, std::vector<double> coeffs_pos, std::vector<double> coeffs_neg,
                                double x_min = -1.0, double x_max = 1.0) {
    detail::require_range(x_min, x_max);
    for (double a : coeffs_pos) {
        if (!std::isfinite(a)) {
            throw DomainError("poly_curve: non-finite coefficient");
        }
    }
    for (double a : coeffs_neg) {
        if (!std::isfinite(a)) {
            throw DomainError("poly_curve: non-finite coefficient");
        }
    }
    BoundaryCurve cv;
    cv.kind = "poly";
    cv.omega = omega;
    cv.cot_half = cot_half_angle(omega);
    cv.x_min = x_min;
    cv.x_max = x_max;
    // derivative coefficient tables
    auto const deriv = [](std::vector<double> const& a, int order) {
        std::vector<double> d(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            double f = 1.0;
            for (int o = 0; o < order; ++o) {
                f *= static_cast<double>(j + 2 - o);
            }
            d[j] = a[j] * f;
        }
        return d;
    };
    std::vector<double> const p1 = deriv(coeffs_pos, 1);
    std::vector<double> const n1 = deriv(coeffs_neg, 1);
    std::vector<double> const p2 = deriv(coeffs_pos, 2);
    std::vector<double> const n2 = deriv(coeffs_neg, 2);
    double const ct = cv.cot_half;
    cv.c = [ct, coeffs_pos, coeffs_neg](double x) {
        auto const& a = x < 0.0 ? coeffs_neg : coeffs_pos;
        return std::abs(x) * ct + x * x * detail::horner(a, x);
    };
    cv.dc = [ct, p1, n1](double x) {
        auto const& a = x < 0.0 ? n1 : p1;
        return sign_of(x) * ct + x * detail::horner(a, x);
    };
    cv.d2c = [p2, n2](double x) { return detail::horner(x < 0.0 ? n2 : p2, x); };
    cv.dev = [coeffs_pos, coeffs_neg](double x) { return x * x * detail::horner(x < 0.0 ? coeffs_neg : coeffs_pos, x); };
    cv.ddev = [p1, n1](double x) { return x * detail::horner(x < 0.0 ? n1 : p1, x); };
    cv.sup_c2 = detail::sampled_sup_abs(cv.d2c, x_min, x_max);
    return cv;
}

/// The straight wedge boundary c(x) = |x| cot(omega/2).
inline BoundaryCurve wedge_curve(double omega, double x_min = -1.0, double x_max = 1.0) {
    BoundaryCurve cv = poly_curve(omega, {}, {}, x_min, x_max);
    cv.kind = "wedge";
    return cv;
}

/// c(x) = |x| cot(omega/2) + x^2 / 2 on both branches.
inline BoundaryCurve quadratic_test_curve(double omega) {
    BoundaryCurve cv = poly_curve(omega, {0.5}, {0.5});
    cv.kind = "quadratic";
    return cv;
}

namespace detail {

/// Natural cubic spline through (x_i, y_i), strictly increasing x.
class NaturalSpline {
public:
    NaturalSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size() || x_.size() < 3) {
            throw FormatError("spline branch needs at least three points");
        }
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            if (!(x_[i] < x_[i + 1])) {
                throw FormatError("spline abscissae must be strictly increasing");
            }
        }
        gsl_set_error_handler_off();
        interp_.reset(gsl_interp_alloc(gsl_interp_cspline, x_.size()));
        if (!interp_ || gsl_interp_init(interp_.get(), x_.data(), y_.data(), x_.size()) != GSL_SUCCESS) {
            throw NumericalError("spline construction failed");
        }
    }

    [[nodiscard]] double lo() const { return x_.front(); }
    [[nodiscard]] double hi() const { return x_.back(); }
    [[nodiscard]] std::vector<double> const& xs() const { return x_; }
    [[nodiscard]] std::vector<double> const& ys() const { return y_; }

    [[nodiscard]] double eval(double x, int order) const {
        double v = 0.0;
        int status = GSL_SUCCESS;
        x = std::clamp(x, lo(), hi());
        switch (order) {
        case 0: status = gsl_interp_eval_e(interp_.get(), x_.data(), y_.data(), x, nullptr, &v); break;
        case 1: status = gsl_interp_eval_deriv_e(interp_.get(), x_.data(), y_.data(), x, nullptr, &v); break;
        default: status = gsl_interp_eval_deriv2_e(interp_.get(), x_.data(), y_.data(), x, nullptr, &v); break;
        }
        if (status != GSL_SUCCESS) {
            throw NumericalError("spline evaluation failed");
        }
        return v;
    }

private:
    struct Free {
        void operator()(gsl_interp* p) const { gsl_interp_free(p); }
    };
    std::vector<double> x_;
    std::vector<double> y_;
    std::unique_ptr<gsl_interp, Free> interp_;
};

struct SplinePair {
    NaturalSpline neg;
    NaturalSpline pos;

    [[nodiscard]] double eval(double x, int order) const { return (x < 0.0 ? neg : pos).eval(x, order); }
};

inline std::shared_ptr<SplinePair const> make_spline_pair(std::vector<Point> const& pts) {
    std::vector<double> nx, ny, px, py;
    for (Point const& p : pts) {
        if (p.x <= 0.0) {
            nx.push_back(p.x);
            ny.push_back(p.y);
        }
        if (p.x >= 0.0) {
            px.push_back(p.x);
            py.push_back(p.y);
        }
    }
    if (nx.empty() || px.empty() || nx.back() != 0.0 || px.front() != 0.0) {
        throw FormatError("sampled curve must contain the corner point x = 0 and both branches");
    }
    return std::make_shared<SplinePair const>(
        SplinePair{NaturalSpline(std::move(nx), std::move(ny)), NaturalSpline(std::move(px), std::move(py))});
}

} // namespace detail

/// Curve through sample points (sorted by x, containing x = 0). When omega is
/// absent it is estimated from the right-hand tangent at the corner.
inline BoundaryCurve spline_curve(std::vector<Point> pts, std::optional<double> omega = std::nullopt) {
    for (Point const& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw FormatError("sampled curve: non-finite coordinate");
        }
    }
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x; });
    auto const sp = detail::make_spline_pair(pts);
    // the corner sits at the origin
    if (std::abs(sp->pos.ys().front()) > 1e-12) {
        throw FormatError("sampled curve must pass through the corner (0, 0)");
    }
    BoundaryCurve cv;
    cv.kind = "samples";
    double const slope0 = sp->pos.eval(0.0, 1);
    cv.omega = omega ? *omega : 2.0 * std::atan2(1.0, slope0);
    cv.cot_half = cot_half_angle(cv.omega);
    cv.x_min = sp->neg.lo();
    cv.x_max = sp->pos.hi();
    detail::require_range(cv.x_min, cv.x_max);
    cv.c = [sp](double x) { return sp->eval(x, 0); };
    cv.dc = [sp](double x) { return sp->eval(x, 1); };
    cv.d2c = [sp](double x) { return sp->eval(x, 2); };
    double const ct = cv.cot_half;
    cv.dev = [sp, ct](double x) { return sp->eval(x, 0) - std::abs(x) * ct; };
    cv.ddev = [sp, ct](double x) { return sp->eval(x, 1) - sign_of(x) * ct; };
    cv.sup_c2 = detail::sampled_sup_abs(cv.d2c, cv.x_min, cv.x_max);

    // differentiation error: compare c' against a spline on every other sample
    std::vector<Point> coarse;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i % 2 == 0 || pts[i].x == 0.0) {
            coarse.push_back(pts[i]);
        }
    }
    try {
        auto const cs = detail::make_spline_pair(coarse);
        double err = 0.0;
        for (Point const& p : pts) {
            err = std::max(err, std::abs(cs->eval(p.x, 1) - sp->eval(p.x, 1)));
        }
        cv.differentiation_error = err;
    } catch (FormatError const&) {
        cv.differentiation_error = std::nullopt; // too few samples to thin out
    }
    return cv;
}

//----------------------------------------------------------------------------
// Curve documents
//----------------------------------------------------------------------------

inline BoundaryCurve curve_from_json(nlohmann::json const& doc) {
    try {
        if (!doc.is_object()) {
            throw FormatError("curve document must be a JSON object");
        }
        std::string const type = doc.at("type").get<std::string>();
        if (type == "poly") {
            double const omega = doc.at("omega").get<double>();
            auto const pos = doc.value("coeffs_pos", std::vector<double>{});
            auto const neg = doc.value("coeffs_neg", std::vector<double>{});
            double const x_min = doc.value("x_min", -1.0);
            double const x_max = doc.value("x_max", 1.0);
            return poly_curve(omega, pos, neg, x_min, x_max);
        }
        if (type == "samples") {
            std::vector<Point> pts;
            for (auto const& p : doc.at("points")) {
                if (!p.is_array() || p.size() != 2) {
                    throw FormatError("each sample point must be [x, y]");
                }
                pts.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            std::optional<double> omega;
            if (doc.contains("omega")) {
                omega = doc.at("omega").get<double>();
            }
            return spline_curve(std::move(pts), omega);
        }
        throw FormatError("unknown curve type '" + type + "'");
    } catch (nlohmann::json::exception const& e) {
        throw FormatError(std::string("curve document: ") + e.what());
    }
}

inline BoundaryCurve curve_from_json_text(std::string const& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (nlohmann::json::parse_error const& e) {
        throw FormatError(std::string("curve document is not valid JSON: ") + e.what());
    }
    return curve_from_json(doc);
}

//----------------------------------------------------------------------------
// Straightening map
//----------------------------------------------------------------------------

struct Perturbation {
    Mat2 L1;
    Mat2 L2;
    Mat2 M;
};

/// Which orientation of the tangent rotation to use; Flipped is the negative control.
enum class DeltaSign { Standard, Flipped };

class StraighteningMap {
public:
    explicit StraighteningMap(BoundaryCurve curve) : curve_(std::move(curve)) {}

    [[nodiscard]] BoundaryCurve const& curve() const { return curve_; }

    /// g(x) = c(x) - |x| cot(omega/2).
    [[nodiscard]] double offset(double x) const {
        require_in_range(x);
        return curve_.dev(x);
    }

    /// g'(x), one-sided at the corner.
    [[nodiscard]] double offset_slope(double x) const {
        require_off_corner(x);
        return curve_.ddev(x);
    }

    [[nodiscard]] Point straighten(Point p) const { return {p.x, p.y - offset(p.x)}; }

    [[nodiscard]] Mat2 jacobian(double x) const { return {1.0, 0.0, -offset_slope(x), 1.0}; }

    /// Angle from the wedge normal to the curve normal at abscissa x; zero
    /// when the two tangents coincide.
    [[nodiscard]] double rotation_angle(double x, DeltaSign sign = DeltaSign::Standard) const {
        require_off_corner(x);
        double const c1 = curve_.dc(x);
        if (std::abs(c1) < 1e-14) {
            throw SingularTangent("rotation_angle: horizontal tangent, arctan(1/c') is undefined");
        }
        double const a = sign_of(x) * c1;
        double const b = curve_.cot_half;
        // atan2(1, a) - atan2(1, b) with b - a = -sign(x) g'(x) taken from the deviation directly
        double const d = -sign_of(x) * std::atan2(-sign_of(x) * offset_slope(x), 1.0 + a * b);
        return sign == DeltaSign::Standard ? d : -d;
    }

    [[nodiscard]] double delta_prime(double x) const {
        require_off_corner(x);
        double const c1 = curve_.dc(x);
        return curve_.d2c(x) / (1.0 + c1 * c1);
    }

    /// exp(i delta sigma3 / 2).
    [[nodiscard]] Mat2 transport_matrix(double x, DeltaSign sign = DeltaSign::Standard) const {
        return exp_i_sigma3(0.5 * rotation_angle(x, sign));
    }

    [[nodiscard]] SpinorPair spinor_transport(double x, SpinorPair const& v) const {
        Mat2 const e = transport_matrix(x);
        return {e * v.plus, e * v.minus};
    }

    [[nodiscard]] Perturbation perturbation_matrices(double x) const {
        double const d = rotation_angle(x);
        Mat2 const back = exp_i_sigma3(-d) - Mat2::identity();
        Mat2 const fwd = exp_i_sigma3(d);
        Perturbation p;
        p.L1 = -I * (back * sigma1);
        p.L2 = -I * (back * sigma2) + (I * offset_slope(x)) * (sigma1 * fwd);
        p.M = cplx{0.5 * delta_prime(x)} * (sigma1 * sigma3 * fwd);
        return p;
    }

    /// Outward unit normal of the region above the curve at abscissa x.
    [[nodiscard]] Point curve_normal(double x) const {
        require_off_corner(x);
        double const c1 = curve_.dc(x);
        double const n = std::hypot(c1, 1.0);
        return {c1 / n, -1.0 / n};
    }

    /// Outward unit normal of the wedge on the branch of x.
    [[nodiscard]] Point wedge_normal(double x) const {
        require_off_corner(x);
        double const c1 = sign_of(x) * curve_.cot_half;
        double const n = std::hypot(c1, 1.0);
        return {c1 / n, -1.0 / n};
    }

private:
    void require_in_range(double x) const {
        if (!std::isfinite(x) || !curve_.contains(x)) {
            throw DomainError("abscissa outside the modelled curve range");
        }
    }
    void require_off_corner(double x) const {
        require_in_range(x);
        if (x == 0.0) {
            throw DomainError("quantity is one-sided at the corner; x must be nonzero");
        }
    }

    BoundaryCurve curve_;
};

//----------------------------------------------------------------------------
// Contracts
//----------------------------------------------------------------------------

/// Interior trace used to probe the transmission condition at abscissa x.
inline Spinor2 probe_trace(double x) {
    return {cplx{1.0 + 0.3 * x, 0.2 - x}, cplx{-0.4 + x * x, 0.7}};
}

/// Build traces satisfying the Lorentz condition with the curve normal,
/// transport both by E(x) and return the worst relative residual of the
/// condition with the wedge normal.
inline double bc_preservation_check(StraighteningMap const& map, LorentzModel const& model,
                                    std::vector<double> const& xs, DeltaSign sign = DeltaSign::Standard) {
    double worst = 0.0;
    for (double x : xs) {
        Spinor2 const up = probe_trace(x);
        Spinor2 const um = model.exterior_trace(map.curve_normal(x), up);
        Mat2 const e = map.transport_matrix(x, sign);
        SpinorPair const moved{e * up, e * um};
        Spinor2 const r = model.transmission_residual(map.wedge_normal(x), moved);
        worst = std::max(worst, r.norm() / (moved.plus.norm() + moved.minus.norm()));
    }
    return worst;
}

/// n points per branch with |x| uniform in (0, extent], negative branch first.
inline std::vector<double> boundary_samples(int per_branch, double extent) {
    if (per_branch < 1 || !(extent > 0.0)) {
        throw DomainError("boundary_samples: need a positive count and extent");
    }
    std::vector<double> xs;
    for (int i = per_branch; i >= 1; --i) {
        xs.push_back(-extent * i / per_branch);
    }
    for (int i = 1; i <= per_branch; ++i) {
        xs.push_back(extent * i / per_branch);
    }
    return xs;
}

/// |x| = 10^{-4} .. 10^{-1}, n log-spaced values per branch, negative branch first.
inline std::vector<double> log_grid(int per_branch = 13) {
    if (per_branch < 2) {
        throw DomainError("log_grid: need at least two points per branch");
    }
    std::vector<double> mags;
    for (int i = 0; i < per_branch; ++i) {
        mags.push_back(std::pow(10.0, -4.0 + 3.0 * i / (per_branch - 1)));
    }
    std::vector<double> xs;
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) {
        xs.push_back(-*it);
    }
    xs.insert(xs.end(), mags.begin(), mags.end());
    return xs;
}

/// Least-squares slope of log y against log |x| over entries with y > 0.
inline std::optional<double> loglog_slope(std::vector<double> const& xs, std::vector<double> const& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] > 0.0 && xs[i] != 0.0) {
            double const lx = std::log(std::abs(xs[i]));
            double const ly = std::log(ys[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
    }
    if (n < 2) {
        return std::nullopt;
    }
    double const den = n * sxx - sx * sx;
    if (den == 0.0) {
        return std::nullopt;
    }
    return (n * sxy - sx * sy) / den;
}

/// Smooth test spinor exp(-(X^2 + Y^2)) (1 + X + iY, 1/2 - iXY) with exact gradient.
struct TestSpinor {
    [[nodiscard]] static Spinor2 value(Point p) {
        double const q = std::exp(-(p.x * p.x + p.y * p.y));
        return {q * cplx{1.0 + p.x, p.y}, q * cplx{0.5, -p.x * p.y}};
    }
    [[nodiscard]] static Spinor2 dx(Point p) {
        double const q = std::exp(-(p.x * p.x + p.y * p.y));
        cplx const a{1.0 + p.x, p.y};
        cplx const b{0.5, -p.x * p.y};
        return {q * (1.0 - 2.0 * p.x * a), q * (cplx{0.0, -p.y} - 2.0 * p.x * b)};
    }
    [[nodiscard]] static Spinor2 dy(Point p) {
        double const q = std::exp(-(p.x * p.x + p.y * p.y));
        cplx const a{1.0 + p.x, p.y};
        cplx const b{0.5, -p.x * p.y};
        return {q * (I - 2.0 * p.y * a), q * (cplx{0.0, -p.x} - 2.0 * p.y * b)};
    }
};

/// Relative mismatch between H(U u) by central differences and
/// U((H + L1 d_x + L2 d_y + M) u), at a point with |x| > 2h.
inline double transport_identity_residual(StraighteningMap const& map, Point p, double h) {
    if (!(std::abs(p.x) > 2.0 * h)) {
        throw DomainError("transport_identity_residual: stencil crosses the corner abscissa");
    }
    auto const w = [&](Point q) { return map.transport_matrix(q.x) * TestSpinor::value(map.straighten(q)); };
    Spinor2 const lhs = dirac_fd(w, p, h);

    Point const s = map.straighten(p);
    Spinor2 const ux = TestSpinor::dx(s);
    Spinor2 const uy = TestSpinor::dy(s);
    Spinor2 const hu = -I * (sigma1 * ux + sigma2 * uy);
    Perturbation const pm = map.perturbation_matrices(p.x);
    Spinor2 const inner_op = hu + pm.L1 * ux + pm.L2 * uy + pm.M * TestSpinor::value(s);
    Spinor2 const rhs = map.transport_matrix(p.x) * inner_op;
    return (lhs - rhs).norm() / rhs.norm();
}

/// Rotation taking the edge-on-theta=0 frame to the bisector-on-y frame.
inline Point to_bisector_frame(Point p, double omega) {
    require_omega(omega);
    double const t = 0.5 * pi - 0.5 * omega;
    return {std::cos(t) * p.x - std::sin(t) * p.y, std::sin(t) * p.x + std::cos(t) * p.y};
}

} // namespace wedgedirac
