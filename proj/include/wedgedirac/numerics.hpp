#pragma once

// Numerical kernels: composite Gauss-Legendre quadrature, bracketed root
// finding, sign-change scanning and central-difference stencils.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "wedgedirac/core_model.hpp"
#include "wedgedirac/errors.hpp"

namespace wedgedirac {

//----------------------------------------------------------------------------
// Gauss-Legendre
//----------------------------------------------------------------------------

struct NodesWeights {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
inline NodesWeights gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("gauss_legendre: order must be positive");
    }
    NodesWeights gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    int const m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double const p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double const dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) <= 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            double const p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        double const w = 2.0 / ((1.0 - z * z) * dp * dp);
        gl.nodes[i] = -z;
        gl.nodes[n - 1 - i] = z;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        gl.nodes[n / 2] = 0.0;
    }
    return gl;
}

/// Default nodes per panel; WEDGEDIRAC_QUAD_NODES overrides it for diagnostics.
inline int default_quad_nodes() {
    if (char const* env = std::getenv("WEDGEDIRAC_QUAD_NODES")) {
        char* end = nullptr;
        long const v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 256) {
            return static_cast<int>(v);
        }
    }
    return 32;
}

inline constexpr int default_quad_panels = 8;

/// Composite Gauss-Legendre rule over consecutive panels [b_i, b_{i+1}].
class QuadratureRule {
public:
    /// Uniform panels on [a, b].
    QuadratureRule(double a, double b, int panels = default_quad_panels,
                   int nodes_per_panel = default_quad_nodes())
        : QuadratureRule(uniform_breaks(a, b, panels), nodes_per_panel) {}

    /// Panels delimited by strictly increasing breakpoints.
    QuadratureRule(std::vector<double> breaks, int nodes_per_panel)
        : breaks_(std::move(breaks)), order_(nodes_per_panel) {
        if (breaks_.size() < 2) {
            throw DomainError("QuadratureRule: need at least one panel");
        }
        if (order_ < 1) {
            throw DomainError("QuadratureRule: nodes per panel must be positive");
        }
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            if (!(breaks_[i] < breaks_[i + 1]) || !std::isfinite(breaks_[i + 1])) {
                throw DomainError("QuadratureRule: breakpoints must be finite and increasing");
            }
        }
        NodesWeights const gl = gauss_legendre(order_);
        nodes_.reserve(panels() * order_);
        weights_.reserve(panels() * order_);
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            double const half = 0.5 * (breaks_[i + 1] - breaks_[i]);
            double const mid = 0.5 * (breaks_[i + 1] + breaks_[i]);
            for (int j = 0; j < order_; ++j) {
                nodes_.push_back(mid + half * gl.nodes[j]);
                weights_.push_back(half * gl.weights[j]);
            }
        }
    }

    [[nodiscard]] double a() const { return breaks_.front(); }
    [[nodiscard]] double b() const { return breaks_.back(); }
    [[nodiscard]] int panels() const { return static_cast<int>(breaks_.size()) - 1; }
    [[nodiscard]] int nodes_per_panel() const { return order_; }
    [[nodiscard]] std::span<double const> nodes() const { return nodes_; }
    [[nodiscard]] std::span<double const> weights() const { return weights_; }
    [[nodiscard]] std::span<double const> breaks() const { return breaks_; }

private:
    static std::vector<double> uniform_breaks(double a, double b, int panels) {
        if (!(a < b) || panels < 1) {
            throw DomainError("QuadratureRule: need a < b and a positive panel count");
        }
        std::vector<double> br(panels + 1);
        for (int i = 0; i <= panels; ++i) {
            br[i] = a + (b - a) * i / panels;
        }
        br.back() = b;
        return br;
    }

    std::vector<double> breaks_;
    int order_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

namespace detail {

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

} // namespace detail

/// Composite Gauss-Legendre approximation of the integral of f over the rule.
template <class F>
auto integrate_1d(F&& f, QuadratureRule const& rule) {
    using R = std::decay_t<std::invoke_result_t<F&, double>>;
    R sum{};
    auto const x = rule.nodes();
    auto const w = rule.weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        R const v = f(x[i]);
        if (!detail::finite_value(v)) {
            throw NumericalError("integrate_1d: non-finite integrand at x = " + std::to_string(x[i]));
        }
        sum += w[i] * v;
    }
    return sum;
}

//----------------------------------------------------------------------------
// Root finding
//----------------------------------------------------------------------------

struct Bracket {
    double lo;
    double hi;
};

struct RootResult {
    double x;
    double residual; ///< |f(x)|
    double width;    ///< final bracket width
    int iterations;
};

inline constexpr int max_root_iterations = 200;

/// Bracketed root search: secant proposals inside the bracket, with a
/// bisection step whenever a proposal fails to halve the bracket. The
/// returned point always lies in the initial bracket.
template <class F>
RootResult find_root_detailed(F&& f, Bracket bracket, double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("find_root: tolerance must be positive");
    }
    double lo = bracket.lo;
    double hi = bracket.hi;
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("find_root: bracket must satisfy lo < hi with finite endpoints");
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) {
        throw NumericalError("find_root: non-finite value at bracket endpoint");
    }
    if (flo == 0.0) {
        return {lo, 0.0, 0.0, 0};
    }
    if (fhi == 0.0) {
        return {hi, 0.0, 0.0, 0};
    }
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw NoSignChange("find_root: no sign change across bracket");
    }

    auto const update = [&](double x, double fx) {
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    };

    for (int it = 1; it <= max_root_iterations; ++it) {
        double const width = hi - lo;
        if (width <= tol) {
            double const x = std::abs(flo) <= std::abs(fhi) ? lo : hi;
            return {x, std::min(std::abs(flo), std::abs(fhi)), width, it - 1};
        }
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(x > lo && x < hi)) {
            x = 0.5 * (lo + hi);
        }
        double fx = f(x);
        if (!std::isfinite(fx)) {
            throw NumericalError("find_root: non-finite function value");
        }
        if (fx == 0.0) {
            return {x, 0.0, 0.0, it};
        }
        update(x, fx);
        if (hi - lo > 0.5 * width) {
            double const mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break; // bracket cannot shrink further in double precision
            }
            double const fm = f(mid);
            if (!std::isfinite(fm)) {
                throw NumericalError("find_root: non-finite function value");
            }
            if (fm == 0.0) {
                return {mid, 0.0, 0.0, it};
            }
            update(mid, fm);
        }
    }
    throw MaxIterations("find_root: tolerance not reached within iteration limit");
}

template <class F>
double find_root(F&& f, Bracket bracket, double tol) {
    return find_root_detailed(std::forward<F>(f), bracket, tol).x;
}

/// Sub-intervals [a + i d, a + (i+1) d] across which f changes sign, ascending.
/// A value that is exactly zero counts as positive, so a grid point landing
/// on a root still yields a bracket ending at that point.
template <class F>
std::vector<Bracket> scan_sign_changes(F&& f, double a, double b, long steps) {
    if (steps < 2) {
        throw DomainError("scan_sign_changes: need at least two steps");
    }
    if (!(a < b)) {
        throw DomainError("scan_sign_changes: need a < b");
    }
    std::vector<Bracket> out;
    double const d = (b - a) / static_cast<double>(steps);
    double xprev = a;
    double fprev = f(a);
    if (!std::isfinite(fprev)) {
        throw NumericalError("scan_sign_changes: non-finite value");
    }
    for (long i = 1; i <= steps; ++i) {
        double const x = (i == steps) ? b : a + d * static_cast<double>(i);
        double const fx = f(x);
        if (!std::isfinite(fx)) {
            throw NumericalError("scan_sign_changes: non-finite value");
        }
        if ((fprev < 0.0) != (fx < 0.0)) {
            out.push_back({xprev, x});
        }
        xprev = x;
        fprev = fx;
    }
    return out;
}

//----------------------------------------------------------------------------
// Finite differences
//----------------------------------------------------------------------------

/// Five-point Laplacian of g at p with spacing h.
template <class G>
cplx laplacian_5pt(G&& g, Point p, double h) {
    if (!(h > 0.0)) {
        throw DomainError("laplacian_5pt: step must be positive");
    }
    cplx const c = g(p);
    cplx const s = g(Point{p.x + h, p.y}) + g(Point{p.x - h, p.y}) + g(Point{p.x, p.y + h}) +
                   g(Point{p.x, p.y - h});
    cplx const v = (s - 4.0 * c) / (h * h);
    if (!detail::finite_value(v)) {
        throw NumericalError("laplacian_5pt: non-finite value");
    }
    return v;
}

/// -i (sigma1 d/dx + sigma2 d/dy) g by central differences.
template <class G>
Spinor2 dirac_fd(G&& g, Point p, double h) {
    if (!(h > 0.0)) {
        throw DomainError("dirac_fd: step must be positive");
    }
    Spinor2 const e = g(Point{p.x + h, p.y});
    Spinor2 const w = g(Point{p.x - h, p.y});
    Spinor2 const n = g(Point{p.x, p.y + h});
    Spinor2 const s = g(Point{p.x, p.y - h});
    try {
        Spinor2 const gx = (1.0 / (2.0 * h)) * (e - w);
        Spinor2 const gy = (1.0 / (2.0 * h)) * (n - s);
        return -I * (sigma1 * gx + sigma2 * gy);
    } catch (DomainError const&) {
        // Spinor2 rejects overflowed difference quotients
        throw NumericalError("dirac_fd: non-finite value");
    }
}

} // namespace wedgedirac
