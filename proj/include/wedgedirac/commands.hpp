#pragma once

// Command implementations behind the wedgedirac executable. Each command maps
// a RunConfig to output text and an exit code; nothing here touches argv or
// the file system except reading a curve document.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "wedgedirac/angular_spectrum.hpp"
#include "wedgedirac/core_model.hpp"
#include "wedgedirac/errors.hpp"
#include "wedgedirac/extensions.hpp"
#include "wedgedirac/singular_functions.hpp"
#include "wedgedirac/straightening.hpp"

namespace wedgedirac {

inline constexpr char const* schema_tag = "wedgedirac/1";

enum class ExitCode : int { Ok = 0, PropertyFailure = 1, ConfigError = 2, NumericalFailure = 3 };

enum class OutputFormat { Csv, Json };

struct RunConfig {
    ModelKind model = ModelKind::QuantumDot;
    std::optional<double> omega;
    std::optional<double> mu;
    std::optional<double> alpha; ///< overrides mu when given
    double eta = pi / 2;
    double rho = 1.0;
    int k_min = -3;
    int k_max = 3;
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::string> curve_path;
    std::optional<double> lambda_min; ///< figure range
    std::optional<double> lambda_max;
    int curve_samples = 0;            ///< figure: sampled points of both sides of F = 0
    double lambda_perturbation = 0.0; ///< verify: shift applied in the harmonicity check
};

struct CommandResult {
    std::string text;
    ExitCode code = ExitCode::Ok;
};

//----------------------------------------------------------------------------
// Formatting
//----------------------------------------------------------------------------

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) {
        throw InternalError("format_number: to_chars failed");
    }
    return {buf, res.ptr};
}

inline std::string format_complex(cplx z) {
    return format_number(z.real()) + (std::signbit(z.imag()) ? "" : "+") + format_number(z.imag()) + "i";
}

/// JSON number, or null for non-finite values.
inline nlohmann::ordered_json json_number(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

inline nlohmann::ordered_json json_complex(cplx z) { return {json_number(z.real()), json_number(z.imag())}; }

inline std::string dump_json(nlohmann::ordered_json const& j) { return j.dump(2) + "\n"; }

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

    void row(std::vector<std::string> const& cells) {
        if (cells.size() != width_) {
            throw InternalError("CsvWriter: row width mismatch");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    std::size_t width_;
    std::ostringstream out_;
};

//----------------------------------------------------------------------------
// Parsing helpers
//----------------------------------------------------------------------------

namespace detail {

inline std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    auto const res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

} // namespace detail

/// Angle text: raw radians ("2.35"), a multiple of pi ("1.5pi", "pi", "-pi"),
/// or a fraction of pi ("3pi/2", "pi/4").
inline double parse_angle(std::string const& text) {
    std::string_view s = text;
    auto const pos = s.find("pi");
    if (pos == std::string_view::npos) {
        if (auto v = detail::parse_double(s)) {
            return *v;
        }
        throw FormatError("cannot parse angle '" + text + "'");
    }
    std::string_view const head = s.substr(0, pos);
    std::string_view tail = s.substr(pos + 2);
    double factor = 1.0;
    if (head == "-") {
        factor = -1.0;
    } else if (!head.empty()) {
        auto v = detail::parse_double(head);
        if (!v) {
            throw FormatError("cannot parse angle '" + text + "'");
        }
        factor = *v;
    }
    double div = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') {
            throw FormatError("cannot parse angle '" + text + "'");
        }
        auto v = detail::parse_double(tail.substr(1));
        if (!v || *v == 0.0) {
            throw FormatError("cannot parse angle '" + text + "'");
        }
        div = *v;
    }
    return factor * pi / div;
}

inline ModelKind parse_model(std::string const& s) {
    if (s == "qdot") {
        return ModelKind::QuantumDot;
    }
    if (s == "lorentz") {
        return ModelKind::LorentzScalar;
    }
    throw FormatError("unknown model '" + s + "' (expected qdot or lorentz)");
}

inline OutputFormat parse_format(std::string const& s) {
    if (s == "csv") {
        return OutputFormat::Csv;
    }
    if (s == "json") {
        return OutputFormat::Json;
    }
    throw FormatError("unknown format '" + s + "' (expected csv or json)");
}

//----------------------------------------------------------------------------
// Resolved parameters
//----------------------------------------------------------------------------

struct ModelParams {
    ModelKind kind;
    double omega;
    double alpha; ///< Lorentz only; 0 for the quantum dot
    double mu;    ///< Lorentz only
    double eta;   ///< quantum dot only
};

inline ModelParams resolve(RunConfig const& cfg, double default_omega) {
    ModelParams p{};
    p.kind = cfg.model;
    p.omega = cfg.omega.value_or(default_omega);
    require_omega(p.omega);
    if (!std::isfinite(cfg.rho) || !(cfg.rho > 0.0)) {
        throw DomainError("cutoff radius must be positive");
    }
    if (cfg.k_min > cfg.k_max) {
        throw DomainError("k-min must not exceed k-max");
    }
    if (p.kind == ModelKind::QuantumDot) {
        p.eta = cfg.eta;
        quantum_dot_B(p.eta); // validates eta
    } else {
        if (cfg.alpha) {
            p.alpha = *cfg.alpha;
            require_alpha(p.alpha);
            p.mu = std::tanh(0.5 * p.alpha);
        } else {
            p.mu = cfg.mu.value_or(0.5);
            p.alpha = lorentz_alpha(p.mu);
        }
    }
    return p;
}

inline nlohmann::ordered_json params_json(ModelParams const& p) {
    nlohmann::ordered_json j;
    j["model"] = to_string(p.kind);
    j["omega"] = json_number(p.omega);
    if (p.kind == ModelKind::QuantumDot) {
        j["eta"] = json_number(p.eta);
    } else {
        j["mu"] = json_number(p.mu);
        j["alpha"] = json_number(p.alpha);
    }
    return j;
}

/// lambda_k for k in [lo, hi] of either model.
inline std::vector<double> ladder(ModelParams const& p, int lo, int hi) {
    if (p.kind == ModelKind::LorentzScalar) {
        return lorentz_ladder(p.alpha, p.omega, lo, hi);
    }
    std::vector<double> out;
    for (int k = lo; k <= hi; ++k) {
        out.push_back(qdot_lambda(k, p.omega));
    }
    return out;
}

//----------------------------------------------------------------------------
// spectrum
//----------------------------------------------------------------------------

inline CommandResult cmd_spectrum(RunConfig const& cfg) {
    ModelParams const p = resolve(cfg, 1.5 * pi);
    // ladder covering both k and its mirror -k-1
    int const lo = std::min(cfg.k_min, -cfg.k_max - 1);
    int const hi = std::max(cfg.k_max, -cfg.k_min - 1);
    std::vector<double> const lam = ladder(p, lo, hi);
    auto const at = [&](int k) { return lam[static_cast<std::size_t>(k - lo)]; };
    bool const lor = p.kind == ModelKind::LorentzScalar;

    std::vector<std::string> header{"k", "lambda", "parity", "mirror_residual"};
    if (lor) {
        header.insert(header.begin() + 3, "eta");
    }
    CsvWriter csv(header);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        double const l = at(k);
        double const mirror = std::abs(l + at(-k - 1) + 1.0);
        std::string const parity = lor ? std::string(1, k % 2 == 0 ? '+' : '-') : "none";
        nlohmann::ordered_json r;
        r["k"] = k;
        r["lambda"] = json_number(l);
        r["parity"] = parity;
        std::vector<std::string> cells{std::to_string(k), format_number(l), parity};
        if (lor) {
            int const eta = detail::lorentz_eta(l, p.alpha, p.omega);
            r["eta"] = eta;
            cells.push_back(std::to_string(eta));
        }
        r["mirror_residual"] = json_number(mirror);
        cells.push_back(format_number(mirror));
        csv.row(cells);
        rows.push_back(r);
    }
    if (cfg.format == OutputFormat::Csv) {
        return {csv.str(), ExitCode::Ok};
    }
    nlohmann::ordered_json j;
    j["schema"] = schema_tag;
    j["command"] = "spectrum";
    j["parameters"] = params_json(p);
    j["rows"] = rows;
    return {dump_json(j), ExitCode::Ok};
}

//----------------------------------------------------------------------------
// figure
//----------------------------------------------------------------------------

struct FigureRoot {
    double lambda;
    Parity parity;
    bool mirror_present;
};

/// Roots of F_+ and F_- in (lo, hi), each flagged with whether -lambda-1 is a
/// root of the opposite parity (searched on the mirrored interval).
inline std::vector<FigureRoot> figure_roots(double alpha, double omega, double lo, double hi) {
    std::vector<FigureRoot> out;
    LorentzScan const sc = lorentz_lambda_scan(alpha, omega, lo, hi);
    LorentzScan const mirror = lorentz_lambda_scan(alpha, omega, -hi - 1.0, -lo - 1.0);
    for (LorentzRoot const& r : sc.roots) {
        bool found = false;
        for (LorentzRoot const& m : mirror.roots) {
            if (m.parity != r.parity && std::abs(m.lambda + r.lambda + 1.0) < 1e-9) {
                found = true;
            }
        }
        out.push_back({r.lambda, r.parity, found});
    }
    return out;
}

inline CommandResult cmd_figure(RunConfig const& cfg) {
    RunConfig c = cfg;
    c.model = ModelKind::LorentzScalar;
    if (!c.alpha && !c.mu) {
        c.alpha = 1.0;
    }
    ModelParams const p = resolve(c, pi / 4);
    double const lo = cfg.lambda_min.value_or(-2.5);
    double const hi = cfg.lambda_max.value_or(1.5);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw DomainError("figure range must satisfy lambda-min < lambda-max");
    }
    if (cfg.curve_samples < 0 || cfg.curve_samples == 1) {
        throw DomainError("curve sample count must be 0 or at least 2");
    }
    std::vector<FigureRoot> const roots = figure_roots(p.alpha, p.omega, lo, hi);

    // both sides of cos(pi s) = +/- |tanh alpha| sin(|pi - omega| s)
    double const t = std::abs(std::tanh(p.alpha));
    double const b = std::abs(pi - p.omega);
    std::vector<std::array<double, 3>> samples;
    for (int i = 0; i < cfg.curve_samples; ++i) {
        double const l = lo + (hi - lo) * i / (cfg.curve_samples - 1);
        double const s = l + 0.5;
        samples.push_back({l, std::cos(pi * s), t * std::sin(b * s)});
    }

    if (cfg.format == OutputFormat::Csv) {
        CsvWriter csv({"lambda", "parity", "mirror_present"});
        for (FigureRoot const& r : roots) {
            csv.row({format_number(r.lambda), std::string(1, parity_char(r.parity)),
                     r.mirror_present ? "true" : "false"});
        }
        std::string text = csv.str();
        if (!samples.empty()) {
            CsvWriter curves({"lambda", "cos_pi_s", "tanh_sin"});
            for (auto const& s : samples) {
                curves.row({format_number(s[0]), format_number(s[1]), format_number(s[2])});
            }
            text += "\n" + curves.str();
        }
        return {text, ExitCode::Ok};
    }
    nlohmann::ordered_json j;
    j["schema"] = schema_tag;
    j["command"] = "figure";
    j["parameters"] = params_json(p);
    j["range"] = {json_number(lo), json_number(hi)};
    nlohmann::ordered_json rs = nlohmann::ordered_json::array();
    for (FigureRoot const& r : roots) {
        rs.push_back({{"lambda", json_number(r.lambda)},
                      {"parity", std::string(1, parity_char(r.parity))},
                      {"mirror_present", r.mirror_present}});
    }
    j["roots"] = rs;
    if (!samples.empty()) {
        nlohmann::ordered_json cs = nlohmann::ordered_json::array();
        for (auto const& s : samples) {
            cs.push_back({json_number(s[0]), json_number(s[1]), json_number(s[2])});
        }
        j["curves"] = {{"columns", {"lambda", "cos_pi_s", "tanh_sin"}}, {"rows", cs}};
    }
    return {dump_json(j), ExitCode::Ok};
}

//----------------------------------------------------------------------------
// classify
//----------------------------------------------------------------------------

inline CommandResult cmd_classify(RunConfig const& cfg) {
    ModelParams const p = resolve(cfg, 1.5 * pi);
    ExtensionClassification const c = classify(p.kind, p.omega, p.alpha);
    if (cfg.format == OutputFormat::Csv) {
        CsvWriter csv({"verdict", "k", "lambda", "h_half"});
        if (c.window.empty()) {
            csv.row({to_string(c.verdict), "", "", ""});
        }
        for (Exponent const& e : c.window) {
            csv.row({to_string(c.verdict), std::to_string(e.k), format_number(e.lambda),
                     h_half_member(e.lambda) ? "true" : "false"});
        }
        return {csv.str(), ExitCode::Ok};
    }
    auto const list = [](std::vector<Exponent> const& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (Exponent const& e : v) {
            a.push_back({{"k", e.k}, {"lambda", json_number(e.lambda)}});
        }
        return a;
    };
    nlohmann::ordered_json j;
    j["schema"] = schema_tag;
    j["command"] = "classify";
    j["parameters"] = params_json(p);
    j["verdict"] = to_string(c.verdict);
    j["window"] = list(c.window);
    j["h_half"] = list(c.h_half);
    if (c.verdict == Verdict::OneParameterFamily) {
        ExtensionVector const v = extension_vector(0.0);
        j["distinguished"] = {{"tau", 0.0}, {"c0", json_complex(v.c0)}, {"cm1", json_complex(v.cm1)}};
        nlohmann::ordered_json taus = nlohmann::ordered_json::array();
        for (double t : charge_symmetric_taus()) {
            taus.push_back(json_number(t));
        }
        j["charge_symmetric_taus"] = taus;
    }
    return {dump_json(j), ExitCode::Ok};
}

//----------------------------------------------------------------------------
// verify
//----------------------------------------------------------------------------

struct PropertyResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation; ///< "<", ">" or "in"
    double upper = 0.0;   ///< only for "in"
};

namespace detail {

inline PropertyResult below(std::string name, double measured, double tol) {
    return {std::move(name), measured < tol, measured, tol, "<", 0.0};
}
inline PropertyResult above(std::string name, double measured, double tol) {
    return {std::move(name), measured > tol, measured, tol, ">", 0.0};
}
inline PropertyResult exactly_zero(std::string name, double measured) {
    return {std::move(name), measured == 0.0, measured, 0.0, "==", 0.0};
}
inline PropertyResult within(std::string name, double measured, double lo, double hi) {
    return {std::move(name), measured >= lo && measured <= hi, measured, lo, "in", hi};
}

/// Interior sample points of every sheet at radii r, angles at 1/4, 1/2, 3/4 of the sheet.
inline std::vector<Point> sheet_points(AngularMode const& m, std::vector<double> const& radii) {
    std::vector<Point> pts;
    for (Sheet s : m.sheets()) {
        for (double fr : {0.25, 0.5, 0.75}) {
            double const t = m.sheet_begin(s) + fr * (m.sheet_end(s) - m.sheet_begin(s));
            for (double r : radii) {
                pts.push_back({r * std::cos(t), r * std::sin(t)});
            }
        }
    }
    return pts;
}

inline QuadraticSpinor random_quadratic(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuadraticSpinor q;
    for (int i = 0; i < 6; ++i) {
        q.a[static_cast<std::size_t>(i)] = {u(gen), u(gen)};
        q.b[static_cast<std::size_t>(i)] = {u(gen), u(gen)};
    }
    return q;
}

} // namespace detail

/// Fixed seed for every randomized property of the battery.
inline constexpr std::uint64_t battery_seed = 20240611;

inline std::vector<std::function<std::vector<PropertyResult>()>> battery(ModelParams const& p, RunConfig const& cfg) {
    using detail::above;
    using detail::below;
    using detail::exactly_zero;
    using detail::within;
    bool const lor = p.kind == ModelKind::LorentzScalar;
    double const rho = cfg.rho;
    std::vector<std::function<std::vector<PropertyResult>()>> jobs;

    jobs.emplace_back([=] {
        int const kmax = std::max(std::abs(cfg.k_min), std::abs(cfg.k_max));
        std::vector<AngularMode> modes;
        for (int k = -kmax; k <= kmax; ++k) {
            modes.push_back(make_mode(p.kind, k, p.omega, p.alpha));
        }
        double gram = 0.0, bc = 0.0, ang = 0.0;
        for (auto const& a : modes) {
            for (auto const& b : modes) {
                gram = std::max(gram, std::abs(angular_inner_product(a, b) - (a.k == b.k ? 1.0 : 0.0)));
            }
            bc = std::max(bc, boundary_residual(a));
            ang = std::max(ang, angular_operator_residual(a));
        }
        return std::vector<PropertyResult>{below("orthonormality", gram, lor ? 1e-8 : 1e-10),
                                           below("boundary_residual", bc, 1e-9),
                                           below("angular_eigen_residual", ang, 1e-9)};
    });

    jobs.emplace_back([=] {
        double flip = 0.0, charge = 0.0;
        for (int k : {-2, -1, 0, 1}) {
            SingularFunction const sf = make_singular_function(p.kind, k, p.omega, p.alpha, rho);
            flip = std::max(flip, radial_flip_residual(sf.mode, sf.partner));
            charge = std::max(charge, check_charge_symmetry(sf));
        }
        return std::vector<PropertyResult>{below("radial_flip", flip, 1e-9),
                                           below("charge_conjugation", charge, 1e-9)};
    });

    jobs.emplace_back([=] {
        PairingMatrix const pm = pairing_matrix(p.kind, p.omega, p.alpha, rho);
        double spread = 0.0;
        PairingMatrix const ref = pairing_matrix(p.kind, p.omega, p.alpha, 1.0);
        for (double r : {0.1, 1.0, 10.0}) {
            PairingMatrix const q = pairing_matrix(p.kind, p.omega, p.alpha, r);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    spread = std::max(spread, std::abs(q.p[i][j] - ref.p[i][j]));
                }
            }
        }
        std::mt19937_64 gen(battery_seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double defect = 0.0;
        double sensitivity = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 20; ++i) {
            cplx c0{u(gen), u(gen)};
            cplx c1{u(gen), u(gen)};
            c0 /= std::max(1.0, std::abs(c0));
            c1 /= std::max(1.0, std::abs(c1));
            cplx const d = symmetry_defect(c0, c1, pm);
            defect = std::max(defect, std::abs(d - symmetry_defect_reference(c0, c1)));
            if (std::abs((c0 * std::conj(c1)).real()) > 1e-2) {
                sensitivity = std::min(sensitivity, std::abs(d));
            }
        }
        double tau_defect = 0.0;
        for (double t : tau_grid(10)) {
            ExtensionVector const v = extension_vector(t);
            tau_defect = std::max(tau_defect, std::abs(symmetry_defect(v.c0, v.cm1, pm)));
        }
        return std::vector<PropertyResult>{below("pairing_matrix", pm.deviation_from_reference(), 1e-6),
                                           below("pairing_rho_independence", spread, 1e-8),
                                           below("symmetry_defect", defect, 1e-6),
                                           below("tau_line_defect", tau_defect, 1e-6),
                                           above("defect_sensitivity", sensitivity, 1e-3)};
    });

    jobs.emplace_back([=] {
        double ratio_lo = std::numeric_limits<double>::infinity();
        double ratio_hi = 0.0;
        double hu = 0.0;
        for (int k : {-2, -1, 0, 1}) {
            SingularFunction const sf = make_singular_function(p.kind, k, p.omega, p.alpha, rho);
            std::vector<Point> const pts = detail::sheet_points(sf.mode, {0.3 * rho, 0.6 * rho});
            double const h = 1e-2 * rho;
            double const r1 = harmonicity_residual(sf.mode, pts, h, cfg.lambda_perturbation);
            double const r2 = harmonicity_residual(sf.mode, pts, 0.5 * h, cfg.lambda_perturbation);
            double const ratio = r1 / r2;
            ratio_lo = std::min(ratio_lo, ratio);
            ratio_hi = std::max(ratio_hi, ratio);
            for (Point const& q : detail::sheet_points(sf.mode, {0.45 * rho, 0.55 * rho})) {
                Spinor2 const exact = eval_Hu_at(sf, q);
                Spinor2 const fd = dirac_fd([&](Point z) { return eval_u_at(sf, z); }, q, 1e-4 * rho);
                hu = std::max(hu, (exact - fd).norm() / exact.norm());
            }
        }
        // report the ratio farther from 4
        double const worst = std::abs(ratio_lo - 4.0) > std::abs(ratio_hi - 4.0) ? ratio_lo : ratio_hi;
        return std::vector<PropertyResult>{within("harmonicity_convergence_ratio", worst, 3.5, 4.5),
                                           below("dirac_image_vs_finite_difference", hu, 1e-5)};
    });

    jobs.emplace_back([=] {
        std::vector<PropertyResult> out;
        ManufacturedField const u{[](Point q) { return Spinor2{q.x, 0.0}; },
                                  [](Point) { return Spinor2{0.0, -I}; }};
        ManufacturedField const v{[](Point q) { return Spinor2{0.0, q.y}; },
                                  [](Point) { return Spinor2{-1.0, 0.0}; }};
        out.push_back(below("green_identity_square", verify_green_identity(u, v, Rectangle{0, 1, 0, 1}), 1e-8));
        std::mt19937_64 gen(battery_seed + 1);
        double wedge = 0.0;
        for (int i = 0; i < 5; ++i) {
            QuadraticSpinor const a = detail::random_quadratic(gen);
            QuadraticSpinor const b = detail::random_quadratic(gen);
            wedge = std::max(wedge, verify_green_identity(a.field(), b.field(), TruncatedWedge{p.omega, 1.0}));
        }
        out.push_back(below("green_identity_wedge", wedge, 1e-8));
        if (!lor) {
            // lowest quantum-dot mode in H^1
            int k = 0;
            while (qdot_lambda(k, p.omega) <= 0.0) {
                ++k;
            }
            SingularFunction const sf = make_singular_function(ModelKind::QuantumDot, k, p.omega, 0.0, rho);
            out.push_back(below("quadratic_form_identity", verify_qform_identity(polar_field(sf), p.omega, rho), 1e-6));
            out.push_back(above("quadratic_form_negative_control",
                                verify_qform_identity(qform_negative_control(sf), p.omega, rho), 1e-3));
        }
        return out;
    });

    jobs.emplace_back([=] {
        StraighteningMap const wedge(wedge_curve(p.omega));
        StraighteningMap const quad(quadratic_test_curve(p.omega));
        LorentzModel const lm = lor ? LorentzModel(p.mu) : LorentzModel(0.5);
        std::vector<double> const xs = log_grid();
        double ident = 0.0;
        double jbound = 0.0;
        std::vector<double> l1;
        for (double x : xs) {
            Perturbation const w = wedge.perturbation_matrices(x);
            ident = std::max({ident, std::abs(wedge.rotation_angle(x)), w.L1.max_norm(), w.L2.max_norm(),
                              w.M.max_norm(), (wedge.jacobian(x) - Mat2::identity()).max_norm()});
            jbound = std::max(jbound, (quad.jacobian(x) - Mat2::identity()).max_norm() -
                                          std::abs(x) * quad.curve().sup_c2);
            l1.push_back(quad.perturbation_matrices(x).L1.op_norm());
        }
        std::vector<double> const bx = boundary_samples(25, 0.25);
        double transport = 0.0;
        for (Point q : {Point{0.1, 0.3}, Point{-0.2, 0.5}, Point{0.05, -0.1}, Point{-0.03, 0.2}}) {
            transport = std::max(transport, transport_identity_residual(quad, q, 1e-4));
        }
        return std::vector<PropertyResult>{
            exactly_zero("straightening_identity_curve", ident),
            below("jacobian_bound_excess", jbound, 1e-12),
            within("perturbation_loglog_slope", loglog_slope(xs, l1).value_or(0.0), 0.9, 1.1),
            below("bc_preservation", bc_preservation_check(quad, lm, bx), 1e-9),
            above("bc_preservation_negative_control", bc_preservation_check(quad, lm, bx, DeltaSign::Flipped), 1e-3),
            below("transport_identity", transport, 1e-4)};
    });

    return jobs;
}

inline CommandResult cmd_verify(RunConfig const& cfg) {
    ModelParams const p = resolve(cfg, 1.5 * pi);
    auto const jobs = battery(p, cfg);
    std::vector<std::future<std::vector<PropertyResult>>> futures;
    futures.reserve(jobs.size());
    for (auto const& job : jobs) {
        futures.push_back(std::async(std::launch::async, job));
    }
    std::vector<PropertyResult> results;
    for (auto& f : futures) {
        for (PropertyResult& r : f.get()) {
            results.push_back(std::move(r));
        }
    }
    bool const all = std::all_of(results.begin(), results.end(), [](PropertyResult const& r) { return r.pass; });
    ExitCode const code = all ? ExitCode::Ok : ExitCode::PropertyFailure;

    if (cfg.format == OutputFormat::Csv) {
        CsvWriter csv({"property", "pass", "measured", "relation", "bound", "upper"});
        for (PropertyResult const& r : results) {
            csv.row({r.name, r.pass ? "true" : "false", format_number(r.measured), r.relation,
                     format_number(r.tolerance), r.relation == "in" ? format_number(r.upper) : ""});
        }
        return {csv.str(), code};
    }
    nlohmann::ordered_json j;
    j["schema"] = schema_tag;
    j["command"] = "verify";
    j["parameters"] = params_json(p);
    j["rho"] = json_number(cfg.rho);
    j["lambda_perturbation"] = json_number(cfg.lambda_perturbation);
    nlohmann::ordered_json props = nlohmann::ordered_json::array();
    for (PropertyResult const& r : results) {
        nlohmann::ordered_json e;
        e["name"] = r.name;
        e["pass"] = r.pass;
        e["measured"] = json_number(r.measured);
        if (r.relation == "in") {
            e["range"] = {json_number(r.tolerance), json_number(r.upper)};
        } else {
            e[r.relation == "<" ? "below" : r.relation == ">" ? "above" : "equals"] = json_number(r.tolerance);
        }
        props.push_back(e);
    }
    j["properties"] = props;
    j["all_pass"] = all;
    return {dump_json(j), code};
}

//----------------------------------------------------------------------------
// straighten
//----------------------------------------------------------------------------

inline BoundaryCurve load_curve(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open curve file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return curve_from_json_text(ss.str());
}

struct StraightenRow {
    double x, delta, j_minus_i, l1, l2, m, bc;
};

inline CommandResult cmd_straighten(RunConfig const& cfg) {
    BoundaryCurve curve = cfg.curve_path ? load_curve(*cfg.curve_path)
                                         : quadratic_test_curve(cfg.omega.value_or(pi / 2));
    StraighteningMap const map(std::move(curve));
    LorentzModel const lm(cfg.mu.value_or(0.5));
    double const reach = std::min({0.1, -map.curve().x_min, map.curve().x_max});
    std::vector<double> xs = log_grid();
    for (double& x : xs) {
        x *= reach / 0.1;
    }
    std::vector<StraightenRow> rows;
    std::vector<double> l1s;
    for (double x : xs) {
        Perturbation const pm = map.perturbation_matrices(x);
        StraightenRow r{x,
                        map.rotation_angle(x),
                        (map.jacobian(x) - Mat2::identity()).max_norm(),
                        pm.L1.op_norm(),
                        pm.L2.op_norm(),
                        pm.M.op_norm(),
                        bc_preservation_check(map, lm, {x})};
        rows.push_back(r);
        l1s.push_back(r.l1);
    }
    std::optional<double> const slope = loglog_slope(xs, l1s);
    double const slope_v = slope.value_or(std::numeric_limits<double>::quiet_NaN());

    if (cfg.format == OutputFormat::Csv) {
        CsvWriter csv({"x", "delta", "J_minus_I", "L1", "L2", "M", "bc_residual"});
        for (StraightenRow const& r : rows) {
            csv.row({format_number(r.x), format_number(r.delta), format_number(r.j_minus_i), format_number(r.l1),
                     format_number(r.l2), format_number(r.m), format_number(r.bc)});
        }
        csv.row({"slope_L1", format_number(slope_v), "", "", "", "", ""});
        return {csv.str(), ExitCode::Ok};
    }
    nlohmann::ordered_json j;
    j["schema"] = schema_tag;
    j["command"] = "straighten";
    j["curve"] = {{"type", map.curve().kind},
                  {"omega", json_number(map.curve().omega)},
                  {"sup_c2", json_number(map.curve().sup_c2)}};
    if (map.curve().differentiation_error) {
        j["curve"]["differentiation_error"] = json_number(*map.curve().differentiation_error);
    }
    j["mu"] = json_number(lm.mu());
    nlohmann::ordered_json rs = nlohmann::ordered_json::array();
    for (StraightenRow const& r : rows) {
        rs.push_back({{"x", json_number(r.x)},
                      {"delta", json_number(r.delta)},
                      {"J_minus_I", json_number(r.j_minus_i)},
                      {"L1", json_number(r.l1)},
                      {"L2", json_number(r.l2)},
                      {"M", json_number(r.m)},
                      {"bc_residual", json_number(r.bc)}});
    }
    j["rows"] = rs;
    j["slope_L1"] = json_number(slope_v);
    return {dump_json(j), ExitCode::Ok};
}

//----------------------------------------------------------------------------
// dispatch
//----------------------------------------------------------------------------

/// Run a command by name, mapping library errors to exit codes.
inline CommandResult run_command(std::string const& name, RunConfig const& cfg) {
    try {
        if (name == "spectrum") {
            return cmd_spectrum(cfg);
        }
        if (name == "figure") {
            return cmd_figure(cfg);
        }
        if (name == "classify") {
            return cmd_classify(cfg);
        }
        if (name == "verify") {
            return cmd_verify(cfg);
        }
        if (name == "straighten") {
            return cmd_straighten(cfg);
        }
        return {"error: unknown command '" + name + "'\n", ExitCode::ConfigError};
    } catch (DomainError const& e) {
        return {std::string("error: ") + e.what() + "\n", ExitCode::ConfigError};
    } catch (FormatError const& e) {
        return {std::string("error: ") + e.what() + "\n", ExitCode::ConfigError};
    } catch (ParameterMismatch const& e) {
        return {std::string("error: ") + e.what() + "\n", ExitCode::ConfigError};
    } catch (IndexError const& e) {
        return {std::string("error: ") + e.what() + "\n", ExitCode::ConfigError};
    } catch (Error const& e) {
        return {std::string("numerical failure: ") + e.what() + "\n", ExitCode::NumericalFailure};
    }
}

} // namespace wedgedirac
