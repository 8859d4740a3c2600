// wedgedirac: command-line front end. Parses options into a RunConfig,
// runs the command and writes its output to stdout or --out.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "wedgedirac/commands.hpp"

namespace wd = wedgedirac;

int main(int argc, char** argv) {
    CLI::App app{"Corner-singularity toolkit for the 2-D Dirac operator on a wedge"};
    app.require_subcommand(1, 1);

    std::string model = "qdot";
    std::string omega;
    std::string eta;
    std::string format = "csv";
    std::string out;
    std::string curve;
    std::optional<double> mu;
    std::optional<double> alpha;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    wd::RunConfig cfg;

    auto const common = [&](CLI::App* sub) {
        sub->add_option("--model", model, "qdot or lorentz")->capture_default_str();
        sub->add_option("--omega", omega, "opening angle, radians or multiples of pi (e.g. 1.5pi, 3pi/2)");
        sub->add_option("--mu", mu, "Lorentz-scalar mass parameter in (-1, 0) U (0, 1)");
        sub->add_option("--alpha", alpha, "Lorentz-scalar alpha = 2 atanh(mu); overrides --mu");
        sub->add_option("--eta", eta, "quantum-dot parameter in (0, pi)");
        sub->add_option("--rho", cfg.rho, "cutoff radius")->capture_default_str();
        sub->add_option("--k-min", cfg.k_min, "smallest mode index")->capture_default_str();
        sub->add_option("--k-max", cfg.k_max, "largest mode index")->capture_default_str();
        sub->add_option("--out", out, "write output to this file instead of stdout");
        sub->add_option("--format", format, "csv or json")->capture_default_str();
    };

    auto* spectrum = app.add_subcommand("spectrum", "singular exponents lambda_k for a range of k");
    auto* figure = app.add_subcommand("figure", "Lorentz-scalar roots on an interval (defaults alpha=1, omega=pi/4)");
    auto* classify = app.add_subcommand("classify", "self-adjoint extension classification");
    auto* verify = app.add_subcommand("verify", "run the property battery; exit 1 if any property fails");
    auto* straighten = app.add_subcommand("straighten", "straightening diagnostics for a boundary curve");
    for (auto* sub : {spectrum, figure, classify, verify, straighten}) {
        common(sub);
    }
    figure->add_option("--lambda-min", lambda_min, "left end of the root interval (default -2.5)");
    figure->add_option("--lambda-max", lambda_max, "right end of the root interval (default 1.5)");
    figure->add_option("--curve-samples", cfg.curve_samples,
                       "append N samples of both sides of the root equation");
    verify->add_option("--perturb-lambda", cfg.lambda_perturbation,
                       "test mode: shift the exponent in the harmonicity check");
    straighten->add_option("--curve", curve, "curve JSON document (default: wedge plus x^2/2)");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(wd::ExitCode::ConfigError);
    }

    wd::CommandResult res;
    try {
        cfg.model = wd::parse_model(model);
        cfg.format = wd::parse_format(format);
        if (!omega.empty()) {
            cfg.omega = wd::parse_angle(omega);
        }
        if (!eta.empty()) {
            cfg.eta = wd::parse_angle(eta);
        }
        cfg.mu = mu;
        cfg.alpha = alpha;
        cfg.lambda_min = lambda_min;
        cfg.lambda_max = lambda_max;
        if (!curve.empty()) {
            cfg.curve_path = curve;
        }
    } catch (wd::Error const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(wd::ExitCode::ConfigError);
    }

    std::string const name = app.get_subcommands().front()->get_name();
    res = wd::run_command(name, cfg);

    bool const failed = res.code == wd::ExitCode::ConfigError || res.code == wd::ExitCode::NumericalFailure;
    if (failed) {
        std::cerr << res.text;
        return static_cast<int>(res.code);
    }
    if (out.empty()) {
        std::cout << res.text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f || !(f << res.text)) {
            std::cerr << "error: cannot write '" << out << "'\n";
            return static_cast<int>(wd::ExitCode::ConfigError);
        }
    }
    return static_cast<int>(res.code);
}
