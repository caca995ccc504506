#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsfd/app.hpp"
#include "nsfd/config.hpp"

namespace {

// The config file is applied before CLI11 binds flag values, so explicit
// flags override file entries regardless of option order.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    nsfd::RunConfig cfg;
    std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) {
        try {
            cfg = nsfd::parse_config_file(config_path);
        } catch (const nsfd::ConfigError& e) {
            std::cout << "{\"error\":\"" << e.what() << "\",\"exit\":2}" << std::endl;
            return 2;
        }
    }

    CLI::App app{"Finite difference solver for fully nonlinear elliptic Dirichlet problems"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string config_opt;
    std::string schedule_json;
    app.add_option("--config", config_opt, "JSON config file; flags override its entries");
    app.add_option("--problem", cfg.problem, "problem name: linear1|linear2|hjb|monge_ampere|gauss_curvature");
    app.add_option("--sides", cfg.sides, "mesh sizes, nodes per side including boundary")->delimiter(',');
    app.add_option("--gamma", cfg.gamma, "stabilization gamma");
    app.add_option("--sigma", cfg.sigma, "stabilization sigma");
    app.add_option("--schedule", schedule_json, "continuation schedule, JSON [[gamma,sigma],...]");
    app.add_option("--method", cfg.method, "linear_direct|newton|pseudo_time");
    app.add_option("--newton-tol", cfg.newton_tol, "residual tolerance");
    app.add_option("--newton-max-iter", cfg.newton_max_iter, "Newton iteration cap");
    app.add_option("--damping", cfg.damping, "none|backtracking");
    app.add_option("--rho", cfg.rho, "pseudo-time step");
    app.add_option("--max-sweeps", cfg.max_sweeps, "pseudo-time sweep cap");
    app.add_option("--phi-count", cfg.phi_count, "control samples in the angle parameter");
    app.add_option("--rot-count", cfg.rot_count, "control samples in the rotation parameter");
    app.add_option("--order-basis", cfg.order_basis, "mesh size used for orders: axis|diag");
    app.add_option("--out-dir", cfg.out_dir, "artifact directory");
    app.add_option("--seed", cfg.seed, "random seed for verification batteries");
    app.add_option("--workers", cfg.workers, "assembly thread count");
    app.add_flag("--allow-unsafe", cfg.allow_unsafe, "skip the sigma>=0, gamma+sigma>=0 constraint");

    for (const char* name : {"solve", "convergence", "verify", "dump-grid"}) {
        auto* sub = app.add_subcommand(name, "");
        sub->fallthrough();
        sub->callback([&cfg, name] { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (app.count("--schedule") > 0) {
        try {
            cfg.schedule = nsfd::parse_schedule_json(schedule_json);
        } catch (const nsfd::ConfigError& e) {
            std::cout << "{\"error\":\"" << e.what() << "\",\"exit\":2}" << std::endl;
            return 2;
        }
    }

    return nsfd::run_app(cfg);
}
