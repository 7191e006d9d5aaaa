#include "mvop/cli_reports.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int exit_code_of(const mvop::Error& e) {
    switch (e.code()) {
        case mvop::ErrorCode::ConfigError:
        case mvop::ErrorCode::IoError: return 2;
        default: return 1;
    }
}

int cmd_run(const std::string& config_path, const std::string& out, const std::string& csv_dir,
            std::optional<int> nmax, std::optional<double> tol) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "mvop: cannot read " << config_path << '\n';
        return 2;
    }
    mvop::Json j;
    try {
        j = mvop::Json::parse(in);
    } catch (const mvop::Json::exception& e) {
        std::cerr << "mvop: " << config_path << ": " << e.what() << '\n';
        return 2;
    }
    try {
        auto cfg = mvop::config_from_json(j);
        if (!out.empty()) cfg.out = out;
        if (!csv_dir.empty()) cfg.csv_dir = csv_dir;
        if (nmax) cfg.n_max = *nmax;
        if (tol) cfg.tol = *tol;
        const auto rep = mvop::run(cfg);
        if (cfg.out.empty()) {
            std::cout << rep.to_json().dump(2) << '\n';
        } else {
            for (const auto& r : rep.results) {
                std::cout << (r.pass ? "PASS " : "FAIL ") << mvop::to_string(r.check) << " worst=" << r.worst;
                if (!r.error.empty()) std::cout << " error=" << r.error;
                std::cout << '\n';
            }
            std::cout << (rep.pass ? "all checks passed" : "some checks failed") << " (" << rep.wall_seconds
                      << " s), report: " << cfg.out << '\n';
        }
        return rep.pass ? 0 : 1;
    } catch (const mvop::Error& e) {
        std::cerr << "mvop: " << e.what() << '\n';
        return exit_code_of(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-valued orthogonal polynomials from scalar weights"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the checks listed in a JSON config");
    std::string config_path, out, csv_dir;
    std::optional<int> nmax;
    std::optional<double> tol;
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--out", out, "Write the JSON report here (overrides the config)");
    run->add_option("--csv-dir", csv_dir, "Dump Q_n and Gram matrices as CSV into this directory");
    run->add_option("--nmax", nmax, "Highest degree checked");
    run->add_option("--tol", tol, "Pass tolerance");

    app.add_subcommand("schema", "Print the JSON schema of the config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand("schema")) {
        std::cout << mvop::config_schema() << '\n';
        return 0;
    }
    return cmd_run(config_path, out, csv_dir, nmax, tol);
}
