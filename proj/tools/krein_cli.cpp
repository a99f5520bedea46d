// Command-line front end: gen, check, mfunc, halfline.
// Exit codes: 0 all checks pass, 1 some check failed, 2 invalid input or IO error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "krein/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw krein::Error(krein::ErrorKind::InvalidInput, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw krein::Error(krein::ErrorKind::InvalidInput, "cannot write '" + path + "'");
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw krein::Error(krein::ErrorKind::InvalidInput, "malformed real '" + item + "'");
    }
    if (out.empty())
        throw krein::Error(krein::ErrorKind::InvalidInput, "empty real list");
    return out;
}

void print_summary(const krein::Report& report) {
    for (const auto& c : report.checks) {
        if (c.pass)
            continue;
        std::cerr << "FAIL " << c.name << " residual=" << c.max_residual << " tol=" << c.tolerance;
        if (!c.error.empty())
            std::cerr << " error=" << c.error;
        if (!c.detail.empty())
            std::cerr << " (" << c.detail << ")";
        std::cerr << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Krein resolvent formula and M-function verification"};
    app.require_subcommand(1);

    std::size_t dim = 0, def = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    auto* gen = app.add_subcommand("gen", "generate a seeded scenario file");
    gen->add_option("--dim", dim, "ambient dimension N")->required();
    gen->add_option("--def", def, "deficiency index n")->required();
    gen->add_option("--seed", seed, "generator seed")->required();
    gen->add_option("-o,--output", out_path, "output file (default stdout)");

    std::string scenario_path;
    std::optional<double> tol;
    auto* check = app.add_subcommand("check", "run the identity suite on a scenario");
    check->add_option("file", scenario_path, "scenario file")->required();
    check->add_option("--tol", tol, "tolerance override");
    check->add_option("-o,--output", out_path, "report file (default stdout)");

    int which = 1;
    auto* mfunc = app.add_subcommand("mfunc", "tabulate M_1 or M_2 over the scenario z-grid");
    mfunc->add_option("file", scenario_path, "scenario file")->required();
    mfunc->add_option("--which", which, "extension index")->required()->check(CLI::IsMember({1, 2}));
    mfunc->add_option("-o,--output", out_path, "table file (default stdout)");

    std::string alpha_list, z_list;
    double halfline_tol = 1e-10;
    auto* halfline = app.add_subcommand("halfline", "verify the half-line example formulas");
    halfline->add_option("--alpha2", alpha_list, "comma-separated angles")->required();
    halfline->add_option("--z", z_list, "comma-separated complex literals, e.g. \"1+2i,-3i\"")
        ->required();
    halfline->add_option("--tol", halfline_tol, "tolerance");
    halfline->add_option("-o,--output", out_path, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*gen) {
            const auto s = krein::generate_scenario(static_cast<krein::Index>(dim),
                                                    static_cast<krein::Index>(def), seed);
            write_output(out_path, krein::serialize_scenario(s));
            return kExitPass;
        }
        if (*check) {
            const auto s = krein::parse_scenario(read_file(scenario_path));
            if (tol && !(*tol >= 1e-14 && *tol <= 1e-3))
                throw krein::Error(krein::ErrorKind::InvalidInput,
                                   "tolerance must lie in [1e-14, 1e-3]");
            const krein::Report report = krein::run_checks(s, tol);
            write_output(out_path, krein::report_to_json(report).dump(2) + "\n");
            print_summary(report);
            return report.passed() ? kExitPass : kExitFail;
        }
        if (*mfunc) {
            const auto s = krein::parse_scenario(read_file(scenario_path));
            const auto rows = krein::tabulate_m(s, which);
            const krein::Json table = krein::table_to_json(rows, which, s.tolerance);
            write_output(out_path, table.dump(2) + "\n");
            return table["summary"] == "pass" ? kExitPass : kExitFail;
        }
        if (*halfline) {
            if (!(halfline_tol > 0.0))
                throw krein::Error(krein::ErrorKind::InvalidInput, "tolerance must be positive");
            const krein::Report report = krein::halfline_command(
                parse_real_list(alpha_list), krein::parse_complex_list(z_list), halfline_tol);
            write_output(out_path, krein::report_to_json(report).dump(2) + "\n");
            print_summary(report);
            return report.passed() ? kExitPass : kExitFail;
        }
    } catch (const krein::Error& e) {
        std::cerr << "error [" << krein::to_string(e.kind()) << "]: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
