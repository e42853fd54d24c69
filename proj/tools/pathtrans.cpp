// pathtrans run <config.json> [--out report.json] [--csv sweep.csv]
// pathtrans catalog

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathtrans/scenario.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

int run(const std::string& config_path, const std::string& out_path, const std::string& csv_path) {
    using pathtrans::ErrorKind;
    pathtrans::RunOutcome outcome;
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        outcome.report = {{"error", {{"kind", "config"}, {"message", "cannot open " + config_path}, {"location", ""}}}};
        outcome.exit_code = pathtrans::exit_code_for(ErrorKind::Config);
    } else {
        std::stringstream buf;
        buf << in.rdbuf();
        const auto config = nlohmann::json::parse(buf.str(), nullptr, false);
        if (config.is_discarded()) {
            outcome.report = {{"error", {{"kind", "config"}, {"message", "configuration is not valid JSON"}, {"location", ""}}}};
            outcome.exit_code = pathtrans::exit_code_for(ErrorKind::Config);
        } else {
            outcome = pathtrans::run_scenario(config);
        }
    }

    const std::string text = pathtrans::dump_report(outcome.report);
    if (out_path.empty()) {
        std::cout << text;
    } else if (!write_file(out_path, text)) {
        std::cerr << "pathtrans: cannot write " << out_path << "\n";
        return 2;
    }
    if (outcome.exit_code != 0) {
        std::cerr << "pathtrans: " << outcome.report["error"]["kind"].get<std::string>() << " error: "
                  << outcome.report["error"]["message"].get<std::string>() << "\n";
    }
    if (!csv_path.empty() && outcome.exit_code == 0) {
        if (outcome.csv.empty()) {
            std::cerr << "pathtrans: --csv ignored, scenario produced no sweep table\n";
        } else if (!write_file(csv_path, outcome.csv)) {
            std::cerr << "pathtrans: cannot write " << csv_path << "\n";
            return 2;
        }
    }
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear transports along paths: scenario runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string csv_path;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario from a JSON configuration");
    run_cmd->add_option("config", config_path, "Scenario configuration (JSON)")->required();
    run_cmd->add_option("--out", out_path, "Write the report here instead of stdout");
    run_cmd->add_option("--csv", csv_path, "Write the sweep table (ab_sweep) here");

    auto* catalog_cmd = app.add_subcommand("catalog", "List the preset coefficient fields");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (catalog_cmd->parsed()) {
        std::cout << pathtrans::catalog_listing();
        return 0;
    }
    return run(config_path, out_path, csv_path);
}
