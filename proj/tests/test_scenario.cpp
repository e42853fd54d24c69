#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pathtrans/scenario.hpp"

using namespace pathtrans;
using nlohmann::json;

namespace {

json transport_config() {
    return json::parse(R"({
      "scenario": "transport",
      "field": {"catalog": "constant", "params": {"c": 1}},
      "path": {"components": ["s", "0", "0", "0"], "domain": [0, 1]},
      "s": 0, "t": 1, "numeric": {"steps": 200}
    })");
}

}  // namespace

TEST(Scenario, TransportReportCarriesValueAndEstimate) {
    const auto out = run_scenario(transport_config());
    ASSERT_EQ(out.exit_code, 0) << out.report.dump();
    EXPECT_NEAR(out.report["result"]["value"][0].get<double>(), std::exp(-1.0), 1e-9);
    EXPECT_TRUE(out.report["result"].contains("est_error"));
    EXPECT_EQ(out.report["scenario"], "transport");
}

TEST(Scenario, DumpIsDeterministicAndRoundTrips) {
    const auto a = dump_report(run_scenario(transport_config()).report);
    const auto b = dump_report(run_scenario(transport_config()).report);
    EXPECT_EQ(a, b);
    const double v = json::parse(a)["result"]["value"][0].get<double>();
    EXPECT_EQ(v, run_scenario(transport_config()).report["result"]["value"][0].get<double>());
}

TEST(Scenario, ErrorsBecomeReportsWithExitCodes) {
    auto cfg = transport_config();
    cfg["field"] = {{"components", {"2*(x0", "0", "0", "0"}}};
    auto out = run_scenario(cfg);
    EXPECT_EQ(out.exit_code, 2);
    EXPECT_EQ(out.report["error"]["kind"], "syntax");

    out = run_scenario(json{{"scenario", "warp_drive"}});
    EXPECT_EQ(out.exit_code, 2);
    EXPECT_EQ(out.report["error"]["kind"], "config");

    out = run_scenario(json::parse(R"({"scenario": "normal_frame",
        "field": {"catalog": "uniform_B", "params": {"B": 1}},
        "region": {"box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]], "samples": 3}, "basepoint": [0, 0, 0, 0]})"));
    EXPECT_EQ(out.exit_code, 3);
    EXPECT_EQ(out.report["error"]["kind"], "gate");

    out = run_scenario(json::parse(R"({"scenario": "transport",
        "field": {"catalog": "ab_flux", "params": {"phi": 1}},
        "path": {"components": ["0", "s", "0", "0"], "domain": [-1, 1]}, "s": -1, "t": 1})"));
    EXPECT_EQ(out.exit_code, 4);
    EXPECT_EQ(out.report["error"]["kind"], "singularity");
}

TEST(Scenario, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(ErrorKind::Config), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::Syntax), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::Domain), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::Gate), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::Singularity), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::Numerical), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::Evaluation), 4);
}

TEST(Scenario, SweepWritesCsv) {
    const auto out = run_scenario(json::parse(R"({"scenario": "ab_sweep",
        "field": {"catalog": "ab_flux", "params": {"phi": 0}},
        "loop": {"kind": "circle", "radius": 1, "plane": ["x1", "x2"]},
        "coupling": {"kind": "u1", "charge": 1},
        "sweep": {"param": "phi", "values": [0, 3.141592653589793]}})"));
    ASSERT_EQ(out.exit_code, 0) << out.report.dump();
    EXPECT_EQ(out.csv.substr(0, out.csv.find('\n')), "param,re,im,est_error");
    EXPECT_EQ(std::count(out.csv.begin(), out.csv.end(), '\n'), 3);
    const auto& rows = out.report["result"]["rows"];
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[1]["value"][0].get<double>(), -1.0, 1e-7);
}

TEST(Scenario, CatalogListingHasOneLinePerPreset) {
    const std::string text = catalog_listing();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
    EXPECT_NE(text.find("uniform_B(B)"), std::string::npos);
}
