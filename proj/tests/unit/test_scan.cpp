#include "wba/scan.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wba;

namespace {

ScanSpec free_rotation_scan(std::size_t points, double T) {
    ScanSpec spec;
    spec.system = {"two-wave", {{"mu", 0.0}}};
    spec.x0 = {0.0, 0.0};
    spec.grid = {"p0", 0.05, 0.45, points};
    spec.T = T;
    spec.record_timing = false;
    return spec;
}

ScanSpec layer_scan() {
    ScanSpec spec;
    spec.system = {"two-wave", {{"mu", 0.03}}};
    spec.x0 = {0.0, 0.0};
    spec.grid = {"p0", 0.0, 0.5, 9};
    spec.T = 300.0;
    spec.record_timing = false;
    return spec;
}

std::string csv_of(ScanResult const& r) {
    std::ostringstream os;
    write_scan_csv(os, r);
    return os.str();
}

std::filesystem::path scratch(std::string const& name) {
    auto const dir = std::filesystem::temp_directory_path() / "wba_test_scan";
    std::filesystem::create_directories(dir);
    auto const p = dir / name;
    std::filesystem::remove(p);
    return p;
}

}  // namespace

TEST_CASE("grid axis values") {
    GridAxis const g{"p0", 0.0, 0.5, 501};
    auto const v = g.values();
    REQUIRE(v.size() == 501);
    CHECK(v.front() == 0.0);
    CHECK(v.back() == 0.5);
    CHECK(v[250] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.001).epsilon(1e-12));
    CHECK_THROWS_AS((GridAxis{"p0", 0.0, 1.0, 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridAxis{"p0", 1.0, 0.0, 5}.validate()), std::invalid_argument);
}

TEST_CASE("free rotation scan is regular everywhere and averages to p0") {
    ScanResult const r = run_scan(free_rotation_scan(11, 200.0));
    REQUIRE(r.records.size() == 11);
    CHECK(r.chaotic == 0);
    CHECK(r.regular == 11);
    CHECK(r.failed == 0);
    CHECK(r.chaotic_fraction() == 0.0);
    for (auto const& rec : r.records) {
        INFO("p0 = " << rec.grid_value);
        CHECK(std::fabs(rec.wba - rec.grid_value) <= 1e-10);
        CHECK(rec.label == OrbitLabel::Regular);
        CHECK(rec.ok());
    }
}

TEST_CASE("records come back in grid order with every field set") {
    ScanResult const r = run_scan(layer_scan());
    auto const values = layer_scan().grid.values();
    REQUIRE(r.records.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto const& rec = r.records[i];
        CHECK(rec.index == i);
        CHECK(rec.grid_value == values[i]);
        CHECK(rec.label.has_value());
        CHECK(std::isfinite(rec.wba));
        CHECK(rec.maxdig == std::max(rec.absdig, rec.reldig));
        CHECK(rec.seconds == 0.0);
    }
    CHECK(r.chaotic + r.regular + r.failed == values.size());
}

TEST_CASE("worker count does not change the output") {
    ScanSpec spec = layer_scan();
    spec.workers = 1;
    std::string const one = csv_of(run_scan(spec));
    spec.workers = 4;
    std::string const four = csv_of(run_scan(spec));
    CHECK(one == four);
}

TEST_CASE("raising the threshold never removes chaotic orbits") {
    ScanResult const base = run_scan(layer_scan());
    std::size_t previous = 0;
    for (double tau : {1.0, 3.0, 5.0, 7.0, 10.0, 14.0, 17.0}) {
        ScanResult const r = relabel(base, tau);
        CHECK(r.chaotic >= previous);
        CHECK(r.chaotic + r.regular + r.failed == base.records.size());
        CHECK(r.threshold == tau);
        previous = r.chaotic;
    }
    CHECK(relabel(base, 17.0).chaotic == base.records.size());
    CHECK_THROWS_AS(relabel(base, 0.0), std::invalid_argument);
}

TEST_CASE("scan reuses checkpointed rows") {
    ScanSpec spec = free_rotation_scan(5, 100.0);
    auto const path = scratch("resume.csv");
    {
        // A row no integration could produce, so reuse is visible.
        std::ofstream out(path);
        out << kScanCsvHeader << '\n';
        ScanRecord fake;
        fake.index = 2;
        fake.grid_value = spec.grid.values()[2];
        fake.wba = 42.0;
        fake.absdig = fake.reldig = fake.maxdig = 1.0;
        fake.label = OrbitLabel::Chaotic;
        out << scan_csv_row(fake) << '\n';
        // Wrong grid value for its index: ignored.
        fake.index = 3;
        fake.grid_value = 0.123;
        out << scan_csv_row(fake) << '\n';
    }
    spec.checkpoint = path;
    ScanResult const r = run_scan(spec);
    REQUIRE(r.records.size() == 5);
    CHECK(r.records[2].wba == 42.0);
    CHECK(r.records[2].label == OrbitLabel::Chaotic);
    CHECK(std::fabs(r.records[3].wba - r.records[3].grid_value) <= 1e-10);
    CHECK(r.chaotic == 1);

    // Every computed row was appended; a second run recomputes nothing.
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) rows += parse_scan_csv_row(line).has_value();
    CHECK(rows == 6);
    ScanResult const again = run_scan(spec);
    CHECK(csv_of(again) == csv_of(r));
}

TEST_CASE("scan CSV matches the stored golden file") {
    std::ifstream in(std::filesystem::path(WBA_TEST_DATA) / "scan_golden.csv");
    REQUIRE(in);
    std::stringstream golden;
    golden << in.rdbuf();
    CHECK(csv_of(run_scan(free_rotation_scan(5, 100.0))) == golden.str());
}

TEST_CASE("CSV rows round trip") {
    ScanRecord rec;
    rec.index = 17;
    rec.grid_value = 0.1 + 0.2;
    rec.wba = -1.0 / 3.0;
    rec.absdig = 7.25;
    rec.reldig = 6.5;
    rec.maxdig = 7.25;
    rec.label = OrbitLabel::Regular;
    rec.seconds = 0.125;
    std::string const row = scan_csv_row(rec);
    auto const back = parse_scan_csv_row(row);
    REQUIRE(back.has_value());
    CHECK(back->index == rec.index);
    CHECK(back->grid_value == rec.grid_value);
    CHECK(back->wba == rec.wba);
    CHECK(back->maxdig == rec.maxdig);
    CHECK(back->label == rec.label);
    CHECK(back->status == "ok");
    CHECK(scan_csv_row(*back) == row);

    CHECK(!parse_scan_csv_row(kScanCsvHeader).has_value());
    CHECK(!parse_scan_csv_row("1,2,3").has_value());
    CHECK(!parse_scan_csv_row("").has_value());
    CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("chaotic fraction is zero without perturbation") {
    ScanSpec spec;
    spec.system = {"farey", {{"epsilon", 0.0}}};
    spec.x0 = {0.0, 0.0, 0.0};
    spec.grid = {"psi0", 0.0, 1.0, 11};
    spec.T = 200.0;
    spec.record_timing = false;
    auto const curve = chaotic_fraction_curve(spec, GridAxis{"epsilon", 0.0, 0.5, 2});
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].value == 0.0);
    CHECK(curve[0].fraction == 0.0);
    CHECK(curve[0].chaotic == 0);
    CHECK(curve[1].value == 0.5);
    for (auto const& p : curve) CHECK(p.count == 11);
}

TEST_CASE("digit accuracy against T") {
    std::vector<double> const Ts{250.0, 500.0, 1000.0};
    auto const curve = dig_vs_T_curve({"two-wave", {{"mu", 0.03}}}, State{0.0, 0.45, 0.0}, "", WeightSpec{}, Ts,
                                      IntegratorConfig{}, kDefaultChaosThreshold, 2);
    REQUIRE(curve.size() == 3);
    for (std::size_t i = 0; i < Ts.size(); ++i) CHECK(curve[i].T == Ts[i]);
    CHECK(curve[2].accuracy.maxdig > curve[0].accuracy.maxdig);
    CHECK(curve[2].accuracy.label == OrbitLabel::Regular);
}

TEST_CASE("width sweep") {
    SystemDescriptor const sys{"two-wave", {{"mu", 0.03}}};
    State const x0{0.0, 0.45, 0.0};
    auto const sweep = width_sweep(sys, x0, "", {0.5, 1.0, 500.0}, 300.0, IntegratorConfig{});
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].status == "ok");
    REQUIRE(sweep[1].accuracy.has_value());

    TwoWaveSystem const direct(0.03);
    DigitAccuracy const d = digit_accuracy(direct.vector_field(), x0, make_system(sys).observable("p"),
                                           WeightFunction::bump(1.0), 300.0, IntegratorConfig{});
    CHECK(sweep[1].accuracy->maxdig == d.maxdig);
    CHECK(sweep[1].accuracy->wba_first == d.wba_first);

    // Too wide for double precision: recorded, not thrown.
    CHECK(!sweep[2].accuracy.has_value());
    CHECK(sweep[2].status == "WidthTooLarge");
}

TEST_CASE("rotation profile of free rotation") {
    auto const profile = rotation_profile(free_rotation_scan(5, 100.0));
    REQUIRE(profile.size() == 5);
    for (auto const& p : profile) {
        CHECK(p.status == "ok");
        CHECK(std::fabs(p.rho - p.grid_value) <= 1e-10);
    }
}

TEST_CASE("grid over a system parameter") {
    GridPoint const p = resolve_grid_point({"qp-pendulum", {{"b", 3.0}}}, State{0.0, 0.0, 0.0, 2.0}, "b_over_nu", 1.1);
    CHECK(p.system.name == "qp-pendulum");
    CHECK(p.x0 == State{0.0, 0.0, 0.0, 2.0});
    CHECK_THROWS_AS(resolve_grid_point({"two-wave", {{"mu", 0.03}}}, State{}, "nope", 1.0), std::invalid_argument);
}

TEST_CASE("summary JSON") {
    ScanSpec const spec = free_rotation_scan(3, 50.0);
    std::string const json = scan_summary_json(spec, run_scan(spec));
    CHECK(json.find("\"chaotic\": 0") != std::string::npos);
    CHECK(json.find("\"two-wave\"") != std::string::npos);
}
