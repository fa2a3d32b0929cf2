#pragma once

// Batch experiments over grids of initial conditions or parameters. Grid
// points are independent; results are always reported in grid order.

#include "wba/birkhoff.hpp"
#include "wba/systems.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wba {

/// `points` values from lo to hi inclusive, evenly spaced.
struct GridAxis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t points = 2;

    std::vector<double> values() const;
    void validate() const;

    bool operator==(GridAxis const&) const = default;
};

struct WeightSpec {
    WeightKind kind = WeightKind::Bump;
    double width = 1.0;

    WeightFunction make() const { return normalize(kind, width); }

    bool operator==(WeightSpec const&) const = default;
};

struct ScanSpec {
    SystemDescriptor system;
    /// Base initial condition (may omit trailing components, filled with 0).
    State x0;
    /// Either a coordinate (e.g. "p0", "psi0") or a system parameter.
    GridAxis grid;
    double T = 1000.0;
    /// Empty selects the system's default observable.
    std::string observable;
    WeightSpec weight;
    double threshold = kDefaultChaosThreshold;
    IntegratorConfig integrator;
    unsigned workers = 1;
    /// Wall-clock seconds per point; when false the column is written as 0.
    bool record_timing = true;
    /// When set, finished rows are appended here as they complete and rows
    /// already present are reused instead of recomputed.
    std::optional<std::filesystem::path> checkpoint;

    void validate() const;
};

struct ScanRecord {
    std::size_t index = 0;
    double grid_value = 0.0;
    double wba = 0.0;
    double absdig = 0.0;
    double reldig = 0.0;
    double maxdig = 0.0;
    std::optional<OrbitLabel> label;
    /// "ok" or the integration error kind.
    std::string status = "ok";
    double seconds = 0.0;

    bool ok() const noexcept { return status == "ok"; }
};

struct ScanResult {
    std::vector<ScanRecord> records;
    std::size_t chaotic = 0;
    std::size_t regular = 0;
    std::size_t failed = 0;
    double threshold = kDefaultChaosThreshold;
    double wall_seconds = 0.0;

    /// chaotic / records.size().
    double chaotic_fraction() const noexcept;
};

/// Builds the system and initial state for one grid value.
struct GridPoint {
    ModelSystem system;
    State x0;
};
GridPoint resolve_grid_point(SystemDescriptor descriptor, State const& x0, std::string const& axis, double value);

ScanResult run_scan(ScanSpec const& spec);

/// Re-labels stored records with a new threshold; no integration.
ScanResult relabel(ScanResult result, double threshold);

struct FractionPoint {
    double value;
    double fraction;
    std::size_t chaotic;
    std::size_t count;
};

/// Runs `inner` once per value of the outer parameter axis.
std::vector<FractionPoint> chaotic_fraction_curve(ScanSpec const& inner, GridAxis const& outer);

struct TimedAccuracy {
    double T;
    DigitAccuracy accuracy;
};

/// Each T uses a fresh pair of segments from x0.
std::vector<TimedAccuracy> dig_vs_T_curve(SystemDescriptor const& system, State const& x0, std::string const& observable,
                                          WeightSpec const& weight, std::vector<double> const& T_list,
                                          IntegratorConfig const& cfg, double threshold = kDefaultChaosThreshold,
                                          unsigned workers = 1);

struct WidthPoint {
    double width;
    std::optional<DigitAccuracy> accuracy;
    std::string status = "ok";
};

/// Digit accuracy with bump(w) for each width; failures are kept per point.
std::vector<WidthPoint> width_sweep(SystemDescriptor const& system, State const& x0, std::string const& observable,
                                    std::vector<double> const& widths, double T, IntegratorConfig const& cfg,
                                    double threshold = kDefaultChaosThreshold, unsigned workers = 1);

struct RotationPoint {
    double grid_value;
    double rho;
    std::string status = "ok";
};

/// Rotation number (single WBA segment) for every grid point of `spec`.
std::vector<RotationPoint> rotation_profile(ScanSpec const& spec);

// ---------------------------------------------------------------------------
// Output formats

/// Decimal rendering with 17 significant digits (exact round trip).
std::string format_real(double value);

inline constexpr char const* kScanCsvHeader = "index,grid_value,wba,absdig,reldig,maxdig,label,status,seconds";

std::string scan_csv_row(ScanRecord const& record);
void write_scan_csv(std::ostream& out, ScanResult const& result);
/// Parses rows produced by scan_csv_row (used for resuming).
std::optional<ScanRecord> parse_scan_csv_row(std::string const& line);

/// `orbit_id,crossing,coord1,...,coordN`; angles already reduced.
void write_poincare_csv(std::ostream& out, std::vector<std::vector<State>> const& orbits);

/// JSON summary: spec echo, counts, chaotic fraction and wall time.
std::string scan_summary_json(ScanSpec const& spec, ScanResult const& result);

}  // namespace wba
