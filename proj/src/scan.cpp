#include "wba/scan.hpp"

#include "parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

namespace wba {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split(std::string const& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::optional<double> parse_real(std::string const& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    double const v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) return std::nullopt;
    return v;
}

void tally(ScanResult& result) {
    result.chaotic = result.regular = result.failed = 0;
    for (auto const& r : result.records) {
        if (!r.label) {
            ++result.failed;
        } else if (*r.label == OrbitLabel::Chaotic) {
            ++result.chaotic;
        } else {
            ++result.regular;
        }
    }
}

ScanRecord failed_record(std::size_t index, double value, std::string status) {
    double const nan = std::numeric_limits<double>::quiet_NaN();
    ScanRecord r;
    r.index = index;
    r.grid_value = value;
    r.wba = r.absdig = r.reldig = r.maxdig = nan;
    r.status = std::move(status);
    return r;
}

std::string observable_name(ModelSystem const& system, std::string const& requested) {
    return requested.empty() ? system.default_observable : requested;
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs

std::vector<double> GridAxis::values() const {
    validate();
    std::vector<double> out(points);
    double const span = hi - lo;
    double const denom = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) out[i] = lo + span * (static_cast<double>(i) / denom);
    out.back() = hi;
    return out;
}

void GridAxis::validate() const {
    if (name.empty()) throw std::invalid_argument("grid axis needs a name");
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("grid needs lo < hi");
}

GridPoint resolve_grid_point(SystemDescriptor descriptor, State const& x0, std::string const& axis, double value) {
    auto const names = system_parameter_names(descriptor.name);
    if (std::find(names.begin(), names.end(), axis) == names.end()) {
        ModelSystem system = make_system(descriptor);
        if (!system.has_coordinate(axis)) {
            throw std::invalid_argument("grid axis '" + axis + "' is neither a coordinate nor a parameter of '" +
                                        descriptor.name + "'");
        }
        State x = system.complete_state(x0);
        x[system.coordinate_index(axis)] = value;
        return {std::move(system), std::move(x)};
    }
    descriptor.parameters[axis] = value;
    if (axis == "b_over_nu") descriptor.parameters.erase("b");
    if (axis == "b") descriptor.parameters.erase("b_over_nu");
    ModelSystem system = make_system(descriptor);
    State x = system.complete_state(x0);
    return {std::move(system), std::move(x)};
}

void ScanSpec::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    grid.validate();
    integrator.validate();
    (void)weight.make();
    // Both ends of the grid must produce a valid system and observable.
    for (double v : {grid.lo, grid.hi}) {
        GridPoint const p = resolve_grid_point(system, x0, grid.name, v);
        (void)p.system.observable(observable_name(p.system, observable));
    }
}

double ScanResult::chaotic_fraction() const noexcept {
    return records.empty() ? 0.0 : static_cast<double>(chaotic) / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------
// Scans

ScanResult run_scan(ScanSpec const& spec) {
    spec.validate();
    auto const start = Clock::now();
    auto const values = spec.grid.values();
    WeightFunction const weight = spec.weight.make();

    std::vector<std::optional<ScanRecord>> slots(values.size());
    std::ofstream checkpoint;
    std::mutex checkpoint_mutex;
    if (spec.checkpoint) {
        std::ifstream existing(*spec.checkpoint);
        std::string line;
        while (existing && std::getline(existing, line)) {
            auto record = parse_scan_csv_row(line);
            if (!record || record->index >= values.size()) continue;
            if (format_real(record->grid_value) != format_real(values[record->index])) continue;
            slots[record->index] = std::move(*record);
        }
        bool const fresh = !std::filesystem::exists(*spec.checkpoint);
        checkpoint.open(*spec.checkpoint, std::ios::app);
        if (!checkpoint) throw std::runtime_error("cannot open checkpoint file " + spec.checkpoint->string());
        if (fresh) checkpoint << kScanCsvHeader << '\n' << std::flush;
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!slots[i]) pending.push_back(i);
    }

    detail::parallel_for(pending.size(), spec.workers, [&](std::size_t k) {
        std::size_t const i = pending[k];
        auto const t_point = Clock::now();
        ScanRecord record;
        try {
            GridPoint const p = resolve_grid_point(spec.system, spec.x0, spec.grid.name, values[i]);
            Observable const h = p.system.observable(observable_name(p.system, spec.observable));
            DigitAccuracy const d =
                digit_accuracy(p.system.field, p.x0, h, weight, spec.T, spec.integrator, spec.threshold);
            record.index = i;
            record.grid_value = values[i];
            record.wba = d.wba_first;
            record.absdig = d.absdig;
            record.reldig = d.reldig;
            record.maxdig = d.maxdig;
            record.label = d.label;
        } catch (IntegrationError const& e) {
            record = failed_record(i, values[i], to_string(e.kind()));
        }
        record.seconds = spec.record_timing ? seconds_since(t_point) : 0.0;
        if (checkpoint.is_open()) {
            std::lock_guard lock(checkpoint_mutex);
            checkpoint << scan_csv_row(record) << '\n' << std::flush;
        }
        slots[i] = std::move(record);
    });

    ScanResult result;
    result.threshold = spec.threshold;
    result.records.reserve(values.size());
    for (auto& slot : slots) result.records.push_back(std::move(*slot));
    // Resumed rows may carry labels from a different threshold.
    result = relabel(std::move(result), spec.threshold);
    result.wall_seconds = seconds_since(start);
    return result;
}

ScanResult relabel(ScanResult result, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    for (auto& r : result.records) {
        if (r.label) r.label = r.maxdig < threshold ? OrbitLabel::Chaotic : OrbitLabel::Regular;
    }
    result.threshold = threshold;
    tally(result);
    return result;
}

std::vector<FractionPoint> chaotic_fraction_curve(ScanSpec const& inner, GridAxis const& outer) {
    std::vector<FractionPoint> out;
    for (double value : outer.values()) {
        ScanSpec spec = inner;
        spec.checkpoint.reset();
        spec.system.parameters[outer.name] = value;
        if (outer.name == "b_over_nu") spec.system.parameters.erase("b");
        if (outer.name == "b") spec.system.parameters.erase("b_over_nu");
        ScanResult const r = run_scan(spec);
        out.push_back({value, r.chaotic_fraction(), r.chaotic, r.records.size()});
    }
    return out;
}

std::vector<TimedAccuracy> dig_vs_T_curve(SystemDescriptor const& system, State const& x0, std::string const& observable,
                                          WeightSpec const& weight, std::vector<double> const& T_list,
                                          IntegratorConfig const& cfg, double threshold, unsigned workers) {
    if (!std::is_sorted(T_list.begin(), T_list.end())) throw std::invalid_argument("T list must be ascending");
    ModelSystem const model = make_system(system);
    State const start = model.complete_state(x0);
    Observable const h = model.observable(observable_name(model, observable));
    WeightFunction const g = weight.make();
    std::vector<TimedAccuracy> out(T_list.size());
    detail::parallel_for(T_list.size(), workers, [&](std::size_t i) {
        out[i] = {T_list[i], digit_accuracy(model.field, start, h, g, T_list[i], cfg, threshold)};
    });
    return out;
}

std::vector<WidthPoint> width_sweep(SystemDescriptor const& system, State const& x0, std::string const& observable,
                                    std::vector<double> const& widths, double T, IntegratorConfig const& cfg,
                                    double threshold, unsigned workers) {
    for (double w : widths) {
        if (!(w > 0.0)) throw std::invalid_argument("bump widths must be positive");
    }
    ModelSystem const model = make_system(system);
    State const start = model.complete_state(x0);
    Observable const h = model.observable(observable_name(model, observable));
    std::vector<WidthPoint> out(widths.size());
    detail::parallel_for(widths.size(), workers, [&](std::size_t i) {
        out[i].width = widths[i];
        try {
            WeightFunction const g = WeightFunction::bump(widths[i]);
            out[i].accuracy = digit_accuracy(model.field, start, h, g, T, cfg, threshold);
        } catch (WidthTooLarge const&) {
            out[i].status = "WidthTooLarge";
        } catch (IntegrationError const& e) {
            out[i].status = to_string(e.kind());
        }
    });
    return out;
}

std::vector<RotationPoint> rotation_profile(ScanSpec const& spec) {
    spec.validate();
    auto const values = spec.grid.values();
    WeightFunction const weight = spec.weight.make();
    std::vector<RotationPoint> out(values.size());
    detail::parallel_for(values.size(), spec.workers, [&](std::size_t i) {
        out[i].grid_value = values[i];
        try {
            GridPoint const p = resolve_grid_point(spec.system, spec.x0, spec.grid.name, values[i]);
            Observable const h = p.system.observable(observable_name(p.system, spec.observable));
            out[i].rho = rotation_number(p.system.field, p.x0, h, weight, spec.T, spec.integrator);
        } catch (IntegrationError const& e) {
            out[i].rho = std::numeric_limits<double>::quiet_NaN();
            out[i].status = to_string(e.kind());
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Output

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string scan_csv_row(ScanRecord const& r) {
    std::string row;
    row += std::to_string(r.index);
    for (double v : {r.grid_value, r.wba, r.absdig, r.reldig, r.maxdig}) {
        row += ',';
        row += format_real(v);
    }
    row += ',';
    row += r.label ? to_string(*r.label) : "none";
    row += ',';
    row += r.status;
    row += ',';
    row += format_real(r.seconds);
    return row;
}

std::optional<ScanRecord> parse_scan_csv_row(std::string const& line) {
    auto const f = split(line, ',');
    if (f.size() != 9) return std::nullopt;
    ScanRecord r;
    auto const [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), r.index);
    if (ec != std::errc{} || ptr != f[0].data() + f[0].size()) return std::nullopt;
    double* reals[] = {&r.grid_value, &r.wba, &r.absdig, &r.reldig, &r.maxdig};
    for (int k = 0; k < 5; ++k) {
        auto v = parse_real(f[1 + k]);
        if (!v) return std::nullopt;
        *reals[k] = *v;
    }
    if (f[6] == "regular") {
        r.label = OrbitLabel::Regular;
    } else if (f[6] == "chaotic") {
        r.label = OrbitLabel::Chaotic;
    } else if (f[6] != "none") {
        return std::nullopt;
    }
    r.status = f[7];
    auto secs = parse_real(f[8]);
    if (!secs) return std::nullopt;
    r.seconds = *secs;
    return r;
}

void write_scan_csv(std::ostream& out, ScanResult const& result) {
    out << kScanCsvHeader << '\n';
    for (auto const& r : result.records) out << scan_csv_row(r) << '\n';
}

void write_poincare_csv(std::ostream& out, std::vector<std::vector<State>> const& orbits) {
    std::size_t dim = 0;
    for (auto const& orbit : orbits) {
        if (!orbit.empty()) dim = std::max(dim, orbit.front().size());
    }
    out << "orbit_id,crossing";
    for (std::size_t k = 1; k <= dim; ++k) out << ",coord" << k;
    out << '\n';
    for (std::size_t id = 0; id < orbits.size(); ++id) {
        for (std::size_t c = 0; c < orbits[id].size(); ++c) {
            out << id << ',' << (c + 1);
            for (double v : orbits[id][c]) out << ',' << format_real(v);
            out << '\n';
        }
    }
}

std::string scan_summary_json(ScanSpec const& spec, ScanResult const& result) {
    nlohmann::ordered_json j;
    j["system"]["name"] = spec.system.name;
    for (auto const& [k, v] : spec.system.parameters) j["system"]["parameters"][k] = v;
    j["x0"] = spec.x0;
    j["grid"] = {{"axis", spec.grid.name}, {"lo", spec.grid.lo}, {"hi", spec.grid.hi}, {"points", spec.grid.points}};
    j["T"] = spec.T;
    j["observable"] = spec.observable;
    j["weight"] = {{"kind", to_string(spec.weight.kind)}, {"width", spec.weight.width}};
    j["threshold"] = spec.threshold;
    j["integrator"] = {{"abs_tol", spec.integrator.abs_tol}, {"rel_tol", spec.integrator.rel_tol}};
    j["workers"] = spec.workers;
    j["count"] = result.records.size();
    j["chaotic"] = result.chaotic;
    j["regular"] = result.regular;
    j["failed"] = result.failed;
    j["chaotic_fraction"] = result.chaotic_fraction();
    j["wall_seconds"] = result.wall_seconds;
    return j.dump(2);
}

}  // namespace wba
