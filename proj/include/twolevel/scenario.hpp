// scenario.hpp: configuration -> solver dispatch -> CSV / JSON outputs.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "twolevel/config.hpp"
#include "twolevel/core.hpp"
#include "twolevel/kernel.hpp"
#include "twolevel/oracle.hpp"

namespace twolevel {

enum class Model { SigmaPM, SigmaZ, Both, JCOracle, SingleExcitationOracle };

const char* model_name(Model m);

using Environment = std::variant<ModeSet, SpectralDensity, CavityConfig>;

struct SweepSpec {
    std::string parameter;  // "table.key"
    std::vector<double> values;
};

struct Scenario {
    std::string name;
    Model model = Model::SigmaPM;
    std::optional<Environment> environment;  // absent only for jc_oracle
    std::optional<JCConfig> jc;              // present only for jc_oracle
    TwoLevelParams atom{1.0};
    TwoLevelState initial = TwoLevelState::excited();
    TimeGrid grid{1.0, 2};
    bool write_csv = true;
    bool write_summary = true;
    double z_coupling_scale = 1.0;
    std::size_t discretization_modes = 400;  // continuum densities under sigma_z
    double amplitude_floor = kDefaultAmplitudeFloor;
};

struct LoadOptions {
    std::optional<double> step_override;
    std::optional<Model> force_model;
};

/// A scenario and, when [sweep] is present, one fully built scenario per
/// sweep value (in sweep order). Without a sweep `points` holds one entry.
struct ScenarioPlan {
    std::string name;
    std::optional<SweepSpec> sweep;
    std::vector<Scenario> points;
};

/// Throws config::ConfigError for anything invalid, with the location of the
/// offending value.
ScenarioPlan load_plan(const config::Document& doc, const LoadOptions& options = {});
ScenarioPlan load_plan_file(const std::string& path, const LoadOptions& options = {});

/// Ordered list of the physical quantities that define the environment
/// (resolved modes or density parameters), and its FNV-1a 64-bit digest.
std::string environment_description(const Scenario& s);
std::string environment_digest(const Scenario& s);

struct OutputFile {
    std::string name;
    std::string contents;
};

struct PointResult {
    std::vector<OutputFile> files;  // CSV series, main series first
    nlohmann::ordered_json record;          // one summary record
    std::optional<std::string> comparison;  // rendered table for model = both
};

/// Runs one scenario. `file_stem` names its CSV files.
PointResult run_point(const Scenario& s, const std::string& file_stem);

struct PlanResult {
    std::vector<PointResult> points;
    nlohmann::ordered_json summary;
};

/// Runs every point on up to `threads` workers; results are kept in sweep
/// order. The first failing point (in sweep order) rethrows its exception.
PlanResult run_plan(const ScenarioPlan& plan, unsigned threads);

/// Writes every CSV and summary.json under `out_dir` (created if needed).
void write_outputs(const ScenarioPlan& plan, const PlanResult& result, const std::filesystem::path& out_dir);

/// Interior local extrema of a sequence; NaN entries never qualify.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> local_extrema(const std::vector<double>& values);

/// Shortest round-trip text for a double ("nan" / "inf" / "-inf" otherwise).
std::string format_double(double v);

}  // namespace twolevel
