#pragma once

#include "mkt/boundary.hpp"
#include "mkt/convex_body.hpp"
#include "mkt/distance_field.hpp"
#include "mkt/grid.hpp"
#include "mkt/source_field.hpp"
#include "mkt/variational.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mkt {

using Json = nlohmann::ordered_json;

/// Exit statuses of the runner.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitValidation = 3, kExitAssertion = 4 };

/// Failure carrying an exit status and a machine-readable detail object.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int code, std::string kind, const std::string& message, Json detail = Json::object());
  int code() const { return code_; }
  const std::string& kind() const { return kind_; }
  const Json& detail() const { return detail_; }
  /// {"error": kind, "code": n, "message": ..., "detail": {...}}
  Json to_json() const;

 private:
  int code_;
  std::string kind_;
  Json detail_;
};

struct GridSpec {
  std::optional<double> h;
  int n = 128;  // nodes along the longer side when h is absent
};

/// `lambda0` is either a number or the existence threshold c(H0, r) ||f||, times `factor`.
struct LagrangianSpec {
  std::string kind = "indicator";  // indicator | hinge
  std::optional<double> lambda0;
  double factor = 1.0;
};

/// A parsed and validated scenario. Body, boundary and source are built at load time.
struct Scenario {
  std::string name;
  Json raw;
  std::optional<ConvexBody> body;
  std::optional<DomainBoundary> boundary;
  std::optional<SourceField> source;
  std::optional<LagrangianSpec> lagrangian;
  GridSpec grid;
  std::vector<std::string> tasks;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
  std::vector<double> p_list{2, 4, 8, 16, 32};
  int trials = 100;
  int samples_per_check = 10000;
};

const std::vector<std::string>& known_tasks();

/// Parses and validates; ScenarioError with code 2 (config) or 3 (validation).
Scenario parse_scenario(const Json& config);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOverrides {
  std::optional<std::filesystem::path> output;
  std::optional<double> grid_h;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tasks;
};

struct RunResult {
  int code = kExitOk;
  Json summary;
  std::vector<std::string> failed_checks;
  std::vector<std::filesystem::path> files;
};

/// Runs the tasks in order, writes CSV fields and summary.json to the output directory.
/// Code 4 when a check of a verifying task fails.
RunResult run_scenario(Scenario scenario, const RunOverrides& overrides = {});

/// Loads, runs, and reports errors as JSON on `err`. Returns the exit status.
int run_scenario_file(const std::filesystem::path& path, const RunOverrides& overrides, std::ostream& err);

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

/// CSV with header x,y,value in row-major node order; Outside nodes are written as nan.
void export_field(const std::filesystem::path& path, const GridFunction& u);
/// CSV x,y,adjacency; the last column lists neighbour row indices separated by ';'.
void export_singular_set(const std::filesystem::path& path, const SingularSet& sigma);
/// CSV x,y,<column> for point samples.
void export_points(const std::filesystem::path& path, const std::vector<Vec2>& points,
                   const std::vector<double>& values, const std::string& column = "value");

}  // namespace mkt
