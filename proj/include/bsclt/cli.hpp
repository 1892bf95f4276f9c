#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsclt/clt_lab.hpp"
#include "bsclt/error.hpp"
#include "bsclt/lattice_mc.hpp"
#include "bsclt/pricing.hpp"

#include "json.hpp"

namespace bsclt::cli {

enum class Command { price, mc, tree, clt_demo, lindeberg, var_linearity };
enum class OutputFormat { json, csv, text };

[[nodiscard]] std::string_view to_string(Command command);
[[nodiscard]] std::string_view to_string(OutputFormat format);

/// Bad command line or config file. Maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Everything one CLI invocation needs. Experiment fields carry their defaults.
struct RunConfig {
    Command command = Command::price;

    std::optional<double> spot;
    std::optional<double> strike;
    std::optional<double> rate;
    std::optional<double> expiry;
    std::optional<double> volatility;

    std::uint64_t steps = 1000;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> batch_size;
    unsigned threads = 0;

    ModelKind model = ModelKind::normal;
    double variance = 0.0225;
    double jump_size = 1.0;
    double intensity = 2.0;
    double horizon = 1.0;
    std::vector<std::uint64_t> ladder{16, 256, 4096};
    std::uint64_t samples = 100000;
    double epsilon = 0.01;
    std::vector<double> horizons{0.25, 0.5, 1.0, 2.0};
    std::uint64_t cells = 64;

    OutputFormat format = OutputFormat::text;
    std::optional<std::string> output_path;

    [[nodiscard]] OptionSpec option_spec() const;
    [[nodiscard]] TreeConfig tree_config() const;
    [[nodiscard]] McConfig mc_config() const;
    [[nodiscard]] IncrementModel increment_model() const;
    [[nodiscard]] ArraySpec array_spec() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parse command-line arguments (without the program name). Flags may also come from a
/// flat key=value file named by --config; explicit flags win. Throws UsageError.
[[nodiscard]] RunConfig parse_args(std::span<const std::string> args);

/// Canonical argument list that parse_args maps back to `config`.
[[nodiscard]] std::vector<std::string> to_args(const RunConfig& config);

/// Help text listing commands and flags.
[[nodiscard]] std::string usage();

/// Run the configured command and return its report:
/// {command, inputs{...}, results{...}, diagnostics{...}, rows[...]?}.
[[nodiscard]] nlohmann::json build_report(const RunConfig& config);

[[nodiscard]] std::string render_json(const nlohmann::json& report);
[[nodiscard]] std::string render_csv(const nlohmann::json& report);
[[nodiscard]] std::string render_text(const nlohmann::json& report);
[[nodiscard]] std::string render(const nlohmann::json& report, OutputFormat format);

/// Dispatch `config`, write the report to `out` or config.output_path.
/// Returns 0 on success, 2 on numerical or I/O failure (diagnostic on `err`).
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + execute with exit-code mapping (1 on usage error).
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace bsclt::cli
