#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bsclt/cli.hpp"

namespace bsclt::cli {

namespace {

constexpr std::uint64_t kDefaultBatch = 65536;

struct CommandName {
    Command command;
    std::string_view name;
};

constexpr CommandName kCommands[] = {
    {Command::price, "price"},          {Command::mc, "mc"},
    {Command::tree, "tree"},            {Command::clt_demo, "clt-demo"},
    {Command::lindeberg, "lindeberg"},  {Command::var_linearity, "var-linearity"},
};

std::string shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += shortest(xs[i]);
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

bool needs_option(Command c) { return c == Command::price || c == Command::mc || c == Command::tree; }

bool needs_model(Command c) {
    return c == Command::clt_demo || c == Command::lindeberg || c == Command::var_linearity;
}

// Re-raise a library validation failure as a usage error naming the flag.
template <class F>
void check_field(F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        throw UsageError("invalid value for --" + e.field() + ": " + e.what());
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void validate(const RunConfig& cfg) {
    if (needs_option(cfg.command)) {
        const std::pair<const char*, const std::optional<double>*> required[] = {
            {"spot", &cfg.spot},     {"strike", &cfg.strike}, {"rate", &cfg.rate},
            {"expiry", &cfg.expiry}, {"vol", &cfg.volatility},
        };
        for (const auto& [flag, value] : required) {
            if (!value->has_value()) {
                throw UsageError("missing required field --" + std::string(flag) + " for command " +
                                 std::string(to_string(cfg.command)));
            }
        }
        check_field([&] { cfg.option_spec().validate(); });
    }
    if (cfg.command == Command::tree) check_field([&] { cfg.tree_config().validate(); });
    if (cfg.command == Command::mc) check_field([&] { cfg.mc_config().validate(); });
    if (needs_model(cfg.command)) {
        check_field([&] { (void)cfg.increment_model(); });
        check_field([&] { cfg.array_spec().validate(); });
        if (!(cfg.epsilon > 0.0)) throw UsageError("invalid value for --epsilon: must be > 0");
        if (cfg.command != Command::var_linearity) {
            if (cfg.ladder.empty()) throw UsageError("invalid value for --ladder: must not be empty");
            for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
                if (cfg.ladder[i] < 1 || (i > 0 && cfg.ladder[i] <= cfg.ladder[i - 1])) {
                    throw UsageError("invalid value for --ladder: must be strictly increasing positive integers");
                }
            }
        }
        if (cfg.command == Command::clt_demo && cfg.samples < 100) {
            throw UsageError("invalid value for --samples: clt-demo needs at least 100");
        }
        if (cfg.command == Command::lindeberg && cfg.samples < 2) {
            throw UsageError("invalid value for --samples: need at least 2");
        }
        if (cfg.command == Command::var_linearity) {
            if (cfg.horizons.size() < 3) throw UsageError("invalid value for --horizons: need at least 3");
            for (double t : cfg.horizons) {
                if (!(t > 0.0)) throw UsageError("invalid value for --horizons: must be > 0");
            }
            if (cfg.cells < 1) throw UsageError("invalid value for --cells: must be >= 1");
            if (cfg.samples < 4) throw UsageError("invalid value for --samples: need at least 4");
        }
    }
}

}  // namespace

std::string_view to_string(Command command) {
    for (const auto& c : kCommands) {
        if (c.command == command) return c.name;
    }
    return "unknown";
}

std::string_view to_string(OutputFormat format) {
    switch (format) {
        case OutputFormat::json: return "json";
        case OutputFormat::csv: return "csv";
        case OutputFormat::text: return "text";
    }
    return "unknown";
}

OptionSpec RunConfig::option_spec() const {
    return {spot.value_or(0.0), strike.value_or(0.0), rate.value_or(0.0), expiry.value_or(0.0),
            volatility.value_or(0.0)};
}

TreeConfig RunConfig::tree_config() const { return {steps}; }

McConfig RunConfig::mc_config() const {
    return {paths, seed, batch_size.value_or(std::min(paths, kDefaultBatch)), threads};
}

IncrementModel RunConfig::increment_model() const {
    switch (model) {
        case ModelKind::two_point: return IncrementModel::two_point(variance);
        case ModelKind::uniform: return IncrementModel::uniform(variance);
        case ModelKind::centered_exponential: return IncrementModel::centered_exponential(variance);
        case ModelKind::normal: return IncrementModel::normal(variance);
        case ModelKind::poisson_jump: return IncrementModel::poisson_jump(jump_size, intensity);
    }
    throw UsageError("unknown model");
}

ArraySpec RunConfig::array_spec() const {
    return {increment_model(), horizon, ladder.empty() ? 1 : ladder.back(), samples, seed, threads};
}

std::string usage() {
    std::string out =
        "usage: bsclt <command> [flags]\n"
        "\n"
        "commands:\n"
        "  price          closed-form Black-Scholes call price and d+/d-\n"
        "  mc             Monte Carlo price under the risk-neutral lognormal law\n"
        "  tree           Cox-Ross-Rubinstein binomial tree price\n"
        "  clt-demo       row-sum normality and Lindeberg statistics over an n ladder\n"
        "  lindeberg      Lindeberg statistic (analytic and Monte Carlo) over an n ladder\n"
        "  var-linearity  fit Var[Y_t] against t and check additivity\n"
        "\n"
        "option flags:      --spot --strike --rate --expiry --vol\n"
        "tree flags:        --steps\n"
        "monte carlo flags: --paths --seed --batch-size --threads\n"
        "array flags:       --model two_point|uniform|centered_exponential|normal|poisson_jump\n"
        "                   --variance --jump-size --intensity --horizon --ladder n1,n2,...\n"
        "                   --samples --epsilon --seed --horizons t1,t2,... --cells --threads\n"
        "global flags:      --format json|csv|text  --output <path>  --config <path>\n";
    return out;
}

RunConfig parse_args(std::span<const std::string> args) {
    if (args.empty()) throw UsageError("no command given\n\n" + usage());

    RunConfig cfg;
    CLI::App app{"Black-Scholes pricing and CLT convergence experiments", "bsclt"};
    app.set_help_flag();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "flat key=value file");
    // a repeated scalar flag overrides the earlier one (config file, then command line)
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string command;
    std::vector<std::string> names;
    for (const auto& c : kCommands) names.emplace_back(c.name);
    app.add_option("command", command)->required()->check(CLI::IsMember(names));

    double spot = 0, strike = 0, rate = 0, expiry = 0, vol = 0;
    auto* o_spot = app.add_option("--spot", spot);
    auto* o_strike = app.add_option("--strike", strike);
    auto* o_rate = app.add_option("--rate", rate);
    auto* o_expiry = app.add_option("--expiry", expiry);
    auto* o_vol = app.add_option("--vol,--volatility", vol);

    app.add_option("--steps", cfg.steps);
    app.add_option("--paths", cfg.paths);
    app.add_option("--seed", cfg.seed);
    std::uint64_t batch = 0;
    auto* o_batch = app.add_option("--batch-size", batch);
    app.add_option("--threads", cfg.threads);

    std::string model{to_string(cfg.model)};
    app.add_option("--model", model);
    app.add_option("--variance", cfg.variance);
    app.add_option("--jump-size", cfg.jump_size);
    app.add_option("--intensity", cfg.intensity);
    app.add_option("--horizon", cfg.horizon);
    app.add_option("--ladder", cfg.ladder)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--samples", cfg.samples);
    app.add_option("--epsilon", cfg.epsilon);
    app.add_option("--horizons", cfg.horizons)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--cells", cfg.cells);

    std::string format{to_string(cfg.format)};
    app.add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
    std::string output;
    auto* o_output = app.add_option("--output", output);

    std::vector<std::string> argv_store{"bsclt"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    for (const auto& c : kCommands) {
        if (c.name == command) cfg.command = c.command;
    }
    if (o_spot->count() > 0) cfg.spot = spot;
    if (o_strike->count() > 0) cfg.strike = strike;
    if (o_rate->count() > 0) cfg.rate = rate;
    if (o_expiry->count() > 0) cfg.expiry = expiry;
    if (o_vol->count() > 0) cfg.volatility = vol;
    if (o_batch->count() > 0) cfg.batch_size = batch;
    if (o_output->count() > 0) cfg.output_path = output;
    check_field([&] { cfg.model = parse_model_kind(model); });
    cfg.format = format == "json" ? OutputFormat::json
                 : format == "csv" ? OutputFormat::csv
                                   : OutputFormat::text;
    validate(cfg);
    return cfg;
}

std::vector<std::string> to_args(const RunConfig& c) {
    std::vector<std::string> out{std::string(to_string(c.command))};
    auto add = [&out](std::string flag, std::string value) {
        out.push_back(std::move(flag));
        out.push_back(std::move(value));
    };
    if (c.spot) add("--spot", shortest(*c.spot));
    if (c.strike) add("--strike", shortest(*c.strike));
    if (c.rate) add("--rate", shortest(*c.rate));
    if (c.expiry) add("--expiry", shortest(*c.expiry));
    if (c.volatility) add("--vol", shortest(*c.volatility));
    add("--steps", std::to_string(c.steps));
    add("--paths", std::to_string(c.paths));
    add("--seed", std::to_string(c.seed));
    if (c.batch_size) add("--batch-size", std::to_string(*c.batch_size));
    add("--threads", std::to_string(c.threads));
    add("--model", std::string(to_string(c.model)));
    add("--variance", shortest(c.variance));
    add("--jump-size", shortest(c.jump_size));
    add("--intensity", shortest(c.intensity));
    add("--horizon", shortest(c.horizon));
    add("--ladder", join(c.ladder));
    add("--samples", std::to_string(c.samples));
    add("--epsilon", shortest(c.epsilon));
    add("--horizons", join(c.horizons));
    add("--cells", std::to_string(c.cells));
    add("--format", std::string(to_string(c.format)));
    if (c.output_path) add("--output", *c.output_path);
    return out;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
    std::string rendered;
    try {
        rendered = render(build_report(config), config.format);
    } catch (const std::exception& e) {
        err << "bsclt: " << to_string(config.command) << ": " << e.what() << '\n';
        return 2;
    }
    if (config.output_path) {
        std::ofstream file(*config.output_path, std::ios::binary);
        if (!file || !(file << rendered) || !file.flush()) {
            err << "bsclt: cannot write " << *config.output_path << '\n';
            return 2;
        }
        return 0;
    }
    out << rendered;
    return 0;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    if (args.size() == 1 && (args[0] == "--help" || args[0] == "-h" || args[0] == "help")) {
        out << usage();
        return 0;
    }
    RunConfig config;
    try {
        config = parse_args(args);
    } catch (const UsageError& e) {
        err << "bsclt: " << e.what() << '\n';
        return 1;
    }
    return execute(config, out, err);
}

}  // namespace bsclt::cli
