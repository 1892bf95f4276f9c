#include <cmath>
#include <cstdio>
#include <string>

#include "bsclt/cli.hpp"

namespace bsclt::cli {

namespace {

using nlohmann::json;

json option_inputs(const OptionSpec& spec) {
    return {{"spot", spec.spot},
            {"strike", spec.strike},
            {"rate", spec.rate},
            {"expiry", spec.expiry},
            {"volatility", spec.volatility}};
}

json price_results(const PriceResult& r) {
    json results = {{"price", r.price}};
    if (r.d_plus) results["d_plus"] = *r.d_plus;
    if (r.d_minus) results["d_minus"] = *r.d_minus;
    if (r.std_error) results["std_error"] = *r.std_error;
    return results;
}

json model_inputs(const RunConfig& c) {
    const IncrementModel model = c.increment_model();
    json inputs = {{"model", std::string(to_string(model.kind()))},
                   {"per_unit_variance", model.per_unit_variance()},
                   {"seed", c.seed},
                   {"samples", c.samples}};
    if (model.kind() == ModelKind::poisson_jump) {
        inputs["jump_size"] = model.jump_size();
        inputs["intensity"] = model.intensity();
    }
    return inputs;
}

json price_report(const RunConfig& c) {
    const OptionSpec spec = c.option_spec();
    const PriceResult r = bs_call_price(spec);
    return {{"command", "price"},
            {"inputs", option_inputs(spec)},
            {"results", price_results(r)},
            {"diagnostics",
             {{"method", std::string(to_string(r.method))},
              {"lower_bound", intrinsic_lower_bound(spec)},
              {"upper_bound", spec.spot}}}};
}

json mc_report(const RunConfig& c) {
    const OptionSpec spec = c.option_spec();
    const McConfig cfg = c.mc_config();
    const PriceResult r = mc_price(spec, cfg);
    const ForwardCheck fwd = mc_forward_check(spec, cfg);
    const double exact = bs_call_price(spec).price;
    json inputs = option_inputs(spec);
    inputs["paths"] = cfg.paths;
    inputs["seed"] = cfg.seed;
    json diagnostics = {{"method", std::string(to_string(r.method))},
                        {"closed_form_price", exact},
                        {"abs_error", std::fabs(r.price - exact)},
                        {"forward_ratio", fwd.ratio},
                        {"forward_std_error", fwd.std_error}};
    if (*r.std_error > 0.0) diagnostics["z_score"] = (r.price - exact) / *r.std_error;
    return {{"command", "mc"}, {"inputs", inputs}, {"results", price_results(r)}, {"diagnostics", diagnostics}};
}

json tree_report(const RunConfig& c) {
    const OptionSpec spec = c.option_spec();
    const PriceResult r = crr_tree_price(spec, c.tree_config());
    const double exact = bs_call_price(spec).price;
    json inputs = option_inputs(spec);
    inputs["steps"] = c.steps;
    json diagnostics = {{"method", std::string(to_string(r.method))},
                        {"nodes", *r.nodes},
                        {"closed_form_price", exact},
                        {"abs_error", std::fabs(r.price - exact)}};
    for (const auto& [key, value] : r.detail) diagnostics[key] = value;
    return {{"command", "tree"}, {"inputs", inputs}, {"results", price_results(r)}, {"diagnostics", diagnostics}};
}

json clt_demo_report(const RunConfig& c) {
    const ArraySpec spec = c.array_spec();
    const ConvergenceReport rep = run_convergence_experiment(spec, c.ladder, c.epsilon);
    json inputs = model_inputs(c);
    inputs["horizon"] = c.horizon;
    inputs["ladder"] = c.ladder;
    inputs["epsilon"] = c.epsilon;
    json rows = json::array();
    for (std::size_t k = 0; k < rep.n_ladder.size(); ++k) {
        rows.push_back({{"n", rep.n_ladder[k]},
                        {"ks_statistic", rep.ks_statistics[k]},
                        {"ks_threshold", rep.ks_thresholds[k]},
                        {"lindeberg", rep.lindeberg_values[k]},
                        {"lindeberg_estimate", rep.lindeberg_estimates[k]},
                        {"lindeberg_std_error", rep.lindeberg_std_errors[k]},
                        {"max_cell_variance", rep.max_cell_variance[k]}});
    }
    return {{"command", "clt-demo"},
            {"inputs", inputs},
            {"results", {{"verdict", std::string(to_string(rep.verdict))}}},
            {"diagnostics", {{"limit_variance", spec.model.per_unit_variance() * spec.horizon}}},
            {"rows", rows}};
}

json lindeberg_report(const RunConfig& c) {
    const IncrementModel model = c.increment_model();
    json inputs = model_inputs(c);
    inputs["horizon"] = c.horizon;
    inputs["ladder"] = c.ladder;
    inputs["epsilon"] = c.epsilon;
    json rows = json::array();
    for (std::uint64_t n : c.ladder) {
        const LindebergEstimate est =
            lindeberg_statistic(model, n, c.horizon, c.epsilon, c.samples, derive_seed(c.seed, n), c.threads);
        rows.push_back({{"n", n},
                        {"lindeberg", *est.analytic},
                        {"lindeberg_estimate", est.estimate},
                        {"lindeberg_std_error", est.std_error},
                        {"max_cell_variance", max_cell_variance(model, n, c.horizon)}});
    }
    json results = {{"first", rows.front()["lindeberg"]}, {"last", rows.back()["lindeberg"]}};
    if (model.kind() == ModelKind::poisson_jump && 2.0 * c.epsilon < model.jump_size()) {
        results["jump_tail_lower_bound"] = jump_tail_lower_bound(model, c.horizon, c.epsilon);
    }
    return {{"command", "lindeberg"},
            {"inputs", inputs},
            {"results", results},
            {"diagnostics", {{"limit_variance", model.per_unit_variance() * c.horizon}}},
            {"rows", rows}};
}

json var_linearity_report(const RunConfig& c) {
    const IncrementModel model = c.increment_model();
    const LinearityFit fit = variance_linearity_check(model, c.horizons, c.samples, c.seed, c.cells, c.threads);
    const AdditivityCheck add =
        variance_additivity_check(model, 0.5, 0.5, c.samples, derive_seed(c.seed, 0xadd), c.cells, c.threads);
    json inputs = model_inputs(c);
    inputs["horizons"] = c.horizons;
    inputs["cells"] = c.cells;
    json rows = json::array();
    for (std::size_t k = 0; k < fit.horizons.size(); ++k) {
        rows.push_back({{"horizon", fit.horizons[k]},
                        {"variance", fit.variances[k]},
                        {"variance_std_error", fit.variance_std_errors[k]},
                        {"expected_variance", model.per_unit_variance() * fit.horizons[k]}});
    }
    return {{"command", "var-linearity"},
            {"inputs", inputs},
            {"results",
             {{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"max_residual", fit.max_residual},
              {"slope_std_error", fit.slope_std_error},
              {"intercept_std_error", fit.intercept_std_error}}},
            {"diagnostics",
             {{"expected_slope", model.per_unit_variance()},
              {"additivity_combined", add.combined},
              {"additivity_sum_of_parts", add.sum_of_parts},
              {"additivity_std_error", add.std_error}}},
            {"rows", rows}};
}

std::string csv_cell(const json& v) {
    if (v.is_number_float()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12f", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string text_value(const json& v) {
    if (v.is_number_float()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

json build_report(const RunConfig& config) {
    switch (config.command) {
        case Command::price: return price_report(config);
        case Command::mc: return mc_report(config);
        case Command::tree: return tree_report(config);
        case Command::clt_demo: return clt_demo_report(config);
        case Command::lindeberg: return lindeberg_report(config);
        case Command::var_linearity: return var_linearity_report(config);
    }
    throw UsageError("unknown command");
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

std::string render_csv(const json& report) {
    json table = report.contains("rows") ? report["rows"] : json::array({report["results"]});
    std::string out;
    if (table.empty()) return out;
    bool first = true;
    for (const auto& [key, value] : table.front().items()) {
        out += (first ? "" : ",") + key;
        first = false;
    }
    out += '\n';
    for (const auto& row : table) {
        first = true;
        for (const auto& [key, value] : row.items()) {
            out += (first ? "" : ",") + csv_cell(value);
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::string render_text(const json& report) {
    std::string out = "command: " + report["command"].get<std::string>() + "\n";
    for (const char* section : {"inputs", "results", "diagnostics"}) {
        if (!report.contains(section)) continue;
        out += std::string(section) + ":\n";
        for (const auto& [key, value] : report[section].items()) {
            out += "  " + key + " = " + text_value(value) + "\n";
        }
    }
    if (report.contains("rows")) {
        out += "rows:\n";
        for (const auto& row : report["rows"]) {
            out += " ";
            for (const auto& [key, value] : row.items()) out += " " + key + "=" + text_value(value);
            out += "\n";
        }
    }
    return out;
}

std::string render(const json& report, OutputFormat format) {
    switch (format) {
        case OutputFormat::json: return render_json(report);
        case OutputFormat::csv: return render_csv(report);
        case OutputFormat::text: return render_text(report);
    }
    return render_text(report);
}

}  // namespace bsclt::cli
