#pragma once

// JSON (full) and CSV (flat summary) serialization for experiment reports.
// Reports are value-complete: pass/fail re-derives from the recorded numbers.

#include <sstream>
#include <string>

#include <json.hpp>

#include "experiments.hpp"

namespace isingcm {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return nlohmann::json{
        {"model", model_name(c.model)}, {"p", c.p},
        {"N", c.N},                     {"beta", c.params.beta},
        {"B", c.params.B},              {"replicas", c.replicas},
        {"samples", c.samples},         {"seed", c.seed},
        {"truncation", c.truncation},   {"level", c.level},
    };
}

inline nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = r.kind;
    j["config"] = to_json(r.config);
    j["truncation_used"] = r.truncation_used;
    j["results"] = {
        {"draws", r.draws},
        {"empirical_mean", r.empirical_mean},
        {"empirical_variance", r.empirical_variance},
        {"se_mean", r.se_mean},
        {"se_variance", r.se_variance},
        {"target_variance", r.target_variance},
        {"finite_target", r.finite_target},
        {"secondary_target", r.secondary_target},
        {"target_tail_bound", r.target_tail_bound},
        {"ks_statistic", r.ks_statistic},
        {"ks_p_value", r.ks_p_value},
        {"ks_applied", r.ks_applied},
        {"pass", r.pass},
    };
    if (r.kind == "aq") {
        j["variance_decomposition"] = {
            {"total_variance_direct", r.total_variance_direct},
            {"total_variance_split", r.total_variance_split},
            {"mean_chi", r.mean_chi},
            {"var_of_means", r.var_of_means},
            {"var_of_means_se", r.var_of_means_se},
        };
    }
    if (r.kind == "xn") {
        j["line_counts"] = {
            {"lambda2_variance", r.lambda2_variance},
            {"lambda2_target", r.lambda2_target},
            {"lambda2_se", r.lambda2_se},
        };
    }
    if (r.kind == "lln") {
        j["lln"] = {
            {"epsilon", r.epsilon},
            {"limit_mean", r.lln_limit_mean},
            {"N", r.lln_N},
            {"probability", r.lln_probability},
            {"upper_bound", r.lln_upper_bound},
            {"max_graph_probability", r.lln_max_graph_probability},
            {"slope", r.lln_slope},
            {"slope_valid", r.lln_slope_valid},
        };
    }
    if (!r.bin_edges.empty()) {
        j["histogram"] = {
            {"bin_edges", r.bin_edges},
            {"bin_counts", r.bin_counts},
        };
    }
    j["runtime_seconds"] = r.runtime_seconds;
    return j;
}

inline std::string report_csv_header() {
    return "kind,model,p,N,beta,B,replicas,samples,seed,truncation_used,draws,"
           "empirical_variance,se_variance,target_variance,ks_p_value,pass";
}

inline std::string report_csv_row(const ExperimentReport& r) {
    std::ostringstream os;
    os.precision(17);
    const auto& c = r.config;
    os << r.kind << ',' << model_name(c.model) << ',' << c.p << ',' << c.N << ','
       << c.params.beta << ',' << c.params.B << ',' << c.replicas << ',' << c.samples << ','
       << c.seed << ',' << r.truncation_used << ',' << r.draws << ','
       << r.empirical_variance << ',' << r.se_variance << ',' << r.target_variance << ','
       << r.ks_p_value << ',' << (r.pass ? 1 : 0);
    return os.str();
}

} // namespace isingcm
