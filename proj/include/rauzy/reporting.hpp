#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "rauzy/enumeration.hpp"
#include "rauzy/renewal.hpp"
#include "rauzy/verify.hpp"

namespace rauzy {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

// Round-trip decimal form used wherever floats appear in CSV text.
inline std::string float_repr(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline OrderedJson mode_value_json(const ModeValue& v) {
    OrderedJson j;
    if (v.exact) j["fraction"] = fraction_string(*v.exact);
    j["float"] = v.approx;
    return j;
}

inline OrderedJson criterion_json(const CriterionReport& report) {
    OrderedJson j;
    j["d"] = report.d;
    j["delta"] = report.delta;
    j["exact"] = report.exact;
    j["K"] = report.K;
    j["tail_lower_limit"] = report.tail_lower_limit;
    j["partial_sum"] = mode_value_json(report.partial_sum);
    j["tail_bound"] = mode_value_json(report.tail);
    j["upper_bound"] = mode_value_json(report.upper_bound);
    j["verdict"] = report.verdict;
    return j;
}

inline OrderedJson bisection_json(const BisectionResult& result) {
    OrderedJson j;
    j["delta_star"] = result.delta_star;
    j["dim_upper_bound"] = result.dim_upper_bound;
    j["iterations"] = result.iterations;
    j["verdict"] = result.final_report.verdict;
    j["final_report"] = criterion_json(result.final_report);
    return j;
}

inline OrderedJson check_json(const CheckReport& report) {
    OrderedJson j;
    j["name"] = report.name;
    OrderedJson params = OrderedJson::object();
    for (const auto& [key, value] : report.parameters) params[key] = value;
    j["parameters"] = params;
    j["pass"] = report.pass;
    if (report.witness) j["witness"] = *report.witness;
    else j["witness"] = nullptr;
    j["max_discrepancy"] = mode_value_json(report.max_discrepancy);
    return j;
}

inline OrderedJson checks_json(const std::vector<CheckReport>& reports) {
    OrderedJson arr = OrderedJson::array();
    for (const CheckReport& r : reports) arr.push_back(check_json(r));
    return arr;
}

// Top-level wrapper shared by every machine-readable output: schema tag,
// the subcommand, and a full echo of the effective parameters.
inline OrderedJson report_envelope(const std::string& command, OrderedJson parameters) {
    OrderedJson j;
    j["schema"] = kReportSchemaVersion;
    j["command"] = command;
    j["parameters"] = std::move(parameters);
    return j;
}

inline std::string xrecord_csv_row(const XRecord& rec) {
    std::string row = std::to_string(rec.n) + ",";
    if (rec.k) row += std::to_string(*rec.k);
    row += ",";
    if (rec.value.exact) {
        row += rec.value.exact->get_num().get_str() + "," +
               rec.value.exact->get_den().get_str();
    } else {
        row += ",";
    }
    row += "," + float_repr(rec.value.approx) + "," + std::to_string(rec.word_count);
    return row;
}

inline std::string xrecords_csv(const std::vector<XRecord>& records) {
    std::string out = "n,k,value_num,value_den,value_float,word_count\n";
    for (const XRecord& rec : records) out += xrecord_csv_row(rec) + "\n";
    return out;
}

}  // namespace rauzy
