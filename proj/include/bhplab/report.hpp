#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "bhplab/geometry.hpp"
#include "bhplab/levy_triple.hpp"
#include "bhplab/path_sampler.hpp"
#include "bhplab/subordinator.hpp"

namespace bhplab {

using json = nlohmann::ordered_json;

std::string sha1_hex(const std::string& data);
// Git-style blob hash of a payload: sha1("blob <len>\0" + payload).
std::string git_blob_hash(const std::string& payload);

// Floats serialized with 17 significant digits.
std::string format_double(double v);

enum class Verdict { consistent, inconsistent, inconclusive };
std::string verdict_name(Verdict v);

// CSV row of an estimate table: {experiment, r, mean, stderr, n, censored_frac}.
struct ScaleRow {
    std::string experiment;
    double r = 0.0;
    double mean = 0.0;
    double se = 0.0;
    long long n = 0;
    double censored_frac = 0.0;
};

// Plot-data row: {scale, statistic, lo, hi}.
using PlotRow = std::array<double, 4>;

struct ExperimentReport {
    std::string experiment;
    json params = json::object();
    json per_scale = json::array();
    json fitted_constants = json::object();
    Verdict verdict = Verdict::inconclusive;
    std::string decided_by;      // the convention/tolerance that decided the verdict
    bool censor_flagged = false;  // set when any input run tripped the censor gate
    std::vector<ScaleRow> csv_rows;
    std::vector<PlotRow> plot_rows;

    json to_json() const;
    int exit_code() const;  // 0 consistent/completed, 2 inconsistent, 3 inconclusive
};

std::string estimates_csv(const std::vector<ScaleRow>& rows);
std::string plot_csv(const std::vector<PlotRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

// --- JSON codecs for the domain specs -------------------------------------

json to_json(const SubordinatorSpec& s);
SubordinatorSpec subordinator_from_json(const json& j);
// Named presets of Laplace exponents: "bm+stable(a)", "tempered(a,m)",
// "bm+sum(a,b)", "bm+log".
SubordinatorSpec subordinator_from_name(const std::string& name);

json to_json(const LevyTriple& t);
LevyTriple triple_from_json(const json& j);

json to_json(const DomainSpec& dom, int d);
DomainSpec domain_from_json(const json& j, int* dim_out = nullptr);

json to_json(const Estimate& e);

}  // namespace bhplab
