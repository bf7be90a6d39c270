#pragma once

// Output plumbing: file writing, commented config headers, and JSON forms of
// the costing types.  JSON goes through nlohmann::json.

#include "roqam/core.hpp"
#include "roqam/qsvt_costing.hpp"
#include "roqam/roqam_costing.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace roqam {

/// File-system failure.  Exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("read failed on '" + path + "'");
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed on '" + path + "'");
}

/// '# '-prefixed lines: artifact version, then the resolved config.
inline std::string comment_header(const std::string& command, const std::vector<std::pair<std::string, std::string>>& config) {
    std::string out = "# artifact " + std::string(kVersion) + "\n# command = " + command + '\n';
    for (const auto& [k, v] : config) out += "# " + k + " = " + v + '\n';
    return out;
}

inline Json to_json(const ResourceReport& r) {
    Json j;
    j["t_count"] = r.t_count;
    j["rotation_count"] = r.rotation_count;
    j["queries"] = r.queries;
    j["feasible"] = r.feasible;
    j["breakdown"] = Json::object();
    for (const auto& [k, v] : r.breakdown) j["breakdown"][k] = v;
    j["context"] = Json::object();
    for (const auto& [k, v] : r.context) j["context"][k] = v;
    return j;
}

inline Json to_json(const InversionPolyParams& p) {
    return Json{{"kappa", p.kappa}, {"eps_qsvt", p.eps_qsvt}, {"b", p.b},        {"d", p.d},
                {"eps_rect", p.eps_rect}, {"beta_e", p.beta_e}, {"t", p.t}, {"n", p.n},
                {"degree", p.degree()}};
}

inline Json to_json(const StepCostPlan& p) {
    return Json{{"l", p.l},
                {"delta_l", p.delta_l},
                {"trotter", {{"order", p.trotter.order}, {"steps", p.trotter.steps}, {"dt", p.trotter.dt}}},
                {"eps_qae", p.eps_qae},
                {"eps_trot", p.eps_trot},
                {"eps_syn", p.eps_syn},
                {"iqae_queries", p.iqae_queries},
                {"rotations", p.rotations},
                {"t_count", p.t_count}};
}

}  // namespace roqam
