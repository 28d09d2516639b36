#include "msstab/json_io.hpp"

namespace msstab {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected a matrix (array of rows)");
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return Mat(0, 0);
    if (!j[0].is_array()) throw ConfigError(path, "expected nested arrays");
    const int cols = static_cast<int>(j[0].size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            throw ConfigError(path + "[" + std::to_string(i) + "]", "ragged matrix rows");
        for (int c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ConfigError(path + "[" + std::to_string(i) + "][" + std::to_string(c) + "]",
                                  "expected a number");
            m(i, c) = j[i][c].get<double>();
        }
    }
    return m;
}

namespace {

Mat field_mat(const json& j, const char* key, const std::string& path, bool required, int rows = -1,
              int cols = 0) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(path + "." + key, "missing required matrix");
        return Mat(rows, cols);
    }
    return mat_from_json(j[key], path + "." + key);
}

ImpulsiveSystem impulsive_from_json(const json& j, const std::string& path) {
    ImpulsiveSystem s;
    s.A = field_mat(j, "A", path, true);
    const int n = s.A.rows();
    if (j.contains("E_c")) {
        const json& ec = j["E_c"];
        if (ec.is_array() && !ec.empty() && ec[0].is_array() && !ec[0].empty() && ec[0][0].is_array()) {
            for (size_t k = 0; k < ec.size(); ++k)
                s.Ec.push_back(mat_from_json(ec[k], path + ".E_c[" + std::to_string(k) + "]"));
        } else {
            s.Ec.push_back(mat_from_json(ec, path + ".E_c"));
        }
    } else {
        s.Ec.push_back(Mat::zeros(n, n));
    }
    s.J = field_mat(j, "J", path, true);
    s.Ed = j.contains("E_d") ? mat_from_json(j["E_d"], path + ".E_d") : Mat::zeros(n, n);
    s.Bc1 = field_mat(j, "B_c1", path, false, n, 0);
    s.Bc2 = field_mat(j, "B_c2", path, false, n, s.Bc1.cols());
    s.Bd1 = field_mat(j, "B_d1", path, false, n, 0);
    s.Bd2 = field_mat(j, "B_d2", path, false, n, s.Bd1.cols());
    auto errs = validate(s);
    if (!errs.empty()) {
        const auto dot = errs.front().find(':');
        std::string field = errs.front().substr(0, dot);
        // internal names match the config keys
        throw ConfigError(path + "." + field, errs.front().substr(dot + 2));
    }
    return s;
}

} // namespace

AnySystem system_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::string type = j.value("type", "impulsive");
    if (type == "impulsive") return impulsive_from_json(j, path);
    if (type == "switched") {
        SwitchedSystem sw;
        if (!j.contains("modes") || !j["modes"].is_array())
            throw ConfigError(path + ".modes", "expected an array of {G, H} objects");
        for (size_t k = 0; k < j["modes"].size(); ++k) {
            const std::string mp = path + ".modes[" + std::to_string(k) + "]";
            sw.modes.emplace_back(mat_from_json(j["modes"][k].at("G"), mp + ".G"),
                                  mat_from_json(j["modes"][k].at("H"), mp + ".H"));
        }
        auto errs = validate(sw);
        if (!errs.empty()) throw ConfigError(path, errs.front());
        return sw;
    }
    if (type == "sampled_data") {
        SampledDataSystem sd;
        sd.A_sd = field_mat(j, "A_sd", path, true);
        sd.B_sd = field_mat(j, "B_sd", path, true);
        sd.E_sd = field_mat(j, "E_sd", path, true);
        sd.alpha = j.value("alpha", 0.0);
        auto errs = validate(sd);
        if (!errs.empty()) {
            const auto dot = errs.front().find(':');
            throw ConfigError(path + "." + errs.front().substr(0, dot), errs.front().substr(dot + 2));
        }
        return sd;
    }
    throw ConfigError(path + ".type", "unknown system type '" + type + "'");
}

json system_to_json(const AnySystem& sys) {
    json j;
    if (const auto* s = std::get_if<ImpulsiveSystem>(&sys)) {
        j["type"] = "impulsive";
        j["A"] = mat_to_json(s->A);
        json ec = json::array();
        for (const Mat& e : s->Ec) ec.push_back(mat_to_json(e));
        j["E_c"] = ec;
        j["J"] = mat_to_json(s->J);
        j["E_d"] = mat_to_json(s->Ed);
        if (s->mc() > 0) {
            j["B_c1"] = mat_to_json(s->Bc1);
            j["B_c2"] = mat_to_json(s->Bc2);
        }
        if (s->md() > 0) {
            j["B_d1"] = mat_to_json(s->Bd1);
            j["B_d2"] = mat_to_json(s->Bd2);
        }
    } else if (const auto* sw = std::get_if<SwitchedSystem>(&sys)) {
        j["type"] = "switched";
        json modes = json::array();
        for (const auto& [g, h] : sw->modes) modes.push_back({{"G", mat_to_json(g)}, {"H", mat_to_json(h)}});
        j["modes"] = modes;
    } else if (const auto* sd = std::get_if<SampledDataSystem>(&sys)) {
        j["type"] = "sampled_data";
        j["A_sd"] = mat_to_json(sd->A_sd);
        j["B_sd"] = mat_to_json(sd->B_sd);
        j["E_sd"] = mat_to_json(sd->E_sd);
        j["alpha"] = sd->alpha;
    }
    return j;
}

DwellTimeSpec dwell_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError(path, "expected {type, ...}");
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "constant") {
            DwellTimeSpec d = ConstantDwell{j.at("T").get<double>()};
            validate(d);
            return d;
        }
        if (type == "ranged") {
            DwellTimeSpec d = RangedDwell{j.at("T_min").get<double>(), j.at("T_max").get<double>()};
            validate(d);
            return d;
        }
        if (type == "minimum") {
            DwellTimeSpec d = MinimumDwell{j.at("T").get<double>()};
            validate(d);
            return d;
        }
    } catch (const json::exception& e) {
        throw ConfigError(path, e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".type", "unknown dwell-time type '" + type + "'");
}

json dwell_to_json(const DwellTimeSpec& spec) {
    json j;
    if (const auto* c = std::get_if<ConstantDwell>(&spec)) {
        j["type"] = "constant";
        j["T"] = c->T;
    } else if (const auto* r = std::get_if<RangedDwell>(&spec)) {
        j["type"] = "ranged";
        j["T_min"] = r->T_min;
        j["T_max"] = r->T_max;
    } else if (const auto* m = std::get_if<MinimumDwell>(&spec)) {
        j["type"] = "minimum";
        j["T"] = m->T;
    }
    return j;
}

json pwl_to_json(const PwlMatrixFunction& f) {
    json j;
    j["times"] = f.times();
    json nodes = json::array();
    for (const Mat& m : f.nodes()) nodes.push_back(mat_to_json(m));
    j["nodes"] = nodes;
    return j;
}

json certificate_to_json(const StabilityCertificate& cert) {
    json j;
    j["kind"] = cert.kind;
    j["dwell"] = dwell_to_json(cert.dwell);
    j["verdict"] = cert.verdict;
    j["margin"] = cert.margin;
    if (cert.P) j["P"] = mat_to_json(*cert.P);
    if (!cert.S.empty()) {
        json s = json::array();
        for (const auto& f : cert.S) s.push_back(pwl_to_json(f));
        j["S"] = s;
    }
    j["residuals"] = cert.residuals;
    j["block_scales"] = cert.block_scales;
    j["caveats"] = cert.caveats;
    return j;
}

json search_to_json(const SearchResult& res) {
    json j;
    j["threshold"] = res.threshold;
    j["bracket"] = {res.bracket.first, res.bracket.second};
    j["evaluations"] = res.evaluations;
    j["method"] = res.method;
    j["empty_interval"] = res.empty_interval;
    json intervals = json::array();
    for (const auto& [lo, hi] : res.stable_intervals) intervals.push_back({lo, hi});
    j["stable_intervals"] = intervals;
    return j;
}

json gains_to_json(const ControllerGains& gains) {
    json j;
    if (gains.has_continuous()) {
        j["U_c"] = pwl_to_json(gains.Uc);
        j["S_tilde"] = pwl_to_json(gains.Stilde);
        // convenience table of the recovered gain at the grid nodes
        json kc = json::array();
        for (double t : gains.Uc.times()) kc.push_back({{"tau", t}, {"K_c", mat_to_json(gains.eval_Kc(t))}});
        j["K_c_at_nodes"] = kc;
    }
    if (gains.has_discrete()) j["K_d"] = mat_to_json(gains.Kd);
    return j;
}

json synthesis_to_json(const SynthesisResult& res) {
    json j;
    j["feasible"] = res.feasible;
    j["verified"] = res.verified;
    j["program_margin"] = res.program_margin;
    j["closed_loop_rho"] = res.closed_loop_rho;
    j["checked_at"] = res.checked_at;
    if (!res.notes.empty()) j["notes"] = res.notes;
    if (res.feasible) j["gains"] = gains_to_json(res.gains);
    return j;
}

} // namespace msstab
