#include "dsid/io.hpp"

#include <fstream>

namespace dsid {

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < M.cols(); ++j) {
            row.push_back(M(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw Error("matrix JSON must be a non-empty nested array");
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[static_cast<size_t>(i)].size()) != cols) {
            throw Error("matrix JSON rows have inconsistent lengths");
        }
        for (Index c = 0; c < cols; ++c) {
            M(i, c) = j[static_cast<size_t>(i)][static_cast<size_t>(c)].get<double>();
        }
    }
    return M;
}

Json model_to_json(const GlobalModel& model) {
    Json j;
    j["n"] = model.n();
    j["m"] = model.m();
    j["r"] = model.r();
    j["N"] = model.N();
    Json locals = Json::array();
    for (Index i = 0; i < model.N(); ++i) {
        const auto& li = model.local(i);
        Json entry;
        entry["A"] = matrix_to_json(li.A);
        entry["E_left"] = li.E_left ? matrix_to_json(*li.E_left) : Json(nullptr);
        entry["E_right"] = li.E_right ? matrix_to_json(*li.E_right) : Json(nullptr);
        entry["B"] = matrix_to_json(li.B);
        entry["C"] = matrix_to_json(li.C);
        locals.push_back(std::move(entry));
    }
    j["locals"] = std::move(locals);
    return j;
}

GlobalModel model_from_json(const Json& j) {
    if (!j.contains("locals") || !j["locals"].is_array()) {
        throw Error("model JSON lacks a 'locals' array");
    }
    std::vector<LocalModel> locals;
    for (const auto& entry : j["locals"]) {
        LocalModel li;
        li.A = matrix_from_json(entry.at("A"));
        if (entry.contains("E_left") && !entry["E_left"].is_null()) {
            li.E_left = matrix_from_json(entry["E_left"]);
        }
        if (entry.contains("E_right") && !entry["E_right"].is_null()) {
            li.E_right = matrix_from_json(entry["E_right"]);
        }
        li.B = matrix_from_json(entry.at("B"));
        li.C = matrix_from_json(entry.at("C"));
        locals.push_back(std::move(li));
    }
    GlobalModel model = assemble_global(std::move(locals));
    for (const char* key : {"n", "m", "r", "N"}) {
        if (j.contains(key)) {
            const Index expect = j[key].get<Index>();
            const Index have = key[0] == 'n'   ? model.n()
                               : key[0] == 'm' ? model.m()
                               : key[0] == 'r' ? model.r()
                                               : model.N();
            if (expect != have) {
                throw Error(std::string("model JSON header field '") + key +
                            "' contradicts the locals");
            }
        }
    }
    return model;
}

Json simconfig_to_json(const SimConfig& cfg) {
    Json j;
    j["past_window"] = cfg.past_window;
    j["future_window"] = cfg.future_window;
    j["reg"] = cfg.reg;
    j["order"] = cfg.order ? Json(*cfg.order) : Json(nullptr);
    j["max_order_candidates"] = cfg.max_order_candidates;
    return j;
}

SimConfig simconfig_from_json(const Json& j) {
    SimConfig cfg;
    if (j.contains("past_window")) cfg.past_window = j["past_window"].get<Index>();
    if (j.contains("future_window")) cfg.future_window = j["future_window"].get<Index>();
    if (j.contains("reg")) cfg.reg = j["reg"].get<double>();
    if (j.contains("order") && !j["order"].is_null()) cfg.order = j["order"].get<Index>();
    if (j.contains("max_order_candidates")) {
        cfg.max_order_candidates = j["max_order_candidates"].get<Index>();
    }
    cfg.validate();
    return cfg;
}

Json omegaspec_to_json(const OmegaSpec& spec) {
    Json j;
    j["variant"] = to_string(spec.variant);
    j["p"] = spec.p;
    j["t"] = spec.t;
    if (!spec.t_per_subsystem.empty()) {
        j["t_per_subsystem"] = spec.t_per_subsystem;
    }
    return j;
}

OmegaSpec omegaspec_from_json(const Json& j) {
    OmegaSpec spec;
    if (j.contains("variant")) {
        if (j["variant"].is_number_integer()) {
            spec.variant = omega_variant_from_string(std::to_string(j["variant"].get<int>()));
        } else {
            spec.variant = omega_variant_from_string(j["variant"].get<std::string>());
        }
    }
    if (j.contains("p")) spec.p = j["p"].get<Index>();
    if (j.contains("t")) spec.t = j["t"].get<Index>();
    if (j.contains("t_per_subsystem") && !j["t_per_subsystem"].is_null()) {
        spec.t_per_subsystem = j["t_per_subsystem"].get<std::vector<Index>>();
    }
    spec.validate();
    return spec;
}

Json identified_to_json(const IdentifiedGlobal& result) {
    Json j;
    if (result.model) {
        j = model_to_json(*result.model);
    } else {
        Json locals = Json::array();
        for (const auto& li : result.locals) {
            if (!li) {
                locals.push_back(nullptr);
                continue;
            }
            Json entry;
            entry["A"] = matrix_to_json(li->A);
            entry["E_left"] = li->E_left ? matrix_to_json(*li->E_left) : Json(nullptr);
            entry["E_right"] = li->E_right ? matrix_to_json(*li->E_right) : Json(nullptr);
            entry["B"] = matrix_to_json(li->B);
            entry["C"] = matrix_to_json(li->C);
            locals.push_back(std::move(entry));
        }
        j["locals"] = std::move(locals);
        j["N"] = static_cast<Index>(result.locals.size());
    }
    Json prov;
    prov["omega"] = omegaspec_to_json(result.spec);
    prov["sim"] = simconfig_to_json(result.cfg);
    prov["share_model"] = result.shared;
    j["provenance"] = std::move(prov);
    Json failures = Json::array();
    for (const auto& [idx, message] : result.failures) {
        failures.push_back(Json{{"subsystem", idx}, {"error", message}});
    }
    j["failures"] = std::move(failures);
    return j;
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream os(path);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    os << j.dump(2) << "\n";
}

Json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw Error("cannot open " + path);
    }
    Json j;
    is >> j;
    return j;
}

}  // namespace dsid
