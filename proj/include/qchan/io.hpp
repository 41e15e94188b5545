// JSON serialization for the shared channel format and every report type the
// CLI emits. Numbers round-trip exactly (shortest representation that
// recovers the double, always >= 15 significant digits where needed).
#pragma once

#include "qchan/canonical.hpp"
#include "qchan/classify.hpp"
#include "qchan/cp.hpp"
#include "qchan/decompose.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace qchan {

using Json = nlohmann::ordered_json;

inline Json vec3_to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

inline Json vec4_to_json(const Vec4& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

inline Json mat3_to_json(const Mat3& m) {
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return rows;
}

inline Vec3 vec3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw invalid_parameter("expected an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Mat3 mat3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw invalid_parameter("expected a 3x3 matrix");
    Mat3 m;
    for (int i = 0; i < 3; ++i) m.row(i) = vec3_from_json(j[i]).transpose();
    return m;
}

/// Shared channel format: {"M": [[...],[...],[...]], "t": [x,y,z]} with the
/// shorthand {"lambda": [l1,l2,l3]} meaning M = diag(lambda). t defaults to
/// zero.
inline AffineChannel channel_from_json(const Json& j) {
    if (!j.is_object()) throw invalid_parameter("channel JSON must be an object");
    AffineChannel phi;
    if (j.contains("M")) {
        phi.M = mat3_from_json(j.at("M"));
    } else if (j.contains("lambda")) {
        phi.M = vec3_from_json(j.at("lambda")).asDiagonal();
    } else {
        throw invalid_parameter("channel JSON needs \"M\" or \"lambda\"");
    }
    if (j.contains("t")) phi.t = vec3_from_json(j.at("t"));
    return phi;
}

inline Json channel_to_json(const AffineChannel& phi) {
    Json j;
    j["M"] = mat3_to_json(phi.M);
    j["t"] = vec3_to_json(phi.t);
    return j;
}

/// Choi eigenvalues are reported in the trace-2 convention unless
/// normalize_choi requests the trace-1 (density-operator) scaling.
inline Json cp_report_to_json(const CPReport& rep, bool normalize_choi = false) {
    Json j;
    j["verdict"] = to_string(rep.verdict);
    j["unital"] = rep.unital;
    j["margin"] = rep.margin;
    j["eig_margin"] = normalize_choi ? rep.eig_margin / 2.0 : rep.eig_margin;
    j["q"] = vec4_to_json(rep.q);
    j["r"] = rep.r;
    j["q_prod"] = rep.q_prod;
    j["bound"] = rep.bound;
    j["a"] = rep.a;
    j["b"] = rep.b;
    j["detC"] = rep.detC;
    j["choi_eigs"] = normalize_choi ? vec4_to_json(rep.choi_eigs / 2.0)
                                    : vec4_to_json(rep.choi_eigs);
    j["upper_root_contact"] = rep.upper_root_contact;
    return j;
}

inline Json canonical_to_json(const AffineChannel& phi, const CanonicalChannel& c) {
    Json j = channel_to_json(phi);
    j["lambda"] = vec3_to_json(c.lambda);
    j["t_canonical"] = vec3_to_json(c.t);
    j["R1"] = mat3_to_json(c.R1);
    j["R2"] = mat3_to_json(c.R2);
    return j;
}

inline Json pure_output_to_json(const PureOutputClass& po) {
    Json j;
    j["kind"] = to_string(po.kind);
    Json pts = Json::array();
    for (const Vec3& p : po.points) pts.push_back(vec3_to_json(p));
    j["points"] = pts;
    j["max_output_norm"] = po.max_output_norm;
    return j;
}

inline Json kraus_to_json(const std::vector<CMat2>& ops) {
    Json list = Json::array();
    for (const CMat2& a : ops) {
        Json rows = Json::array();
        for (int i = 0; i < 2; ++i) {
            Json row = Json::array();
            for (int k = 0; k < 2; ++k)
                row.push_back(Json::array({a(i, k).real(), a(i, k).imag()}));
            rows.push_back(row);
        }
        list.push_back(rows);
    }
    return list;
}

inline Json factor_to_json(const GeneratorSpec& factor) {
    return std::visit(
        [](const auto& g) -> Json {
            using T = std::decay_t<decltype(g)>;
            Json j;
            if constexpr (std::is_same_v<T, Unitary>) {
                j["kind"] = "Unitary";
                j["axis"] = vec3_to_json(g.axis);
                j["half_angle"] = g.half_angle;
            } else if constexpr (std::is_same_v<T, Permutation>) {
                j["kind"] = "Permutation";
                j["sigma"] = Json::array({g.sigma[0], g.sigma[1], g.sigma[2]});
            } else if constexpr (std::is_same_v<T, SignFlip>) {
                j["kind"] = "SignFlip";
                j["axes"] = Json::array({g.axes[0], g.axes[1]});
            } else if constexpr (std::is_same_v<T, PhaseFlip>) {
                j["kind"] = "PhaseFlip";
                j["t"] = g.t;
            } else if constexpr (std::is_same_v<T, Constant>) {
                j["kind"] = "Constant";
                j["rho0"] = vec3_to_json(g.rho0);
            } else if constexpr (std::is_same_v<T, Extremal>) {
                j["kind"] = "Extremal";
                j["u"] = g.u;
                j["v"] = g.v;
            } else if constexpr (std::is_same_v<T, ExtremalAngles>) {
                j["kind"] = "ExtremalAngles";
                j["theta"] = g.theta;
                j["omega"] = g.omega;
            } else {
                static_assert(std::is_same_v<T, FaceChannel>);
                j["kind"] = "FaceChannel";
                j["s"] = g.s;
                j["z"] = g.z;
                j["half"] = g.half;
            }
            return j;
        },
        factor);
}

inline GeneratorSpec factor_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Unitary")
        return Unitary{vec3_from_json(j.at("axis")), j.at("half_angle").get<double>()};
    if (kind == "Permutation") {
        const Json& s = j.at("sigma");
        if (!s.is_array() || s.size() != 3) throw invalid_parameter("Permutation: bad sigma");
        return Permutation{{s[0].get<int>(), s[1].get<int>(), s[2].get<int>()}};
    }
    if (kind == "SignFlip") {
        const Json& a = j.at("axes");
        if (!a.is_array() || a.size() != 2) throw invalid_parameter("SignFlip: bad axes");
        return SignFlip{{a[0].get<int>(), a[1].get<int>()}};
    }
    if (kind == "PhaseFlip") return PhaseFlip{j.at("t").get<double>()};
    if (kind == "Constant") return Constant{vec3_from_json(j.at("rho0"))};
    if (kind == "Extremal") return Extremal{j.at("u").get<double>(), j.at("v").get<double>()};
    if (kind == "ExtremalAngles")
        return ExtremalAngles{j.at("theta").get<double>(), j.at("omega").get<double>()};
    if (kind == "FaceChannel")
        return FaceChannel{j.at("s").get<double>(), j.at("z").get<double>(),
                           j.at("half").get<int>()};
    throw invalid_parameter("unknown factor kind: " + kind);
}

inline Json plan_to_json(const DecompositionPlan& plan) {
    Json j;
    if (plan.target) j["target"] = channel_to_json(*plan.target);
    j["epsilon"] = plan.epsilon;
    Json factors = Json::array();
    for (const GeneratorSpec& f : plan.factors) factors.push_back(factor_to_json(f));
    j["factors"] = factors;
    j["recomposition_error"] = plan.recomposition_error;
    return j;
}

inline DecompositionPlan plan_from_json(const Json& j) {
    DecompositionPlan plan;
    if (j.contains("target")) plan.target = channel_from_json(j.at("target"));
    plan.epsilon = j.value("epsilon", 0.0);
    for (const Json& f : j.at("factors")) plan.factors.push_back(factor_from_json(f));
    plan.recomposition_error = j.value("recomposition_error", 0.0);
    return plan;
}

}  // namespace qchan
