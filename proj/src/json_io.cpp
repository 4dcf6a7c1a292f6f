#include "kantor/json_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace kantor {

double number_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::invalid_argument("bad numeric string '" + s + "'");
    }
    return j.get<double>();
}

json number_to_json(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty array of rows");
    Mat m(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
    for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(j[i].size()) != m.cols) throw std::invalid_argument("ragged matrix");
        for (int k = 0; k < m.cols; ++k) m(i, k) = number_from_json(j[i][k]);
    }
    return m;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols; ++k) row.push_back(number_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

FiniteSpace space_from_json(const json& j) {
    FiniteSpace s;
    const json& pts = j.at("points");
    if (pts.is_number_integer()) {
        s = make_space(pts.get<int>());
    } else {
        s.n = static_cast<int>(pts.size());
        for (const auto& p : pts) s.labels.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    }
    if (j.contains("coords")) {
        std::vector<double> c;
        for (const auto& v : j["coords"]) c.push_back(number_from_json(v));
        s.coords = std::move(c);
    }
    if (j.contains("metric")) s.metric = mat_from_json(j["metric"]);
    s.validate();
    return s;
}

json space_to_json(const FiniteSpace& s) {
    json j;
    j["points"] = s.labels;
    if (s.coords) j["coords"] = *s.coords;
    if (s.metric) j["metric"] = mat_to_json(*s.metric);
    return j;
}

Measure measure_from_json(const json& j, const FiniteSpace& space) {
    std::vector<double> w;
    for (const auto& v : j.at("weights")) w.push_back(number_from_json(v));
    return make_measure(space, std::move(w));
}

json measure_to_json(const Measure& m) {
    json j;
    j["weights"] = m.w;
    return j;
}

Potential potential_from_json(const json& j, const FiniteSpace& space) {
    std::vector<double> v;
    for (const auto& x : j.at("values")) v.push_back(number_from_json(x));
    return make_potential(space, std::move(v));
}

json potential_to_json(const Potential& p) {
    json j;
    json vals = json::array();
    for (double v : p.v) vals.push_back(number_to_json(v));
    j["values"] = std::move(vals);
    return j;
}

Transfer transfer_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "composite") {
        std::vector<Transfer> kids;
        for (const auto& c : j.at("children")) kids.push_back(transfer_from_json(c));
        if (kids.empty()) throw std::invalid_argument("composite transfer needs children");
        Transfer acc = kids[0];
        for (size_t i = 1; i < kids.size(); ++i) acc = convolve(acc, kids[i]);
        return acc;
    }
    if (kind == "dual_sum") {
        std::vector<Transfer> kids;
        for (const auto& c : j.at("children")) kids.push_back(transfer_from_json(c));
        if (kids.size() != 2) throw std::invalid_argument("dual_sum needs exactly two children");
        return dual_sum(kids[0], kids[1]);
    }

    GallerySpec spec;
    spec.space = space_from_json(j.at("space"));
    if (j.contains("target")) spec.target = space_from_json(j["target"]);
    if (j.contains("cost")) spec.cost = mat_from_json(j["cost"]);
    if (j.contains("kernel")) spec.kernel = mat_from_json(j["kernel"]);
    if (j.contains("sigma")) spec.sigma = j["sigma"].get<std::vector<int>>();
    if (j.contains("p")) spec.p = j["p"].get<double>();
    if (j.contains("gamma")) {
        std::string g = j["gamma"].get<std::string>();
        if (g == "square")
            spec.gamma = GammaKind::square;
        else if (g == "identity")
            spec.gamma = GammaKind::identity;
        else
            throw std::invalid_argument("gamma must be 'square' or 'identity'");
    }
    if (j.contains("d")) spec.dtable = mat_from_json(j["d"]);

    if (kind == "cost") spec.kind = TransferKind::cost;
    else if (kind == "metric") spec.kind = TransferKind::metric;
    else if (kind == "power_cost") spec.kind = TransferKind::power_cost;
    else if (kind == "pushforward") spec.kind = TransferKind::pushforward;
    else if (kind == "markov") spec.kind = TransferKind::markov;
    else if (kind == "entropic") spec.kind = TransferKind::entropic;
    else if (kind == "balayage") spec.kind = TransferKind::balayage;
    else if (kind == "martingale") spec.kind = TransferKind::martingale;
    else if (kind == "variance") spec.kind = TransferKind::variance;
    else if (kind == "marton") spec.kind = TransferKind::marton;
    else if (kind == "identity") return identity_transfer(spec.space);
    else throw std::invalid_argument("unknown transfer kind '" + kind + "'");
    return make_transfer(spec);
}

json transfer_to_json(const Transfer& t) {
    json j;
    switch (t.kind) {
        case TransferKind::cost: j["kind"] = "cost"; break;
        case TransferKind::metric: j["kind"] = "metric"; break;
        case TransferKind::power_cost: j["kind"] = "power_cost"; break;
        case TransferKind::pushforward: j["kind"] = "pushforward"; break;
        case TransferKind::markov: j["kind"] = "markov"; break;
        case TransferKind::entropic: j["kind"] = "entropic"; break;
        case TransferKind::balayage: j["kind"] = "balayage"; break;
        case TransferKind::martingale: j["kind"] = "martingale"; break;
        case TransferKind::variance: j["kind"] = "variance"; break;
        case TransferKind::marton: j["kind"] = "marton"; break;
        case TransferKind::composite: j["kind"] = "composite"; break;
        case TransferKind::dual_sum: j["kind"] = "dual_sum"; break;
        default: j["kind"] = "custom"; break;
    }
    j["space"] = space_to_json(t.source);
    if (!same_space(t.source, t.target)) j["target"] = space_to_json(t.target);
    if (t.cost) j["cost"] = mat_to_json(*t.cost);
    if (t.kernel) j["kernel"] = mat_to_json(*t.kernel);
    if (t.aux_cost) j["cost"] = mat_to_json(*t.aux_cost);
    if (!t.sigma_map.empty()) j["sigma"] = t.sigma_map;
    if (t.kind == TransferKind::power_cost) j["p"] = t.power_p;
    if (!t.children.empty()) {
        json kids = json::array();
        for (const auto& c : t.children) kids.push_back(transfer_to_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

ControlledChain chain_from_json(const json& j) {
    const int N = j.at("N").get<int>();
    const int dim = j.value("dim", 1);
    std::vector<std::vector<int>> controls;
    for (const auto& c : j.at("controls")) {
        if (c.is_number_integer())
            controls.push_back({c.get<int>()});
        else
            controls.push_back(c.get<std::vector<int>>());
    }
    std::vector<double> V;
    if (j.contains("lagrangian")) {
        const json& L = j["lagrangian"];
        std::string kin = L.value("kinetic", "v2/2");
        if (kin != "v2/2") throw std::invalid_argument("supported kinetic form: 'v2/2'");
        if (L.contains("potential"))
            for (const auto& v : L["potential"]) V.push_back(number_from_json(v));
    }
    ControlledChain ch = make_lazy_chain(N, dim, std::move(controls), V);
    if (j.contains("kernels")) {  // explicit user tables override the lazy walk
        ch.kernels.clear();
        for (const auto& k : j["kernels"]) ch.kernels.push_back(mat_from_json(k));
        if (j.contains("L")) ch.lagrangian = mat_from_json(j["L"]);
        ch.validate();
    }
    return ch;
}

InequalitySpec inequality_from_json(const json& j) {
    InequalitySpec spec;
    spec.lhs = transfer_from_json(j.at("lhs"));
    auto ident = [&](const FiniteSpace& s) { return identity_transfer(s); };
    spec.t1 = j.contains("t1") ? transfer_from_json(j["t1"]) : ident(spec.lhs.source);
    spec.t2 = j.contains("t2") ? transfer_from_json(j["t2"]) : ident(spec.lhs.target);
    auto identity_entropic = [&](const FiniteSpace& s) {
        Mat I(s.n, s.n);
        for (int i = 0; i < s.n; ++i) I(i, i) = 1.0;
        return make_entropic_transfer(std::move(I), s, s);
    };
    spec.e1 = j.contains("e1") ? transfer_from_json(j["e1"]) : identity_entropic(spec.lhs.source);
    spec.e2 = j.contains("e2") ? transfer_from_json(j["e2"]) : identity_entropic(spec.lhs.target);
    spec.lambda1 = j.value("lambda1", 1.0);
    spec.lambda2 = j.value("lambda2", 1.0);
    spec.mu = measure_from_json(j.at("mu"), spec.lhs.source);
    spec.nu = measure_from_json(j.at("nu"), spec.lhs.target);
    spec.sigma_steps = j.value("sigma_steps", 100);
    spec.g_levels = j.value("g_levels", 21);
    spec.g_span = j.value("g_span", 0.0);
    return spec;
}

json coupling_to_json(const Coupling& c) {
    json j;
    j["weights"] = mat_to_json(c.w);
    return j;
}

json ergodic_summary_to_json(const ErgodicSummary& s) {
    json j;
    j["c"] = s.c;
    if (s.c_detail.exact) {
        j["c_exact"] = {{"num", s.c_detail.num}, {"den", s.c_detail.den}};
    }
    j["u"] = potential_to_json(s.u);
    j["residual"] = s.residual;
    j["peierls"] = mat_to_json(s.peierls);
    j["aubry"] = s.aubry;
    j["mather"] = coupling_to_json(s.mather);
    j["method"] = s.method;
    return j;
}

void write_matrix_csv(std::ostream& os, const Mat& m) {
    os << std::setprecision(17);
    for (int i = 0; i < m.rows; ++i) {
        for (int k = 0; k < m.cols; ++k) {
            if (k) os << ",";
            if (m(i, k) == kInf)
                os << "inf";
            else if (m(i, k) == -kInf)
                os << "-inf";
            else
                os << m(i, k);
        }
        os << "\n";
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace kantor
