#include "betapot/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace betapot {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? "," : "");
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "");
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text: cannot open " + path);
    out << body;
    if (!out) throw std::runtime_error("write_text: write failed for " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j;
    in >> j;
    return j;
}

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context) {
    if (!obj.is_object()) throw std::runtime_error(context + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed) ok |= it.key() == k;
        if (!ok) throw std::runtime_error(context + ": unknown key \"" + it.key() + "\"");
    }
}

namespace {

double number_or_inf(const json& v, const std::string& context) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw std::runtime_error(context + ": expected a number or \"inf\"/\"-inf\"");
}

json endpoint_json(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

}  // namespace

json field_to_json(const FieldSpec& field) {
    json j;
    j["beta"] = field.beta;
    j["superlog_margin_b"] = field.superlog_margin_b;
    switch (field.q.kind) {
        case QKind::real_poly:
            j["kind"] = "real_poly";
            j["coeffs"] = field.q.coeffs;
            break;
        case QKind::radial_poly:
            j["kind"] = "radial_poly";
            j["coeffs"] = field.q.coeffs;
            break;
        case QKind::tabulated1d:
            j["kind"] = "tabulated1d";
            j["abscissae"] = field.q.abscissae;
            j["values"] = field.q.values;
            j["radial_abscissa"] = field.q.radial_abscissa;
            break;
        case QKind::tabulated_nodes: {
            j["kind"] = "tabulated_nodes";
            json nodes = json::array();
            for (std::size_t i = 0; i < field.q.nodes.size(); ++i)
                nodes.push_back(
                    {field.q.nodes[i].real(), field.q.nodes[i].imag(), field.q.values[i]});
            j["nodes"] = nodes;
            break;
        }
    }
    return j;
}

FieldSpec field_from_json(const json& j) {
    require_keys(j, {"beta", "kind", "coeffs", "abscissae", "values", "radial_abscissa", "nodes",
                     "superlog_margin_b"},
                 "field");
    if (!j.contains("kind")) throw std::runtime_error("field: missing kind");
    const std::string kind = j.at("kind").get<std::string>();
    const double beta = j.contains("beta") ? j.at("beta").get<double>() : 2.0;
    const double b = j.contains("superlog_margin_b") ? j.at("superlog_margin_b").get<double>()
                                                     : 1.0;
    FieldSpec f;
    if (kind == "real_poly" || kind == "radial_poly") {
        auto coeffs = j.at("coeffs").get<std::vector<double>>();
        f = kind == "real_poly" ? make_real_poly_field(beta, coeffs, b)
                                : make_radial_poly_field(beta, coeffs, b);
    } else if (kind == "tabulated1d") {
        f = make_tabulated1d_field(beta, j.at("abscissae").get<std::vector<double>>(),
                                   j.at("values").get<std::vector<double>>(),
                                   j.value("radial_abscissa", true), b);
    } else if (kind == "tabulated_nodes") {
        std::vector<cpx> nodes;
        std::vector<double> values;
        for (const auto& row : j.at("nodes")) {
            if (!row.is_array() || row.size() != 3)
                throw std::runtime_error("field: tabulated node rows are [x, y, value]");
            nodes.emplace_back(row[0].get<double>(), row[1].get<double>());
            values.push_back(row[2].get<double>());
        }
        f = make_tabulated_nodes_field(beta, nodes, values, b);
    } else {
        throw std::runtime_error("field: unknown kind \"" + kind + "\"");
    }
    f.validate();
    return f;
}

json domain_to_json(const DomainSpec& spec) {
    json j;
    j["resolution"] = spec.resolution;
    j["tau_scale"] = spec.tau_scale;
    if (spec.truncation_override) j["truncation_override"] = *spec.truncation_override;
    switch (spec.kind) {
        case DomainKind::intervals: {
            j["kind"] = "intervals";
            json ivs = json::array();
            for (const auto& iv : spec.intervals)
                ivs.push_back({endpoint_json(iv.first), endpoint_json(iv.second)});
            j["intervals"] = ivs;
            break;
        }
        case DomainKind::disc:
            j["kind"] = "disc";
            j["radius"] = spec.radius;
            break;
        case DomainKind::annulus:
            j["kind"] = "annulus";
            j["r_inner"] = spec.r_inner;
            j["r_outer"] = spec.r_outer;
            break;
        case DomainKind::rectangle:
            j["kind"] = "rectangle";
            j["x0"] = spec.x0;
            j["x1"] = spec.x1;
            j["y0"] = spec.y0;
            j["y1"] = spec.y1;
            break;
        case DomainKind::circle:
            j["kind"] = "circle";
            j["radius"] = spec.radius;
            break;
    }
    return j;
}

DomainSpec domain_from_json(const json& j) {
    require_keys(j,
                 {"kind", "intervals", "radius", "r_inner", "r_outer", "x0", "x1", "y0", "y1",
                  "resolution", "tau_scale", "truncation_override"},
                 "domain");
    if (!j.contains("kind")) throw std::runtime_error("domain: missing kind");
    const std::string kind = j.at("kind").get<std::string>();
    DomainSpec s;
    if (kind == "intervals") {
        s.kind = DomainKind::intervals;
        for (const auto& row : j.at("intervals")) {
            if (!row.is_array() || row.size() != 2)
                throw std::runtime_error("domain: interval rows are [a, b]");
            s.intervals.emplace_back(number_or_inf(row[0], "domain interval"),
                                     number_or_inf(row[1], "domain interval"));
        }
    } else if (kind == "disc") {
        s.kind = DomainKind::disc;
        s.radius = j.at("radius").get<double>();
    } else if (kind == "annulus") {
        s.kind = DomainKind::annulus;
        s.r_inner = j.at("r_inner").get<double>();
        s.r_outer = j.at("r_outer").get<double>();
    } else if (kind == "rectangle") {
        s.kind = DomainKind::rectangle;
        s.x0 = j.at("x0").get<double>();
        s.x1 = j.at("x1").get<double>();
        s.y0 = j.at("y0").get<double>();
        s.y1 = j.at("y1").get<double>();
    } else if (kind == "circle") {
        s.kind = DomainKind::circle;
        s.radius = j.at("radius").get<double>();
    } else {
        throw std::runtime_error("domain: unknown kind \"" + kind + "\"");
    }
    if (j.contains("resolution")) s.resolution = j.at("resolution").get<int>();
    if (j.contains("tau_scale")) s.tau_scale = j.at("tau_scale").get<double>();
    if (j.contains("truncation_override"))
        s.truncation_override = j.at("truncation_override").get<double>();
    s.validate();
    return s;
}

json window_to_json(const Window& window) {
    json j;
    switch (window.kind) {
        case Window::Kind::intervals: {
            j["kind"] = "intervals";
            json ivs = json::array();
            for (const auto& iv : window.intervals) ivs.push_back({iv.first, iv.second});
            j["intervals"] = ivs;
            break;
        }
        case Window::Kind::disc:
            j["kind"] = "disc";
            j["center"] = {window.center.real(), window.center.imag()};
            j["radius"] = window.radius;
            break;
        case Window::Kind::annulus:
            j["kind"] = "annulus";
            j["r_inner"] = window.r_inner;
            j["r_outer"] = window.r_outer;
            break;
    }
    return j;
}

Window window_from_json(const json& j) {
    require_keys(j, {"kind", "intervals", "center", "radius", "r_inner", "r_outer"}, "window");
    if (!j.contains("kind")) throw std::runtime_error("window: missing kind");
    const std::string kind = j.at("kind").get<std::string>();
    Window w;
    if (kind == "intervals") {
        w.kind = Window::Kind::intervals;
        for (const auto& row : j.at("intervals")) {
            if (!row.is_array() || row.size() != 2)
                throw std::runtime_error("window: interval rows are [a, b]");
            w.intervals.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
    } else if (kind == "disc") {
        w.kind = Window::Kind::disc;
        const auto& c = j.at("center");
        w.center = cpx(c.at(0).get<double>(), c.at(1).get<double>());
        w.radius = j.at("radius").get<double>();
    } else if (kind == "annulus") {
        w.kind = Window::Kind::annulus;
        w.r_inner = j.at("r_inner").get<double>();
        w.r_outer = j.at("r_outer").get<double>();
    } else {
        throw std::runtime_error("window: unknown kind \"" + kind + "\"");
    }
    w.validate();
    return w;
}

json solution_to_json(const EquilibriumSolution& sol) {
    json j;
    json nodes = json::array();
    for (const cpx& z : sol.nodes) nodes.push_back({z.real(), z.imag()});
    j["nodes"] = nodes;
    j["weights"] = sol.weights;
    j["diag_desing"] = sol.diag_desing;
    j["potential"] = sol.potential_values;
    j["beta"] = sol.beta;
    j["rho"] = sol.rho;
    j["energy"] = sol.energy;
    j["kkt_residual"] = sol.kkt_residual;
    j["duality_gap"] = sol.duality_gap;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    j["support"] = sol.support_nodes;
    j["contact"] = sol.contact_nodes;
    return j;
}

EquilibriumSolution solution_from_json(const json& j) {
    require_keys(j,
                 {"nodes", "weights", "diag_desing", "potential", "beta", "rho", "energy",
                  "kkt_residual", "duality_gap", "iterations", "converged", "support", "contact"},
                 "solution");
    EquilibriumSolution sol;
    for (const auto& row : j.at("nodes")) sol.nodes.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    sol.weights = j.at("weights").get<std::vector<double>>();
    sol.diag_desing = j.at("diag_desing").get<std::vector<double>>();
    sol.potential_values = j.at("potential").get<std::vector<double>>();
    sol.beta = j.at("beta").get<double>();
    sol.rho = j.at("rho").get<double>();
    sol.energy = j.at("energy").get<double>();
    sol.kkt_residual = j.at("kkt_residual").get<double>();
    sol.duality_gap = j.at("duality_gap").get<double>();
    sol.iterations = j.at("iterations").get<int>();
    sol.converged = j.at("converged").get<bool>();
    sol.support_nodes = j.at("support").get<std::vector<int>>();
    sol.contact_nodes = j.at("contact").get<std::vector<int>>();
    if (sol.weights.size() != sol.nodes.size() || sol.diag_desing.size() != sol.nodes.size())
        throw std::runtime_error("solution: array sizes mismatch");
    for (int i : sol.support_nodes) {
        sol.measure.idx.push_back(static_cast<std::size_t>(i));
        sol.measure.w.push_back(sol.weights[static_cast<std::size_t>(i)]);
    }
    sol.measure.renormalize();
    return sol;
}

}  // namespace betapot
