#include "mdm/serialize.hpp"

#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace mdm {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

ordered_json geometry_json(const CrossbarGeometry& g) {
    return ordered_json{{"rows", g.rows}, {"cols", g.cols}, {"dataflow", to_string(g.dataflow)}};
}

ordered_json params_json(const ResistanceParams& p) {
    return ordered_json{
        {"wire_r", p.wire_r}, {"r_on", p.r_on}, {"r_off", p.r_off}, {"v_in", p.v_in}};
}

ordered_json parse(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

template <typename T>
T get_field(const ordered_json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).template get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string tile_to_json(const BitTile& tile, std::optional<double> scale) {
    tile.validate();
    ordered_json j;
    j["rows"] = tile.rows();
    j["cols"] = tile.cols();
    j["dataflow"] = to_string(tile.geometry.dataflow);
    j["significances"] = tile.significances;
    ordered_json active = ordered_json::array();
    for (int r = 0; r < tile.rows(); ++r)
        for (int c = 0; c < tile.cols(); ++c)
            if (tile.active(r, c)) active.push_back(ordered_json::array({r, c}));
    j["active"] = std::move(active);
    if (scale) j["scale"] = *scale;
    return j.dump(2) + "\n";
}

TileWithScale tile_from_json(const std::string& text) {
    const ordered_json j = parse(text);
    const int rows = get_field<int>(j, "rows");
    const int cols = get_field<int>(j, "cols");
    const auto flow_name = get_field<std::string>(j, "dataflow");
    auto sigs = get_field<std::vector<int>>(j, "significances");

    Dataflow flow;
    try {
        flow = dataflow_from_string(flow_name);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    if (rows < 1 || cols < 1) throw ParseError("tile dimensions must be positive");
    if (static_cast<int>(sigs.size()) != cols)
        throw ParseError("significance list must have one entry per column");

    // Group width is the run of equal significances at the head of the list
    // (= 1 for plain strictly-increasing layouts).
    int group = 1;
    while (group < cols && sigs[group] == sigs[0]) ++group;

    TileWithScale out{BitTile({rows, cols, flow}, std::move(sigs), group), std::nullopt};
    const auto active = get_field<std::vector<std::vector<int>>>(j, "active");
    for (const auto& cell : active) {
        if (cell.size() != 2) throw ParseError("active cells must be [row, col] pairs");
        if (cell[0] < 0 || cell[0] >= rows || cell[1] < 0 || cell[1] >= cols)
            throw ParseError("active cell outside the tile");
        out.tile.set_active(cell[0], cell[1], true);
    }
    if (j.contains("scale")) out.scale = get_field<double>(j, "scale");
    try {
        out.tile.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return out;
}

std::string plan_to_json(const MdmPlan& plan) {
    ordered_json j;
    j["row_perm"] = plan.row_perm;
    j["dataflow"] = to_string(plan.dataflow);
    return j.dump(2) + "\n";
}

MdmPlan plan_from_json(const std::string& text) {
    const ordered_json j = parse(text);
    MdmPlan plan;
    plan.row_perm = get_field<std::vector<int>>(j, "row_perm");
    try {
        plan.dataflow = dataflow_from_string(get_field<std::string>(j, "dataflow"));
        plan.validate(static_cast<int>(plan.row_perm.size()));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return plan;
}

std::string nf_report_to_json(const BitTile& tile, const ResistanceParams& params,
                              const NfPrediction& predicted, const NfMeasurement* measured) {
    ordered_json j;
    j["geometry"] = geometry_json(tile.geometry);
    j["params"] = params_json(params);
    j["predicted"] =
        ordered_json{{"nf_sum", predicted.nf_sum}, {"nf_normalized", predicted.nf_normalized}};
    if (measured) {
        j["measured"] = ordered_json{{"aggregate", measured->aggregate},
                                     {"per_column", measured->nf_per_column},
                                     {"excluded_columns", measured->excluded_columns}};
    }
    return j.dump(2) + "\n";
}

std::string sparsity_report_to_json(const SparsityReport& report) {
    ordered_json j;
    j["distribution"] = report.distribution;
    j["n"] = report.n;
    j["f0"] = report.f0;
    ordered_json cols = ordered_json::array();
    for (const auto& c : report.columns)
        cols.push_back(ordered_json{
            {"k", c.k}, {"p_hat", c.p_hat}, {"bound", c.bound}, {"ok", c.ok}});
    j["columns"] = std::move(cols);
    j["all_ok"] = report.all_ok();
    return j.dump(2) + "\n";
}

std::string fit_report_to_json(const FitReport& report) {
    ordered_json j;
    j["slope"] = report.slope;
    j["intercept"] = report.intercept;
    j["residual_mean_pct"] = report.residual_mean_pct;
    j["residual_std_pct"] = report.residual_std_pct;
    j["n_tiles"] = report.n_tiles;
    return j.dump(2) + "\n";
}

void write_weights_csv(std::ostream& out, const WeightMatrix& w) {
    w.validate();
    for (int r = 0; r < w.rows; ++r) {
        for (int c = 0; c < w.cols; ++c) {
            if (c) out << ',';
            out << format_double(w.at(r, c));
        }
        out << '\n';
    }
}

WeightMatrix read_weights_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            std::string field = line.substr(pos, comma - pos);
            // trim surrounding spaces
            const auto b = field.find_first_not_of(" \t");
            const auto e = field.find_last_not_of(" \t");
            if (b == std::string::npos) throw ParseError("empty field in weight CSV");
            field = field.substr(b, e - b + 1);
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size())
                throw ParseError("non-numeric field '" + field + "' in weight CSV");
            row.push_back(v);
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged weight CSV: rows have differing lengths");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("weight CSV contains no rows");
    WeightMatrix w(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < w.rows; ++r)
        for (int c = 0; c < w.cols; ++c) w.at(r, c) = rows[r][c];
    w.validate();
    return w;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
    out << "config,mean_nf,reduction_pct\n";
    for (const auto& r : rows)
        out << r.config << ',' << format_double(r.mean_nf) << ','
            << format_double(r.reduction_pct) << '\n';
}

void write_accuracy_csv(std::ostream& out, double eta, const AccuracyResult& result) {
    out << "eta,baseline_err,mdm_err\n";
    out << format_double(eta) << ',' << format_double(result.baseline_err) << ','
        << format_double(result.mdm_err) << '\n';
}

void write_scatter_csv(std::ostream& out, const std::vector<std::array<double, 2>>& points) {
    out << "predicted_nf,measured_nf\n";
    for (const auto& p : points)
        out << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
}

}  // namespace mdm
